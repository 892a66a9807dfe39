"""Command-line experiment driver.

Exit codes: 0 success, 1 confinement or verification failure, 2 hypotheses
void (degenerate initial data), 64 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from pathlib import Path

from pclab.confinement import verify_certificates
from pclab.dynamics import ModelParams, build_initial, residual_windows
from pclab.errors import ConfigError, DegenerateData, SingularD
from pclab.io import (
    dumps,
    load_config,
    report_to_json,
    scalar_to_json,
    segment_to_json,
)
from pclab.matrix import Mat
from pclab.sampler import CSV_COLUMNS, genericity_sample
from pclab.scalar import ZERO

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_VOID = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pclab", description="Singularity-confinement experiments for matrix dPI.")
    p.add_argument("--mode", choices=("scalar-demo", "verify", "sample"),
                   help="overrides the config's mode")
    p.add_argument("--config", required=True, help="JSON experiment config")
    p.add_argument("--out", help="output file (JSON report or CSV); default stdout")
    p.add_argument("--seed", type=int, help="sampler seed (unsigned 64-bit)")
    p.add_argument("--trials", type=int, help="number of sampler trials")
    p.add_argument("--window", type=int, help="initial data known through eps^window")
    return p


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_scalar_demo(cfg, out=None) -> int:
    m = cfg.m
    params = ModelParams(1, Mat.scalar(cfg.alpha_scalar), m)
    init = build_initial([Mat.scalar(cfg.beta_prev0)], [Mat.scalar(ZERO), Mat.scalar(cfg.beta_m1)],
                         1, params, cfg.window)
    rec = verify_certificates(init.prev, init.cur, init.partition, init.params)
    seg = rec.segment
    lines = [f"m={m} beta_(m-1,0)={cfg.beta_prev0} beta_(m,1)={cfg.beta_m1} alpha={cfg.alpha_scalar}"]
    for k in range(1, 5):
        if k + 1 >= len(seg.states):
            lines.append(f"beta_(m+{k}): not computed ({seg.error})")
            continue
        s = seg.states[k + 1]
        if s.is_zero:
            lines.append(f"beta_(m+{k}) = O(eps^{s.window})")
            continue
        terms = [(s.nu + i, c[0, 0]) for i, c in enumerate(s.coeffs[:3])]
        body = " + ".join(f"({c})*eps^{e}" for e, c in terms)
        lines.append(f"beta_(m+{k}) = {body} + O(eps^{s.nu + min(3, len(s.coeffs))})")
    s4 = seg.states[5] if len(seg.states) > 5 else None
    value = s4.coeff(0)[0, 0] if s4 is not None and s4.window > 0 and s4.nu >= 0 else None
    lines.append(f"beta_(m+4) at eps=0: {value if value is not None else 'undefined'}")
    rep = rec.report
    suffix = f"({rep.confinement_time})" if rep.confined else ""
    lines.append(f"verdict: {rep.label}{suffix}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out:
        doc = report_to_json(rep)
        doc["beta_m+4_order0"] = None if value is None else scalar_to_json(value)
        doc["segment"] = segment_to_json(seg)
        Path(out).write_text(dumps(doc))
    return EXIT_OK if rep.confined else EXIT_FAIL


def cmd_verify(cfg, out=None) -> int:
    params = ModelParams(cfg.n, cfg.alpha, cfg.m)
    init = build_initial(cfg.prev_coeffs, cfg.cur_coeffs, cfg.r, params, cfg.window)
    rec = verify_certificates(init.prev, init.cur, init.partition, init.params)
    doc = report_to_json(rec.report)
    doc["checks"] = dict(rec.checks)
    doc["passed"] = rec.passed
    seg = rec.segment
    try:
        res = residual_windows(seg, init.params)
    except AssertionError:
        res = None
        doc["passed"] = False
        doc["checks"]["residual"] = False
    doc["segment"] = segment_to_json(seg, res)
    _emit(dumps(doc), out)
    return EXIT_OK if doc["passed"] else EXIT_FAIL


def sample_csv(result) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for t in result.results:
        w.writerow(t.csv_row())
    return buf.getvalue()


def cmd_sample(cfg, out=None) -> int:
    result = genericity_sample(cfg.n, cfg.r, cfg.m, cfg.trials, cfg.rng_seed,
                               force_locus=cfg.force_locus, window=cfg.window)
    _emit(sample_csv(result), out)
    # keep stdout clean for the CSV when no output file is given
    stream = sys.stdout if out else sys.stderr
    stream.write(result.summary() + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config)
        if args.mode:
            cfg.mode = args.mode
        if args.seed is not None:
            cfg.rng_seed = args.seed
        if args.trials is not None:
            cfg.trials = args.trials
        if args.window is not None:
            cfg.window = args.window
        cfg.validate()
    except (_UsageError, ConfigError) as exc:
        sys.stderr.write(f"pclab: usage error: {exc}\n")
        return EXIT_USAGE
    out = args.out or cfg.output_path
    handler = {"scalar-demo": cmd_scalar_demo, "verify": cmd_verify, "sample": cmd_sample}[cfg.mode]
    try:
        return handler(cfg, out)
    except (SingularD, DegenerateData) as exc:
        sys.stderr.write(f"pclab: hypotheses void: {exc}\n")
        return EXIT_VOID
    except OSError as exc:
        sys.stderr.write(f"pclab: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
