"""JSON encoding of scalars, matrices, series and reports; experiment configs.

Scalars are ``{re_num, re_den, im_num, im_den}`` objects.  On input a real
rational may also be written ``{num, den}`` or as a bare integer.  Floats are
rejected everywhere so the pipeline stays exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from pclab.errors import ConfigError
from pclab.matrix import Mat
from pclab.scalar import Scalar
from pclab.series import INF, LaurentSeries

SCHEMA_VERSION = 1
MODES = ("scalar-demo", "verify", "sample")
MIN_WINDOW = 4


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{what} must be an integer, got {x!r}")
    return x


def _frac(num, den, what: str) -> Fraction:
    num, den = _int(num, what), _int(den, what)
    if den == 0:
        raise ConfigError(f"{what}: zero denominator")
    return Fraction(num, den)


def scalar_to_json(s: Scalar) -> dict:
    re, im = s.re, s.im
    return {"re_num": int(re.numerator), "re_den": int(re.denominator),
            "im_num": int(im.numerator), "im_den": int(im.denominator)}


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, int) and not isinstance(obj, bool):
        return Scalar(obj)
    if not isinstance(obj, dict):
        raise ConfigError(f"not an exact scalar: {obj!r}")
    if "num" in obj:
        extra = set(obj) - {"num", "den"}
        if extra:
            raise ConfigError(f"unexpected scalar keys {sorted(extra)}")
        return Scalar(_frac(obj["num"], obj.get("den", 1), "scalar"))
    known = {"re_num", "re_den", "im_num", "im_den"}
    if not obj or set(obj) - known:
        raise ConfigError(f"bad scalar object {obj!r}")
    re = _frac(obj.get("re_num", 0), obj.get("re_den", 1), "real part")
    im = _frac(obj.get("im_num", 0), obj.get("im_den", 1), "imaginary part")
    return Scalar(re, im)


def mat_to_json(a: Mat) -> list:
    return [[scalar_to_json(x) for x in row] for row in a.rows()]


def mat_from_json(obj) -> Mat:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ConfigError("a matrix is a non-empty list of rows")
    width = len(obj[0])
    if width == 0 or any(len(r) != width for r in obj):
        raise ConfigError("matrix rows must be non-empty and of equal length")
    return Mat.from_rows([[scalar_from_json(x) for x in row] for row in obj])


def series_to_json(s: LaurentSeries) -> dict:
    # exact series have no window; JSON has no infinity, so use null
    return {"n": s.n, "nu": s.nu if s.nu != INF else None,
            "window": None if s.window == INF else s.window,
            "coeffs": [mat_to_json(c) for c in s.coeffs]}


def series_from_json(obj) -> LaurentSeries:
    try:
        n, nu, window, coeffs = obj["n"], obj["nu"], obj["window"], obj["coeffs"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad series object: {exc}") from exc
    window = INF if window is None else _int(window, "window")
    mats = [mat_from_json(c) for c in coeffs]
    if not mats:
        return LaurentSeries.zero(_int(n, "n"), window)
    return LaurentSeries(_int(n, "n"), _int(nu, "nu"), mats, window)


def segment_to_json(seg, residual_windows=None) -> dict:
    out = {"m": seg.m, "states": [series_to_json(s) for s in seg.states],
           "residual_windows": [None if w == INF else w for w in (residual_windows or [])]}
    if seg.failed_index is not None:
        out["failed_index"] = seg.failed_index
        out["error"] = str(seg.error)
    return out


def _maybe_scalar(x):
    return None if x is None else scalar_to_json(x)


def report_to_json(report) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "r": report.r,
        "verdict": report.verdict,
        "label": report.label,
        "reason": report.reason,
        "predicted_valuations": (list(report.predicted_valuations)
                                 if report.predicted_valuations is not None else None),
        "not_generic": report.not_generic,
        "measured_valuations": report.measured_valuations,
        "lower_bounds": report.lower_bounds,
        "z_dets": [_maybe_scalar(d) for d in report.z_dets],
        "confinement_time": report.confinement_time,
        "failing_step": report.failing_step,
        "class_trace": [None if c is None else str(c) for c in report.class_trace],
    }


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# experiment configuration
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    mode: str
    n: int | None = None
    r: int | None = None
    m: int | None = None
    alpha: Mat | None = None
    prev_coeffs: list[Mat] = field(default_factory=list)
    cur_coeffs: list[Mat] = field(default_factory=list)
    # scalar-demo inputs
    beta_prev0: Scalar | None = None
    beta_m1: Scalar | None = None
    alpha_scalar: Scalar | None = None
    window: int = 8
    trials: int | None = None
    rng_seed: int = 0
    force_locus: bool = False
    output_path: str | None = None

    def validate(self) -> "ExperimentConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if _int(self.window, "window") < MIN_WINDOW:
            raise ConfigError(f"window must be >= {MIN_WINDOW}, got {self.window}")
        if not 0 <= _int(self.rng_seed, "rng_seed") < 2**64:
            raise ConfigError("rng_seed must fit in an unsigned 64-bit integer")
        if self.m is None or _int(self.m, "m") < 2:
            raise ConfigError(f"m must be an integer >= 2, got {self.m!r}")
        if self.mode == "scalar-demo":
            if self.beta_prev0 is None or self.beta_m1 is None or self.alpha_scalar is None:
                raise ConfigError("scalar-demo needs beta_prev0, beta_m1 and alpha")
            if not self.beta_m1:
                raise ConfigError("beta_m1 must be nonzero")
            return self
        if self.n is None or self.r is None:
            raise ConfigError(f"{self.mode} needs n and r")
        n, r = _int(self.n, "n"), _int(self.r, "r")
        if n < 1 or not 1 <= r <= n:
            raise ConfigError(f"need n >= 1 and 1 <= r <= n, got n={n}, r={r}")
        if self.mode == "verify":
            if self.alpha is None or not self.cur_coeffs:
                raise ConfigError("verify needs alpha and cur_coeffs")
            for a in [self.alpha, *self.prev_coeffs, *self.cur_coeffs]:
                if a.shape != (n, n):
                    raise ConfigError(f"every matrix must be {n}x{n}, got {a.shape}")
            if max(len(self.prev_coeffs), len(self.cur_coeffs)) > self.window + 1:
                raise ConfigError("more initial coefficients than the window holds")
        else:
            if self.trials is None or _int(self.trials, "trials") < 1:
                raise ConfigError(f"trials must be >= 1, got {self.trials!r}")
            if self.force_locus and r != n:
                raise ConfigError("force_locus needs r = n")
        return self


_KEYS = {"mode", "n", "r", "m", "alpha", "prev_coeffs", "cur_coeffs", "beta_prev0",
         "beta_m1", "window", "trials", "rng_seed", "force_locus", "output_path"}


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(d) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    mode = d.get("mode")
    cfg = ExperimentConfig(mode=mode)
    for key in ("n", "r", "m", "window", "trials", "rng_seed"):
        if key in d:
            setattr(cfg, key, _int(d[key], key))
    if "force_locus" in d:
        if not isinstance(d["force_locus"], bool):
            raise ConfigError("force_locus must be a boolean")
        cfg.force_locus = d["force_locus"]
    if "output_path" in d:
        cfg.output_path = str(d["output_path"])
    if mode == "scalar-demo":
        for key, attr in (("beta_prev0", "beta_prev0"), ("beta_m1", "beta_m1"),
                          ("alpha", "alpha_scalar")):
            if key in d:
                setattr(cfg, attr, scalar_from_json(d[key]))
    else:
        if "alpha" in d:
            cfg.alpha = mat_from_json(d["alpha"])
        for key in ("prev_coeffs", "cur_coeffs"):
            if key in d:
                if not isinstance(d[key], list):
                    raise ConfigError(f"{key} must be a list of matrices")
                setattr(cfg, key, [mat_from_json(x) for x in d[key]])
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a config file; structural problems raise ConfigError (validation is separate)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return config_from_dict(data)


def _reject_float(s: str):
    raise ConfigError(f"floating-point literal {s} in config; use {{num, den}}")
