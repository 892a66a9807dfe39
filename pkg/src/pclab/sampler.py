"""Seeded random initial data, engineered degenerate data, and the genericity sampler.

Sampling distribution: every real and every imaginary part is drawn
independently as ``num/den`` with ``num`` uniform in ``[-num_max, num_max]``
and ``den`` uniform in ``[1, den_max]`` (defaults 9 and 9).  Trial ``t`` of a
run seeded with ``s`` uses ``numpy.random.default_rng([s, t])``, so each trial
is reproducible on its own and trials can run in any order.
"""

from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from pclab.confinement import ConfinementReport, verify_certificates
from pclab.dynamics import DEFAULT_WINDOW, InitialState, ModelParams, build_initial
from pclab.errors import DegenerateData, Singular
from pclab.matrix import BlockPartition, Mat, blocks, det, inverse, reassemble
from pclab.scalar import Scalar

MAX_DRAWS = 100


@dataclass(frozen=True)
class Distribution:
    num_max: int = 9
    den_max: int = 9
    complex_entries: bool = True

    def scalar(self, rng: np.random.Generator) -> Scalar:
        def part():
            return Fraction(int(rng.integers(-self.num_max, self.num_max + 1)),
                            int(rng.integers(1, self.den_max + 1)))
        re = part()
        im = part() if self.complex_entries else 0
        return Scalar(re, im)

    def mat(self, rng: np.random.Generator, rows: int, cols: int | None = None) -> Mat:
        cols = rows if cols is None else cols
        return Mat(rows, cols, [self.scalar(rng) for _ in range(rows * cols)])


@dataclass(frozen=True)
class RawInstance:
    """Unnormalized initial data: coefficient lists from order 0, and alpha."""

    n: int
    r: int
    m: int
    prev_coeffs: tuple[Mat, ...]
    cur_coeffs: tuple[Mat, ...]
    alpha: Mat

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.n, self.alpha, self.m)

    def build(self, window: int = DEFAULT_WINDOW) -> InitialState:
        return build_initial(self.prev_coeffs, self.cur_coeffs, self.r, self.params, window)


def _random_invertible(rng, dist: Distribution, size: int) -> Mat:
    for _ in range(MAX_DRAWS):
        x = dist.mat(rng, size)
        if det(x):
            return x
    raise RuntimeError("could not draw an invertible matrix")


def random_instance(rng: np.random.Generator, n: int, r: int, m: int,
                    dist: Distribution = Distribution(), orders: int = 3,
                    force_locus: bool = False, window: int = DEFAULT_WINDOW) -> RawInstance:
    """Draw admissible data already in normalized form.

    ``beta_{m-1}`` and ``beta_m`` get ``orders`` random coefficients.  For
    ``r < n`` the order-0 coefficient of ``beta_m`` has zero first r rows and
    an invertible bottom-right block; for ``r = n`` it is zero and the
    order-1 coefficient is invertible.  Draws whose ``det beta_m`` is not of
    order exactly ``eps**r`` are rejected.  ``force_locus`` (maximal rank
    only) sets ``alpha = (m/2) beta_{m-1,0}``.
    """
    if force_locus and r != n:
        raise ValueError("force_locus applies to the maximal-rank case r = n")
    p = BlockPartition(n, r)
    for _ in range(MAX_DRAWS):
        prev = [dist.mat(rng, n) for _ in range(orders)]
        if p.maximal:
            cur = [Mat.zeros(n), _random_invertible(rng, dist, n)]
            cur += [dist.mat(rng, n) for _ in range(orders - 2)]
        else:
            C0 = dist.mat(rng, n - r, r)
            D0 = _random_invertible(rng, dist, n - r)
            cur = [reassemble(Mat.zeros(r), Mat.zeros(r, n - r), C0, D0)]
            cur += [dist.mat(rng, n) for _ in range(orders - 1)]
        alpha = dist.mat(rng, n)
        if force_locus:
            alpha = prev[0].scale(Fraction(m, 2))
        inst = RawInstance(n, r, m, tuple(prev), tuple(cur), alpha)
        try:
            inst.build(window)
        except DegenerateData:
            continue
        return inst
    raise RuntimeError("could not draw admissible initial data")


# ---------------------------------------------------------------------------
# on-variety witnesses
# ---------------------------------------------------------------------------


def _random_singular(rng, dist: Distribution, size: int) -> Mat:
    """Random matrix of rank ``size - 1`` (zero when size is 1)."""
    if size == 1:
        return Mat.zeros(1)
    x = dist.mat(rng, size - 1, size)
    coeffs = dist.mat(rng, 1, size - 1)
    rows = x.rows() + [list((coeffs @ x).entries)]
    return Mat.from_rows(rows)


def _set_blocks(a: Mat, p: BlockPartition, B: Mat | None = None, D: Mat | None = None) -> Mat:
    A0, B0, C0, D0 = blocks(a, p)
    return reassemble(A0, B if B is not None else B0, C0, D if D is not None else D0)


def engineer_witness(rng: np.random.Generator, base: RawInstance, which: str,
                     dist: Distribution = Distribution()) -> RawInstance:
    """Modify ``base`` so that the certificate ``which`` is singular.

    ``Z1``: solve for ``D_{m-1,0}``.  ``Z2``/``Z3``: additionally fix
    ``alpha_22`` so the lower-order certificates are a chosen invertible
    ``Y`` (and ``W``), keeping every entry rational.  ``base`` must be
    normalized (``beta_{m,0}`` with zero top rows).
    """
    n, r, m = base.n, base.r, base.m
    p = BlockPartition(n, r)
    if p.maximal:
        raise ValueError("witnesses need r < n")
    size = n - r
    _, _, C0, D0 = blocks(base.cur_coeffs[0], p)
    Dinv = inverse(D0)
    G = Dinv @ C0
    _, B_prev, _, _ = blocks(base.prev_coeffs[0], p)
    _, a12, _, a22 = blocks(base.alpha, p)

    def x_of(a22_):
        return Dinv.scale(m) - D0 - a22_ - G @ (B_prev + a12)

    if which == "Z1":
        S = _random_singular(rng, dist, size)
        new_D_prev = x_of(a22) - S
        alpha = base.alpha
    elif which in ("Z2", "Z3"):
        for _ in range(MAX_DRAWS):
            Y = _random_invertible(rng, dist, size)
            Yinv = inverse(Y)
            S = _random_singular(rng, dist, size)
            if which == "Z2":
                W = S
            else:
                try:
                    W = inverse((S - D0 + Yinv.scale(m + 1)).scale(Fraction(1, m + 2)))
                except Singular:
                    continue
            break
        else:
            raise RuntimeError("could not construct witness")
        K = Yinv.scale(m + 1) - Y - W
        a22 = K - D0 - G @ a12
        alpha = _set_blocks(base.alpha, p, D=a22)
        new_D_prev = x_of(a22) - Y
    else:
        raise ValueError(f"unknown certificate {which!r}")
    prev = (_set_blocks(base.prev_coeffs[0], p, D=new_D_prev),) + base.prev_coeffs[1:]
    return replace(base, prev_coeffs=prev, alpha=alpha)


# ---------------------------------------------------------------------------
# genericity sampler
# ---------------------------------------------------------------------------


CSV_COLUMNS = ("trial", "seed_offset", "verdict", "det_Z1", "det_Z2", "det_Z3",
               "valuations", "failing_step")


@dataclass
class TrialResult:
    trial: int
    report: ConfinementReport
    certificates_ok: bool
    instance: RawInstance

    def csv_row(self) -> list[str]:
        rep = self.report
        dets = list(rep.z_dets) + [None] * (3 - len(rep.z_dets))
        vals = []
        for v, lb in zip(rep.measured_valuations, rep.lower_bounds):
            vals.append(str(v) if v is not None else (f">={lb}" if lb is not None else "?"))
        return [str(self.trial), str(self.trial), rep.label,
                *("" if d is None else str(d) for d in dets),
                ";".join(vals), "" if rep.failing_step is None else str(rep.failing_step)]


@dataclass
class SampleResult:
    n: int
    r: int
    m: int
    trials: int
    rng_seed: int
    results: list[TrialResult] = field(default_factory=list)

    @property
    def counts(self) -> Counter:
        return Counter(t.report.label for t in self.results)

    @property
    def failures(self) -> list[TrialResult]:
        return [t for t in self.results if not t.report.confined]

    @property
    def certificate_violations(self) -> int:
        return sum(not t.certificates_ok for t in self.results)

    def failure_fraction(self) -> float:
        return len(self.failures) / max(1, len(self.results))

    def summary(self) -> str:
        hist = ", ".join(f"{k}={v}" for k, v in sorted(self.counts.items()))
        return (f"n={self.n} r={self.r} m={self.m} seed={self.rng_seed} trials={self.trials}: "
                f"{hist}; certificate_violations={self.certificate_violations}")


@dataclass(frozen=True)
class _Job:
    n: int
    r: int
    m: int
    rng_seed: int
    dist: Distribution
    force_locus: bool
    window: int


def _run_trial(job: _Job, trial: int) -> TrialResult:
    rng = np.random.default_rng([job.rng_seed, trial])
    inst = random_instance(rng, job.n, job.r, job.m, job.dist,
                           force_locus=job.force_locus, window=job.window)
    init = inst.build(job.window)
    rec = verify_certificates(init.prev, init.cur, init.partition, init.params, backward=False)
    return TrialResult(trial, rec.report, rec.passed, inst)


def _run_chunk(args) -> list[TrialResult]:
    job, trials = args
    return [_run_trial(job, t) for t in trials]


def worker_count() -> int:
    cap = os.environ.get("PCLAB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def genericity_sample(n: int, r: int, m: int, trials: int, rng_seed: int,
                      dist: Distribution = Distribution(), force_locus: bool = False,
                      window: int = DEFAULT_WINDOW, workers: int | None = None) -> SampleResult:
    """Run ``trials`` independent random instances and tally the verdicts.

    Results are ordered by trial index whatever ``workers`` is, so the output
    depends only on the arguments.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= rng_seed < 2**64:
        raise ValueError("rng_seed must be an unsigned 64-bit integer")
    job = _Job(n, r, m, rng_seed, dist, force_locus, window)
    workers = worker_count() if workers is None else workers
    out = SampleResult(n, r, m, trials, rng_seed)
    if workers <= 1 or trials < 4:
        out.results = [_run_trial(job, t) for t in range(trials)]
        return out
    chunks = [range(i, trials, workers) for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, [(job, c) for c in chunks]))
    results = [t for part in parts for t in part]
    results.sort(key=lambda t: t.trial)
    out.results = results
    return out
