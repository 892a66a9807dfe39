"""Forward and backward matrix dPI maps on truncated Laurent-series states.

The recursion is ``beta_{n+1} = n beta_n^-1 - beta_{n-1} - beta_n - alpha``;
read backwards it gives ``beta_{n-1}`` from ``(beta_{n+1}, beta_n)`` with the
same right-hand side.  The step index is always passed explicitly because the
map is non-autonomous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from pclab.errors import (
    DegenerateData,
    DimensionMismatch,
    InsufficientTruncation,
    RankMismatch,
    SizeMismatch,
)
from pclab.matrix import BlockPartition, Mat, inverse, rank, similarity_normalize
from pclab.scalar import Scalar
from pclab.series import LaurentSeries, ls_det_valuation, ls_inverse

# Initial states are known through eps**DEFAULT_WINDOW.
DEFAULT_WINDOW = 8


@dataclass(frozen=True)
class ModelParams:
    n: int
    alpha: Mat
    m: int

    def __post_init__(self):
        if self.alpha.shape != (self.n, self.n):
            raise DimensionMismatch(f"alpha must be {self.n}x{self.n}, got {self.alpha.shape}")
        if self.m < 2:
            raise ValueError(f"start index m must be >= 2, got {self.m}")


@dataclass
class TrajectorySegment:
    """States ``beta_{m-1}, beta_m, ...``; ``states[k]`` is ``beta_{m-1+k}``.

    When a step fails, ``failed_index`` is the ``n`` whose forward step
    ``beta_{n+1}`` could not be computed and ``error`` holds the exception.
    """

    m: int
    states: list[LaurentSeries]
    failed_index: int | None = None
    error: Exception | None = field(default=None, repr=False)

    def beta(self, k: int) -> LaurentSeries:
        """``beta_k`` by absolute index."""
        i = k - self.m + 1
        if not 0 <= i < len(self.states):
            raise IndexError(f"beta_{k} is not in this segment")
        return self.states[i]

    def __len__(self) -> int:
        return len(self.states)


def _rhs(n_index: int, other: LaurentSeries, cur: LaurentSeries, alpha: Mat) -> LaurentSeries:
    if other.n != cur.n or alpha.n_rows != cur.n:
        raise SizeMismatch("state sizes differ")
    return ls_inverse(cur) * n_index - other - cur - alpha


def step_forward(n_index: int, beta_prev: LaurentSeries, beta_cur: LaurentSeries,
                 params: ModelParams) -> LaurentSeries:
    return _rhs(n_index, beta_prev, beta_cur, params.alpha)


def step_backward(n_index: int, beta_next: LaurentSeries, beta_cur: LaurentSeries,
                  params: ModelParams) -> LaurentSeries:
    return _rhs(n_index, beta_next, beta_cur, params.alpha)


def residual(n_index: int, prev: LaurentSeries, cur: LaurentSeries, nxt: LaurentSeries,
             params: ModelParams) -> LaurentSeries:
    """``n cur^-1 - prev - cur - alpha - nxt``; zero to its window on a true orbit."""
    return ls_inverse(cur) * n_index - prev - cur - params.alpha - nxt


def run_trajectory(initial_prev: LaurentSeries, initial_cur: LaurentSeries,
                   params: ModelParams, steps: int) -> TrajectorySegment:
    if steps < 1:
        raise ValueError("steps must be >= 1")
    seg = TrajectorySegment(params.m, [initial_prev, initial_cur])
    for k in range(steps):
        n_index = params.m + k
        try:
            nxt = step_forward(n_index, seg.states[-2], seg.states[-1], params)
        except InsufficientTruncation as exc:
            seg.failed_index = n_index
            seg.error = exc
            break
        seg.states.append(nxt)
    return seg


def run_backward(beta_last: LaurentSeries, beta_before: LaurentSeries, last_index: int,
                 params: ModelParams, steps: int) -> list[LaurentSeries]:
    """Iterate the time-reversed map from ``(beta_N, beta_{N-1})``, ``N = last_index``.

    Returns ``[beta_{N-2}, beta_{N-3}, ...]``, ``steps`` states.
    """
    nxt, cur = beta_last, beta_before
    out = []
    for k in range(steps):
        prev = step_backward(last_index - 1 - k, nxt, cur, params)
        out.append(prev)
        nxt, cur = cur, prev
    return out


def residual_windows(seg: TrajectorySegment, params: ModelParams) -> list:
    """Window of each recursion residual; raises if a residual is not zero."""
    out = []
    for k in range(1, len(seg.states) - 1):
        res = residual(seg.m + k - 1, seg.states[k - 1], seg.states[k], seg.states[k + 1], params)
        if not res.is_zero:
            raise AssertionError(f"recursion residual at n={seg.m + k - 1} is nonzero")
        out.append(res.window)
    return out


def conjugate_series(a: LaurentSeries, M: Mat, Minv: Mat) -> LaurentSeries:
    if a.is_zero:
        return a
    return LaurentSeries(a.n, a.nu, [M @ c @ Minv for c in a.coeffs], a.window)


def conjugate(segment: TrajectorySegment, M: Mat,
              params: ModelParams) -> tuple[TrajectorySegment, ModelParams]:
    """Apply ``beta -> M beta M^-1`` and ``alpha -> M alpha M^-1``."""
    Minv = inverse(M)
    states = [conjugate_series(s, M, Minv) for s in segment.states]
    new_params = ModelParams(params.n, M @ params.alpha @ Minv, params.m)
    return TrajectorySegment(segment.m, states, segment.failed_index, segment.error), new_params


@dataclass(frozen=True)
class InitialState:
    prev: LaurentSeries
    cur: LaurentSeries
    params: ModelParams
    partition: BlockPartition
    similarity: Mat


def _pad_series(coeffs: Sequence[Mat], n: int, window: int) -> LaurentSeries:
    coeffs = list(coeffs)
    if len(coeffs) > window + 1:
        raise ValueError(f"{len(coeffs)} coefficients exceed window {window}")
    for c in coeffs:
        if c.shape != (n, n):
            raise SizeMismatch(f"coefficient of shape {c.shape}, expected {n}x{n}")
    return LaurentSeries(n, 0, coeffs, window + 1)


def build_initial(prev_coeffs: Sequence[Mat], cur_coeffs: Sequence[Mat], r: int,
                  params: ModelParams, window: int = DEFAULT_WINDOW) -> InitialState:
    """Normalize and validate ``(beta_{m-1}, beta_m)`` given coefficients from order 0.

    Coefficients beyond those supplied are zero through ``eps**window``.  The
    pair and alpha are conjugated so that ``beta_{m,0}`` has zero first r rows;
    ``det beta_m`` must then have order exactly ``eps**r``.
    """
    n = params.n
    p = BlockPartition(n, r)
    if not cur_coeffs:
        raise DegenerateData("beta_m needs at least one coefficient")
    b0 = cur_coeffs[0]
    rk = rank(b0)
    if rk != n - r:
        raise RankMismatch(f"rank(beta_m,0) = {rk}, expected n - r = {n - r}")
    M = similarity_normalize(b0, r)
    Minv = inverse(M)
    prev = _pad_series([M @ c @ Minv for c in prev_coeffs] or [Mat.zeros(n)], n, window)
    cur = _pad_series([M @ c @ Minv for c in cur_coeffs], n, window)
    new_params = ModelParams(n, M @ params.alpha @ Minv, params.m)
    try:
        d, _ = ls_det_valuation(cur)
    except InsufficientTruncation as exc:
        raise DegenerateData(f"det beta_m vanishes through the window: {exc}") from exc
    if d != r:
        raise DegenerateData(f"det beta_m has order eps^{d}, expected eps^{r}")
    return InitialState(prev, cur, new_params, p, M)


# ---------------------------------------------------------------------------
# scalar (N = 1) and maximal-rank closed forms
# ---------------------------------------------------------------------------


def closed_form_coefficients(m: int, beta_prev0, beta_m1, alpha) -> dict[str, object]:
    """Leading coefficients of beta_{m+1..m+4} when beta_m = beta_{m,1} eps + O(eps^2).

    Arguments are either all Scalars (N = 1) or all matrices (maximal rank,
    ``beta_{m,1}`` invertible).
    """
    if isinstance(beta_m1, Mat):
        inv = inverse(beta_m1)
        scale = lambda x, s: x.scale(s)  # noqa: E731
    else:
        beta_m1 = Scalar.coerce(beta_m1)
        beta_prev0 = Scalar.coerce(beta_prev0)
        alpha = Scalar.coerce(alpha)
        inv = beta_m1.inverse()
        scale = lambda x, s: x * s  # noqa: E731
    return {
        "beta_m+1_pole": scale(inv, m),
        "beta_m+2_pole": scale(inv, -m),
        "beta_m+3_eps1": scale(beta_m1, Fraction(-(m + 3), m)),
        "beta_m+4_order0": scale(beta_prev0, Fraction(m, m + 3)) - scale(alpha, Fraction(2, m + 3)),
    }
