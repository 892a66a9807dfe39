"""Truncated matrix-valued Laurent series in a small parameter eps.

A :class:`LaurentSeries` stores the coefficients of ``eps**nu .. eps**(window-1)``;
everything from ``window`` upward is unknown.  A series whose known
coefficients all vanish is the zero-to-window series (no coefficients,
``nu == window``).  ``window`` may be ``math.inf`` for exact (polynomial)
data such as the constant ``alpha``.

Windows are certified: every operation returns the tightest window its
inputs justify and never reports a coefficient it cannot prove.

Inversion and determinants run Gaussian elimination over scalar truncated
Laurent series with full pivoting (minimal valuation, then lowest row, then
lowest column).  The elimination is carried out on the known part padded
with extra working precision; the certified window of the inverse then
follows from the perturbation bound ``(A+E)^-1 - A^-1 = O(eps**(w - 2s))``
where ``w`` is the input window, ``E = O(eps**w)`` the unknown tail and
``eps**-s`` the order of ``A^-1``.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence

from pclab.errors import (
    InsufficientTruncation,
    SingularToWindow,
    SizeMismatch,
    WindowGrow,
)
from pclab.matrix import BlockPartition, Mat
from pclab.scalar import ONE, ZERO, Scalar

INF = math.inf

# Exact inputs carry no window of their own; inverting them yields this many
# certified coefficients beyond what the input stores.
EXACT_INVERSE_TERMS = 8

_MAX_ROUNDS = 12


class LaurentSeries:
    __slots__ = ("n", "nu", "coeffs", "window")

    def __init__(self, n: int, nu, coeffs: Sequence[Mat], window):
        for c in coeffs:
            if c.shape != (n, n):
                raise SizeMismatch(f"coefficient of shape {c.shape} in a {n}x{n} series")
        coeffs = list(coeffs)
        lead = 0
        while lead < len(coeffs) and coeffs[lead].is_zero():
            lead += 1
        if window != INF:
            window = int(window)
            if nu + len(coeffs) > window:
                raise ValueError("coefficients extend past the window")
        nu = nu + lead
        coeffs = coeffs[lead:]
        if not coeffs or nu >= window:
            self.n, self.nu, self.coeffs, self.window = n, window, (), window
            return
        if window == INF:
            while coeffs[-1].is_zero():
                coeffs.pop()
        else:
            coeffs.extend([Mat.zeros(n)] * (window - nu - len(coeffs)))
        self.n = n
        self.nu = int(nu)
        self.coeffs = tuple(coeffs)
        self.window = window

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int, window) -> "LaurentSeries":
        return cls(n, window, (), window)

    @classmethod
    def constant(cls, m: Mat, window=INF) -> "LaurentSeries":
        return cls(m.n_rows, 0, [m], window)

    @classmethod
    def identity(cls, n: int, window=INF) -> "LaurentSeries":
        return cls.constant(Mat.identity(n), window)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Mat], nu: int = 0, window=None) -> "LaurentSeries":
        """Series with the given coefficients from ``eps**nu``; window defaults to just past them."""
        if not coeffs:
            raise ValueError("need at least one coefficient to infer the size")
        n = coeffs[0].n_rows
        if window is None:
            window = nu + len(coeffs)
        return cls(n, nu, coeffs, window)

    @classmethod
    def scalar(cls, values: Sequence, nu: int = 0, window=None) -> "LaurentSeries":
        """1 x 1 series from scalar coefficients."""
        return cls.from_coeffs([Mat.scalar(v) for v in values], nu, window)

    # -- access -------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_exact(self) -> bool:
        return self.window == INF

    def coeff(self, k: int) -> Mat:
        """Coefficient of ``eps**k``; raises if ``k`` is outside the window."""
        if k >= self.window:
            raise InsufficientTruncation(f"order {k} is beyond the window {self.window}")
        i = k - self.nu
        if i < 0 or i >= len(self.coeffs):
            return Mat.zeros(self.n)
        return self.coeffs[i]

    def _c(self, k: int) -> Mat | None:
        i = k - self.nu
        if i < 0 or i >= len(self.coeffs):
            return None
        return self.coeffs[i]

    def _end(self):
        """One past the last order that needs computing."""
        return self.window if self.window != INF else self.nu + len(self.coeffs)

    def entry_coeffs(self, i: int, j: int, upto: int) -> list[Scalar]:
        """Coefficients of entry (i, j) for orders ``nu .. upto-1``, zero-padded."""
        out = []
        for k in range(self.nu, upto):
            c = self._c(k)
            out.append(c[i, j] if c is not None else ZERO)
        return out

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.n == other.n and self.nu == other.nu
                and self.window == other.window and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.n, self.nu, self.window, self.coeffs))

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """True if the two series coincide on their shared window."""
        return ls_sub(self, other).is_zero

    # -- operators ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Mat):
            other = LaurentSeries.constant(other)
        return ls_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Mat):
            other = LaurentSeries.constant(other)
        return ls_sub(self, other)

    def __rsub__(self, other):
        return ls_neg(self) + other

    def __neg__(self):
        return ls_neg(self)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return ls_mul(self, other)
        if isinstance(other, Mat):
            return ls_mul(self, LaurentSeries.constant(other))
        return ls_scale(self, other)

    def __rmul__(self, other):
        if isinstance(other, Mat):
            return ls_mul(LaurentSeries.constant(other), self)
        return ls_scale(self, other)

    def __repr__(self) -> str:
        if self.is_zero:
            return f"LaurentSeries(n={self.n}, zero to eps^{self.window})"
        terms = ", ".join(f"eps^{self.nu + k}: {c}" for k, c in enumerate(self.coeffs))
        return f"LaurentSeries(n={self.n}, {terms}; window={self.window})"


def _check_n(a: LaurentSeries, b: LaurentSeries) -> None:
    if a.n != b.n:
        raise SizeMismatch(f"series sizes differ: {a.n} vs {b.n}")


def ls_add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    _check_n(a, b)
    window = min(a.window, b.window)
    lo = min(a.nu, b.nu)
    if lo >= window:
        return LaurentSeries.zero(a.n, window)
    end = window if window != INF else max(a._end(), b._end())
    out = []
    for k in range(lo, end):
        x, y = a._c(k), b._c(k)
        if x is None:
            out.append(y if y is not None else Mat.zeros(a.n))
        elif y is None:
            out.append(x)
        else:
            out.append(x + y)
    return LaurentSeries(a.n, lo, out, window)


def ls_neg(a: LaurentSeries) -> LaurentSeries:
    if a.is_zero:
        return a
    return LaurentSeries(a.n, a.nu, [-c for c in a.coeffs], a.window)


def ls_sub(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return ls_add(a, ls_neg(b))


def ls_scale(a: LaurentSeries, s) -> LaurentSeries:
    s = Scalar.coerce(s)
    if not s:
        return LaurentSeries.zero(a.n, a.window)
    if a.is_zero:
        return a
    return LaurentSeries(a.n, a.nu, [c.scale(s) for c in a.coeffs], a.window)


def ls_shift(a: LaurentSeries, k: int) -> LaurentSeries:
    """Multiply by ``eps**k``."""
    if a.is_zero:
        return LaurentSeries.zero(a.n, a.window + k)
    return LaurentSeries(a.n, a.nu + k, a.coeffs, a.window + k)


def ls_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Cauchy product; ``window = min(a.nu + b.window, b.nu + a.window)``."""
    _check_n(a, b)
    window = min(a.nu + b.window, b.nu + a.window)
    if a.is_zero or b.is_zero:
        return LaurentSeries.zero(a.n, window)
    nu = a.nu + b.nu
    if window == INF:
        length = len(a.coeffs) + len(b.coeffs) - 1
    else:
        length = window - nu
    ac, bc = a.coeffs, b.coeffs
    out = []
    for k in range(length):
        acc = None
        for i in range(max(0, k - len(bc) + 1), min(k + 1, len(ac))):
            x, y = ac[i], bc[k - i]
            if x.is_zero() or y.is_zero():
                continue
            t = x @ y
            acc = t if acc is None else acc + t
        out.append(acc if acc is not None else Mat.zeros(a.n))
    return LaurentSeries(a.n, nu, out, window)


def ls_truncate(a: LaurentSeries, new_window: int) -> LaurentSeries:
    if new_window > a.window:
        raise WindowGrow(f"cannot grow window {a.window} to {new_window}")
    if new_window <= a.nu:
        return LaurentSeries.zero(a.n, new_window)
    return LaurentSeries(a.n, a.nu, a.coeffs[:new_window - a.nu], new_window)


# ---------------------------------------------------------------------------
# scalar truncated Laurent series, used only inside elimination
# ---------------------------------------------------------------------------


class _S:
    """Scalar series: coefficients ``c`` of orders ``nu..w-1``; zero iff ``c`` is empty."""

    __slots__ = ("nu", "c", "w")

    def __init__(self, nu: int, c: list, w: int):
        i = 0
        while i < len(c) and not c[i]:
            i += 1
        if i == len(c) or nu + i >= w:
            self.nu, self.c, self.w = w, [], w
            return
        c = c[i:] if i else c
        nu += i
        short = w - nu - len(c)
        if short > 0:
            c = c + [ZERO] * short
        elif short < 0:
            c = c[:w - nu]
        self.nu, self.c, self.w = nu, c, w

    @property
    def zero(self) -> bool:
        return not self.c


def _s_add(a: _S, b: _S, sign: int = 1) -> _S:
    w = min(a.w, b.w)
    lo = min(a.nu, b.nu)
    if lo >= w:
        return _S(w, [], w)
    out = []
    an, bn, ac, bc = a.nu, b.nu, a.c, b.c
    la, lb = len(ac), len(bc)
    for k in range(lo, w):
        i, j = k - an, k - bn
        x = ac[i] if 0 <= i < la else None
        y = bc[j] if 0 <= j < lb else None
        if y is None:
            out.append(x if x is not None else ZERO)
        elif sign < 0:
            out.append(-y if x is None else x - y)
        else:
            out.append(y if x is None else x + y)
    return _S(lo, out, w)


def _s_mul(a: _S, b: _S) -> _S:
    w = min(a.nu + b.w, b.nu + a.w)
    if a.zero or b.zero:
        return _S(w, [], w)
    nu = a.nu + b.nu
    ac, bc = a.c, b.c
    out = []
    for k in range(w - nu):
        acc = ZERO
        for i in range(k + 1):
            x = ac[i]
            if x:
                y = bc[k - i]
                if y:
                    acc = acc + x * y
        out.append(acc)
    return _S(nu, out, w)


def _s_div(a: _S, b: _S) -> _S:
    """``a / b``; ``b`` must have a certified nonzero leading coefficient."""
    if a.zero:
        w = a.w - b.nu
        return _S(w, [], w)
    nu = a.nu - b.nu
    length = min(a.w - a.nu, b.w - b.nu)
    ac, bc = a.c, b.c
    inv0 = bc[0].inverse()
    q = []
    for k in range(length):
        acc = ac[k]
        for i in range(1, k + 1):
            y = bc[i]
            if y:
                x = q[k - i]
                if x:
                    acc = acc - y * x
        q.append(acc * inv0)
    return _S(nu, q, nu + length)


def _eliminate(m: list[list[_S]], n: int, aug: list[list[_S]] | None):
    """Full-pivot elimination in place.

    Returns ``(pivots, vanished)`` where ``pivots`` lists ``(row, col, _S)``.
    If ``aug`` is given every non-pivot row is cleared (Gauss-Jordan) and the
    augmented block is carried along.  ``vanished`` is None on success, else
    the smallest window among the remaining entries, all of which are zero to
    their windows.
    """
    rows_left = list(range(n))
    cols_left = list(range(n))
    pivots = []
    for _ in range(n):
        best = None
        for i in rows_left:
            mi = m[i]
            for j in cols_left:
                e = mi[j]
                if e.c and (best is None or e.nu < best[0]):
                    best = (e.nu, i, j)
        if best is None:
            return pivots, min(m[i][j].w for i in rows_left for j in cols_left)
        _, pi, pj = best
        p = m[pi][pj]
        rows_left.remove(pi)
        cols_left.remove(pj)
        pivots.append((pi, pj, p))
        prow = m[pi]
        targets = rows_left if aug is None else [i for i in range(n) if i != pi]
        for i in targets:
            e = m[i][pj]
            if not e.c and e.w == INF:
                continue
            f = _s_div(e, p)
            mi = m[i]
            for j in cols_left:
                mi[j] = _s_add(mi[j], _s_mul(f, prow[j]), -1)
            if aug is not None:
                ai, ap = aug[i], aug[pi]
                for j in range(n):
                    ai[j] = _s_add(ai[j], _s_mul(f, ap[j]), -1)
            mi[pj] = _S(0, [], INF)
    return pivots, None


def _perm_sign(pivots) -> int:
    perm = [0] * len(pivots)
    for pi, pj, _ in pivots:
        perm[pi] = pj
    sign, seen = 1, [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        j, length = start, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _to_scalar_matrix(a: LaurentSeries, work: int) -> list[list[_S]]:
    n = a.n
    return [[_S(a.nu, a.entry_coeffs(i, j, work), work) for j in range(n)] for i in range(n)]


def _base_window(a: LaurentSeries) -> int:
    return a.window if a.window != INF else a.nu + len(a.coeffs)


def _det_window(a: LaurentSeries):
    """Orders below this are fixed in det(a) by the known coefficients."""
    if a.window == INF:
        return INF
    return a.window + (a.n - 1) * a.nu


def ls_det_valuation(a: LaurentSeries) -> tuple[int, Scalar]:
    """``(d, lead)`` with ``det(a) = lead * eps**d + O(eps**(d+1))``, ``lead != 0``.

    Raises SingularToWindow when the determinant provably vanishes below its
    certified window and InsufficientTruncation when its order cannot be
    certified; both carry ``lower_bound``.
    """
    n = a.n
    if a.is_zero:
        raise SingularToWindow("zero series", lower_bound=n * a.window)
    base = _base_window(a)
    wd = _det_window(a)
    # Start from a short truncation: only pivot orders and leading terms matter.
    work = min(base, a.nu + 2)
    for _ in range(_MAX_ROUNDS):
        m = _to_scalar_matrix(a, work)
        cut = work + (n - 1) * a.nu if work < base else wd
        pivots, vanished = _eliminate(m, n, None)
        if vanished is not None:
            bound = sum(p.nu for _, _, p in pivots) + (n - len(pivots)) * vanished
            if bound >= cut and work >= base:
                raise SingularToWindow("determinant vanishes to its window", lower_bound=wd)
        else:
            d = sum(p.nu for _, _, p in pivots)
            if d < cut:
                lead = ONE if _perm_sign(pivots) > 0 else -ONE
                for _, _, p in pivots:
                    lead = lead * p.c[0]
                return d, lead
            if work >= base:
                raise InsufficientTruncation(
                    f"det order {d} is not below the certified window {wd}", lower_bound=wd)
        work = min(base, 2 * work - a.nu) if work < base else work + (work - a.nu)
    raise InsufficientTruncation("working precision exhausted while pivoting",
                                 lower_bound=min(wd, n * base))


def ls_inverse(a: LaurentSeries) -> LaurentSeries:
    """Inverse series, certified to the window the input's known part supports."""
    n = a.n
    if a.is_zero:
        raise SingularToWindow("zero series has no inverse", lower_bound=n * a.window)
    exact = a.window == INF
    base = _base_window(a)
    wd = _det_window(a)
    work = base + 2
    for _ in range(_MAX_ROUNDS):
        m = _to_scalar_matrix(a, work)
        aug = [[_S(0, [ONE], work) if i == j else _S(work, [], work) for j in range(n)]
               for i in range(n)]
        pivots, vanished = _eliminate(m, n, aug)
        if vanished is not None:
            bound = sum(p.nu for _, _, p in pivots) + (n - len(pivots)) * vanished
            if bound >= wd:
                raise SingularToWindow("every candidate pivot vanishes to its window",
                                       lower_bound=wd)
            work += work - a.nu
            continue
        x = [[None] * n for _ in range(n)]
        for pi, pj, p in pivots:
            x[pj] = [_s_div(e, p) for e in aug[pi]]
        s = -min(e.nu for row in x for e in row if e.c)
        if exact:
            target = -s + max(len(a.coeffs), 1) + EXACT_INVERSE_TERMS
        else:
            if a.window <= s:
                raise InsufficientTruncation(
                    f"inverse has order eps^-{s} but the input is known only below "
                    f"eps^{a.window}")
            target = a.window - 2 * s
        reached = min(e.w for row in x for e in row)
        if reached < target:
            work += target - reached + 1
            continue
        coeffs = []
        for k in range(-s, target):
            coeffs.append(Mat._raw(n, n, tuple(_s_coeff(x[i][j], k)
                                               for i in range(n) for j in range(n))))
        return LaurentSeries(n, -s, coeffs, target)
    raise InsufficientTruncation("working precision exhausted while inverting")


def _s_coeff(e: _S, k: int) -> Scalar:
    i = k - e.nu
    if i < 0 or i >= len(e.c):
        return ZERO
    return e.c[i]


# ---------------------------------------------------------------------------
# ring classes
# ---------------------------------------------------------------------------


class SeriesClass(enum.Enum):
    REGULAR = "A"
    A_K = "A_K"
    POLE_A_L = "eps^-1 A_L"
    OTHER = "other"

    def __str__(self) -> str:
        return self.value


def _top_rows_zero(m: Mat, r: int) -> bool:
    return not any(m.entries[:r * m.n_cols])


def _right_cols_zero(m: Mat, r: int) -> bool:
    c = m.n_cols
    return not any(m.entries[i * c + j] for i in range(m.n_rows) for j in range(r, c))


def in_ak(a: LaurentSeries, r: int) -> bool:
    """Regular with order-0 coefficient vanishing in its first r rows."""
    if a.nu < 0 or a.window < 1:
        return False
    return _top_rows_zero(a.coeff(0), r)


def in_al(a: LaurentSeries, r: int) -> bool:
    """Regular with order-0 coefficient vanishing in its last n - r columns."""
    if a.nu < 0 or a.window < 1:
        return False
    return _right_cols_zero(a.coeff(0), r)


def classify(a: LaurentSeries, p: BlockPartition) -> SeriesClass:
    if a.n != p.n:
        raise SizeMismatch(f"series size {a.n} does not match partition n={p.n}")
    if a.nu >= 0 and a.window >= 1:
        return SeriesClass.A_K if in_ak(a, p.r) else SeriesClass.REGULAR
    if a.nu == -1 and _right_cols_zero(a.coeffs[0], p.r):
        return SeriesClass.POLE_A_L
    return SeriesClass.OTHER
