"""Dense exact matrices over Gaussian rationals, block partitions and Schur complements.

Matrices are immutable.  Entries are stored row-major in a tuple of
:class:`~pclab.scalar.Scalar`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from pclab.errors import (
    BadPartition,
    DimensionMismatch,
    NonSquare,
    RankMismatch,
    Singular,
    SingularBlock,
)
from pclab.scalar import ONE, ZERO, Scalar


class Mat:
    __slots__ = ("n_rows", "n_cols", "entries")

    def __init__(self, n_rows: int, n_cols: int, entries: Iterable):
        if n_rows < 1 or n_cols < 1:
            raise DimensionMismatch(f"matrix dimensions must be positive, got {n_rows}x{n_cols}")
        entries = tuple(Scalar.coerce(e) for e in entries)
        if len(entries) != n_rows * n_cols:
            raise DimensionMismatch(
                f"{n_rows}x{n_cols} matrix needs {n_rows * n_cols} entries, got {len(entries)}")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.entries = entries

    @classmethod
    def _raw(cls, n_rows: int, n_cols: int, entries: tuple) -> "Mat":
        m = object.__new__(cls)
        m.n_rows = n_rows
        m.n_cols = n_cols
        m.entries = entries
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Mat":
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise DimensionMismatch("ragged or empty row list")
        return cls(len(rows), len(rows[0]), [x for r in rows for x in r])

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls._raw(n, n, tuple(ONE if i == j else ZERO for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int | None = None) -> "Mat":
        n_cols = n_rows if n_cols is None else n_cols
        return cls._raw(n_rows, n_cols, (ZERO,) * (n_rows * n_cols))

    @classmethod
    def scalar(cls, x) -> "Mat":
        return cls._raw(1, 1, (Scalar.coerce(x),))

    # -- access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self.entries[i * self.n_cols + j]

    def rows(self) -> list[list[Scalar]]:
        c = self.n_cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.n_rows)]

    def row(self, i: int) -> tuple:
        c = self.n_cols
        return self.entries[i * c:(i + 1) * c]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.n_cols]

    @property
    def T(self) -> "Mat":
        r, c = self.n_rows, self.n_cols
        return Mat._raw(c, r, tuple(self.entries[i * c + j] for j in range(c) for i in range(r)))

    def submatrix(self, rows: range | Sequence[int], cols: range | Sequence[int]) -> "Mat":
        c = self.n_cols
        e = self.entries
        return Mat._raw(len(rows), len(cols), tuple(e[i * c + j] for i in rows for j in cols))

    def is_zero(self) -> bool:
        return not any(self.entries)

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.n_rows, self.n_cols, self.entries))

    # -- arithmetic ---------------------------------------------------------

    def _check_same(self, other: "Mat", op: str) -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot {op} {self.shape} and {other.shape}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same(other, "add")
        return Mat._raw(self.n_rows, self.n_cols,
                        tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same(other, "subtract")
        return Mat._raw(self.n_rows, self.n_cols,
                        tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "Mat":
        return Mat._raw(self.n_rows, self.n_cols, tuple(-a for a in self.entries))

    def scale(self, s) -> "Mat":
        s = Scalar.coerce(s)
        return Mat._raw(self.n_rows, self.n_cols, tuple(s * a for a in self.entries))

    def __mul__(self, s) -> "Mat":
        if isinstance(s, Mat):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.n_cols != other.n_rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        n, k, p = self.n_rows, self.n_cols, other.n_cols
        a, b = self.entries, other.entries
        out = []
        for i in range(n):
            arow = a[i * k:(i + 1) * k]
            for j in range(p):
                acc = ZERO
                for t in range(k):
                    x = arow[t]
                    if x:
                        y = b[t * p + j]
                        if y:
                            acc = acc + x * y
                out.append(acc)
        return Mat._raw(n, p, tuple(out))

    # -- display ------------------------------------------------------------

    def __repr__(self) -> str:
        return "Mat(" + repr([[str(x) for x in r] for r in self.rows()]) + ")"

    __str__ = __repr__


def mat_arith(a: Mat, b, kind: str) -> Mat:
    """Dispatch ``add``, ``sub``, ``mul`` or ``scale`` (``b`` a Scalar for the last)."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a @ b
    if kind == "scale":
        return a.scale(b)
    raise ValueError(f"unknown kind {kind!r}")


def hstack(*mats: Mat) -> Mat:
    n = mats[0].n_rows
    if any(m.n_rows != n for m in mats):
        raise DimensionMismatch("hstack needs equal row counts")
    rows = [sum((list(m.row(i)) for m in mats), []) for i in range(n)]
    return Mat.from_rows(rows)


def vstack(*mats: Mat) -> Mat:
    c = mats[0].n_cols
    if any(m.n_cols != c for m in mats):
        raise DimensionMismatch("vstack needs equal column counts")
    return Mat._raw(sum(m.n_rows for m in mats), c, sum((m.entries for m in mats), ()))


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------


def det(a: Mat) -> Scalar:
    """Determinant by Bareiss fraction-free elimination.

    Every intermediate entry is a minor of ``a``, so the size of the numbers
    stays bounded by Hadamard-type estimates instead of compounding.
    """
    if not a.is_square():
        raise NonSquare(f"det of non-square {a.shape} matrix")
    n = a.n_rows
    m = a.rows()
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not m[k][k]:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return ZERO
        pk = m[k][k]
        rowk = m[k]
        for i in range(k + 1, n):
            rowi = m[i]
            f = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (pk * rowi[j] - f * rowk[j]) / prev
            rowi[k] = ZERO
        prev = pk
    d = m[n - 1][n - 1]
    return -d if sign < 0 else d


def _rref(rows: list[list[Scalar]]) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form; first nonzero pivot, lowest row index first."""
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Mat) -> int:
    return len(_rref(a.rows())[1])


def inverse(a: Mat) -> Mat:
    """Exact inverse by Gauss-Jordan elimination."""
    if not a.is_square():
        raise NonSquare(f"inverse of non-square {a.shape} matrix")
    n = a.n_rows
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(a.rows())]
    red, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise Singular("matrix is singular")
    return Mat.from_rows([r[n:] for r in red])


def left_nullspace(a: Mat) -> list[Mat]:
    """Basis of ``{v : v a = 0}`` as 1 x n row matrices, in reduced echelon form."""
    if not a.is_square():
        raise NonSquare(f"left nullspace of non-square {a.shape} matrix")
    n = a.n_rows
    red, pivots = _rref(a.T.rows())
    basis = []
    for free in (j for j in range(n) if j not in pivots):
        v = [ZERO] * n
        v[free] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][free]
        basis.append(Mat._raw(1, n, tuple(v)))
    return basis


# ---------------------------------------------------------------------------
# blocks and Schur complements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockPartition:
    """Split of an n x n matrix with an r x r top-left block."""

    n: int
    r: int

    def __post_init__(self):
        if self.n < 1 or not 1 <= self.r <= self.n:
            raise BadPartition(f"need 1 <= r <= n, got n={self.n}, r={self.r}")

    @property
    def maximal(self) -> bool:
        return self.r == self.n


def _split_check(a: Mat, p: BlockPartition) -> None:
    if not a.is_square() or a.n_rows != p.n:
        raise BadPartition(f"{a.shape} matrix does not match partition n={p.n}")
    if p.r >= p.n:
        raise BadPartition("a block split needs r < n")


def blocks(a: Mat, p: BlockPartition) -> tuple[Mat, Mat, Mat, Mat]:
    _split_check(a, p)
    r, n = p.r, p.n
    top, bot = range(r), range(r, n)
    return (a.submatrix(top, top), a.submatrix(top, bot),
            a.submatrix(bot, top), a.submatrix(bot, bot))


def reassemble(A: Mat, B: Mat, C: Mat, D: Mat) -> Mat:
    return vstack(hstack(A, B), hstack(C, D))


def schur_D(a: Mat, p: BlockPartition) -> Mat:
    """``A - B D^-1 C``."""
    A, B, C, D = blocks(a, p)
    try:
        Dinv = inverse(D)
    except Singular as exc:
        raise SingularBlock("D block is singular") from exc
    return A - B @ Dinv @ C


def schur_A(a: Mat, p: BlockPartition) -> Mat:
    """``D - C A^-1 B``."""
    A, B, C, D = blocks(a, p)
    try:
        Ainv = inverse(A)
    except Singular as exc:
        raise SingularBlock("A block is singular") from exc
    return D - C @ Ainv @ B


def _inv_block(m: Mat, name: str) -> Mat:
    try:
        return inverse(m)
    except Singular as exc:
        raise SingularBlock(f"{name} is singular") from exc


def block_inverse(a: Mat, p: BlockPartition, branch: str = "auto") -> Mat:
    """Inverse assembled from Schur complements.

    ``branch`` is ``"D"`` (needs det D, det S_D != 0), ``"A"`` (det A,
    det S_A != 0), ``"both"`` (all four), or ``"auto"`` which tries D then A.
    """
    if branch == "auto":
        for b in ("D", "A"):
            try:
                return block_inverse(a, p, b)
            except SingularBlock:
                continue
        raise Singular("no Schur branch applies; matrix may be singular")
    A, B, C, D = blocks(a, p)
    I_lo = Mat.identity(p.n - p.r)
    if branch == "D":
        Dinv = _inv_block(D, "D")
        Sinv = _inv_block(A - B @ Dinv @ C, "S_D")
        top_right = -(Sinv @ B @ Dinv)
        bottom_left = -(Dinv @ C @ Sinv)
        bottom_right = Dinv @ (I_lo + C @ Sinv @ B @ Dinv)
        return reassemble(Sinv, top_right, bottom_left, bottom_right)
    if branch == "A":
        Ainv = _inv_block(A, "A")
        Tinv = _inv_block(D - C @ Ainv @ B, "S_A")
        top_left = Ainv + Ainv @ B @ Tinv @ C @ Ainv
        return reassemble(top_left, -(Ainv @ B @ Tinv), -(Tinv @ C @ Ainv), Tinv)
    if branch == "both":
        Dinv = _inv_block(D, "D")
        Ainv = _inv_block(A, "A")
        Sinv = _inv_block(A - B @ Dinv @ C, "S_D")
        Tinv = _inv_block(D - C @ Ainv @ B, "S_A")
        return reassemble(Sinv, -(Sinv @ B @ Dinv), -(Dinv @ C @ Sinv), Tinv)
    raise ValueError(f"unknown branch {branch!r}")


def similarity_normalize(b0: Mat, r: int) -> Mat:
    """Invertible M such that the first r rows of ``M b0 M^-1`` vanish.

    The first r rows of M are a left-nullspace basis of ``b0``; the rest are
    standard unit vectors, lowest index first, added while they raise the rank.
    """
    n = b0.n_rows
    if not b0.is_square():
        raise NonSquare("similarity_normalize needs a square matrix")
    if not 1 <= r <= n:
        raise BadPartition(f"need 1 <= r <= n, got r={r}, n={n}")
    rk = rank(b0)
    if rk != n - r:
        raise RankMismatch(f"rank(b0) = {rk}, expected n - r = {n - r}")
    rows = [list(v.entries) for v in left_nullspace(b0)]
    for j in range(n):
        if len(rows) == n:
            break
        e = [ONE if k == j else ZERO for k in range(n)]
        if len(_rref(rows + [e])[1]) > len(rows):
            rows.append(e)
    return Mat.from_rows(rows)
