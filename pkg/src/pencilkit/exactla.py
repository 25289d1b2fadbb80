"""Exact dense linear algebra over the rationals.

Every scalar is a :class:`gmpy2.mpq`, an arbitrary-precision fraction kept in
lowest terms with a positive denominator.  Matrices are immutable, may have
zero rows or zero columns, and subspaces carry a canonical basis in reduced
column echelon form so that two :class:`Subspace` values are equal exactly when
they describe the same subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

Rational = type(mpq())

ZERO = mpq(0)
ONE = mpq(1)

__all__ = [
    "Rational",
    "rational",
    "Matrix",
    "Subspace",
    "SingularMatrixError",
    "rce",
    "rank",
    "image",
    "kernel",
    "preimage",
    "complement",
    "intersection",
    "subspace_sum",
    "inverse",
    "solve",
    "det",
    "char_poly",
    "poly_eval",
]


class SingularMatrixError(ValueError):
    """Raised when inverting a matrix that has no inverse."""

    def __init__(self, msg: str = "singular"):
        super().__init__(msg)


def rational(x) -> mpq:
    """Convert ``x`` to an exact rational.

    Accepts ints, :class:`fractions.Fraction`, ``mpq`` and strings of the form
    ``"p"`` or ``"p/q"``.  Floats and bools are rejected: they either carry a
    binary rounding error or are almost certainly a mistake.
    """
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational literal")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        try:
            if "/" in s:
                p, q = s.split("/")
                num, den = int(p), int(q)
            else:
                num, den = int(s), 1
        except ValueError:
            raise ValueError(f"malformed rational literal {x!r}") from None
        if den == 0:
            raise ValueError(f"zero denominator in {x!r}")
        return mpq(num, den)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


# ---------------------------------------------------------------------------
# Matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Matrix:
    """Dense rational matrix with an explicit shape.

    ``entries`` is a row-major tuple of row tuples.  A matrix with zero rows
    still knows its column count and vice versa.
    """

    rows: int
    cols: int
    entries: tuple[tuple[mpq, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimension")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entries do not match shape {self.rows}x{self.cols}")

    @classmethod
    def _raw(cls, rows: int, cols: int, data) -> Matrix:
        # trusted constructor: data is a list of lists of mpq of the right shape
        obj = object.__new__(cls)
        object.__setattr__(obj, "rows", rows)
        object.__setattr__(obj, "cols", cols)
        object.__setattr__(obj, "entries", tuple(tuple(r) for r in data))
        return obj

    @classmethod
    def from_rows(cls, data: Iterable[Iterable], cols: int | None = None) -> Matrix:
        """Build a matrix from nested rows; ``cols`` is needed when there are none."""
        rows = [tuple(rational(x) for x in r) for r in data]
        if cols is None:
            if not rows:
                raise ValueError("cols must be given for a matrix without rows")
            cols = len(rows[0])
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_columns(cls, columns: Iterable[Iterable], rows: int) -> Matrix:
        cs = [tuple(rational(x) for x in c) for c in columns]
        if any(len(c) != rows for c in cs):
            raise ValueError("column length does not match row count")
        return cls._raw(rows, len(cs), [[c[i] for c in cs] for i in range(rows)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls._raw(rows, cols, [[ZERO] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls._raw(n, n, [[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> mpq:
        i, j = ij
        return self.entries[i][j]

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.entries)
        return f"Matrix({self.rows}x{self.cols}: [{body}])"

    def tolist(self) -> list[list[mpq]]:
        return [list(r) for r in self.entries]

    def column(self, j: int) -> tuple[mpq, ...]:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[mpq, ...]]:
        return [tuple(c) for c in zip(*self.entries)] if self.rows else [()] * self.cols

    @property
    def T(self) -> Matrix:
        return Matrix._raw(self.cols, self.rows, self.columns())

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.columns()
        data = [[sum(map(mpq.__mul__, r, c), ZERO) for c in ocols] for r in self.entries]
        return Matrix._raw(self.rows, other.cols, data)

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        data = [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        return Matrix._raw(self.rows, self.cols, data)

    def __sub__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        data = [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)]
        return Matrix._raw(self.rows, self.cols, data)

    def __neg__(self) -> Matrix:
        return Matrix._raw(self.rows, self.cols, [[-a for a in r] for r in self.entries])

    def scale(self, c) -> Matrix:
        c = rational(c)
        return Matrix._raw(self.rows, self.cols, [[c * a for a in r] for r in self.entries])

    def select_columns(self, idx: Sequence[int]) -> Matrix:
        return Matrix._raw(self.rows, len(idx), [[r[j] for j in idx] for r in self.entries])

    def select_rows(self, idx: Sequence[int]) -> Matrix:
        return Matrix._raw(len(idx), self.cols, [self.entries[i] for i in idx])

    def block(self, r0: int, r1: int, c0: int, c1: int) -> Matrix:
        """Submatrix of rows ``r0:r1`` and columns ``c0:c1``."""
        return Matrix._raw(r1 - r0, c1 - c0, [r[c0:c1] for r in self.entries[r0:r1]])


def hstack(*ms: Matrix, rows: int | None = None) -> Matrix:
    """Concatenate matrices side by side (``rows`` is used when ``ms`` is empty)."""
    if not ms:
        if rows is None:
            raise ValueError("rows must be given to stack nothing")
        return Matrix.zeros(rows, 0)
    n = ms[0].rows
    if any(m.rows != n for m in ms):
        raise ValueError("row counts differ in hstack")
    data = [sum((m.entries[i] for m in ms), ()) for i in range(n)]
    return Matrix._raw(n, sum(m.cols for m in ms), data)


def vstack(*ms: Matrix, cols: int | None = None) -> Matrix:
    if not ms:
        if cols is None:
            raise ValueError("cols must be given to stack nothing")
        return Matrix.zeros(0, cols)
    c = ms[0].cols
    if any(m.cols != c for m in ms):
        raise ValueError("column counts differ in vstack")
    return Matrix._raw(sum(m.rows for m in ms), c, [r for m in ms for r in m.entries])


def block_diag(*ms: Matrix) -> Matrix:
    rows = sum(m.rows for m in ms)
    cols = sum(m.cols for m in ms)
    data = []
    c0 = 0
    for m in ms:
        left, right = [ZERO] * c0, [ZERO] * (cols - c0 - m.cols)
        data.extend(left + list(r) + right for r in m.entries)
        c0 += m.cols
    return Matrix._raw(rows, cols, data)


# ---------------------------------------------------------------------------
# elimination kernels (work on lists of lists of mpq)
# ---------------------------------------------------------------------------


def _rref(rows: list[list[mpq]], ncols: int, track: bool = False):
    """Gauss-Jordan row reduction of a copy of ``rows``.

    Returns ``(R, pivots, U)`` with ``U @ rows == R`` when ``track`` is set
    (``U`` is ``None`` otherwise).  ``pivots[i]`` is the column of the leading
    one of row ``i`` of ``R``.
    """
    R = [list(r) for r in rows]
    n = len(R)
    U = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)] if track else None
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == n:
            break
        p = r
        while p < n and R[p][c] == 0:
            p += 1
        if p == n:
            continue
        if p != r:
            R[r], R[p] = R[p], R[r]
            if track:
                U[r], U[p] = U[p], U[r]
        piv = R[r][c]
        if piv != 1:
            inv = ONE / piv
            R[r] = [x * inv for x in R[r]]
            if track:
                U[r] = [x * inv for x in U[r]]
        Rr = R[r]
        Ur = U[r] if track else None
        for i in range(n):
            if i != r:
                f = R[i][c]
                if f != 0:
                    R[i] = [a - f * b for a, b in zip(R[i], Rr)]
                    if track:
                        U[i] = [a - f * b for a, b in zip(U[i], Ur)]
        pivots.append(c)
        r += 1
    return R, pivots, U


def _nullspace_columns(rows: list[list[mpq]], ncols: int) -> list[list[mpq]]:
    """Basis vectors of ``{x : rows @ x = 0}``, one per free variable."""
    R, pivots, _ = _rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        x = [ZERO] * ncols
        x[f] = ONE
        for i, p in enumerate(pivots):
            x[p] = -R[i][f]
        basis.append(x)
    return basis


class _Reducer:
    """Incremental independence test for vectors of a fixed length."""

    def __init__(self):
        self._vecs: list[tuple[int, list[mpq]]] = []

    def reduce(self, v) -> list[mpq]:
        v = list(v)
        for p, r in self._vecs:
            f = v[p]
            if f != 0:
                v = [a - f * b for a, b in zip(v, r)]
        return v

    def add(self, v) -> bool:
        """Insert ``v``; return False (and insert nothing) if it is dependent."""
        w = self.reduce(v)
        for p, x in enumerate(w):
            if x != 0:
                inv = ONE / x
                self._vecs.append((p, [a * inv for a in w]))
                return True
        return False


# ---------------------------------------------------------------------------
# Subspace
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``F^ambient_dim`` given by its reduced column echelon basis."""

    ambient_dim: int
    basis: Matrix
    pivots: tuple[int, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        b = self.basis
        if b.rows != self.ambient_dim:
            raise ValueError("basis rows differ from ambient dimension")
        piv = []
        for j, col in enumerate(b.columns()):
            lead = next((i for i, x in enumerate(col) if x != 0), None)
            if lead is None or col[lead] != 1 or (piv and lead <= piv[-1]):
                raise ValueError("basis is not in reduced column echelon form")
            piv.append(lead)
        for j, p in enumerate(piv):
            if any(b.entries[p][k] != 0 for k in range(b.cols) if k != j):
                raise ValueError("basis is not in reduced column echelon form")
        object.__setattr__(self, "pivots", tuple(piv))

    @classmethod
    def _from_rref_rows(cls, ambient: int, rref_rows: list[list[mpq]], pivots: list[int]) -> Subspace:
        obj = object.__new__(cls)
        d = len(pivots)
        data = [[rref_rows[j][i] for j in range(d)] for i in range(ambient)]
        object.__setattr__(obj, "ambient_dim", ambient)
        object.__setattr__(obj, "basis", Matrix._raw(ambient, d, data))
        object.__setattr__(obj, "pivots", tuple(pivots))
        return obj

    @classmethod
    def span(cls, M: Matrix) -> Subspace:
        """Canonical subspace spanned by the columns of ``M``."""
        R, pivots, _ = _rref(M.columns(), M.rows)
        return cls._from_rref_rows(M.rows, R, pivots)

    @classmethod
    def _span_vectors(cls, ambient: int, vecs: list[list[mpq]]) -> Subspace:
        R, pivots, _ = _rref(vecs, ambient)
        return cls._from_rref_rows(ambient, R, pivots)

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls._from_rref_rows(n, Matrix.identity(n).tolist(), list(range(n)))

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls._from_rref_rows(n, [], [])

    @property
    def dim(self) -> int:
        return self.basis.cols

    def coordinates(self, M: Matrix, check: bool = True) -> Matrix:
        """Coordinates of the columns of ``M`` in this subspace's basis.

        Because the basis is in reduced column echelon form the coordinates are
        simply the entries of ``M`` at the pivot rows.
        """
        if M.rows != self.ambient_dim:
            raise ValueError("vector length differs from ambient dimension")
        X = M.select_rows(self.pivots)
        if check and self.basis @ X != M:
            raise ValueError("vectors do not lie in the subspace")
        return X

    def contains(self, M: Matrix) -> bool:
        """True if every column of ``M`` lies in the subspace."""
        if M.rows != self.ambient_dim:
            raise ValueError("vector length differs from ambient dimension")
        return self.basis @ M.select_rows(self.pivots) == M

    def __le__(self, other: Subspace) -> bool:
        return other.contains(self.basis)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def rce(M: Matrix) -> tuple[Matrix, Matrix]:
    """Reduced column echelon form ``R = M @ T`` with ``T`` invertible.

    The nonzero columns of ``R`` come first.
    """
    R, _, U = _rref(M.columns(), M.rows, track=True)
    Rm = Matrix._raw(M.cols, M.rows, R).T
    T = Matrix._raw(M.cols, M.cols, U).T
    return Rm, T


def rank(M: Matrix) -> int:
    return len(_rref(M.tolist(), M.cols)[1])


def image(M: Matrix) -> Subspace:
    return Subspace.span(M)


def kernel(M: Matrix) -> Subspace:
    return Subspace._span_vectors(M.cols, _nullspace_columns(M.tolist(), M.cols))


def _annihilator(W: Subspace) -> list[list[mpq]]:
    # rows y with y @ W.basis == 0, spanning the full annihilator
    return _nullspace_columns(W.basis.columns(), W.ambient_dim)


def preimage(M: Matrix, W: Subspace) -> Subspace:
    """``{x : M x in W}``."""
    if W.ambient_dim != M.rows:
        raise ValueError("subspace lives in the wrong space for this map")
    Y = _annihilator(W)
    if not Y:
        return Subspace.full(M.cols)
    Mcols = M.columns()
    YM = [[sum(map(mpq.__mul__, y, c), ZERO) for c in Mcols] for y in Y]
    return Subspace._span_vectors(M.cols, _nullspace_columns(YM, M.cols))


def intersection(S: Subspace, T: Subspace) -> Subspace:
    if S.ambient_dim != T.ambient_dim:
        raise ValueError("subspaces of different spaces")
    return Subspace.span(S.basis @ preimage(S.basis, T).basis)


def subspace_sum(*spaces: Subspace) -> Subspace:
    if not spaces:
        raise ValueError("need at least one subspace")
    return Subspace.span(hstack(*(s.basis for s in spaces)))


def complement(S: Subspace, T: Subspace) -> Matrix:
    """Basis ``X`` with ``T = S (+) span X``.

    Basis columns of ``T`` are scanned in order and kept greedily whenever they
    are independent of what has been collected so far, starting from ``S``.
    """
    if S.ambient_dim != T.ambient_dim or not T.contains(S.basis):
        raise ValueError("S is not contained in T")
    red = _Reducer()
    for c in S.basis.columns():
        red.add(c)
    kept = [c for c in T.basis.columns() if red.add(c)]
    return Matrix.from_columns(kept, T.ambient_dim)


def inverse(M: Matrix) -> Matrix:
    n = M.rows
    if n != M.cols:
        raise ValueError("inverse of a non-square matrix")
    R, pivots, U = _rref(M.tolist(), n, track=True)
    if len(pivots) < n:
        raise SingularMatrixError()
    return Matrix._raw(n, n, U)


def solve(M: Matrix, B: Matrix) -> Matrix:
    """A particular solution ``X`` of ``M X = B`` (free variables set to zero).

    Raises ``ValueError`` if some column of ``B`` is not in the image of ``M``.
    """
    if B.rows != M.rows:
        raise ValueError("right-hand side has the wrong number of rows")
    n = M.cols
    aug = [list(a) + list(b) for a, b in zip(M.entries, B.entries)]
    R, pivots, _ = _rref(aug, n + B.cols)
    if pivots and pivots[-1] >= n:
        raise ValueError("system has no solution")
    X = [[ZERO] * B.cols for _ in range(n)]
    for i, p in enumerate(pivots):
        X[p] = R[i][n:]
    return Matrix._raw(n, B.cols, X)


def det(M: Matrix) -> mpq:
    """Determinant by Bareiss fraction-free elimination."""
    n = M.rows
    if n != M.cols:
        raise ValueError("determinant of a non-square matrix")
    a = M.tolist()
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return ZERO
            a[k], a[p] = a[p], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            ai = a[i]
            ak = a[k]
            for j in range(k + 1, n):
                ai[j] = (ai[j] * akk - aik * ak[j]) / prev
        prev = akk
    return sign * a[n - 1][n - 1] if n else ONE


def char_poly(M: Matrix) -> list[mpq]:
    """Coefficients of ``det(xI - M)``, constant term first; monic.

    Faddeev-LeVerrier recursion, exact over the rationals.
    """
    n = M.rows
    if n != M.cols:
        raise ValueError("characteristic polynomial of a non-square matrix")
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    Mk = Matrix.zeros(n, n)
    I = Matrix.identity(n)
    for k in range(1, n + 1):
        Mk = M @ Mk + I.scale(coeffs[n - k + 1])
        AM = M @ Mk
        tr = sum((AM.entries[i][i] for i in range(n)), ZERO)
        coeffs[n - k] = -tr / k
    return coeffs


def poly_eval(coeffs: Sequence, t) -> mpq:
    """Horner evaluation of an ascending coefficient list."""
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc
