"""Pencil generators and an independent sympy reduction oracle shared by the tests."""

from __future__ import annotations

import random
from fractions import Fraction

import sympy

from pencilkit.canonical import KroneckerStructure, Transform
from pencilkit.exactla import Matrix
from pencilkit.pencil import Pencil

# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def rand_matrix(rng: random.Random, rows: int, cols: int, lo: int = -3, hi: int = 3) -> Matrix:
    return Matrix.from_rows([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)], cols)


def unimodular(rng: random.Random, n: int, ops: int | None = None) -> Matrix:
    """Random integer matrix with determinant +-1 built from row additions and swaps."""
    M = Matrix.identity(n).tolist()
    for _ in range(3 * n if ops is None else ops):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        if rng.random() < 0.8:
            c = rng.choice([-2, -1, 1, 2])
            M[i] = [a + c * b for a, b in zip(M[i], M[j])]
        else:
            M[i], M[j] = M[j], M[i]
    return Matrix.from_rows(M, n)


def sparse_rank_matrix(rng: random.Random, rows: int, cols: int) -> Matrix:
    """Entries in {-3..3} with zeroed rows/columns and copied columns, so rank drops often."""
    M = rand_matrix(rng, rows, cols).tolist()
    for i in range(rows):
        if rng.random() < 0.3:
            M[i] = [0] * cols
    for j in range(cols):
        r = rng.random()
        if r < 0.25:
            for i in range(rows):
                M[i][j] = 0
        elif r < 0.4 and j > 0:
            src = rng.randrange(j)
            for i in range(rows):
                M[i][j] = M[i][src]
    return Matrix.from_rows(M, cols)


def random_pencil(rng: random.Random, max_dim: int = 8, square: bool = False) -> Pencil:
    """Pencil with entries in {-3..3}; ``E`` is degenerate most of the time."""
    rows = rng.randint(0, max_dim)
    cols = rows if square else rng.randint(0, max_dim)
    kind = rng.random()
    if kind < 0.2:
        E = rand_matrix(rng, rows, cols)
    else:
        E = sparse_rank_matrix(rng, rows, cols)
    A = rand_matrix(rng, rows, cols) if rng.random() < 0.5 else sparse_rank_matrix(rng, rows, cols)
    return Pencil(E, A)


def planted_singular(rng: random.Random, n: int) -> Pencil:
    """Square pencil with a common kernel vector of ``E`` and ``A``, hence singular."""
    E0 = sparse_rank_matrix(rng, n, n).tolist() if rng.random() < 0.5 else rand_matrix(rng, n, n).tolist()
    A0 = rand_matrix(rng, n, n).tolist()
    for r in E0 + A0:
        r[0] = 0
    Q = unimodular(rng, n)
    return Pencil(Matrix.from_rows(E0, n) @ Q, Matrix.from_rows(A0, n) @ Q)


def regularity_corpus(seed: int = 4, count: int = 500) -> list[Pencil]:
    """Square pencils up to 7x7: dense, degenerate ``E`` and planted singular cases."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(1, 7)
        r = i % 3
        if r == 0:
            out.append(Pencil(rand_matrix(rng, n, n), rand_matrix(rng, n, n)))
        elif r == 1:
            out.append(random_pencil(rng, 7, square=True) if n else Pencil(Matrix.zeros(0, 0), Matrix.zeros(0, 0)))
        else:
            out.append(planted_singular(rng, n))
    return out


def random_weak_element(rng: random.Random, rows: int, cols: int) -> Transform:
    return Transform(unimodular(rng, rows), unimodular(rng, cols), rand_matrix(rng, cols, cols, -2, 2))


# ---------------------------------------------------------------------------
# structure enumeration
# ---------------------------------------------------------------------------


def _parts(budget: int) -> list[tuple[str, int, int]]:
    # (kind, size, dim M + dim V)
    out = []
    for k in range(1, budget // 2 + 1):
        out.append(("N", k, 2 * k))
    for k in range(1, (budget + 1) // 2 + 1):
        out.append(("L", k, 2 * k - 1))
        out.append(("LT", k, 2 * k - 1))
    return [p for p in out if p[2] <= budget]


def enumerate_structures(budget: int) -> list[tuple[dict, dict, dict, int]]:
    """Every block multiset with ``dim M + dim V <= budget`` as ``(N, L, LT, core_dim)``."""
    parts = _parts(budget)
    found = []

    def rec(start: int, left: int, chosen: list):
        for delta in range(left // 2 + 1):
            counts = {"N": {}, "L": {}, "LT": {}}
            for kind, k, _ in chosen:
                counts[kind][k] = counts[kind].get(k, 0) + 1
            found.append((counts["N"], counts["L"], counts["LT"], delta))
        for i in range(start, len(parts)):
            kind, k, w = parts[i]
            if w <= left:
                rec(i, left - w, chosen + [parts[i]])

    rec(0, budget, [])
    return found


def structure_with_core(rng: random.Random, shape: tuple[dict, dict, dict, int]) -> KroneckerStructure:
    nil, lb, ltb, delta = shape
    core = Matrix.from_rows(
        [[Fraction(rng.randint(-5, 5), rng.randint(1, 5)) for _ in range(delta)] for _ in range(delta)],
        delta,
    ) if delta else Matrix.zeros(0, 0)
    return KroneckerStructure(nil, lb, ltb, delta, core)


# ---------------------------------------------------------------------------
# sympy oracle: the reduction recomputed from the definitions
# ---------------------------------------------------------------------------


def to_sympy(M: Matrix) -> sympy.Matrix:
    return sympy.Matrix(M.rows, M.cols, [sympy.Rational(int(x.numerator), int(x.denominator)) for r in M.entries for x in r])


def _basis(cols: list, n: int) -> sympy.Matrix:
    if not cols:
        return sympy.zeros(n, 0)
    return sympy.Matrix.hstack(*cols)


def _colspace(M: sympy.Matrix) -> sympy.Matrix:
    return _basis(M.columnspace(), M.rows)


def _preimage_within(A: sympy.Matrix, Bm: sympy.Matrix, Bw: sympy.Matrix) -> sympy.Matrix:
    """Basis of ``{x in span Bm : A x in span Bw}``."""
    n = Bm.rows
    if Bm.cols == 0:
        return sympy.zeros(n, 0)
    big = sympy.Matrix.hstack(A * Bm, -Bw) if Bw.cols else A * Bm
    if big.rows == 0:
        return Bm
    ns = big.nullspace()
    vecs = [Bm * v[: Bm.cols, :] for v in ns]
    return _colspace(_basis(vecs, n)) if vecs else sympy.zeros(n, 0)


def oracle_chain(E: sympy.Matrix, A: sympy.Matrix):
    """Dimensions of ``M^(k)``, ``V^(k)`` until the codomain stalls, and the final bases."""
    Bm = sympy.eye(E.cols)
    Bv = sympy.eye(E.rows)
    mdims, vdims = [E.cols], [E.rows]
    while True:
        Vn = _colspace(E * Bm) if Bm.cols else sympy.zeros(E.rows, 0)
        Mn = _preimage_within(A, Bm, Vn)
        if Vn.cols == Bv.cols:
            return mdims, vdims, Bm, Bv
        Bm, Bv = Mn, Vn
        mdims.append(Bm.cols)
        vdims.append(Bv.cols)


def _coords(B: sympy.Matrix, X: sympy.Matrix) -> sympy.Matrix:
    if B.cols == 0:
        return sympy.zeros(0, X.cols)
    sol, params = B.gauss_jordan_solve(X)
    assert not params
    return sol


def oracle_defects(E: sympy.Matrix, A: sympy.Matrix):
    """``(alpha, beta_plus, index, (E_inf, A_inf))`` from the chain dimensions."""
    mdims, vdims, Bm, Bv = oracle_chain(E, A)
    n = len(vdims) - 1

    def vd(j):
        return vdims[min(j, n)]

    def md(j):
        return mdims[min(j, n)]

    alpha, beta = [], []
    for k in range(1, n + 1):
        dM = md(k - 1) - md(k)
        alpha.append(dM - (vd(k) - vd(k + 1)))
        beta.append((vd(k - 1) - vd(k)) - dM)
    Ef = _coords(Bv, E * Bm)
    Af = _coords(Bv, A * Bm)
    return alpha, beta, n, (Ef, Af)


def oracle_profile(P: Pencil) -> dict:
    E, A = to_sympy(P.E), to_sympy(P.A)
    alpha, beta_plus, index, (Ef, Af) = oracle_defects(E, A)
    dalpha, beta_minus, _, (Ec, _) = oracle_defects(Ef.T, Af.T)
    assert not any(dalpha)
    return {
        "alpha": alpha,
        "beta_plus": beta_plus,
        "beta_minus": beta_minus,
        "delta": Ec.cols,
        "index": index,
    }


def strip(xs) -> list:
    xs = list(xs)
    while xs and xs[-1] == 0:
        xs.pop()
    return xs
