"""Explicit bases realizing the Kronecker and weak-equivalence canonical forms.

The primal decomposition walks the reduction chain backwards.  At every level
it splits the domain as ``M^(k-1) = M^(k) + C + K`` and the codomain as
``V^(k-1) = V^(k) + D + Z`` so that ``E`` sends the ``C`` basis onto the
complement already chosen one level deeper, ``K`` lies in ``ker E`` and ``D``
is the image of ``C + K`` under ``A``.  Reading the chosen vectors as chains
gives the nilpotent ``N_k`` and ``L_k`` blocks.  The totally reduced part is
then decomposed the same way after transposition, producing ``L_k^T`` blocks
and an invertible core.

All free choices (complements, preimages) are made by the deterministic
policies of :mod:`pencilkit.exactla`, so every function here is reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

from .exactla import (
    Matrix,
    Subspace,
    block_diag,
    complement,
    hstack,
    image,
    intersection,
    inverse,
    kernel,
    preimage,
    rank,
    solve,
    subspace_sum,
)
from .pencil import DefectProfile, Pencil, ReductionChain, dual, reduce_fully

__all__ = [
    "NotRegularError",
    "KroneckerStructure",
    "Transform",
    "Level",
    "Sequence",
    "Decomposition",
    "DualDecomposition",
    "WeakCanonical",
    "coupling_step",
    "coupling_full",
    "primal_decomposition",
    "dual_decomposition",
    "structure_from_profile",
    "synthesize",
    "block_pencil",
    "scramble",
    "kronecker_decompose",
    "weierstrass",
    "weak_canonical",
    "weak_act",
    "weak_compose",
    "weak_inverse",
    "weak_identity",
]


class NotRegularError(ValueError):
    def __init__(self, msg: str = "not a regular pencil"):
        super().__init__(msg)


def _clean_counts(counts: Mapping) -> dict[int, int]:
    out = {}
    for k, c in counts.items():
        k, c = int(k), int(c)
        if k < 1:
            raise ValueError(f"block size must be >= 1, got {k}")
        if c < 1:
            raise ValueError(f"block count must be >= 1, got {c} for size {k}")
        out[k] = c
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class KroneckerStructure:
    """Multiset of Kronecker blocks plus the regular core.

    ``nilpotent[k]``, ``l_blocks[k]`` and ``lt_blocks[k]`` count the ``N_k``,
    ``L_k`` and ``L_k^T`` blocks.  ``core`` is the ``core_dim`` square matrix
    ``C`` of the core block ``(I, C)``; it may be left out for a structure-only
    description.
    """

    nilpotent: Mapping[int, int] = field(default_factory=dict)
    l_blocks: Mapping[int, int] = field(default_factory=dict)
    lt_blocks: Mapping[int, int] = field(default_factory=dict)
    core_dim: int = 0
    core: Matrix | None = None

    def __post_init__(self):
        for name in ("nilpotent", "l_blocks", "lt_blocks"):
            object.__setattr__(self, name, _clean_counts(getattr(self, name)))
        if self.core_dim < 0:
            raise ValueError("negative core dimension")
        if self.core is not None and self.core.shape != (self.core_dim, self.core_dim):
            raise ValueError(
                f"core is {self.core.shape}, expected {self.core_dim}x{self.core_dim}"
            )

    __hash__ = None

    @property
    def dim_domain(self) -> int:
        return (
            self.core_dim
            + sum(k * c for k, c in self.nilpotent.items())
            + sum((k - 1) * c for k, c in self.l_blocks.items())
            + sum(k * c for k, c in self.lt_blocks.items())
        )

    @property
    def dim_codomain(self) -> int:
        return (
            self.core_dim
            + sum(k * c for k, c in self.nilpotent.items())
            + sum(k * c for k, c in self.l_blocks.items())
            + sum((k - 1) * c for k, c in self.lt_blocks.items())
        )

    def blocks_equal(self, other: KroneckerStructure) -> bool:
        """Same block counts and core size (the core matrix is ignored)."""
        return (
            self.nilpotent == other.nilpotent
            and self.l_blocks == other.l_blocks
            and self.lt_blocks == other.lt_blocks
            and self.core_dim == other.core_dim
        )


@dataclass(frozen=True)
class Transform:
    """Change of bases ``P`` (codomain) and ``Q`` (domain), and ``R`` for weak equivalence."""

    P: Matrix
    Q: Matrix
    R: Matrix | None = None

    def apply(self, pen: Pencil) -> Pencil:
        """``(P E Q, P A Q)``, or the weak action when ``R`` is present."""
        if self.R is None:
            return Pencil(self.P @ pen.E @ self.Q, self.P @ pen.A @ self.Q)
        return weak_act(self, pen)


@dataclass(frozen=True)
class Level:
    """Complements chosen at one level ``k`` of the reduction chain.

    In a primal :class:`Decomposition` ``N, C, K`` are domain bases and
    ``W, D, Z`` codomain bases.  In a :class:`DualDecomposition` the roles flip:
    ``N, C, K`` live in the codomain and ``W, D, Z`` in the domain.
    """

    k: int
    N: Matrix
    C: Matrix
    K: Matrix
    W: Matrix
    D: Matrix
    Z: Matrix


@dataclass(frozen=True)
class Sequence:
    """Basis vectors of one Kronecker block, in block order.

    ``kind`` is ``"N"``, ``"L"`` or ``"LT"``; ``m`` holds the domain vectors and
    ``v`` the codomain vectors as columns.
    """

    kind: str
    m: Matrix
    v: Matrix

    @property
    def size(self) -> int:
        return max(self.m.cols, self.v.cols)


@dataclass(frozen=True)
class Decomposition:
    chain: ReductionChain
    levels: tuple[Level, ...]
    M_inf: Matrix
    V_inf: Matrix
    sequences: tuple[Sequence, ...]

    def level(self, k: int) -> Level:
        return self.levels[k - 1]


@dataclass(frozen=True)
class DualDecomposition:
    """Decomposition of a pencil with onto ``E`` obtained through its transpose.

    ``domain_basis`` and ``codomain_basis`` are full bases (columns) in which the
    pencil is block diagonal: the core first, then one ``L_k^T`` block per entry
    of ``blocks``.  ``levels`` are the transposed-side level complements carried
    back to this pencil's spaces by dual bases.
    """

    dual: Decomposition
    levels: tuple[Level, ...]
    core_domain: Matrix
    core_codomain: Matrix
    blocks: tuple[Sequence, ...]
    domain_basis: Matrix
    codomain_basis: Matrix


class WeakCanonical(NamedTuple):
    transform: Transform
    E: Matrix
    A: Matrix
    d: int
    a: int
    s: int


# ---------------------------------------------------------------------------
# coupling
# ---------------------------------------------------------------------------


def coupling_step(E: Matrix, Mprime: Subspace, Wpp_basis: Matrix) -> tuple[Matrix, Matrix]:
    """Split ``M = M' + C' + K'`` with ``E C' = W''`` columnwise and ``E K' = 0``.

    ``Wpp_basis`` must be a basis of a complement of ``E M'`` inside ``E M``.
    """
    img = image(E)
    EM = E @ Mprime.basis
    w = Wpp_basis.cols
    if rank(Wpp_basis) != w or rank(EM) + w != img.dim:
        raise ValueError("W'' basis is not a complement of E M' in E M")
    if Subspace.span(hstack(EM, Wpp_basis)) != img:
        raise ValueError("W'' basis is not a complement of E M' in E M")
    # any preimage of a W'' vector avoids M' + ker E, since W'' meets E M' trivially
    Cp = solve(E, Wpp_basis)
    kerE = kernel(E)
    Kp = complement(intersection(kerE, Mprime), kerE)
    return Cp, Kp


def coupling_full(P: Pencil, Mprime: Subspace, Vprime: Subspace, Wpp_basis: Matrix) -> Level:
    """One level of complements ``N' = C' + K'`` and ``W' = D' + Z'``.

    ``D' = A N'`` with the image of the ``N'`` basis as its basis, and ``Z'`` is
    the greedy complement of ``V' + D'`` in ``V``.
    """
    if Vprime != image(P.E):
        raise ValueError("V' must be the image of E")
    Cp, Kp = coupling_step(P.E, Mprime, Wpp_basis)
    Np = hstack(Cp, Kp)
    Dp = P.A @ Np
    if rank(Dp) != Np.cols:
        raise AssertionError("A is not injective on N'")
    Zp = complement(subspace_sum(Vprime, Subspace.span(Dp)), Subspace.full(P.rows))
    return Level(1, Np, Cp, Kp, hstack(Dp, Zp), Dp, Zp)


def _cols(M: Matrix) -> list[Matrix]:
    return [M.select_columns([j]) for j in range(M.cols)]


def primal_decomposition(P: Pencil) -> Decomposition:
    """Complements for every level, built from the deepest level outwards.

    The complement one level below the index is empty because the codomain
    chain has stalled there; each level then applies :func:`coupling_full` to
    the corresponding reduced pencil.  Block sequences are grown alongside:
    ``C`` extends existing sequences, ``K`` starts ``N_1`` sequences and ``Z``
    starts ``L_1`` sequences.
    """
    chain = reduce_fully(P)
    n = chain.index
    W_next = Matrix.zeros(P.rows, 0)
    levels: list[Level] = []
    # each entry: [kind, m columns, v columns]; v ends form the current W basis
    seqs: list[list] = []
    for k in range(n, 0, -1):
        step = chain.steps[k - 1]
        Bm, Bv = step.Mk, step.Vk
        Mp_loc = Subspace.span(Bm.coordinates(chain.M(k).basis))
        Vp_loc = Subspace.span(Bv.coordinates(chain.V(k).basis))
        rec = coupling_full(step.pencil, Mp_loc, Vp_loc, Bv.coordinates(W_next))
        lv = Level(
            k,
            Bm.basis @ rec.N,
            Bm.basis @ rec.C,
            Bm.basis @ rec.K,
            Bv.basis @ rec.W,
            Bv.basis @ rec.D,
            Bv.basis @ rec.Z,
        )
        levels.append(lv)
        Ccols, Kcols, Dcols, Zcols = _cols(lv.C), _cols(lv.K), _cols(lv.D), _cols(lv.Z)
        if len(seqs) != len(Ccols):
            raise AssertionError("sequence ends do not match the C basis")
        for s, c, d in zip(seqs, Ccols, Dcols):
            s[1].append(c)
            s[2].append(d)
        seqs += [["N", [kc], [d]] for kc, d in zip(Kcols, Dcols[len(Ccols):])]
        seqs += [["L", [], [z]] for z in Zcols]
        W_next = lv.W
    sequences = tuple(
        Sequence(kind, hstack(*m, rows=P.cols), hstack(*v, rows=P.rows))
        for kind, m, v in seqs
    )
    return Decomposition(
        chain=chain,
        levels=tuple(reversed(levels)),
        M_inf=chain.M(n).basis,
        V_inf=chain.V(n).basis,
        sequences=sequences,
    )


def _column_index(B: Matrix) -> dict:
    return {c: j for j, c in enumerate(B.columns())}


def dual_decomposition(P: Pencil) -> DualDecomposition:
    """Decompose a pencil whose ``E`` is onto by decomposing its transpose.

    The transposed pencil has no constraint defects, so only ``L`` sequences
    and an invertible core appear.  With ``Qd`` and ``Bd`` the assembled bases
    of the transposed pencil, the bases ``inv(Bd)^T`` (domain) and
    ``inv(Qd)^T`` (codomain) put the original pencil in transposed block form.
    """
    if rank(P.E) != P.rows:
        raise ValueError("E is not surjective")
    Pd = dual(P)
    dec = primal_decomposition(Pd)
    if any(s.kind == "N" for s in dec.sequences):
        raise AssertionError("transposed pencil produced nilpotent blocks")
    core_dom_d = dec.M_inf
    core_cod_d = Pd.E @ core_dom_d
    Qd = hstack(core_dom_d, *(s.m for s in dec.sequences), rows=Pd.cols)
    Bd = hstack(core_cod_d, *(s.v for s in dec.sequences), rows=Pd.rows)
    Xd = inverse(Bd).T
    Yd = inverse(Qd).T
    delta = core_dom_d.cols
    blocks = []
    qpos, bpos = delta, delta
    for s in dec.sequences:
        mi = list(range(qpos, qpos + s.m.cols))
        vi = list(range(bpos, bpos + s.v.cols))
        blocks.append(Sequence("LT", Xd.select_columns(vi), Yd.select_columns(mi)))
        qpos += s.m.cols
        bpos += s.v.cols
    qidx, bidx = _column_index(Qd), _column_index(Bd)

    def through_q(M: Matrix) -> Matrix:
        return Yd.select_columns([qidx[c] for c in M.columns()])

    def through_b(M: Matrix) -> Matrix:
        return Xd.select_columns([bidx[c] for c in M.columns()])

    levels = tuple(
        Level(
            lv.k,
            through_q(lv.N),
            through_q(lv.C),
            through_q(lv.K),
            through_b(lv.W),
            through_b(lv.D),
            through_b(lv.Z),
        )
        for lv in dec.levels
    )
    return DualDecomposition(
        dual=dec,
        levels=levels,
        core_domain=Xd.select_columns(range(delta)),
        core_codomain=Yd.select_columns(range(delta)),
        blocks=tuple(blocks),
        domain_basis=Xd,
        codomain_basis=Yd,
    )


# ---------------------------------------------------------------------------
# Kronecker structure
# ---------------------------------------------------------------------------


def structure_from_profile(prof: DefectProfile, core: Matrix | None = None) -> KroneckerStructure:
    """Block counts read off the defects: ``alpha_k`` N_k, ``beta_k^+`` L_k, ``beta_k^-`` L_k^T."""
    if core is not None and core.shape != (prof.delta, prof.delta):
        raise ValueError(f"core is {core.shape}, expected {prof.delta}x{prof.delta}")

    def counts(xs):
        return {k: c for k, c in enumerate(xs, start=1) if c}

    return KroneckerStructure(
        counts(prof.alpha), counts(prof.beta_plus), counts(prof.beta_minus), prof.delta, core
    )


def _n_block(k: int) -> tuple[Matrix, Matrix]:
    E = Matrix.from_rows([[1 if j == i + 1 else 0 for j in range(k)] for i in range(k)])
    return E, Matrix.identity(k)


def _l_block(k: int) -> tuple[Matrix, Matrix]:
    E = Matrix.from_rows([[1 if i == j else 0 for j in range(k - 1)] for i in range(k)], k - 1)
    A = Matrix.from_rows([[1 if i == j + 1 else 0 for j in range(k - 1)] for i in range(k)], k - 1)
    return E, A


def block_pencil(kind: str, k: int) -> Pencil:
    """A single ``N_k``, ``L_k`` or ``L_k^T`` block."""
    if kind == "N":
        return Pencil(*_n_block(k))
    E, A = _l_block(k)
    if kind == "L":
        return Pencil(E, A)
    if kind == "LT":
        return Pencil(E.T, A.T)
    raise ValueError(f"unknown block kind {kind!r}")


def synthesize(s: KroneckerStructure) -> Pencil:
    """Block-diagonal pencil: core ``(I, C)``, then N, L and L^T blocks by size."""
    core = s.core if s.core is not None else Matrix.zeros(s.core_dim, s.core_dim)
    Es, As = [Matrix.identity(s.core_dim)], [core]
    for kind, counts in (("N", s.nilpotent), ("L", s.l_blocks), ("LT", s.lt_blocks)):
        for k, c in counts.items():
            blk = block_pencil(kind, k)
            Es += [blk.E] * c
            As += [blk.A] * c
    return Pencil(block_diag(*Es), block_diag(*As))


_KIND_ORDER = {"N": 0, "L": 1, "LT": 2}


def kronecker_decompose(P: Pencil) -> tuple[Transform, KroneckerStructure]:
    """Bases that bring ``P`` to Kronecker form.

    Returns ``T`` and the structure ``s`` such that ``T.P @ E @ T.Q`` and
    ``T.P @ A @ T.Q`` equal ``synthesize(s)`` exactly, ``s.core`` being the
    matrix ``C`` of the regular core.
    """
    dec = primal_decomposition(P)
    chain = dec.chain
    Bm, Bv = chain.M(chain.index), chain.V(chain.index)
    dd = dual_decomposition(chain.final)
    core_dom = Bm.basis @ dd.core_domain
    core_cod = Bv.basis @ dd.core_codomain
    lifted = [Sequence("LT", Bm.basis @ b.m, Bv.basis @ b.v) for b in dd.blocks]
    blocks = sorted(
        list(dec.sequences) + lifted, key=lambda b: (_KIND_ORDER[b.kind], b.size)
    )
    Q = hstack(core_dom, *(b.m for b in blocks), rows=P.cols)
    Pm = inverse(hstack(core_cod, *(b.v for b in blocks), rows=P.rows))
    delta = core_dom.cols
    C = (Pm @ P.A @ Q).block(0, delta, 0, delta)
    counts: dict[str, dict[int, int]] = {"N": {}, "L": {}, "LT": {}}
    for b in blocks:
        counts[b.kind][b.size] = counts[b.kind].get(b.size, 0) + 1
    s = KroneckerStructure(counts["N"], counts["L"], counts["LT"], delta, C)
    return Transform(Pm, Q), s


def weierstrass(P: Pencil) -> tuple[Transform, list[int], Matrix]:
    """``E -> diag(I, N)``, ``A -> diag(C, I)`` for a regular pencil.

    Returns the transform, the sizes of the nilpotent blocks (ascending) and
    ``C``.  With the pencil read as ``l E + A`` the core is ``l I + C``.
    """
    T, s = kronecker_decompose(P)
    if s.l_blocks or s.lt_blocks:
        raise NotRegularError()
    sizes = [k for k, c in s.nilpotent.items() for _ in range(c)]
    return T, sizes, s.core


def scramble(P: Pencil, seed: int, n_ops: int | None = None) -> tuple[Pencil, Transform]:
    """Hide a pencil behind pseudo-random invertible ``P`` and ``Q``.

    Both are products of elementary operations (row additions with multipliers
    in ``{-3..3}``, swaps and scalings by ``+-1, +-2, +-3``).  ``n_ops`` defaults to
    twice the matrix size; ``n_ops=0`` gives identity transforms.
    """
    rng = random.Random(seed)

    def elementary_product(n: int) -> Matrix:
        M = Matrix.identity(n).tolist()
        ops = 2 * n if n_ops is None else n_ops
        for _ in range(ops if n else 0):
            op = rng.random()
            if n >= 2 and op < 0.75:
                i, j = rng.sample(range(n), 2)
                c = rng.choice([-3, -2, -1, 1, 2, 3])
                M[i] = [a + c * b for a, b in zip(M[i], M[j])]
            elif n >= 2 and op < 0.9:
                i, j = rng.sample(range(n), 2)
                M[i], M[j] = M[j], M[i]
            else:
                i = rng.randrange(n)
                c = rng.choice([-3, -2, -1, 1, 2, 3])
                M[i] = [c * a for a in M[i]]
        return Matrix.from_rows(M, n)

    Pm = elementary_product(P.rows)
    Q = elementary_product(P.cols)
    T = Transform(Pm, Q)
    return T.apply(P), T


# ---------------------------------------------------------------------------
# weak equivalence
# ---------------------------------------------------------------------------


def weak_act(g: Transform, pen: Pencil) -> Pencil:
    """``(P, Q, R) . (E, A) = (P E Q, P (E R + A Q))``."""
    R = g.R if g.R is not None else Matrix.zeros(pen.cols, pen.cols)
    return Pencil(g.P @ pen.E @ g.Q, g.P @ (pen.E @ R + pen.A @ g.Q))


def weak_compose(g2: Transform, g1: Transform) -> Transform:
    """The element acting as ``g1`` first, then ``g2``."""
    R1 = g1.R if g1.R is not None else Matrix.zeros(g1.Q.rows, g1.Q.rows)
    R2 = g2.R if g2.R is not None else Matrix.zeros(g2.Q.rows, g2.Q.rows)
    return Transform(g2.P @ g1.P, g1.Q @ g2.Q, g1.Q @ R2 + R1 @ g2.Q)


def weak_inverse(g: Transform) -> Transform:
    Pi, Qi = inverse(g.P), inverse(g.Q)
    R = g.R if g.R is not None else Matrix.zeros(g.Q.rows, g.Q.rows)
    return Transform(Pi, Qi, -(Qi @ R @ Qi))


def weak_identity(rows: int, cols: int) -> Transform:
    return Transform(Matrix.identity(rows), Matrix.identity(cols), Matrix.zeros(cols, cols))


def weak_canonical(P: Pencil) -> WeakCanonical:
    """Canonical representative under ``(E, A) -> (P E Q, P (E R + A Q))``.

    Domain basis: ``M'`` (its part inside ``ker E`` last), then ``C'``, then
    ``K'``.  Codomain basis: ``V''``, ``W''``, ``D'``, ``Z'``.  ``R`` cancels
    ``A`` on ``M'`` through a right inverse of ``E``, so the result is
    ``E = [I_d 0; . I_s; ...]``, ``A`` is identity from ``N'`` onto ``D'`` and
    zero elsewhere.  It depends only on the shape and ``(d, a, s)``.
    """
    E, A = P.E, P.A
    Vp = image(E)
    Mp = preimage(A, Vp)
    Vpp = image(E @ Mp.basis)
    Wpp = complement(Vpp, Vp)
    lv = coupling_full(P, Mp, Vp, Wpp)
    kcap = intersection(kernel(E), Mp).basis
    X = complement(Subspace.span(kcap), Mp)
    MpB = hstack(X, kcap)
    Q = hstack(MpB, lv.C, lv.K)
    Pm = inverse(hstack(E @ X, Wpp, lv.D, lv.Z))
    # R column j solves E r = -A q_j on M'; zero on N'
    R = hstack(solve(E, -(A @ MpB)), Matrix.zeros(P.cols, lv.N.cols))
    T = Transform(Pm, Q, R)
    can = weak_act(T, P)
    return WeakCanonical(T, can.E, can.A, Vpp.dim, lv.K.cols, Wpp.cols)
