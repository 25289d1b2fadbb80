"""Reduction of matrix pencils and the invariants it exposes.

A pencil ``(E, A)`` is a pair of same-shape matrices mapping a domain ``M``
(``cols`` dimensional) into a codomain ``V`` (``rows`` dimensional), read as
the differential-algebraic equation ``E x' + A x = 0``.

One reduction step replaces ``V`` by ``V' = E M`` and ``M`` by
``M' = {x : A x in V'}`` and restricts both operators.  Iterating until the
codomain stops shrinking gives the index, the constraint defects ``alpha`` and
the observation defects ``beta_plus``; reducing the transpose of the final
pencil once more yields the control defects ``beta_minus`` and the dynamical
dimension ``delta``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactla import (
    Matrix,
    Subspace,
    SingularMatrixError,
    det,
    image,
    inverse,
    preimage,
    rank,
)

__all__ = [
    "Pencil",
    "ReductionStep",
    "ReductionChain",
    "DefectProfile",
    "reduce_step",
    "reduce_fully",
    "step_defects",
    "dual",
    "full_profile",
    "index_from_defects",
    "is_regular",
    "is_regular_oracle",
    "strangeness",
    "e_invertible",
    "strip_zeros",
]


@dataclass(frozen=True)
class Pencil:
    """A pair ``(E, A)`` of matrices of identical shape ``dim V x dim M``."""

    E: Matrix
    A: Matrix

    def __post_init__(self):
        if self.E.shape != self.A.shape:
            raise ValueError(f"E is {self.E.shape} but A is {self.A.shape}")

    @classmethod
    def from_lists(cls, E, A, cols: int | None = None) -> Pencil:
        return cls(Matrix.from_rows(E, cols), Matrix.from_rows(A, cols))

    @property
    def rows(self) -> int:
        """Dimension of the codomain ``V``."""
        return self.E.rows

    @property
    def cols(self) -> int:
        """Dimension of the domain ``M``."""
        return self.E.cols

    @property
    def shape(self) -> tuple[int, int]:
        return self.E.shape

    def restrict(self, Mb: Subspace, Vb: Subspace) -> Pencil:
        """Restriction to ``Mb -> Vb`` in the canonical bases of both subspaces."""
        return Pencil(
            Vb.coordinates(self.E @ Mb.basis),
            Vb.coordinates(self.A @ Mb.basis),
        )


@dataclass(frozen=True)
class ReductionStep:
    """Level ``k`` of the reduction chain.

    ``Mk`` and ``Vk`` live in the original domain and codomain; ``pencil`` is the
    ``k``-th reduced pencil written in their canonical bases.  ``alpha`` and
    ``beta_plus`` are the defects of that pencil, i.e. ``alpha_{k+1}`` and
    ``beta_{k+1}^+`` of the original one.
    """

    Mk: Subspace
    Vk: Subspace
    alpha: int
    beta_plus: int
    pencil: Pencil


@dataclass(frozen=True)
class ReductionChain:
    steps: tuple[ReductionStep, ...]
    index: int

    @property
    def final(self) -> Pencil:
        """The totally reduced pencil."""
        return self.steps[-1].pencil

    def M(self, k: int) -> Subspace:
        return self.steps[min(k, self.index)].Mk

    def V(self, k: int) -> Subspace:
        return self.steps[min(k, self.index)].Vk

    @property
    def alpha(self) -> list[int]:
        return [s.alpha for s in self.steps[: self.index]]

    @property
    def beta_plus(self) -> list[int]:
        return [s.beta_plus for s in self.steps[: self.index]]


@dataclass(frozen=True)
class DefectProfile:
    """Complete strong-equivalence invariants apart from the regular core.

    ``alpha`` and ``beta_plus`` have exactly ``index`` entries; ``beta_minus``
    has as many entries as the index of the transposed totally reduced pencil.
    """

    alpha: tuple[int, ...]
    beta_plus: tuple[int, ...]
    beta_minus: tuple[int, ...]
    delta: int
    index: int

    def as_dict(self) -> dict:
        return {
            "alpha": list(self.alpha),
            "beta_plus": list(self.beta_plus),
            "beta_minus": list(self.beta_minus),
            "delta": self.delta,
            "index": self.index,
        }


def reduce_step(P: Pencil) -> tuple[Subspace, Subspace, Pencil]:
    """One reduction: ``(V', M', (E', A'))``.

    ``V' = image(E)``, ``M' = A^{-1} V'``, and the reduced pencil is the
    restriction ``M' -> V'`` in canonical bases.
    """
    Vp = image(P.E)
    Mp = preimage(P.A, Vp)
    return Vp, Mp, P.restrict(Mp, Vp)


def step_defects(P: Pencil) -> tuple[int, int]:
    """First constraint and observation defects ``(alpha_1, beta_1^+)``.

    The quotient map ``[E]: M/M' -> V'/V''`` is onto and ``[A]: M/M' -> V/V'``
    is one-to-one, so both numbers follow from four dimensions.
    """
    Vp, Mp, Pr = reduce_step(P)
    dim_vpp = rank(Pr.E)
    quot_m = P.cols - Mp.dim
    alpha = quot_m - (Vp.dim - dim_vpp)
    beta = (P.rows - Vp.dim) - quot_m
    assert alpha >= 0 and beta >= 0
    return alpha, beta


def reduce_fully(P: Pencil) -> ReductionChain:
    """Reduce until the codomain stalls; the number of real steps is the index.

    Each level's subspaces are pushed back into original coordinates and
    re-canonicalised, and the reduced pencil is re-expressed in those bases.
    """
    Mk = Subspace.full(P.cols)
    Vk = Subspace.full(P.rows)
    Pk = P
    levels = []
    while True:
        Vp_loc, Mp_loc, _ = reduce_step(Pk)
        levels.append((Mk, Vk, Pk, Mp_loc.dim))
        if Vp_loc.dim == Vk.dim:
            break
        Mk = Subspace.span(Mk.basis @ Mp_loc.basis)
        Vk = Subspace.span(Vk.basis @ Vp_loc.basis)
        Pk = P.restrict(Mk, Vk)
    # alpha_k = dim dM^(k) - dim dV^(k+1); beta_k = dim dV^(k) - dim dM^(k)
    vdims = [lv[1].dim for lv in levels]

    def vdim(j: int) -> int:
        return vdims[min(j, len(vdims) - 1)]

    steps = []
    for k, (Mk, Vk, Pk, m_next) in enumerate(levels):
        dM = Mk.dim - m_next
        alpha = dM - (vdim(k + 1) - vdim(k + 2))
        beta = (vdim(k) - vdim(k + 1)) - dM
        steps.append(ReductionStep(Mk, Vk, alpha, beta, Pk))
    return ReductionChain(tuple(steps), len(levels) - 1)


def dual(P: Pencil) -> Pencil:
    """The transposed pencil ``(E^T, A^T)``."""
    return Pencil(P.E.T, P.A.T)


def full_profile(P: Pencil) -> DefectProfile:
    chain = reduce_fully(P)
    dchain = reduce_fully(dual(chain.final))
    if any(dchain.alpha):
        raise AssertionError("transposed totally reduced pencil has constraint defects")
    core = dchain.final
    if core.rows != core.cols:
        raise AssertionError("second sweep did not end on a square pencil")
    return DefectProfile(
        alpha=tuple(chain.alpha),
        beta_plus=tuple(chain.beta_plus),
        beta_minus=tuple(dchain.beta_plus),
        delta=core.cols,
        index=chain.index,
    )


def strip_zeros(xs) -> tuple[int, ...]:
    """Drop trailing zeros so defect sequences of different lengths compare equal."""
    xs = list(xs)
    while xs and xs[-1] == 0:
        xs.pop()
    return tuple(xs)


def index_from_defects(prof: DefectProfile) -> int:
    """Smallest ``n`` with ``alpha_k = beta_k^+ = 0`` for every ``k > n``."""
    n = 0
    for k, (a, b) in enumerate(zip(prof.alpha, prof.beta_plus), start=1):
        if a or b:
            n = k
    return n


def is_regular(P: Pencil) -> bool:
    """Regular iff every observation and control defect vanishes."""
    prof = full_profile(P)
    return not any(prof.beta_plus) and not any(prof.beta_minus)


def is_regular_oracle(P: Pencil) -> bool:
    """Regularity straight from the definition: is ``det(lE + A)`` not identically 0?

    The determinant has degree at most ``n`` in ``l``, so sampling ``l = 0..n``
    decides it.
    """
    n = P.rows
    if n != P.cols:
        return False
    for lam in range(n + 1):
        if det(P.E.scale(lam) + P.A) != 0:
            return True
    return False


def strangeness(P: Pencil) -> tuple[int, int, int]:
    """Weak-equivalence invariants ``(d, a, s)``.

    ``d = dim V''``, ``a = alpha_1`` and ``s = dim V' - dim V''``.
    """
    chain = reduce_fully(P)
    d = chain.V(2).dim
    a = chain.steps[0].alpha
    s = chain.V(1).dim - d
    if s != sum(chain.alpha[1:]) + sum(chain.beta_plus[1:]):
        raise AssertionError("strangeness disagrees with the defect sum")
    return d, a, s


def e_invertible(P: Pencil) -> bool:
    """True if ``E`` is a square invertible matrix."""
    if P.rows != P.cols:
        return False
    try:
        inverse(P.E)
    except SingularMatrixError:
        return False
    return True
