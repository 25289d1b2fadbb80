"""Cross-validation bundle run by ``pencilkit check``.

Each check recomputes an invariant along an independent route and compares.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

from .canonical import kronecker_decompose, synthesize, weak_canonical
from .exactla import rank
from .pencil import (
    Pencil,
    dual,
    e_invertible,
    full_profile,
    index_from_defects,
    is_regular,
    is_regular_oracle,
    reduce_fully,
    strangeness,
    strip_zeros,
)


class CheckResult(NamedTuple):
    name: str
    ok: bool
    detail: str = ""


def _weighted(xs, shift: int = 0) -> int:
    # sum_k k * xs[k + shift], with xs 1-indexed
    return sum(k * x for k, x in enumerate(xs[shift:], start=1))


def dimension_count(P: Pencil) -> CheckResult:
    p = full_profile(P)
    dm = p.delta + _weighted(p.alpha) + _weighted(p.beta_minus) + _weighted(p.beta_plus, 1)
    dv = p.delta + _weighted(p.alpha) + _weighted(p.beta_plus) + _weighted(p.beta_minus, 1)
    ok = (dm, dv) == (P.cols, P.rows)
    return CheckResult("dimension_count", ok, f"predicted {dm}x{dv}, actual {P.cols}x{P.rows}")


def level_dimensions(P: Pencil) -> CheckResult:
    """Per-level quotient dimensions against the defect tail sums, plus interlacing."""
    chain = reduce_fully(P)
    a, b = chain.alpha, chain.beta_plus
    n = chain.index

    def at(xs, j):
        return xs[j - 1] if 1 <= j <= len(xs) else 0

    for k in range(1, n + 2):
        dV = chain.V(k - 1).dim - chain.V(k).dim
        dM = chain.M(k - 1).dim - chain.M(k).dim
        if dV != sum(at(a, j) + at(b, j) for j in range(k, n + 1)):
            return CheckResult("level_dimensions", False, f"codomain quotient at level {k}")
        if dM != sum(at(a, j) + at(b, j + 1) for j in range(k, n + 1)):
            return CheckResult("level_dimensions", False, f"domain quotient at level {k}")
        dM1 = chain.M(k).dim - chain.M(k + 1).dim
        dV1 = chain.V(k).dim - chain.V(k + 1).dim
        if not dM1 <= dV1 <= dM <= dV:
            return CheckResult("level_dimensions", False, f"interlacing at level {k}")
    return CheckResult("level_dimensions", True)


def index_formula(P: Pencil) -> CheckResult:
    p = full_profile(P)
    got = index_from_defects(p)
    return CheckResult("index_from_defects", got == p.index, f"{got} vs {p.index}")


def regularity(P: Pencil) -> CheckResult:
    a, b = is_regular(P), is_regular_oracle(P)
    return CheckResult("regularity_oracle", a == b, f"defects say {a}, determinant says {b}")


def duality_swap(P: Pencil) -> CheckResult:
    p, q = full_profile(P), full_profile(dual(P))
    ok = (
        strip_zeros(q.alpha) == strip_zeros(p.alpha)
        and strip_zeros(q.beta_plus) == strip_zeros(p.beta_minus)
        and strip_zeros(q.beta_minus) == strip_zeros(p.beta_plus)
        and q.delta == p.delta
    )
    return CheckResult("duality_swap", ok)


def invertibility(P: Pencil) -> CheckResult:
    p = full_profile(P)
    zero = not any(p.alpha) and not any(p.beta_plus) and not any(p.beta_minus)
    return CheckResult("invertibility", zero == e_invertible(P))


def final_onto(P: Pencil) -> CheckResult:
    fin = reduce_fully(P).final
    return CheckResult("final_E_onto", rank(fin.E) == fin.rows)


def kronecker_reassembly(P: Pencil) -> CheckResult:
    T, s = kronecker_decompose(P)
    ok = T.apply(P) == synthesize(s)
    p = full_profile(P)
    counts = (
        {k: c for k, c in enumerate(p.alpha, 1) if c} == s.nilpotent
        and {k: c for k, c in enumerate(p.beta_plus, 1) if c} == s.l_blocks
        and {k: c for k, c in enumerate(p.beta_minus, 1) if c} == s.lt_blocks
        and p.delta == s.core_dim
    )
    return CheckResult("kronecker_reassembly", ok and counts)


def weak_form(P: Pencil) -> CheckResult:
    w = weak_canonical(P)
    ok = w.transform.apply(P) == Pencil(w.E, w.A) and (w.d, w.a, w.s) == strangeness(P)
    return CheckResult("weak_canonical", ok)


CHECKS: tuple[Callable[[Pencil], CheckResult], ...] = (
    dimension_count,
    level_dimensions,
    index_formula,
    regularity,
    duality_swap,
    invertibility,
    final_onto,
    kronecker_reassembly,
    weak_form,
)


def run_checks(P: Pencil) -> list[CheckResult]:
    out = []
    for chk in CHECKS:
        try:
            out.append(chk(P))
        except AssertionError as e:
            out.append(CheckResult(chk.__name__, False, f"internal assertion: {e}"))
    return out
