"""Cohomology of line bundles on the model varieties.

h^0 counts Cox monomials, the top group follows from Serre duality and the
middle groups of the bundles over P1 come from the Leray decomposition:
pi_* O_pi(k) = Sym^k(O + O(ell)) resp. Sym^k(O + O(a) + O(b)) for k >= 0,
and the top direct image is dual to pi_* of the relatively Serre-dual bundle.
"""

from math import comb
from typing import Iterable

from core.errors import InvalidInput, NegativeTwist, WrongVariety
from core.exact import compositions, cox_basis
from core.geom import ChowClass, canonical_class
from core.variety import VarietyKind, VarietyTag


def pushforward_split(v: VarietyTag, k: int) -> list[int]:
    """Return the splitting degrees of pi_* O_pi(k) over P1.

    Parameters
    ----------
    v : VarietyTag
        Y_ell or Y_{a,b}.
    k : int
        Twist, k >= 0.

    Returns
    -------
    list[int]
        Sorted degrees with multiplicity: {i*ell : 0 <= i <= k} on Y_ell,
        {i*a + j*b : i + j <= k} on Y_{a,b}.

    Raises
    ------
    NegativeTwist
        For k < 0, where the direct image vanishes.

    """
    if not v.is_fibred:
        raise WrongVariety(f"{v} is not fibred over P1")
    if k < 0:
        raise NegativeTwist(f"pi_* O_pi({k}) = 0")
    shifts = v.fiber_shifts
    return sorted(
        sum(e * s for e, s in zip(exps, shifts))
        for exps in compositions(k, len(shifts))
    )


def _h_p1(d: int) -> tuple[int, int]:
    return max(0, d + 1), max(0, -d - 1)


def _divisor_degree(cls: ChowClass) -> tuple[int, ...]:
    coords = cls.divisor_coordinates()
    if any(c.denominator != 1 for c in coords) or not cls.is_homogeneous(1):
        raise InvalidInput(f"{cls} is not an integral line-bundle class")
    return tuple(int(c) for c in coords)


def _h0(v: VarietyTag, degree: tuple[int, ...]) -> int:
    return len(cox_basis(v, degree))


def h_line_bundle(v: VarietyTag, cls: ChowClass) -> tuple[int, ...]:
    """Return (h^0, ..., h^dim) of the line bundle O(cls).

    Examples
    --------
    On Y_1, O(2u + 3f) has h = (15, 0, 0).

    """
    if cls.variety != v:
        raise InvalidInput(f"class on {cls.variety}, variety {v}")
    degree = _divisor_degree(cls)
    h0 = _h0(v, degree)
    top = _h0(v, _divisor_degree(canonical_class(v) - cls))
    if v.kind == VarietyKind.P1:
        return h0, top
    if v.kind == VarietyKind.P2:
        return h0, 0, top
    k, l = degree
    if v.kind == VarietyKind.HIRZEBRUCH:
        # H^1 = H^1(pi_*) + H^0(R^1 pi_*)
        if k >= 0:
            h1 = sum(_h_p1(l + d)[1] for d in pushforward_split(v, k))
        elif k == -1:
            h1 = 0
        else:
            h1 = sum(
                _h_p1(l - v.ell - d)[0] for d in pushforward_split(v, -k - 2)
            )
        return h0, h1, top
    h1, h2 = 0, 0
    if k >= 0:
        h1 = sum(_h_p1(l + d)[1] for d in pushforward_split(v, k))
    elif k <= -3:
        h2 = sum(
            _h_p1(l - v.twist_sum - d)[0] for d in pushforward_split(v, -k - 3)
        )
    return h0, h1, h2, top


def h_direct_sum(v: VarietyTag, classes: Iterable[ChowClass]) -> tuple[int, ...]:
    """Return the cohomology dimensions of a direct sum of line bundles."""
    total = [0] * (v.dim + 1)
    for cls in classes:
        total = [t + h for t, h in zip(total, h_line_bundle(v, cls))]
    return tuple(total)


def euler_from_h(h: Iterable[int]) -> int:
    """Return the alternating sum of a cohomology vector."""
    return sum((-1) ** i * x for i, x in enumerate(h))


def h0_projective_space(dim: int, d: int) -> int:
    """Return h^0(P^dim, O(d)) in closed form."""
    return comb(d + dim, dim) if d >= 0 else 0
