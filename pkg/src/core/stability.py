"""Slopes and stability thresholds for the polarizations L_c = L + c*A.

A frame fixes the fibration V -> P1, an ample class A on the base pulled back
to V and a relatively ample class L. Brackets [gamma] are intersection
numbers gamma * A^(d_X - 1) * L^(d_Y - d_X - 1).
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from core.errors import (
    InvalidInput,
    NonzeroC1,
    RankOne,
    UnsupportedBaseDimension,
    VarietyMismatch,
    WrongVariety,
)
from core.exact import Scalar, as_rational
from core.geom import ChowClass, fiber_class, hyperplane_class
from core.variety import VarietyTag


@dataclass(frozen=True)
class FibrationFrame:
    """A fibration over P1 with the classes A and L.

    Parameters
    ----------
    variety : VarietyTag
        Y_ell or Y_{a,b}.
    a_degree : int
        Degree of A on P1; A pulls back to a_degree times the fiber class.
    l_class : ChowClass
        The relatively ample divisor L on the total space.

    """

    variety: VarietyTag
    a_degree: int
    l_class: ChowClass

    def __post_init__(self) -> None:
        """Validate the frame."""
        if not self.variety.is_fibred:
            raise WrongVariety(f"{self.variety} is not fibred over P1")
        if self.l_class.variety != self.variety:
            raise VarietyMismatch("L lives on another variety")
        if self.a_degree <= 0:
            raise InvalidInput("A must be ample on P1")
        if self.al_number <= 0:
            raise InvalidInput("A^{d_X} L^{d_Y - d_X} must be positive")

    @classmethod
    def standard(
        cls, variety: VarietyTag, a_degree: int = 1, l_twist: Scalar = 0
    ) -> "FibrationFrame":
        """Return the frame A = a_degree * fiber, L = u + l_twist * fiber."""
        l_class = hyperplane_class(variety) + fiber_class(variety).scale(l_twist)
        return cls(variety, a_degree, l_class)

    @property
    def d_x(self) -> int:
        """Return the base dimension."""
        return 1

    @property
    def d_y(self) -> int:
        """Return the total dimension."""
        return self.variety.dim

    @cached_property
    def a_class(self) -> ChowClass:
        """Return pi^*A."""
        return fiber_class(self.variety).scale(self.a_degree)

    @cached_property
    def a_top(self) -> Fraction:
        """Return A^{d_X} computed on the base."""
        return Fraction(self.a_degree)

    @cached_property
    def al_number(self) -> Fraction:
        """Return A^{d_X} L^{d_Y - d_X}."""
        return (self.a_class * self.l_class ** (self.d_y - self.d_x)).top

    @cached_property
    def l_top(self) -> Fraction:
        """Return A^{d_X - 1} L^{d_Y - d_X + 1}."""
        return (self.l_class**self.d_y).top

    @cached_property
    def _bracket_weight(self) -> ChowClass:
        return self.l_class ** (self.d_y - self.d_x - 1)

    def bracket(self, gamma: ChowClass) -> Fraction:
        """Return [gamma] = gamma * A^{d_X - 1} L^{d_Y - d_X - 1}."""
        return (gamma * self._bracket_weight).top

    def polarization(self, c: Scalar) -> ChowClass:
        """Return L_c = L + c*A."""
        return self.l_class + self.a_class.scale(c)


@dataclass(frozen=True)
class SheafNumData:
    """Numerical invariants of a sheaf: rank, c1, c2 and the c3 number."""

    rank: int
    c1: ChowClass
    c2: ChowClass
    c3: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        """Validate rank and classes."""
        if self.rank < 1:
            raise InvalidInput(f"rank must be positive, got {self.rank}")
        if self.c1.variety != self.c2.variety:
            raise VarietyMismatch("c1 and c2 on different varieties")
        if not self.c1.is_homogeneous(1) or not self.c2.is_homogeneous(2):
            raise InvalidInput("c1 must be a divisor class and c2 of codimension 2")

    @classmethod
    def with_c2(
        cls, variety: VarietyTag, rank: int, c2: ChowClass, c1: ChowClass | None = None
    ) -> "SheafNumData":
        """Return data with the given c2 and c1 (default 0)."""
        return cls(rank, c1 or ChowClass.zero(variety), c2)

    @property
    def variety(self) -> VarietyTag:
        """Return the variety the classes live on."""
        return self.c1.variety

    @cached_property
    def xi(self) -> ChowClass:
        """Return the slope vector c1 / rank."""
        return self.c1.scale(Fraction(1, self.rank))


def standard_c2(variety: VarietyTag, n: Scalar) -> ChowClass:
    """Return n*pt on Y_ell and n*u^2 on Y_{a,b}, the c2 of the moduli problems."""
    name = "u2" if variety.dim == 3 else variety.chow_basis[-1]
    return ChowClass.of(variety, {name: n})


def _check(f: FibrationFrame, s: SheafNumData) -> None:
    if s.variety != f.variety:
        raise VarietyMismatch(f"sheaf on {s.variety}, frame on {f.variety}")


def _nonnegative(c: Scalar) -> Fraction:
    value = as_rational(c)
    if value < 0:
        raise InvalidInput(f"c must be >= 0, got {value}")
    return value


def slope_lc(f: FibrationFrame, s: SheafNumData, c: Scalar) -> Fraction:
    """Return the slope of s with respect to L_c.

    Notes
    -----
    xi * (A^{d_X-1} L^{d_Y-d_X} + c * A^{d_X} L^{d_Y-d_X-1}); affine in c.

    """
    _check(f, s)
    c = _nonnegative(c)
    weight = f.l_class ** (f.d_y - f.d_x) + (
        f.a_class * f.l_class ** (f.d_y - f.d_x - 1)
    ).scale(c)
    return (s.xi * weight).top


def slope_usual(f: FibrationFrame, s: SheafNumData, c: Scalar) -> Fraction:
    """Return the usual slope xi * (L + c*A)^(d_Y - 1)."""
    _check(f, s)
    c = _nonnegative(c)
    return (s.xi * f.polarization(c) ** (f.d_y - 1)).top


def fiber_slope(f: FibrationFrame, s: SheafNumData) -> Fraction:
    """Return the slope on the general fiber, xi * A^{d_X} L^{d_Y-d_X-1}."""
    _check(f, s)
    return (s.xi * f.a_class * f.l_class ** (f.d_y - f.d_x - 1)).top


def discriminant(s: SheafNumData) -> ChowClass:
    """Return 2r*c2 - (r-1)*c1^2."""
    return s.c2.scale(2 * s.rank) - (s.c1 * s.c1).scale(s.rank - 1)


def threshold_af(f: FibrationFrame, r: int, m_max: Scalar, m_min: Scalar) -> Fraction:
    """Return a_F = r^2 (M_F - m_F) / A^{d_X}.

    Parameters
    ----------
    f : FibrationFrame
        The frame.
    r : int
        The rank of F.
    m_max, m_min : Scalar
        The L-slopes of the first terms of the Harder-Narasimhan filtrations,
        supplied by the caller.

    """
    if r < 1:
        raise InvalidInput("rank must be positive")
    return r * r * (as_rational(m_max) - as_rational(m_min)) / f.a_top


def threshold_cf(f: FibrationFrame, s: SheafNumData) -> Fraction:
    """Return c_F = r(r-1) * A^{d_X} L^{d_Y-d_X} / (A^{d_X})^2 * [c2].

    Raises
    ------
    NonzeroC1
        When c1(s) != 0.

    """
    _check(f, s)
    if not s.c1.is_zero():
        raise NonzeroC1(f"c1 = {s.c1}")
    r = s.rank
    return r * (r - 1) * f.al_number / f.a_top**2 * f.bracket(s.c2)


def threshold_cf_prime(f: FibrationFrame, s: SheafNumData) -> Fraction:
    """Return c'_F = r^2 (r-1)/2 * A^{d_X} L^{d_Y-d_X} / (A^{d_X})^2 * [Delta]."""
    _check(f, s)
    r = s.rank
    return (
        Fraction(r * r * (r - 1), 2)
        * f.al_number
        / f.a_top**2
        * f.bracket(discriminant(s))
    )


@dataclass(frozen=True)
class HodgeCheck:
    """Both sides of 2[xi A][xi L_c] >= 2c[xi A]^2 + A^{d_X} L^{d_Y-d_X} [xi^2]."""

    holds: bool
    lhs: Fraction
    rhs: Fraction


def hodge_inequality_check(f: FibrationFrame, xi: ChowClass, c: Scalar) -> HodgeCheck:
    """Evaluate the Hodge-index inequality for a divisor class xi."""
    c = _nonnegative(c)
    if not xi.is_homogeneous(1):
        raise InvalidInput(f"{xi} is not a divisor class")
    xa = f.bracket(xi * f.a_class)
    lhs = 2 * xa * f.bracket(xi * f.polarization(c))
    rhs = 2 * c * xa * xa + f.al_number * f.bracket(xi * xi)
    return HodgeCheck(lhs >= rhs, lhs, rhs)


def equality_identity(f: FibrationFrame, xi: ChowClass, c: Scalar) -> Fraction:
    """Return [([xi A] L_c - [A L_c] xi) * A], which vanishes for every xi."""
    lc = f.polarization(_nonnegative(c))
    combo = lc.scale(f.bracket(xi * f.a_class)) - xi.scale(f.bracket(f.a_class * lc))
    return f.bracket(combo * f.a_class)


@dataclass(frozen=True)
class ConeMembership:
    """Result of the positive-cone tests."""

    in_k_plus: bool
    in_closure: bool
    in_c_alpha: bool | None


def nef_generators(v: VarietyTag) -> tuple[ChowClass, ChowClass]:
    """Return the generators of the nef cone: (fiber class, u)."""
    return fiber_class(v), hyperplane_class(v)


def cone_membership(
    f: FibrationFrame, beta: ChowClass, alpha: ChowClass | None = None
) -> ConeMembership:
    """Test beta against K+ and, when alpha is given, against C(alpha).

    The boundary [beta^2] = 0 with non-negative nef pairings counts as the
    closure of K+ but not as K+ itself.
    """
    square = f.bracket(beta * beta)
    pairings_ok = all(f.bracket(beta * d) >= 0 for d in nef_generators(f.variety))
    in_closure = square >= 0 and pairings_ok
    in_c_alpha = None
    if alpha is not None:
        in_c_alpha = in_closure and f.bracket(alpha * beta) > 0
    return ConeMembership(square > 0 and pairings_ok, in_closure, in_c_alpha)


def compare_bound(d_x: int, d_y: int, k_f: Scalar, r: int, s: Scalar) -> Fraction:
    """Convert an L_c threshold to one for the usual slope.

    d_X = 1 gives k_F/(d_Y - 1); d_X = 2 gives max(2k_F/(d_Y - 2), r^2 s/(d_Y - 1)).

    Raises
    ------
    UnsupportedBaseDimension
        For d_X >= 3.

    """
    if d_x >= 3:
        raise UnsupportedBaseDimension(f"d_X = {d_x}")
    if d_x < 1 or d_y <= d_x:
        raise InvalidInput(f"need 0 < d_X < d_Y, got {d_x}, {d_y}")
    k = as_rational(k_f)
    if d_x == 1:
        return k / (d_y - 1)
    return max(2 * k / (d_y - 2), r * r * as_rational(s) / (d_y - 1))


@dataclass(frozen=True)
class RelativeBounds:
    """Lower bounds on relative slopes of destabilizing subsheaves."""

    fiber_slope_gap: Fraction
    fiber_slope_gap_fine: Fraction
    c2_bound: Fraction
    discriminant_bound: Fraction


def relative_bounds_mu(f: FibrationFrame, s: SheafNumData) -> RelativeBounds:
    """Return A^{d_X}/(r-1), A^{d_X}/(r(r-1)), -2r/(r-1)[c2] and -[Delta]/(r-1).

    Raises
    ------
    RankOne
        For rank one sheaves.

    """
    _check(f, s)
    r = s.rank
    if r == 1:
        raise RankOne("relative bounds need r >= 2")
    return RelativeBounds(
        f.a_top / (r - 1),
        f.a_top / (r * (r - 1)),
        Fraction(-2 * r, r - 1) * f.bracket(s.c2),
        -f.bracket(discriminant(s)) / (r - 1),
    )


def sheaf_discriminant_bracket(f: FibrationFrame, s: SheafNumData) -> Fraction:
    """Return [Delta(s)] with respect to the frame."""
    _check(f, s)
    return f.bracket(discriminant(s))


@dataclass(frozen=True)
class ThresholdReport:
    """The thresholds c_F, c'_F and the relative slope bounds of one sheaf."""

    c_f: Fraction | None
    c_f_prime: Fraction
    discriminant_bracket: Fraction
    bounds: RelativeBounds | None


def threshold_report(f: FibrationFrame, s: SheafNumData) -> ThresholdReport:
    """Bundle the thresholds; c_F is omitted when c1 != 0, the bounds for rank one."""
    c_f = None if not s.c1.is_zero() else threshold_cf(f, s)
    bounds = relative_bounds_mu(f, s) if s.rank > 1 else None
    return ThresholdReport(
        c_f=c_f,
        c_f_prime=threshold_cf_prime(f, s),
        discriminant_bracket=sheaf_discriminant_bracket(f, s),
        bounds=bounds,
    )
