"""Intersection rings of the model varieties, Chern characters and GRR."""

from dataclasses import dataclass
from fractions import Fraction
import math
from typing import Mapping, Sequence

from core.errors import InvalidInput, NonIntegralResult, VarietyMismatch, WrongVariety
from core.exact import Scalar, as_rational
from core.variety import VarietyKind, VarietyTag


@dataclass(frozen=True)
class ChowClass:
    """An element of the intersection ring in the variety's monomial basis."""

    variety: VarietyTag
    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        """Check that coefficients are indexed by the basis."""
        if len(self.coefficients) != len(self.variety.chow_basis):
            raise InvalidInput(
                f"{len(self.coefficients)} coefficients for basis "
                f"{self.variety.chow_basis}"
            )
        object.__setattr__(
            self, "coefficients", tuple(as_rational(c) for c in self.coefficients)
        )

    @classmethod
    def zero(cls, variety: VarietyTag) -> "ChowClass":
        """Return 0."""
        return cls(variety, (Fraction(0),) * len(variety.chow_basis))

    @classmethod
    def one(cls, variety: VarietyTag) -> "ChowClass":
        """Return the fundamental class 1."""
        return cls.of(variety, {"1": 1})

    @classmethod
    def of(cls, variety: VarietyTag, mapping: Mapping[str, Scalar]) -> "ChowClass":
        """Build a class from {basis name: coefficient}."""
        basis = variety.chow_basis
        unknown = set(mapping) - set(basis)
        if unknown:
            raise InvalidInput(f"{sorted(unknown)} not in basis {basis} of {variety}")
        return cls(variety, tuple(as_rational(mapping.get(b, 0)) for b in basis))

    @classmethod
    def point(cls, variety: VarietyTag) -> "ChowClass":
        """Return the class of a point."""
        return cls.of(variety, {variety.chow_basis[-1]: 1})

    @classmethod
    def divisor(cls, variety: VarietyTag, *coords: Scalar) -> "ChowClass":
        """Return a divisor class from its coordinates in the ring generators.

        On Y_ell the coordinates are (k, l) for k*u + l*f, on Y_{a,b} they are
        (k, l) for k*u + l*v, on P1 and P2 a single degree.
        """
        names = variety.ring_generators
        if len(coords) != len(names):
            raise InvalidInput(f"{variety} divisors need {len(names)} coordinates")
        return cls.of(variety, dict(zip(names, coords)))

    def coefficient(self, name: str) -> Fraction:
        """Return the coefficient of one basis monomial."""
        return self.coefficients[self.variety.chow_basis.index(name)]

    def divisor_coordinates(self) -> tuple[Fraction, ...]:
        """Return the coordinates of the degree-1 part in the ring generators."""
        return tuple(self.coefficient(name) for name in self.variety.ring_generators)

    @property
    def top(self) -> Fraction:
        """Return the degree of the zero-cycle part."""
        return self.coefficients[-1]

    def part(self, degree: int) -> "ChowClass":
        """Return the homogeneous component of the given codimension."""
        return ChowClass(
            self.variety,
            tuple(
                c if d == degree else Fraction(0)
                for c, d in zip(self.coefficients, self.variety.chow_degrees)
            ),
        )

    def is_zero(self) -> bool:
        """Return True for the zero class."""
        return not any(self.coefficients)

    def is_homogeneous(self, degree: int) -> bool:
        """Return True if the class has no component outside `degree`."""
        return self.part(degree) == self

    def _check(self, other: "ChowClass") -> None:
        if self.variety != other.variety:
            raise VarietyMismatch(f"{self.variety} vs {other.variety}")

    def __add__(self, other: "ChowClass") -> "ChowClass":
        """Add two classes."""
        self._check(other)
        return ChowClass(
            self.variety,
            tuple(x + y for x, y in zip(self.coefficients, other.coefficients)),
        )

    def __neg__(self) -> "ChowClass":
        """Negate."""
        return self.scale(-1)

    def __sub__(self, other: "ChowClass") -> "ChowClass":
        """Subtract two classes."""
        return self + (-other)

    def scale(self, factor: Scalar) -> "ChowClass":
        """Multiply by a rational number."""
        f = as_rational(factor)
        return ChowClass(self.variety, tuple(f * c for c in self.coefficients))

    def __mul__(self, other: "ChowClass | Scalar") -> "ChowClass":
        """Intersect with another class, or scale by a number."""
        if isinstance(other, ChowClass):
            return intersect(self, other)
        return self.scale(other)

    def __rmul__(self, other: Scalar) -> "ChowClass":
        """Scale by a number."""
        return self.scale(other)

    def __pow__(self, exponent: int) -> "ChowClass":
        """Return a power in the intersection ring."""
        result = ChowClass.one(self.variety)
        for _ in range(exponent):
            result = intersect(result, self)
        return result

    def exp(self) -> "ChowClass":
        """Return the truncated exponential sum x^k/k!, k <= dim."""
        result = ChowClass.zero(self.variety)
        for k in range(self.variety.dim + 1):
            result = result + (self**k).scale(Fraction(1, math.factorial(k)))
        return result

    def __str__(self) -> str:
        """Return a readable form such as `3*u2 - 1*pt`."""
        pieces = [
            f"{c}*{name}" if name != "1" else f"{c}"
            for c, name in zip(self.coefficients, self.variety.chow_basis)
            if c
        ]
        return " + ".join(pieces) if pieces else "0"


def intersect(x: ChowClass, y: ChowClass) -> ChowClass:
    """Return the product of two classes in the intersection ring.

    Raises
    ------
    VarietyMismatch
        When the classes live on different varieties.

    """
    if x.variety != y.variety:
        raise VarietyMismatch(f"{x.variety} vs {y.variety}")
    v = x.variety
    out = [Fraction(0)] * len(v.chow_basis)
    for cx, ex in zip(x.coefficients, v.chow_exponents):
        if not cx:
            continue
        for cy, ey in zip(y.coefficients, v.chow_exponents):
            if not cy:
                continue
            reduced = v.normal_form(tuple(p + q for p, q in zip(ex, ey)))
            if reduced is not None:
                index, factor = reduced
                out[index] += cx * cy * factor
    return ChowClass(v, tuple(out))


def fiber_class(v: VarietyTag) -> ChowClass:
    """Return the pullback of the point class of P1 (f or v)."""
    return ChowClass.of(v, {v.fiber_class_name: 1})


def hyperplane_class(v: VarietyTag) -> ChowClass:
    """Return u = [O_pi(1)] on the bundles and the hyperplane class otherwise."""
    return ChowClass.of(v, {v.ring_generators[0]: 1})


def canonical_class(v: VarietyTag) -> ChowClass:
    """Return the canonical class K_V."""
    return -tangent_chern_class(v).part(1)


def relative_canonical_class(v: VarietyTag) -> ChowClass:
    """Return the relative canonical class of V over P1.

    Y_ell gives -2u + ell*f, Y_{a,b} gives -3u + (a+b)*v.
    """
    if not v.is_fibred:
        raise WrongVariety(f"{v} is not fibred over P1")
    return canonical_class(v) + fiber_class(v).scale(2)


def tangent_chern_class(v: VarietyTag) -> ChowClass:
    """Return the total Chern class of the tangent bundle.

    Notes
    -----
    From the relative Euler sequence twisted by O_pi(1) and the tangent bundle
    of the base: (1+u)(1+u-ell*f)(1+2f) on Y_ell and
    (1+u)(1+u-a*v)(1+u-b*v)(1+2v) on Y_{a,b}.

    """
    one = ChowClass.one(v)
    h = hyperplane_class(v)
    if not v.is_fibred:
        return (one + h) ** (v.dim + 1)
    f = fiber_class(v)
    total = one + f.scale(2)
    for shift in v.fiber_shifts:
        total = total * (one + h - f.scale(shift))
    return total


def todd_class(v: VarietyTag) -> list[ChowClass]:
    """Return Td(T_V) split by codimension, index = degree."""
    c = tangent_chern_class(v)
    c1, c2 = c.part(1), c.part(2)
    parts = [
        ChowClass.one(v),
        c1.scale(Fraction(1, 2)),
        (c1 * c1 + c2).scale(Fraction(1, 12)),
        (c1 * c2).scale(Fraction(1, 24)),
    ]
    return parts[: v.dim + 1]


def total_todd_class(v: VarietyTag) -> ChowClass:
    """Return Td(T_V) as one class."""
    return sum(todd_class(v)[1:], todd_class(v)[0])


def explicit_todd_class(v: VarietyTag) -> ChowClass:
    """Return the closed form of Td(Y_{a,b}).

    1 + (3u - (a+b-2)v)/2 + u^2 - (4(a+b) - 9)uv/6 + u^2 v.
    """
    if v.kind != VarietyKind.P2_BUNDLE:
        raise WrongVariety(f"closed form only on Y_(a,b), not {v}")
    s = v.twist_sum
    return ChowClass.of(
        v,
        {
            "1": 1,
            "u": Fraction(3, 2),
            "v": Fraction(-(s - 2), 2),
            "u2": 1,
            "uv": Fraction(-(4 * s - 9), 6),
            "pt": 1,
        },
    )


def relative_todd_class(v: VarietyTag) -> ChowClass:
    """Return Td(T_pi) = Td(V) * pi^*Td(P1)^-1 = Td(V) * (1 - fiber)."""
    if not v.is_fibred:
        raise WrongVariety(f"{v} is not fibred over P1")
    return total_todd_class(v) * (ChowClass.one(v) - fiber_class(v))


def push_forward(x: ChowClass) -> ChowClass:
    """Push a class on Y_ell or Y_{a,b} down to P1.

    u (Y_ell) and u2 (Y_{a,b}) go to the fundamental class, pt goes to pt,
    everything else to 0; u^2 = ell*pt and u^3 = (a+b)*pt are already folded
    into the basis.
    """
    v = x.variety
    if not v.is_fibred:
        raise WrongVariety(f"cannot push {v} down to P1")
    base = VarietyTag.p1()
    generic = "u" if v.fiber_dim == 1 else "u2"
    return ChowClass.of(base, {"1": x.coefficient(generic), "pt": x.top})


@dataclass(frozen=True)
class ChernData:
    """Chern character of a sheaf or K-theory class, split by degree."""

    variety: VarietyTag
    rank: int
    ch1: ChowClass
    ch2: ChowClass
    ch3: ChowClass | None = None

    def __post_init__(self) -> None:
        """Check the components live on the same variety."""
        parts = [self.ch1, self.ch2] + ([self.ch3] if self.ch3 is not None else [])
        if any(p.variety != self.variety for p in parts):
            raise VarietyMismatch("Chern character components on different varieties")
        if (self.ch3 is not None) != (self.variety.dim == 3):
            raise InvalidInput("ch3 is present exactly on threefolds")

    @classmethod
    def from_character(cls, variety: VarietyTag, total: ChowClass) -> "ChernData":
        """Split a total Chern character into its graded pieces."""
        rank = total.coefficient("1")
        if rank.denominator != 1:
            raise NonIntegralResult(f"rank {rank} is not an integer")
        return cls(
            variety,
            int(rank),
            total.part(1),
            total.part(2),
            total.part(3) if variety.dim == 3 else None,
        )

    @classmethod
    def from_chern(
        cls,
        variety: VarietyTag,
        rank: int,
        c1: ChowClass | None = None,
        c2: ChowClass | None = None,
        c3: ChowClass | None = None,
    ) -> "ChernData":
        """Build the Chern character from Chern classes by Newton's identities."""
        zero = ChowClass.zero(variety)
        c1, c2, c3 = c1 or zero, c2 or zero, c3 or zero
        ch2 = (c1 * c1).scale(Fraction(1, 2)) - c2
        ch3 = (c1 * c1 * c1 - (c1 * c2).scale(3) + c3.scale(3)).scale(Fraction(1, 6))
        total = ChowClass.one(variety).scale(rank) + c1 + ch2 + ch3
        return cls.from_character(variety, total)

    def character(self) -> ChowClass:
        """Return the total Chern character."""
        total = ChowClass.one(self.variety).scale(self.rank) + self.ch1 + self.ch2
        return total + self.ch3 if self.ch3 is not None else total

    def chern_classes(self) -> tuple[ChowClass, ChowClass, ChowClass]:
        """Return (c1, c2, c3); c3 is 0 below dimension 3."""
        c1 = self.ch1
        c2 = (c1 * c1).scale(Fraction(1, 2)) - self.ch2
        ch3 = self.ch3 if self.ch3 is not None else ChowClass.zero(self.variety)
        c3 = ch3.scale(2) - (c1 * c1 * c1).scale(Fraction(1, 3)) + c1 * c2
        return c1, c2, c3

    def twist(self, line: ChowClass) -> "ChernData":
        """Return ch(F (x) O(line)) = ch(F) * exp(line)."""
        return ChernData.from_character(self.variety, self.character() * line.exp())

    def dual(self) -> "ChernData":
        """Return the character of the dual: odd degrees change sign."""
        total = self.character()
        flipped = sum(
            (total.part(d).scale((-1) ** d) for d in range(1, self.variety.dim + 1)),
            total.part(0),
        )
        return ChernData.from_character(self.variety, flipped)

    def endomorphisms(self) -> "ChernData":
        """Return ch(F (x) F^dual)."""
        return ChernData.from_character(
            self.variety, self.character() * self.dual().character()
        )

    def __add__(self, other: "ChernData") -> "ChernData":
        """Return the character of the direct sum."""
        if self.variety != other.variety:
            raise VarietyMismatch(f"{self.variety} vs {other.variety}")
        return ChernData.from_character(
            self.variety, self.character() + other.character()
        )


@dataclass(frozen=True)
class ResolutionTerm:
    """One line-bundle term +-multiplicity * O(bundle) of a resolution."""

    sign: int
    bundle: ChowClass
    multiplicity: int = 1

    def __post_init__(self) -> None:
        """Validate the sign and multiplicity."""
        if self.sign not in (1, -1):
            raise InvalidInput(f"sign must be +1 or -1, got {self.sign}")
        if self.multiplicity < 0:
            raise InvalidInput("multiplicity must be non-negative")


def chern_from_resolution(terms: Sequence[ResolutionTerm]) -> ChernData:
    """Return the Chern character of an alternating sum of line bundles.

    Parameters
    ----------
    terms : Sequence[ResolutionTerm]
        Line bundles with signs and multiplicities, all on one variety.

    Returns
    -------
    ChernData
        ch = sum(sign * multiplicity * exp(bundle)), truncated at dim V.

    """
    if not terms:
        raise InvalidInput("empty resolution")
    v = terms[0].bundle.variety
    total = ChowClass.zero(v)
    for term in terms:
        if term.bundle.variety != v:
            raise VarietyMismatch(f"{term.bundle.variety} vs {v}")
        total = total + term.bundle.exp().scale(term.sign * term.multiplicity)
    return ChernData.from_character(v, total)


def grr_pushforward(ch: ChernData) -> ChernData:
    """Return ch(pi_! F) = pi_*(ch(F) * Td(T_pi)) on P1.

    Raises
    ------
    WrongVariety
        For inputs on P1 or P2.

    """
    if not ch.variety.is_fibred:
        raise WrongVariety(f"no projection to P1 from {ch.variety}")
    pushed = push_forward(ch.character() * relative_todd_class(ch.variety))
    return ChernData.from_character(VarietyTag.p1(), pushed)


def euler_characteristic(ch: ChernData) -> Fraction:
    """Return chi = deg(ch * Td(V)).

    Raises
    ------
    NonIntegralResult
        When the degree is not an integer, which means inconsistent input.

    """
    chi = (ch.character() * total_todd_class(ch.variety)).top
    if chi.denominator != 1:
        raise NonIntegralResult(f"Euler characteristic {chi} for {ch}")
    return chi


def line_bundle_character(line: ChowClass) -> ChernData:
    """Return the Chern character of O(line)."""
    return ChernData.from_character(line.variety, line.exp())
