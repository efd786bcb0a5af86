"""Model varieties: P1, P2, Hirzebruch surfaces and P2-bundles over P1.

A `VarietyTag` carries everything the other modules need to know about a
model variety: its Cox variables with their Picard degrees, the monomial
basis of its intersection ring and the rule that brings any monomial in the
ring generators to that basis.
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from core.errors import InvalidInput


class VarietyKind(Enum):
    """Enumeration of the model varieties."""

    P1 = "p1"
    P2 = "p2"
    HIRZEBRUCH = "hirzebruch"
    P2_BUNDLE = "p2bundle"


@dataclass(frozen=True)
class VarietyTag:
    """A model variety with its parameters.

    Parameters
    ----------
    kind : VarietyKind
        Which family the variety belongs to.
    ell : int
        The twist of the Hirzebruch surface Y_ell = P(O + O(-ell)).
    a, b : int
        The twists of the P2-bundle Y_{a,b} = P(O + O(-a) + O(-b)), 0 <= a <= b.

    """

    kind: VarietyKind
    ell: int = 0
    a: int = 0
    b: int = 0

    def __post_init__(self) -> None:
        """Validate the parameter bounds."""
        if self.ell < 0:
            raise InvalidInput(f"Hirzebruch twist must be >= 0, got {self.ell}")
        if not 0 <= self.a <= self.b:
            raise InvalidInput(f"need 0 <= a <= b, got a={self.a} b={self.b}")
        if self.kind != VarietyKind.HIRZEBRUCH and self.ell != 0:
            raise InvalidInput("ell is only meaningful for Hirzebruch surfaces")
        if self.kind != VarietyKind.P2_BUNDLE and (self.a or self.b):
            raise InvalidInput("a, b are only meaningful for P2-bundles")

    @classmethod
    def p1(cls) -> "VarietyTag":
        """Return the projective line."""
        return cls(VarietyKind.P1)

    @classmethod
    def p2(cls) -> "VarietyTag":
        """Return the projective plane."""
        return cls(VarietyKind.P2)

    @classmethod
    def hirzebruch(cls, ell: int) -> "VarietyTag":
        """Return the Hirzebruch surface Y_ell."""
        return cls(VarietyKind.HIRZEBRUCH, ell=ell)

    @classmethod
    def p2_bundle(cls, a: int, b: int) -> "VarietyTag":
        """Return the P2-bundle Y_{a,b}."""
        return cls(VarietyKind.P2_BUNDLE, a=a, b=b)

    @classmethod
    def parse(cls, text: str) -> "VarietyTag":
        """Parse `p1`, `p2`, `hirzebruch:ELL` or `p2bundle:A,B`."""
        name, _, params = text.strip().lower().partition(":")
        try:
            kind = VarietyKind(name)
            values = [int(p) for p in params.split(",")] if params else []
        except ValueError as e:
            raise InvalidInput(f"unknown variety {text!r}") from e
        if kind == VarietyKind.HIRZEBRUCH and len(values) == 1:
            return cls.hirzebruch(values[0])
        if kind == VarietyKind.P2_BUNDLE and len(values) == 2:
            return cls.p2_bundle(values[0], values[1])
        if kind in (VarietyKind.P1, VarietyKind.P2) and not values:
            return cls(kind)
        raise InvalidInput(f"wrong parameters for variety {text!r}")

    def __str__(self) -> str:
        """Return the textual form accepted by `parse`."""
        if self.kind == VarietyKind.HIRZEBRUCH:
            return f"hirzebruch:{self.ell}"
        if self.kind == VarietyKind.P2_BUNDLE:
            return f"p2bundle:{self.a},{self.b}"
        return self.kind.value

    @property
    def dim(self) -> int:
        """Return the complex dimension."""
        return {
            VarietyKind.P1: 1,
            VarietyKind.P2: 2,
            VarietyKind.HIRZEBRUCH: 2,
            VarietyKind.P2_BUNDLE: 3,
        }[self.kind]

    @property
    def is_fibred(self) -> bool:
        """Return True for the projective bundles over P1."""
        return self.kind in (VarietyKind.HIRZEBRUCH, VarietyKind.P2_BUNDLE)

    @property
    def fiber_dim(self) -> int:
        """Return the relative dimension over P1 (fibred varieties only)."""
        return self.dim - 1

    @property
    def twist_sum(self) -> int:
        """Return ell on Y_ell and a+b on Y_{a,b}; the self-intersection u^dim."""
        return self.ell + self.a + self.b

    @cached_property
    def cox_variables(self) -> tuple[str, ...]:
        """Return the Cox variable names, fiber variables first."""
        return {
            VarietyKind.P1: ("w0", "w1"),
            VarietyKind.P2: ("z0", "z1", "z2"),
            VarietyKind.HIRZEBRUCH: ("y0", "y1", "w0", "w1"),
            VarietyKind.P2_BUNDLE: ("z0", "z1", "z2", "w0", "w1"),
        }[self.kind]

    @cached_property
    def cox_grading(self) -> tuple[tuple[int, ...], ...]:
        """Return the Picard degree of every Cox variable.

        Notes
        -----
        On Y_ell the degrees are written in the basis (u, f), on Y_{a,b} in
        (u, v); y1 has degree u - ell*f, z1 and z2 have degrees u - a*v and
        u - b*v, which reproduces pi_* O_pi(1) = O + O(ell), resp.
        O + O(a) + O(b).

        """
        if self.kind == VarietyKind.HIRZEBRUCH:
            return ((1, 0), (1, -self.ell), (0, 1), (0, 1))
        if self.kind == VarietyKind.P2_BUNDLE:
            return ((1, 0), (1, -self.a), (1, -self.b), (0, 1), (0, 1))
        return tuple((1,) for _ in self.cox_variables)

    @property
    def fiber_variable_count(self) -> int:
        """Return how many Cox variables carry the O_pi(1) degree."""
        return len(self.cox_variables) - 2 if self.is_fibred else 0

    @cached_property
    def fiber_shifts(self) -> tuple[int, ...]:
        """Return the base twists of the fiber variables (0, ell) or (0, a, b)."""
        if not self.is_fibred:
            return ()
        return tuple(-deg[1] for deg in self.cox_grading[: self.fiber_variable_count])

    @property
    def hyperplane_degree(self) -> tuple[int, ...]:
        """Return the degree of O_pi(1) (or O(1) on projective spaces)."""
        return (1, 0) if self.is_fibred else (1,)

    # intersection ring

    @cached_property
    def ring_generators(self) -> tuple[str, ...]:
        """Return the names of the divisor generators of the intersection ring."""
        return {
            VarietyKind.P1: ("pt",),
            VarietyKind.P2: ("h",),
            VarietyKind.HIRZEBRUCH: ("u", "f"),
            VarietyKind.P2_BUNDLE: ("u", "v"),
        }[self.kind]

    @cached_property
    def chow_basis(self) -> tuple[str, ...]:
        """Return the names of the monomial basis of the intersection ring."""
        return {
            VarietyKind.P1: ("1", "pt"),
            VarietyKind.P2: ("1", "h", "h2"),
            VarietyKind.HIRZEBRUCH: ("1", "u", "f", "pt"),
            VarietyKind.P2_BUNDLE: ("1", "u", "v", "u2", "uv", "pt"),
        }[self.kind]

    @cached_property
    def chow_exponents(self) -> tuple[tuple[int, ...], ...]:
        """Return the generator exponents of each basis monomial."""
        return {
            VarietyKind.P1: ((0,), (1,)),
            VarietyKind.P2: ((0,), (1,), (2,)),
            VarietyKind.HIRZEBRUCH: ((0, 0), (1, 0), (0, 1), (1, 1)),
            VarietyKind.P2_BUNDLE: (
                (0, 0),
                (1, 0),
                (0, 1),
                (2, 0),
                (1, 1),
                (2, 1),
            ),
        }[self.kind]

    @cached_property
    def chow_degrees(self) -> tuple[int, ...]:
        """Return the codimension of each basis monomial."""
        return tuple(sum(e) for e in self.chow_exponents)

    @property
    def fiber_class_name(self) -> str:
        """Return the name of the pulled-back point class of P1."""
        if self.kind == VarietyKind.HIRZEBRUCH:
            return "f"
        if self.kind == VarietyKind.P2_BUNDLE:
            return "v"
        raise InvalidInput(f"{self} is not fibred over P1")

    def normal_form(self, exponents: tuple[int, ...]) -> tuple[int, int] | None:
        """Reduce a monomial in the ring generators to (basis index, coefficient).

        Returns None when the monomial vanishes. The relations are
        f^2 = 0, u^2 = ell*pt on Y_ell and v^2 = 0, u^3 = (a+b)*pt on Y_{a,b}.
        """
        if sum(exponents) > self.dim:
            return None
        if exponents in self.chow_exponents:
            return self.chow_exponents.index(exponents), 1
        if not self.is_fibred or exponents[1] >= 2:
            return None
        # the only surviving monomial outside the basis is u^dim
        return len(self.chow_basis) - 1, self.twist_sum
