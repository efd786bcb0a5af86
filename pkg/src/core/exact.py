"""Exact rational matrices, Cox-ring polynomials and linear algebra.

Scalars are `fractions.Fraction`. Elimination runs through sympy's
`DomainMatrix` over ZZ with the fraction-free Gauss-Jordan method, after
clearing denominators row by row; polynomial products run in a sympy sparse
polynomial ring over QQ.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from itertools import combinations
import math
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement, PolyRing, ring

from core.errors import (
    GenericityFailure,
    InconsistentSystem,
    InvalidInput,
    ShapeMismatch,
    SingularMatrix,
    VarietyMismatch,
)
from core.variety import VarietyTag

Rational = Fraction
Scalar = int | Fraction

MAX_DRAWS = 1000


def as_rational(value: Scalar | str) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise InvalidInput(f"refusing inexact scalar {value!r}")
    return Fraction(value)


@dataclass(frozen=True)
class RationalMatrix:
    """A dense matrix of Fractions stored row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        """Check the entry count."""
        if self.rows < 0 or self.cols < 0:
            raise ShapeMismatch(f"negative shape {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeMismatch(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[Scalar | str]], cols: int | None = None
    ) -> "RationalMatrix":
        """Build a matrix from nested rows; `cols` is needed when there are no rows."""
        width = len(rows[0]) if rows else (cols or 0)
        if any(len(row) != width for row in rows):
            raise ShapeMismatch("ragged rows")
        entries = tuple(as_rational(x) for row in rows for x in row)
        return cls(len(rows), width, entries)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        """Return the zero matrix."""
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, size: int) -> "RationalMatrix":
        """Return the identity matrix."""
        return cls.diagonal([Fraction(1)] * size)

    @classmethod
    def diagonal(cls, values: Sequence[Scalar]) -> "RationalMatrix":
        """Return the diagonal matrix with the given entries."""
        size = len(values)
        entries = [Fraction(0)] * (size * size)
        for i, value in enumerate(values):
            entries[i * size + i] = as_rational(value)
        return cls(size, size, tuple(entries))

    @classmethod
    def from_domain(cls, dm: DomainMatrix) -> "RationalMatrix":
        """Convert a sympy DomainMatrix over QQ or ZZ."""
        rows, cols = dm.shape
        return cls(
            rows, cols, tuple(_to_fraction(x) for row in dm.to_list() for x in row)
        )

    def to_domain(self) -> DomainMatrix:
        """Convert to a sympy DomainMatrix over QQ."""
        return DomainMatrix(
            [[QQ(x.numerator, x.denominator) for x in row] for row in self.to_rows()],
            (self.rows, self.cols),
            QQ,
        )

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        """Return the entry at (row, col)."""
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        """Return row i."""
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[Fraction, ...]:
        """Return column j."""
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[Fraction]]:
        """Return the rows as nested lists."""
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        """Return (rows, cols)."""
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        """Return True for square matrices."""
        return self.rows == self.cols

    def is_zero(self) -> bool:
        """Return True if every entry vanishes."""
        return not any(self.entries)

    def transpose(self) -> "RationalMatrix":
        """Return the transpose."""
        return RationalMatrix(
            self.cols,
            self.rows,
            tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)),
        )

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "RationalMatrix":
        """Return rows r0:r1 and columns c0:c1."""
        rows = [self.row(i)[c0:c1] for i in range(r0, r1)]
        return RationalMatrix.from_rows(rows, cols=c1 - c0)

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        """Concatenate columns."""
        if self.rows != other.rows:
            raise ShapeMismatch(f"hstack of {self.shape} and {other.shape}")
        rows = [self.row(i) + other.row(i) for i in range(self.rows)]
        return RationalMatrix.from_rows(rows, cols=self.cols + other.cols)

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        """Concatenate rows."""
        if self.cols != other.cols:
            raise ShapeMismatch(f"vstack of {self.shape} and {other.shape}")
        return RationalMatrix(
            self.rows + other.rows, self.cols, self.entries + other.entries
        )

    def scale(self, factor: Scalar) -> "RationalMatrix":
        """Multiply every entry by a scalar."""
        f = as_rational(factor)
        return RationalMatrix(self.rows, self.cols, tuple(f * x for x in self.entries))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        """Add entrywise."""
        if self.shape != other.shape:
            raise ShapeMismatch(f"sum of {self.shape} and {other.shape}")
        return RationalMatrix(
            self.rows,
            self.cols,
            tuple(x + y for x, y in zip(self.entries, other.entries)),
        )

    def __neg__(self) -> "RationalMatrix":
        """Negate entrywise."""
        return self.scale(-1)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        """Subtract entrywise."""
        return self + (-other)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        """Return the matrix product."""
        if self.cols != other.rows:
            raise ShapeMismatch(f"product of {self.shape} and {other.shape}")
        if 0 in (self.rows, self.cols, other.cols):
            return RationalMatrix.zeros(self.rows, other.cols)
        return RationalMatrix.from_domain(self.to_domain() * other.to_domain())


def _to_fraction(x: object) -> Fraction:
    # QQ elements expose numerator/denominator; ZZ elements are int-like
    if hasattr(x, "denominator"):
        return Fraction(int(x.numerator), int(x.denominator))  # type: ignore[attr-defined]
    return Fraction(int(x))  # type: ignore[call-overload]


def _integer_rows(m: RationalMatrix) -> DomainMatrix:
    rows = []
    for i in range(m.rows):
        row = m.row(i)
        scale = math.lcm(*(x.denominator for x in row)) if row else 1
        rows.append([ZZ(int(x * scale)) for x in row])
    return DomainMatrix(rows, m.shape, ZZ)


def _rref(m: RationalMatrix) -> tuple[RationalMatrix, tuple[int, ...]]:
    """Return the reduced row echelon form and the pivot columns."""
    if m.rows == 0 or m.cols == 0:
        return m, ()
    reduced, den, pivots = _integer_rows(m).rref_den(method="FF")
    d = int(den)
    rows = [[Fraction(int(x), d) for x in row] for row in reduced.to_list()]
    return RationalMatrix.from_rows(rows), tuple(pivots)


def mat_rank(m: RationalMatrix) -> int:
    """Return the exact rank over the rationals."""
    return len(_rref(m)[1])


def mat_kernel(m: RationalMatrix) -> RationalMatrix:
    """Return a kernel basis as the columns of a matrix.

    Parameters
    ----------
    m : RationalMatrix
        Any matrix.

    Returns
    -------
    RationalMatrix
        A cols(m) x (cols(m) - rank(m)) matrix in reduced column echelon form.

    """
    reduced, pivots = _rref(m)
    free = [j for j in range(m.cols) if j not in pivots]
    if not free:
        return RationalMatrix.zeros(m.cols, 0)
    vectors = []
    for f in free:
        vector = [Fraction(0)] * m.cols
        vector[f] = Fraction(1)
        for i, p in enumerate(pivots):
            vector[p] = -reduced[i, f]
        vectors.append(vector)
    echelon, _ = _rref(RationalMatrix.from_rows(vectors))
    return echelon.transpose()


def mat_inverse(m: RationalMatrix) -> RationalMatrix:
    """Return the inverse of a square matrix.

    Raises
    ------
    SingularMatrix
        When the rank is below the size.

    """
    if not m.is_square:
        raise ShapeMismatch(f"cannot invert a {m.rows}x{m.cols} matrix")
    n = m.rows
    if n == 0:
        return m
    reduced, pivots = _rref(m.hstack(RationalMatrix.identity(n)))
    if pivots[:n] != tuple(range(n)):
        raise SingularMatrix(f"rank {sum(p < n for p in pivots)} < {n}")
    return reduced.submatrix(0, n, n, 2 * n)


def mat_solve(m: RationalMatrix, rhs: RationalMatrix) -> RationalMatrix:
    """Return one solution X of m @ X = rhs, free variables set to zero.

    Raises
    ------
    InconsistentSystem
        When some column of rhs is outside the column space of m.

    """
    if m.rows != rhs.rows:
        raise ShapeMismatch(f"system {m.shape} with right-hand side {rhs.shape}")
    reduced, pivots = _rref(m.hstack(rhs))
    if any(p >= m.cols for p in pivots):
        raise InconsistentSystem("right-hand side is not in the column space")
    solution = [[Fraction(0)] * rhs.cols for _ in range(m.cols)]
    for i, p in enumerate(pivots):
        for j in range(rhs.cols):
            solution[p][j] = reduced[i, m.cols + j]
    return RationalMatrix.from_rows(solution, cols=rhs.cols)


def random_int_matrix(rows: int, cols: int, rng: np.random.Generator) -> RationalMatrix:
    """Return a matrix of random integers in [-5, 5]."""
    return RationalMatrix.from_rows(
        [[int(x) for x in rng.integers(-5, 6, size=cols)] for _ in range(rows)],
        cols=cols,
    )


def random_invertible(
    size: int, rng: np.random.Generator, max_draws: int = MAX_DRAWS
) -> RationalMatrix:
    """Return a random invertible integer matrix.

    Raises
    ------
    GenericityFailure
        When max_draws matrices in a row are singular.

    """
    for _ in range(max_draws):
        m = random_int_matrix(size, size, rng)
        if mat_rank(m) == size:
            return m
    raise GenericityFailure("invertible matrix", max_draws)


# Cox-ring polynomials


@cache
def cox_ring(variety: VarietyTag) -> PolyRing:
    """Return the sympy polynomial ring over QQ in the Cox variables."""
    r, *_ = ring(",".join(variety.cox_variables), QQ)
    return r


def multidegree(variety: VarietyTag, exponents: Sequence[int]) -> tuple[int, ...]:
    """Return the Picard degree of a Cox monomial."""
    grading = variety.cox_grading
    width = len(grading[0])
    return tuple(
        sum(e * deg[k] for e, deg in zip(exponents, grading)) for k in range(width)
    )


@dataclass(frozen=True)
class CoxPolynomial:
    """A homogeneous polynomial in the Cox ring of a model variety.

    `terms` is sorted by exponent vector and never holds a zero coefficient,
    so equal polynomials compare equal.
    """

    variety: VarietyTag
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self) -> None:
        """Validate the exponent vectors and homogeneity."""
        width = len(self.variety.cox_variables)
        degrees = set()
        for exps, coeff in self.terms:
            if len(exps) != width or min(exps) < 0:
                raise InvalidInput(f"bad exponent vector {exps} for {self.variety}")
            if coeff == 0:
                raise InvalidInput("zero coefficient stored in a CoxPolynomial")
            degrees.add(multidegree(self.variety, exps))
        if len(degrees) > 1:
            raise InvalidInput(f"inhomogeneous polynomial with degrees {degrees}")
        if len({exps for exps, _ in self.terms}) != len(self.terms):
            raise InvalidInput("duplicate exponent vectors")

    @classmethod
    def from_mapping(
        cls, variety: VarietyTag, mapping: Mapping[tuple[int, ...], Scalar]
    ) -> "CoxPolynomial":
        """Build a polynomial from {exponents: coefficient}, dropping zeros."""
        terms = sorted(
            (tuple(exps), as_rational(c)) for exps, c in mapping.items() if c != 0
        )
        return cls(variety, tuple(terms))

    @classmethod
    def zero(cls, variety: VarietyTag) -> "CoxPolynomial":
        """Return the zero polynomial (of every degree)."""
        return cls(variety, ())

    @classmethod
    def monomial(
        cls, variety: VarietyTag, exponents: Sequence[int], coeff: Scalar = 1
    ) -> "CoxPolynomial":
        """Return coeff times a single monomial."""
        return cls.from_mapping(variety, {tuple(exponents): coeff})

    @classmethod
    def variable(cls, variety: VarietyTag, name: str) -> "CoxPolynomial":
        """Return the Cox variable with the given name."""
        names = variety.cox_variables
        if name not in names:
            raise InvalidInput(f"{name!r} is not a Cox variable of {variety}")
        return cls.monomial(variety, [int(v == name) for v in names])

    @property
    def degree(self) -> tuple[int, ...] | None:
        """Return the Picard degree, or None for the zero polynomial."""
        if not self.terms:
            return None
        return multidegree(self.variety, self.terms[0][0])

    def is_zero(self) -> bool:
        """Return True for the zero polynomial."""
        return not self.terms

    def to_poly(self) -> PolyElement:
        """Return the sympy ring element."""
        r = cox_ring(self.variety)
        return r.from_dict(
            {exps: QQ(c.numerator, c.denominator) for exps, c in self.terms}
        )

    @classmethod
    def from_poly(cls, variety: VarietyTag, poly: PolyElement) -> "CoxPolynomial":
        """Convert a sympy ring element back."""
        return cls.from_mapping(
            variety, {tuple(exps): _to_fraction(c) for exps, c in poly.items()}
        )

    def _check(self, other: "CoxPolynomial") -> None:
        if self.variety != other.variety:
            raise VarietyMismatch(f"{self.variety} vs {other.variety}")

    def __add__(self, other: "CoxPolynomial") -> "CoxPolynomial":
        """Add two polynomials of the same degree."""
        self._check(other)
        return CoxPolynomial.from_poly(self.variety, self.to_poly() + other.to_poly())

    def __neg__(self) -> "CoxPolynomial":
        """Negate."""
        return self.scale(-1)

    def __sub__(self, other: "CoxPolynomial") -> "CoxPolynomial":
        """Subtract two polynomials of the same degree."""
        return self + (-other)

    def __mul__(self, other: "CoxPolynomial") -> "CoxPolynomial":
        """Multiply; see `cox_multiply`."""
        return cox_multiply(self, other)

    def scale(self, factor: Scalar) -> "CoxPolynomial":
        """Multiply by a rational scalar."""
        f = as_rational(factor)
        if f == 0:
            return CoxPolynomial.zero(self.variety)
        return CoxPolynomial(self.variety, tuple((e, f * c) for e, c in self.terms))

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        """Return the coefficient of one monomial."""
        return dict(self.terms).get(tuple(exponents), Fraction(0))

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        """Evaluate at a point given in Cox coordinates."""
        values = [as_rational(x) for x in point]
        if len(values) != len(self.variety.cox_variables):
            raise ShapeMismatch(f"point {point} has the wrong length")
        total = Fraction(0)
        for exps, coeff in self.terms:
            total += coeff * math.prod(v**e for v, e in zip(values, exps))
        return total

    def substitute(self, values: Mapping[int, Scalar]) -> "CoxPolynomial":
        """Substitute constants for some variables, keeping the exponent layout.

        Substituted positions get exponent 0 in the result, so the result is
        homogeneous only in the remaining variables.
        """
        collected: dict[tuple[int, ...], Fraction] = {}
        for exps, coeff in self.terms:
            factor = coeff
            reduced = list(exps)
            for index, value in values.items():
                factor *= as_rational(value) ** exps[index]
                reduced[index] = 0
            key = tuple(reduced)
            collected[key] = collected.get(key, Fraction(0)) + factor
        return _unchecked(self.variety, collected)

    def __str__(self) -> str:
        """Return a readable form such as `2*z0*w1 - z1`."""
        return str(self.to_poly().as_expr()) if self.terms else "0"


def _unchecked(
    variety: VarietyTag, mapping: Mapping[tuple[int, ...], Fraction]
) -> CoxPolynomial:
    # skips the homogeneity check for partially evaluated polynomials
    poly = object.__new__(CoxPolynomial)
    object.__setattr__(poly, "variety", variety)
    object.__setattr__(
        poly, "terms", tuple(sorted((e, c) for e, c in mapping.items() if c != 0))
    )
    return poly


def cox_multiply(p: CoxPolynomial, q: CoxPolynomial) -> CoxPolynomial:
    """Return the exact product of two Cox polynomials on one variety."""
    if p.variety != q.variety:
        raise VarietyMismatch(f"{p.variety} vs {q.variety}")
    return CoxPolynomial.from_poly(p.variety, p.to_poly() * q.to_poly())


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Yield the ways to write `total` as an ordered sum of `parts` naturals."""
    if total < 0 or parts <= 0:
        return
    for bars in combinations(range(total + parts - 1), parts - 1):
        edges = (-1, *bars, total + parts - 1)
        yield tuple(edges[i + 1] - edges[i] - 1 for i in range(parts))


def cox_basis(variety: VarietyTag, degree: Sequence[int]) -> list[tuple[int, ...]]:
    """Return every Cox monomial of the given Picard degree.

    Parameters
    ----------
    variety : VarietyTag
        One of the model varieties.
    degree : Sequence[int]
        (d,) on P1/P2; (k, l) meaning k*u + l*(fiber class) on the bundles.

    Returns
    -------
    list[tuple[int, ...]]
        Sorted exponent vectors; empty when the degree is not effective.

    """
    degree = tuple(degree)
    if len(degree) != len(variety.cox_grading[0]):
        raise InvalidInput(f"degree {degree} does not match {variety}")
    if not variety.is_fibred:
        return sorted(compositions(degree[0], len(variety.cox_variables)))
    k, l = degree
    monomials = []
    for fiber in compositions(k, variety.fiber_variable_count):
        base_degree = l + sum(e * s for e, s in zip(fiber, variety.fiber_shifts))
        monomials.extend(fiber + base for base in compositions(base_degree, 2))
    return sorted(monomials)


def cox_basis_polynomials(
    variety: VarietyTag, degree: Sequence[int]
) -> list[CoxPolynomial]:
    """Return `cox_basis` as monomial polynomials."""
    return [CoxPolynomial.monomial(variety, e) for e in cox_basis(variety, degree)]


def linear_combination(
    polys: Iterable[CoxPolynomial], coeffs: Iterable[Scalar], variety: VarietyTag
) -> CoxPolynomial:
    """Return sum(c * p)."""
    total = CoxPolynomial.zero(variety)
    for p, c in zip(polys, coeffs):
        if c:
            total = total + p.scale(c)
    return total
