"""Monads O_pi(-1)^n -> O^(r+2n) -> O_pi(1)^n on the P2-bundles Y_{a,b}.

A monad is stored as the matrices A ((r+2n) x n) and B (n x (r+2n)) of Cox
polynomials of degree u. The same type carries the restricted monads on a
fiber P2, whose entries are linear forms in z0, z1, z2.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
from typing import Sequence

import numpy as np

from core.errors import InvalidInput, ShapeMismatch, SingularGroupElement, WrongVariety
from core.exact import (
    CoxPolynomial,
    RationalMatrix,
    Scalar,
    as_rational,
    cox_basis,
    cox_basis_polynomials,
    linear_combination,
    mat_inverse,
    mat_kernel,
    mat_rank,
    random_invertible,
)
from core.geom import (
    ChernData,
    ChowClass,
    ResolutionTerm,
    chern_from_resolution,
    euler_characteristic,
    grr_pushforward,
    hyperplane_class,
)
from core.strata import check_rank_range
from core.variety import VarietyKind, VarietyTag

PolyMatrix = tuple[tuple[CoxPolynomial, ...], ...]


def _shape(m: PolyMatrix) -> tuple[int, int]:
    return len(m), len(m[0]) if m else 0


def poly_matrix(
    variety: VarietyTag, rows: Sequence[Sequence[CoxPolynomial]]
) -> PolyMatrix:
    """Freeze nested rows of polynomials into a PolyMatrix."""
    frozen = tuple(tuple(row) for row in rows)
    if len({len(row) for row in frozen}) > 1:
        raise ShapeMismatch("ragged polynomial matrix")
    if any(p.variety != variety for row in frozen for p in row):
        raise InvalidInput(f"entries must live on {variety}")
    return frozen


def poly_matmul(left: PolyMatrix, right: PolyMatrix, variety: VarietyTag) -> PolyMatrix:
    """Return the product of two polynomial matrices."""
    rows, inner = _shape(left)
    inner_right, cols = _shape(right)
    if inner != inner_right:
        raise ShapeMismatch(f"product of {rows}x{inner} and {inner_right}x{cols}")
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            total = CoxPolynomial.zero(variety)
            for k in range(inner):
                if left[i][k].is_zero() or right[k][j].is_zero():
                    continue
                total = total + left[i][k] * right[k][j]
            row.append(total)
        out.append(tuple(row))
    return tuple(out)


def scalar_poly_matmul(
    m: RationalMatrix, p: PolyMatrix, variety: VarietyTag
) -> PolyMatrix:
    """Return m @ p for a rational matrix m."""
    if m.cols != len(p):
        raise ShapeMismatch(f"{m.shape} times {_shape(p)}")
    columns = list(zip(*p)) if p else []
    return tuple(
        tuple(linear_combination(col, m.row(i), variety) for col in columns)
        for i in range(m.rows)
    )


def poly_scalar_matmul(
    p: PolyMatrix, m: RationalMatrix, variety: VarietyTag
) -> PolyMatrix:
    """Return p @ m for a rational matrix m."""
    if _shape(p)[1] != m.rows:
        raise ShapeMismatch(f"{_shape(p)} times {m.shape}")
    return tuple(
        tuple(linear_combination(row, m.column(j), variety) for j in range(m.cols))
        for row in p
    )


def evaluate_matrix(m: PolyMatrix, point: Sequence[Scalar]) -> RationalMatrix:
    """Evaluate every entry at a point in Cox coordinates."""
    rows, cols = _shape(m)
    return RationalMatrix.from_rows(
        [[p.evaluate(point) for p in row] for row in m], cols=cols
    )


@dataclass(frozen=True)
class MonadData:
    """A pair (A, B) of degree-u matrices on Y_{a,b} (or on a fiber P2)."""

    variety: VarietyTag
    r: int
    n: int
    a_matrix: PolyMatrix
    b_matrix: PolyMatrix

    def __post_init__(self) -> None:
        """Validate shapes and degrees."""
        if self.variety.kind not in (VarietyKind.P2_BUNDLE, VarietyKind.P2):
            raise WrongVariety(f"monads live on Y_(a,b) or P2, not {self.variety}")
        if self.r < 0 or self.n < 0:
            raise InvalidInput("r and n must be non-negative")
        middle = self.r + 2 * self.n
        if len(self.a_matrix) != middle or any(
            len(row) != self.n for row in self.a_matrix
        ):
            raise ShapeMismatch(f"A must be {middle}x{self.n}")
        if len(self.b_matrix) != self.n or any(
            len(row) != middle for row in self.b_matrix
        ):
            raise ShapeMismatch(f"B must be {self.n}x{middle}")
        unit = self.variety.hyperplane_degree
        for row in self.a_matrix + self.b_matrix:
            for p in row:
                if p.variety != self.variety:
                    raise InvalidInput(f"entry {p} not on {self.variety}")
                if p.degree not in (None, unit):
                    raise InvalidInput(f"entry {p} has degree {p.degree}, need {unit}")

    @property
    def middle_rank(self) -> int:
        """Return r + 2n."""
        return self.r + 2 * self.n


@dataclass(frozen=True)
class ComposeCheck:
    """Outcome of the B*A = 0 test."""

    ok: bool
    residual: PolyMatrix


def monad_compose_check(m: MonadData) -> ComposeCheck:
    """Compute B*A in Gamma(O_pi(2)) and test that it vanishes identically."""
    residual = poly_matmul(m.b_matrix, m.a_matrix, m.variety)
    return ComposeCheck(all(p.is_zero() for row in residual for p in row), residual)


def _completion_kernel(
    variety: VarietyTag, r: int, n: int, a_matrix: PolyMatrix
) -> list[tuple[CoxPolynomial, ...]]:
    """Return a basis of rows beta with beta * A = 0."""
    middle = r + 2 * n
    sections = cox_basis_polynomials(variety, variety.hyperplane_degree)
    targets = cox_basis(variety, tuple(2 * d for d in variety.hyperplane_degree))
    target_index = {e: i for i, e in enumerate(targets)}
    unknowns = [(k, s) for k in range(middle) for s in sections]
    rows = [[Fraction(0)] * len(unknowns) for _ in range(n * len(targets))]
    for col, (k, section) in enumerate(unknowns):
        for j in range(n):
            product = section * a_matrix[k][j]
            for exps, coeff in product.terms:
                rows[j * len(targets) + target_index[exps]][col] = coeff
    kernel = mat_kernel(RationalMatrix.from_rows(rows, cols=len(unknowns)))
    basis = []
    for c in range(kernel.cols):
        vector = kernel.column(c)
        basis.append(
            tuple(
                linear_combination(
                    sections,
                    vector[k * len(sections) : (k + 1) * len(sections)],
                    variety,
                )
                for k in range(middle)
            )
        )
    return basis


def monad_complete(
    variety: VarietyTag, r: int, n: int, a_matrix: PolyMatrix
) -> list[MonadData]:
    """Return a basis of the solutions B of B*A = 0.

    Parameters
    ----------
    variety : VarietyTag
        Y_{a,b}.
    r, n : int
        Rank data of the monad.
    a_matrix : PolyMatrix
        The (r+2n) x n matrix A.

    Returns
    -------
    list[MonadData]
        One monad per basis vector: a single non-zero row of B holding a
        solution row, the other rows zero. The span is the full solution space.

    Notes
    -----
    The condition is linear in B's coefficients. Rows of the coefficient
    matrix are indexed by (column of A, monomial of degree 2u).

    """
    logger = logging.getLogger("monad")
    zero_row = tuple(CoxPolynomial.zero(variety) for _ in range(r + 2 * n))
    row_basis = _completion_kernel(variety, r, n, a_matrix)
    logger.debug("completion row space has dimension %s", len(row_basis))
    monads = []
    for i in range(n):
        for vector in row_basis:
            b_rows = tuple(vector if k == i else zero_row for k in range(n))
            monads.append(MonadData(variety, r, n, a_matrix, b_rows))
    return monads


def generic_completion(
    variety: VarietyTag,
    r: int,
    n: int,
    a_matrix: PolyMatrix,
    rng: np.random.Generator,
) -> MonadData:
    """Return a monad whose rows of B are independent random solution rows."""
    row_basis = _completion_kernel(variety, r, n, a_matrix)
    middle = r + 2 * n
    rows = []
    for _ in range(n):
        weights = [int(w) for w in rng.integers(-5, 6, size=len(row_basis))]
        rows.append(
            tuple(
                linear_combination([v[k] for v in row_basis], weights, variety)
                for k in range(middle)
            )
        )
    return MonadData(variety, r, n, a_matrix, tuple(rows))


def random_degree_u_matrix(
    variety: VarietyTag, rows: int, cols: int, rng: np.random.Generator
) -> PolyMatrix:
    """Return a matrix of random sections of O_pi(1) with small integer coefficients."""
    sections = cox_basis_polynomials(variety, variety.hyperplane_degree)
    return tuple(
        tuple(
            linear_combination(
                sections,
                [int(w) for w in rng.integers(-5, 6, size=len(sections))],
                variety,
            )
            for _ in range(cols)
        )
        for _ in range(rows)
    )


@dataclass(frozen=True)
class PointFailure:
    """A sampled point where A is not injective or B is not surjective."""

    point: tuple[Fraction, ...]
    which: str


@dataclass(frozen=True)
class PointwiseReport:
    """Summary of the sampled fiberwise rank checks."""

    a_injective: bool
    b_surjective: bool
    points_checked: int
    failures: tuple[PointFailure, ...]


def _special_points(v: VarietyTag) -> list[tuple[int, ...]]:
    """Return points of Lambda, coordinate fibers and coordinate-plane corners."""
    fiber_points = [
        (1, 0, 0),
        (0, 1, 0),
        (0, 0, 1),
        (0, 1, 1),
        (1, 0, 1),
        (1, 1, 0),
        (1, 1, 1),
    ]
    if v.kind == VarietyKind.P2:
        return fiber_points
    base_points = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2)]
    return [z + w for w in base_points for z in fiber_points]


def _random_point(v: VarietyTag, rng: np.random.Generator) -> tuple[int, ...]:
    # one coordinate per projective factor is fixed to 1, so the point never
    # lies on the irrelevant locus
    z = [int(x) for x in rng.integers(-9, 10, size=3)]
    z[int(rng.integers(0, 3))] = 1
    if v.kind == VarietyKind.P2:
        return tuple(z)
    w = [int(x) for x in rng.integers(-9, 10, size=2)]
    w[int(rng.integers(0, 2))] = 1
    return tuple(z + w)


def pointwise_check(m: MonadData, samples: int, seed: int) -> PointwiseReport:
    """Check injectivity of A_y and surjectivity of B_y at sampled points.

    Parameters
    ----------
    m : MonadData
        The monad.
    samples : int
        Number of pseudo-random points, on top of the deterministic set.
    seed : int
        Seed of the point sampler.

    Notes
    -----
    Degeneracy loci are closed, so a pass is a semi-decision only.

    """
    if samples < 1:
        raise InvalidInput("need at least one sample")
    rng = np.random.default_rng(seed)
    points = _special_points(m.variety)
    points += [_random_point(m.variety, rng) for _ in range(samples)]
    failures = []
    for point in points:
        if mat_rank(evaluate_matrix(m.a_matrix, point)) < m.n:
            failures.append(PointFailure(tuple(map(Fraction, point)), "A"))
        if mat_rank(evaluate_matrix(m.b_matrix, point)) < m.n:
            failures.append(PointFailure(tuple(map(Fraction, point)), "B"))
    return PointwiseReport(
        a_injective=not any(f.which == "A" for f in failures),
        b_surjective=not any(f.which == "B" for f in failures),
        points_checked=len(points),
        failures=tuple(failures),
    )


def _restrict_entry(p: CoxPolynomial, x: tuple[Fraction, Fraction]) -> CoxPolynomial:
    substituted = p.substitute({3: x[0], 4: x[1]})
    plane = VarietyTag.p2()
    return CoxPolynomial.from_mapping(
        plane, {exps[:3]: c for exps, c in substituted.terms}
    )


def restrict_to_fiber(m: MonadData, x: Sequence[Scalar]) -> MonadData:
    """Return the P2 monad obtained by fixing the base point (w0 : w1) = x."""
    if m.variety.kind != VarietyKind.P2_BUNDLE:
        raise WrongVariety(f"{m.variety} has no fibers over P1")
    point = (as_rational(x[0]), as_rational(x[1]))
    if point == (0, 0):
        raise InvalidInput("(0 : 0) is not a point of P1")
    return MonadData(
        VarietyTag.p2(),
        m.r,
        m.n,
        tuple(tuple(_restrict_entry(p, point) for p in row) for row in m.a_matrix),
        tuple(tuple(_restrict_entry(p, point) for p in row) for row in m.b_matrix),
    )


@dataclass(frozen=True)
class LambdaRestriction:
    """Constant matrices of the monad restricted to the section Lambda."""

    a_const: RationalMatrix
    b_const: RationalMatrix
    trivial_on_lambda: bool


def restrict_to_lambda(m: MonadData) -> LambdaRestriction:
    """Restrict the monad to Lambda = {z1 = z2 = 0}.

    O_pi(1) is trivial on Lambda, so every degree-u entry restricts to a
    constant multiple of z0 for all (a, b). The matrices are read off at
    z = (1, 0, 0) and the ranks are checked at three base points.
    """
    if m.variety.kind != VarietyKind.P2_BUNDLE:
        raise WrongVariety(f"{m.variety} has no section Lambda")
    samples = [(1, 0, 0, 1, 0), (1, 0, 0, 0, 1), (1, 0, 0, 1, 1)]
    a_const = evaluate_matrix(m.a_matrix, samples[0])
    b_const = evaluate_matrix(m.b_matrix, samples[0])
    trivial = all(
        mat_rank(evaluate_matrix(m.a_matrix, p)) == m.n
        and mat_rank(evaluate_matrix(m.b_matrix, p)) == m.n
        for p in samples
    )
    return LambdaRestriction(a_const, b_const, trivial)


@dataclass(frozen=True)
class LineReport:
    """Sampled restrictions to lines in fibers; jumping lines are listed."""

    lines_checked: int
    jumping: tuple[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], ...]

    @property
    def trivial(self) -> bool:
        """Return True when no sampled line was jumping."""
        return not self.jumping


def line_is_trivial(
    fiber_monad: MonadData, p: Sequence[Scalar], q: Sequence[Scalar]
) -> bool:
    """Return True if the monad cohomology is trivial on the line through p, q.

    On the line z = s*p + t*q the maps are A = s*A0 + t*A1, B = s*B0 + t*B1;
    the cohomology is trivial exactly when B0*A1 is invertible.
    """
    a1 = evaluate_matrix(fiber_monad.a_matrix, q)
    b0 = evaluate_matrix(fiber_monad.b_matrix, p)
    return mat_rank(b0 @ a1) == fiber_monad.n


def line_restriction_check(m: MonadData, samples: int, seed: int) -> LineReport:
    """Restrict to random fibers and then to random lines in them."""
    rng = np.random.default_rng(seed)
    jumping = []
    checked = 0
    while checked < samples:
        x = tuple(int(c) for c in rng.integers(-9, 10, size=2))
        p = tuple(int(c) for c in rng.integers(-9, 10, size=3))
        q = tuple(int(c) for c in rng.integers(-9, 10, size=3))
        line = RationalMatrix.from_rows([p, q])
        if x == (0, 0) or mat_rank(line) < 2:
            continue
        checked += 1
        if not line_is_trivial(restrict_to_fiber(m, x), p, q):
            jumping.append((x, p, q))
    return LineReport(checked, tuple(jumping))


def monad_terms(variety: VarietyTag, r: int, n: int) -> list[ResolutionTerm]:
    """Return O^(r+2n) - O_pi(-1)^n - O_pi(1)^n."""
    u = hyperplane_class(variety)
    return [
        ResolutionTerm(1, ChowClass.zero(variety), r + 2 * n),
        ResolutionTerm(-1, -u, n),
        ResolutionTerm(-1, u, n),
    ]


def monad_chern(
    variety: VarietyTag, r: int, n: int
) -> tuple[ChowClass, ChowClass, ChowClass]:
    """Return (c1, c2, c3) of the monad cohomology: (0, n*u^2, 0)."""
    return chern_from_resolution(monad_terms(variety, r, n)).chern_classes()


@dataclass(frozen=True)
class ExpectedDims:
    """Dimension counts for monads of type (a, b, r, n)."""

    m: int
    chi_end: int
    chi_end_computed: int
    corollary_count: int
    sections_o2: int
    extension_count: int

    @property
    def consistent(self) -> bool:
        """Return True when every count agrees with m."""
        return (
            self.corollary_count == self.m
            and self.extension_count == self.m
            and self.chi_end == self.chi_end_computed == 1 - self.m
        )


def expected_dims(a: int, b: int, r: int, n: int) -> ExpectedDims:
    """Return m = 2(1+a+b)nr - r^2 + 1 and the counts that must reproduce it.

    Returns
    -------
    ExpectedDims
        m, chi(End F) = 1 - m, chi(End F) computed by Riemann-Roch, the
        parameter count 2(3+a+b)n(r+2n) - h^0(O_pi(2)) n^2
        - [2n^2 + (r+2n)^2 - 1], h^0(O_pi(2)) = 6 + 4a + 4b and the extension
        count 2(a+b)nr + 2nr - (r^2 - 1).

    """
    check_rank_range(r, n)
    v = VarietyTag.p2_bundle(a, b)
    m = 2 * (1 + a + b) * n * r - r * r + 1
    sections_o1 = len(cox_basis(v, (1, 0)))
    sections_o2 = len(cox_basis(v, (2, 0)))
    middle = r + 2 * n
    corollary = (
        2 * sections_o1 * n * middle
        - sections_o2 * n * n
        - (2 * n * n + middle * middle - 1)
    )
    f = chern_from_resolution(monad_terms(v, r, n))
    return ExpectedDims(
        m=m,
        chi_end=1 - m,
        chi_end_computed=int(euler_characteristic(f.endomorphisms())),
        corollary_count=corollary,
        sections_o2=sections_o2,
        extension_count=2 * (a + b) * n * r + 2 * n * r - (r * r - 1),
    )


class FamilyKind(Enum):
    """Example families with explicit resolutions."""

    F0_FT = "ft"
    SERRE_RANK2 = "iz"


@dataclass(frozen=True)
class FamilyReport:
    """Chern data of an example family, with the asserted c2 where one is stated."""

    kind: FamilyKind
    chern: ChernData
    c1: ChowClass
    c2: ChowClass
    c3: ChowClass
    asserted_c2: ChowClass | None


def family_chern(kind: FamilyKind, variety: VarietyTag, n: int, r: int = 2) -> FamilyReport:
    """Return the Chern data of F_t or of the rank-2 Serre extension.

    F_t: 0 -> O_pi(-n-1) -> O^(r-1) + O_pi(-1) + O_pi(-n) -> F_t -> 0.
    Serre: 0 -> O_pi(-1) -> F -> I_Z(1) -> 0 with Z a union of n sections,
    each cut out by two divisors of class u; its structure sheaf contributes
    the Koszul terms O - 2 O(-u) + O(-2u), twisted by u.
    """
    if variety.kind != VarietyKind.P2_BUNDLE:
        raise WrongVariety(f"example families live on Y_(a,b), not {variety}")
    if n < 0 or r < 1:
        raise InvalidInput(f"need n >= 0 and r >= 1, got n={n}, r={r}")
    u = hyperplane_class(variety)
    zero = ChowClass.zero(variety)
    asserted = None
    if kind == FamilyKind.F0_FT:
        terms = [
            ResolutionTerm(1, zero, r - 1),
            ResolutionTerm(1, -u),
            ResolutionTerm(1, u.scale(-n)),
            ResolutionTerm(-1, u.scale(-n - 1)),
        ]
    else:
        terms = [
            ResolutionTerm(1, -u),
            ResolutionTerm(1, u),
            ResolutionTerm(-1, u, n),
            ResolutionTerm(1, zero, 2 * n),
            ResolutionTerm(-1, -u, n),
        ]
        asserted = (u * u).scale(n)
    chern = chern_from_resolution(terms)
    c1, c2, c3 = chern.chern_classes()
    return FamilyReport(kind, chern, c1, c2, c3, asserted)


@dataclass(frozen=True)
class DirectImage:
    """Rank and degree of R^1 pi_* F(twist) from GRR, with the expected splitting."""

    twist: int
    rank: int
    degree: Fraction
    expected_splitting: tuple[int, ...]

    @property
    def consistent(self) -> bool:
        """Return True when GRR matches the expected splitting."""
        return self.rank == len(self.expected_splitting) and self.degree == sum(
            self.expected_splitting
        )


def relative_direct_images(a: int, b: int, r: int, n: int) -> list[DirectImage]:
    """Return R^1 pi_* of F(-1) and F(-2) for the monad cohomology F.

    pi_* and R^2 pi_* vanish for these twists, so R^1 pi_* = -pi_! and its
    rank and degree are read off from GRR. The expected splittings are
    O^n and O(-a-b)^n.
    """
    v = VarietyTag.p2_bundle(a, b)
    f = chern_from_resolution(monad_terms(v, r, n))
    u = hyperplane_class(v)
    images = []
    for twist, degree in ((-1, 0), (-2, -(a + b))):
        pushed = grr_pushforward(f.twist(u.scale(twist)))
        images.append(
            DirectImage(twist, -pushed.rank, -pushed.ch1.top, (degree,) * n)
        )
    return images


@dataclass(frozen=True)
class GroupElementG:
    """An element (g1, g, g2) of GL_n x GL_(r+2n) x GL_n."""

    g1: RationalMatrix
    g: RationalMatrix
    g2: RationalMatrix

    def __post_init__(self) -> None:
        """Check that every component is square and invertible."""
        for name, m in (("g1", self.g1), ("g", self.g), ("g2", self.g2)):
            if not m.is_square or mat_rank(m) < m.rows:
                raise SingularGroupElement(f"{name} is not invertible")

    @classmethod
    def identity(cls, r: int, n: int) -> "GroupElementG":
        """Return the identity element."""
        ident = RationalMatrix.identity
        return cls(ident(n), ident(r + 2 * n), ident(n))


def random_group_element(r: int, n: int, rng: np.random.Generator) -> GroupElementG:
    """Return a random element of G."""
    return GroupElementG(
        random_invertible(n, rng),
        random_invertible(r + 2 * n, rng),
        random_invertible(n, rng),
    )


def group_act(g: GroupElementG, m: MonadData) -> MonadData:
    """Return (g A g1^-1, g2 B g^-1).

    B'A' = g2 (BA) g1^-1, so the result is a monad exactly when m is one;
    this is asserted on every call.
    """
    if g.g1.rows != m.n or g.g2.rows != m.n or g.g.rows != m.middle_rank:
        raise ShapeMismatch("group element does not match the monad")
    v = m.variety
    a_new = poly_scalar_matmul(
        scalar_poly_matmul(g.g, m.a_matrix, v), mat_inverse(g.g1), v
    )
    b_new = poly_scalar_matmul(
        scalar_poly_matmul(g.g2, m.b_matrix, v), mat_inverse(g.g), v
    )
    result = MonadData(v, m.r, m.n, a_new, b_new)
    assert monad_compose_check(result).ok == monad_compose_check(m).ok, "B*A = 0 not preserved"
    return result


def pullback_p2_monad(variety: VarietyTag) -> MonadData:
    """Return A = (z0, z1, z2, 0)^T, B = (-z1, z0, 0, z2) with n = 1, r = 2.

    Only defined where z1 and z2 have degree u, i.e. on Y_{0,0} and on P2.
    """
    if variety.kind == VarietyKind.P2_BUNDLE and (variety.a or variety.b):
        raise WrongVariety("the pulled-back P2 monad needs a = b = 0")
    z0, z1, z2 = (CoxPolynomial.variable(variety, f"z{i}") for i in range(3))
    zero = CoxPolynomial.zero(variety)
    return MonadData(
        variety,
        2,
        1,
        ((z0,), (z1,), (z2,), (zero,)),
        ((-z1, z0, zero, z2),),
    )
