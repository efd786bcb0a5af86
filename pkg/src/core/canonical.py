"""Canonical forms of the extension data (U, V) under Aut(L) and the torus.

A point of the extension space is a pair of r x n matrices (left, right)
whose columns are coefficients of a polynomial modulo prod(z - x_i). The
top r1 rows of each half form U, the bottom r2 rows form V. Aut(L) acts by

    U' = A U + H0 V + H1 shift(V),    V' = B V,

where shift is multiplication by z modulo prod(z - x_i). The torus acts by
scaling the value at x_i, i.e. diagonally in the evaluation basis.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
import logging
from typing import Sequence

import numpy as np
from sympy import QQ
from sympy.polys.rings import ring

from core.errors import (
    GenericityFailure,
    InvalidInput,
    ShapeMismatch,
    SingularGroupElement,
    SingularMatrix,
    TooFewColumns,
    ZeroEvaluationEntry,
)
from core.exact import (
    MAX_DRAWS,
    RationalMatrix,
    Scalar,
    as_rational,
    mat_inverse,
    mat_kernel,
    mat_rank,
    mat_solve,
    random_int_matrix,
    random_invertible,
)
from core.strata import check_rank_range, generic_split


@dataclass(frozen=True)
class PointConfig:
    """n distinct points x_1, ..., x_n of the affine line."""

    xs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        """Coerce to Fractions and reject repeated points."""
        object.__setattr__(self, "xs", tuple(as_rational(x) for x in self.xs))
        if not self.xs:
            raise InvalidInput("need at least one point")
        if len(set(self.xs)) != len(self.xs):
            raise InvalidInput(f"points must be distinct, got {self.xs}")

    @property
    def n(self) -> int:
        """Return the number of points."""
        return len(self.xs)

    @cached_property
    def elementary(self) -> tuple[Fraction, ...]:
        """Return (s_1, ..., s_n) with prod(z - x_i) = z^n - s_1 z^(n-1) + ..."""
        qq_ring, z = ring("z", QQ)
        p = qq_ring.one
        for x in self.xs:
            p = p * (z - QQ(x.numerator, x.denominator))
        values = []
        for k in range(1, self.n + 1):
            c = p.get((self.n - k,), QQ.zero)
            values.append((-1) ** k * Fraction(int(c.numerator), int(c.denominator)))
        return tuple(values)

    @cached_property
    def companion(self) -> RationalMatrix:
        """Return C with shift(V) = V C^T.

        Column j of shift(V) is v_(j-1) + (-1)^(n-j-1) s_(n-j) v_(n-1).
        """
        n, s = self.n, self.elementary
        rows = [[Fraction(0)] * n for _ in range(n)]
        for j in range(n):
            if j > 0:
                rows[j][j - 1] += 1
            rows[j][n - 1] += (-1) ** (n - j - 1) * s[n - j - 1]
        return RationalMatrix.from_rows(rows)

    @cached_property
    def vandermonde(self) -> RationalMatrix:
        """Return the matrix with entries x_i^k."""
        return RationalMatrix.from_rows([[x**k for k in range(self.n)] for x in self.xs])

    @cached_property
    def to_evaluation(self) -> RationalMatrix:
        """Return Vand^T; X @ Vand^T holds the values at x_1, ..., x_n."""
        return self.vandermonde.transpose()

    @cached_property
    def from_evaluation(self) -> RationalMatrix:
        """Return (Vand^T)^-1."""
        return mat_inverse(self.to_evaluation)

    def shift(self, v: RationalMatrix) -> RationalMatrix:
        """Multiply every row polynomial by z modulo prod(z - x_i)."""
        return v @ self.companion.transpose()


class Half(Enum):
    """Which half of a matrix pair a group element acts on."""

    LEFT = "left"
    RIGHT = "right"
    BOTH = "both"


@dataclass(frozen=True)
class MatrixPairE:
    """A point (left, right) of the extension space over a point configuration."""

    config: PointConfig
    r: int
    left: RationalMatrix
    right: RationalMatrix

    def __post_init__(self) -> None:
        """Check the shapes against r and n."""
        if self.r < 1:
            raise InvalidInput(f"rank must be positive, got {self.r}")
        for name, m in (("left", self.left), ("right", self.right)):
            if m.shape != (self.r, self.config.n):
                raise ShapeMismatch(
                    f"{name} half is {m.shape}, need {(self.r, self.config.n)}"
                )

    @property
    def n(self) -> int:
        """Return the number of points."""
        return self.config.n

    @cached_property
    def r1(self) -> int:
        """Return the multiplicity of the first summand of the generic splitting."""
        return generic_split(self.r, self.n).parts[0][1]

    @property
    def r2(self) -> int:
        """Return r - r1."""
        return self.r - self.r1

    def half(self, which: Half) -> RationalMatrix:
        """Return the left or right matrix."""
        if which == Half.BOTH:
            raise InvalidInput("pick one half")
        return self.left if which == Half.LEFT else self.right

    def replace(self, **halves: RationalMatrix) -> "MatrixPairE":
        """Return a copy with the given halves swapped in."""
        return MatrixPairE(
            self.config,
            self.r,
            halves.get("left", self.left),
            halves.get("right", self.right),
        )


@dataclass(frozen=True)
class AutLMatrices:
    """A quadruple (A, B, H0, H1) with no invertibility requirement."""

    a: RationalMatrix
    b: RationalMatrix
    h0: RationalMatrix
    h1: RationalMatrix

    def __post_init__(self) -> None:
        """Check the block shapes."""
        r1, r2 = self.a.rows, self.b.rows
        if not (self.a.is_square and self.b.is_square):
            raise ShapeMismatch("A and B must be square")
        if self.h0.shape != (r1, r2) or self.h1.shape != (r1, r2):
            raise ShapeMismatch(f"H0 and H1 must be {r1}x{r2}")

    @property
    def r1(self) -> int:
        """Return the size of A."""
        return self.a.rows

    @property
    def r2(self) -> int:
        """Return the size of B."""
        return self.b.rows

    def is_identity(self) -> bool:
        """Return True for (1, 1, 0, 0)."""
        return (
            self.a == RationalMatrix.identity(self.r1)
            and self.b == RationalMatrix.identity(self.r2)
            and self.h0.is_zero()
            and self.h1.is_zero()
        )


class AutLElement(AutLMatrices):
    """An automorphism of L: A, B invertible, H(z) = H0 + z H1."""

    def __post_init__(self) -> None:
        """Check shapes and invertibility of A and B."""
        super().__post_init__()
        if mat_rank(self.a) < self.r1:
            raise SingularGroupElement("A is not invertible")
        if mat_rank(self.b) < self.r2:
            raise SingularGroupElement("B is not invertible")

    @classmethod
    def identity(cls, r1: int, r2: int) -> "AutLElement":
        """Return the identity element."""
        zero = RationalMatrix.zeros(r1, r2)
        return cls(
            RationalMatrix.identity(r1), RationalMatrix.identity(r2), zero, zero
        )

    def compose(self, other: "AutLElement") -> "AutLElement":
        """Return self * other, i.e. act by other first."""
        if (self.r1, self.r2) != (other.r1, other.r2):
            raise ShapeMismatch("group elements of different type")
        return AutLElement(
            self.a @ other.a,
            self.b @ other.b,
            self.a @ other.h0 + self.h0 @ other.b,
            self.a @ other.h1 + self.h1 @ other.b,
        )

    def inverse(self) -> "AutLElement":
        """Return the inverse element."""
        a_inv, b_inv = mat_inverse(self.a), mat_inverse(self.b)
        return AutLElement(
            a_inv, b_inv, -(a_inv @ self.h0 @ b_inv), -(a_inv @ self.h1 @ b_inv)
        )


def _act_half(
    g: AutLMatrices, x: RationalMatrix, r1: int, config: PointConfig
) -> RationalMatrix:
    n = config.n
    u = x.submatrix(0, r1, 0, n)
    v = x.submatrix(r1, x.rows, 0, n)
    u_new = g.a @ u + g.h0 @ v + g.h1 @ config.shift(v)
    return u_new.vstack(g.b @ v)


def act_autl(g: AutLElement, e: MatrixPairE, which: Half = Half.BOTH) -> MatrixPairE:
    """Apply g to the selected half or to both halves."""
    if (g.r1, g.r2) != (e.r1, e.r2):
        raise ShapeMismatch(
            f"element of type {(g.r1, g.r2)} on a pair of type {(e.r1, e.r2)}"
        )
    left, right = e.left, e.right
    if which in (Half.LEFT, Half.BOTH):
        left = _act_half(g, left, e.r1, e.config)
    if which in (Half.RIGHT, Half.BOTH):
        right = _act_half(g, right, e.r1, e.config)
    return e.replace(left=left, right=right)


def act_torus(t: Sequence[Scalar], e: MatrixPairE) -> MatrixPairE:
    """Scale the value at x_i of both halves by t_i."""
    ts = [as_rational(x) for x in t]
    if len(ts) != e.n:
        raise ShapeMismatch(f"{len(ts)} scalars for {e.n} points")
    if any(x == 0 for x in ts):
        raise InvalidInput("torus elements must be non-zero")
    config = e.config
    scaling = config.to_evaluation @ RationalMatrix.diagonal(ts) @ config.from_evaluation
    return e.replace(left=e.left @ scaling, right=e.right @ scaling)


@dataclass(frozen=True)
class Blocks:
    """The column blocks of U, V and shift(V) consumed by the reduction."""

    i: RationalMatrix
    ii: RationalMatrix
    ii_p: RationalMatrix
    iii: RationalMatrix
    iv: RationalMatrix
    iv_p: RationalMatrix
    v: RationalMatrix
    vi: RationalMatrix
    vi_p: RationalMatrix


def extract_blocks(e: MatrixPairE, half: Half = Half.LEFT) -> Blocks:
    """Cut U, V and shift(V) into the blocks I through VI'.

    Columns 0:r1 give I, II, II'; columns r1:r give III, IV, IV';
    columns r:r+r2 give V, VI, VI'. With r2 = 0 only I is non-empty.

    Raises
    ------
    TooFewColumns
        When n < r + r2.

    """
    r, r1, r2, n = e.r, e.r1, e.r2, e.n
    if n < r + r2:
        raise TooFewColumns(f"need n >= r + r2 = {r + r2}, got n = {n}")
    x = e.half(half)
    u = x.submatrix(0, r1, 0, n)
    v = x.submatrix(r1, r, 0, n)
    sv = e.config.shift(v)

    def cut(m: RationalMatrix, c0: int, c1: int) -> RationalMatrix:
        return m.submatrix(0, m.rows, c0, c1)

    return Blocks(
        i=cut(u, 0, r1),
        ii=cut(v, 0, r1),
        ii_p=cut(sv, 0, r1),
        iii=cut(u, r1, r),
        iv=cut(v, r1, r),
        iv_p=cut(sv, r1, r),
        v=cut(u, r, r + r2),
        vi=cut(v, r, r + r2),
        vi_p=cut(sv, r, r + r2),
    )


def is_slice_form(e: MatrixPairE) -> bool:
    """Return True if the left half has [I] = 1, [III] = 0, [IV] = 1, [V] = 0."""
    blk = extract_blocks(e, Half.LEFT)
    return (
        blk.i == RationalMatrix.identity(e.r1)
        and blk.iii.is_zero()
        and blk.iv == RationalMatrix.identity(e.r2)
        and blk.v.is_zero()
    )


def _invert(m: RationalMatrix, which: str) -> RationalMatrix:
    try:
        return mat_inverse(m)
    except SingularMatrix as err:
        raise GenericityFailure(which) from err


@dataclass(frozen=True)
class ReductionResult:
    """The slice representative and the element that reaches it."""

    canonical: MatrixPairE
    g_used: AutLElement


def autl_reduce(e: MatrixPairE) -> ReductionResult:
    """Move e into the slice [I] = 1, [III] = 0, [IV] = 1, [V] = 0.

    Parameters
    ----------
    e : MatrixPairE
        A pair satisfying the genericity conditions.

    Returns
    -------
    ReductionResult
        canonical = act_autl(g_used, e).

    Raises
    ------
    GenericityFailure
        With which = "IV", "W" or "I", in the order the blocks are inverted.
        W = [IV'][IV]^-1[VI] - [VI'].

    Notes
    -----
    1. B = [IV]^-1.
    2. H0 = -[III].
    3. H1 = [V] W^-1, H0 = -H1 [IV'].
    4. A = [I]^-1.
    Each step is applied before the blocks for the next one are read.

    """
    logger = logging.getLogger("canonical")
    r1, r2 = e.r1, e.r2
    ident_a, ident_b = RationalMatrix.identity(r1), RationalMatrix.identity(r2)
    zero_h = RationalMatrix.zeros(r1, r2)
    g_used = AutLElement.identity(r1, r2)
    current = e

    def apply(step: AutLElement) -> None:
        nonlocal current, g_used
        current = act_autl(step, current)
        g_used = step.compose(g_used)

    blk = extract_blocks(current)
    if r2 > 0:
        apply(AutLElement(ident_a, _invert(blk.iv, "IV"), zero_h, zero_h))
        blk = extract_blocks(current)
        apply(AutLElement(ident_a, ident_b, -blk.iii, zero_h))
        blk = extract_blocks(current)
        w = blk.iv_p @ blk.vi - blk.vi_p
        h1 = blk.v @ _invert(w, "W")
        apply(AutLElement(ident_a, ident_b, -(h1 @ blk.iv_p), h1))
        blk = extract_blocks(current)
    apply(AutLElement(_invert(blk.i, "I"), ident_b, zero_h, zero_h))
    logger.debug("reduced pair of type (%s, %s) over %s points", r1, r2, e.n)
    return ReductionResult(current, g_used)


def _slice_equations(g: AutLMatrices, blk: Blocks) -> tuple[Fraction, ...]:
    """Return the left blocks [I], [III], [IV], [V] of g x e, flattened."""
    parts = (
        g.a @ blk.i + g.h0 @ blk.ii + g.h1 @ blk.ii_p,
        g.a @ blk.iii + g.h0 @ blk.iv + g.h1 @ blk.iv_p,
        g.b @ blk.iv,
        g.a @ blk.v + g.h0 @ blk.vi + g.h1 @ blk.vi_p,
    )
    return tuple(x for p in parts for x in p.entries)


def _unpack(vector: Sequence[Fraction], r1: int, r2: int) -> AutLMatrices:
    sizes = [(r1, r1), (r2, r2), (r1, r2), (r1, r2)]
    blocks, offset = [], 0
    for rows, cols in sizes:
        blocks.append(
            RationalMatrix(rows, cols, tuple(vector[offset : offset + rows * cols]))
        )
        offset += rows * cols
    return AutLMatrices(*blocks)


@dataclass(frozen=True)
class Stabilizer:
    """Solutions (A, B, H0, H1) keeping a slice point in the slice.

    The solution set is particular + span(directions).
    """

    particular: AutLMatrices
    directions: tuple[AutLMatrices, ...]

    @property
    def dimension(self) -> int:
        """Return the dimension of the solution space."""
        return len(self.directions)

    @property
    def is_trivial(self) -> bool:
        """Return True when the identity is the only solution."""
        return not self.directions and self.particular.is_identity()


def stabilizer_solve(e: MatrixPairE) -> Stabilizer:
    """Solve g x e in slice form for g, with e already in slice form.

    The conditions are linear in (A, B, H0, H1); the coefficient matrix is
    assembled column by column from unit quadruples.
    """
    r1, r2 = e.r1, e.r2
    blk = extract_blocks(e, Half.LEFT)
    unknowns = r1 * r1 + r2 * r2 + 2 * r1 * r2
    columns = []
    for k in range(unknowns):
        unit = [Fraction(0)] * unknowns
        unit[k] = Fraction(1)
        columns.append(_slice_equations(_unpack(unit, r1, r2), blk))
    system = RationalMatrix.from_rows(columns, cols=len(columns[0])).transpose()
    # slice values [I] = 1, [III] = 0, [IV] = 1, [V] = 0
    target = (
        RationalMatrix.identity(r1).entries
        + RationalMatrix.zeros(r1, r2).entries
        + RationalMatrix.identity(r2).entries
        + RationalMatrix.zeros(r1, r2).entries
    )
    rhs = RationalMatrix.from_rows([[x] for x in target], cols=1)
    particular = mat_solve(system, rhs).column(0)
    kernel = mat_kernel(system)
    return Stabilizer(
        _unpack(particular, r1, r2),
        tuple(_unpack(kernel.column(c), r1, r2) for c in range(kernel.cols)),
    )


@dataclass(frozen=True)
class TorusReduction:
    """Torus-normalized pair; t is the scaling used and c the top-right value."""

    scaled: MatrixPairE
    t: tuple[Fraction, ...]
    c: Fraction
    basis: str = "evaluation"


def evaluate_half(e: MatrixPairE, half: Half) -> RationalMatrix:
    """Return the values of the row polynomials of one half at x_1, ..., x_n."""
    return e.half(half) @ e.config.to_evaluation


def t_reduce(e: MatrixPairE) -> TorusReduction:
    """Scale the point values so that the top row of the right half is all 1.

    Raises
    ------
    ZeroEvaluationEntry
        When the top right row vanishes at some x_i.

    """
    rho = evaluate_half(e, Half.RIGHT).row(0)
    for i, value in enumerate(rho):
        if value == 0:
            raise ZeroEvaluationEntry(i)
    t = tuple(1 / value for value in rho)
    return TorusReduction(act_torus(t, e), t, Fraction(1))


@dataclass(frozen=True)
class SliceReport:
    """Codimension bookkeeping of the slice."""

    r: int
    n: int
    codim: int
    autl_constraints: int
    torus_constraints: int

    @property
    def consistent(self) -> bool:
        """Return True when the constraint counts add up to the codimension."""
        return self.autl_constraints + self.torus_constraints == self.codim


def slice_report(r: int, n: int) -> SliceReport:
    """Return codim n + r^2 - 1 split into Aut(L) and torus constraints."""
    check_rank_range(r, n)
    split = generic_split(r, n)
    r1 = split.parts[0][1]
    r2 = r - r1
    return SliceReport(
        r=r,
        n=n,
        codim=n + r * r - 1,
        autl_constraints=r1 * r1 + 2 * r1 * r2 + r2 * r2,
        torus_constraints=n - 1,
    )


def default_points(n: int) -> PointConfig:
    """Return the configuration x = (0, 1, ..., n-1)."""
    return PointConfig(tuple(Fraction(i) for i in range(n)))


def random_generic_pair(
    r: int,
    n: int,
    rng: np.random.Generator,
    config: PointConfig | None = None,
    max_draws: int = MAX_DRAWS,
) -> MatrixPairE:
    """Draw pairs until one passes the reduction and the torus step.

    Raises
    ------
    GenericityFailure
        When none of max_draws pairs does.

    """
    config = config or default_points(n)
    if config.n != n:
        raise InvalidInput(f"{config.n} points for n = {n}")
    for _ in range(max_draws):
        e = MatrixPairE(config, r, random_int_matrix(r, n, rng), random_int_matrix(r, n, rng))
        try:
            autl_reduce(e)
            t_reduce(e)
        except (GenericityFailure, ZeroEvaluationEntry):
            continue
        return e
    raise GenericityFailure("matrix pair", max_draws)


def random_autl_element(r1: int, r2: int, rng: np.random.Generator) -> AutLElement:
    """Return a random element of Aut(L) of type (r1, r2)."""
    return AutLElement(
        random_invertible(r1, rng),
        random_invertible(r2, rng),
        random_int_matrix(r1, r2, rng),
        random_int_matrix(r1, r2, rng),
    )


def random_torus_element(n: int, rng: np.random.Generator) -> tuple[Fraction, ...]:
    """Return random non-zero integers t_1, ..., t_n."""
    values = []
    while len(values) < n:
        x = int(rng.integers(-5, 6))
        if x:
            values.append(Fraction(x))
    return tuple(values)
