from fractions import Fraction

import numpy as np
import pytest

from core.errors import (
    GenericityFailure,
    InconsistentSystem,
    InvalidInput,
    ShapeMismatch,
    SingularMatrix,
    VarietyMismatch,
)
from core.exact import (
    CoxPolynomial,
    RationalMatrix,
    as_rational,
    compositions,
    cox_basis,
    cox_basis_polynomials,
    cox_multiply,
    linear_combination,
    mat_inverse,
    mat_kernel,
    mat_rank,
    mat_solve,
    random_int_matrix,
    random_invertible,
)
from core.variety import VarietyTag


def M(*rows):
    return RationalMatrix.from_rows(rows)


def test_as_rational_rejects_floats():
    assert as_rational("3/6") == Fraction(1, 2)
    with pytest.raises(InvalidInput):
        as_rational(0.5)


@pytest.mark.parametrize(
    "m, rank",
    [
        (M([1, 2], [2, 4]), 1),
        (M([1, 0], [0, 1]), 2),
        (M([0, 0, 0]), 0),
        (M([1, 2, 3], [4, 5, 6], [7, 8, 9]), 2),
        (M(["1/2", "1/3"], ["3/2", 1]), 1),
    ],
)
def test_rank(m, rank):
    assert mat_rank(m) == rank


def test_kernel_spans_null_space():
    m = M([1, 2, 3], [4, 5, 6], [7, 8, 9])
    k = mat_kernel(m)
    assert k.shape == (3, 1)
    assert (m @ k).is_zero()
    assert k.column(0) == (1, -2, 1)


def test_kernel_of_full_rank_matrix_is_empty():
    assert mat_kernel(RationalMatrix.identity(3)).shape == (3, 0)


def test_inverse():
    m = M([2, 1], [1, 1])
    assert mat_inverse(m) == M([1, -1], [-1, 2])
    assert m @ mat_inverse(m) == RationalMatrix.identity(2)


def test_inverse_of_singular_matrix():
    with pytest.raises(SingularMatrix):
        mat_inverse(M([1, 2], [2, 4]))
    with pytest.raises(ShapeMismatch):
        mat_inverse(M([1, 2, 3]))


def test_solve():
    m = M([1, 1], [1, -1])
    x = mat_solve(m, M([3], [1]))
    assert x == M([2], [1])


def test_solve_underdetermined_sets_free_variables_to_zero():
    x = mat_solve(M([1, 2]), M([4]))
    assert x == M([4], [0])


def test_solve_inconsistent():
    with pytest.raises(InconsistentSystem):
        mat_solve(M([1, 2], [2, 4]), M([1], [1]))


def test_matrix_algebra():
    a = M([1, 2], [3, 4])
    assert a.transpose() == M([1, 3], [2, 4])
    assert a - a == RationalMatrix.zeros(2, 2)
    assert a.hstack(a).shape == (2, 4)
    assert a.vstack(a).submatrix(2, 4, 0, 1) == M([1], [3])
    with pytest.raises(ShapeMismatch):
        a @ M([1, 2, 3])
    with pytest.raises(ShapeMismatch):
        RationalMatrix.from_rows([[1, 2], [3]])


def test_compositions():
    assert sorted(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert list(compositions(-1, 2)) == []
    assert len(list(compositions(3, 3))) == 10


@pytest.mark.parametrize(
    "variety, degree, count",
    [
        (VarietyTag.p1(), (3,), 4),
        (VarietyTag.p2(), (2,), 6),
        (VarietyTag.hirzebruch(0), (1, 0), 2),
        (VarietyTag.hirzebruch(2), (1, 0), 4),
        (VarietyTag.hirzebruch(1), (2, 3), 15),
        (VarietyTag.p2_bundle(0, 0), (1, 0), 3),
        (VarietyTag.p2_bundle(1, 2), (1, 0), 6),
        (VarietyTag.p2_bundle(1, 2), (2, 0), 18),
        (VarietyTag.p2_bundle(0, 1), (0, -1), 0),
    ],
)
def test_cox_basis_counts(variety, degree, count):
    assert len(cox_basis(variety, degree)) == count


def test_cox_basis_wrong_degree_length():
    with pytest.raises(InvalidInput):
        cox_basis(VarietyTag.p2(), (1, 0))


def test_cox_multiply():
    v = VarietyTag.p2_bundle(0, 0)
    z0, z1 = CoxPolynomial.variable(v, "z0"), CoxPolynomial.variable(v, "z1")
    product = cox_multiply(z0 + z1, z0 - z1)
    assert product == z0 * z0 - z1 * z1
    assert product.degree == (2, 0)
    assert product.evaluate([3, 1, 0, 1, 1]) == 8


def test_cox_multiply_on_different_varieties():
    p = CoxPolynomial.variable(VarietyTag.p2(), "z0")
    q = CoxPolynomial.variable(VarietyTag.p2_bundle(0, 0), "z0")
    with pytest.raises(VarietyMismatch):
        cox_multiply(p, q)


def test_polynomials_stay_homogeneous():
    v = VarietyTag.p2_bundle(0, 1)
    with pytest.raises(InvalidInput):
        CoxPolynomial.variable(v, "z0") + CoxPolynomial.variable(v, "z2")
    w0z2 = CoxPolynomial.monomial(v, (0, 0, 1, 1, 0))
    assert w0z2.degree == (1, 0)
    assert (CoxPolynomial.variable(v, "z0") + w0z2).degree == (1, 0)


def test_zero_polynomial():
    v = VarietyTag.p2()
    z0 = CoxPolynomial.variable(v, "z0")
    assert (z0 - z0).is_zero()
    assert (z0 - z0).degree is None
    assert z0.scale(0) == CoxPolynomial.zero(v)


def test_substitute_and_linear_combination():
    v = VarietyTag.p2_bundle(0, 1)
    sections = [
        CoxPolynomial.monomial(v, (0, 0, 1, 1, 0)),
        CoxPolynomial.monomial(v, (0, 0, 1, 0, 1)),
    ]
    p = linear_combination(sections, [2, -1], v)
    assert p.coefficient((0, 0, 1, 1, 0)) == 2
    restricted = p.substitute({3: 1, 4: 1})
    assert restricted.terms == (((0, 0, 1, 0, 0), Fraction(1)),)


def random_homogeneous(v, degree, rng):
    basis = cox_basis_polynomials(v, degree)
    numerators = rng.integers(-4, 5, size=len(basis))
    denominators = rng.integers(1, 4, size=len(basis))
    coeffs = [Fraction(int(p), int(q)) for p, q in zip(numerators, denominators)]
    return linear_combination(basis, coeffs, v)


@pytest.mark.parametrize(
    "v, degrees",
    [
        (VarietyTag.p2(), [(1,), (2,), (1,)]),
        (VarietyTag.hirzebruch(2), [(1, 0), (0, 1), (1, 2)]),
        (VarietyTag.p2_bundle(1, 2), [(1, 0), (0, 1), (1, 1)]),
    ],
    ids=str,
)
def test_cox_multiply_is_commutative_and_associative(v, degrees):
    rng = np.random.default_rng((3, len(v.cox_variables)))
    for _ in range(20):
        p, q, s = (random_homogeneous(v, d, rng) for d in degrees)
        assert cox_multiply(p, q) == cox_multiply(q, p)
        assert cox_multiply(cox_multiply(p, q), s) == cox_multiply(p, cox_multiply(q, s))
        point = [int(x) for x in rng.integers(-3, 4, size=len(v.cox_variables))]
        assert cox_multiply(p, q).evaluate(point) == p.evaluate(point) * q.evaluate(point)


class ZeroDraws:
    """A generator stand-in whose integer draws are all zero."""

    def integers(self, low, high, size=None):
        return np.zeros(size, dtype=np.int64) if size is not None else 0


def test_random_invertible():
    m = random_invertible(4, np.random.default_rng(1))
    assert mat_rank(m) == 4
    assert random_int_matrix(2, 3, np.random.default_rng(1)).shape == (2, 3)


def test_random_invertible_gives_up():
    with pytest.raises(GenericityFailure) as info:
        random_invertible(2, ZeroDraws(), max_draws=5)
    assert info.value.draws == 5
