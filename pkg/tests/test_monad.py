from fractions import Fraction

import numpy as np
import pytest

from core.errors import InvalidInput, ShapeMismatch, SingularGroupElement, WrongVariety
from core.exact import CoxPolynomial, RationalMatrix
from core.geom import ChowClass
from core.monad import (
    FamilyKind,
    GroupElementG,
    MonadData,
    PointFailure,
    evaluate_matrix,
    expected_dims,
    family_chern,
    generic_completion,
    group_act,
    line_is_trivial,
    line_restriction_check,
    monad_chern,
    monad_complete,
    monad_compose_check,
    pointwise_check,
    pullback_p2_monad,
    random_degree_u_matrix,
    random_group_element,
    relative_direct_images,
    restrict_to_fiber,
    restrict_to_lambda,
)
from core.variety import VarietyTag

Y00 = VarietyTag.p2_bundle(0, 0)


def var(v, name):
    return CoxPolynomial.variable(v, name)


def test_pullback_monad_composes():
    check = monad_compose_check(pullback_p2_monad(Y00))
    assert check.ok
    assert check.residual[0][0].is_zero()


def test_perturbed_monad_has_residual():
    m = pullback_p2_monad(Y00)
    z0, z1, z2 = (var(Y00, f"z{i}") for i in range(3))
    perturbed = MonadData(Y00, 2, 1, m.a_matrix, ((-z1, z0, z0, z2),))
    check = monad_compose_check(perturbed)
    assert not check.ok
    assert check.residual[0][0] == z0 * z2


def test_pullback_needs_trivial_twists():
    with pytest.raises(WrongVariety):
        pullback_p2_monad(VarietyTag.p2_bundle(0, 1))


def test_monad_validation():
    m = pullback_p2_monad(Y00)
    with pytest.raises(ShapeMismatch):
        MonadData(Y00, 1, 1, m.a_matrix, m.b_matrix)
    w0 = var(Y00, "w0")
    with pytest.raises(InvalidInput):
        MonadData(Y00, 2, 1, m.a_matrix, ((w0, w0, w0, w0),))
    with pytest.raises(WrongVariety):
        MonadData(VarietyTag.hirzebruch(1), 0, 0, (), ())


def test_pointwise_check_passes_on_pullback():
    report = pointwise_check(pullback_p2_monad(Y00), samples=50, seed=3)
    assert report.a_injective and report.b_surjective
    assert report.points_checked == 35 + 50
    assert report.failures == ()


def test_pointwise_check_finds_degenerate_point():
    v = VarietyTag.p2_bundle(1, 1)
    z0, z1, z2 = (var(v, f"z{i}") for i in range(3))
    w0, w1 = var(v, "w0"), var(v, "w1")
    zero = CoxPolynomial.zero(v)
    a_matrix = ((z0,), (w0 * z1,), (w1 * z1,), (w0 * z2,))
    m = MonadData(v, 2, 1, a_matrix, ((zero,) * 4,))
    report = pointwise_check(m, samples=10, seed=0)
    assert not report.a_injective
    point = tuple(Fraction(x) for x in (0, 0, 1, 0, 1))
    assert PointFailure(point, "A") in report.failures
    assert not report.b_surjective


def test_pointwise_check_needs_samples():
    with pytest.raises(InvalidInput):
        pointwise_check(pullback_p2_monad(Y00), samples=0, seed=0)


def test_restrict_to_fiber():
    restricted = restrict_to_fiber(pullback_p2_monad(Y00), (1, 1))
    assert restricted == pullback_p2_monad(VarietyTag.p2())
    assert monad_compose_check(restricted).ok
    with pytest.raises(InvalidInput):
        restrict_to_fiber(pullback_p2_monad(Y00), (0, 0))
    with pytest.raises(WrongVariety):
        restrict_to_fiber(restricted, (1, 0))


def test_restrict_to_fiber_substitutes_base_point():
    v = VarietyTag.p2_bundle(0, 1)
    z0, z2 = var(v, "z0"), var(v, "z2")
    w0, w1 = var(v, "w0"), var(v, "w1")
    zero = CoxPolynomial.zero(v)
    entry = w0 * z2 + (w1 * z2).scale(3)
    m = MonadData(v, 0, 1, ((z0,), (entry,)), ((zero, zero),))
    fiber = restrict_to_fiber(m, (2, 1))
    assert fiber.a_matrix[1][0] == var(VarietyTag.p2(), "z2").scale(5)


def test_restrict_to_lambda():
    restriction = restrict_to_lambda(pullback_p2_monad(Y00))
    assert restriction.a_const == RationalMatrix.from_rows([[1], [0], [0], [0]])
    assert restriction.b_const == RationalMatrix.from_rows([[0, 1, 0, 0]])
    assert restriction.trivial_on_lambda


def test_restrict_to_lambda_with_twists():
    v = VarietyTag.p2_bundle(0, 2)
    z0 = var(v, "z0")
    z2w = CoxPolynomial.monomial(v, (0, 0, 1, 1, 1))
    zero = CoxPolynomial.zero(v)
    m = MonadData(v, 0, 1, ((z0,), (z2w,)), ((zero, z0),))
    restriction = restrict_to_lambda(m)
    assert restriction.a_const == RationalMatrix.from_rows([[1], [0]])
    assert restriction.trivial_on_lambda


def test_lines_in_fibers():
    fiber = pullback_p2_monad(VarietyTag.p2())
    assert line_is_trivial(fiber, (1, 0, 0), (0, 1, 0))
    assert not line_is_trivial(fiber, (0, 0, 1), (1, 0, 0))
    report = line_restriction_check(pullback_p2_monad(Y00), samples=5, seed=1)
    assert report.lines_checked == 5
    assert report.trivial == (not report.jumping)


@pytest.mark.parametrize("a, b", [(0, 0), (1, 2)])
@pytest.mark.parametrize("r, n", [(1, 1), (2, 3), (4, 2)])
def test_monad_chern(a, b, r, n):
    v = VarietyTag.p2_bundle(a, b)
    zero = ChowClass.zero(v)
    assert monad_chern(v, r, n) == (zero, ChowClass.of(v, {"u2": n}), zero)


@pytest.mark.parametrize(
    "a, b, r, n, m",
    [(0, 1, 2, 2, 13), (0, 0, 2, 2, 5), (1, 1, 3, 3, 46), (2, 3, 2, 4, 93)],
)
def test_expected_dims(a, b, r, n, m):
    dims = expected_dims(a, b, r, n)
    assert dims.m == m
    assert dims.chi_end_computed == 1 - m
    assert dims.sections_o2 == 6 + 4 * (a + b)
    assert dims.consistent


def test_family_ft():
    v = VarietyTag.p2_bundle(0, 1)
    report = family_chern(FamilyKind.F0_FT, v, n=2, r=3)
    assert report.chern.rank == 3
    assert report.c1.is_zero()
    assert report.c2 == ChowClass.of(v, {"u2": 2})
    assert report.asserted_c2 is None


def test_family_serre_reports_both_c2():
    v = VarietyTag.p2_bundle(1, 1)
    report = family_chern(FamilyKind.SERRE_RANK2, v, n=3)
    assert report.chern.rank == 2
    assert report.c1.is_zero()
    assert report.c2 == ChowClass.of(v, {"u2": 2})
    assert report.asserted_c2 == ChowClass.of(v, {"u2": 3})


def test_family_needs_p2_bundle():
    with pytest.raises(WrongVariety):
        family_chern(FamilyKind.F0_FT, VarietyTag.hirzebruch(1), n=2)


@pytest.mark.parametrize("a, b", [(0, 0), (0, 1), (1, 2)])
@pytest.mark.parametrize("r, n", [(2, 2), (3, 4)])
def test_relative_direct_images(a, b, r, n):
    images = relative_direct_images(a, b, r, n)
    assert [d.twist for d in images] == [-1, -2]
    assert all(d.consistent for d in images)
    assert images[0].rank == n and images[0].degree == 0
    assert images[1].degree == -(a + b) * n


def test_completion_of_pullback():
    m = pullback_p2_monad(Y00)
    basis = monad_complete(Y00, 2, 1, m.a_matrix)
    assert len(basis) == 6
    assert all(monad_compose_check(b).ok for b in basis)


@pytest.mark.parametrize("a, b, r, n", [(0, 0, 2, 2), (0, 1, 2, 1)])
def test_completion_of_random_a(a, b, r, n):
    v = VarietyTag.p2_bundle(a, b)
    rng = np.random.default_rng(11)
    a_matrix = random_degree_u_matrix(v, r + 2 * n, n, rng)
    for m in monad_complete(v, r, n, a_matrix):
        assert monad_compose_check(m).ok
    completed = generic_completion(v, r, n, a_matrix, rng)
    assert completed.a_matrix == a_matrix
    assert monad_compose_check(completed).ok


def test_group_action():
    m = pullback_p2_monad(Y00)
    assert group_act(GroupElementG.identity(2, 1), m) == m
    moved = group_act(random_group_element(2, 1, np.random.default_rng(5)), m)
    assert monad_compose_check(moved).ok
    assert pointwise_check(moved, samples=10, seed=0).a_injective


def test_group_element_validation():
    one = RationalMatrix.identity(1)
    with pytest.raises(SingularGroupElement):
        GroupElementG(one, RationalMatrix.zeros(4, 4), one)
    with pytest.raises(ShapeMismatch):
        group_act(GroupElementG.identity(1, 1), pullback_p2_monad(Y00))


def test_group_action_preserves_monad_conditions():
    m = pullback_p2_monad(Y00)
    before = pointwise_check(m, samples=10, seed=0)
    for seed in range(20):
        moved = group_act(random_group_element(2, 1, np.random.default_rng((23, seed))), m)
        assert monad_compose_check(moved).ok
        after = pointwise_check(moved, samples=10, seed=0)
        assert (after.a_injective, after.b_surjective) == (before.a_injective, before.b_surjective)
        assert len(after.failures) == len(before.failures)


@pytest.mark.parametrize("a, b, r, n", [(1, 2, 2, 1), (0, 1, 2, 2), (1, 1, 3, 2)])
def test_restriction_to_fiber_of_random_monads(a, b, r, n):
    v = VarietyTag.p2_bundle(a, b)
    rng = np.random.default_rng((29, a, b, r, n))
    a_matrix = random_degree_u_matrix(v, r + 2 * n, n, rng)
    m = generic_completion(v, r, n, a_matrix, rng)
    assert monad_compose_check(restrict_to_fiber(m, (1, 1))).ok
    # with an arbitrary B the restricted residual is the residual on that fiber
    loose = MonadData(v, r, n, a_matrix, random_degree_u_matrix(v, n, r + 2 * n, rng))
    for x in [(1, 1), (2, -3), (0, 1)]:
        restricted = restrict_to_fiber(loose, x)
        for _ in range(3):
            z = tuple(int(c) for c in rng.integers(-4, 5, size=3))
            assert evaluate_matrix(monad_compose_check(restricted).residual, z) == (
                evaluate_matrix(monad_compose_check(loose).residual, z + x)
            )
