from fractions import Fraction

import numpy as np
import pytest

from core.canonical import (
    AutLElement,
    Half,
    MatrixPairE,
    PointConfig,
    act_autl,
    act_torus,
    autl_reduce,
    default_points,
    evaluate_half,
    extract_blocks,
    is_slice_form,
    random_autl_element,
    random_generic_pair,
    random_torus_element,
    slice_report,
    stabilizer_solve,
    t_reduce,
)
from core.errors import (
    GenericityFailure,
    InvalidInput,
    ShapeMismatch,
    SingularGroupElement,
    TooFewColumns,
    ZeroEvaluationEntry,
)
from core.exact import RationalMatrix


def M(*rows):
    return RationalMatrix.from_rows(rows)


def test_elementary_symmetric_functions():
    assert PointConfig((1, 2)).elementary == (3, 2)
    assert PointConfig((0, 1, 2)).elementary == (3, 2, 0)


def test_shift_two_points():
    config = PointConfig((1, 2))
    assert config.shift(M([1, 0])) == M([0, 1])
    assert config.shift(M([0, 1])) == M([-2, 3])


def test_shift_is_diagonal_in_evaluation_basis():
    config = PointConfig((Fraction(1, 2), 2, -3))
    v = M([1, 4, -2], [0, 1, 5])
    values = v @ config.to_evaluation
    shifted = config.shift(v) @ config.to_evaluation
    assert shifted == values @ RationalMatrix.diagonal(config.xs)
    assert v @ config.to_evaluation @ config.from_evaluation == v


def test_points_must_be_distinct():
    with pytest.raises(InvalidInput):
        PointConfig((1, 1))


@pytest.mark.parametrize("r, n, r1, r2", [(2, 3, 1, 1), (3, 7, 2, 1), (3, 5, 1, 2), (2, 4, 2, 0)])
def test_block_sizes(r, n, r1, r2):
    e = MatrixPairE(default_points(n), r, RationalMatrix.zeros(r, n), RationalMatrix.zeros(r, n))
    assert (e.r1, e.r2) == (r1, r2)
    blk = extract_blocks(e)
    assert blk.i.shape == (r1, r1)
    assert blk.iii.shape == (r1, r2)
    assert blk.iv.shape == (r2, r2)
    assert blk.v.shape == (r1, r2)
    assert blk.vi_p.shape == (r2, r2)


def test_too_few_columns():
    e = MatrixPairE(default_points(2), 3, RationalMatrix.zeros(3, 2), RationalMatrix.zeros(3, 2))
    with pytest.raises(TooFewColumns):
        extract_blocks(e)


def test_pair_shapes_are_checked():
    with pytest.raises(ShapeMismatch):
        MatrixPairE(default_points(3), 2, RationalMatrix.zeros(2, 3), RationalMatrix.zeros(3, 3))


@pytest.mark.parametrize("r, n", [(2, 3), (2, 4), (3, 5), (3, 7)])
@pytest.mark.parametrize("seed", range(3))
def test_reduction_reaches_slice(r, n, seed):
    e = random_generic_pair(r, n, np.random.default_rng((seed, r, n)))
    result = autl_reduce(e)
    assert is_slice_form(result.canonical)
    assert act_autl(result.g_used, e) == result.canonical
    again = autl_reduce(result.canonical)
    assert again.canonical == result.canonical
    assert again.g_used.is_identity()


@pytest.mark.parametrize("r, n", [(2, 3), (3, 7)])
def test_reduction_is_constant_on_orbits(r, n):
    rng = np.random.default_rng((7, r, n))
    e = random_generic_pair(r, n, rng)
    canonical = autl_reduce(e).canonical
    assert stabilizer_solve(canonical).is_trivial
    for _ in range(3):
        g = random_autl_element(e.r1, e.r2, rng)
        assert autl_reduce(act_autl(g, e)).canonical == canonical


def test_reduction_genericity_failure():
    left = M([1, 2, 3], [1, 0, 5])
    e = MatrixPairE(default_points(3), 2, left, left)
    with pytest.raises(GenericityFailure) as info:
        autl_reduce(e)
    assert info.value.which == "IV"


class ZeroDraws:
    """A generator stand-in whose integer draws are all zero."""

    def integers(self, low, high, size=None):
        return np.zeros(size, dtype=np.int64) if size is not None else 0


def test_random_generic_pair_gives_up():
    with pytest.raises(GenericityFailure) as info:
        random_generic_pair(2, 3, ZeroDraws(), max_draws=4)
    assert info.value.draws == 4
    assert "4 draws" in str(info.value)


def test_reduction_without_v_rows():
    e = MatrixPairE(default_points(2), 2, M([2, 1], [0, 1]), M([1, 1], [1, 0]))
    assert e.r2 == 0
    result = autl_reduce(e)
    assert result.canonical.left == RationalMatrix.identity(2)
    assert result.g_used.a == M([Fraction(1, 2), Fraction(-1, 2)], [0, 1])


def test_group_law():
    rng = np.random.default_rng(2)
    g = random_autl_element(1, 2, rng)
    h = random_autl_element(1, 2, rng)
    e = random_generic_pair(3, 5, rng)
    assert act_autl(g.compose(h), e) == act_autl(g, act_autl(h, e))
    assert g.compose(g.inverse()).is_identity()
    with pytest.raises(SingularGroupElement):
        AutLElement(RationalMatrix.zeros(1, 1), RationalMatrix.identity(2), g.h0, g.h1)


def test_action_on_one_half():
    rng = np.random.default_rng(4)
    e = random_generic_pair(2, 3, rng)
    g = random_autl_element(1, 1, rng)
    moved = act_autl(g, e, Half.LEFT)
    assert moved.right == e.right
    assert moved.left == act_autl(g, e).left


def test_generic_stabilizer_is_trivial():
    e = random_generic_pair(3, 5, np.random.default_rng(9))
    stab = stabilizer_solve(autl_reduce(e).canonical)
    assert stab.dimension == 0
    assert stab.particular.is_identity()


def test_degenerate_stabilizer():
    u = M([1, 0, 0, 0, 0])
    v = M([0, 1, 0, 0, 0], [0, 0, 1, 0, 0])
    e = MatrixPairE(default_points(5), 3, u.vstack(v), u.vstack(v))
    assert is_slice_form(e)
    stab = stabilizer_solve(e)
    assert stab.dimension == 1
    assert stab.particular.is_identity()
    assert not stab.is_trivial


def test_t_reduce():
    config = PointConfig((0, 1))
    e = MatrixPairE(config, 1, M([5, 7]), M([2, 1]))
    result = t_reduce(e)
    assert result.t == (Fraction(1, 2), Fraction(1, 3))
    assert result.c == 1
    assert evaluate_half(result.scaled, Half.RIGHT) == M([1, 1])
    assert evaluate_half(result.scaled, Half.LEFT) == M([Fraction(5, 2), 4])


def test_t_reduce_zero_entry():
    e = MatrixPairE(PointConfig((0, 1)), 1, M([1, 1]), M([1, -1]))
    with pytest.raises(ZeroEvaluationEntry) as info:
        t_reduce(e)
    assert info.value.index == 1


def test_t_reduce_is_constant_on_torus_orbits():
    rng = np.random.default_rng(21)
    e = random_generic_pair(2, 4, rng)
    scaled = t_reduce(e).scaled
    for _ in range(3):
        t = random_torus_element(4, rng)
        assert t_reduce(act_torus(t, e)).scaled == scaled


def test_torus_rejects_zero():
    e = random_generic_pair(2, 3, np.random.default_rng(0))
    with pytest.raises(InvalidInput):
        act_torus((1, 0, 1), e)


@pytest.mark.parametrize(
    "r, n, codim, autl, torus",
    [(2, 3, 6, 4, 2), (3, 7, 15, 9, 6), (2, 2, 5, 4, 1)],
)
def test_slice_report(r, n, codim, autl, torus):
    report = slice_report(r, n)
    assert (report.codim, report.autl_constraints, report.torus_constraints) == (
        codim,
        autl,
        torus,
    )
    assert report.consistent
