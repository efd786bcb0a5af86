import pytest

from core.cohom import (
    euler_from_h,
    h0_projective_space,
    h_direct_sum,
    h_line_bundle,
    pushforward_split,
)
from core.errors import InvalidInput, NegativeTwist, WrongVariety
from core.geom import ChowClass, canonical_class, euler_characteristic, line_bundle_character
from core.variety import VarietyTag

VARIETIES = [
    VarietyTag.p1(),
    VarietyTag.p2(),
    VarietyTag.hirzebruch(0),
    VarietyTag.hirzebruch(1),
    VarietyTag.hirzebruch(3),
    VarietyTag.p2_bundle(0, 0),
    VarietyTag.p2_bundle(0, 1),
    VarietyTag.p2_bundle(1, 2),
]


@pytest.mark.parametrize(
    "v, coords, expected",
    [
        (VarietyTag.hirzebruch(1), (2, 3), (15, 0, 0)),
        (VarietyTag.hirzebruch(0), (0, 0), (1, 0, 0)),
        (VarietyTag.hirzebruch(0), (0, -2), (0, 1, 0)),
        (VarietyTag.hirzebruch(0), (-2, 0), (0, 1, 0)),
        (VarietyTag.hirzebruch(2), (-2, 0), (0, 0, 1)),
        (VarietyTag.p1(), (-3,), (0, 2)),
        (VarietyTag.p2(), (-3,), (0, 0, 1)),
        (VarietyTag.p2_bundle(1, 2), (0, 0), (1, 0, 0, 0)),
        (VarietyTag.p2_bundle(0, 1), (-1, -1), (0, 0, 0, 0)),
        (VarietyTag.p2_bundle(0, 0), (1, -2), (0, 3, 0, 0)),
    ],
)
def test_line_bundle_cohomology(v, coords, expected):
    assert h_line_bundle(v, ChowClass.divisor(v, *coords)) == expected


@pytest.mark.parametrize("v", VARIETIES)
@pytest.mark.parametrize("k", range(-4, 4))
@pytest.mark.parametrize("l", range(-4, 4))
def test_euler_characteristic_and_serre_duality(v, k, l):
    coords = (k, l)[: len(v.ring_generators)]
    cls = ChowClass.divisor(v, *coords)
    h = h_line_bundle(v, cls)
    assert euler_from_h(h) == euler_characteristic(line_bundle_character(cls))
    assert h_line_bundle(v, canonical_class(v) - cls) == h[::-1]


@pytest.mark.parametrize("d", range(-4, 6))
def test_projective_plane_sections(d):
    v = VarietyTag.p2()
    assert h_line_bundle(v, ChowClass.divisor(v, d))[0] == h0_projective_space(2, d)


def test_pushforward_split():
    assert pushforward_split(VarietyTag.hirzebruch(2), 3) == [0, 2, 4, 6]
    assert pushforward_split(VarietyTag.p2_bundle(1, 2), 2) == [0, 1, 2, 2, 3, 4]
    assert pushforward_split(VarietyTag.p2_bundle(0, 0), 0) == [0]


def test_pushforward_split_errors():
    with pytest.raises(NegativeTwist):
        pushforward_split(VarietyTag.hirzebruch(1), -1)
    with pytest.raises(WrongVariety):
        pushforward_split(VarietyTag.p2(), 1)


def test_direct_sum_adds_up():
    v = VarietyTag.hirzebruch(1)
    classes = [ChowClass.divisor(v, 1, 0), ChowClass.divisor(v, 0, -2)]
    assert h_direct_sum(v, classes) == (3, 1, 0)


def test_non_integral_class_is_rejected():
    v = VarietyTag.hirzebruch(1)
    with pytest.raises(InvalidInput):
        h_line_bundle(v, ChowClass.of(v, {"u": "1/2"}))
    with pytest.raises(InvalidInput):
        h_line_bundle(v, ChowClass.divisor(VarietyTag.hirzebruch(2), 1, 0))
