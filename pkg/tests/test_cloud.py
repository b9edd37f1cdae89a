import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssmeasure import build_cloud, cantor, extend_cloud, fixed_points, mass_of_code_prefix, sierpinski
from ssmeasure.cloud import render_code, to_csv
from ssmeasure.errors import CapacityExceeded, PrefixTooLong


def test_level_one_is_fixed_points():
    cloud = fixed_points(sierpinski(0.2))
    np.testing.assert_allclose(cloud.coords, [[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]], atol=1e-15)
    np.testing.assert_allclose(cloud.weights, 1 / 3)


def test_cantor_quarter_level_two():
    cloud = build_cloud(cantor(0.25), 2)
    np.testing.assert_allclose(cloud.coords[:, 0], [0, 0.25, 0.75, 1.0])
    assert [cloud.code(i) for i in range(4)] == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_points_follow_their_code():
    system = sierpinski(0.3)
    cloud = build_cloud(system, 4)
    for i in (0, 17, 40, 80):
        code = cloud.code(i)
        x = system.maps[code[-1] - 1].fixed_point()
        for letter in reversed(code[:-1]):
            x = system.maps[letter - 1](x)
        np.testing.assert_allclose(cloud.coords[i], x, atol=1e-14)


def test_index_code_roundtrip():
    cloud = build_cloud(sierpinski(0.2), 5)
    for i in range(len(cloud)):
        assert cloud.index_of(cloud.code(i)) == i


def test_extend_matches_build():
    system = cantor(0.3)
    a = extend_cloud(system, build_cloud(system, 3))
    b = build_cloud(system, 4)
    np.testing.assert_array_equal(a.coords, b.coords)
    assert a.denominator == b.denominator == 16


def test_total_mass_is_one(skewed_gasket):
    for k in (1, 3, 5):
        cloud = build_cloud(skewed_gasket, k)
        assert cloud.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert cloud.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_unequal_units_track_weights(skewed_gasket):
    cloud = build_cloud(skewed_gasket, 4)
    np.testing.assert_allclose(cloud.units / cloud.denominator, cloud.weights, rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=0, max_size=4))
def test_prefix_mass(prefix):
    cloud = build_cloud(sierpinski(0.25), 4)
    assert mass_of_code_prefix(cloud, prefix) == pytest.approx(3.0 ** -len(prefix))


def test_prefix_mass_unequal(skewed_gasket):
    cloud = build_cloud(skewed_gasket, 3)
    s = skewed_gasket.s
    assert mass_of_code_prefix(cloud, [3, 1]) == pytest.approx(0.25 ** s * 0.3 ** s, rel=1e-12)


def test_prefix_too_long():
    with pytest.raises(PrefixTooLong):
        mass_of_code_prefix(build_cloud(cantor(0.2), 2), [1, 1, 1])


def test_budget():
    with pytest.raises(CapacityExceeded) as info:
        build_cloud(sierpinski(0.2), 8, budget=1000)
    assert info.value.level == 8


def test_arrays_frozen():
    cloud = build_cloud(cantor(0.2), 3)
    with pytest.raises(ValueError):
        cloud.coords[0, 0] = 5.0


def test_csv_dump():
    text = to_csv(build_cloud(cantor(0.25), 2))
    lines = text.strip().splitlines()
    assert lines[0] == "code,x1,weight"
    assert lines[3] == "21,0.75,0.25"


def test_render_code_many_letters():
    assert render_code((1, 12, 3)) == "1.12.3"
