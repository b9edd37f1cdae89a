import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ssmeasure import build_cloud, build_index, cantor, cumulative_mass_below, planar_cantor, ranked_distances, sierpinski
from ssmeasure.cloud import PointCloud


def _cloud_from(points):
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    return PointCloud(1, n, pts, np.full(n, 1 / n), np.ones(n, dtype=np.int64), float(n))


def test_cantor_buckets():
    index = build_index(build_cloud(cantor(0.25), 2), 0.5)
    assert index.buckets == {0: [0, 1], 1: [2, 3]}


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=60),
       st.floats(0.05, 3.0))
def test_bucket_membership_recomputable(points, cell_size):
    cloud = _cloud_from(points)
    index = build_index(cloud, cell_size)
    seen = []
    for cell, members in index.buckets.items():
        for i in members:
            assert index.cell_of(cloud.coords[i]) == cell
            seen.append(i)
    assert sorted(seen) == list(range(len(points)))


def test_bad_cell_size():
    with pytest.raises(ValueError):
        build_index(build_cloud(cantor(0.25), 2), 0.0)


def test_window_example():
    cloud = build_cloud(cantor(0.25), 2)
    groups = ranked_distances(build_index(cloud, 2.0), cloud, 0, 0.3, 2.0)
    assert [g.dist for g in groups] == [0.75, 1.0]
    assert [g.weight for g in groups] == [0.25, 0.25]


def test_zero_window_excludes_self():
    cloud = build_cloud(cantor(0.25), 2)
    assert ranked_distances(build_index(cloud, 0.5), cloud, 0, 0.0, 0.0) == []


def test_include_center():
    cloud = build_cloud(cantor(0.25), 2)
    groups = ranked_distances(build_index(cloud, 0.5), cloud, 1, 0.0, 0.0, include_center=True)
    assert len(groups) == 1 and groups[0].dist == 0.0 and groups[0].partner_index == 1


def test_far_window_empty():
    cloud = build_cloud(cantor(0.25), 3)
    assert ranked_distances(build_index(cloud, 0.1), cloud, 0, 5.0, 6.0) == []


def test_bad_window():
    cloud = build_cloud(cantor(0.25), 2)
    with pytest.raises(ValueError):
        ranked_distances(build_index(cloud, 0.5), cloud, 0, 0.5, 0.2)


def _brute(cloud, center, lo, hi):
    d = np.sqrt(((cloud.coords - cloud.coords[center]) ** 2).sum(axis=1))
    keep = [(float(d[i]), i) for i in range(len(cloud)) if i != center and lo <= d[i] <= hi]
    return sorted(keep)


@pytest.mark.parametrize("system", [cantor(0.3), sierpinski(0.25), planar_cantor(0.2)],
                         ids=["cantor", "sierpinski", "planar"])
@pytest.mark.parametrize("window", [(0.0, 10.0), (0.1, 0.5), (0.3, 0.31)])
def test_matches_brute_force(system, window):
    cloud = build_cloud(system, 5 if system.m < 4 else 4)
    index = build_index(cloud, max(window[1], 1e-3) / 2)
    for center in range(0, len(cloud), max(1, len(cloud) // 17)):
        groups = ranked_distances(index, cloud, center, *window, tie_tol=0.0)
        got = sorted((r.dist, r.partner_index) for g in groups for r in g.records)
        assert got == _brute(cloud, center, *window)


def test_groups_sorted_and_disjoint():
    cloud = build_cloud(sierpinski(1 / 3 - 0.01), 5)
    groups = ranked_distances(build_index(cloud, 1.0), cloud, 7, 0.0, 2.0)
    reps = [g.dist for g in groups]
    assert all(b - a > 1e-12 * max(1.0, b) for a, b in zip(reps, reps[1:]))
    for g in groups:
        assert g.dist == min(r.dist for r in g.records)


def test_ties_grouped():
    # symmetric gasket: the two neighbours of a corner sit at one distance
    cloud = build_cloud(sierpinski(0.25), 2)
    groups = ranked_distances(build_index(cloud, 1.0), cloud, 0, 0.0, 2.0)
    assert len(groups[0].records) == 2
    assert groups[0].weight == pytest.approx(2 / 9)


def test_cumulative_mass():
    cloud = build_cloud(sierpinski(0.2), 4)
    groups = ranked_distances(build_index(cloud, 1.0), cloud, 5, 0.0, 2.0)
    masses = [cumulative_mass_below(groups, j) for j in range(len(groups))]
    assert masses[0] == 0.0
    assert all(b >= a for a, b in zip(masses, masses[1:]))
    assert masses[-1] <= 1.0
    # equal ratios: count of strictly closer partners over m^k
    d = np.sqrt(((cloud.coords - cloud.coords[5]) ** 2).sum(axis=1))
    for j in (1, 4, len(groups) - 1):
        closer = np.sum((d < groups[j].dist - 1e-12) & (np.arange(len(cloud)) != 5))
        assert masses[j] == pytest.approx(closer / 81)


def test_cumulative_mass_index_error():
    with pytest.raises(IndexError):
        cumulative_mass_below([], 0)
