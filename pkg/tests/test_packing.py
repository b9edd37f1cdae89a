import math

import numpy as np
import pytest

from ssmeasure import (build_cloud, build_index, cantor, cumulative_mass_below,
                       detect_stabilization, estimate_packing, packing_error_bound, planar_cantor,
                       ranked_distances, run_packing, sierpinski)
from ssmeasure.errors import CapacityExceeded, WindowInfeasible
from ssmeasure.formulas import closed_form


class TestErrorBound:
    def test_cantor_quarter(self):
        eps, b = packing_error_bound(cantor(0.25), 20)
        assert b.q_k == 1 and b.Q == pytest.approx(math.sqrt(2), rel=1e-9)
        assert f"{eps:.5e}" == "3.63798e-12"

    def test_sierpinski_1_27(self):
        eps, b = packing_error_bound(sierpinski(1 / 27), 10)
        assert b.q_k == 1 and f"{b.Q:.5f}" == "1.05265"
        assert f"{eps:.5e}" == "1.28830e-14"

    def test_cantor_045(self):
        eps, b = packing_error_bound(cantor(0.45), 20)
        assert b.q_k == 3 and f"{b.Q:.5f}" == "1.35502"
        assert f"{eps:.5e}" == "3.98266e-06"

    @pytest.mark.parametrize("system", [cantor(0.3), sierpinski(0.42), planar_cantor(0.2)],
                             ids=["C", "S", "K"])
    def test_sandwich(self, system):
        C = system.constants
        for k in range(8, 15):
            _, b = packing_error_bound(system, k)
            assert C.R_hi * C.r_max ** b.q_k <= b.window_lo < C.R_hi * C.r_max ** (b.q_k - 1)
            assert b.window_hi == C.c_hi / C.r_min

    def test_q_branch_by_dimension(self):
        _, b = packing_error_bound(sierpinski(0.42), 8)   # s > 1
        C = sierpinski(0.42).constants
        assert b.Q == pytest.approx((C.c_hi / C.r_min) ** (C.s - 1))

    def test_infeasible(self):
        with pytest.raises(WindowInfeasible):
            packing_error_bound(cantor(0.25), 1)

    def test_decays_like_r_max(self):
        system = cantor(0.45)
        eps = [packing_error_bound(system, k)[0] for k in range(12, 16)]
        for a, b in zip(eps, eps[1:]):
            assert b / a == pytest.approx(0.45, rel=1e-3)


class TestEstimate:
    def test_cantor_quarter(self):
        est = estimate_packing(cantor(0.25), 3)
        assert f"{est.value:.12f}" == "2.449489742783"

    def test_sierpinski_042_level5(self):
        est = estimate_packing(sierpinski(0.42), 5)
        assert f"{est.value:.8f}" == "3.67050829"
        assert f"{est.witness_radius:.8f}" == "0.26055578"
        np.testing.assert_array_equal(est.witness_center, [0.0, 0.0])
        lo, hi = est.interval
        assert math.floor(lo * 1e8) / 1e8 == pytest.approx(2.00793066)
        assert math.ceil(hi * 1e8) / 1e8 == pytest.approx(5.33308593)

    def test_planar_quarter(self):
        assert f"{estimate_packing(planar_cantor(0.25), 3).value:.12f}" == "6.000000000000"

    def test_witness_recomputes(self):
        est = estimate_packing(sierpinski(0.3), 5)
        assert est.recompute() == est.value
        assert est.interval == (est.value - est.epsilon, est.value + est.epsilon)

    @pytest.mark.parametrize("system", [cantor(0.4), sierpinski(0.3), planar_cantor(0.35)],
                             ids=["C", "S", "K"])
    def test_witness_in_window_and_mass_floor(self, system):
        for k in range(5, 8):
            est = estimate_packing(system, k)
            b = est.bound
            assert b.window_lo <= est.witness_radius <= b.window_hi
            assert est.witness_mass >= system.constants.r_min ** (b.q_k * system.s) * (1 - 1e-12)
            d = np.linalg.norm(est.witness_center - est.witness_partner)
            assert d == pytest.approx(est.witness_radius, rel=1e-12)

    def test_matches_neighbors_scan(self):
        """Per-center maximum rebuilt from ranked_distances with the center included."""
        system = sierpinski(0.35)
        k = 4
        est = estimate_packing(system, k)
        cloud = build_cloud(system, k)
        lo, hi = est.bound.window_lo, est.bound.window_hi
        index = build_index(cloud, hi)
        best = -1.0
        for x in range(len(cloud)):
            groups = ranked_distances(index, cloud, x, 0.0, hi, include_center=True)
            for j, g in enumerate(groups):
                if g.dist >= lo:
                    best = max(best, (2 * g.dist) ** system.s / cumulative_mass_below(groups, j))
        assert best == pytest.approx(est.value, rel=1e-12)

    def test_closed_form_within_bound(self):
        system = sierpinski(0.25)
        g = closed_form("g1", 0.25, "sierpinski").value
        for est in run_packing(system, 2, 6):
            assert abs(est.value - g) <= est.epsilon

    def test_capacity(self):
        with pytest.raises(CapacityExceeded):
            estimate_packing(sierpinski(0.2), 9, budget=10_000)

    def test_run_skips_infeasible(self):
        ests = run_packing(cantor(0.25), 1, 4)
        assert [e.level for e in ests] == [2, 3, 4]
        with pytest.raises(WindowInfeasible):
            run_packing(cantor(0.25), 1, 4, skip_infeasible=False)


class TestStabilization:
    def test_cantor_quarter(self):
        assert detect_stabilization(run_packing(cantor(0.25), 1, 8)) == 2

    def test_changing(self):
        assert detect_stabilization([1.0, 1.1, 1.2]) is None

    def test_floats_with_levels(self):
        assert detect_stabilization([3.0, 2.5, 2.5, 2.5], ks=[4, 5, 6, 7]) == 5

    def test_rounding_to_14_places(self):
        assert detect_stabilization([1.0, 2.0 + 1e-16, 2.0]) == 2

    def test_needs_two(self):
        with pytest.raises(ValueError):
            detect_stabilization([1.0])
