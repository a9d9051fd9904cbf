import math

import numpy as np
import pytest

from tandem_polling import (
    InvalidParams,
    NetworkParams,
    Phase,
    ReducibleChain,
    ZeroThroughput,
    analyze,
    analyze_full_chain,
    analyze_product,
    build_full_generator,
    queue_lengths,
    report,
    solve_stationary,
    solve_subsystem,
    throughput,
    waiting_times,
)
from tandem_polling.measures import marginal_subsystem
from tandem_polling.tables import panel_params

FIELDS = ("th_i1", "th_i2", "L_i1", "L_i2", "w_i1", "w_i2", "w_i", "loss_i1", "loss_i2")


class TestPublishedValues:
    def test_table2_top_sp_n3(self, table2_top):
        r = analyze(table2_top, "SP")[1]
        assert round(r.th_i1, 2) == 0.94
        assert round(r.th_i2, 2) == 0.70
        assert round(r.w_i, 2) == 3.85

    def test_table2_top_op_n3(self, table2_top):
        r = analyze(table2_top, "OP")[1]
        assert round(r.th_i2, 2) == 0.54
        assert round(r.w_i, 2) == 4.02

    def test_table3_top_sp_n3(self):
        r = analyze(panel_params(3, "top", 3), "SP")[1]
        assert (round(r.w_i1, 2), round(r.w_i2, 2), round(r.w_i, 2)) == (1.34, 2.15, 3.49)

    def test_table3_bottom_sp_n15_total(self):
        # printed 22.27 equals the W_i2 column; the sum is 0.90 + 22.27
        r = analyze(panel_params(3, "bottom", 15), "SP")[1]
        assert r.w_i == pytest.approx(23.17, abs=0.01)
        assert r.w_i == r.w_i1 + r.w_i2

    def test_station2_loss_table2(self, table2_top):
        r = analyze(table2_top, "SP")[1]
        assert r.loss_i2 == pytest.approx(0.24, abs=0.01)


class TestIdentities:
    @pytest.mark.parametrize("strategy", ["SP", "OP"])
    def test_flow_balance(self, asymmetric, strategy):
        rep = analyze(asymmetric, strategy)
        for i in (1, 2):
            r = rep[i]
            assert r.th_i1 == pytest.approx(asymmetric.lam(i) - r.loss_i1, abs=1e-9)
            assert r.th_i2 == pytest.approx(r.th_i1 - r.loss_i2, abs=1e-9)
            assert 0 <= r.th_i2 <= r.th_i1 <= asymmetric.lam(i) + 1e-12
            assert r.w_i1 == r.L_i1 / r.th_i1
            assert r.w_i2 == r.L_i2 / r.th_i2
            assert r.w_i == r.w_i1 + r.w_i2

    def test_wip(self, asymmetric):
        rep = analyze(asymmetric, "OP")
        assert rep.wip == pytest.approx(sum(rep[i].L_i1 + rep[i].L_i2 for i in (1, 2)))
        assert rep[1].wip_total == rep[1].L_i1 + rep[1].L_i2

    @pytest.mark.parametrize("strategy", ["SP", "OP"])
    def test_product_symmetry(self, strategy):
        rep = analyze(NetworkParams.symmetric(1.0, 2.5, 4.0, 5.0, 5), strategy)
        assert abs(rep[1].w_i - rep[2].w_i) <= 1e-9
        assert abs(rep[1].th_i1 - rep[2].th_i1) <= 1e-9

    def test_station_asymmetry_identical_products(self):
        rep = analyze(panel_params(3, "bottom", 6), "OP")
        assert rep[1].w_i1 == pytest.approx(rep[2].w_i1, abs=1e-9)
        assert rep[1].w_i2 == pytest.approx(rep[2].w_i2, abs=1e-9)

    def test_station1_is_strategy_independent(self):
        p = NetworkParams(1.0, 0.8, 3.0, 2.5, 1e6, 1e6, 5.0, 4.0, 4, 4)
        sp_, op = analyze(p, "SP"), analyze(p, "OP")
        for i in (1, 2):
            assert abs(sp_[i].w_i1 - op[i].w_i1) <= 1e-6
            assert abs(sp_[i].th_i1 - op[i].th_i1) <= 1e-6

    def test_light_traffic(self):
        # station 1 empties as arrivals vanish
        for strategy in ("SP", "OP"):
            r = analyze(NetworkParams(1e-7, 1.0, 4, 4, 4, 4, 5, 5, 3, 3), strategy)[1]
            assert r.L_i1 < 1e-6
        # under OP the type-2 visits keep draining the type-1 station-2 queue
        r = analyze(NetworkParams(1e-7, 1.0, 4, 4, 4, 4, 5, 5, 3, 3), "OP")[1]
        assert r.L_i2 < 1e-6

    def test_light_traffic_strands_station2_under_sp(self):
        # a type-1 completion always ends the U1 visit that produced it, so
        # station 2 can only work off older units; with rare visits the
        # station-2 queue stays near its cap instead of emptying
        r = analyze(NetworkParams(1e-7, 1.0, 4, 4, 4, 4, 5, 5, 3, 3), "SP")[1]
        assert r.L_i2 == pytest.approx(2.25, abs=1e-4)

    def test_losses_vanish_with_buffer_size(self):
        losses = {}
        for n in (5, 10, 20):
            for strategy in ("SP", "OP"):
                r = analyze(NetworkParams.symmetric(1.0, 4.0, 4.0, 5.0, n), strategy)[1]
                losses[n, strategy] = (r.loss_i1, r.loss_i2)
        for strategy in ("SP", "OP"):
            l1 = [losses[n, strategy][0] for n in (5, 10, 20)]
            l2 = [losses[n, strategy][1] for n in (5, 10, 20)]
            assert l1[2] < 1e-6
            assert l2[0] > l2[1] > l2[2]
            # station-2 loss decays roughly like 1/n
            assert 1.5 < l2[1] / l2[2] < 2.5


class TestDecompositionExactness:
    @pytest.mark.parametrize("strategy", ["SP", "OP"])
    def test_marginal_equals_subsystem(self, asymmetric, strategy):
        gen = build_full_generator(asymmetric, strategy)
        full = solve_stationary(gen)
        for product in (1, 2):
            sub = solve_subsystem(asymmetric, strategy, product).dist.probabilities
            np.testing.assert_allclose(
                marginal_subsystem(full, gen.space, product), sub, atol=1e-12
            )

    @pytest.mark.parametrize("strategy", ["SP", "OP"])
    def test_measures_match_full_chain(self, asymmetric, strategy):
        dec = analyze(asymmetric, strategy)
        full, _, _ = analyze_full_chain(asymmetric, strategy)
        for i in (1, 2):
            for name in FIELDS:
                assert getattr(dec[i], name) == pytest.approx(getattr(full[i], name), abs=1e-8)


class TestErrors:
    def test_zero_throughput(self):
        with pytest.raises(ZeroThroughput):
            waiting_times(0.0, 0.5, 0.0, 1.0)
        assert waiting_times(0.5, 0.25, 1.0, 1.0) == (2.0, 4.0, 6.0)

    def test_zero_arrivals_freeze_station2(self):
        # without type-1 arrivals U1 never recurs under SP, so every level of
        # the type-1 station-2 queue is its own closed class
        p = NetworkParams(0.0, 1.0, 4, 4, 4, 4, 5, 5, 2, 2)
        with pytest.raises(ReducibleChain):
            analyze(p, "SP")
        assert analyze_product(p, "SP", 2).th_i1 == pytest.approx(
            analyze_product(p.with_buffers(2, 2), "OP", 2).th_i1
        )

    def test_zero_throughput_reported_as_nan(self, table2_top):
        sol = solve_subsystem(table2_top, "SP", 1)
        idle = np.zeros(sol.space.size)
        idle[sol.space.index_of((0, 0, Phase.S1, 0))] = 1.0
        r = report(idle, table2_top, "SP", 1)
        assert r.th_i1 == 0 and r.th_i2 == 0
        assert math.isnan(r.w_i1) and math.isnan(r.w_i2) and math.isnan(r.w_i)

    def test_mismatched_distribution(self, table2_top):
        sol = solve_subsystem(table2_top, "SP", 1)
        with pytest.raises(InvalidParams):
            throughput(sol.dist, table2_top.with_buffers(2, 2), "SP", 1)
        with pytest.raises(InvalidParams):
            queue_lengths(np.ones(3), table2_top, 2)
