"""Monte Carlo and discrete-event simulators.

These runs use small replication budgets with wide tolerances; the
tight-budget comparisons against the analytic layer live in the
acceptance suite.
"""

import csv
import math
from dataclasses import replace

import numpy as np
import pytest

from cfedge import comm, sim
from cfedge.errors import StabilityError
from cfedge.model import mean_connected_aps
from cfedge.offload import arrival_rates, queue_spectrum
from cfedge.sim import (SpatialScenario, simulate_downlink_sir,
                        simulate_mlcm, simulate_uplink_outage)

from conftest import make_net


class TestScenario:
    def test_for_network_covers_window(self, fig_net):
        sc = SpatialScenario.for_network(fig_net, 10, 1)
        assert sc.half_width == pytest.approx(
            4.0 * fig_net.coverage_radius + sc.guard)
        assert sc.guard > 0

    def test_window_too_small_raises(self, fig_net):
        sc = SpatialScenario(half_width=0.05, guard=0.0, replications=10,
                             seed=1)
        with pytest.raises(ValueError, match="half-width"):
            simulate_uplink_outage(fig_net, sc)

    def test_validation(self):
        with pytest.raises(ValueError):
            SpatialScenario(half_width=1.0, guard=0.1, replications=0, seed=1)
        with pytest.raises(ValueError):
            SpatialScenario(half_width=-1.0, guard=0.1, replications=5, seed=1)


class TestUplink:
    def test_deterministic(self, fig_net):
        sc = SpatialScenario.for_network(fig_net, 400, seed=7)
        a = simulate_uplink_outage(fig_net, sc)
        b = simulate_uplink_outage(fig_net, sc)
        assert a.estimate == b.estimate
        assert a.ap_count_mean == b.ap_count_mean

    def test_seed_changes_stream(self, fig_net):
        a = simulate_uplink_outage(
            fig_net, SpatialScenario.for_network(fig_net, 400, seed=7))
        b = simulate_uplink_outage(
            fig_net, SpatialScenario.for_network(fig_net, 400, seed=8))
        assert a.ap_count_mean != b.ap_count_mean

    def test_ap_count_calibration(self, fig_net):
        sc = SpatialScenario.for_network(fig_net, 3000, seed=11)
        out = simulate_uplink_outage(fig_net, sc)
        nu = mean_connected_aps(fig_net)
        assert abs(out.ap_count_mean - nu) <= 4.0 * out.ap_count_se

    @pytest.mark.parametrize("radius", [0.03, 0.08])
    def test_matches_analytic(self, radius):
        net = make_net(coverage_radius=radius)
        sc = SpatialScenario.for_network(net, 3000, seed=3)
        est, se = simulate_uplink_outage(net, sc)
        assert abs(est - comm.uplink_outage(net)) <= 0.02 + 4.0 * se


class TestDownlink:
    def test_independent_moments(self, fig_net):
        sc = SpatialScenario.for_network(fig_net, 20000, seed=5)
        out = simulate_downlink_sir(fig_net, sc, beam_placement="independent")
        params = comm.gamma_interference_params(fig_net)
        assert abs(out.i_mean - params.mean) <= 4.0 * out.i_mean_se
        # the variance estimator is heavy-tailed at this budget; its own
        # stderr (fourth-moment based) is the only stable yardstick
        assert abs(out.i_var - params.variance) <= 4.0 * out.i_var_se

    @pytest.mark.parametrize("placement", ["per_user", "independent"])
    def test_outage_bounded(self, fig_net, placement):
        sc = SpatialScenario.for_network(fig_net, 500, seed=9)
        out = simulate_downlink_sir(fig_net, sc, beam_placement=placement)
        assert 0.0 <= out.outage <= 1.0
        assert out.outage_se >= 0.0
        assert math.isfinite(out.i_var)

    def test_rejects_unknown_placement(self, fig_net):
        sc = SpatialScenario.for_network(fig_net, 10, seed=1)
        with pytest.raises(ValueError, match="beam_placement"):
            simulate_downlink_sir(fig_net, sc, beam_placement="grid")


class TestQueueRuns:
    def test_deterministic(self, fig_net, mix_comp):
        a = simulate_mlcm(fig_net, mix_comp, 30.0, seed=21, n_mec=2)
        b = simulate_mlcm(fig_net, mix_comp, 30.0, seed=21, n_mec=2)
        assert np.array_equal(a.arrival_s, b.arrival_s)
        assert np.array_equal(a.sojourn_s, b.sojourn_s, equal_nan=True)
        assert np.array_equal(a.server_id, b.server_id)

    def test_drains_and_orders(self, fig_net, mix_comp):
        log = simulate_mlcm(fig_net, mix_comp, 50.0, seed=2, n_mec=3)
        assert not np.any(np.isnan(log.sojourn_s))
        assert np.all(np.diff(log.arrival_s) >= 0.0)
        assert log.arrival_s[-1] <= 50.0
        assert log.server_id.min() >= 0 and log.server_id.max() <= 3
        assert np.all(log.sojourn_s > 0.0)

    def test_snapshot_and_extras(self, fig_net, mix_comp):
        log = simulate_mlcm(fig_net, mix_comp, 20.0, seed=4, n_mec=4)
        snap = log.extras["mec_queue_snapshot"]
        assert snap.shape == (len(log), 4)
        assert log.extras["n_mec"] == 4
        for key in ("lambda_c", "lambda_m", "p_oul"):
            assert key in log.extras

    def test_littles_law_central(self, fig_net, mix_comp):
        log = simulate_mlcm(fig_net, mix_comp, 400.0, seed=6, n_mec=2)
        report = log.littles_law_summary(server_id=0)
        assert report["n"] > 5000
        predicted = report["lambda_hat"] * report["mean_sojourn"]
        spread = (report["l_seen_se"]
                  + report["lambda_hat"] * report["sojourn_se"])
        assert abs(report["l_seen"] - predicted) <= 6.0 * spread + 0.05

    def test_queue_pmf_near_spectrum(self, mix_comp):
        # moderate load, one edge server, everything offloaded: the
        # arrival-seen pmf should sit near the analytic spectrum
        net = make_net(lambda_d=8100.0, coverage_radius=0.1)
        comp = replace(mix_comp, offload_prob=0.0)
        log = simulate_mlcm(net, comp, 600.0, seed=12, n_mec=1, p_oul=0.0)
        rates = arrival_rates(net, comp, p_oul=0.0)
        spec = queue_spectrum(comp, rates.lambda_m)
        pmf = log.queue_length_pmf(server_id=1)
        tv = 0.5 * sum(abs(pmf[v] - spec.pmf(v)) for v in range(len(pmf)))
        tv += 0.5 * spec.tail(len(pmf))
        assert tv <= 0.12
        assert pmf[0] == pytest.approx(spec.pmf(0), abs=0.1)

    def test_overload_detected(self, mix_comp, monkeypatch):
        monkeypatch.setattr(sim, "_MAX_QUEUE", 200)
        net = make_net(lambda_d=60000.0, coverage_radius=0.1)
        comp = replace(mix_comp, offload_prob=0.0)
        with pytest.raises(StabilityError, match="queue exceeded"):
            simulate_mlcm(net, comp, 100.0, seed=1, n_mec=1, p_oul=0.0)

    def test_to_csv_roundtrip(self, fig_net, mix_comp, tmp_path):
        log = simulate_mlcm(fig_net, mix_comp, 10.0, seed=8, n_mec=2)
        path = tmp_path / "events.csv"
        log.to_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["arrival_s", "server_id", "queue_len_seen",
                           "sojourn_s", "type_idx"]
        assert len(rows) == len(log) + 1
        back = np.array([float(r[0]) for r in rows[1:]])
        assert np.array_equal(back, log.arrival_s)

    def test_validation(self, fig_net, mix_comp):
        with pytest.raises(ValueError):
            simulate_mlcm(fig_net, mix_comp, 0.0, seed=1)
        with pytest.raises(ValueError):
            simulate_mlcm(fig_net, mix_comp, 10.0, seed=1, n_mec=-1)

    def test_warmup_mask(self, fig_net, mix_comp):
        log = simulate_mlcm(fig_net, mix_comp, 30.0, seed=3, n_mec=2)
        mask = log.analysis_mask()
        n_warm = int(0.1 * len(log))
        assert not mask[:n_warm].any()
        assert mask.sum() <= len(log) - n_warm
