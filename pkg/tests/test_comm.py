"""Analytic communication layer against independent numeric oracles.

The derivative tables are compared with high-precision finite differences
of the underlying transforms (mpmath), the closed-form tail coefficients
with direct quadrature, and the interference moments with the plain
Campbell integrals they are supposed to equal.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate
import scipy.special as sp

from cfedge import comm
from cfedge.model import NetworkConfig, mean_connected_aps, pathloss

from conftest import make_net

mp.mp.dps = 40


def _mp_log_near(s, net):
    c = mp.mpf(net.d0) ** (-net.alpha)
    return -mp.pi * net.lambda_d * mp.mpf(net.d0) ** 2 * s * c / (1 + s * c)


def _mp_log_far(s, net):
    a = mp.mpf(net.alpha)
    c = mp.mpf(net.d0) ** (-a)
    lead = 2 * mp.pi * net.lambda_d / a * s * mp.mpf(net.d0) ** (2 - a)
    return -lead / (1 - 2 / a) * mp.hyp2f1(1, 1 - 2 / a, 2 - 2 / a, -s * c)


class TestUplinkDerivatives:
    @pytest.mark.parametrize("s", [0.5e-11, 3.7e-11, 2e-10])
    def test_against_mpmath_finite_differences(self, s):
        net = make_net()
        tab = comm.uplink_laplace_derivs(s, 3, net)

        # differentiate in a rescaled variable u = s * K so the step
        # selection sees an O(1) argument
        K = mp.mpf(10) ** 11
        g = lambda u: mp.e ** (_mp_log_near(u / K, net) + _mp_log_far(u / K, net))
        for m in range(4):
            want = float(K ** m * mp.diff(g, mp.mpf(s) * K, m))
            assert tab.li[m] == pytest.approx(want, rel=1e-7), m

    def test_factor_split_consistent(self):
        # the product table must equal the Leibniz combination of factors
        net = make_net()
        tab = comm.uplink_laplace_derivs(1e-10, 4, net)
        for m in range(5):
            want = sum(math.comb(m, i) * tab.f1[i] * tab.f2[m - i]
                       for i in range(m + 1))
            assert tab.li[m] == pytest.approx(want, rel=1e-14)

    def test_sign_alternation(self):
        # the transform is completely monotone
        tab = comm.uplink_laplace_derivs(5e-11, 6, make_net())
        for m, v in enumerate(tab.li):
            assert (-1) ** m * v >= 0.0

    def test_at_zero(self):
        tab = comm.uplink_laplace_derivs(0.0, 2, make_net())
        assert tab.li[0] == pytest.approx(1.0)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            comm.uplink_laplace_derivs(-1.0, 2, make_net())
        with pytest.raises(ValueError):
            comm.uplink_laplace_derivs(1.0, -1, make_net())


@pytest.mark.parametrize("j,s", [(1, 2e-11), (2, 5e-11), (3, 1e-10)])
def test_far_tail_coeff_against_quadrature(j, s):
    # k_j(s) = int_{d0^2}^inf z^(a/2) (z^(a/2) + s)^(-j-1) dz
    net = make_net()
    a = net.alpha
    want = float(mp.quad(
        lambda z: z ** (a / 2) * (z ** (a / 2) + s) ** (-(j + 1)),
        [net.d0 ** 2, mp.inf]))
    got = comm._far_tail_coeff(j, s, net)
    assert got == pytest.approx(want, rel=1e-9)


class TestPerApSuccess:
    def test_against_conditional_monte_carlo(self):
        # P[Gamma(M) ell(r) >= gamma I] with I simulated from the user field
        # directly; conditioning on I and integrating the Gamma tail keeps
        # the noise small.
        net = make_net(coverage_radius=0.05)
        r_ap = 0.03
        gamma_th = net.sir_threshold_ul
        M = net.antennas_per_ap
        half = 0.8
        rng = np.random.default_rng(20260823)
        reps = 4000
        vals = np.empty(reps)
        mean_users = net.lambda_d * (2.0 * half) ** 2
        for i in range(reps):
            n = rng.poisson(mean_users)
            if n == 0:
                vals[i] = 1.0
                continue
            xy = rng.uniform(-half, half, size=(n, 2))
            d = np.sqrt((xy ** 2).sum(axis=1))
            intf = (rng.exponential(size=n) * pathloss(d, net)).sum()
            vals[i] = sp.gammaincc(M, gamma_th * intf / pathloss(r_ap, net))
        mc = vals.mean()
        se = vals.std(ddof=1) / math.sqrt(reps)
        got = comm._single_ap_success_at(r_ap, net)
        assert abs(got - mc) <= 4.0 * se + 1e-4

    def test_radial_average_matches_quadrature(self):
        net = make_net(coverage_radius=0.04)
        want, err = integrate.quad(
            lambda r: r * comm._single_ap_success_at(r, net), 0.0, 0.04,
            epsabs=1e-10, limit=200)
        assert err < 1e-8
        assert comm.per_ap_success(net) == pytest.approx(
            want * 2.0 / 0.04 ** 2, rel=1e-6)

    def test_zero_radius(self):
        assert comm.per_ap_success(make_net(coverage_radius=0.0)) == 0.0

    def test_disc_inside_plateau(self):
        net = make_net(coverage_radius=0.0005, d0=0.001)
        assert comm.per_ap_success(net) == pytest.approx(
            comm._single_ap_success_at(0.0, net))


def test_uplink_outage_composition(fig_net):
    p0 = comm.per_ap_success(fig_net)
    want = math.exp(-mean_connected_aps(fig_net) * p0)
    assert comm.uplink_outage(fig_net) == pytest.approx(want, rel=1e-12)


def test_uplink_outage_monotone_in_radius():
    prev = 1.0
    for R in np.arange(0.02, 0.21, 0.02):
        cur = comm.uplink_outage(make_net(coverage_radius=float(R)))
        assert cur <= prev + 1e-12
        prev = cur


def test_uplink_outage_decreases_with_antennas():
    outs = [comm.uplink_outage(make_net(antennas_per_ap=m)) for m in (1, 2, 4, 8)]
    assert all(b < a for a, b in zip(outs, outs[1:]))


class TestGammaInterference:
    def test_moments_equal_campbell_integrals(self):
        # mean = lam_b * beams * int ell, variance = lam_b * beams *
        # E[e^2] * int ell^2 over the plane, with Exp(1) beam gains
        net = make_net(coverage_radius=0.07)
        params = comm.gamma_interference_params(net)
        beams = net.lambda_d * math.pi * net.coverage_radius ** 2

        def plane_integral(power):
            inner = math.pi * net.d0 ** 2 * pathloss(0.0, net) ** power
            outer, _ = integrate.quad(
                lambda r: 2.0 * math.pi * r * pathloss(r, net) ** power,
                net.d0, np.inf, limit=200)
            return inner + outer

        int_ell = plane_integral(1)
        int_ell2 = plane_integral(2)
        assert params.mean == pytest.approx(net.lambda_b * beams * int_ell,
                                            rel=1e-9)
        assert params.variance == pytest.approx(
            net.lambda_b * beams * 2.0 * int_ell2, rel=1e-9)

    def test_shape_scale_split(self):
        params = comm.gamma_interference_params(make_net())
        assert params.mean == params.zeta * params.eta
        assert params.variance == params.zeta * params.eta ** 2
        assert params.zeta > 0 and params.eta > 0

    def test_shape_scales_with_disc_area(self):
        p1 = comm.gamma_interference_params(make_net(coverage_radius=0.05))
        p2 = comm.gamma_interference_params(make_net(coverage_radius=0.10))
        assert p2.zeta == pytest.approx(4.0 * p1.zeta, rel=1e-12)
        assert p2.eta == pytest.approx(p1.eta, rel=1e-12)


class TestSignalTransform:
    @pytest.mark.parametrize("R", [0.0005, 0.05])
    def test_rho_against_mpmath(self, R):
        # rho(s) = int_0^R (1 - (1 + s ell(r))^-M) r dr and its derivatives
        net = make_net(coverage_radius=R)
        M = net.antennas_per_ap
        s0 = 1.0 / (net.sir_threshold_dl *
                    comm.gamma_interference_params(net).eta)

        K = mp.mpf(10) ** 12

        def rho_scaled(u):
            s = u / K
            return mp.quad(lambda r: (1 - (1 + s * mp.mpf(
                max(r, net.d0)) ** (-net.alpha)) ** (-M)) * r,
                [0, net.d0, R] if R > net.d0 else [0, R])

        tab = comm.rho_derivs(s0, 2, net)
        for m in range(3):
            want = float(K ** m * mp.diff(rho_scaled, mp.mpf(s0) * K, m))
            assert tab.values[m] == pytest.approx(want, rel=1e-6), m

    def test_signal_laplace_is_completely_monotone(self, fig_net):
        s0 = 0.5 / (fig_net.sir_threshold_dl *
                    comm.gamma_interference_params(fig_net).eta)
        lp = comm.signal_laplace_derivs(s0, 4, fig_net)
        assert 0.0 < lp[0] <= 1.0
        for m, v in enumerate(lp):
            assert (-1) ** m * v >= 0.0

    def test_rho_rejects_negative_argument(self, fig_net):
        with pytest.raises(ValueError):
            comm.rho_derivs(-0.1, 1, fig_net)


class TestDownlinkOutage:
    def test_bracket_ordering(self):
        for R in (0.02, 0.05, 0.1, 0.2):
            out = comm.downlink_outage(make_net(coverage_radius=R))
            assert 0.0 <= out.lower <= out.point <= out.upper <= 1.0

    def test_point_interpolates(self, fig_net):
        out = comm.downlink_outage(fig_net)
        zeta = comm.gamma_interference_params(fig_net).zeta
        frac = zeta - math.floor(zeta)
        want = (1.0 - frac) * out.lower + frac * out.upper
        assert out.point == pytest.approx(want, rel=1e-12)

    def test_degenerate_zero_radius(self):
        out = comm.downlink_outage(make_net(coverage_radius=0.0))
        assert out.degenerate
        assert (out.lower, out.upper, out.point) == (0.0, 0.0, 0.0)

    def test_tuple_protocol(self, fig_net):
        lower, upper, point = comm.downlink_outage(fig_net)
        assert lower <= point <= upper

    def test_truncation_increasing_in_shape(self, fig_net):
        params = comm.gamma_interference_params(fig_net)
        vals = [comm._truncated_outage_sum(k, fig_net, params)
                for k in range(6)]
        assert vals[0] == 0.0
        assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


def test_scmp_composition(fig_net):
    want = (1.0 - comm.uplink_outage(fig_net)) \
        * (1.0 - comm.downlink_outage(fig_net).point)
    assert comm.scmp(fig_net) == pytest.approx(want, rel=1e-12)


def test_scmp_unimodal_over_radius():
    # rises while connectivity improves, falls once the downlink penalty
    # dominates; checked as at most one sign change of the differences
    vals = [comm.scmp(make_net(coverage_radius=float(R)))
            for R in np.arange(0.01, 0.21, 0.01)]
    diffs = np.diff(vals)
    signs = np.sign(diffs[np.abs(diffs) > 1e-12])
    changes = int(np.sum(signs[1:] != signs[:-1]))
    assert changes <= 1
    assert vals[0] < max(vals)
