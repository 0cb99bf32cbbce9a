"""Analytic communication layer.

Uplink: outage of the best-AP combiner over a Poisson field of APs inside
the cooperation disc, with interference from all other users under bounded
pathloss. Downlink: moment-matched Gamma model for the beam interference,
outage bracketed by integer-shape truncations, and the joint uplink plus
downlink success probability.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.special as sp
from scipy import integrate

from .errors import NumericalError
from .model import NetworkConfig, mean_connected_aps, pathloss
from .specfun import gamma_expectation, hyp2f1

_CLAMP_WARN = 1e-6

# ----------------------------------------------------------------------------
# uplink: interference Laplace transform and its derivatives
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class LaplaceDerivativeTable:
    """Derivatives of the uplink interference transform at one point.

    f1, f2 hold the near-field and far-field factors with derivatives of
    order 0..max_order; li holds the product transform. Entry m is the
    m-th derivative, so (-1)^m li[m] >= 0.
    """

    s: float
    f1: tuple
    f2: tuple
    li: tuple

    @property
    def max_order(self) -> int:
        return len(self.li) - 1


def _log_near_derivs(s: float, jmax: int, net: NetworkConfig) -> list:
    # log F1 and derivatives; F1 covers interferers inside the pathloss
    # plateau. log F1 = -pi lambda_d d0^2 sc/(1+sc) with c = d0^(-alpha).
    c = net.d0 ** (-net.alpha)
    base = 1.0 + s * c
    amp = math.pi * net.lambda_d * net.d0 ** 2
    out = [-amp * s * c / base]
    for j in range(1, jmax + 1):
        out.append((-1) ** j * amp * math.factorial(j) * c ** j / base ** (j + 1))
    return out


def _far_tail_coeff(j: int, s: float, net: NetworkConfig) -> float:
    # k_j(s) = int_{d0^2}^inf z^(a/2) (z^(a/2)+s)^(-j-1) dz in closed form
    a = net.alpha
    c = net.d0 ** (-a)
    return (2.0 / a) * net.d0 ** 2 * c ** j / (j - 2.0 / a) \
        * hyp2f1(j + 1, j - 2.0 / a, j - 2.0 / a + 1.0, -s * c)


def _log_far_derivs(s: float, jmax: int, net: NetworkConfig) -> list:
    # log F2 and derivatives; F2 covers interferers beyond the plateau.
    a = net.alpha
    c = net.d0 ** (-a)
    lead = -(2.0 * math.pi * net.lambda_d / a) * s * net.d0 ** (2.0 - a) \
        / (1.0 - 2.0 / a) * hyp2f1(1.0, 1.0 - 2.0 / a, 2.0 - 2.0 / a, -s * c)
    out = [lead]
    for j in range(1, jmax + 1):
        out.append((-1) ** j * math.pi * net.lambda_d * math.factorial(j)
                   * _far_tail_coeff(j, s, net))
    return out


def _exp_derivs(log_derivs: list) -> list:
    # derivatives of exp(phi) from derivatives of phi via the product rule
    # on F' = phi' F
    f = [math.exp(log_derivs[0])]
    for m in range(1, len(log_derivs)):
        acc = 0.0
        for i in range(m):
            acc += math.comb(m - 1, i) * log_derivs[m - i] * f[i]
        f.append(acc)
    return f


def uplink_laplace_derivs(s: float, max_order: int,
                          net: NetworkConfig) -> LaplaceDerivativeTable:
    """Interference transform factors and derivatives up to max_order at s."""
    if s < 0:
        raise ValueError("transform argument must be non-negative")
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    f1 = _exp_derivs(_log_near_derivs(s, max_order, net))
    f2 = _exp_derivs(_log_far_derivs(s, max_order, net))
    li = []
    for m in range(max_order + 1):
        li.append(sum(math.comb(m, i) * f1[i] * f2[m - i] for i in range(m + 1)))
    return LaplaceDerivativeTable(s=s, f1=tuple(f1), f2=tuple(f2), li=tuple(li))


def _single_ap_success_at(r: float, net: NetworkConfig) -> float:
    # P[one AP at distance r decodes]: the diversity-order expansion of the
    # Gamma CDF puts a factor (threshold / pathloss)**m on each derivative
    # term, not pathloss**-m alone. The Monte Carlo suite pins this form.
    ell = pathloss(r, net)
    s = net.sir_threshold_ul / ell
    tab = uplink_laplace_derivs(s, net.antennas_per_ap - 1, net)
    total = 0.0
    for m in range(net.antennas_per_ap):
        total += (-1) ** m * s ** m / math.factorial(m) * tab.li[m]
    return total


def per_ap_success(net: NetworkConfig) -> float:
    """Success probability of a single AP at uniform distance in the disc."""
    R = net.coverage_radius
    if R <= 0.0:
        return 0.0
    plateau = _single_ap_success_at(0.0, net)
    if R <= net.d0:
        return _clamp_probability(plateau, "per_ap_success")
    inner = plateau * net.d0 ** 2 / 2.0
    val, err = integrate.quad(lambda r: r * _single_ap_success_at(r, net),
                              net.d0, R, epsabs=1e-9, epsrel=1e-9, limit=200)
    if err > 1e-7:
        raise NumericalError(f"radial success integral did not converge (err {err:.2e})")
    return _clamp_probability((inner + val) * 2.0 / R ** 2, "per_ap_success")


def uplink_outage(net: NetworkConfig) -> float:
    """P[no connected AP decodes the uplink], exp(-mean APs * per-AP success)."""
    return _clamp_probability(
        math.exp(-mean_connected_aps(net) * per_ap_success(net)), "uplink_outage")


def _clamp_probability(x: float, label: str) -> float:
    if not math.isfinite(x):
        raise NumericalError(f"{label} produced a non-finite value")
    if x < -_CLAMP_WARN or x > 1.0 + _CLAMP_WARN:
        warnings.warn(f"{label} clamped from {x!r} into [0, 1]", stacklevel=3)
    return min(1.0, max(0.0, x))


# ----------------------------------------------------------------------------
# downlink: Gamma interference model
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaInterferenceParams:
    """Moment-matched Gamma(shape, scale) model of the beam interference."""

    zeta: float   # shape
    eta: float    # scale

    @property
    def mean(self) -> float:
        return self.zeta * self.eta

    @property
    def variance(self) -> float:
        return self.zeta * self.eta ** 2


def gamma_interference_params(net: NetworkConfig) -> GammaInterferenceParams:
    a = net.alpha
    zeta = a * (a - 1.0) / (2.0 * (a - 2.0) ** 2) * net.lambda_b * net.lambda_d \
        * math.pi ** 2 * net.coverage_radius ** 2 * net.d0 ** 2
    eta = 2.0 * net.d0 ** (-a) * (a - 2.0) / (a - 1.0)
    return GammaInterferenceParams(zeta=zeta, eta=eta)


@dataclass(frozen=True)
class RhoDerivativeTable:
    """Exponent of the aggregate signal transform with derivatives 0..max_order.

    Sign structure: (-1)^(m-1) * values[m] >= 0 for m >= 1.
    """

    s: float
    values: tuple

    @property
    def max_order(self) -> int:
        return len(self.values) - 1


def rho_derivs(s: float, max_order: int, net: NetworkConfig) -> RhoDerivativeTable:
    """Signal-transform exponent: radial integral over the disc with Gamma gains."""
    if s < 0:
        raise ValueError("transform argument must be non-negative")
    a = net.alpha
    M = net.antennas_per_ap
    R = net.coverage_radius
    d0 = net.d0
    cd = d0 ** (-a)
    vals = []
    if R <= d0:
        # the whole disc sits on the pathloss plateau
        vals.append(0.5 * R ** 2 * (1.0 - (1.0 + s * cd) ** (-M)))
        for m in range(1, max_order + 1):
            vals.append((-1) ** (m - 1) * 0.5 * R ** 2 * cd ** m
                        * _tilted_moment(M, m, s * cd))
        return RhoDerivativeTable(s=s, values=tuple(vals))

    cr = R ** (-a)
    two_a = 2.0 / a
    head = 0.5 * R ** 2 * (1.0 - (1.0 + s * cr) ** (-M))
    if s == 0.0:
        return RhoDerivativeTable(s=0.0, values=tuple([0.0] + [
            (-1) ** (m - 1) * (0.5 * d0 ** 2 * cd ** m * _tilted_moment(M, m, 0.0)
                               + _zero_point_tail(m, net)) for m in range(1, max_order + 1)]))

    gamma_arg0 = 1.0 - two_a

    def f0(g):
        return g ** two_a * (sp.gammaincc(gamma_arg0, s * g * cr)
                             - sp.gammaincc(gamma_arg0, s * g * cd)) * sp.gamma(gamma_arg0)

    vals.append(head + 0.5 * s ** two_a * gamma_expectation(f0, M))
    for m in range(1, max_order + 1):
        arg = m - two_a

        def fm(g, arg=arg):
            return g ** two_a * (sp.gammaincc(arg, s * g * cr)
                                 - sp.gammaincc(arg, s * g * cd)) * sp.gamma(arg)

        term1 = 0.5 * d0 ** 2 * cd ** m * _tilted_moment(M, m, s * cd)
        term2 = (1.0 / a) * s ** (two_a - m) * gamma_expectation(fm, M)
        vals.append((-1) ** (m - 1) * (term1 + term2))
    return RhoDerivativeTable(s=s, values=tuple(vals))


def _tilted_moment(M: int, m: int, x: float) -> float:
    # E[g^m e^(-x g)] for g ~ Gamma(M, 1)
    return sp.gamma(M + m) / sp.gamma(M) / (1.0 + x) ** (M + m)


def _zero_point_tail(m: int, net: NetworkConfig) -> float:
    # limit s -> 0 of the annulus part of the m-th derivative magnitude:
    # E[g^m] int_{d0}^R r^(1 - m alpha) dr
    a = net.alpha
    M = net.antennas_per_ap
    mom = sp.gamma(M + m) / sp.gamma(M)
    p = 2.0 - m * a
    if abs(p) < 1e-12:
        radial = math.log(net.coverage_radius / net.d0)
    else:
        radial = (net.coverage_radius ** p - net.d0 ** p) / p
    return mom * radial


def signal_laplace_derivs(s: float, max_order: int, net: NetworkConfig) -> tuple:
    """Aggregate downlink signal transform with derivatives 0..max_order at s."""
    rho = rho_derivs(s, max_order, net)
    amp = 2.0 * math.pi * net.lambda_b
    lp = [math.exp(-amp * rho.values[0])]
    for m in range(1, max_order + 1):
        acc = 0.0
        for i in range(m):
            acc += math.comb(m - 1, i) * lp[i] * rho.values[m - i]
        lp.append(-amp * acc)
    return tuple(lp)


@dataclass(frozen=True)
class DownlinkOutage:
    """Downlink outage bracket and interpolated point estimate."""

    lower: float
    upper: float
    point: float
    degenerate: bool = False

    def __iter__(self):
        return iter((self.lower, self.upper, self.point))


def _truncated_outage_sum(k0: int, net: NetworkConfig,
                          params: GammaInterferenceParams) -> float:
    # P[aggregate signal < threshold * I] when I has integer shape k0
    if k0 == 0:
        return 0.0
    s_star = 1.0 / (net.sir_threshold_dl * params.eta)
    lp = signal_laplace_derivs(s_star, k0 - 1, net)
    total = 0.0
    for m in range(k0):
        total += (-1) ** m * s_star ** m / math.factorial(m) * lp[m]
    return total


def downlink_outage(net: NetworkConfig) -> DownlinkOutage:
    """Outage bracket from floor/ceil integer shapes plus a point estimate.

    The truncated series is increasing in the integer shape, so the floor
    truncation is the lower bound and the ceil truncation the upper. The
    point estimate interpolates linearly in the fractional shape.
    """
    params = gamma_interference_params(net)
    zeta = params.zeta
    if zeta == 0.0:
        return DownlinkOutage(0.0, 0.0, 0.0, degenerate=True)
    if zeta > 2000.0:
        raise NumericalError(f"interference shape {zeta:.1f} too large to truncate")
    k_lo = math.floor(zeta)
    k_hi = math.ceil(zeta)
    lower = _clamp_probability(_truncated_outage_sum(k_lo, net, params),
                               "downlink_outage")
    if k_hi == k_lo:
        return DownlinkOutage(lower, lower, lower)
    upper = _clamp_probability(_truncated_outage_sum(k_hi, net, params),
                               "downlink_outage")
    frac = zeta - k_lo
    point = (1.0 - frac) * lower + frac * upper
    return DownlinkOutage(lower, upper, min(1.0, max(0.0, point)))


# ----------------------------------------------------------------------------
# joint communication success
# ----------------------------------------------------------------------------


def scmp(net: NetworkConfig) -> float:
    """P[uplink and downlink both succeed], using the downlink point estimate."""
    return (1.0 - uplink_outage(net)) * (1.0 - downlink_outage(net).point)
