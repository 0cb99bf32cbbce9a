"""Task offloading and queueing layer.

Arrival rates at the central server and at a typical edge server follow
from thinning the user field by the uplink success probability and by the
minimum-load dispatch rule. Each edge server is an M/G/1 queue with
hyperexponential service; its stationary queue length has a geometric
mixture form whose roots and weights are computed here, and the latency
CDFs come from numerical transform inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import comm
from .errors import InfeasibilityError, NumericalError, StabilityError
from .model import ComputeConfig, NetworkConfig, mean_connected_aps, stability_report
from .specfun import (DEFAULT_INVERSION, LaplaceInversionSettings,
                      invert_laplace_cdf, poly_roots_real)

_POISSON_TAIL = 1e-10
_GEO_TAIL = 1e-10

# ----------------------------------------------------------------------------
# arrival rates
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ArrivalRates:
    lambda_c: float   # tasks/s entering the central server (network-wide)
    lambda_o: float   # offload candidates/s seen by one edge server
    lambda_m: float   # tasks/s actually joining one edge server


def min_dispatch_prob(nu: float) -> float:
    """P[a candidate's server is the minimum-load choice], (1 - e^-nu)/nu."""
    if nu < 0:
        raise ValueError("mean server count cannot be negative")
    if nu < 1e-8:
        return 1.0 - nu / 2.0
    return -math.expm1(-nu) / nu


def arrival_rates(net: NetworkConfig, comp: ComputeConfig,
                  p_oul: float | None = None) -> ArrivalRates:
    """Thinned task arrival rates given the uplink outage probability."""
    if p_oul is None:
        p_oul = comm.uplink_outage(net)
    success = 1.0 - p_oul
    lam_c = comp.offload_prob * net.lambda_d * net.network_area * success
    lam_o = (1.0 - comp.offload_prob) * net.lambda_d \
        * math.pi * net.coverage_radius ** 2 * success
    lam_m = lam_o * min_dispatch_prob(mean_connected_aps(net))
    return ArrivalRates(lambda_c=lam_c, lambda_o=lam_o, lambda_m=lam_m)


# ----------------------------------------------------------------------------
# stationary queue-length spectrum of one edge server
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class QueueSpectrum:
    """Geometric-mixture form of the stationary queue length.

    P[N = v] = sum_i weights[i] * roots[i]^v, with P[N >= v] available in
    closed form because |roots[i]| < 1.
    """

    roots: tuple
    weights: tuple
    rho_m: float

    def pmf(self, v: int) -> float:
        return float(sum(w * r ** v for w, r in zip(self.weights, self.roots)))

    def tail(self, v: int) -> float:
        """P[N >= v]."""
        return float(sum(w * r ** v / (1.0 - r)
                         for w, r in zip(self.weights, self.roots)))

    @property
    def max_root(self) -> float:
        return max(abs(r) for r in self.roots)


def _mixture_poly(weights, rates, lam):
    # A(z) = sum_l p_l mu_l prod_{k != l} (mu_k + lam - lam z), ascending coeffs
    poly = np.polynomial.polynomial
    acc = np.zeros(1)
    for l, (p, mu) in enumerate(zip(weights, rates)):
        term = np.array([p * mu])
        for k, mu_k in enumerate(rates):
            if k != l:
                term = poly.polymul(term, np.array([mu_k + lam, -lam]))
        acc = poly.polyadd(acc, term)
    return acc


def queue_spectrum(comp: ComputeConfig, lambda_m: float) -> QueueSpectrum:
    """Roots and weights of the edge-server queue-length distribution."""
    if lambda_m < 0:
        raise ValueError("arrival rate cannot be negative")
    n = comp.num_types
    if lambda_m == 0.0:
        return QueueSpectrum(roots=(0.0,) * n,
                             weights=(1.0,) + (0.0,) * (n - 1), rho_m=0.0)
    rho = lambda_m * comp.mean_service_time_mec
    if rho >= 1.0:
        raise StabilityError(f"edge server unstable: rho_m = {rho:.4f} >= 1")
    if n == 1:
        return QueueSpectrum(roots=(rho,), weights=(1.0 - rho,), rho_m=rho)
    if rho < 1e-6:
        # all roots collapse toward 0 together and the weight system loses
        # rank; the queue is empty up to O(rho), which is below every
        # tolerance this value feeds
        return QueueSpectrum(roots=(0.0,) * n,
                             weights=(1.0,) + (0.0,) * (n - 1), rho_m=rho)

    poly = np.polynomial.polynomial
    lam = lambda_m
    mus = comp.mu_m
    # root equation: omega^2 * A-type sum = prod_q ((mu_q + lam) omega - lam);
    # omega = 1 always solves it and is deflated before root finding
    rhs = np.array([1.0])
    for mu in mus:
        rhs = poly.polymul(rhs, np.array([-lam, mu + lam]))
    lhs = np.zeros(1)
    for l, (p, mu) in enumerate(zip(comp.type_probs, mus)):
        term = np.array([p * mu])
        for k, mu_k in enumerate(mus):
            if k != l:
                term = poly.polymul(term, np.array([-lam, mu_k + lam]))
        lhs = poly.polyadd(lhs, term)
    full = poly.polysub(rhs, poly.polymul(np.array([0.0, 0.0, 1.0]), lhs))
    quotient, remainder = poly.polydiv(full, np.array([-1.0, 1.0]))
    if np.max(np.abs(remainder)) > 1e-6 * np.max(np.abs(full)):
        raise NumericalError("structural root omega = 1 missing from queue polynomial")
    roots, _ = poly_roots_real(quotient)
    roots = roots[(roots > -1.0) & (roots < 1.0)]
    if len(roots) != n:
        raise NumericalError(
            f"expected {n} queue-length roots inside the unit interval, "
            f"found {len(roots)}")

    # weights from matching sum_q eps_q prod_{r != q}(1 - omega_r z)
    # against (1 - rho) A(z)/A(0) coefficient by coefficient
    a_poly = _mixture_poly(comp.type_probs, mus, lam)
    target = (1.0 - rho) * a_poly / a_poly[0]
    mat = np.zeros((n, n))
    for q in range(n):
        col = np.array([1.0])
        for r_i, w in enumerate(roots):
            if r_i != q:
                col = poly.polymul(col, np.array([1.0, -w]))
        mat[:len(col), q] = col
    rhs_vec = np.zeros(n)
    rhs_vec[:len(target)] = target
    try:
        eps = np.linalg.solve(mat, rhs_vec)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"queue weight system is singular: {exc}") from exc

    spectrum = QueueSpectrum(roots=tuple(float(r) for r in roots),
                             weights=tuple(float(e) for e in eps), rho_m=rho)
    _validate_spectrum(spectrum)
    return spectrum


def _validate_spectrum(spec: QueueSpectrum) -> None:
    total = spec.tail(0)
    if abs(total - 1.0) > 1e-9:
        raise NumericalError(f"queue spectrum mass {total!r} differs from 1")
    for v in range(0, 200, 7):
        if spec.pmf(v) < -1e-12:
            raise NumericalError(f"queue spectrum pmf negative at v = {v}")


def min_queue_pmf(spectrum: QueueSpectrum, n: int, v: int) -> float:
    """P[minimum queue length among n independent servers equals v]."""
    if n < 1:
        raise ValueError("need at least one server")
    if v < 0:
        raise ValueError("queue length cannot be negative")
    return spectrum.tail(v) ** n - spectrum.tail(v + 1) ** n


# ----------------------------------------------------------------------------
# latency CDFs
# ----------------------------------------------------------------------------


def service_transform(rates, weights):
    """Laplace transform of a hyperexponential service time, vectorized in s."""
    r = np.asarray(rates, dtype=float)
    w = np.asarray(weights, dtype=float)

    def transform(s):
        s = np.asarray(s)
        return (w * r / (s[..., None] + r)).sum(axis=-1)

    return transform


def scp_cs(comp: ComputeConfig, lambda_c: float,
           settings: LaplaceInversionSettings = DEFAULT_INVERSION) -> float:
    """P[central-server sojourn <= target latency] from the P-K transform."""
    if lambda_c < 0:
        raise ValueError("arrival rate cannot be negative")
    rho = lambda_c * comp.mean_service_time_cs
    if rho >= 1.0:
        raise StabilityError(f"central server unstable: rho_c = {rho:.4f} >= 1")
    base = service_transform(comp.mu_c, comp.type_probs)

    def sojourn(s):
        b = base(s)
        return (1.0 - rho) * s * b / (s - lambda_c + lambda_c * b)

    return invert_laplace_cdf(sojourn, comp.target_latency, settings)


class MecCdfCache:
    """Caches CDF values of (v+1)-fold service-time sums at one latency."""

    def __init__(self, comp: ComputeConfig, t: float,
                 settings: LaplaceInversionSettings = DEFAULT_INVERSION):
        self.t = t
        self.settings = settings
        self._base = service_transform(comp.mu_m, comp.type_probs)
        self._values: dict[int, float] = {}

    def cdf(self, v: int) -> float:
        got = self._values.get(v)
        if got is None:
            base = self._base
            got = invert_laplace_cdf(lambda s: base(s) ** (v + 1),
                                     self.t, self.settings)
            self._values[v] = got
        return got


def mec_conditional_cdf(spectrum: QueueSpectrum, n: int,
                        cache: MecCdfCache) -> float:
    """P[edge sojourn <= t | n connected servers], summed over min queue length."""
    max_root = spectrum.max_root
    total = 0.0
    v = 0
    while True:
        tail_next = spectrum.tail(v + 1) ** n
        total += (spectrum.tail(v) ** n - tail_next) * cache.cdf(v)
        v += 1
        if tail_next < _GEO_TAIL:
            break
        if max_root > 0.0 and max_root ** (v + 1) / (1.0 - max_root) < _GEO_TAIL:
            break
        if cache.cdf(v - 1) < 1e-13 and v > 4:
            # CDF of the service sum is decreasing in v; the remaining terms
            # contribute less than the current CDF value
            break
        if v > 100000:
            raise NumericalError("queue-length truncation failed to terminate")
    return min(1.0, max(0.0, total))


def poisson_weights(nu: float, tail: float = _POISSON_TAIL):
    """Poisson(nu) pmf values from n = 0 up to the tail cutoff."""
    if nu < 0:
        raise ValueError("mean cannot be negative")
    weights = [math.exp(-nu)]
    cum = weights[0]
    n = 0
    while 1.0 - cum > tail:
        n += 1
        weights.append(weights[-1] * nu / n)
        cum += weights[-1]
        if n > 10 * (nu + 50):
            raise NumericalError("Poisson truncation failed to terminate")
    return np.array(weights)


def scp_mec(net: NetworkConfig, comp: ComputeConfig,
            spectrum: QueueSpectrum | None = None,
            rates: ArrivalRates | None = None,
            settings: LaplaceInversionSettings = DEFAULT_INVERSION,
            cache: MecCdfCache | None = None) -> float:
    """Unconditional P[edge sojourn <= target latency].

    Mixes the conditional CDF over the Poisson number of connected servers;
    the no-server event contributes zero. A MecCdfCache may be passed in to
    share service-sum CDF inversions across calls (they depend only on the
    edge service rates and the latency target).
    """
    if rates is None:
        rates = arrival_rates(net, comp)
    if spectrum is None:
        spectrum = queue_spectrum(comp, rates.lambda_m)
    nu = mean_connected_aps(net)
    if nu == 0.0:
        return 0.0
    if cache is None:
        cache = MecCdfCache(comp, comp.target_latency, settings)
    weights = poisson_weights(nu)
    total = 0.0
    for n in range(1, len(weights)):
        total += weights[n] * mec_conditional_cdf(spectrum, n, cache)
    return min(1.0, max(0.0, total))


# ----------------------------------------------------------------------------
# successful computation probability
# ----------------------------------------------------------------------------


def scp(net: NetworkConfig, comp: ComputeConfig,
        p_oul: float | None = None,
        settings: LaplaceInversionSettings = DEFAULT_INVERSION,
        cache: MecCdfCache | None = None) -> float:
    """P[computation finishes within the latency target].

    Mixture of the central-server and edge paths weighted by the offload
    split, with arrival rates thinned by uplink success.
    """
    if p_oul is None:
        p_oul = comm.uplink_outage(net)
    rates = arrival_rates(net, comp, p_oul)
    stability_report(comp, rates.lambda_c, rates.lambda_m).require_stable()
    theta = comp.offload_prob
    cs_part = scp_cs(comp, rates.lambda_c, settings) if theta > 0.0 else 0.0
    mec_part = scp_mec(net, comp, rates=rates, settings=settings, cache=cache) \
        if theta < 1.0 else 0.0
    return theta * cs_part + (1.0 - theta) * mec_part


def optimal_theta(net: NetworkConfig, comp: ComputeConfig,
                  theta_grid=None,
                  p_oul: float | None = None,
                  settings: LaplaceInversionSettings = DEFAULT_INVERSION):
    """Offload split maximizing the computation success probability.

    Seeds golden-section search with a grid scan; splits that destabilize
    either queue are excluded. Returns (theta, scp value).
    """
    if theta_grid is None:
        theta_grid = np.linspace(0.0, 1.0, 21)
    if p_oul is None:
        p_oul = comm.uplink_outage(net)
    cache = MecCdfCache(comp, comp.target_latency, settings)

    def value(theta: float):
        cfg = replace(comp, offload_prob=float(theta))
        rates = arrival_rates(net, cfg, p_oul)
        rep = stability_report(cfg, rates.lambda_c, rates.lambda_m)
        if not (rep.stable_cs and rep.stable_mec):
            return None
        return scp(net, cfg, p_oul, settings, cache=cache)

    evals = [(float(th), value(float(th))) for th in theta_grid]
    feasible = [(th, val) for th, val in evals if val is not None]
    if not feasible:
        raise InfeasibilityError("no stable offload split on the given grid")
    best_idx = max(range(len(feasible)), key=lambda i: feasible[i][1])
    best_th, best_val = feasible[best_idx]
    lo = feasible[best_idx - 1][0] if best_idx > 0 else best_th
    hi = feasible[best_idx + 1][0] if best_idx + 1 < len(feasible) else best_th

    # golden-section refinement inside the bracketing grid cells
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = value(c), value(d)
    for _ in range(40):
        if b - a < 1e-5:
            break
        if (fc if fc is not None else -1.0) >= (fd if fd is not None else -1.0):
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = value(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = value(d)
    for th, val in ((c, fc), (d, fd)):
        if val is not None and val > best_val:
            best_th, best_val = th, val
    return best_th, best_val
