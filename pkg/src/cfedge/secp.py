"""End-to-end edge service success and the coverage-radius threshold.

Combines, per realized number of connected APs, the computation success
(central or edge path), the chance that at least one connected AP decodes
the uplink, and the downlink success, then averages over the Poisson AP
count. The threshold search finds the smallest-latency-feasible radius
maximizing that joint probability over the offload split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import comm
from .errors import InfeasibilityError
from .model import ComputeConfig, NetworkConfig, mean_connected_aps, stability_report
from .offload import (MecCdfCache, arrival_rates, mec_conditional_cdf,
                      poisson_weights, queue_spectrum, scp_cs)
from .specfun import DEFAULT_INVERSION, LaplaceInversionSettings


@dataclass(frozen=True)
class SecpPoint:
    """Joint success probability at one (radius, split, latency) point.

    comp_term, ul_term and dl_term are the Poisson-aggregated computation,
    uplink and downlink factors; secp couples the first two inside the sum
    so it is bounded by, not equal to, their product.
    """

    coverage_radius: float
    offload_prob: float
    target_latency: float
    secp: float
    comp_term: float
    ul_term: float
    dl_term: float


def secp(net: NetworkConfig, comp: ComputeConfig,
         p0: float | None = None,
         dl_success: float | None = None,
         settings: LaplaceInversionSettings = DEFAULT_INVERSION,
         cache: MecCdfCache | None = None) -> SecpPoint:
    """Probability that upload, computation and download all succeed in time."""
    theta = comp.offload_prob
    t = comp.target_latency
    R = net.coverage_radius
    if R <= 0.0:
        return SecpPoint(R, theta, t, 0.0, 0.0, 0.0, 1.0)
    if p0 is None:
        p0 = comm.per_ap_success(net)
    if dl_success is None:
        dl_success = 1.0 - comm.downlink_outage(net).point
    nu = mean_connected_aps(net)
    p_oul = math.exp(-nu * p0)
    rates = arrival_rates(net, comp, p_oul)
    stability_report(comp, rates.lambda_c, rates.lambda_m).require_stable()
    spectrum = queue_spectrum(comp, rates.lambda_m)
    if cache is None:
        cache = MecCdfCache(comp, t, settings)
    cs_part = scp_cs(comp, rates.lambda_c, settings) if theta > 0.0 else 0.0

    weights = poisson_weights(nu)
    total = 0.0
    comp_term = 0.0
    ul_term = 0.0
    for n in range(1, len(weights)):
        w = weights[n]
        if theta < 1.0:
            mec_part = mec_conditional_cdf(spectrum, n, cache)
        else:
            mec_part = 0.0
        comp_n = theta * cs_part + (1.0 - theta) * mec_part
        ul_n = 1.0 - (1.0 - p0) ** n
        total += w * comp_n * ul_n
        comp_term += w * comp_n
        ul_term += w * ul_n
    return SecpPoint(R, theta, t, total * dl_success, comp_term, ul_term,
                     dl_success)


def _best_theta(net: NetworkConfig, comp: ComputeConfig, theta_grid,
                p0: float, dl_success: float,
                settings: LaplaceInversionSettings,
                cache: MecCdfCache):
    # inner split optimization at fixed radius, sharing the communication
    # bundle and the service-sum CDF cache
    nu = mean_connected_aps(net)
    p_oul = math.exp(-nu * p0)

    def value(theta: float):
        cfg = replace(comp, offload_prob=float(theta))
        rates = arrival_rates(net, cfg, p_oul)
        rep = stability_report(cfg, rates.lambda_c, rates.lambda_m)
        if not (rep.stable_cs and rep.stable_mec):
            return None
        return secp(net, cfg, p0, dl_success, settings, cache).secp

    evals = [(float(th), value(float(th))) for th in theta_grid]
    feasible = [(th, val) for th, val in evals if val is not None]
    if not feasible:
        raise InfeasibilityError(
            f"no stable offload split at R = {net.coverage_radius} km")
    best_idx = max(range(len(feasible)), key=lambda i: feasible[i][1])
    best_th, best_val = feasible[best_idx]
    a = feasible[best_idx - 1][0] if best_idx > 0 else best_th
    b = feasible[best_idx + 1][0] if best_idx + 1 < len(feasible) else best_th
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = value(c), value(d)
    for _ in range(30):
        if b - a < 1e-4:
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


def find_r_threshold(net: NetworkConfig, comp: ComputeConfig,
                     r_bounds: tuple,
                     theta_grid=None,
                     settings: LaplaceInversionSettings = DEFAULT_INVERSION):
    """Radius and split maximizing the joint success probability.

    Scans 8 radii across r_bounds to bracket the peak of
    max_theta secp(R, theta), refines with golden-section search, and
    returns (best radius, best split there, best secp value).
    """
    r_lo, r_hi = float(r_bounds[0]), float(r_bounds[1])
    if not 0.0 < r_lo < r_hi:
        raise ValueError("need 0 < r_lo < r_hi")
    if theta_grid is None:
        theta_grid = np.linspace(0.0, 1.0, 21)
    cache = MecCdfCache(comp, comp.target_latency, settings)

    def eval_radius(R: float):
        cfg_net = replace(net, coverage_radius=float(R))
        p0 = comm.per_ap_success(cfg_net)
        dl_success = 1.0 - comm.downlink_outage(cfg_net).point
        try:
            th, val = _best_theta(cfg_net, comp, theta_grid, p0, dl_success,
                                  settings, cache)
        except InfeasibilityError:
            return None, -1.0
        return th, val

    grid = np.linspace(r_lo, r_hi, 8)
    results = [eval_radius(R) for R in grid]
    vals = [v for _, v in results]
    best_i = int(np.argmax(vals))
    if vals[best_i] < 0.0:
        raise InfeasibilityError("no stable operating point in the radius range")
    a = grid[best_i - 1] if best_i > 0 else grid[best_i]
    b = grid[best_i + 1] if best_i + 1 < len(grid) else grid[best_i]
    best_r = float(grid[best_i])
    best_th, best_val = results[best_i]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    rc, fc = eval_radius(c)
    rd, fd = eval_radius(d)
    for _ in range(30):
        if b - a < 1e-4:
            break
        if fc >= fd:
            b, d, fd, rd = d, c, fc, rc
            c = b - invphi * (b - a)
            rc, fc = eval_radius(c)
        else:
            a, c, fc, rc = c, d, fd, rd
            d = a + invphi * (b - a)
            rd, fd = eval_radius(d)
    for r_cand, th_cand, v_cand in ((c, rc, fc), (d, rd, fd)):
        if v_cand > best_val and th_cand is not None:
            best_r, best_th, best_val = float(r_cand), th_cand, v_cand
    return best_r, best_th, best_val
