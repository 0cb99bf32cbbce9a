"""Network and compute-workload configuration.

All geometry is in kilometres, all times in seconds, all rates in events per
second. Densities are per square kilometre. SIR thresholds are linear (the
CLI converts dB at the boundary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StabilityError

# ----------------------------------------------------------------------------
# network geometry + radio parameters
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class NetworkConfig:
    lambda_b: float                 # AP density [1/km^2]
    lambda_d: float                 # user density [1/km^2]
    antennas_per_ap: int = 4        # antennas per AP (M)
    alpha: float = 3.7              # pathloss exponent, must be > 2
    d0: float = 0.001               # pathloss reference distance [km]
    coverage_radius: float = 0.05   # cooperation disc radius [km]
    sir_threshold_ul: float = 2.0 ** 1.5 - 1.0   # uplink SIR threshold (linear)
    sir_threshold_dl: float = 2.0 ** 1.5 - 1.0   # downlink SIR threshold (linear)
    network_area: float = 1.0       # total served area [km^2], scales CS load

    def __post_init__(self):
        if self.lambda_b < 0 or self.lambda_d < 0:
            raise ValueError("densities must be non-negative")
        if int(self.antennas_per_ap) != self.antennas_per_ap or self.antennas_per_ap < 1:
            raise ValueError("antennas_per_ap must be a positive integer")
        if self.alpha <= 2:
            raise ValueError("alpha must exceed 2 for finite interference power")
        if self.d0 <= 0:
            raise ValueError("d0 must be positive")
        if self.coverage_radius < 0:
            raise ValueError("coverage_radius must be non-negative")
        if self.sir_threshold_ul <= 0 or self.sir_threshold_dl <= 0:
            raise ValueError("SIR thresholds must be positive (linear scale)")
        if self.network_area <= 0:
            raise ValueError("network_area must be positive")


def pathloss(r, config: NetworkConfig):
    """Bounded power pathloss max(r, d0)^(-alpha). Accepts scalars or arrays."""
    r = np.asarray(r, dtype=float)
    out = np.maximum(r, config.d0) ** (-config.alpha)
    return float(out) if out.ndim == 0 else out


def mean_connected_aps(config: NetworkConfig) -> float:
    """Mean number of APs inside the cooperation disc, lambda_b pi R^2."""
    return config.lambda_b * math.pi * config.coverage_radius ** 2


# ----------------------------------------------------------------------------
# compute workload
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ComputeConfig:
    """Task mix and service rates for the central server (CS) and edge servers.

    Service times are hyperexponential: a task is of type i with probability
    type_probs[i] and is served at rate mu_c[i] (central) or mu_m[i] (edge).
    """

    type_probs: tuple        # mixing probabilities, sum to 1
    mu_c: tuple              # central-server service rates per type [1/s]
    mu_m: tuple              # edge-server service rates per type [1/s]
    offload_prob: float = 0.5    # probability a task goes to the CS (theta)
    target_latency: float = 0.012    # end-to-end latency target [s]
    num_types: int = field(default=0)    # number of task types, 0 means "infer"

    def __post_init__(self):
        object.__setattr__(self, "type_probs", tuple(float(p) for p in self.type_probs))
        object.__setattr__(self, "mu_c", tuple(float(m) for m in self.mu_c))
        object.__setattr__(self, "mu_m", tuple(float(m) for m in self.mu_m))
        n = len(self.type_probs)
        if self.num_types == 0:
            object.__setattr__(self, "num_types", n)
        if self.num_types != n:
            raise ValueError("num_types does not match len(type_probs)")
        if len(self.mu_c) != n or len(self.mu_m) != n:
            raise ValueError("type_probs, mu_c, mu_m must have equal length")
        if n < 1:
            raise ValueError("need at least one task type")
        if any(p < 0 for p in self.type_probs) or abs(sum(self.type_probs) - 1.0) > 1e-9:
            raise ValueError("type_probs must be non-negative and sum to 1")
        if any(m <= 0 for m in self.mu_c) or any(m <= 0 for m in self.mu_m):
            raise ValueError("service rates must be positive")
        if not 0.0 <= self.offload_prob <= 1.0:
            raise ValueError("offload_prob must lie in [0, 1]")
        if self.target_latency <= 0:
            raise ValueError("target_latency must be positive")

    @property
    def mean_service_time_cs(self) -> float:
        return sum(p / m for p, m in zip(self.type_probs, self.mu_c))

    @property
    def mean_service_time_mec(self) -> float:
        return sum(p / m for p, m in zip(self.type_probs, self.mu_m))

    @property
    def aggregate_mu_c(self) -> float:
        """Harmonic-mean service rate of the CS mixture."""
        return 1.0 / self.mean_service_time_cs

    @property
    def aggregate_mu_m(self) -> float:
        """Harmonic-mean service rate of an edge server mixture."""
        return 1.0 / self.mean_service_time_mec


# ----------------------------------------------------------------------------
# queue stability summary
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    rho_c: float         # CS utilization lambda_c * E[tau_c]
    rho_m: float         # per-edge-server utilization lambda_m * E[tau_m]
    stable_cs: bool
    stable_mec: bool

    def __post_init__(self):
        if self.rho_c < 0 or self.rho_m < 0:
            raise ValueError("utilizations cannot be negative")
        if self.stable_cs != (self.rho_c < 1.0) or self.stable_mec != (self.rho_m < 1.0):
            raise ValueError("stability flags inconsistent with utilizations")

    def require_stable(self) -> None:
        if not self.stable_cs:
            raise StabilityError(f"central server overloaded: rho_c = {self.rho_c:.4f} >= 1")
        if not self.stable_mec:
            raise StabilityError(f"edge servers overloaded: rho_m = {self.rho_m:.4f} >= 1")


def stability_report(comp: ComputeConfig, lambda_c: float, lambda_m: float) -> StabilityReport:
    rho_c = lambda_c * comp.mean_service_time_cs
    rho_m = lambda_m * comp.mean_service_time_mec
    return StabilityReport(rho_c=rho_c, rho_m=rho_m,
                           stable_cs=rho_c < 1.0, stable_mec=rho_m < 1.0)
