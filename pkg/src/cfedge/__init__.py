"""Coverage, latency and energy evaluation for cell-free networks with
edge compute offloading.

The package is split along the pipeline:

- ``model``: network / workload configuration objects and geometry helpers
- ``specfun``: special functions and numerical inversion primitives
- ``comm``: uplink and downlink decoding probabilities
- ``offload``: queueing spectra and computation success probabilities
- ``secp``: combined communication + computation success, radius search
- ``energy``: energy model and constrained minimisation
- ``sim``: Monte Carlo and discrete-event reference implementations
- ``presets``: named parameter sets for the bundled experiments
- ``cli``: batch experiment runner (``cfedge`` console script)
"""

from .errors import InfeasibilityError, NumericalError, StabilityError
from .model import (
    ComputeConfig,
    NetworkConfig,
    StabilityReport,
    mean_connected_aps,
    pathloss,
    stability_report,
)
from .comm import (
    DownlinkOutage,
    GammaInterferenceParams,
    downlink_outage,
    gamma_interference_params,
    per_ap_success,
    scmp,
    uplink_outage,
)
from .offload import (
    ArrivalRates,
    QueueSpectrum,
    arrival_rates,
    min_dispatch_prob,
    min_queue_pmf,
    optimal_theta,
    queue_spectrum,
    scp,
    scp_cs,
    scp_mec,
)
from .secp import SecpPoint, find_r_threshold, secp
from .energy import (
    CommunicationEnergy,
    EnergyBreakdown,
    EnergyConfig,
    communication_energy,
    computation_energy,
    energy_breakdown,
    minimize_energy,
    service_rates,
)

__version__ = "0.1.0"

__all__ = [
    "ArrivalRates",
    "CommunicationEnergy",
    "ComputeConfig",
    "DownlinkOutage",
    "EnergyBreakdown",
    "EnergyConfig",
    "GammaInterferenceParams",
    "InfeasibilityError",
    "NetworkConfig",
    "NumericalError",
    "QueueSpectrum",
    "SecpPoint",
    "StabilityError",
    "StabilityReport",
    "arrival_rates",
    "communication_energy",
    "computation_energy",
    "downlink_outage",
    "energy_breakdown",
    "find_r_threshold",
    "gamma_interference_params",
    "mean_connected_aps",
    "min_dispatch_prob",
    "min_queue_pmf",
    "minimize_energy",
    "optimal_theta",
    "pathloss",
    "per_ap_success",
    "queue_spectrum",
    "scmp",
    "scp",
    "scp_cs",
    "scp_mec",
    "secp",
    "service_rates",
    "stability_report",
    "uplink_outage",
]
