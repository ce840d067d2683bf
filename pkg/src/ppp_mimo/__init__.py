"""Performance analysis of multi-antenna Poisson ad hoc networks.

Closed-form outage/throughput/transmission-capacity results for spatial
multiplexing (MRC and ZF receivers) and orthogonal space-time block codes
under slotted ALOHA, a guard-zone TDMA comparison protocol, and a seeded
Monte Carlo simulator that cross-validates every closed form.
"""

__version__ = "0.1.0"

from .schemes import (  # noqa: F401
    GammaLawParams,
    NetworkParams,
    OstbcCode,
    SchemeSpec,
    decode_coefficients,
    gamma_params,
    registry_code,
)
from .analysis import OutageQuery, TcQuery, outage_cdf, throughput  # noqa: F401
from .mcsim import Field, SimConfig, SimEstimate, simulate_ca, simulate_outage  # noqa: F401
