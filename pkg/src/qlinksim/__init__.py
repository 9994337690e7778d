"""Desk-scale feasibility simulator for satellite-to-ground links that
carry classical data and quantum key material on the same signal.

Submodules: mathfn (shared special functions), atmosphere (gaseous
attenuation and thermal occupancy), fso (optical downlink
transmissivity), dvqkd (decoy-state rates with a direct-message
payload), cvqkd (displaced coherent-state rates), config/sweeps/cli
(batch orchestration).
"""

from .atmosphere import (
    AtmosphericState,
    ReferenceAtmosphereProfile,
    SlantPathSpec,
    slant_attenuation,
    specific_attenuation,
    thermal_photon_number,
)
from .config import ConfigError, SimulationConfig, SweepRanges, load_config
from .cvqkd import (
    CvProtocolParams,
    CvRateResult,
    PhaseEncodingNoise,
    ThermalLossChannel,
    composable_key_rate,
)
from .dvqkd import (
    DecoyProtocolParams,
    DvRateResult,
    FiniteSizeConfig,
    finite_key_rate,
    qsdc_payload_rate,
)
from .fso import ChannelOutput, DownlinkGeometry, FsoChannelParams, channel_transmissivity, slant_range
from .sweeps import (
    InfeasibleScenario,
    SecureAltitudeResult,
    SweepTable,
    max_secure_altitude,
    run_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AtmosphericState",
    "ReferenceAtmosphereProfile",
    "SlantPathSpec",
    "slant_attenuation",
    "specific_attenuation",
    "thermal_photon_number",
    "ConfigError",
    "SimulationConfig",
    "SweepRanges",
    "load_config",
    "CvProtocolParams",
    "CvRateResult",
    "PhaseEncodingNoise",
    "ThermalLossChannel",
    "composable_key_rate",
    "DecoyProtocolParams",
    "DvRateResult",
    "FiniteSizeConfig",
    "finite_key_rate",
    "qsdc_payload_rate",
    "ChannelOutput",
    "DownlinkGeometry",
    "FsoChannelParams",
    "channel_transmissivity",
    "slant_range",
    "InfeasibleScenario",
    "SecureAltitudeResult",
    "SweepTable",
    "max_secure_altitude",
    "run_scenario",
    "__version__",
]
