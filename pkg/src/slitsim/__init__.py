"""Classical two-channel model of double-slit interference and its entangling current."""

from .model import (GridSpec, InvalidConfig, PhaseMode, PhysicalParams, SimConfig, SlitConfig,
                    canonical_config, compute_u0, load_config, parse_config, validate)

__all__ = ["GridSpec", "InvalidConfig", "PhaseMode", "PhysicalParams", "SimConfig", "SlitConfig",
           "canonical_config", "compute_u0", "load_config", "parse_config", "validate"]
__version__ = "0.1.0"
