"""Steady-state probe response of a cross-cavity magnomechanical system."""
from .params import DetuningMode, ParameterError, ProbeConfig, SystemParams, rabi_frequency, spin_count
from .response import ResponsePoint, probe_response
from .steady import SteadyState, pinned_coupling, solve_steady_state
from .transport import TauMethod, TransportPoint, group_delay, transmission

__version__ = "0.1.0"

__all__ = [
    "DetuningMode",
    "ParameterError",
    "ProbeConfig",
    "ResponsePoint",
    "SteadyState",
    "SystemParams",
    "TauMethod",
    "TransportPoint",
    "group_delay",
    "pinned_coupling",
    "probe_response",
    "rabi_frequency",
    "solve_steady_state",
    "spin_count",
    "transmission",
]
