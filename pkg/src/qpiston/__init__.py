"""Heat-pumped single-mode quantum amplifier: simulation and work analysis."""

from qpiston.baths import BathSpectrum, FlatWindow, Gaussian, Lorentzian, combined
from qpiston.channel import (
    PistonChannel,
    channel_propagate,
    coherent_amplitude,
    derive_channel,
    integrate_occupation,
    mean_energy,
    mean_occupation,
    propagate_populations,
)
from qpiston.dynamics import (
    EngineParams,
    build_liouvillian,
    entropy_production,
    propagate,
)
from qpiston.engine import (
    Report,
    Scenario,
    StateSpec,
    efficiency,
    micromaser_compare,
    run_scenario,
)
from qpiston.errors import (
    ConfigError,
    PositivityError,
    QpistonError,
    TruncationError,
    ValidationError,
)
from qpiston.work import (
    effective_temperature,
    ergotropy,
    ergotropy_from_populations,
    passive_state,
)

__version__ = "0.1.0"

__all__ = [
    "BathSpectrum",
    "FlatWindow",
    "Gaussian",
    "Lorentzian",
    "combined",
    "PistonChannel",
    "channel_propagate",
    "coherent_amplitude",
    "derive_channel",
    "integrate_occupation",
    "mean_energy",
    "mean_occupation",
    "propagate_populations",
    "EngineParams",
    "build_liouvillian",
    "entropy_production",
    "propagate",
    "Report",
    "Scenario",
    "StateSpec",
    "efficiency",
    "micromaser_compare",
    "run_scenario",
    "ConfigError",
    "PositivityError",
    "QpistonError",
    "TruncationError",
    "ValidationError",
    "effective_temperature",
    "ergotropy",
    "ergotropy_from_populations",
    "passive_state",
    "__version__",
]
