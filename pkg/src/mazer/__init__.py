"""Scattering of ultracold two-level atoms by a resonant cavity field mode.

Library layout:

  profiles       cavity mode shapes u(z) and turning points
  scattering     exact even/odd integration, amplitudes, outcome probabilities
  mesa           closed forms for the constant mode (reference oracle)
  specfun        Bessel J_{+-1/3}, Airy on the negative axis, quadrature
  semiclassical  WKB + linear-edge matching chain and amplitude limits
  resonances     peak finding, widths, parities, localization condition
  photons        field states, micromaser master equation, stationary state
  engine         exact/semiclassical dispatch for sweeps and gain curves
  cli            `mazer` command: scatter/sweep/steady-state/resonances/preset
"""

__version__ = "0.1.0"

from .photons import (FieldState, MicromaserConfig, PhotonDistribution,
                      conventional_emission, ensemble_average,
                      evolve_master_equation, field_weights,
                      steady_state_distribution)
from .profiles import ModeProfile, evaluate_profile, from_name, turning_points
from .resonances import ResonanceInfo, find_resonances, resonance_condition_roots
from .scattering import (Channel, ChannelAmplitudes, LogDerivativePair,
                         OutcomeProbabilities, ScatteringParams,
                         amplitudes_from_logderivs, channel_amplitudes,
                         integrate_even_odd, outcome_probabilities,
                         rabi_wavenumber, transfer_matrix_oracle)
from .semiclassical import (SemiclassicalPoint, airy_logderivs,
                            barrier_amplitudes, chi, large_xi_amplitudes,
                            small_xi_amplitudes, wkb_phase, xi_parameter)

__all__ = [
    "__version__",
    "Channel", "ChannelAmplitudes", "FieldState", "LogDerivativePair",
    "MicromaserConfig", "ModeProfile", "OutcomeProbabilities",
    "PhotonDistribution", "ResonanceInfo", "ScatteringParams",
    "SemiclassicalPoint",
    "airy_logderivs", "amplitudes_from_logderivs", "barrier_amplitudes",
    "channel_amplitudes", "chi", "conventional_emission", "ensemble_average",
    "evaluate_profile", "evolve_master_equation", "field_weights",
    "find_resonances", "from_name", "integrate_even_odd",
    "large_xi_amplitudes", "outcome_probabilities", "rabi_wavenumber",
    "resonance_condition_roots", "small_xi_amplitudes",
    "steady_state_distribution", "transfer_matrix_oracle", "turning_points",
    "wkb_phase", "xi_parameter",
]
