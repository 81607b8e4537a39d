"""Survival amplitude, decay law and deviations from exponential decay.

Units throughout: hbar = 1, energies in units of the width Gamma_0 and
measured from the spectral threshold, time as x = t / tau_0.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceFailure,
    DecayLawError,
    DomainError,
    GridTooCoarse,
    InsufficientPoints,
    NonPositiveProbability,
    RangeExceeded,
    StepTooCoarse,
)
from .special_functions import e1, e1_scaled  # noqa: E402
from .spectral import (  # noqa: E402
    BreitWigner,
    GeneralDensity,
    MixtureDensity,
    amplitude_closed_form,
    dzeta_dx_closed_form,
    omega_bw,
    omega_general,
    zeta_closed_form,
)
from .quadrature import QuadratureConfig, QuadratureResult, amplitude_by_quadrature  # noqa: E402
from .analysis import (  # noqa: E402
    Canonical,
    DecayCurve,
    TailFit,
    TimeGrid,
    canonical_amplitude,
    closed_form_curve,
    decay_law_by_quadrature,
    dominant_oscillation_frequency,
    effective_hamiltonian,
    fit_tail_exponent,
    isolated_zero_check,
    zeta,
)
