"""wwlab: a numerical laboratory for spontaneous-emission decay with a
physically motivated frequency cutoff.

The package solves the excited-amplitude memory equation exactly in time,
cross-checks it against a directly integrated discrete-mode bath, evaluates
the analytic kernel and pole formulas, and exposes the regimes where the
naive treatment fails: the divergent (cutoff-free) limit and the long-time
sub-exponential tail.
"""

from .cutoff import CutoffKind, CutoffSpec, low_frequency_exponent, spectral_weight
from .errors import (
    AmplitudeUnderflow,
    ConfigError,
    DivergentIntegral,
    DivergentKernel,
    NegativeFrequency,
    NoBracket,
    NonpositiveEps,
    SpanTooSmall,
    StepTooLarge,
    ToleranceNotMet,
    UnsupportedCutoff,
    WindowTooSmall,
    WWLabError,
)
from .kernel import (
    HalfLineIntegral,
    KernelValue,
    halfline_integral,
    kernel_analytic,
    kernel_eval,
    kernel_quadrature,
)
from .markov import FitResult, MarkovSummary, crossover_estimate, fit_exponential, markov_summary
from .modes import FullState, ModeSet, discretize, solve_modes
from .params import (
    ALPHA,
    AtomFieldParams,
    UnitSystem,
    ValidityReport,
    gamma,
    hydrogen_preset,
    hydrogen_reference,
    rescale_frequency,
    to_dimensionless,
    validity_report,
)
from .volterra import AmplitudeTrace, History, Scheme, SolverConfig, convergence_study, solve

__version__ = "0.1.0"

__all__ = [
    "ALPHA",
    "AmplitudeTrace",
    "AmplitudeUnderflow",
    "AtomFieldParams",
    "ConfigError",
    "CutoffKind",
    "CutoffSpec",
    "DivergentIntegral",
    "DivergentKernel",
    "FitResult",
    "FullState",
    "HalfLineIntegral",
    "History",
    "KernelValue",
    "MarkovSummary",
    "ModeSet",
    "NegativeFrequency",
    "NoBracket",
    "NonpositiveEps",
    "Scheme",
    "SolverConfig",
    "SpanTooSmall",
    "StepTooLarge",
    "ToleranceNotMet",
    "UnitSystem",
    "UnsupportedCutoff",
    "ValidityReport",
    "WWLabError",
    "WindowTooSmall",
    "convergence_study",
    "crossover_estimate",
    "discretize",
    "fit_exponential",
    "gamma",
    "halfline_integral",
    "hydrogen_preset",
    "hydrogen_reference",
    "kernel_analytic",
    "kernel_eval",
    "kernel_quadrature",
    "low_frequency_exponent",
    "markov_summary",
    "rescale_frequency",
    "solve",
    "solve_modes",
    "spectral_weight",
    "to_dimensionless",
    "validity_report",
]
