"""Exception types raised across the package."""


class WWLabError(Exception):
    """Base class for all package-specific errors."""


class DivergentIntegral(WWLabError):
    """The requested frequency integral does not converge (no cutoff)."""


class DivergentKernel(WWLabError):
    """The memory kernel is undefined without a cutoff."""


class NonpositiveEps(WWLabError):
    """Cutoff time scale must be strictly positive; at eps = 0 the kernel
    pole reaches the real axis and no finite kernel exists."""


class NegativeFrequency(WWLabError):
    """Spectral weights are defined for omega >= 0 only."""


class UnsupportedCutoff(WWLabError):
    """Operation is defined only for a subset of cutoff families."""


class ToleranceNotMet(WWLabError):
    """Adaptive quadrature could not reach the requested tolerance."""


class StepTooLarge(WWLabError):
    """Time step does not resolve the kernel peak / fastest detuning."""


class SpanTooSmall(WWLabError):
    """Mode discretization span leaves more than the allowed tail mass."""


class WindowTooSmall(WWLabError):
    """Fit window contains too few samples or starts too early."""


class AmplitudeUnderflow(WWLabError):
    """Amplitude too small to fit reliably inside the requested window."""


class NoBracket(WWLabError):
    """Root bracketing failed: endpoints do not straddle the root."""


class ConfigError(WWLabError):
    """Invalid or inconsistent run configuration."""
