"""Pole (Markov) analysis: decay constant, rate/shift fits, crossover time.

In the slow-amplitude approximation the amplitude obeys c' = (a + i b) c
with a + i b = -D * J, J the half-line kernel integral.  For the
exponential cutoff a = -(Gamma/2) e^{-nu eps} exactly and b has the leading
form 2 D / eps^3, which diverges as eps -> 0: the infinite frequency shift
that makes the cutoff-free equation inconsistent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .cutoff import CutoffKind
from .errors import AmplitudeUnderflow, NoBracket, WindowTooSmall
from .kernel import halfline_integral
from .params import AtomFieldParams
from .volterra import AmplitudeTrace

_MIN_FIT_SAMPLES = 50
_UNDERFLOW = 1e-280


@dataclass(frozen=True)
class MarkovSummary:
    """Pole constants and validity ratios.

    ``shift_leading`` is the eps*nu -> 0 form 2 D / eps^3 (exponential
    cutoff only), reported next to the numerically evaluated shift.
    """

    a: float
    b: float
    gamma_eff: float
    shift: float
    shift_leading: float | None
    star_ratios: tuple[float, float]
    method: str

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "gamma_eff": self.gamma_eff,
            "shift": self.shift,
            "shift_leading": self.shift_leading,
            "star_ratio_rate": self.star_ratios[0],
            "star_ratio_shift": self.star_ratios[1],
            "method": self.method,
        }


@dataclass(frozen=True)
class FitResult:
    gamma_fit: float
    shift_fit: float
    fit_window: tuple[float, float]
    residual_rms: float

    def as_dict(self) -> dict:
        return {
            "gamma_fit": self.gamma_fit,
            "shift_fit": self.shift_fit,
            "fit_window": list(self.fit_window),
            "residual_rms": self.residual_rms,
        }


def markov_summary(p: AtomFieldParams, tol: float = 1e-10) -> MarkovSummary:
    """a + i b = -D * halfline integral; exponential cutoff uses the exact
    real part and quadrature for the imaginary part."""
    J = halfline_integral(p.cutoff, p.nu, tol=tol)
    a = -p.D * J.real_part
    b = -p.D * J.imag_part
    lead = None
    if p.cutoff.kind is CutoffKind.EXPONENTIAL:
        lead = 2.0 * p.D / p.cutoff.eps**3
    return MarkovSummary(
        a=a,
        b=b,
        gamma_eff=-2.0 * a,
        shift=b,
        shift_leading=lead,
        star_ratios=(abs(a) / p.nu, abs(b) / p.nu),
        method=J.method,
    )


def fit_exponential(trace: AmplitudeTrace, window) -> FitResult:
    """Least squares on log |c|^2 (rate) and unwrapped phase (shift).

    The window must hold at least 50 samples and, when the trace carries
    exponential-cutoff parameters, start at t >= 10 eps so kernel-buildup
    transients stay outside.
    """
    t0, t1 = float(window[0]), float(window[1])
    if not (t0 < t1):
        raise WindowTooSmall("window must satisfy t0 < t1")
    if trace.params is not None and trace.params.cutoff.kind is CutoffKind.EXPONENTIAL:
        if t0 < 10.0 * trace.params.cutoff.eps * (1.0 - 1e-12):
            raise WindowTooSmall("fit window must start at or after 10*eps")
    idx = trace.window_indices(t0, t1)
    if idx.size < _MIN_FIT_SAMPLES:
        raise WindowTooSmall(
            f"{idx.size} samples in window, need >= {_MIN_FIT_SAMPLES}"
        )
    tw = trace.times[idx]
    cw = trace.c_e[idx]
    nsq = np.abs(cw) ** 2
    if np.any(nsq < _UNDERFLOW):
        raise AmplitudeUnderflow("population below 1e-280 inside the fit window")
    A = np.vstack([tw, np.ones_like(tw)]).T
    logn = np.log(nsq)
    coef, *_ = np.linalg.lstsq(A, logn, rcond=None)
    gamma_fit = -coef[0]
    resid = logn - A @ coef
    phase = np.unwrap(np.angle(cw))
    pcoef, *_ = np.linalg.lstsq(A, phase, rcond=None)
    return FitResult(
        gamma_fit=float(gamma_fit),
        shift_fit=float(pcoef[0]),
        fit_window=(t0, t1),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
    )


def crossover_estimate(p: AtomFieldParams, tol: float = 1e-12) -> float:
    """Time t* where the exponential envelope e^{-Gamma_eff t/2} / eps^4
    drops to the kernel-tail level 1 / t*^4.

    Bisection on the decaying branch [8/Gamma_eff, 1e4/Gamma_eff] (the
    defining equation also has a spurious near-eps crossing, excluded by
    starting at the maximum of e^{-Gamma t/2} t^4).
    """
    if p.cutoff.kind is not CutoffKind.EXPONENTIAL:
        raise NoBracket("crossover estimate is defined for the exponential cutoff")
    eps = p.cutoff.eps
    gamma_eff = p.gamma() * math.exp(-p.nu * eps)
    if gamma_eff <= 0.0:
        raise NoBracket("gamma_eff = 0: the envelope never decays")

    def f(t):
        # log of (e^{-gamma t/2} t^4 / eps^4)
        return -0.5 * gamma_eff * t + 4.0 * math.log(t / eps)

    lo = max(eps, 8.0 / gamma_eff)
    hi = 1.0e4 / gamma_eff
    if not (f(lo) > 0.0 > f(hi)):
        raise NoBracket("bracket endpoints do not straddle the crossover")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * hi:
            break
    return 0.5 * (lo + hi)


def summary_json(p: AtomFieldParams, fit: FitResult | None = None) -> str:
    """Serialize summary (+ optional fit) with full parameter echo."""
    out = {"params": p.to_config_dict(), "markov": markov_summary(p).as_dict()}
    if fit is not None:
        out["fit"] = fit.as_dict()
    return json.dumps(out, indent=2, sort_keys=True)
