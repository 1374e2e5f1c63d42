"""Memory kernel K(tau) and the half-line integral that sets rate and shift.

K(tau) = integral over omega of w(omega) e^{-i omega tau}.  For the
exponential cutoff the closed form is K = 6/(tau - i eps)^4; for the sharp
cutoff an exact antiderivative exists; the ap-shape kernel is evaluated by
quadrature.  ``kernel_quadrature`` is the independent oracle used to check
the closed forms: it never uses them internally.

The half-line integral J = int_0^T K(tau) e^{i nu tau} d tau (D stripped)
carries the physics: Re J is the decay rate per 2D, Im J the frequency
shift per -D.  For the exponential cutoff at T = infinity the real part has
the closed form pi nu^3 e^{-nu eps}; the quadrature path substitutes
u = tau/eps and integrates 6 e^{i s u}/(u - i)^4 with s = eps*nu along a
45-degree ray, where the integrand decays and no cancellation occurs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from .cutoff import CutoffKind, CutoffSpec, spectral_weight
from .errors import (
    DivergentIntegral,
    NonpositiveEps,
    ToleranceNotMet,
    UnsupportedCutoff,
)

_GL24 = leggauss(24)
_GL48 = leggauss(48)


@dataclass(frozen=True)
class KernelValue:
    tau: float
    value: complex


@dataclass(frozen=True)
class HalfLineIntegral:
    """Real/imaginary parts of int_0^T K(tau) e^{i nu tau} d tau."""

    real_part: float
    imag_part: float
    method: str  # "analytic" | "quadrature"


# ---------------------------------------------------------------------------
# kernel evaluation
# ---------------------------------------------------------------------------


def kernel_analytic(eps: float, tau):
    """Exponential-cutoff kernel 6/(tau - i eps)^4, exact for all real tau.

    Raises NonpositiveEps for eps <= 0: the pole reaches the real axis and
    the bare (cutoff-free) kernel does not exist.
    """
    if eps <= 0:
        raise NonpositiveEps("kernel requires eps > 0; eps -> 0 is the divergent limit")
    t = np.asarray(tau, dtype=float)
    val = 6.0 / (t - 1j * eps) ** 4
    if np.isscalar(tau) or getattr(tau, "ndim", 0) == 0:
        return complex(val)
    return val


def kernel_sharp(omega_max: float, tau):
    """Sharp-cutoff kernel int_0^Omega omega^3 e^{-i omega tau} d omega.

    Exact antiderivative (polynomial times phase); switches to a 4-term
    Taylor expansion for |Omega tau| < 1e-3 to avoid cancellation.
    """
    om = float(omega_max)
    t = np.asarray(tau, dtype=float)
    scalar = np.isscalar(tau) or getattr(tau, "ndim", 0) == 0
    t = np.atleast_1d(t)
    out = np.empty(t.shape, dtype=complex)
    small = np.abs(om * t) < 1e-3
    ts = t[small]
    out[small] = (
        om**4 / 4.0
        - 1j * ts * om**5 / 5.0
        - ts**2 * om**6 / 12.0
        + 1j * ts**3 * om**7 / 42.0
    )
    tl = t[~small]
    z = -1j * tl
    out[~small] = (
        np.exp(z * om) * (om**3 / z - 3 * om**2 / z**2 + 6 * om / z**3 - 6 / z**4)
        + 6 / z**4
    )
    return complex(out[0]) if scalar else out


def kernel_eval(spec: CutoffSpec, tau, tol: float = 1e-10):
    """Kernel for any integrable cutoff: closed form where one exists,
    quadrature for ap-shape."""
    if spec.kind is CutoffKind.NONE:
        raise DivergentIntegral("kernel undefined without a cutoff")
    if spec.kind is CutoffKind.EXPONENTIAL:
        return kernel_analytic(spec.eps, tau)
    if spec.kind is CutoffKind.SHARP:
        return kernel_sharp(spec.omega_max, tau)
    if np.isscalar(tau) or getattr(tau, "ndim", 0) == 0:
        return kernel_quadrature(spec, float(tau), tol=tol)
    return np.array([kernel_quadrature(spec, float(t), tol=tol) for t in tau])


def kernel_table(spec: CutoffSpec, taus) -> tuple[np.ndarray, np.ndarray]:
    """(tau, K(tau)) arrays for CSV export."""
    taus = np.asarray(taus, dtype=float)
    return taus, np.asarray(kernel_eval(spec, taus))


# ---------------------------------------------------------------------------
# quadrature oracle for the kernel
# ---------------------------------------------------------------------------


def _omega_hi(spec: CutoffSpec, tol: float) -> float:
    if spec.kind is CutoffKind.EXPONENTIAL:
        return 60.0 / spec.eps
    if spec.kind is CutoffKind.SHARP:
        return spec.omega_max
    # ap-shape tail fraction (1/(1 + eps^2 W^2))^3 ~ (eps W)^-6
    return max((3.0 / tol) ** (1.0 / 6.0), 10.0) / spec.eps


def _osc_panel_sum(spec: CutoffSpec, tau: float, omega_hi: float, rule) -> complex:
    """Sum of Gauss-Legendre panel integrals over half periods pi/tau."""
    x, w = rule
    width = math.pi / tau
    n_pan = int(math.ceil(omega_hi / width))
    edges = np.linspace(0.0, n_pan * width, n_pan + 1)
    edges = np.minimum(edges, omega_hi)
    a, b = edges[:-1], edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    om = mid + half * x[None, :]
    wt = half * w[None, :]
    f = spectral_weight(spec, om) * np.exp(-1j * om * tau)
    return complex(np.sum(f * wt))


def kernel_quadrature(spec: CutoffSpec, tau: float, tol: float = 1e-10) -> complex:
    """Adaptive/oscillatory quadrature of int_0^inf w(omega) e^{-i omega tau}.

    Independent of the closed forms.  Strategy: while the phase rotates
    slowly over the weight's support, plain adaptive quadrature; once it
    oscillates, Gauss-Legendre panels of half-period width summed directly
    (the panel series is alternating with ratio bounded away from 1, so the
    direct sum is well conditioned; two rules give the error estimate).
    """
    if spec.kind is CutoffKind.NONE:
        raise DivergentIntegral("int omega^3 d omega does not converge")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    tau = float(tau)
    if tau < 0:
        return np.conj(kernel_quadrature(spec, -tau, tol))
    w_hi = _omega_hi(spec, tol)
    decay_scale = spec.eps if spec.kind is not CutoffKind.SHARP else 1.0 / spec.omega_max
    if tau * w_hi < 2.0 * math.pi or tau <= decay_scale:
        # few oscillations across the support: plain adaptive quadrature
        def fre(om):
            return spectral_weight(spec, om) * math.cos(om * tau)

        def fim(om):
            return -spectral_weight(spec, om) * math.sin(om * tau)

        re, ere = quad(fre, 0.0, w_hi, limit=400, epsabs=0.0, epsrel=tol, full_output=0)[:2]
        im, eim = quad(fim, 0.0, w_hi, limit=400, epsabs=0.0, epsrel=tol, full_output=0)[:2]
        val = re + 1j * im
        if abs(val) > 0 and (ere + eim) > 10 * tol * abs(val) + 1e-300:
            raise ToleranceNotMet(
                f"kernel quadrature error {ere + eim:.2e} above tol for tau={tau}"
            )
        return complex(val)
    coarse = _osc_panel_sum(spec, tau, w_hi, _GL24)
    fine = _osc_panel_sum(spec, tau, w_hi, _GL48)
    err = abs(fine - coarse)
    if err > tol * max(abs(fine), 1e-300):
        raise ToleranceNotMet(
            f"panel quadrature stalled at rel err {err / max(abs(fine), 1e-300):.2e} "
            f"for tau={tau}"
        )
    return fine


# ---------------------------------------------------------------------------
# half-line integral
# ---------------------------------------------------------------------------


def _halfline_u_infinite(s: float, tol: float) -> complex:
    """J_u(s) = int_0^inf 6 e^{i s u} / (u - i)^4 du via the ray u = e^{i pi/4} v.

    The rotated integrand decays like v^-4 times exp(-s v / sqrt(2)) and is
    not oscillatory, so plain adaptive quadrature reaches near machine
    accuracy; the sector between the real axis and the ray holds no pole
    (the only pole sits at u = i).
    """
    d = (1.0 + 1.0j) / math.sqrt(2.0)

    def fre(v):
        u = d * v
        g = 6.0 * np.exp(1j * s * u) / (u - 1j) ** 4 * d
        return g.real

    def fim(v):
        u = d * v
        g = 6.0 * np.exp(1j * s * u) / (u - 1j) ** 4 * d
        return g.imag

    re = im = 0.0
    err = 0.0
    for a, b in ((0.0, 20.0), (20.0, np.inf)):
        r = quad(fre, a, b, limit=300, epsabs=1e-15, epsrel=1e-14, full_output=1)
        re += r[0]
        err += r[1]
        r = quad(fim, a, b, limit=300, epsabs=1e-15, epsrel=1e-14, full_output=1)
        im += r[0]
        err += r[1]
    val = re + 1j * im
    if err > 10 * tol * abs(val):
        raise ToleranceNotMet(f"half-line quadrature error {err:.2e} above tol")
    return val


def _halfline_u_finite(s: float, u_up: float) -> complex:
    """Same integrand on [0, u_up], real axis (mild oscillation, u^-4 decay)."""

    def fre(u):
        return (6.0 * np.exp(1j * s * u) / (u - 1j) ** 4).real

    def fim(u):
        return (6.0 * np.exp(1j * s * u) / (u - 1j) ** 4).imag

    re = im = 0.0
    cuts = [0.0, min(50.0, u_up)]
    if u_up > 50.0:
        cuts.append(u_up)
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        re += quad(fre, a, b, limit=800, epsabs=1e-14, epsrel=1e-12)[0]
        im += quad(fim, a, b, limit=800, epsabs=1e-14, epsrel=1e-12)[0]
    return re + 1j * im


def _principal_value_shift(spec: CutoffSpec, nu: float, tol: float) -> float:
    """P int_0^inf w(omega)/(nu - omega) d omega for integrable cutoffs."""
    w_hi = _omega_hi(spec, tol)

    def f(om):
        return spectral_weight(spec, om)

    if spec.kind is CutoffKind.SHARP:
        hi = spec.omega_max
        if nu >= hi:
            return quad(lambda om: f(om) / (nu - om), 0.0, hi, limit=400)[0]
        return -quad(f, 0.0, hi, weight="cauchy", wvar=nu, limit=400)[0]
    # pole region by Cauchy weight, smooth remainder plainly
    split = min(2.0 * nu, w_hi)
    pv = -quad(f, 0.0, split, weight="cauchy", wvar=nu, limit=400)[0]
    if w_hi > split:
        pv += quad(lambda om: f(om) / (nu - om), split, w_hi, limit=400)[0]
    return pv


def halfline_integral(
    spec: CutoffSpec,
    nu: float,
    t_upper: float = math.inf,
    tol: float = 1e-10,
    method: str = "auto",
) -> HalfLineIntegral:
    """int_0^{t_upper} K(tau) e^{i nu tau} d tau (kernel without the D factor).

    method="analytic" (exponential cutoff only): real part from the closed
    form pi nu^3 e^{-nu eps}; the imaginary part has no elementary closed
    form and is evaluated numerically.  method="quadrature": both parts
    numerical.  For sharp/ap-shape cutoffs at t_upper = inf the equivalent
    frequency-domain form is used: real part pi w(nu), imaginary part the
    principal-value integral of w(omega)/(nu - omega).
    """
    if nu <= 0:
        raise ValueError("nu must be > 0")
    if method not in ("auto", "analytic", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if spec.kind is CutoffKind.NONE:
        raise DivergentIntegral("half-line integral undefined without a cutoff")

    if spec.kind is CutoffKind.EXPONENTIAL:
        eps = spec.eps
        s = eps * nu
        if method == "auto":
            method = "analytic"
        if not math.isinf(t_upper):
            if method == "analytic":
                raise UnsupportedCutoff(
                    "analytic method is defined at t_upper = inf only"
                )
            J = _halfline_u_finite(s, t_upper / eps) / eps**3
            return HalfLineIntegral(J.real, J.imag, "quadrature")
        J = _halfline_u_infinite(s, tol) / eps**3
        if method == "analytic":
            return HalfLineIntegral(
                math.pi * nu**3 * math.exp(-nu * eps), J.imag, "analytic"
            )
        return HalfLineIntegral(J.real, J.imag, "quadrature")

    if method == "analytic":
        raise UnsupportedCutoff("analytic method exists for the exponential cutoff only")
    if not math.isinf(t_upper):
        raise UnsupportedCutoff(
            "finite t_upper is implemented for the exponential cutoff only"
        )
    re = math.pi * float(spectral_weight(spec, nu))
    im = _principal_value_shift(spec, nu, tol)
    return HalfLineIntegral(re, im, "quadrature")
