"""Dipole-level calculators: self-energies, angular factor, A.p vs E.r.

Everything here is in Hartree atomic units: hbar = e = m_e = a0 = 1,
epsilon0 = 1/(4 pi), c = 1/alpha.  Charges are passed explicitly so the
cancellation laws can be tested; lengths are in a0, frequencies in atomic
frequency units unless noted.

Single-mode matrix elements are quoted per unit sqrt(V): the quantization
volume is a regularization artifact and cancels in every reported ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .params import ALPHA

EPS0 = 1.0 / (4.0 * math.pi)
C_AU = 1.0 / ALPHA

# hydrogen <r^2> in a0^2 for the two levels of the preset transition
R2_GROUND_1S = 3.0
R2_EXCITED_2P = 30.0
R2_CROSS = 0.0  # <g|r^2|e> vanishes by parity/orthogonality


@dataclass(frozen=True)
class SelfEnergyResult:
    """Coefficient of r^2 in the dipole self-energy (energy / length^2)."""

    coefficient: float

    def as_frequency_shift(self, r_squared: float) -> float:
        # hbar = 1: energy and angular frequency coincide
        return self.coefficient * r_squared


@dataclass(frozen=True)
class MatrixElementComparison:
    ap_element: float
    er_element: float
    ratio: float


def self_energy_sharp(q: float, omega_cut: float) -> SelfEnergyResult:
    """Sharp-cutoff dipole self-energy coefficient q^2 Omega^3 / (18 pi^2 eps0 c^3)."""
    if omega_cut < 0:
        raise ValueError("omega_cut must be >= 0")
    coeff = q**2 * omega_cut**3 / (18.0 * math.pi**2 * EPS0 * C_AU**3)
    return SelfEnergyResult(coefficient=coeff)


def self_energy_smooth(q: float, eps: float) -> SelfEnergyResult:
    """Smooth-cutoff dipole self-energy coefficient q^2 / (3 pi^2 eps0 (eps c)^3).

    ``eps`` is the cutoff time scale (atomic time units); eps*c is the
    corresponding length.  Fixed against the sharp form by the exact ratio
    sharp/smooth = Omega^3 eps^3 / 6 and by the k -> 0 normalization of the
    angular average (see ``smooth_angular_average``).
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    coeff = q**2 / (3.0 * math.pi**2 * EPS0 * (eps * C_AU) ** 3)
    return SelfEnergyResult(coefficient=coeff)


def angular_factor() -> float:
    """int_0^pi sin(theta) cos^2(theta) d theta, evaluated by quadrature (= 2/3)."""
    val, _ = quad(lambda th: math.sin(th) * math.cos(th) ** 2, 0.0, math.pi, epsabs=1e-14)
    return val


def smooth_angular_average(eps: float, k: float) -> float:
    """Polarization-summed angular integral of |f|^2 cos^2 theta for the
    smooth cutoff profile: (8 pi / 3) e^{-eps c k}.

    At k -> 0 (where the cutoff profile f is 1) this equals
    2 * 2 pi * angular_factor(), the same normalization the sharp cutoff
    carries, which is what makes the two self-energies consistent.
    """
    if eps <= 0 or k < 0:
        raise ValueError("need eps > 0 and k >= 0")
    return (8.0 * math.pi / 3.0) * math.exp(-eps * C_AU * k)


def self_energy_sharp_modesum(q: float, omega_cut: float, n_k: int = 400, n_th: int = 200) -> float:
    """Numerical continuum mode sum for the sharp self-energy coefficient.

    Independent check of ``self_energy_sharp``: (q^2 / 2 eps0) (2pi)^(-3)
    * [sum_s int dOmega cos^2 theta] * int_0^{Omega/c} k^2 dk, with both
    angular and radial integrals done by quadrature.
    """
    from numpy.polynomial.legendre import leggauss
    import numpy as np

    x, w = leggauss(n_th)
    th = 0.5 * math.pi * (x + 1.0)
    ang_one_pol = 0.5 * math.pi * np.sum(w * np.sin(th) * np.cos(th) ** 2)
    ang = 2.0 * 2.0 * math.pi * ang_one_pol  # polarization sum and phi integral
    kmax = omega_cut / C_AU
    xk, wk = leggauss(n_k)
    kk = 0.5 * kmax * (xk + 1.0)
    radial = 0.5 * kmax * np.sum(wk * kk**2)
    return float(q**2 / (2.0 * EPS0) / (2.0 * math.pi) ** 3 * ang * radial)


def compare_ap_er(q: float, nu: float, omega_k: float, r_element: float) -> MatrixElementComparison:
    """Off-diagonal matrix element in both representations, per unit sqrt(V).

    E.r: q sqrt(omega_k / (2 eps0)) r_element; A.p carries the extra factor
    nu/omega_k, an exact identity from [H_A, r] = -i p / m.
    """
    if omega_k <= 0:
        raise ValueError("omega_k must be > 0")
    er = q * math.sqrt(omega_k / (2.0 * EPS0)) * r_element
    ap = (nu / omega_k) * er
    return MatrixElementComparison(ap_element=ap, er_element=er, ratio=nu / omega_k)


def diagonal_energies_ap(q: float, omega_k: float) -> float:
    """omega_k-dependent diagonal excess of |g; one photon> in the A.p form,
    per unit V: hbar omega_k + q^2 hbar / (2 m omega_k eps0).

    The second term diverges as omega_k -> 0: one soft photon rearranges the
    momentum-velocity relation no matter how little energy it carries.  The
    E.r counterpart replaces it by the omega-independent dipole self-energy.
    """
    if omega_k <= 0:
        raise ValueError("omega_k must be > 0")
    return omega_k + q**2 / (2.0 * omega_k * EPS0)


def appendix_report() -> dict:
    """Reference numbers for the CLI appendix command (atomic units)."""
    eps10 = 10.0 * ALPHA  # 10 a0/c in atomic time units
    smooth = self_energy_smooth(1.0, eps10)
    sharp = self_energy_sharp(1.0, C_AU)  # Omega = c/a0
    nu = 3.0 / 8.0  # hydrogen 1s-2p gap in atomic frequency units
    shift_rel = smooth.as_frequency_shift(R2_EXCITED_2P - R2_GROUND_1S) / nu
    return {
        "angular_factor": angular_factor(),
        "self_energy_smooth_eps10_coeff": smooth.coefficient,
        "self_energy_sharp_omega_c_coeff": sharp.coefficient,
        "r2_ground_1s": R2_GROUND_1S,
        "r2_excited_2p": R2_EXCITED_2P,
        "r2_cross": R2_CROSS,
        "smooth_shift_over_nu_eps10": shift_rel,
        "ap_er_ratio_at_resonance": compare_ap_er(1.0, nu, nu, 1.0).ratio,
        "diagonal_ap_excess_at_nu": diagonal_energies_ap(1.0, nu),
    }
