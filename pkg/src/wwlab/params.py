"""Physical parameterization, the hydrogen 1s-2p preset, and validity checks.

Internally every solver works in whatever unit system the parameters carry;
the canonical choice for numerics is the dimensionless one (transition
frequency nu = 1).  ``rescale_frequency`` converts between systems while
preserving the dimensionless products eps*nu, Gamma/nu and D*nu^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .cutoff import CutoffKind, CutoffSpec
from .errors import UnsupportedCutoff

# CODATA fine-structure constant.
ALPHA = 7.2973525693e-3

# Hydrogen 1s-2p dipole moment in units of e*a0: 128*sqrt(2)/243.
HYDROGEN_DIPOLE_EAU = 128.0 * math.sqrt(2.0) / 243.0

# Transition frequency nu = (3 alpha / 8) c / a0, expressed in c/a0 units.
HYDROGEN_NU = 3.0 * ALPHA / 8.0

# Coupling constant in (a0/c)^2 units.  The rounded form alpha/(2 pi) follows
# from approximating the dipole moment by (3/4) e a0 and is the one whose
# arithmetic reproduces the textbook ratios Gamma/nu = (3 alpha/8)^2 alpha;
# the exact-dipole value 2 kappa^2 alpha / (3 pi) is exposed alongside.
HYDROGEN_D_ROUNDED = ALPHA / (2.0 * math.pi)
HYDROGEN_D_EXACT = 2.0 * HYDROGEN_DIPOLE_EAU**2 * ALPHA / (3.0 * math.pi)

# Cutoff time scale of the preset, in a0/c units.
HYDROGEN_EPS = 10.0

# Realization of "much smaller than" in the slow-amplitude condition.
STAR_THRESHOLD = 0.1


class UnitSystem(str, enum.Enum):
    """Unit conventions for a parameter set.

    DIMENSIONLESS: nu = 1 and c = 1; times in 1/nu.
    ATOMIC_HYDROGEN: times in a0/c, frequencies in c/a0; alpha explicit.
    """

    DIMENSIONLESS = "dimensionless"
    ATOMIC_HYDROGEN = "atomic-hydrogen"


@dataclass(frozen=True)
class AtomFieldParams:
    """Transition frequency, coupling constant and cutoff of one atom-field model.

    ``D`` is the prefactor of the omega-integral in the amplitude equation
    (units time^2); the spontaneous rate Gamma = 2 pi nu^3 D is always derived
    from it, never stored.  D = 0 is allowed and means no coupling.
    """

    nu: float
    D: float
    cutoff: CutoffSpec
    units: UnitSystem = UnitSystem.DIMENSIONLESS

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("nu must be > 0")
        if self.D < 0:
            raise ValueError("D must be >= 0")
        object.__setattr__(self, "units", UnitSystem(self.units))

    def gamma(self) -> float:
        """Bare spontaneous rate Gamma = 2 pi nu^3 D."""
        return 2.0 * math.pi * self.nu**3 * self.D

    # -- config serialization (keys are part of the CLI contract) ---------

    def to_config_dict(self) -> dict:
        return {
            "nu": self.nu,
            "D": self.D,
            "units": self.units.value,
            "cutoff": self.cutoff.to_config_dict(),
        }

    @staticmethod
    def from_config_dict(d: dict) -> "AtomFieldParams":
        return AtomFieldParams(
            nu=float(d["nu"]),
            D=float(d["D"]),
            cutoff=CutoffSpec.from_config_dict(d["cutoff"]),
            units=UnitSystem(d.get("units", "dimensionless")),
        )


def gamma(p: AtomFieldParams) -> float:
    """Module-level alias for ``p.gamma()``."""
    return p.gamma()


def hydrogen_preset() -> AtomFieldParams:
    """Hydrogen 1s-2p parameters in atomic-hydrogen units (times in a0/c).

    nu = 3 alpha / 8, D = alpha / (2 pi), exponential cutoff with
    eps = 10 a0/c.  See ``hydrogen_reference`` for the exact-dipole variant.
    """
    return AtomFieldParams(
        nu=HYDROGEN_NU,
        D=HYDROGEN_D_ROUNDED,
        cutoff=CutoffSpec.exponential(HYDROGEN_EPS),
        units=UnitSystem.ATOMIC_HYDROGEN,
    )


def hydrogen_reference() -> dict:
    """Reference numbers of the hydrogen preset, for reporting.

    Includes both the rounded coupling used operationally and the one derived
    from the exact dipole moment 128*sqrt(2)/243 e a0.
    """
    p = hydrogen_preset()
    return {
        "dipole_moment_e_a0": HYDROGEN_DIPOLE_EAU,
        "nu_a0_over_c": HYDROGEN_NU,
        "D_rounded_a0c2": HYDROGEN_D_ROUNDED,
        "D_exact_a0c2": HYDROGEN_D_EXACT,
        "eps_c_over_a0": HYDROGEN_EPS,
        "gamma_over_nu": 2.0 * math.pi * HYDROGEN_NU**2 * HYDROGEN_D_ROUNDED,
        "gamma_over_nu_exact_dipole": 2.0 * math.pi * HYDROGEN_NU**2 * HYDROGEN_D_EXACT,
        "eps_times_nu": HYDROGEN_EPS * HYDROGEN_NU,
    }


def rescale_frequency(
    p: AtomFieldParams, new_nu: float, new_units: UnitSystem
) -> AtomFieldParams:
    """Rescale all time-dimension quantities so the frequency becomes new_nu.

    Preserves eps*nu, D*nu^2, omega_max/nu and nu_ref/nu exactly (up to
    floating point), which is what makes unit round trips lossless.
    """
    if new_nu <= 0:
        raise ValueError("new_nu must be > 0")
    s = p.nu / new_nu  # time dilation factor
    c = p.cutoff
    if c.kind is CutoffKind.NONE:
        new_cut = c
    elif c.kind is CutoffKind.EXPONENTIAL:
        new_cut = CutoffSpec.exponential(c.eps * s)
    elif c.kind is CutoffKind.SHARP:
        new_cut = CutoffSpec.sharp(c.omega_max / s)
    else:
        new_cut = CutoffSpec.ap_shape(c.eps * s, c.nu_ref / s)
    return AtomFieldParams(nu=new_nu, D=p.D * s**2, cutoff=new_cut, units=new_units)


def to_dimensionless(p: AtomFieldParams) -> AtomFieldParams:
    """Convert to the nu = 1 system used internally by the solvers."""
    return rescale_frequency(p, 1.0, UnitSystem.DIMENSIONLESS)


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the cutoff-window and slow-amplitude checks.

    ``eps_scaled`` is eps*c/a0 for hydrogen units and its generic equivalent
    eps*nu * 8/(3 alpha) otherwise, so the same fixed bounds apply in both.
    """

    lower_bound: float
    upper_bound: float
    eps_scaled: float
    star_ok: bool
    window_ok: bool
    lamb_ratio: float
    rate_ratio: float
    star_threshold: float = STAR_THRESHOLD

    def as_dict(self) -> dict:
        return {
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "eps_scaled": self.eps_scaled,
            "star_ok": self.star_ok,
            "window_ok": self.window_ok,
            "lamb_ratio": self.lamb_ratio,
            "rate_ratio": self.rate_ratio,
            "star_threshold": self.star_threshold,
        }


def validity_report(p: AtomFieldParams) -> ValidityReport:
    """Check the cutoff window cbrt(8/3pi) < eps_scaled < 8/(3 alpha) and the
    slow-amplitude condition (rate and shift both small against nu).

    Only defined for the exponential cutoff, for which the bounds were derived.
    """
    if p.cutoff.kind is not CutoffKind.EXPONENTIAL:
        raise UnsupportedCutoff("validity window is stated for the exponential cutoff")
    eps = p.cutoff.eps
    lower = (8.0 / (3.0 * math.pi)) ** (1.0 / 3.0)
    upper = 8.0 / (3.0 * ALPHA)
    eps_scaled = eps * p.nu * 8.0 / (3.0 * ALPHA)
    rate_ratio = 2.0 * math.pi * p.nu**2 * p.D  # Gamma / nu
    lamb_ratio = 2.0 * p.D / (eps**3 * p.nu)  # leading shift / nu
    return ValidityReport(
        lower_bound=lower,
        upper_bound=upper,
        eps_scaled=eps_scaled,
        star_ok=(rate_ratio < STAR_THRESHOLD) and (lamb_ratio < STAR_THRESHOLD),
        window_ok=(lower < eps_scaled < upper),
        lamb_ratio=lamb_ratio,
        rate_ratio=rate_ratio,
    )
