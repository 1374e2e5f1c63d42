"""Cutoff families and the spectral weight g(omega) they induce.

The bare coupling density of a dipole in free space grows like omega^3,
which makes every frequency integral downstream divergent.  Each cutoff
family suppresses the high-frequency end in a different way:

* ``exponential`` -- omega^3 * exp(-eps*omega), kernel has a simple closed form;
* ``sharp``       -- omega^3 truncated at omega_max;
* ``ap-shape``    -- nu_ref^2 * omega / (1 + eps^2 omega^2)^4, the shape obtained
  from the vector-potential coupling in an angular-momentum mode basis;
* ``none``        -- the bare omega^3 density, kept only so that the divergence
  can be demonstrated (and rejected) explicitly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentIntegral, NegativeFrequency


class CutoffKind(str, enum.Enum):
    NONE = "none"
    EXPONENTIAL = "exponential"
    SHARP = "sharp"
    AP_SHAPE = "ap-shape"


@dataclass(frozen=True)
class CutoffSpec:
    """Tagged cutoff family with its parameters.

    ``eps`` is a time scale (exponential and ap-shape), ``omega_max`` a
    frequency (sharp), ``nu_ref`` the fixed reference frequency entering the
    ap-shape numerator.  Unused fields are None.
    """

    kind: CutoffKind
    eps: float | None = None
    omega_max: float | None = None
    nu_ref: float | None = None

    def __post_init__(self):
        kind = CutoffKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is CutoffKind.EXPONENTIAL:
            if self.eps is None or self.eps <= 0:
                raise ValueError("exponential cutoff requires eps > 0")
        elif kind is CutoffKind.SHARP:
            if self.omega_max is None or self.omega_max <= 0:
                raise ValueError("sharp cutoff requires omega_max > 0")
        elif kind is CutoffKind.AP_SHAPE:
            if self.eps is None or self.eps <= 0:
                raise ValueError("ap-shape cutoff requires eps > 0")
            if self.nu_ref is None or self.nu_ref <= 0:
                raise ValueError("ap-shape cutoff requires nu_ref > 0")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def none() -> "CutoffSpec":
        return CutoffSpec(CutoffKind.NONE)

    @staticmethod
    def exponential(eps: float) -> "CutoffSpec":
        return CutoffSpec(CutoffKind.EXPONENTIAL, eps=float(eps))

    @staticmethod
    def sharp(omega_max: float) -> "CutoffSpec":
        return CutoffSpec(CutoffKind.SHARP, omega_max=float(omega_max))

    @staticmethod
    def ap_shape(eps: float, nu_ref: float) -> "CutoffSpec":
        return CutoffSpec(CutoffKind.AP_SHAPE, eps=float(eps), nu_ref=float(nu_ref))

    # -- serialization (config contract: cutoff.kind, cutoff.eps, ...) ----

    def to_config_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.eps is not None:
            out["eps"] = self.eps
        if self.omega_max is not None:
            out["omega_max"] = self.omega_max
        if self.nu_ref is not None:
            out["nu_ref"] = self.nu_ref
        return out

    @staticmethod
    def from_config_dict(d: dict) -> "CutoffSpec":
        kind = CutoffKind(d["kind"])
        return CutoffSpec(
            kind,
            eps=d.get("eps"),
            omega_max=d.get("omega_max"),
            nu_ref=d.get("nu_ref"),
        )


def spectral_weight(spec: CutoffSpec, omega):
    """Weight w(omega) multiplying the mode density, for omega >= 0.

    none:        omega^3
    exponential: omega^3 * exp(-eps*omega)
    sharp:       omega^3 * 1[omega <= omega_max]
    ap-shape:    nu_ref^2 * omega / (1 + eps^2 omega^2)^4

    Accepts scalars or arrays; raises NegativeFrequency on any omega < 0.
    """
    om = np.asarray(omega, dtype=float)
    if np.any(om < 0):
        raise NegativeFrequency("spectral_weight requires omega >= 0")
    if spec.kind is CutoffKind.NONE:
        w = om**3
    elif spec.kind is CutoffKind.EXPONENTIAL:
        w = om**3 * np.exp(-spec.eps * om)
    elif spec.kind is CutoffKind.SHARP:
        w = np.where(om <= spec.omega_max, om**3, 0.0)
    else:
        w = spec.nu_ref**2 * om / (1.0 + spec.eps**2 * om**2) ** 4
    if np.isscalar(omega) or (hasattr(omega, "ndim") and getattr(omega, "ndim", 0) == 0):
        return float(w)
    return w


def low_frequency_exponent(spec: CutoffSpec) -> int:
    """Leading power of omega in w(omega) as omega -> 0.

    3 for the omega^3 families (none, exponential, sharp), 1 for ap-shape,
    whose vector-potential origin overweights the low-frequency end.
    """
    if spec.kind is CutoffKind.AP_SHAPE:
        return 1
    return 3


def total_weight(spec: CutoffSpec) -> float:
    """Closed form of the full integral of w over [0, inf).

    Raises DivergentIntegral for the bare omega^3 density.
    """
    if spec.kind is CutoffKind.NONE:
        raise DivergentIntegral("integral of omega^3 over [0, inf) diverges")
    if spec.kind is CutoffKind.EXPONENTIAL:
        return 6.0 / spec.eps**4
    if spec.kind is CutoffKind.SHARP:
        return spec.omega_max**4 / 4.0
    return spec.nu_ref**2 / (6.0 * spec.eps**2)


def tail_fraction(spec: CutoffSpec, omega_hi: float) -> float:
    """Fraction of the total weight above omega_hi (closed forms).

    Used to decide whether a finite discretization span is rich enough.
    """
    if omega_hi < 0:
        raise NegativeFrequency("omega_hi must be >= 0")
    if spec.kind is CutoffKind.NONE:
        raise DivergentIntegral("bare omega^3 density has no finite tail fraction")
    if spec.kind is CutoffKind.EXPONENTIAL:
        x = spec.eps * omega_hi
        # Gamma(4, x) / Gamma(4)
        return math.exp(-x) * (x**3 + 3 * x**2 + 6 * x + 6) / 6.0
    if spec.kind is CutoffKind.SHARP:
        if omega_hi >= spec.omega_max:
            return 0.0
        return 1.0 - (omega_hi / spec.omega_max) ** 4
    u = 1.0 + spec.eps**2 * omega_hi**2
    return 1.0 / u**3
