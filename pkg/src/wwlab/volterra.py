"""Time-domain solver for the amplitude equation with memory.

The excited amplitude obeys c'(t) = -int_0^t M(t - t') c(t') dt' with the
memory kernel M(tau) = D K(tau) e^{i nu tau} and c(0) = 1 (atom excited,
field in vacuum).  Two schemes are provided:

* ``trapezoid-product``: implicit trapezoidal product integration, order 2,
  with either the full O(N^2) history or the compressed far-history variant
  for long horizons;
* ``rk4-volterra``: Pouzet-type Runge-Kutta of order 4 with Gregory-weight
  lag quadrature (full history only; meant for convergence studies).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .cutoff import CutoffKind, CutoffSpec
from .errors import DivergentKernel, StepTooLarge
from .kernel import kernel_eval
from .params import AtomFieldParams

_MAX_STEPS = 50_000_000
_DEFAULT_MAX_STORED = 400_000


class Scheme(str, enum.Enum):
    TRAPEZOID_PRODUCT = "trapezoid-product"
    RK4_VOLTERRA = "rk4-volterra"


@dataclass(frozen=True)
class History:
    """Full history, or fine-grid window of length t_mem plus compressed far field."""

    kind: str = "full"  # "full" | "truncated"
    t_mem: float | None = None

    @staticmethod
    def full() -> "History":
        return History("full")

    @staticmethod
    def truncated(t_mem: float) -> "History":
        return History("truncated", float(t_mem))


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    t_end: float
    history: History = field(default_factory=History.full)
    scheme: Scheme = Scheme.TRAPEZOID_PRODUCT
    store_every: int | None = None  # None: keep stored grid below ~400k points

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be > 0")
        object.__setattr__(self, "scheme", Scheme(self.scheme))


@dataclass
class AmplitudeTrace:
    """Excited-state amplitude samples on a monotone time grid."""

    times: np.ndarray
    c_e: np.ndarray
    params: AtomFieldParams | None = None
    norms: np.ndarray | None = None  # mode-solver total norm, when available

    @property
    def norm_sq(self) -> np.ndarray:
        return np.abs(self.c_e) ** 2

    def window_indices(self, t_start: float, t_stop: float) -> np.ndarray:
        return np.nonzero((self.times >= t_start) & (self.times <= t_stop))[0]

    def to_csv(self, path) -> None:
        from .tableio import write_csv

        cols = [self.times, self.c_e.real, self.c_e.imag, self.norm_sq]
        write_csv(path, ["t", "re_c", "im_c", "norm_sq"], cols)

    def to_json_dict(self) -> dict:
        out = {
            "t_start": float(self.times[0]),
            "t_end": float(self.times[-1]),
            "samples": int(self.times.size),
            "final_norm_sq": float(self.norm_sq[-1]),
        }
        if self.params is not None:
            out["params"] = self.params.to_config_dict()
        return out

    def to_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_json_dict(), f, indent=2, sort_keys=True)
            f.write("\n")


def _resolution_limit(cutoff: CutoffSpec) -> float:
    """Largest dt that still resolves the kernel structure."""
    if cutoff.kind in (CutoffKind.EXPONENTIAL, CutoffKind.AP_SHAPE):
        return cutoff.eps / 10.0
    if cutoff.kind is CutoffKind.SHARP:
        return math.pi / (10.0 * cutoff.omega_max)
    raise DivergentKernel("no kernel without a cutoff")


def _kernel_nodes(p: AtomFieldParams, h: float, count: int, offset: float = 0.0):
    tau = np.arange(count) * h + offset
    K = kernel_eval(p.cutoff, tau)
    return p.D * np.asarray(K) * np.exp(1j * p.nu * tau)


def solve(p: AtomFieldParams, cfg: SolverConfig, backend: str | None = None) -> AmplitudeTrace:
    """Integrate the memory equation; deterministic for fixed inputs.

    Raises DivergentKernel for the cutoff-free density and StepTooLarge when
    dt fails to resolve the kernel peak (exponential/ap-shape: dt <= eps/10;
    sharp: dt <= pi/(10 omega_max)).
    """
    if p.cutoff.kind is CutoffKind.NONE:
        raise DivergentKernel("the memory kernel diverges without a cutoff")
    dt_max = _resolution_limit(p.cutoff)
    if cfg.dt > dt_max * (1.0 + 1e-12):
        raise StepTooLarge(f"dt={cfg.dt} exceeds the resolution bound {dt_max:.6g}")
    n_steps = int(round(cfg.t_end / cfg.dt))
    if n_steps < 1:
        raise ValueError("t_end shorter than one step")
    if n_steps > _MAX_STEPS:
        raise ValueError(f"run of {n_steps} steps exceeds the {_MAX_STEPS} step guard")
    h = cfg.dt

    if cfg.scheme is Scheme.RK4_VOLTERRA:
        if cfg.history.kind != "full":
            raise ValueError("rk4-volterra supports full history only")
        M0 = _kernel_nodes(p, h, n_steps + 2)
        Mh = _kernel_nodes(p, h, n_steps + 2, offset=h / 2.0)
        c = _backend.rk4_volterra(M0, Mh, n_steps, h, backend=backend)
    elif cfg.history.kind == "full":
        M0 = _kernel_nodes(p, h, n_steps + 2)
        c = _backend.trap_full(M0, n_steps, h, backend=backend)
    else:
        t_mem = cfg.history.t_mem
        eps = p.cutoff.eps if p.cutoff.eps is not None else 10.0 / p.cutoff.omega_max
        if t_mem is None or t_mem < 20.0 * eps:
            raise ValueError("truncated history requires t_mem >= 20 eps")
        if p.cutoff.kind is not CutoffKind.EXPONENTIAL:
            raise ValueError("compressed history is implemented for the exponential cutoff")
        n_fine = _backend.compressed_fine_steps(t_mem, h)
        M0 = _kernel_nodes(p, h, n_fine)
        c = _backend.trap_compressed(
            M0, n_steps, h, p.nu, p.cutoff.eps, p.D, t_mem, backend=backend
        )

    stride = cfg.store_every
    if stride is None:
        stride = max(1, int(math.ceil((n_steps + 1) / _DEFAULT_MAX_STORED)))
    idx = np.arange(0, n_steps + 1, stride)
    if idx[-1] != n_steps:
        idx = np.append(idx, n_steps)
    return AmplitudeTrace(times=idx * h, c_e=c[idx], params=p)


def convergence_study(
    p: AtomFieldParams, cfg: SolverConfig, refinements: int, backend: str | None = None
):
    """Richardson-style self-convergence: solve at dt/2^k, compare at t_end.

    Returns (list of (dt, error-vs-finest), observed orders).  The finest grid
    is the reference and is not reported as a data point.
    """
    if refinements < 2:
        raise ValueError("refinements must be >= 2")
    dts = [cfg.dt / 2**k for k in range(refinements + 1)]
    finals = []
    for dt in dts:
        sub = SolverConfig(
            dt=dt, t_end=cfg.t_end, history=cfg.history, scheme=cfg.scheme, store_every=None
        )
        tr = solve(p, sub, backend=backend)
        finals.append(tr.c_e[-1])
    ref = finals[-1]
    pairs = [(dts[k], abs(finals[k] - ref)) for k in range(refinements)]
    orders = []
    for k in range(refinements - 1):
        e0, e1 = pairs[k][1], pairs[k + 1][1]
        if e1 == 0:
            orders.append(float("inf"))
        else:
            orders.append(math.log2(e0 / e1))
    return pairs, orders
