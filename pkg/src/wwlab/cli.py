"""Command-line front end: config ingestion, analysis subcommands, sweeps.

Subcommands
-----------
simulate   solve the memory equation, emit trace.csv and summary.json
kernel     tabulate the memory kernel as CSV (tau, re, im)
modes      discretize the bath, solve, emit mode table and photon spectrum
appendix   dipole-level reference numbers as JSON

Exit codes: 0 success, 2 configuration error, 3 solver/domain error (the
error class name is printed on stderr).  Sweep points run in a process
pool capped by the WW_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import dipole, markov, modes, volterra
from .cutoff import CutoffKind, CutoffSpec
from .errors import ConfigError, WWLabError, WindowTooSmall, AmplitudeUnderflow
from .kernel import kernel_table
from .params import (
    AtomFieldParams,
    UnitSystem,
    hydrogen_preset,
    hydrogen_reference,
    validity_report,
)
from .tableio import write_csv

_SCALED_REGIME = dict(nu=1.0, D=1e-3, eps=0.3)


# ---------------------------------------------------------------------------
# configuration assembly
# ---------------------------------------------------------------------------


def preset_params(name: str) -> AtomFieldParams:
    if name == "hydrogen":
        return hydrogen_preset()
    if name == "hydrogen-scaled":
        # hydrogen's qualitative regime mapped onto desk-tractable numbers
        return AtomFieldParams(
            nu=_SCALED_REGIME["nu"],
            D=_SCALED_REGIME["D"],
            cutoff=CutoffSpec.exponential(_SCALED_REGIME["eps"]),
        )
    raise ConfigError(f"unknown preset {name!r} (use hydrogen or hydrogen-scaled)")


def load_config(path) -> dict:
    try:
        with open(path) as f:
            cfg = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def serialize_config(p: AtomFieldParams, solver: dict | None = None) -> dict:
    out = p.to_config_dict()
    if solver:
        out["solver"] = dict(solver)
    return out


def parse_config(cfg: dict) -> tuple[AtomFieldParams, dict]:
    """Validate a config tree; returns (params, solver settings dict)."""
    known = {"nu", "D", "units", "cutoff", "solver", "out"}
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        p = AtomFieldParams.from_config_dict(cfg)
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(f"invalid parameter block: {e}") from e
    solver = cfg.get("solver", {})
    if not isinstance(solver, dict):
        raise ConfigError("solver block must be an object")
    return p, dict(solver)


def _build_params(ns) -> tuple[AtomFieldParams, dict]:
    solver: dict = {}
    if ns.preset:
        p = preset_params(ns.preset)
    else:
        p = preset_params("hydrogen-scaled")
    if ns.config:
        p, solver = parse_config(load_config(ns.config))
    nu = ns.nu if ns.nu is not None else p.nu
    D = ns.D if ns.D is not None else p.D
    units = p.units
    cut = p.cutoff
    if ns.cutoff is not None:
        kind = ns.cutoff
        try:
            kind = CutoffKind(kind)
        except ValueError as e:
            raise ConfigError(f"unknown cutoff kind {ns.cutoff!r}") from e
        cut = _make_cutoff(kind, ns, fallback=cut, nu=nu)
    elif ns.eps is not None or ns.omega_max is not None:
        cut = _make_cutoff(cut.kind, ns, fallback=cut, nu=nu)
    try:
        p = AtomFieldParams(nu=nu, D=D, cutoff=cut, units=units)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    if ns.dt is not None:
        solver["dt"] = ns.dt
    if ns.t_end is not None:
        solver["t_end"] = ns.t_end
    if getattr(ns, "t_mem", None) is not None:
        solver["t_mem"] = ns.t_mem
    if getattr(ns, "scheme", None) is not None:
        solver["scheme"] = ns.scheme
    return p, solver


def _make_cutoff(kind: CutoffKind, ns, fallback: CutoffSpec, nu: float) -> CutoffSpec:
    eps = ns.eps if ns.eps is not None else fallback.eps
    omega_max = ns.omega_max if ns.omega_max is not None else fallback.omega_max
    try:
        if kind is CutoffKind.NONE:
            return CutoffSpec.none()
        if kind is CutoffKind.EXPONENTIAL:
            if eps is None:
                raise ConfigError("exponential cutoff needs --eps")
            return CutoffSpec.exponential(eps)
        if kind is CutoffKind.SHARP:
            if omega_max is None:
                raise ConfigError("sharp cutoff needs --omega-max")
            return CutoffSpec.sharp(omega_max)
        if eps is None:
            raise ConfigError("ap-shape cutoff needs --eps")
        return CutoffSpec.ap_shape(eps, fallback.nu_ref or nu)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _solver_config(p: AtomFieldParams, solver: dict) -> volterra.SolverConfig:
    if p.cutoff.kind is CutoffKind.NONE:
        # let volterra.solve raise DivergentKernel; pick any legal step
        return volterra.SolverConfig(dt=solver.get("dt", 0.01), t_end=solver.get("t_end", 1.0))
    from .volterra import _resolution_limit

    dt = float(solver.get("dt", _resolution_limit(p.cutoff)))
    t_end = solver.get("t_end")
    if t_end is None:
        g = markov.markov_summary(p).gamma_eff if p.D > 0 else 0.0
        if g <= 0:
            raise ConfigError("t_end must be given when the decay rate vanishes")
        t_end = 3.0 / g
    t_end = float(t_end)
    n_steps = t_end / dt
    if n_steps > volterra._MAX_STEPS:
        raise ConfigError(
            f"t_end/dt = {n_steps:.3g} steps is not desk-tractable; "
            "rescale the parameters (see the hydrogen-scaled preset)"
        )
    t_mem = solver.get("t_mem")
    if t_mem is not None:
        history = volterra.History.truncated(float(t_mem))
    elif n_steps > 150_000 and p.cutoff.kind is CutoffKind.EXPONENTIAL:
        history = volterra.History.truncated(max(20.0 * p.cutoff.eps, 40.0 * dt * 16))
    else:
        history = volterra.History.full()
    scheme = volterra.Scheme(solver.get("scheme", "trapezoid-product"))
    return volterra.SolverConfig(dt=dt, t_end=t_end, history=history, scheme=scheme)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _fit_window(p: AtomFieldParams, summary: markov.MarkovSummary, t_end: float):
    if p.cutoff.kind is not CutoffKind.EXPONENTIAL or summary.gamma_eff <= 0:
        return None
    t0 = 10.0 * p.cutoff.eps
    t1 = min(1.0 / summary.gamma_eff, 0.9 * t_end)
    if t1 <= t0:
        t1 = 0.9 * t_end
    if t1 <= t0:
        return None
    return (t0, t1)


def _run_single(p: AtomFieldParams, cfg: volterra.SolverConfig, out: Path, tag: str,
                backend: str | None, preset: str | None):
    trace = volterra.solve(p, cfg, backend=backend)
    summary = markov.markov_summary(p)
    fit = None
    window = _fit_window(p, summary, cfg.t_end)
    if window is not None:
        try:
            fit = markov.fit_exponential(trace, window)
        except (WindowTooSmall, AmplitudeUnderflow):
            fit = None
    validity = None
    if p.cutoff.kind is CutoffKind.EXPONENTIAL:
        validity = validity_report(p).as_dict()
    suffix = f"_{tag}" if tag else ""
    trace.to_csv(out / f"trace{suffix}.csv")
    doc = {
        "params": p.to_config_dict(),
        "solver": {
            "dt": cfg.dt,
            "t_end": cfg.t_end,
            "scheme": cfg.scheme.value,
            "history": {"kind": cfg.history.kind, "t_mem": cfg.history.t_mem},
        },
        "markov": summary.as_dict(),
        "fit": fit.as_dict() if fit is not None else None,
        "validity": validity,
        "trace": trace.to_json_dict(),
    }
    if preset in ("hydrogen", "hydrogen-scaled"):
        doc["hydrogen_reference"] = hydrogen_reference()
    with open(out / f"summary{suffix}.json", "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
    return fit.gamma_fit if fit is not None else float("nan")


_SWEEP_KEYS = ("eps", "omega_max", "nu", "D", "dt", "t_end")


def _parse_sweep(text: str):
    m = re.fullmatch(r"([A-Za-z_-]+)=([^=]+)", text.strip())
    if not m:
        raise ConfigError("sweep must look like key=v1,v2,...")
    key = m.group(1).replace("-", "_")
    if key not in _SWEEP_KEYS:
        raise ConfigError(f"sweep key must be one of {_SWEEP_KEYS}")
    tokens = [t.strip() for t in m.group(2).split(",") if t.strip()]
    if len(tokens) < 1:
        raise ConfigError("sweep needs at least one value")
    try:
        values = [float(t) for t in tokens]
    except ValueError as e:
        raise ConfigError(f"bad sweep value: {e}") from e
    return key, tokens, values


def _apply_sweep_value(p: AtomFieldParams, solver: dict, key: str, val: float):
    solver = dict(solver)
    if key == "dt":
        solver["dt"] = val
        return p, solver
    if key == "t_end":
        solver["t_end"] = val
        return p, solver
    if key == "nu":
        return AtomFieldParams(nu=val, D=p.D, cutoff=p.cutoff, units=p.units), solver
    if key == "D":
        return AtomFieldParams(nu=p.nu, D=val, cutoff=p.cutoff, units=p.units), solver
    c = p.cutoff
    if key == "eps":
        if c.kind is CutoffKind.EXPONENTIAL:
            cut = CutoffSpec.exponential(val)
        elif c.kind is CutoffKind.AP_SHAPE:
            cut = CutoffSpec.ap_shape(val, c.nu_ref)
        else:
            raise ConfigError("eps sweep requires an eps-type cutoff")
    else:
        cut = CutoffSpec.sharp(val)
    return AtomFieldParams(nu=p.nu, D=p.D, cutoff=cut, units=p.units), solver


def _sweep_worker(args):
    cfg_dict, solver, out_dir, tag, backend, preset = args
    p = AtomFieldParams.from_config_dict(cfg_dict)
    cfg = _solver_config(p, solver)
    g = _run_single(p, cfg, Path(out_dir), tag, backend, preset)
    return tag, g


def cmd_simulate(ns) -> int:
    p, solver = _build_params(ns)
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    if ns.sweep:
        key, tokens, values = _parse_sweep(ns.sweep)
        jobs = []
        for tok, val in zip(tokens, values):
            pv, sv = _apply_sweep_value(p, solver, key, val)
            _solver_config(pv, sv)  # validate early, in the parent process
            tag = f"{key}_{re.sub(r'[^0-9A-Za-z.+-]', '_', tok)}"
            jobs.append((pv.to_config_dict(), sv, str(out), tag, ns.backend, ns.preset))
        n_workers = int(os.environ.get("WW_THREADS", "0") or 0)
        if n_workers <= 1 or len(jobs) == 1:
            results = [_sweep_worker(j) for j in jobs]
        else:
            with concurrent.futures.ProcessPoolExecutor(
                max_workers=min(n_workers, len(jobs))
            ) as ex:
                results = list(ex.map(_sweep_worker, jobs))
        write_csv(
            out / "sweep.csv",
            [key, "gamma_fit"],
            [np.array(values), np.array([g for _, g in results])],
        )
        return 0
    cfg = _solver_config(p, solver)
    _run_single(p, cfg, out, "", ns.backend, ns.preset)
    return 0


# ---------------------------------------------------------------------------
# kernel / modes / appendix
# ---------------------------------------------------------------------------


def cmd_kernel(ns) -> int:
    p, _ = _build_params(ns)
    tau_max = ns.tau_max if ns.tau_max is not None else (
        20.0 * p.cutoff.eps if p.cutoff.eps else 20.0 / p.cutoff.omega_max
    )
    taus = np.linspace(0.0, tau_max, ns.points)
    t, K = kernel_table(p.cutoff, taus)
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "kernel.csv", ["tau", "re", "im"], [t, K.real, K.imag])
    return 0


def _default_span(p: AtomFieldParams) -> tuple[float, float]:
    c = p.cutoff
    if c.kind is CutoffKind.EXPONENTIAL:
        return (0.0, 30.0 / c.eps + p.nu)
    if c.kind is CutoffKind.SHARP:
        return (0.0, c.omega_max)
    if c.kind is CutoffKind.AP_SHAPE:
        return (0.0, 15.0 / c.eps + p.nu)
    raise ConfigError("mode discretization needs a cutoff")


def cmd_modes(ns) -> int:
    p, solver = _build_params(ns)
    span = _default_span(p)
    mset = modes.discretize(p, ns.n, span)
    dmax = float(np.max(np.abs(p.nu - mset.omegas)))
    dt = solver.get("dt") or 0.09 / dmax
    t_end = solver.get("t_end")
    if t_end is None:
        g = markov.markov_summary(p).gamma_eff if p.D > 0 else 0.0
        if g <= 0:
            raise ConfigError("t_end must be given when the decay rate vanishes")
        t_end = 2.0 / g
    trace, final = modes.solve_modes(p, mset, float(t_end), float(dt), backend=ns.backend)
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    mset.to_csv(out / "modes.csv")
    pops = modes.spectrum(mset, final)
    write_csv(out / "spectrum.csv", ["omega", "population"], [mset.omegas, pops])
    dens = pops / np.gradient(mset.omegas)
    doc = {
        "params": p.to_config_dict(),
        "n_modes": mset.count,
        "omega_span": list(span),
        "dt": dt,
        "t_end": t_end,
        "final_norm": final.norm_sq,
        "norm_drift": float(np.max(np.abs(np.asarray(trace.norms) - 1.0))),
        "peak_omega": float(mset.omegas[int(np.argmax(dens))]),
        "final_excited_population": float(abs(final.c_e) ** 2),
    }
    with open(out / "modes_summary.json", "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")
    return 0


def cmd_appendix(ns) -> int:
    doc = dipole.appendix_report()
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    with open(out / "appendix.json", "w") as f:
        f.write(text)
    sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _add_common(sp):
    sp.add_argument("--config", help="JSON config file")
    sp.add_argument("--preset", choices=["hydrogen", "hydrogen-scaled"])
    sp.add_argument("--cutoff", help="none | exponential | sharp | ap-shape")
    sp.add_argument("--eps", type=float, help="cutoff time scale")
    sp.add_argument("--omega-max", dest="omega_max", type=float, help="sharp cutoff frequency")
    sp.add_argument("--nu", type=float, help="transition frequency")
    sp.add_argument("--D", type=float, help="coupling constant")
    sp.add_argument("--dt", type=float, help="solver time step")
    sp.add_argument("--t-end", dest="t_end", type=float, help="integration horizon")
    sp.add_argument("--out", default="out", help="output directory")
    sp.add_argument("--backend", choices=["numba", "numpy"], help="kernel backend override")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wwlab",
        description="Spontaneous-emission decay laboratory with frequency cutoffs.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="solve the memory equation")
    _add_common(sp)
    sp.add_argument("--sweep", help="key=v1,v2,... (keys: eps, omega-max, nu, D, dt, t-end)")
    sp.add_argument("--t-mem", dest="t_mem", type=float, help="fine-history window")
    sp.add_argument(
        "--scheme", choices=[s.value for s in volterra.Scheme], help="integration scheme"
    )
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("kernel", help="tabulate the memory kernel")
    _add_common(sp)
    sp.add_argument("--tau-max", dest="tau_max", type=float, help="largest tau")
    sp.add_argument("--points", type=int, default=201)
    sp.set_defaults(fn=cmd_kernel)

    sp = sub.add_parser("modes", help="discrete-mode run and photon spectrum")
    _add_common(sp)
    sp.add_argument("--n", type=int, default=200, help="number of bath modes")
    sp.set_defaults(fn=cmd_modes)

    sp = sub.add_parser("appendix", help="dipole-level reference numbers")
    _add_common(sp)
    sp.set_defaults(fn=cmd_appendix)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return ns.fn(ns)
    except ConfigError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except WWLabError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except (ValueError, KeyError) as e:
        print(f"ConfigError: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
