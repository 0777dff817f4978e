"""Command-line front end producing deterministic CSV/JSON artifacts.

Subcommands: design, spectrum, evolve, sweep-tf, sweep-eps, and
figure <preset> for the eight built-in experiment presets. A JSON config
file provides any subset of the options; command-line flags override
file values. Unknown config keys are rejected. Exit codes: 0 success,
2 configuration error, 3 numerical failure. The environment variable
FAQUAD_WORKERS caps the number of concurrent sweep workers (default 1).

All CSV numbers are written with ``%.12g`` so that re-running an
identical configuration reproduces byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import dynamics as _dynamics
from . import model as _model
from . import perturbation as _perturbation
from . import protocol as _protocol
from . import tg as _tg
from .errors import ConfigError, FaquadError

_MODEL_KEYS = {
    "two-level": {"kind", "U", "J", "lambda_start", "lambda_end"},
    "bose-hubbard-3": {"kind", "U", "J", "lambda_start", "lambda_end"},
    "ring": {"kind", "u0", "K", "lambda_start", "lambda_end"},
}
_PROTOCOL_KEYS = {"kind", "pair", "grid_points", "value"}
_SWEEP_KEYS = {"tf", "tf_min", "tf_max", "tf_count", "epsilons", "N"}
_INTEGRATOR_KEYS = {"n_steps", "n_save"}
_TOP_KEYS = {"model", "protocol", "sweep", "integrator", "start", "target",
             "levels", "points", "output_dir"}

_PROTOCOL_ALIASES = {
    "faquad": _protocol.FAQUAD,
    "la": _protocol.LOCAL_ADIABATIC,
    "local-adiabatic": _protocol.LOCAL_ADIABATIC,
    "ua": _protocol.UNIFORM_ADIABATIC,
    "uniform-adiabatic": _protocol.UNIFORM_ADIABATIC,
    "linear": _protocol.LINEAR,
    "constant": _protocol.CONSTANT,
}

MIN_RING_K = 20


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as handle:
        handle.write(header + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _require_keys(section: dict, allowed, where: str):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {where}.{key}")


def _validate_model(mdl) -> None:
    if not isinstance(mdl, dict) or "kind" not in mdl:
        raise ConfigError("config.model.kind is required")
    kind = mdl["kind"]
    if kind not in _MODEL_KEYS:
        raise ConfigError(f"unknown model kind {kind!r}")
    _require_keys(mdl, _MODEL_KEYS[kind], "config.model")
    if kind == "ring" and int(mdl.get("K", 40)) < MIN_RING_K:
        raise ConfigError(f"config.model.K must be >= {MIN_RING_K} for converged runs")


def _validate_config(cfg: dict):
    _require_keys(cfg, _TOP_KEYS, "config")
    _validate_model(cfg.get("model"))
    if "protocol" in cfg:
        _require_keys(cfg["protocol"], _PROTOCOL_KEYS, "config.protocol")
        pk = cfg["protocol"].get("kind", "faquad")
        if pk not in _PROTOCOL_ALIASES:
            raise ConfigError(f"unknown protocol kind {pk!r}")
    if "sweep" in cfg:
        _require_keys(cfg["sweep"], _SWEEP_KEYS, "config.sweep")
    if "integrator" in cfg:
        _require_keys(cfg["integrator"], _INTEGRATOR_KEYS, "config.integrator")


def _build_spec(mdl: dict) -> _model.ModelSpec:
    kind = mdl["kind"]
    try:
        if kind == "two-level":
            return _model.two_level(U=float(mdl["U"]), J=float(mdl.get("J", 1.0)),
                                    delta_start=float(mdl["lambda_start"]),
                                    delta_end=float(mdl["lambda_end"]))
        if kind == "bose-hubbard-3":
            return _model.bose_hubbard3(U=float(mdl["U"]), J=float(mdl.get("J", 1.0)),
                                        delta_start=float(mdl["lambda_start"]),
                                        delta_end=float(mdl["lambda_end"]))
        return _model.ring(u0=float(mdl["u0"]), K=int(mdl.get("K", 40)),
                           omega_start=float(mdl.get("lambda_start", 0.0)),
                           omega_end=float(mdl.get("lambda_end", math.pi)))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc


def _build_trajectory(spec, proto: dict) -> _protocol.NormalizedTrajectory:
    kind = _PROTOCOL_ALIASES[proto.get("kind", "faquad")]
    pair = tuple(proto.get("pair", (1, 2)))
    grid_points = int(proto.get("grid_points", _protocol.DEFAULT_GRID_POINTS))
    try:
        if kind == _protocol.FAQUAD:
            return _protocol.design_faquad(spec, pair=pair, grid_points=grid_points)
        if kind == _protocol.LOCAL_ADIABATIC:
            return _protocol.design_local_adiabatic(spec, pair=pair, grid_points=grid_points)
        if kind == _protocol.UNIFORM_ADIABATIC:
            return _protocol.design_uniform_adiabatic(spec, pair=pair, grid_points=grid_points)
        if kind == _protocol.LINEAR:
            return _protocol.linear_ramp(spec)
        if "value" not in proto:
            raise ConfigError("constant protocol requires protocol.value")
        return _protocol.constant_protocol(spec, float(proto["value"]))
    except ValueError as exc:
        raise ConfigError(f"invalid protocol parameters: {exc}") from exc


def _workers() -> int:
    raw = os.environ.get("FAQUAD_WORKERS", "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"FAQUAD_WORKERS must be an integer, got {raw!r}") from exc
    return max(1, value)


def _tf_grid(sweep: dict) -> np.ndarray:
    try:
        lo = float(sweep["tf_min"])
        hi = float(sweep["tf_max"])
        count = int(sweep.get("tf_count", 300))
    except KeyError as exc:
        raise ConfigError(f"config.sweep.{exc.args[0]} is required for duration sweeps") from exc
    if not (0 < lo < hi) or count < 2:
        raise ConfigError("duration sweep needs 0 < tf_min < tf_max and tf_count >= 2")
    return np.linspace(lo, hi, count)


def _parse_start_target(value):
    if value is None:
        return None
    if isinstance(value, str) and value != _dynamics.GROUND:
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"start/target must be an integer or 'ground', got {value!r}") from exc
    return value


class _Run:
    """Accumulates outputs plus manifest data for one invocation."""

    def __init__(self, out_dir, command, cfg):
        self.out_dir = out_dir
        self.started = time.monotonic()
        self.manifest = {
            "command": command,
            "config": cfg,
            "version": __version__,
            "outputs": [],
            "derived": {},
            "point_failures": [],
        }
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name):
        self.manifest["outputs"].append(name)
        return os.path.join(self.out_dir, name)

    def finish(self) -> int:
        self.manifest["wall_time_s"] = round(time.monotonic() - self.started, 3)
        with open(os.path.join(self.out_dir, "manifest.json"), "w") as handle:
            json.dump(self.manifest, handle, indent=2, sort_keys=True)
            handle.write("\n")
        return 0


def _trajectory_rows(traj):
    return zip(traj.s_grid, traj.values)


def _cmd_design(cfg, out_dir):
    spec = _build_spec(cfg["model"])
    traj = _build_trajectory(spec, cfg.get("protocol", {}))
    run = _Run(out_dir, "design", cfg)
    _write_csv(run.path("trajectory.csv"), "s,lambda", _trajectory_rows(traj))
    run.manifest["derived"]["kind"] = traj.kind
    if traj.c_tilde is not None:
        run.manifest["derived"]["c_tilde"] = traj.c_tilde
        phi = _perturbation.phase_integral(traj)
        run.manifest["derived"]["phi"] = phi
        run.manifest["derived"]["period"] = 2.0 * math.pi / phi
    return run.finish()


def _cmd_spectrum(cfg, out_dir):
    spec = _build_spec(cfg["model"])
    levels = int(cfg.get("levels", 5))
    points = int(cfg.get("points", 161))
    grid = np.linspace(spec.lambda_start, spec.lambda_end, points)
    energies = np.linalg.eigvalsh(
        np.stack([_model.hamiltonian(spec, x) for x in grid])
    )[:, :levels]
    run = _Run(out_dir, "spectrum", cfg)
    rows = [(lam, n + 1, energies[i, n]) for i, lam in enumerate(grid) for n in range(levels)]
    _write_csv(run.path("spectrum.csv"), "lambda,n,energy", rows)
    if spec.kind == _model.RING:
        rows = []
        for lam in grid:
            alphas = _model.ring_alpha_roots(lam, spec.params.u0, levels)
            rows.extend((lam, n + 1, alphas[n], alphas[n] ** 2) for n in range(levels))
        _write_csv(run.path("alpha.csv"), "lambda,n,alpha,energy", rows)
    return run.finish()


def _cmd_evolve(cfg, out_dir):
    spec = _build_spec(cfg["model"])
    traj = _build_trajectory(spec, cfg.get("protocol", {}))
    sweep = cfg.get("sweep", {})
    if "tf" not in sweep:
        raise ConfigError("config.sweep.tf is required for evolve")
    t_f = float(sweep["tf"])
    if t_f <= 0:
        raise ConfigError("config.sweep.tf must be positive")
    integ = cfg.get("integrator", {})
    n_steps = integ.get("n_steps")
    n_save = int(integ.get("n_save", 401))
    start = _parse_start_target(cfg.get("start", _dynamics.GROUND))

    control = _protocol.rescale(traj, t_f)
    psi0 = _dynamics._start_vector(spec, traj, start)
    result = _dynamics.evolve(spec, control, psi0.astype(complex),
                              n_steps=n_steps, n_save=n_save)
    proj = _dynamics.adiabatic_projection(spec, control, result)

    run = _Run(out_dir, "evolve", cfg)
    rows = []
    for k, t in enumerate(proj.times):
        for n in range(spec.dim):
            gg = proj.g[k, n]
            rows.append((t, n + 1, gg.real, gg.imag))
    _write_csv(run.path("projection.csv"), "t,n,re_g,im_g", rows)
    run.manifest["derived"]["n_steps"] = result.n_steps
    run.manifest["derived"]["norm_drift"] = result.norm_drift
    run.manifest["derived"]["final_populations"] = [
        float(np.abs(result.final_state[i]) ** 2) for i in range(spec.dim)
    ]
    if traj.c_tilde is not None:
        run.manifest["derived"]["c_tilde"] = traj.c_tilde
    return run.finish()


def _sweep_population(spec, traj, cfg, tf_grid):
    integ = cfg.get("integrator", {})
    n_steps = integ.get("n_steps")
    if n_steps is None:
        n_steps = _dynamics.default_n_steps(spec, traj, float(np.max(tf_grid)))
    start = _parse_start_target(cfg.get("start", _dynamics.GROUND))
    target = _parse_start_target(cfg.get("target", 1))
    curve = _dynamics.fidelity_sweep(spec, traj, tf_grid, start=start, target=target,
                                     n_steps=int(n_steps), workers=_workers())
    return curve, int(n_steps)


def _cmd_sweep_tf(cfg, out_dir):
    spec = _build_spec(cfg["model"])
    traj = _build_trajectory(spec, cfg.get("protocol", {}))
    tf_grid = _tf_grid(cfg.get("sweep", {}))
    curve, n_steps = _sweep_population(spec, traj, cfg, tf_grid)
    if np.all(np.isnan(curve.population)):
        raise FaquadError("every sweep point failed")

    run = _Run(out_dir, "sweep-tf", cfg)
    _write_csv(run.path("sweep.csv"), "tf,population", zip(curve.tf, curve.population))
    run.manifest["derived"]["n_steps"] = n_steps
    run.manifest["point_failures"] = [{"tf": t, "error": m} for t, m in curve.failures]
    if traj.c_tilde is not None:
        pred = _perturbation.predict(traj)
        run.manifest["derived"]["c_tilde"] = pred.c_tilde
        run.manifest["derived"]["phi"] = pred.phi
        run.manifest["derived"]["period"] = pred.period
        rows = zip(curve.tf, _perturbation.predicted_infidelity(pred, curve.tf),
                   pred.envelope(curve.tf))
        _write_csv(run.path("prediction.csv"), "tf,predicted_infidelity,envelope", rows)
    return run.finish()


def _cmd_sweep_eps(cfg, out_dir):
    spec = _build_spec(cfg["model"])
    if spec.kind != _model.RING:
        raise ConfigError("sweep-eps is defined for the ring model")
    sweep = cfg.get("sweep", {})
    if "tf" not in sweep:
        raise ConfigError("config.sweep.tf is required for sweep-eps")
    t_f = float(sweep["tf"])
    ns = [int(n) for n in sweep.get("N", (3, 9))]
    epsilons = [float(e) for e in sweep.get("epsilons", _tg.DEFAULT_EPSILONS)]
    integ = cfg.get("integrator", {})
    n_steps = integ.get("n_steps")

    run = _Run(out_dir, "sweep-eps", cfg)
    rows = []
    for N in ns:
        proto = dict(cfg.get("protocol", {}))
        proto.setdefault("pair", (N, N + 1))
        traj = _build_trajectory(spec, proto)
        curve = _tg.epsilon_sweep(spec, N, traj, t_f, epsilons,
                                  n_steps=None if n_steps is None else int(n_steps))
        rows.extend((e, f, N) for e, f in zip(curve.abscissa, curve.fidelity))
        run.manifest["point_failures"].extend(
            {"N": N, "epsilon": e, "error": m} for e, m in curve.failures
        )
        if traj.c_tilde is not None:
            run.manifest["derived"][f"c_tilde_N{N}"] = traj.c_tilde
    if all(np.isnan(r[1]) for r in rows):
        raise FaquadError("every sweep point failed")
    _write_csv(run.path("epsilon.csv"), "epsilon,fidelity,N", rows)
    run.manifest["derived"]["tf"] = t_f
    return run.finish()


def builtin_figures() -> dict:
    """The eight built-in experiment presets, keyed by figure tag."""
    two_level = {"kind": "two-level", "U": 22.3, "J": 1.0,
                 "lambda_start": 66.7, "lambda_end": 0.0}
    splitting = {"kind": "bose-hubbard-3", "U": 33.45, "J": 1.0,
                 "lambda_start": 100.0, "lambda_end": 0.0}
    cotunneling = {"kind": "bose-hubbard-3", "U": 22.3, "J": 1.0,
                   "lambda_start": 66.7, "lambda_end": -66.7}
    ring_dyn = {"kind": "ring", "u0": 0.5, "K": 40,
                "lambda_start": 0.0, "lambda_end": math.pi}
    ring_spec = {"kind": "ring", "u0": 4.0, "K": 60,
                 "lambda_start": 0.0, "lambda_end": math.pi}
    return {
        "fig1b": {
            "model": dict(two_level),
            "protocols": ["faquad"],
            "sweep": {"tf_min": 0.05, "tf_max": 10.0, "tf_count": 300},
            "start": "ground", "target": 1, "prediction": True,
        },
        "fig1d": {
            "model": dict(two_level),
            "protocols": ["local-adiabatic", "uniform-adiabatic", "linear"],
            "sweep": {"tf_min": 0.05, "tf_max": 10.0, "tf_count": 300},
            "start": "ground", "target": 1, "prediction": False,
        },
        "fig3b": {
            "model": dict(splitting),
            "protocols": ["faquad", "linear"],
            "sweep": {"tf_min": 0.05, "tf_max": 60.0, "tf_count": 300},
            "start": "ground", "target": 2, "prediction": False,
        },
        "fig4b": {
            "model": dict(cotunneling),
            "protocols": ["faquad", "linear"],
            "sweep": {"tf_min": 0.05, "tf_max": 80.0, "tf_count": 320},
            "start": "ground", "target": 1, "prediction": False,
        },
        "fig5a": {
            "model": dict(ring_spec),
            "spectrum": {"points": 161, "levels": 5, "u0_values": [4.0, 0.5]},
        },
        "fig5b": {
            "model": dict(ring_dyn),
            "trajectories": {"N": [1, 3, 5, 7, 9]},
        },
        "fig6a": {
            "model": dict(ring_dyn),
            "protocols": ["faquad", "linear"],
            "sweep": {"tf_min": 5.0, "tf_max": 120.0, "tf_count": 40, "N": [3, 9]},
            "integrator": {"n_steps": 4000},
        },
        "fig6b": {
            "model": dict(ring_dyn),
            "sweep": {"tf": 90.0, "N": [3, 9],
                      "epsilons": [round(-0.1 + 0.02 * i, 2) for i in range(11)]},
            "integrator": {"n_steps": 4000},
        },
    }


def _figure_population_sweeps(cfg, run):
    spec = _build_spec(cfg["model"])
    tf_grid = _tf_grid(cfg["sweep"])
    for proto_kind in cfg["protocols"]:
        proto_cfg = {"kind": proto_kind}
        traj = _build_trajectory(spec, proto_cfg)
        curve, n_steps = _sweep_population(spec, traj, cfg, tf_grid)
        tag = proto_kind.replace("-", "_")
        _write_csv(run.path(f"sweep_{tag}.csv"), "tf,population",
                   zip(curve.tf, curve.population))
        run.manifest["derived"][f"n_steps_{tag}"] = n_steps
        if traj.c_tilde is not None:
            pred = _perturbation.predict(traj)
            run.manifest["derived"][f"c_tilde_{tag}"] = pred.c_tilde
            run.manifest["derived"][f"phi_{tag}"] = pred.phi
            if cfg.get("prediction"):
                rows = zip(curve.tf, _perturbation.predicted_infidelity(pred, curve.tf),
                           pred.envelope(curve.tf))
                _write_csv(run.path(f"prediction_{tag}.csv"),
                           "tf,predicted_infidelity,envelope", rows)


def _figure_ring_spectrum(cfg, run):
    base = dict(cfg["model"])
    levels = int(cfg["spectrum"]["levels"])
    points = int(cfg["spectrum"]["points"])
    for u0 in cfg["spectrum"]["u0_values"]:
        mdl = dict(base, u0=float(u0))
        spec = _build_spec(mdl)
        grid = np.linspace(spec.lambda_start, spec.lambda_end, points)
        energies = np.linalg.eigvalsh(
            np.stack([_model.hamiltonian(spec, x) for x in grid])
        )[:, :levels]
        tag = _fmt(u0).replace(".", "p")
        rows = [(lam, n + 1, energies[i, n]) for i, lam in enumerate(grid)
                for n in range(levels)]
        _write_csv(run.path(f"spectrum_u0_{tag}.csv"), "lambda,n,energy", rows)
        rows = []
        for lam in grid:
            alphas = _model.ring_alpha_roots(lam, float(u0), levels)
            rows.extend((lam, n + 1, alphas[n], alphas[n] ** 2) for n in range(levels))
        _write_csv(run.path(f"alpha_u0_{tag}.csv"), "lambda,n,alpha,energy", rows)


def _figure_ring_trajectories(cfg, run):
    spec = _build_spec(cfg["model"])
    for N in cfg["trajectories"]["N"]:
        traj = _protocol.design_faquad(spec, pair=(int(N), int(N) + 1))
        _write_csv(run.path(f"trajectory_N{int(N)}.csv"), "s,lambda",
                   _trajectory_rows(traj))
        run.manifest["derived"][f"c_tilde_N{int(N)}"] = traj.c_tilde


def _figure_tg_duration(cfg, run):
    spec = _build_spec(cfg["model"])
    tf_grid = _tf_grid(cfg["sweep"])
    n_steps = cfg.get("integrator", {}).get("n_steps")
    rows = []
    for N in cfg["sweep"]["N"]:
        N = int(N)
        for proto_kind in cfg["protocols"]:
            if proto_kind == "faquad":
                traj = _protocol.design_faquad(spec, pair=(N, N + 1))
            else:
                traj = _build_trajectory(spec, {"kind": proto_kind})
            curve = _tg.duration_sweep(spec, N, traj, tf_grid,
                                       n_steps=None if n_steps is None else int(n_steps))
            rows.extend((t, f, N, proto_kind) for t, f in zip(curve.abscissa, curve.fidelity))
            if traj.c_tilde is not None:
                run.manifest["derived"][f"c_tilde_N{N}"] = traj.c_tilde
    _write_csv(run.path("tg_sweep.csv"), "tf,fidelity,N,protocol", rows)


def run_figure(name: str, cfg: dict, out_dir: str) -> int:
    _validate_model(cfg.get("model"))
    run = _Run(out_dir, f"figure {name}", cfg)
    if "spectrum" in cfg:
        _figure_ring_spectrum(cfg, run)
    elif "trajectories" in cfg:
        _figure_ring_trajectories(cfg, run)
    elif "tf" in cfg.get("sweep", {}):
        spec = _build_spec(cfg["model"])
        n_steps = cfg.get("integrator", {}).get("n_steps")
        rows = []
        for N in cfg["sweep"]["N"]:
            N = int(N)
            traj = _protocol.design_faquad(spec, pair=(N, N + 1))
            curve = _tg.epsilon_sweep(
                spec, N, traj, float(cfg["sweep"]["tf"]),
                [float(e) for e in cfg["sweep"]["epsilons"]],
                n_steps=None if n_steps is None else int(n_steps),
            )
            rows.extend((e, f, N) for e, f in zip(curve.abscissa, curve.fidelity))
            run.manifest["derived"][f"c_tilde_N{N}"] = traj.c_tilde
        _write_csv(run.path("epsilon.csv"), "epsilon,fidelity,N", rows)
    elif "N" in cfg.get("sweep", {}):
        _figure_tg_duration(cfg, run)
    else:
        _figure_population_sweeps(cfg, run)
    return run.finish()


def _load_config(path) -> dict:
    try:
        with open(path) as handle:
            cfg = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    return cfg


def _merge_flags(cfg: dict, args) -> dict:
    """Overlay command-line flags onto the config dictionary."""
    model = dict(cfg.get("model", {}))
    if args.model:
        model["kind"] = args.model
    for flag in ("U", "J", "u0", "K"):
        value = getattr(args, flag, None)
        if value is not None:
            model[flag] = value
    if args.lambda_start is not None:
        model["lambda_start"] = args.lambda_start
    if args.lambda_end is not None:
        model["lambda_end"] = args.lambda_end
    if model:
        cfg["model"] = model

    proto = dict(cfg.get("protocol", {}))
    if getattr(args, "protocol", None):
        proto["kind"] = args.protocol
    if getattr(args, "pair", None):
        proto["pair"] = args.pair
    if getattr(args, "grid_points", None) is not None:
        proto["grid_points"] = args.grid_points
    if getattr(args, "value", None) is not None:
        proto["value"] = args.value
    if proto:
        cfg["protocol"] = proto

    sweep = dict(cfg.get("sweep", {}))
    for flag, key in (("tf", "tf"), ("tf_min", "tf_min"), ("tf_max", "tf_max"),
                      ("tf_count", "tf_count")):
        value = getattr(args, flag, None)
        if value is not None:
            sweep[key] = value
    if getattr(args, "eps", None):
        sweep["epsilons"] = args.eps
    if getattr(args, "N", None):
        sweep["N"] = args.N
    if sweep:
        cfg["sweep"] = sweep

    integ = dict(cfg.get("integrator", {}))
    if getattr(args, "n_steps", None) is not None:
        integ["n_steps"] = args.n_steps
    if getattr(args, "n_save", None) is not None:
        integ["n_save"] = args.n_save
    if integ:
        cfg["integrator"] = integ

    for flag in ("start", "target"):
        value = getattr(args, flag, None)
        if value is not None:
            cfg[flag] = value
    for flag in ("levels", "points"):
        value = getattr(args, flag, None)
        if value is not None:
            cfg[flag] = value
    return cfg


def _add_common_flags(parser):
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", default="faquad-out", help="output directory")
    parser.add_argument("--model", choices=sorted(_MODEL_KEYS))
    parser.add_argument("--U", type=float)
    parser.add_argument("--J", type=float)
    parser.add_argument("--u0", type=float)
    parser.add_argument("--K", type=int)
    parser.add_argument("--lambda-start", dest="lambda_start", type=float)
    parser.add_argument("--lambda-end", dest="lambda_end", type=float)
    parser.add_argument("--protocol", choices=sorted(_PROTOCOL_ALIASES))
    parser.add_argument("--pair", nargs=2, type=int, metavar=("I", "J"))
    parser.add_argument("--grid-points", dest="grid_points", type=int)
    parser.add_argument("--value", type=float, help="constant protocol level")
    parser.add_argument("--tf", type=float)
    parser.add_argument("--tf-min", dest="tf_min", type=float)
    parser.add_argument("--tf-max", dest="tf_max", type=float)
    parser.add_argument("--tf-count", dest="tf_count", type=int)
    parser.add_argument("--eps", action="append", type=float)
    parser.add_argument("--N", action="append", type=int)
    parser.add_argument("--n-steps", dest="n_steps", type=int)
    parser.add_argument("--n-save", dest="n_save", type=int)
    parser.add_argument("--start")
    parser.add_argument("--target")
    parser.add_argument("--levels", type=int)
    parser.add_argument("--points", type=int)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="faquad",
        description="Design and simulate fast quasi-adiabatic control schedules.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in ("design", "spectrum", "evolve", "sweep-tf", "sweep-eps"):
        _add_common_flags(sub.add_parser(name))
    fig = sub.add_parser("figure")
    fig.add_argument("preset", choices=sorted(builtin_figures()))
    _add_common_flags(fig)
    return parser


_COMMANDS = {
    "design": _cmd_design,
    "spectrum": _cmd_spectrum,
    "evolve": _cmd_evolve,
    "sweep-tf": _cmd_sweep_tf,
    "sweep-eps": _cmd_sweep_eps,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "figure":
            cfg = builtin_figures()[args.preset]
            if args.config:
                cfg.update(_load_config(args.config))
            cfg = _merge_flags(cfg, args)
            return run_figure(args.preset, cfg, args.out)
        cfg = _load_config(args.config) if args.config else {}
        cfg = _merge_flags(cfg, args)
        _validate_config(cfg)
        out_dir = cfg.pop("output_dir", None) or args.out
        return _COMMANDS[args.subcommand](cfg, out_dir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FaquadError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
