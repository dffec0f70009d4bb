"""Command-line front end.

Subcommands: speed, fig2, fig3, scaling, evolve, selftest. Parameters come
from a JSON file (``--config``) and flags; flags win. CSV outputs start with
a ``# gqsl <command> <hash>`` line where the hash covers the canonicalized
effective configuration.

Exit codes: 0 ok, 1 selftest failure, 2 configuration error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import warnings
from typing import Dict, List, Mapping, Optional

import numpy as np

from gqsl.dynamics import evolve_open
from gqsl.errors import (
    BoundViolation,
    DegenerateGenerator,
    GqslError,
    InconsistentTrajectory,
    IntegrationFailure,
    InvalidArgument,
    InvalidState,
    NumericalFailure,
    PrecisionFailure,
    PreconditionViolation,
    Unsupported,
)
from gqsl.models import DynamicsWarning, OpenDynamics, QBMParams, qbm_dynamics
from gqsl.selftest import format_results, run_selftest
from gqsl.speed import (
    speed_harmonic,
    speed_open,
    speed_unitary,
    single_mode_extrema,
    speed_single_mode,
)
from gqsl.states import (
    SqueezeSpec,
    make_pure_squeezed,
    make_thermal_squeezed,
    state_from_descriptor,
)
from gqsl.symplectic import QuadraticGenerator, single_mode_generator

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3

_CONFIG_ERRORS = (InvalidArgument, InvalidState, PreconditionViolation,
                  DegenerateGenerator, Unsupported)
_NUMERICAL_ERRORS = (NumericalFailure, IntegrationFailure, PrecisionFailure,
                     InconsistentTrajectory, BoundViolation)


class ConfigError(InvalidArgument):
    pass


def fmt(x: float) -> str:
    return f"{x:.17g}"


def config_hash(config: Mapping) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=float)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def render_csv(command: str, config: Mapping, header: List[str], rows) -> str:
    lines = [f"# gqsl {command} {config_hash(config)}", ",".join(header)]
    lines.extend(",".join(fmt(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def _reject_unknown(config: Mapping, allowed, where: str) -> None:
    unknown = set(config) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def sweep_grid(sweep: Mapping, default: Mapping) -> np.ndarray:
    """Grid from {param, from, to, points, scale: linear|log}."""
    _reject_unknown(sweep, {"param", "from", "to", "points", "scale"}, "sweep")
    spec = {**default, **sweep}
    lo, hi, points = float(spec["from"]), float(spec["to"]), int(spec["points"])
    if points < 2:
        raise ConfigError("sweep needs at least two points")
    scale = spec.get("scale", "linear")
    if scale == "linear":
        return np.linspace(lo, hi, points)
    if scale == "log":
        if lo <= 0 or hi <= 0:
            raise ConfigError("log sweep bounds must be positive")
        return np.geomspace(lo, hi, points)
    raise ConfigError(f"unknown sweep scale {scale!r}")


def generator_from_config(spec, n: int) -> QuadraticGenerator:
    if isinstance(spec, Mapping):
        if "G" in spec:
            _reject_unknown(spec, {"G"}, "generator")
            return QuadraticGenerator(np.asarray(spec["G"], dtype=float))
        _reject_unknown(spec, {"g0", "gS", "phi"}, "generator")
        if n != 1:
            raise ConfigError("the (g0, gS, phi) generator is single-mode; give G for n > 1")
        return single_mode_generator(float(spec.get("g0", 0.0)), float(spec.get("gS", 0.0)),
                                     float(spec.get("phi", 0.0)))
    return QuadraticGenerator(np.asarray(spec, dtype=float))


def dynamics_from_config(config: Mapping, n: int) -> Optional[OpenDynamics]:
    """OpenDynamics for ``open``/``qbm`` blocks, or None for unitary runs."""
    if "qbm" in config and "open" in config:
        raise ConfigError("give either 'open' or 'qbm', not both")
    if "qbm" in config:
        q = config["qbm"]
        _reject_unknown(q, {"omega", "gamma", "beta_B"}, "qbm")
        if "generator" in config:
            raise ConfigError("qbm fixes the generator to omega*I; drop 'generator'")
        return qbm_dynamics(QBMParams(float(q["omega"]), float(q["gamma"]), float(q["beta_B"])))
    if "generator" not in config:
        raise ConfigError("missing 'generator'")
    gen = generator_from_config(config["generator"], n)
    if "open" in config:
        o = config["open"]
        _reject_unknown(o, {"g", "M"}, "open")
        return OpenDynamics.from_rate(gen, float(o.get("g", 0.0)), o.get("M"))
    return None


def cmd_speed(config: Mapping) -> str:
    _reject_unknown(config, {"state", "generator", "open", "qbm"}, "speed config")
    if "state" not in config:
        raise ConfigError("missing 'state'")
    state = state_from_descriptor(config["state"]).check()
    dyn = dynamics_from_config(config, state.n)
    if dyn is None:
        report = speed_unitary(state, generator_from_config(config["generator"], state.n))
    else:
        report = speed_open(state, dyn)
    return json.dumps(report.to_dict()) + "\n"


def default_fig2_cases(r: float) -> List[Dict[str, float]]:
    t = math.tanh(r)
    return [{"g0": t, "gS": 1.0}, {"g0": 1.0, "gS": t},
            {"g0": 1.0, "gS": 1.0}, {"g0": 1.0, "gS": 0.0}]


def cmd_fig2(config: Mapping) -> str:
    """Normalized single-mode speed against delta on k*pi/samples, k = 0..samples."""
    _reject_unknown(config, {"r", "cases", "samples"}, "fig2 config")
    r = float(config.get("r", 0.35))
    samples = int(config.get("samples", 256))
    if samples < 32:
        raise ConfigError("fig2 needs samples >= 32")
    cases = config.get("cases", default_fig2_cases(r))
    if not cases:
        raise ConfigError("fig2 needs at least one case")
    delta = np.arange(samples + 1) * math.pi / samples
    columns, header = [delta], ["delta"]
    for case in cases:
        _reject_unknown(case, {"g0", "gS"}, "fig2 case")
        g0, gS = float(case["g0"]), float(case["gS"])
        v2_max = single_mode_extrema(r, g0, gS).v2_max
        profile = speed_single_mode(r, delta, g0, gS)
        columns.append(profile / v2_max if v2_max > 0 else np.zeros_like(delta))
        header.append(f"g0={g0:.6g};gS={gS:.6g}")
    effective = {"r": r, "cases": cases, "samples": samples}
    return render_csv("fig2", effective, header, zip(*columns))


def _signed_spec(r: float) -> SqueezeSpec:
    # negative r: same squeezing rotated by pi/2
    return SqueezeSpec([abs(r)], [0.0 if r >= 0 else math.pi / 2])


_FIG3_DEFAULTS = {
    "system-sweep": {"fixed": 0.1, "sweep": {"from": 1e-2, "to": 10.0, "scale": "log"}},
    "bath-sweep": {"fixed": 1.0, "sweep": {"from": 1e-3, "to": 1.0, "scale": "log"}},
}


def fig3_tau(mode: str, beta: float, fixed: float, r: float, omega_: float, gamma: float) -> float:
    beta_S, beta_B = (beta, fixed) if mode == "system-sweep" else (fixed, beta)
    state = make_thermal_squeezed(beta_S, omega_, _signed_spec(r))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DynamicsWarning)
        dyn = qbm_dynamics(QBMParams(omega_, gamma, beta_B))
    v2_cov = speed_open(state, dyn).v2_cov
    return 1.0 / math.sqrt(v2_cov) if v2_cov > 0 else math.inf


def cmd_fig3(config: Mapping) -> str:
    """QSL time 1/V_cov for QBM against system or bath inverse temperature."""
    _reject_unknown(config, {"mode", "r", "fixed", "gamma", "omega", "sweep", "samples"},
                    "fig3 config")
    mode = config.get("mode", "system-sweep")
    if mode not in _FIG3_DEFAULTS:
        raise ConfigError(f"unknown fig3 mode {mode!r}")
    defaults = _FIG3_DEFAULTS[mode]
    rs = [float(x) for x in config.get("r", [0.0, 0.1, -0.1])]
    fixed = float(config.get("fixed", defaults["fixed"]))
    gamma = float(config.get("gamma", 1.0))
    omega_ = float(config.get("omega", 1.0))
    sweep = dict(config.get("sweep", {}))
    sweep.setdefault("points", int(config.get("samples", 200)))
    grid = sweep_grid(sweep, defaults["sweep"])
    if np.any(grid <= 0) or fixed <= 0:
        raise ConfigError("fig3 temperatures must be positive")
    columns = [grid] + [np.array([fig3_tau(mode, b, fixed, r, omega_, gamma) for b in grid])
                        for r in rs]
    header = ["beta"] + [f"tau[r={r:g}]" for r in rs]
    effective = {"mode": mode, "r": rs, "fixed": fixed, "gamma": gamma, "omega": omega_,
                 "grid": [float(b) for b in grid]}
    return render_csv("fig3", effective, header, zip(*columns))


_SCALING_DEFAULTS = {
    "hbar": {"from": 1e-3, "to": 1.0, "points": 50, "scale": "log"},
    "squeezing": {"from": 0.0, "to": 4.0, "points": 41, "scale": "linear"},
    "modes": {"from": 2, "to": 256, "points": 8, "scale": "log"},
}


def scaling_curve(limit: str, grid, omega_: float = 1.0, r: float = 0.3,
                  mean=(0.5, 0.5), hbar: float = 1.0) -> np.ndarray:
    """V^2 along one of the three divergence limits.

    hbar: unsqueezed state displaced by ``mean`` under G = omega*I.
    squeezing: g0/gS = tanh r with g0^2 + gS^2 = 1 at delta = 3*pi/4.
    modes: n modes with squeezing ``r`` and rotated-frame means ``mean`` each.
    """
    out = []
    for x in grid:
        if limit == "hbar":
            out.append(speed_harmonic(SqueezeSpec([0.0]), mean, omega_, float(x)).v2_total)
        elif limit == "squeezing":
            gS = 1.0 / math.sqrt(1.0 + math.tanh(x) ** 2)
            gen = single_mode_generator(math.tanh(x) * gS, gS, 0.0)
            state = make_pure_squeezed(SqueezeSpec([x], [3 * math.pi / 4]), hbar)
            out.append(speed_unitary(state, gen).v2_total)
        elif limit == "modes":
            n = int(x)
            v = np.tile(np.asarray(mean, dtype=float), n)
            out.append(speed_harmonic(SqueezeSpec([r] * n), v, omega_, hbar).v2_total)
        else:
            raise ConfigError(f"unknown limit {limit!r}")
    return np.array(out)


def cmd_scaling(config: Mapping) -> str:
    _reject_unknown(config, {"limit", "sweep", "omega", "r", "mean", "hbar", "samples"},
                    "scaling config")
    limit = config.get("limit", "hbar")
    if limit not in _SCALING_DEFAULTS:
        raise ConfigError(f"unknown limit {limit!r}; expected hbar, squeezing or modes")
    sweep = dict(config.get("sweep", {}))
    if "samples" in config:
        sweep.setdefault("points", int(config["samples"]))
    grid = sweep_grid(sweep, _SCALING_DEFAULTS[limit])
    if limit == "modes":
        grid = np.unique(np.round(grid).astype(int)).astype(float)
        if grid[0] < 1:
            raise ConfigError("mode counts must be >= 1")
    omega_ = float(config.get("omega", 1.0))
    r = float(config.get("r", 0.3))
    mean = tuple(float(x) for x in config.get("mean", (0.5, 0.5)))
    hbar = float(config.get("hbar", 1.0))
    v2 = scaling_curve(limit, grid, omega_, r, mean, hbar)
    effective = {"limit": limit, "grid": [float(g) for g in grid], "omega": omega_,
                 "r": r, "mean": list(mean), "hbar": hbar}
    return render_csv("scaling", effective, ["param", "v2_total"], zip(grid, v2))


def cmd_evolve(config: Mapping) -> str:
    _reject_unknown(config, {"state", "generator", "open", "qbm", "t", "dt", "method"},
                    "evolve config")
    if "state" not in config:
        raise ConfigError("missing 'state'")
    state = state_from_descriptor(config["state"]).check()
    dyn = dynamics_from_config(config, state.n)
    if dyn is None:
        dyn = OpenDynamics.unitary(generator_from_config(config["generator"], state.n))
    t = float(config.get("t", 5.0))
    dt = float(config.get("dt", 1e-3))
    traj = evolve_open(state, dyn, t, dt, config.get("method", "rk4"))
    lines = traj.to_csv().splitlines()
    return f"# gqsl evolve {config_hash(config)}\n" + "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gqsl", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--samples", type=int, help="grid size")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("speed", parents=[common], help="speed report for one state")
    p = sub.add_parser("fig2", parents=[common], help="single-mode speed against delta")
    p.add_argument("--r", type=float)
    p = sub.add_parser("fig3", parents=[common], help="QBM QSL time against temperature")
    p.add_argument("--mode", choices=["system-sweep", "bath-sweep"])
    p.add_argument("--r", type=_float_list, help="comma-separated squeezing values")
    p.add_argument("--fixed", type=float, help="the inverse temperature held fixed")
    p.add_argument("--gamma", type=float)
    p.add_argument("--omega", type=float)
    p = sub.add_parser("scaling", parents=[common], help="V^2 along a divergence limit")
    p.add_argument("--limit", choices=["hbar", "squeezing", "modes"])
    p = sub.add_parser("evolve", parents=[common], help="trajectory CSV")
    p.add_argument("--t", type=float)
    p.add_argument("--dt", type=float)
    p = sub.add_parser("selftest", parents=[common], help="run the oracle suites")
    p.add_argument("--grid-points", type=int, default=None,
                   help="phase-space oracle grid resolution")
    p.add_argument("--seed", type=int, default=None)
    return parser


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from exc


_FLAG_KEYS = ("samples", "r", "mode", "fixed", "gamma", "omega", "limit", "t", "dt")


def _merged_config(args) -> dict:
    config = {}
    if args.config:
        try:
            with open(args.config) as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(config, dict):
            raise ConfigError("config must be a JSON object")
    for key in _FLAG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


_COMMANDS = {
    "speed": cmd_speed,
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
    "scaling": cmd_scaling,
    "evolve": cmd_evolve,
}


def _write(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"gqsl: warning: {message}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings():
        warnings.showwarning = _show_warning
        return _run(args)


def _run(args) -> int:
    try:
        config = _merged_config(args)
        if args.command == "selftest":
            _reject_unknown(config, {"grid_points", "seed", "samples"}, "selftest config")
            grid = args.grid_points or int(config.get("grid_points", 401))
            seed = args.seed if args.seed is not None else int(config.get("seed", 20240611))
            results = run_selftest(seed=seed, grid_points=grid)
            _write(format_results(results) + "\n", args.out)
            return EXIT_OK if all(r.passed for r in results) else EXIT_SELFTEST
        if args.command in ("speed", "evolve"):
            config.pop("samples", None)
        text = _COMMANDS[args.command](config)
    except _CONFIG_ERRORS as exc:
        print(f"gqsl {args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except np.linalg.LinAlgError as exc:
        print(f"gqsl {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (KeyError, TypeError, ValueError) as exc:
        print(f"gqsl {args.command}: configuration error: {exc!r}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"gqsl {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except GqslError as exc:
        print(f"gqsl {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _write(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
