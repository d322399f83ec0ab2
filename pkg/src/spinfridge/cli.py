"""Command-line front end: JSON config in, JSON + CSV artifacts out.

Usage: spinfridge <mode> --config <path> [--out <dir>] [--seed <u64>]
[--threads <n>] [--plot]

Modes: cycle (single traversal from a thermal start), limit-cycle (fixed
point and per-cycle metrics), trajectory (time series along the limit
cycle), frictionless (quantized sweep family), optimize (duration
allocation search), comb (optimal Q_c versus total cycle time), min-temp
(noise-limited minimum cold temperature), j-scaling (cooling-power
scaling collapse).

Every run writes results.json with a full input echo, package version and
seed, plus plot-ready series_*.csv files with 17-significant-digit
formatting; all writes are atomic (write to a temp file, then rename).
Exit codes: 0 success, 2 no feasible refrigerator, 1 any other error;
errors are also emitted as a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .adiabats import AdiabatSpec, NoiseParams, adiabat_geometry, \
    frictionless_family
from .cycle import CycleSpec, cycle_trajectory, limit_cycle, \
    segment_propagators, thermo_bounds
from .errors import NoFeasibleRefrigerator, ParseError, SpinFridgeError, \
    ValidationError
from .medium import Bath, MediumParams, ObservableState, effective_gap, \
    entropies, thermal_state
from .optimize import OptimizeRequest, SweepResult, comb_sweep, \
    j_scaling_sweep, min_temperature_sweep, optimize_allocation

MODES = ("cycle", "limit-cycle", "trajectory", "frictionless", "optimize",
         "comb", "min-temp", "j-scaling")

_COMMON_KEYS = {"mode", "seed"}
_PHYSICS_KEYS = {"medium", "omega_c", "omega_h", "hot", "cold", "noise"}
_DURATION_KEYS = {"tau_h", "tau_hc", "tau_c", "tau_ch", "schedule", "propagator"}
_OPT_KEYS = {"tau_cyc", "equal_adiabats", "grid", "l_max", "budget"}

_MODE_KEYS = {
    "cycle": _PHYSICS_KEYS | _DURATION_KEYS,
    "limit-cycle": _PHYSICS_KEYS | _DURATION_KEYS,
    "trajectory": _PHYSICS_KEYS | _DURATION_KEYS | {"n_per_segment"},
    "frictionless": {"medium", "omega_c", "omega_h", "l_max"},
    "optimize": _PHYSICS_KEYS | _OPT_KEYS,
    "comb": _PHYSICS_KEYS | (_OPT_KEYS - {"tau_cyc"})
            | {"tau_grid", "gamma_p_levels"},
    "min-temp": _PHYSICS_KEYS | {"kind", "values", "t_floor", "xtol"},
    "j-scaling": _PHYSICS_KEYS | (_OPT_KEYS - {"tau_cyc"})
                 | {"J_values", "j_over_tc", "reversibility", "tc_over_th",
                    "gamma_over_j"},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run request: mode, parsed parameter objects, raw echo."""

    mode: str
    params: dict
    raw: dict
    seed: int


def _fail(msg: str) -> ValidationError:
    return ValidationError(msg)


def _number(raw: dict, key: str, *, required=False, default=None,
            positive=False, nonneg=False, where="config"):
    if key not in raw:
        if required:
            raise _fail(f"{where}: missing required key {key!r}")
        return default
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _fail(f"{where}.{key} must be a number, got {v!r}")
    v = float(v)
    if positive and not v > 0:
        raise _fail(f"{where}.{key} must be > 0, got {v}")
    if nonneg and v < 0:
        raise _fail(f"{where}.{key} must be >= 0, got {v}")
    return v


def _integer(raw: dict, key: str, *, required=False, default=None, minimum=None,
             where="config"):
    if key not in raw:
        if required:
            raise _fail(f"{where}: missing required key {key!r}")
        return default
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise _fail(f"{where}.{key} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise _fail(f"{where}.{key} must be >= {minimum}, got {v}")
    return v


def _boolean(raw: dict, key: str, default, where="config"):
    v = raw.get(key, default)
    if not isinstance(v, bool):
        raise _fail(f"{where}.{key} must be a boolean, got {v!r}")
    return v


def _subobject(raw: dict, key: str, allowed: set, *, required=True) -> dict:
    if key not in raw:
        if required:
            raise _fail(f"config: missing required object {key!r}")
        return {}
    v = raw[key]
    if not isinstance(v, dict):
        raise _fail(f"config.{key} must be an object, got {type(v).__name__}")
    unknown = set(v) - allowed
    if unknown:
        raise ParseError(f"unknown key(s) in {key}: {sorted(unknown)}")
    return v


def _number_list(raw: dict, key: str, *, required=True, where="config"):
    if key not in raw:
        if required:
            raise _fail(f"{where}: missing required key {key!r}")
        return None
    v = raw[key]
    if isinstance(v, dict):
        unknown = set(v) - {"start", "stop", "num"}
        if unknown:
            raise ParseError(f"unknown key(s) in {key}: {sorted(unknown)}")
        start = _number(v, "start", required=True, where=key)
        stop = _number(v, "stop", required=True, where=key)
        num = _integer(v, "num", required=True, minimum=1, where=key)
        return np.linspace(start, stop, num).tolist()
    if not isinstance(v, list) or not v or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
        raise _fail(f"{where}.{key} must be a nonempty list of numbers")
    return [float(x) for x in v]


def _parse_medium(raw: dict) -> MediumParams:
    m = _subobject(raw, "medium", {"J", "gamma_b"})
    return MediumParams(
        _number(m, "J", required=True, positive=True, where="medium"),
        _number(m, "gamma_b", default=0.0, nonneg=True, where="medium"))


def _parse_bath(raw: dict, key: str) -> Bath:
    b = _subobject(raw, key, {"T", "Gamma"})
    return Bath(_number(b, "T", required=True, positive=True, where=key),
                _number(b, "Gamma", required=True, positive=True, where=key))


def _parse_noise(raw: dict) -> NoiseParams:
    n = _subobject(raw, "noise", {"gamma_p", "gamma_a"}, required=False)
    return NoiseParams(_number(n, "gamma_p", default=0.0, nonneg=True,
                               where="noise"),
                       _number(n, "gamma_a", default=0.0, nonneg=True,
                               where="noise"))


def _parse_fields(raw: dict) -> tuple[float, float]:
    wc = _number(raw, "omega_c", required=True, nonneg=True)
    wh = _number(raw, "omega_h", required=True, positive=True)
    if not wc < wh:
        raise _fail(f"require omega_c < omega_h, got {wc} >= {wh}")
    return wc, wh


def _parse_cycle_spec(raw: dict) -> tuple[CycleSpec, MediumParams]:
    medium = _parse_medium(raw)
    wc, wh = _parse_fields(raw)
    schedule = raw.get("schedule", "constant-mu")
    if schedule not in ("constant-mu", "linear"):
        raise _fail(f"schedule must be constant-mu or linear, got {schedule!r}")
    propagator = raw.get("propagator", "auto")
    if propagator not in ("auto", "numeric"):
        raise _fail(f"propagator must be auto or numeric, got {propagator!r}")
    try:
        spec = CycleSpec(
            wc, wh, _parse_bath(raw, "hot"), _parse_bath(raw, "cold"),
            _number(raw, "tau_h", required=True, positive=True),
            _number(raw, "tau_hc", required=True, positive=True),
            _number(raw, "tau_c", required=True, positive=True),
            _number(raw, "tau_ch", required=True, positive=True),
            schedule=schedule, noise=_parse_noise(raw), propagator=propagator)
    except ValueError as exc:
        raise _fail(str(exc)) from exc
    return spec, medium


def _parse_optimize_request(raw: dict, seed: int, *, with_tau_cyc=True
                            ) -> OptimizeRequest:
    medium = _parse_medium(raw)
    wc, wh = _parse_fields(raw)
    tau_cyc = _number(raw, "tau_cyc", default=None, positive=True) \
        if with_tau_cyc else None
    try:
        return OptimizeRequest(
            medium, wc, wh, _parse_bath(raw, "hot"), _parse_bath(raw, "cold"),
            tau_cyc=tau_cyc,
            equal_adiabats=_boolean(raw, "equal_adiabats", True),
            grid=_boolean(raw, "grid", True),
            l_max=_integer(raw, "l_max", default=30, minimum=1),
            budget=_integer(raw, "budget", default=20000, minimum=1),
            seed=seed, noise=_parse_noise(raw))
    except ValueError as exc:
        raise _fail(str(exc)) from exc


def parse_config(text: str, mode: str | None = None) -> RunConfig:
    """Parse and fully validate a JSON run configuration.

    Unknown keys are rejected; every numeric field is checked against its
    precondition before any computation starts.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ParseError("config root must be a JSON object")

    cfg_mode = raw.get("mode")
    if cfg_mode is not None and cfg_mode not in MODES:
        raise _fail(f"mode must be one of {MODES}, got {cfg_mode!r}")
    if mode is None:
        mode = cfg_mode
    elif cfg_mode is not None and cfg_mode != mode:
        raise _fail(f"config mode {cfg_mode!r} conflicts with requested {mode!r}")
    if mode is None:
        raise _fail("no mode given (config key 'mode' or CLI argument)")

    allowed = _MODE_KEYS[mode] | _COMMON_KEYS
    unknown = set(raw) - allowed
    if unknown:
        raise ParseError(f"unknown key(s) for mode {mode}: {sorted(unknown)}")

    seed = _integer(raw, "seed", default=0, minimum=0)
    params: dict = {}

    if mode in ("cycle", "limit-cycle", "trajectory"):
        spec, medium = _parse_cycle_spec(raw)
        params["spec"] = spec
        params["medium"] = medium
        if mode == "trajectory":
            params["n_per_segment"] = _integer(raw, "n_per_segment",
                                               default=200, minimum=2)
    elif mode == "frictionless":
        params["medium"] = _parse_medium(raw)
        params["omega_c"], params["omega_h"] = _parse_fields(raw)
        params["l_max"] = _integer(raw, "l_max", default=10, minimum=1)
    elif mode == "optimize":
        params["request"] = _parse_optimize_request(raw, seed)
    elif mode == "comb":
        params["request"] = _parse_optimize_request(raw, seed,
                                                    with_tau_cyc=False)
        params["tau_grid"] = _number_list(raw, "tau_grid")
        levels = _number_list(raw, "gamma_p_levels", required=False)
        params["gamma_p_levels"] = levels if levels is not None else [0.0]
        if any(g < 0 for g in params["gamma_p_levels"]):
            raise _fail("gamma_p_levels must be >= 0")
    elif mode == "min-temp":
        params["request"] = _parse_optimize_request(raw, seed,
                                                    with_tau_cyc=False)
        kind = raw.get("kind")
        if kind not in ("injected", "phase", "amplitude", "both"):
            raise _fail("kind must be injected, phase, amplitude or both")
        params["kind"] = kind
        values = _number_list(raw, "values")
        if kind == "injected":
            if any(not 0 <= v < 2 for v in values):
                raise _fail("injected delta values must lie in [0, 2)")
        else:
            if any(v != int(v) or v < 1 for v in values):
                raise _fail("winding-number values must be integers >= 1")
        params["values"] = values
        params["t_floor"] = _number(raw, "t_floor", default=None, positive=True)
        params["xtol"] = _number(raw, "xtol", default=None, positive=True)
    elif mode == "j-scaling":
        params["request"] = _parse_optimize_request(raw, seed,
                                                    with_tau_cyc=False)
        params["J_values"] = _number_list(raw, "J_values")
        params["j_over_tc"] = _number_list(raw, "j_over_tc")
        if any(j <= 0 for j in params["J_values"]) \
                or any(x <= 0 for x in params["j_over_tc"]):
            raise _fail("J_values and j_over_tc must be > 0")
        r = _number(raw, "reversibility", default=1.453, positive=True)
        if r <= 1.0:
            raise _fail(f"reversibility must exceed 1, got {r}")
        params["reversibility"] = r
        params["tc_over_th"] = _number(raw, "tc_over_th", default=0.75,
                                       positive=True)
        params["gamma_over_j"] = _number(raw, "gamma_over_j", default=1.0,
                                         positive=True)

    return RunConfig(mode, params, raw, seed)


# ---------------------------------------------------------------------------
# output helpers

def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: Sequence, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def _write_results(path: str, config: RunConfig, results: dict,
                   series: list[str]) -> str:
    doc = {
        "mode": config.mode,
        "version": __version__,
        "seed": config.seed,
        "config": config.raw,
        "series_files": [os.path.basename(s) for s in series],
        "results": results,
    }
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _state_row(state: ObservableState) -> list[float]:
    s_vn, s_e = entropies(state)
    return [state.at_field.omega, state.at_field.Omega,
            state.E, state.L, state.C, state.D, s_vn, s_e]


_STATE_COLS = ["omega", "Omega", "E", "L", "C", "D", "S_vn", "S_E"]


def _opt(x: float):
    return None if np.isnan(x) else float(x)


def _metrics_dict(m) -> dict:
    return {"Q_c": m.Q_c, "Q_h": m.Q_h, "W": m.W, "dS_u": m.dS_u,
            "cop": _opt(m.cop), "P_c": _opt(m.P_c),
            "delta_hc": _opt(m.delta_hc), "delta_ch": _opt(m.delta_ch),
            "tau_cycle": m.tau_cycle, "is_refrigerator": m.is_refrigerator}


# ---------------------------------------------------------------------------
# mode runners; each returns (results dict, series paths, figure paths)

def _run_cycle(config: RunConfig, out: str, plot: bool):
    spec: CycleSpec = config.params["spec"]
    medium = config.params["medium"]
    props = segment_propagators(spec, medium)
    state = thermal_state(effective_gap(spec.omega_h, medium), spec.hot.T)
    names = ["A", "B", "C", "D", "A'"]
    states = [state]
    for key in ("hot", "demag", "cold", "mag"):
        states.append(props[key].apply(states[-1]))
    q_h = states[1].E - states[0].E
    q_c = states[3].E - states[2].E
    results = {
        "start": "thermal state at the hot bath",
        "Q_h": q_h, "Q_c": q_c, "W": -(q_c + q_h),
        "corners": {n: dict(zip(_STATE_COLS, _state_row(s)))
                    for n, s in zip(names, states)},
    }
    path = _write_csv(os.path.join(out, "series_corners.csv"),
                      ["corner_index"] + _STATE_COLS,
                      ([i] + _state_row(s) for i, s in enumerate(states)))
    return results, [path], []


def _run_limit_cycle(config: RunConfig, out: str, plot: bool):
    spec: CycleSpec = config.params["spec"]
    medium = config.params["medium"]
    corners, metrics = limit_cycle(spec, medium)
    bounds = thermo_bounds(spec, medium)
    results = {
        "metrics": _metrics_dict(metrics),
        "compression": bounds.compression,
        "reversibility": bounds.reversibility,
        "corners": {n: dict(zip(_STATE_COLS, _state_row(s)))
                    for n, s in corners.items()},
    }
    path = _write_csv(os.path.join(out, "series_corners.csv"),
                      ["corner_index"] + _STATE_COLS,
                      ([i] + _state_row(s)
                       for i, s in enumerate(corners.values())))
    return results, [path], []


def _run_trajectory(config: RunConfig, out: str, plot: bool):
    spec: CycleSpec = config.params["spec"]
    medium = config.params["medium"]
    times, states, bounds = cycle_trajectory(
        spec, medium, n_per_segment=config.params["n_per_segment"])
    _, metrics = limit_cycle(spec, medium)
    rows = [[t] + _state_row(s) for t, s in zip(times, states)]
    path = _write_csv(os.path.join(out, "series_trajectory.csv"),
                      ["t"] + _STATE_COLS, rows)
    results = {"metrics": _metrics_dict(metrics),
               "segment_boundaries": list(bounds)}
    figures = []
    if plot:
        from . import plotting
        arr = np.asarray(rows)
        table = {c: arr[:, i + 1] for i, c in enumerate(_STATE_COLS)}
        table["t"] = arr[:, 0]
        figures.append(plotting.plot_trajectory(
            arr[:, 0], table, bounds, os.path.join(out, "fig_trajectory.png")))
    return results, [path], figures


def _run_frictionless(config: RunConfig, out: str, plot: bool):
    medium = config.params["medium"]
    geom = adiabat_geometry(
        AdiabatSpec(config.params["omega_h"], config.params["omega_c"], 1.0),
        medium)
    family = frictionless_family(geom, config.params["l_max"])
    path = _write_csv(os.path.join(out, "series_frictionless.csv"),
                      ["l", "mu_l", "tau_l"],
                      ([s.l, s.mu_l, s.tau_l] for s in family))
    results = {"K": geom.K, "Phi": geom.Phi,
               "family": [{"l": s.l, "mu_l": s.mu_l, "tau_l": s.tau_l}
                          for s in family]}
    figures = []
    if plot:
        from . import plotting
        figures.append(plotting.plot_frictionless(
            [s.l for s in family], [s.mu_l for s in family],
            [s.tau_l for s in family],
            os.path.join(out, "fig_frictionless.png")))
    return results, [path], figures


def _run_optimize(config: RunConfig, out: str, plot: bool):
    metrics, durations = optimize_allocation(config.params["request"])
    results = {"metrics": _metrics_dict(metrics), "durations": durations}
    path = _write_csv(os.path.join(out, "series_allocation.csv"),
                      list(durations) + ["Q_c", "W", "dS_u"],
                      [list(durations.values())
                       + [metrics.Q_c, metrics.W, metrics.dS_u]])
    return results, [path], []


def _run_comb(config: RunConfig, out: str, plot: bool):
    levels = config.params["gamma_p_levels"]
    sweep = comb_sweep(config.params["request"], config.params["tau_grid"],
                       gamma_p_levels=levels)
    q_c, ds_u = sweep.extra["Q_c"], sweep.extra["dS_u"]
    header = ["tau_cyc"]
    for g in levels:
        header += [f"Q_c[gamma_p={g:g}]", f"dS_u[gamma_p={g:g}]"]
    rows = []
    for i, tau in enumerate(sweep.axis):
        row = [tau]
        for j in range(len(levels)):
            row += [q_c[j, i], ds_u[j, i]]
        rows.append(row)
    path = _write_csv(os.path.join(out, "series_comb.csv"), header, rows)
    results = {"n_points": int(sweep.axis.size),
               "best_Q_c": float(q_c.max()),
               "best_tau": float(sweep.axis[int(np.argmax(q_c[0]))])}
    figures = []
    if plot:
        from . import plotting
        figures.append(plotting.plot_comb(
            sweep.axis, q_c, ds_u, levels, os.path.join(out, "fig_comb.png")))
    return results, [path], figures


def _run_min_temp(config: RunConfig, out: str, plot: bool):
    sweep = min_temperature_sweep(
        config.params["request"], config.params["kind"],
        config.params["values"], t_floor=config.params["t_floor"],
        xtol=config.params["xtol"])
    rows = zip(sweep.axis, sweep.extra["delta"], sweep.extra["T_c_min"])
    path = _write_csv(os.path.join(out, "series_min_temp.csv"),
                      ["value", "delta", "T_c_min"], rows)
    results = {"kind": config.params["kind"],
               "floor": float(sweep.extra["floor"][0]),
               "T_c_min": sweep.extra["T_c_min"].tolist()}
    figures = []
    if plot:
        from . import plotting
        xlabel = "delta" if config.params["kind"] == "injected" else "l"
        figures.append(plotting.plot_min_temp(
            sweep.axis, sweep.extra["T_c_min"],
            os.path.join(out, "fig_min_temp.png"), xlabel=xlabel))
    return results, [path], figures


def _run_j_scaling(config: RunConfig, out: str, plot: bool):
    p = config.params
    sweep = j_scaling_sweep(p["request"], p["J_values"], p["j_over_tc"],
                            reversibility=p["reversibility"],
                            tc_over_th=p["tc_over_th"],
                            gamma_over_j=p["gamma_over_j"])
    J_values = sweep.extra["J"]
    header = ["j_over_tc"]
    for J in J_values:
        header += [f"P_c[J={J:g}]", f"collapse[J={J:g}]"]
    rows = []
    for i, x in enumerate(sweep.axis):
        row = [x]
        for r in range(J_values.size):
            row += [sweep.extra["P_c"][r, i], sweep.extra["collapse"][r, i]]
        rows.append(row)
    path = _write_csv(os.path.join(out, "series_j_scaling.csv"), header, rows)
    spread = np.nanmax(sweep.extra["collapse"], axis=0) \
        - np.nanmin(sweep.extra["collapse"], axis=0)
    results = {"max_collapse_spread": float(np.nanmax(spread))}
    figures = []
    if plot:
        from . import plotting
        figures.append(plotting.plot_j_scaling(
            sweep.axis, sweep.extra["collapse"], J_values,
            os.path.join(out, "fig_j_scaling.png")))
    return results, [path], figures


_RUNNERS = {
    "cycle": _run_cycle,
    "limit-cycle": _run_limit_cycle,
    "trajectory": _run_trajectory,
    "frictionless": _run_frictionless,
    "optimize": _run_optimize,
    "comb": _run_comb,
    "min-temp": _run_min_temp,
    "j-scaling": _run_j_scaling,
}


def run(config: RunConfig, out_dir: str = ".", plot: bool = False
        ) -> tuple[int, list[str]]:
    """Execute one mode; returns (exit code, artifact paths)."""
    os.makedirs(out_dir, exist_ok=True)
    results, series, figures = _RUNNERS[config.mode](config, out_dir, plot)
    results_path = _write_results(os.path.join(out_dir, "results.json"),
                                  config, results, series)
    return 0, [results_path] + series + figures


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinfridge",
        description="Four-stroke coupled-spin refrigerator simulator")
    parser.add_argument("mode", choices=MODES)
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed (unsigned 64-bit)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker hint; results are schedule-independent")
    parser.add_argument("--plot", action="store_true",
                        help="also render PNG figures next to the CSV output")
    args = parser.parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        config = parse_config(text, args.mode)
        if args.seed is not None:
            if args.seed < 0:
                raise ValidationError("--seed must be >= 0")
            raw = dict(config.raw)
            raw["seed"] = args.seed
            config = parse_config(json.dumps(raw), args.mode)
        code, _ = run(config, args.out, plot=args.plot)
        return code
    except NoFeasibleRefrigerator as exc:
        _emit_error(exc)
        return 2
    except (SpinFridgeError, OSError) as exc:
        _emit_error(exc)
        return 1


def _emit_error(exc: Exception) -> None:
    json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
    sys.stderr.write("\n")


if __name__ == "__main__":
    sys.exit(main())
