"""Command-line pipelines: simulate, rescale, verify, monotonicity, theorem,
cutoff-scan.

Every subcommand reads a flat ``key = value`` config file; outputs are
deterministic text artifacts in the configured output directory.  Exit code 0
means success, 2 a configuration or precondition error, 3 a numerical
failure; in both failure cases the error class name is printed on stderr.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io
from .errors import (BadP, BadParameter, Mcf4dError, OrderTooLow,
                     PropertyViolation)
from .flow import RunControls, estimate_singular_time, run_flow
from .functionals import (CUTOFF_CONSTANT, CUTOFF_SUP_ABS_FIRST,
                          CUTOFF_SUP_NEG_SECOND, EVOLUTION_QUANTITIES,
                          GaussianWeight, cutoff_psi, evolution_residual,
                          monotonicity_scan)
from .rescale import select_blowup_datum, validate_rescaled, with_rescaled
from .scenarios import (SCENARIO_PARAMS, generate_scenario,
                        grim_reaper_product, run_sphere_ode,
                        translating_trace)
from .theorem import check_main_theorem, gradient_estimate_probe, normalize_flow

CONFIG_EXIT = 2
NUMERICAL_EXIT = 3


def _get(cfg: dict, key: str, default=None, required: bool = False) -> str:
    if key in cfg:
        return cfg[key]
    if required:
        raise BadParameter(f"config key {key!r} is required")
    return default


def _float(cfg, key, default=None, required=False):
    raw = _get(cfg, key, None, required)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise BadParameter(f"config key {key!r}: {raw!r} is not a number")


def _int(cfg, key, default=None, required=False):
    raw = _get(cfg, key, None, required)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise BadParameter(f"config key {key!r}: {raw!r} is not an integer")


def _vec4(cfg, key, default=None, required=False):
    raw = _get(cfg, key, None, required)
    if raw is None:
        return default
    parts = raw.split()
    if len(parts) != 4:
        raise BadParameter(f"config key {key!r} needs 4 numbers, got {raw!r}")
    try:
        return np.array([float(x) for x in parts])
    except ValueError:
        raise BadParameter(f"config key {key!r}: {raw!r} is not numeric")


def _controls(cfg) -> RunControls:
    return RunControls(
        t_end=_float(cfg, "controls.t_end", np.inf),
        max_steps=_int(cfg, "controls.max_steps", 100000),
        blowup_threshold=_float(cfg, "controls.blowup_threshold", 1e4),
        stride=_int(cfg, "controls.stride", 1),
        safety=_float(cfg, "controls.safety", 0.9),
        dt=_float(cfg, "controls.dt", None))


def _scenario(cfg):
    name = _get(cfg, "scenario.name", required=True)
    if name not in SCENARIO_PARAMS:
        raise BadParameter(
            f"unknown scenario {name!r}; expected one of "
            f"{sorted(SCENARIO_PARAMS)}")
    params = {}
    for key, typ in SCENARIO_PARAMS[name].items():
        raw = cfg.get(f"scenario.{key}")
        if raw is not None:
            params[key] = typ(float(raw)) if typ is int else typ(raw)
    return name, params


def _trace(cfg):
    """Build the configured scenario's trace: mesh flow, exact radius ODE, or
    exact translation depending on the scenario."""
    name, params = _scenario(cfg)
    controls = _controls(cfg)
    if name == "sphere_ode":
        return run_sphere_ode(
            radius=params.get("radius", 1.0), controls=controls,
            patch_nodes=(params.get("n1", 24), params.get("n2", 32)),
            polar_margin=params.get("polar_margin", 0.6))
    if name == "grim_reaper_product":
        t_end = _float(cfg, "controls.t_end", 0.1)
        if not np.isfinite(t_end) or t_end <= 0:
            raise BadParameter("grim_reaper_product needs a finite positive "
                               "controls.t_end for its sample times")
        samples = _int(cfg, "controls.samples", 3)
        params.pop("time", None)
        times = np.linspace(0.0, t_end, max(3, samples))
        return translating_trace(
            lambda t: grim_reaper_product(time=t, **params), times)
    state = generate_scenario(name, **params)
    return run_flow(state, controls)


def _outdir(cfg) -> str:
    path = _get(cfg, "output.directory", ".")
    os.makedirs(path, exist_ok=True)
    return path


def cmd_simulate(cfg, args) -> int:
    trace = _trace(cfg)
    out = _outdir(cfg)
    io.write_timeseries(os.path.join(out, "timeseries.csv"), trace)
    io.write_snapshot(os.path.join(out, "snapshot_initial.txt"),
                      trace.states[0])
    io.write_snapshot(os.path.join(out, "snapshot_final.txt"),
                      trace.states[-1])
    sc = trace.scalars
    print(f"{trace.termination_reason}: {int(sc.step[-1])} steps, "
          f"t = {sc.t[-1]:.10g}, {len(trace.states)} stored states")
    return 0


def cmd_monotonicity(cfg, args) -> int:
    trace = _trace(cfg)
    kind = _get(cfg, "run.kind", "lagrangian")
    weight = GaussianWeight(_vec4(cfg, "weight.center", required=True),
                            _float(cfg, "weight.t0", required=True))
    scan = monotonicity_scan(trace, weight, kind)
    out = _outdir(cfg)
    io.write_timeseries(os.path.join(out, "timeseries.csv"), trace, scan=scan)
    residual = scan.residual()
    report = {
        "weightKind": kind,
        "samples": int(len(scan.times)),
        "psiInitial": float(scan.psi[0]),
        "psiFinal": float(scan.psi[-1]),
        "maxLhs": float(scan.lhs.max()),
        "maxAbsResidual": float(np.abs(residual).max()),
    }
    io.write_report(os.path.join(out, "monotonicity_report.json"), report)
    print(f"monotone: max dPsi/dt = {report['maxLhs']:.6e}, "
          f"decomposition residual = {report['maxAbsResidual']:.6e}")
    return 0


def cmd_rescale(cfg, args) -> int:
    trace = _trace(cfg)
    t_hat = _float(cfg, "rescale.T_hat", None)
    if t_hat is None:
        t_hat = estimate_singular_time(trace).singular_time
    anchor = _vec4(cfg, "rescale.anchor", np.zeros(4))
    radii_raw = _get(cfg, "rescale.radii", "0.25 0.125 0.0625")
    radii = [float(x) for x in radii_raw.split()]
    out = _outdir(cfg)
    entries = []
    first_rescaled = None
    for r_k in radii:
        record = with_rescaled(trace, select_blowup_datum(
            trace, t_hat, anchor, r_k))
        validation = validate_rescaled(record)
        if first_rescaled is None:
            rt = record.rescaledTrace
            first_rescaled = rt.states[int(np.argmin(np.abs(rt.times)))]
        entries.append({
            "rK": record.rK, "sigmaK": record.sigmaK,
            "lambdaK": record.lambdaK, "peakNode": record.peakNode,
            "peakTime": record.peakTime,
            "peakPoint": record.peakPoint, "validation": validation,
        })
    io.write_report(os.path.join(out, "rescale_report.json"),
                    {"T_hat": t_hat, "records": entries})
    io.write_snapshot(os.path.join(out, "snapshot_rescaled.txt"),
                      first_rescaled)
    for e in entries:
        print(f"r_k = {e['rK']:.6g}: sigma_k = {e['sigmaK']:.6g}, "
              f"lambda_k = {e['lambdaK']:.6g}, "
              f"lambda^2 sigma^2 = {e['validation']['lambdaSigmaSq']:.6e}")
    return 0


def cmd_theorem(cfg, args) -> int:
    trace = _trace(cfg)
    name, _ = _scenario(cfg)
    default_kind = ("lagrangian" if name in ("grim_reaper_product",
                                             "lagrangian_graph", "plane")
                    else "symplectic")
    kind = _get(cfg, "run.kind", default_kind)
    report = check_main_theorem(trace, kind)
    out = _outdir(cfg)
    io.write_report(os.path.join(out, "report.json"), report)
    if "run.p" in cfg:
        probe = gradient_estimate_probe(
            normalize_flow(trace)["trace"], _float(cfg, "run.p", required=True),
            _float(cfg, "run.radius", 1e3), kind)
        io.write_report(os.path.join(out, "probe.json"), probe)
    print(f"{kind}: lhs = {report.lhs:.10g}, verdict = {report.verdict}, "
          f"ancient = {report.hypotheses['ancient']}")
    return 0


def cmd_cutoff_scan(cfg, args) -> int:
    samples = _int(cfg, "scan.samples", 20001)
    if samples < 101:
        raise BadParameter("scan.samples must be at least 101")
    r = np.linspace(0.0, 1.2, samples)
    cv = cutoff_psi(r)
    plateau = cv.value[r <= 0.5]
    tail = cv.value[r >= 1.0]
    ratio = np.where(cv.value > 0.0,
                     cv.first_deriv ** 2 / np.where(cv.value > 0.0,
                                                    cv.value, 1.0), 0.0)
    stats = {
        "samples": samples,
        "valueMin": float(cv.value.min()),
        "valueMax": float(cv.value.max()),
        "plateauError": float(np.abs(plateau - 1.0).max()),
        "tailError": float(np.abs(tail).max()),
        "maxFirst": float(cv.first_deriv.max()),
        "maxAbsFirst": float(np.abs(cv.first_deriv).max()),
        "maxNegSecond": float((-cv.second_deriv).max()),
        "maxRatio": float(ratio.max()),
        "boundAbsFirst": CUTOFF_SUP_ABS_FIRST,
        "boundNegSecond": CUTOFF_SUP_NEG_SECOND,
        "boundRatio": CUTOFF_CONSTANT,
    }
    ok = (0.0 <= stats["valueMin"] and stats["valueMax"] <= 1.0
          and stats["plateauError"] == 0.0 and stats["tailError"] == 0.0
          and stats["maxFirst"] <= 0.0
          and stats["maxAbsFirst"] <= CUTOFF_SUP_ABS_FIRST + 1e-9
          and stats["maxNegSecond"] <= CUTOFF_SUP_NEG_SECOND + 1e-9
          and stats["maxRatio"] <= CUTOFF_CONSTANT + 1e-6)
    stats["pass"] = bool(ok)
    out = _outdir(cfg)
    io.write_report(os.path.join(out, "cutoff_report.json"), stats)
    print(f"cutoff scan over {samples} samples: "
          f"max -psi'' = {stats['maxNegSecond']:.9g}, "
          f"max psi'^2/psi = {stats['maxRatio']:.9g}, "
          f"pass = {stats['pass']}")
    if not ok:
        raise PropertyViolation("cutoff profile property scan failed")
    return 0


def cmd_verify(cfg, args) -> int:
    quantity = args.quantity
    if quantity not in EVOLUTION_QUANTITIES:
        raise BadParameter(f"unknown quantity {quantity!r}; expected one of "
                           f"{EVOLUTION_QUANTITIES}")
    levels = args.refine
    if levels < 2:
        raise BadParameter("--refine must be at least 2")
    name, params = _scenario(cfg)
    if name not in ("lagrangian_graph", "symplectic_graph",
                    "clifford_torus"):
        raise BadParameter(
            "verify needs a periodic mesh scenario (lagrangian_graph, "
            "symplectic_graph, or clifford_torus)")
    dt = _float(cfg, "controls.dt", required=True)
    steps = _int(cfg, "controls.max_steps", required=True)
    n_base = params.get("n1", 16)
    k_star = max(2, steps // 2)
    t_star = k_star * dt

    residuals = []
    print("level      n          dt     residual   order_dt")
    order = None
    for level in range(levels):
        n = n_base * 2 ** level
        dt_l = dt / 4.0 ** level
        k_l = k_star * 4 ** level
        p = dict(params)
        p["n1"] = n
        p["n2"] = n * params.get("n2", n_base) // n_base
        state = generate_scenario(name, **p)
        trace = run_flow(state, RunControls(dt=dt_l, max_steps=k_l + 2,
                                            stride=1))
        res = evolution_residual(trace, quantity)
        j = int(np.argmin(np.abs(res.times - t_star)))
        value = float(np.nanmax(np.abs(res.values[j])))
        residuals.append(value)
        if level:
            with np.errstate(divide="ignore", invalid="ignore"):
                order = float(np.log(residuals[-2] / value) / np.log(4.0))
        else:
            order = None
        print(f"{level:5d} {n:6d} {dt_l:11.4e} {value:12.5e}"
              + (f" {order:10.2f}" if order is not None else "          -"))
    if order is None or not np.isfinite(order) or order < 1.5:
        raise OrderTooLow(
            f"observed dt-order {order} for {quantity} is below 1.5")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "rescale": cmd_rescale,
    "verify": cmd_verify,
    "monotonicity": cmd_monotonicity,
    "theorem": cmd_theorem,
    "cutoff-scan": cmd_cutoff_scan,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcf4d",
        description="Mean curvature flow of surfaces in R^4: simulation, "
                    "blow-up rescaling, and angle-pinching diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True,
                        help="path to a key = value config file")
        if name == "verify":
            sp.add_argument("--quantity", required=True,
                            choices=EVOLUTION_QUANTITIES,
                            help="evolution identity to refine")
            sp.add_argument("--refine", type=int, default=3,
                            help="number of refinement levels (default 3)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = io.read_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except FileNotFoundError as exc:
        print(f"FileNotFoundError: {exc}", file=sys.stderr)
        return CONFIG_EXIT
    except (BadParameter, BadP) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return CONFIG_EXIT
    except Mcf4dError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return NUMERICAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
