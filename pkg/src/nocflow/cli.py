"""Command-line front door: scenario files in; tables, exports, figures out.

A scenario file is strict JSON naming the topology, the injection node, the
switching discipline, and either sigma directly or the four hardware
constants it derives from.  Unknown keys are rejected everywhere so typos
surface as errors instead of silently falling back to defaults.

Exit codes: 0 success, 2 invalid input, 3 infeasible result without
--truncate, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import InputError, SingularMatrixError
from .flow_matrix import (
    FlowMatrix,
    Protocol,
    Scenario,
    build,
    check_sigma,
    column_replaced_determinant,
)
from .metrics import compute_metrics
from .plots import save_gantt_figure, save_sweep_figure
from .report import (
    MODE_FLAG,
    MODE_TRUNCATE,
    emit_csv,
    emit_json,
    sigma_grid,
    sweep_filename,
    sweep_sigma,
)
from .solver import (
    RESIDUAL_RTOL,
    FeasibilityReport,
    LevelAllocation,
    check_feasibility,
    cramer_fraction,
    solve,
    solve_with_truncation,
)
from .timeline import (
    SIMULTANEITY_RTOL,
    evaluate,
    expand_gantt,
    gantt_csv,
    verify_simultaneous,
)
from .topology import (
    CORNER,
    HYPERCUBE,
    MESH,
    TORUS,
    InjectionSpec,
    LevelProfile,
    Topology,
    distribution_tree,
    injection_at,
    level_profile,
)

OUT_DIR_ENV = "NOCFLOW_OUT_DIR"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_VERIFY = 4

NORMALIZATION_TOL = 1e-12
CRAMER_RTOL = 1e-9
DET_IDENTITY_RTOL = 1e-9
MAKESPAN_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class ScenarioFile:
    """Parsed scenario: what to solve and under which constants."""

    topology: Topology
    injection: InjectionSpec
    protocol: Protocol
    scenario: Scenario
    sigma_source: str  # "sigma" or "constants"
    truncate: bool
    load: float
    simultaneity_tol: float


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise InputError(
            f"{where}: unknown key(s) {', '.join(repr(k) for k in unknown)}; "
            f"allowed: {', '.join(sorted(allowed))}"
        )


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise InputError(f"{where}: missing required key {key!r}")
    return obj[key]


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{where}: expected an integer, got {value!r}")
    return value


def _as_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"{where}: value must be finite")
    return value


def _parse_topology(raw, where: str = "topology") -> Topology:
    if not isinstance(raw, dict):
        raise InputError(f"{where}: expected an object")
    kind = _require(raw, "kind", where)
    if kind in (MESH, TORUS):
        _check_keys(raw, {"kind", "m", "n"}, where)
        m = _as_int(_require(raw, "m", where), f"{where}.m")
        n = _as_int(_require(raw, "n", where), f"{where}.n")
        return Topology.mesh(m, n) if kind == MESH else Topology.torus(m, n)
    if kind == HYPERCUBE:
        _check_keys(raw, {"kind", "q"}, where)
        return Topology.hypercube(_as_int(_require(raw, "q", where), f"{where}.q"))
    raise InputError(f"{where}.kind: expected mesh, torus or hypercube, got {kind!r}")


def _parse_injection(raw, topology: Topology, where: str = "injection") -> InjectionSpec:
    if raw is None:
        return injection_at(topology, 0)
    if not isinstance(raw, dict):
        raise InputError(f"{where}: expected an object")
    _check_keys(raw, {"node"}, where)
    node = raw.get("node", 0)
    if isinstance(node, list):
        coords = tuple(_as_int(c, f"{where}.node[]") for c in node)
        return injection_at(topology, coords)
    return injection_at(topology, _as_int(node, f"{where}.node"))


def load_scenario(path: str | os.PathLike) -> ScenarioFile:
    """Read and validate a scenario JSON file; raises InputError on any flaw."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read scenario file {p}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{p}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise InputError(f"{p}: top level must be an object")
    _check_keys(raw, {"topology", "injection", "protocol", "sigma", "constants", "options"},
                "top level")

    topology = _parse_topology(_require(raw, "topology", "top level"))
    injection = _parse_injection(raw.get("injection"), topology)

    proto_raw = _require(raw, "protocol", "top level")
    try:
        protocol = Protocol(proto_raw)
    except ValueError:
        valid = ", ".join(p.value for p in Protocol)
        raise InputError(f"protocol: expected one of {valid}, got {proto_raw!r}") from None

    has_sigma = "sigma" in raw
    has_constants = "constants" in raw
    if has_sigma == has_constants:
        raise InputError("exactly one of 'sigma' or 'constants' must be given")
    if has_sigma:
        sigma = _as_number(raw["sigma"], "sigma")
        check_sigma(sigma)
        scenario = Scenario.from_sigma(sigma)
        sigma_source = "sigma"
    else:
        consts = raw["constants"]
        if not isinstance(consts, dict):
            raise InputError("constants: expected an object")
        _check_keys(consts, {"omega", "z", "tcp", "tcm"}, "constants")
        values = {
            key: _as_number(_require(consts, key, "constants"), f"constants.{key}")
            for key in ("omega", "z", "tcp", "tcm")
        }
        scenario = Scenario(**values)
        sigma_source = "constants"

    options = raw.get("options", {})
    if not isinstance(options, dict):
        raise InputError("options: expected an object")
    _check_keys(options, {"truncate", "load", "simultaneity_tol"}, "options")
    truncate = options.get("truncate", False)
    if not isinstance(truncate, bool):
        raise InputError(f"options.truncate: expected true or false, got {truncate!r}")
    load = _as_number(options.get("load", 1.0), "options.load")
    if load <= 0.0:
        raise InputError(f"options.load: must be positive, got {load}")
    tol = _as_number(options.get("simultaneity_tol", SIMULTANEITY_RTOL),
                     "options.simultaneity_tol")
    if tol <= 0.0:
        raise InputError(f"options.simultaneity_tol: must be positive, got {tol}")

    return ScenarioFile(topology, injection, protocol, scenario, sigma_source,
                        truncate, load, tol)


@dataclass(frozen=True)
class SolvedScenario:
    profile: LevelProfile
    fm_active: FlowMatrix
    alloc_full: LevelAllocation
    alloc_active: LevelAllocation
    report: FeasibilityReport
    levels_used: int


def solve_scenario(sf: ScenarioFile, truncate: bool) -> SolvedScenario:
    """Run the solve pipeline; with truncation the deepest levels may be
    dropped (their fractions padded to zero in ``alloc_full``)."""
    profile = level_profile(sf.topology, sf.injection)
    sigma = sf.scenario.sigma
    if truncate:
        alloc_full, used = solve_with_truncation(profile, sigma, sf.protocol)
        fm_active = build(sf.protocol, profile.prefix(used), sigma)
        alloc_active = LevelAllocation(alloc_full.fractions[:used],
                                       alloc_full.residual_norm, alloc_full.rank_ok)
    else:
        fm_active = build(sf.protocol, profile, sigma)
        alloc_full = solve(fm_active)
        alloc_active = alloc_full
        used = profile.k
    report = check_feasibility(alloc_active, fm_active)
    return SolvedScenario(profile, fm_active, alloc_full, alloc_active, report, used)


def _g(value: float) -> str:
    return format(value, ".12g")


def _scaled(scenario: Scenario, load: float) -> Scenario:
    # scaling both sides by the load leaves sigma untouched and turns
    # unit-load times into actual times
    return Scenario(omega=scenario.omega * load, z=scenario.z * load,
                    tcp=scenario.tcp, tcm=scenario.tcm)


def _extension_note(topology: Topology, injection: InjectionSpec) -> str:
    if topology.kind == MESH and injection.category == CORNER:
        return "no"
    if topology.kind != MESH:
        return f"yes ({topology.kind} topology)"
    return f"yes ({injection.category} mesh injection)"


def _describe_topology(t: Topology) -> str:
    size = f"{t.q}" if t.kind == HYPERCUBE else f"{t.m}x{t.n}"
    return f"{t.kind} {size} ({t.node_count} nodes)"


def _header_lines(sf: ScenarioFile) -> list[str]:
    t, inj, s = sf.topology, sf.injection, sf.scenario
    return [
        f"topology: {_describe_topology(t)}",
        f"injection: node {inj.node}, class {inj.category}, coords {inj.coords}",
        f"protocol: {sf.protocol.value}",
        f"sigma: {_g(s.sigma)} (from {sf.sigma_source})",
        f"constants: omega={_g(s.omega)} z={_g(s.z)} tcp={_g(s.tcp)} tcm={_g(s.tcm)}",
        f"model extension: {_extension_note(t, inj)}",
    ]


def _violation_text(report: FeasibilityReport) -> str:
    return ", ".join(f"level {d}: {_g(v)}" for d, v in report.violations)


def _resolve_out(arg_out: str | None, default_name: str) -> Path:
    if arg_out:
        p = Path(arg_out)
        if p.is_dir():
            return p / default_name
        return p
    base = os.environ.get(OUT_DIR_ENV)
    return (Path(base) if base else Path.cwd()) / default_name


def _parse_grid(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise InputError(f"--grid expects start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(v) for v in parts)
    except ValueError:
        raise InputError(f"--grid expects three numbers, got {text!r}") from None
    return sigma_grid(start, stop, step)


def cmd_solve(args: argparse.Namespace) -> int:
    sf = load_scenario(args.scenario)
    truncate = args.truncate or sf.truncate
    sol = solve_scenario(sf, truncate)
    lines = _header_lines(sf)
    lines.append("level counts: " + " ".join(str(c) for c in sol.profile.counts))
    lines.append(f"levels used: {sol.levels_used} of {sol.profile.k}")
    lines.append("fraction per node at each level: "
                 + " ".join(_g(f) for f in sol.alloc_full.fractions))
    lines.append("representative nodes: "
                 + " ".join(str(i) for i in sol.profile.representatives()))
    if not sol.report.feasible:
        lines.append("feasible: no")
        lines.append(f"violations: {_violation_text(sol.report)}")
        lines.append("hint: rerun with --truncate to drop the starved levels")
        print("\n".join(lines))
        return EXIT_INFEASIBLE
    lines.append("feasible: yes")
    m = compute_metrics(sol.alloc_active, sf.scenario, sol.fm_active, sf.load)
    lines.append(f"makespan: {_g(m.makespan)}")
    lines.append(f"equivalent inverse speed: {_g(m.w_eq)}")
    lines.append(f"speedup: {_g(m.speedup)}")
    lines.append(f"speedup from determinants: {_g(m.speedup_det)}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    sf = load_scenario(args.scenario)
    truncate = args.truncate or sf.truncate
    sol = solve_scenario(sf, truncate)
    print("\n".join(_header_lines(sf)))
    if not sol.report.feasible:
        print(f"feasible: no ({_violation_text(sol.report)})")
        print("hint: rerun with --truncate to drop the starved levels")
        return EXIT_INFEASIBLE

    used = sol.levels_used
    fr = sol.alloc_active.fractions
    counts = sol.profile.counts[:used]
    checks: list[tuple[str, bool, str]] = []

    bound = RESIDUAL_RTOL * used
    checks.append(("solve residual", sol.alloc_active.residual_norm <= bound,
                   f"{sol.alloc_active.residual_norm:.3e} <= {bound:.3e}"))

    norm_dev = abs(sum(c * f for c, f in zip(counts, fr)) - 1.0)
    checks.append(("normalization", norm_dev <= NORMALIZATION_TOL,
                   f"deviation {norm_dev:.3e}"))

    tl = evaluate(sf.protocol, sol.alloc_active, sol.profile.prefix(used),
                  _scaled(sf.scenario, sf.load))
    sim = verify_simultaneous(tl, sf.simultaneity_tol)
    checks.append(("simultaneous finish", sim.ok,
                   f"max deviation {sim.max_deviation:.3e}, tol {sf.simultaneity_tol:g}"))

    worst_rel = 0.0
    cramer_ok = True
    for level, f in enumerate(fr):
        c = cramer_fraction(sol.fm_active, level)
        if abs(f) < 1e-12:
            cramer_ok = cramer_ok and abs(c - f) <= 1e-12
        else:
            worst_rel = max(worst_rel, abs(c - f) / abs(f))
    cramer_ok = cramer_ok and worst_rel <= CRAMER_RTOL
    checks.append(("cramer agreement", cramer_ok, f"max relative {worst_rel:.3e}"))

    m = compute_metrics(sol.alloc_active, sf.scenario, sol.fm_active, sf.load)
    det_dev = abs(m.speedup - m.speedup_det)
    checks.append(("speedup determinant identity",
                   det_dev <= DET_IDENTITY_RTOL * m.speedup,
                   f"{_g(m.speedup)} vs {_g(m.speedup_det)}"))

    if sf.protocol is Protocol.VCT:
        mag = abs(column_replaced_determinant(sol.fm_active, 0))
        checks.append(("root cofactor magnitude", abs(mag - 1.0) <= DET_IDENTITY_RTOL,
                       f"|det| = {_g(mag)}"))

    mk_dev = abs(tl.makespan - m.makespan)
    checks.append(("makespan consistency",
                   mk_dev <= MAKESPAN_MATCH_TOL * max(1.0, m.makespan),
                   f"timeline {_g(tl.makespan)} vs metrics {_g(m.makespan)}"))

    failed = 0
    for name, ok, detail in checks:
        print(f"{name}: {'ok' if ok else 'FAIL'} ({detail})")
        if not ok:
            failed += 1
    if failed:
        print(f"{failed} check(s) failed")
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    sf = load_scenario(args.scenario)
    truncate = args.truncate or sf.truncate
    grid = _parse_grid(args.grid)
    rows = sweep_sigma(sf.topology, sf.injection, sf.protocol, grid,
                       scenario_base=sf.scenario,
                       mode=MODE_TRUNCATE if truncate else MODE_FLAG)
    fmt = args.format
    data = emit_csv(rows) if fmt == "csv" else emit_json(rows)
    name = sweep_filename(sf.topology, sf.injection, sf.protocol, "sweep", fmt)
    out = _resolve_out(args.out, name)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)
    print(f"wrote {out}")
    if not args.no_plot:
        fig_path = out.with_suffix(".png")
        save_sweep_figure(rows, fig_path,
                          title=f"{sf.topology.name} {sf.injection.label} "
                                f"{sf.protocol.value}")
        print(f"wrote {fig_path}")
    return EXIT_OK


def cmd_gantt(args: argparse.Namespace) -> int:
    sf = load_scenario(args.scenario)
    truncate = args.truncate or sf.truncate
    sol = solve_scenario(sf, truncate)
    if not sol.report.feasible:
        print(f"feasible: no ({_violation_text(sol.report)})", file=sys.stderr)
        print("hint: rerun with --truncate to drop the starved levels", file=sys.stderr)
        return EXIT_INFEASIBLE
    tree = distribution_tree(sf.topology, sf.injection)
    tl = evaluate(sf.protocol, sol.alloc_full, sol.profile, _scaled(sf.scenario, sf.load))
    records = expand_gantt(tl, tree, sol.profile)
    name = sweep_filename(sf.topology, sf.injection, sf.protocol, "gantt", "csv")
    out = _resolve_out(args.out, name)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(gantt_csv(records))
    print(f"wrote {out}")
    if not args.no_plot:
        fig_path = out.with_suffix(".png")
        save_gantt_figure(records, fig_path,
                          title=f"{sf.topology.name} {sf.injection.label} "
                                f"{sf.protocol.value} sigma={_g(sf.scenario.sigma)}")
        print(f"wrote {fig_path}")
    return EXIT_OK


def cmd_profile(args: argparse.Namespace) -> int:
    sf = load_scenario(args.scenario)
    profile = level_profile(sf.topology, sf.injection)
    t, inj = sf.topology, sf.injection
    print(f"topology: {_describe_topology(t)}")
    print(f"injection: node {inj.node}, class {inj.category}, coords {inj.coords}")
    print(f"model extension: {_extension_note(t, inj)}")
    print(f"levels: {profile.k}")
    print("counts: " + " ".join(str(c) for c in profile.counts))
    print("representative nodes: " + " ".join(str(i) for i in profile.representatives()))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nocflow",
        description="Optimal single-source divisible-load distribution on "
                    "mesh, torus, and hypercube interconnects.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, help_text: str, func) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("scenario", help="path to a scenario JSON file")
        sp.set_defaults(func=func)
        return sp

    sp = add("solve", "optimal fractions and figures of merit", cmd_solve)
    sp.add_argument("--truncate", action="store_true",
                    help="drop the deepest levels until the allocation is feasible")

    sp = add("verify", "cross-check the solution against the timing replay", cmd_verify)
    sp.add_argument("--truncate", action="store_true",
                    help="drop the deepest levels until the allocation is feasible")

    sp = add("sweep", "solve over a sigma grid; write CSV/JSON and a figure", cmd_sweep)
    sp.add_argument("--grid", default="0.01:0.99:0.01", metavar="START:STOP:STEP",
                    help="sigma grid (default %(default)s)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv",
                    help="export format (default %(default)s)")
    sp.add_argument("--out", default=None, metavar="PATH",
                    help="output file or directory (default: $%s or the "
                         "working directory)" % OUT_DIR_ENV)
    sp.add_argument("--truncate", action="store_true",
                    help="drop infeasible levels instead of flagging rows")
    sp.add_argument("--no-plot", action="store_true", help="skip the figure")

    sp = add("gantt", "per-node schedule as CSV and a figure", cmd_gantt)
    sp.add_argument("--out", default=None, metavar="PATH",
                    help="output file or directory (default: $%s or the "
                         "working directory)" % OUT_DIR_ENV)
    sp.add_argument("--truncate", action="store_true",
                    help="drop the deepest levels until the allocation is feasible")
    sp.add_argument("--no-plot", action="store_true", help="skip the figure")

    add("profile", "hop-distance level structure of the topology", cmd_profile)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SingularMatrixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
