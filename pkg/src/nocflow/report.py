"""Sigma sweeps and their delimited exports.

A sweep reruns the whole pipeline over a grid of sigma values for one
(topology, injection, protocol) triple and collects the curves that matter:
per-level fractions, speedup, makespan, feasibility.  The CSV and JSON
emitters are deterministic down to the byte so exports can be diffed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError
from .flow_matrix import Protocol, Scenario, build
from .solver import check_feasibility, solve, solve_with_truncation
from .topology import InjectionSpec, Topology, level_profile

MODE_FLAG = "flag"
MODE_TRUNCATE = "truncate"


@dataclass(frozen=True)
class SweepRow:
    """One grid point.

    ``node_ids[d]`` is the representative (smallest-id) node of level d;
    ``fractions[d]`` is both that node's share and its level's per-node
    share.  ``levels_used`` < k means the deepest levels were truncated.
    """

    sigma: float
    fractions: tuple[float, ...]
    node_ids: tuple[int, ...]
    speedup: float
    makespan: float
    feasible: bool
    levels_used: int


def sigma_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic grid; values rounded to 12 decimals so the grid
    is reproducible from its textual form."""
    for name, v in (("start", start), ("stop", stop), ("step", step)):
        if not math.isfinite(v):
            raise InputError(f"grid {name} must be finite, got {v}")
    if start < 0.0:
        raise InputError(f"grid start must be nonnegative, got {start}")
    if step <= 0.0:
        raise InputError(f"grid step must be positive, got {step}")
    if stop < start:
        raise InputError(f"grid stop {stop} is below start {start}")
    values = []
    i = 0
    while True:
        v = round(start + i * step, 12)
        if v > stop + step * 1e-9:
            break
        values.append(v)
        i += 1
    return tuple(values)


def sweep_sigma(topology: Topology, injection: InjectionSpec, protocol: Protocol,
                grid: Sequence[float], scenario_base: Scenario | None = None,
                mode: str = MODE_FLAG) -> list[SweepRow]:
    """One row per grid value, in grid order.

    ``mode="flag"`` solves the full system and marks infeasible rows;
    ``mode="truncate"`` drops deep levels until each row is feasible.
    The scenario's compute-side constants set the makespan scale; its link
    speed is rescaled per grid point.
    """
    if mode not in (MODE_FLAG, MODE_TRUNCATE):
        raise InputError(f"mode must be {MODE_FLAG!r} or {MODE_TRUNCATE!r}, got {mode!r}")
    sigmas = tuple(float(s) for s in grid)
    if not sigmas:
        raise InputError("sigma grid is empty")
    for s in sigmas:
        if not math.isfinite(s) or s < 0.0:
            raise InputError(f"sigma grid values must be finite and nonnegative, got {s}")
    if any(b <= a for a, b in zip(sigmas, sigmas[1:])):
        raise InputError("sigma grid must be strictly increasing")
    profile = level_profile(topology, injection)
    reps = profile.representatives()
    base = scenario_base if scenario_base is not None else Scenario()
    rows = []
    for s in sigmas:
        scenario = base.with_sigma(s)
        if mode == MODE_TRUNCATE:
            alloc, used = solve_with_truncation(profile, s, protocol)
            feasible = True
        else:
            fm = build(protocol, profile, s)
            alloc = solve(fm)
            feasible = check_feasibility(alloc, fm).feasible
            used = profile.k
        root = alloc.fractions[0]
        rows.append(SweepRow(
            sigma=s,
            fractions=alloc.fractions,
            node_ids=reps,
            speedup=1.0 / root,
            makespan=root * scenario.omega * scenario.tcp,
            feasible=feasible,
            levels_used=used,
        ))
    return rows


def _columns(row: SweepRow) -> list[str]:
    cols = ["sigma"]
    cols += [f"alpha_level_{d}" for d in range(len(row.fractions))]
    cols += [f"alpha_node_{i}" for i in row.node_ids]
    cols += ["speedup", "makespan", "feasible", "levels_used"]
    return cols


def _check_uniform(rows: Sequence[SweepRow]) -> None:
    first = rows[0]
    for row in rows:
        if len(row.fractions) != len(first.fractions) or row.node_ids != first.node_ids:
            raise InputError("sweep rows disagree on levels; emit one sweep at a time")


def emit_csv(rows: Sequence[SweepRow]) -> bytes:
    """Delimited export with 12 significant digits per numeric cell."""
    if not rows:
        return b"sigma,speedup,makespan,feasible,levels_used\n"
    _check_uniform(rows)
    lines = [",".join(_columns(rows[0]))]
    for r in rows:
        cells = [format(r.sigma, ".12g")]
        cells += [format(f, ".12g") for f in r.fractions]
        cells += [format(f, ".12g") for f in r.fractions]  # per-node mirrors per-level
        cells += [
            format(r.speedup, ".12g"),
            format(r.makespan, ".12g"),
            "true" if r.feasible else "false",
            str(r.levels_used),
        ]
        lines.append(",".join(cells))
    return ("\n".join(lines) + "\n").encode("ascii")


def _num(value: float) -> float:
    return float(format(value, ".12g"))


def emit_json(rows: Sequence[SweepRow]) -> bytes:
    """Same table as the CSV, as a JSON array of row objects."""
    if rows:
        _check_uniform(rows)
    payload = []
    for r in rows:
        obj: dict[str, object] = {"sigma": _num(r.sigma)}
        for d, f in enumerate(r.fractions):
            obj[f"alpha_level_{d}"] = _num(f)
        for i, f in zip(r.node_ids, r.fractions):
            obj[f"alpha_node_{i}"] = _num(f)
        obj["speedup"] = _num(r.speedup)
        obj["makespan"] = _num(r.makespan)
        obj["feasible"] = r.feasible
        obj["levels_used"] = r.levels_used
        payload.append(obj)
    return (json.dumps(payload, indent=2) + "\n").encode("ascii")


def sweep_filename(topology: Topology, injection: InjectionSpec, protocol: Protocol,
                   suffix: str = "sweep", fmt: str = "csv") -> str:
    """Naming convention for exports: <topology>_<injection>_<protocol>_<suffix>.<fmt>."""
    return f"{topology.name}_{injection.label}_{protocol.value}_{suffix}.{fmt}"
