"""Replay the switching schedule and check that every level stops together.

``evaluate`` is written straight from the timing rules, not by reusing the
flow matrix, so it can vouch for the solver independently: feed it any
allocation and it reports when each level would receive, start, and finish.
For an optimal allocation all finish times coincide.

Timing rules, with compute = omega*tcp and link = z*tcm per unit load:

* every level's chunk crosses the shared injection link in depth order, so
  level d's receive window is [link * F(d-1), link * F(d)] where F(d) is
  the sum of the fractions for levels 1..d (the root receives nothing);
* cut-through (vct): computing starts at the window START (the head of the
  chunk arrives first), so levels 0 and 1 both start at zero;
* modified store-and-forward (snf): computing starts at the window END;
* finish = start + fraction * compute.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import InputError
from .flow_matrix import Protocol, Scenario
from .solver import LevelAllocation
from .topology import DistributionTree, LevelProfile

SIMULTANEITY_RTOL = 1e-9


@dataclass(frozen=True)
class Timeline:
    """Per-level schedule, all times in seconds from injection start."""

    start: tuple[float, ...]
    finish: tuple[float, ...]
    receive_start: tuple[float, ...]
    receive_end: tuple[float, ...]
    makespan: float


class SimultaneityCheck(NamedTuple):
    ok: bool
    max_deviation: float


@dataclass(frozen=True)
class GanttRecord:
    """One node's schedule row; the root's receive window is empty."""

    node: int
    level: int
    compute_start: float
    compute_end: float
    receive_start: float
    receive_end: float


def evaluate(protocol: Protocol, alloc: LevelAllocation, profile: LevelProfile,
             scenario: Scenario) -> Timeline:
    """Schedule an arbitrary allocation under the chosen discipline."""
    fractions = alloc.fractions
    if len(fractions) != profile.k:
        raise InputError(
            f"allocation has {len(fractions)} levels but profile has {profile.k}"
        )
    if protocol not in (Protocol.VCT, Protocol.SNF):
        raise InputError(f"unknown protocol {protocol!r}")
    compute = scenario.omega * scenario.tcp
    link = scenario.z * scenario.tcm
    k = profile.k
    receive_start = [0.0] * k
    receive_end = [0.0] * k
    start = [0.0] * k
    shipped = 0.0  # running sum of fractions already sent down the link
    for d in range(1, k):
        receive_start[d] = link * shipped
        shipped += fractions[d]
        receive_end[d] = link * shipped
        start[d] = receive_start[d] if protocol is Protocol.VCT else receive_end[d]
    finish = [s + f * compute for s, f in zip(start, fractions)]
    return Timeline(
        start=tuple(start),
        finish=tuple(finish),
        receive_start=tuple(receive_start),
        receive_end=tuple(receive_end),
        makespan=max(finish),
    )


def verify_simultaneous(timeline: Timeline,
                        tol: float = SIMULTANEITY_RTOL) -> SimultaneityCheck:
    """Do all levels finish within ``tol`` (relative to the makespan)?"""
    deviation = max(abs(f - timeline.makespan) for f in timeline.finish)
    if timeline.makespan > 0.0:
        ok = deviation <= tol * timeline.makespan
    else:
        ok = deviation == 0.0
    return SimultaneityCheck(ok, deviation)


def expand_gantt(timeline: Timeline, tree: DistributionTree,
                 profile: LevelProfile) -> list[GanttRecord]:
    """One record per node in ascending id order, copied from its level."""
    if profile.distance_map is None:
        raise InputError("profile has no per-node distances")
    if len(tree.parent) != len(profile.distance_map):
        raise InputError(
            f"tree covers {len(tree.parent)} nodes but profile covers "
            f"{len(profile.distance_map)}"
        )
    if len(timeline.start) != profile.k:
        raise InputError(
            f"timeline has {len(timeline.start)} levels but profile has {profile.k}"
        )
    if profile.distance_map[tree.root] != 0:
        raise InputError("tree root is not at level 0 of the profile")
    records = []
    for node, level in enumerate(profile.distance_map):
        records.append(GanttRecord(
            node=node,
            level=level,
            compute_start=timeline.start[level],
            compute_end=timeline.finish[level],
            receive_start=timeline.receive_start[level],
            receive_end=timeline.receive_end[level],
        ))
    return records


GANTT_HEADER = "node_id,level,compute_start,compute_end,receive_start,receive_end"


def gantt_csv(records: list[GanttRecord]) -> bytes:
    """Fixed-header CSV, times with 12 significant digits."""
    lines = [GANTT_HEADER]
    for r in records:
        lines.append(
            f"{r.node},{r.level},{format(r.compute_start, '.12g')},"
            f"{format(r.compute_end, '.12g')},{format(r.receive_start, '.12g')},"
            f"{format(r.receive_end, '.12g')}"
        )
    return ("\n".join(lines) + "\n").encode("ascii")
