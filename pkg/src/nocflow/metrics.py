"""Scalar performance figures derived from an allocation."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InfeasibleError, SingularMatrixError
from .flow_matrix import FlowMatrix, Scenario, column_replaced_determinant, determinant
from .solver import LevelAllocation


@dataclass(frozen=True)
class Metrics:
    """makespan: wall time until every node stops computing.
    w_eq: inverse speed of the single equivalent node the network acts as.
    speedup: one-node time over network time, i.e. 1 / root fraction.
    speedup_det: the same figure from the determinant ratio, kept separate
        as a cross-check rather than folded into ``speedup``.
    """

    makespan: float
    w_eq: float
    speedup: float
    speedup_det: float


def compute_metrics(alloc: LevelAllocation, scenario: Scenario, fm: FlowMatrix,
                    load: float = 1.0) -> Metrics:
    """All four figures for a solved system.

    ``alloc`` must belong to ``fm`` (same number of levels) and its root
    fraction must be positive, otherwise the figures are undefined.
    """
    if alloc.k != fm.k:
        raise InfeasibleError(
            f"allocation has {alloc.k} levels but the system has {fm.k}"
        )
    root = alloc.fractions[0]
    if root <= 0.0:
        raise InfeasibleError(f"root fraction {root} is not positive; metrics undefined")
    det_a = abs(determinant(fm))
    det_root = abs(column_replaced_determinant(fm, 0))
    if det_root == 0.0:
        raise SingularMatrixError(0, "root cofactor determinant is zero")
    return Metrics(
        makespan=root * load * scenario.omega * scenario.tcp,
        w_eq=root * scenario.omega,
        speedup=1.0 / root,
        speedup_det=det_a / det_root,
    )
