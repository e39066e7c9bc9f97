"""Solve the flow system and turn it into a feasible optimal allocation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InputError, SingularMatrixError
from .flow_matrix import (
    FlowMatrix,
    Protocol,
    as_profile,
    build,
    check_sigma,
    column_replaced_determinant,
    determinant,
)
from .topology import LevelProfile

# residual_norm stays below RESIDUAL_RTOL * k on every successful solve
RESIDUAL_RTOL = 1e-10
# slack used when classifying fractions as negative or out of range
FEASIBILITY_EPS = 1e-12


@dataclass(frozen=True)
class LevelAllocation:
    """Per-level optimal load fractions plus solve diagnostics.

    ``fractions[d]`` is the share of the total load given to EACH node at
    level d (not the level total).  ``residual_norm`` is the max-norm of
    A x - b; ``rank_ok`` records that elimination never met a dead pivot.
    """

    fractions: tuple[float, ...]
    residual_norm: float
    rank_ok: bool

    @property
    def k(self) -> int:
        return len(self.fractions)


@dataclass(frozen=True)
class FeasibilityReport:
    """Constraint check on an allocation.

    ``violations`` holds (level, value) pairs; ``sigma_in_regime`` flags
    whether sigma sits strictly inside (0, 1), the regime in which both
    disciplines are guaranteed feasible at every depth.
    """

    feasible: bool
    violations: tuple[tuple[int, float], ...]
    sigma_in_regime: bool


def solve(fm: FlowMatrix) -> LevelAllocation:
    """Eliminate the system; raises SingularMatrixError naming the pivot column."""
    x = linalg.solve(fm.entries, fm.rhs)
    residual = float(np.max(np.abs(fm.entries @ x - fm.rhs)))
    return LevelAllocation(tuple(float(v) for v in x), residual, True)


def cramer_fraction(fm: FlowMatrix, level: int) -> float:
    """One fraction via the determinant ratio; an independent cross-check on
    the eliminated solution."""
    if not 0 <= level < fm.k:
        raise InputError(f"level {level} outside 0..{fm.k - 1}")
    det_a = determinant(fm)
    if det_a == 0.0:
        raise SingularMatrixError(None, "system determinant is zero; ratio undefined")
    return column_replaced_determinant(fm, level) / det_a


def check_feasibility(alloc: LevelAllocation, fm: FlowMatrix,
                      eps: float = FEASIBILITY_EPS) -> FeasibilityReport:
    """Root fraction must sit in (0, 1]; every other fraction must be >= 0."""
    fr = alloc.fractions
    violations: list[tuple[int, float]] = []
    if not (fr[0] > eps and fr[0] <= 1.0 + eps):
        violations.append((0, fr[0]))
    for d in range(1, len(fr)):
        if fr[d] < -eps:
            violations.append((d, fr[d]))
    return FeasibilityReport(
        feasible=not violations,
        violations=tuple(violations),
        sigma_in_regime=0.0 < fm.sigma < 1.0,
    )


def solve_with_truncation(profile: LevelProfile | Sequence[int], sigma: float,
                          protocol: Protocol) -> tuple[LevelAllocation, int]:
    """Drop the deepest levels until the allocation is feasible.

    Useful when sigma leaves the guaranteed regime and far levels would be
    assigned negative work.  Returns the allocation padded with zeros for
    the dropped levels, plus the number of levels actually used.  A
    single-level prefix is always feasible, so this cannot fail.
    """
    prof = as_profile(profile)
    check_sigma(sigma)
    for used in range(prof.k, 0, -1):
        fm = build(protocol, prof.prefix(used), sigma)
        try:
            alloc = solve(fm)
        except SingularMatrixError:
            continue
        if check_feasibility(alloc, fm).feasible:
            padded = alloc.fractions + (0.0,) * (prof.k - used)
            return LevelAllocation(padded, alloc.residual_norm, alloc.rank_ok), used
    raise AssertionError("unreachable: the single-level system is x = 1")


def closed_form_2x2(protocol: Protocol, sigma: float) -> LevelAllocation:
    """Textbook closed forms for the 2x2 corner case (level counts 1, 2, 1).

    Direct formula evaluation, no linear solve, so the residual fields are
    zero; kept as an independent golden for the solver.
    """
    check_sigma(sigma)
    if protocol is Protocol.VCT:
        root = 1.0 / (4.0 - sigma)
        fractions = (root, root, (1.0 - sigma) * root)
    elif protocol is Protocol.SNF:
        root = ((sigma + 1.0) / (sigma + 2.0)) ** 2
        fractions = (
            root,
            (sigma + 1.0) / (sigma + 2.0) ** 2,
            1.0 / (sigma + 2.0) ** 2,
        )
    else:
        raise InputError(f"unknown protocol {protocol!r}")
    return LevelAllocation(fractions, 0.0, True)


def per_node_fractions(alloc: LevelAllocation, profile: LevelProfile) -> tuple[float, ...]:
    """Expand per-level fractions to one value per node, in node-id order."""
    if profile.distance_map is None:
        raise InputError("profile has no per-node distances")
    if alloc.k != profile.k:
        raise InputError(
            f"allocation has {alloc.k} levels but profile has {profile.k}"
        )
    return tuple(alloc.fractions[d] for d in profile.distance_map)
