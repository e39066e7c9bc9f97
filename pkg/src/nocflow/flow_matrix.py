"""Flow-matrix construction for the two switching disciplines.

The optimal allocation is the solution of a k-by-k linear system over the
per-level load fractions.  Row 0 forces the fractions, weighted by level
population, to sum to one.  Each later row encodes "level d stops computing
at the same instant as the level before it started plus its own work",
which collapses to a fixed sparsity pattern per discipline:

* cut-through (vct): a node relays a chunk's head immediately, so levels 0
  and 1 both start at time zero, and level d >= 2 starts once the chunks
  bound for levels 1..d-1 have cleared the shared injection link.
* modified store-and-forward (snf): a node starts computing only after its
  own chunk has fully arrived, but relays with no extra latency, so level d
  starts once the chunks for levels 1..d have cleared the injection link.

The single knob is sigma, the communication-to-computation cost ratio: the
link time per unit load divided by the compute time per unit load.  Sigma
enters the builders as an exact argument; Scenario derives it once from the
hardware constants so every consumer sees the same value.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InputError
from .topology import LevelProfile


class Protocol(str, enum.Enum):
    """Switching discipline selector; values double as CLI/file spellings."""

    VCT = "vct"
    SNF = "snf"


@dataclass(frozen=True)
class Scenario:
    """Homogeneous hardware constants.

    omega: inverse computing speed of a node (time per unit load, scaled
        by tcp).
    z: inverse link speed (time per unit load, scaled by tcm).
    tcp: computing intensity of the workload.
    tcm: communication intensity of the workload.

    ``sigma = z * tcm / (omega * tcp)`` is derived once at construction and
    then carried around as-is; nothing recomputes it downstream.
    """

    omega: float = 1.0
    z: float = 1.0
    tcp: float = 1.0
    tcm: float = 1.0
    sigma: float = field(init=False)

    def __post_init__(self):
        for name in ("omega", "z", "tcp", "tcm"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise InputError(f"{name} must be a number, got {value!r}")
            object.__setattr__(self, name, float(value))
            if not math.isfinite(getattr(self, name)):
                raise InputError(f"{name} must be finite")
        if self.omega <= 0.0 or self.tcp <= 0.0 or self.tcm <= 0.0:
            raise InputError("omega, tcp and tcm must be positive")
        if self.z < 0.0:
            raise InputError("z must be nonnegative")
        object.__setattr__(self, "sigma", self.z * self.tcm / (self.omega * self.tcp))

    @classmethod
    def from_sigma(cls, sigma: float) -> Scenario:
        """Unit constants with the link speed chosen to hit ``sigma`` exactly."""
        check_sigma(sigma)
        return cls(omega=1.0, z=float(sigma), tcp=1.0, tcm=1.0)

    def with_sigma(self, sigma: float) -> Scenario:
        """Same compute-side constants, link speed rescaled to ``sigma``."""
        check_sigma(sigma)
        return Scenario(
            omega=self.omega,
            z=float(sigma) * self.omega * self.tcp / self.tcm,
            tcp=self.tcp,
            tcm=self.tcm,
        )


def check_sigma(sigma: float) -> None:
    if not isinstance(sigma, (int, float)) or isinstance(sigma, bool):
        raise InputError(f"sigma must be a number, got {sigma!r}")
    if not math.isfinite(sigma) or sigma < 0.0:
        raise InputError(f"sigma must be finite and nonnegative, got {sigma}")


def as_profile(profile: LevelProfile | Sequence[int]) -> LevelProfile:
    if isinstance(profile, LevelProfile):
        return profile
    return LevelProfile.from_counts(profile)


@dataclass(frozen=True, eq=False)
class FlowMatrix:
    """The assembled system ``entries @ fractions = rhs``.

    ``entries`` is k-by-k with the population row first; ``rhs`` is the unit
    vector (1, 0, ..., 0).  Both arrays are read-only.
    """

    entries: np.ndarray
    rhs: np.ndarray
    protocol: Protocol
    sigma: float
    profile: LevelProfile

    @property
    def k(self) -> int:
        return self.entries.shape[0]


def _seal(a: np.ndarray, rhs: np.ndarray, protocol: Protocol, sigma: float,
          profile: LevelProfile) -> FlowMatrix:
    a.setflags(write=False)
    rhs.setflags(write=False)
    return FlowMatrix(a, rhs, protocol, float(sigma), profile)


def build_vct(profile: LevelProfile | Sequence[int], sigma: float) -> FlowMatrix:
    """Cut-through system.

    Row 0 holds the level counts.  Row 1 equates the level-0 and level-1
    fractions (both start at time zero).  Row d >= 2 has sigma-1 under the
    level-1 fraction, sigma under levels 2..d-1, and 1 under level d: the
    link time spent on earlier levels plus level d's own compute time must
    equal level 1's compute time.
    """
    prof = as_profile(profile)
    check_sigma(sigma)
    k = prof.k
    a = np.zeros((k, k))
    a[0] = prof.counts
    if k > 1:
        a[1, 0] = 1.0
        a[1, 1] = -1.0
    for d in range(2, k):
        a[d, 1] = sigma - 1.0
        a[d, 2:d] = sigma
        a[d, d] = 1.0
    rhs = np.zeros(k)
    rhs[0] = 1.0
    return _seal(a, rhs, Protocol.VCT, sigma, prof)


def build_snf(profile: LevelProfile | Sequence[int], sigma: float) -> FlowMatrix:
    """Modified store-and-forward system.

    Row 0 holds the level counts.  Row d >= 1 has 1 under the level-0
    fraction, -sigma under levels 1..d-1, and -(sigma+1) under level d:
    level d's start delay (full receipt of chunks 1..d) plus its compute
    time must equal the root's compute time.
    """
    prof = as_profile(profile)
    check_sigma(sigma)
    k = prof.k
    a = np.zeros((k, k))
    a[0] = prof.counts
    for d in range(1, k):
        a[d, 0] = 1.0
        a[d, 1:d] = -sigma
        a[d, d] = -(sigma + 1.0)
    rhs = np.zeros(k)
    rhs[0] = 1.0
    return _seal(a, rhs, Protocol.SNF, sigma, prof)


def build(protocol: Protocol, profile: LevelProfile | Sequence[int], sigma: float) -> FlowMatrix:
    if protocol is Protocol.VCT:
        return build_vct(profile, sigma)
    if protocol is Protocol.SNF:
        return build_snf(profile, sigma)
    raise InputError(f"unknown protocol {protocol!r}")


def determinant(fm: FlowMatrix) -> float:
    return linalg.determinant(fm.entries)


def column_replaced_determinant(fm: FlowMatrix, column: int) -> float:
    """Determinant of the system matrix with ``column`` swapped for the rhs."""
    if not 0 <= column < fm.k:
        raise InputError(f"column {column} outside 0..{fm.k - 1}")
    m = np.array(fm.entries)
    m[:, column] = fm.rhs
    return linalg.determinant(m)


def dump_matrix(fm: FlowMatrix) -> str:
    """Plain-text dump: one row per line, entries as decimal literals."""
    return "\n".join(" ".join(repr(float(v)) for v in row) for row in fm.entries) + "\n"
