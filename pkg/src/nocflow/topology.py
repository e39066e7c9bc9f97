"""Interconnect topologies and their hop-distance level structure.

A homogeneous interconnect (rectangular mesh, torus, or hypercube) is
described by its node grid, and load enters at a single injection node.
Every node at the same hop distance from the injection point plays an
identical role, so the network collapses into "levels": level d holds the
nodes whose shortest path to the injection node is d hops.  The per-level
node counts, plus a shortest-path distribution tree for visualisation, are
the only topology facts the downstream load model consumes.

Node identifiers are row-major integer indexes for meshes and tori (node 0
is the top-left corner), and the integer value of the coordinate bit vector
for hypercubes (most significant bit first).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .errors import InputError

MESH = "mesh"
TORUS = "torus"
HYPERCUBE = "hypercube"

CORNER = "corner"
BOUNDARY = "boundary"
INTERIOR = "interior"
ANY = "any"


@dataclass(frozen=True)
class Topology:
    """A homogeneous interconnect: mesh(m, n), torus(m, n), or hypercube(q).

    Use the factory classmethods rather than the constructor; ``m``/``n``
    apply to grids, ``q`` to hypercubes, and the unused fields keep their
    defaults.
    """

    kind: str
    m: int = 1
    n: int = 1
    q: int = 0

    def __post_init__(self):
        if self.kind in (MESH, TORUS):
            if self.m < 1 or self.n < 1:
                raise InputError(
                    f"{self.kind} dimensions must be at least 1x1, got {self.m}x{self.n}"
                )
        elif self.kind == HYPERCUBE:
            if self.q < 0:
                raise InputError(f"hypercube dimension must be >= 0, got {self.q}")
        else:
            raise InputError(f"unknown topology kind {self.kind!r}")

    @classmethod
    def mesh(cls, m: int, n: int) -> Topology:
        return cls(MESH, m=int(m), n=int(n))

    @classmethod
    def torus(cls, m: int, n: int) -> Topology:
        return cls(TORUS, m=int(m), n=int(n))

    @classmethod
    def hypercube(cls, q: int) -> Topology:
        return cls(HYPERCUBE, q=int(q))

    @property
    def node_count(self) -> int:
        if self.kind == HYPERCUBE:
            return 1 << self.q
        return self.m * self.n

    @property
    def name(self) -> str:
        """Short tag used in file names, e.g. ``mesh3x8`` or ``hypercube3``."""
        if self.kind == HYPERCUBE:
            return f"hypercube{self.q}"
        return f"{self.kind}{self.m}x{self.n}"

    def check_node(self, node: int) -> None:
        if not isinstance(node, int) or isinstance(node, bool):
            raise InputError(f"node id must be an integer, got {node!r}")
        if not 0 <= node < self.node_count:
            raise InputError(
                f"node {node} out of range for {self.name} ({self.node_count} nodes)"
            )

    def coords(self, node: int) -> tuple[int, ...]:
        self.check_node(node)
        if self.kind == HYPERCUBE:
            return tuple((node >> (self.q - 1 - b)) & 1 for b in range(self.q))
        return divmod(node, self.n)

    def index(self, coords: Sequence[int]) -> int:
        coords = tuple(int(c) for c in coords)
        if self.kind == HYPERCUBE:
            if len(coords) != self.q or any(c not in (0, 1) for c in coords):
                raise InputError(f"hypercube coordinates must be {self.q} bits, got {coords}")
            node = 0
            for bit in coords:
                node = (node << 1) | bit
            return node
        if len(coords) != 2:
            raise InputError(f"grid coordinates must be (row, col), got {coords}")
        r, c = coords
        if not (0 <= r < self.m and 0 <= c < self.n):
            raise InputError(f"coordinates {coords} out of range for {self.name}")
        return r * self.n + c

    def neighbors(self, node: int) -> list[int]:
        """Adjacent node ids in ascending order (wraparound links for tori)."""
        self.check_node(node)
        if self.kind == HYPERCUBE:
            return sorted(node ^ (1 << b) for b in range(self.q))
        r, c = divmod(node, self.n)
        out: set[int] = set()
        if self.kind == MESH:
            if r > 0:
                out.add(node - self.n)
            if r + 1 < self.m:
                out.add(node + self.n)
            if c > 0:
                out.add(node - 1)
            if c + 1 < self.n:
                out.add(node + 1)
        else:
            # wraparound; a 1-wide or 2-wide axis yields self-loops or twin
            # links, both collapsed by the set
            for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                idx = (rr % self.m) * self.n + (cc % self.n)
                if idx != node:
                    out.add(idx)
        return sorted(out)


@dataclass(frozen=True)
class InjectionSpec:
    """The single load-injection node, with its position class.

    ``category`` is ``corner``/``boundary``/``interior`` on a mesh and
    ``any`` on the vertex-transitive topologies (torus, hypercube), where
    every node is equivalent.
    """

    node: int
    coords: tuple[int, ...]
    category: str

    @property
    def label(self) -> str:
        """File-name tag, e.g. ``corner0``."""
        return f"{self.category}{self.node}"


def injection_at(topology: Topology, node: int | Sequence[int] = 0) -> InjectionSpec:
    """Resolve a node id or coordinate tuple into a classified injection point."""
    if isinstance(node, int) and not isinstance(node, bool):
        idx = node
        topology.check_node(idx)
    else:
        idx = topology.index(node)  # type: ignore[arg-type]
    coords = topology.coords(idx)
    if topology.kind == MESH:
        on_row_edge = coords[0] in (0, topology.m - 1)
        on_col_edge = coords[1] in (0, topology.n - 1)
        if on_row_edge and on_col_edge:
            category = CORNER
        elif on_row_edge or on_col_edge:
            category = BOUNDARY
        else:
            category = INTERIOR
    else:
        category = ANY
    return InjectionSpec(idx, coords, category)


@dataclass(frozen=True)
class LevelProfile:
    """Node counts per hop-distance level.

    ``counts[d]`` is the number of nodes exactly d hops from the injection
    node; ``counts[0]`` is always 1.  ``distance_map[node]`` gives each
    node's level when the profile came from a concrete topology; profiles
    built from bare counts leave it None.
    """

    counts: tuple[int, ...]
    distance_map: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.counts:
            raise InputError("a level profile needs at least one level")
        if any(not isinstance(c, int) or isinstance(c, bool) or c < 1 for c in self.counts):
            raise InputError(f"level counts must be positive integers, got {self.counts}")
        if self.counts[0] != 1:
            raise InputError("level 0 must hold exactly the injection node")
        if self.distance_map is not None:
            hist = [0] * self.k
            for d in self.distance_map:
                if not 0 <= d < self.k:
                    raise InputError("distance map refers to a level outside the profile")
                hist[d] += 1
            if tuple(hist) != self.counts:
                raise InputError("distance map does not match the level counts")

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> LevelProfile:
        return cls(tuple(int(c) for c in counts))

    @property
    def k(self) -> int:
        """Number of levels (injection level included)."""
        return len(self.counts)

    @property
    def node_count(self) -> int:
        return sum(self.counts)

    def representatives(self) -> tuple[int, ...]:
        """Smallest node id at each level; requires a distance map."""
        if self.distance_map is None:
            raise InputError("profile has no per-node distances")
        reps: list[int | None] = [None] * self.k
        for node, d in enumerate(self.distance_map):
            if reps[d] is None:
                reps[d] = node
        return tuple(reps)  # type: ignore[arg-type]

    def prefix(self, levels: int) -> LevelProfile:
        """First ``levels`` levels as a bare-counts profile."""
        if not 1 <= levels <= self.k:
            raise InputError(f"prefix length {levels} outside 1..{self.k}")
        return LevelProfile(self.counts[:levels])


def level_profile(topology: Topology, injection: InjectionSpec) -> LevelProfile:
    """Breadth-first hop distances from the injection node, folded into counts."""
    topology.check_node(injection.node)
    total = topology.node_count
    dist = [-1] * total
    dist[injection.node] = 0
    queue = deque([injection.node])
    while queue:
        u = queue.popleft()
        for v in topology.neighbors(u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    # mesh/torus/hypercube graphs are connected, so every distance is set
    k = max(dist) + 1
    counts = [0] * k
    for d in dist:
        counts[d] += 1
    return LevelProfile(tuple(counts), tuple(dist))


@dataclass(frozen=True)
class DistributionTree:
    """Shortest-path tree used to route chunks away from the injection node.

    ``parent[node]`` is None for the root; ``children[node]`` lists direct
    children in ascending id order.
    """

    root: int
    parent: tuple[int | None, ...]
    children: tuple[tuple[int, ...], ...]


def distribution_tree(topology: Topology, injection: InjectionSpec) -> DistributionTree:
    """Deterministic shortest-path tree: each node picks the parent one level
    closer to the injection node with the lexicographically smallest
    coordinates."""
    profile = level_profile(topology, injection)
    dist = profile.distance_map
    assert dist is not None
    total = topology.node_count
    parent: list[int | None] = [None] * total
    for node in range(total):
        if node == injection.node:
            continue
        best = min(
            topology.coords(p)
            for p in topology.neighbors(node)
            if dist[p] == dist[node] - 1
        )
        parent[node] = topology.index(best)
    children: list[list[int]] = [[] for _ in range(total)]
    for node, p in enumerate(parent):
        if p is not None:
            children[p].append(node)
    return DistributionTree(
        root=injection.node,
        parent=tuple(parent),
        children=tuple(tuple(c) for c in children),
    )
