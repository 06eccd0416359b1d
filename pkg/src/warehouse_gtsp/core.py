"""GTSP instances and tours for rectilinear warehouse picking.

An instance partitions n nodes into m clusters and carries a precomputed
integer distance matrix.  A tour visits exactly one chosen vertex per
cluster; the cluster order lives in doubly-linked ``next``/``prev`` arrays
and is mutated through O(1) relocation and vertex-swap moves that keep the
cached cost exact.
"""

import random
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

GRID_MAX = 200


class Point(NamedTuple):
    """Integer grid coordinates."""

    x: int
    y: int


def manhattan_distance(a: Point, b: Point) -> int:
    """Rectilinear distance |ax - bx| + |ay - by|."""
    return abs(a.x - b.x) + abs(a.y - b.y)


class NoOpMoveError(ValueError):
    """Relocation placement that would rebuild the current tour unchanged."""


def _check_partition(n: int, clusters: list) -> list:
    """Verify clusters partition {0..n-1}; return the node -> cluster map."""
    if not clusters:
        raise ValueError("at least one cluster required")
    cluster_of = [-1] * n
    for c, members in enumerate(clusters):
        if not members:
            raise ValueError(f"cluster {c} is empty")
        for v in members:
            if not 0 <= v < n:
                raise ValueError(f"cluster {c} lists node {v}, outside 0..{n - 1}")
            if cluster_of[v] != -1:
                raise ValueError(f"node {v} appears in clusters {cluster_of[v]} and {c}")
            cluster_of[v] = c
    missing = [v for v in range(n) if cluster_of[v] == -1]
    if missing:
        raise ValueError(f"nodes not covered by any cluster: {missing[:10]}")
    return cluster_of


def _distance_matrix(coords: list, edge_weight_type: str) -> list:
    xs = np.array([p.x for p in coords])
    ys = np.array([p.y for p in coords])
    if edge_weight_type == "MAN_2D":
        d = (np.abs(xs[:, None] - xs[None, :])
             + np.abs(ys[:, None] - ys[None, :])).astype(np.int64)
    elif edge_weight_type == "EUC_2D":
        dx = (xs[:, None] - xs[None, :]).astype(np.float64)
        dy = (ys[:, None] - ys[None, :]).astype(np.float64)
        # nearest-integer rounding with .5 going up, the TSPLIB convention
        d = np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)
    else:
        raise ValueError(f"unsupported edge weight type {edge_weight_type!r}")
    # plain nested lists of Python ints: the search loops index them heavily
    return d.tolist()


@dataclass
class Instance:
    """Immutable problem data; safe to share between concurrent runs.

    ``coords`` is None for instances loaded from an explicit distance
    matrix.  ``dist`` is always a full symmetric n x n integer matrix.
    """

    name: str
    coords: Optional[list]
    clusters: list
    cluster_of: list
    dist: list
    comment: str = ""
    edge_weight_type: str = "MAN_2D"

    @property
    def n(self) -> int:
        return len(self.dist)

    @property
    def m(self) -> int:
        return len(self.clusters)

    @classmethod
    def from_coords(cls, name, coords, clusters, comment="", edge_weight_type="MAN_2D"):
        """Build an instance from grid coordinates, precomputing all distances."""
        coords = [Point(x, y) for x, y in coords]
        cluster_of = _check_partition(len(coords), clusters)
        dist = _distance_matrix(coords, edge_weight_type)
        return cls(name, coords, [list(c) for c in clusters], cluster_of, dist,
                   comment, edge_weight_type)

    @classmethod
    def from_matrix(cls, name, dist, clusters, comment=""):
        """Build an instance from an explicit full distance matrix."""
        n = len(dist)
        for i, row in enumerate(dist):
            if len(row) != n:
                raise ValueError(f"distance row {i} has length {len(row)}, expected {n}")
        for i in range(n):
            if dist[i][i] != 0:
                raise ValueError(f"nonzero diagonal entry at node {i}")
            for j in range(i):
                if dist[i][j] != dist[j][i]:
                    raise ValueError(f"asymmetric distances between nodes {i} and {j}")
        cluster_of = _check_partition(n, clusters)
        return cls(name, None, [list(c) for c in clusters], cluster_of,
                   [list(row) for row in dist], comment, "EXPLICIT")


@dataclass
class Solution:
    """A tour: cyclic cluster order as linked arrays, one chosen vertex per
    cluster, and the cached total cost."""

    next: list
    prev: list
    chosen: list
    cost: int

    def clone(self) -> "Solution":
        return Solution(self.next[:], self.prev[:], self.chosen[:], self.cost)

    def cluster_order(self, start: int = 0) -> list:
        """Cluster indices in tour order, beginning at ``start``."""
        order = [start]
        c = self.next[start]
        while c != start:
            order.append(c)
            c = self.next[c]
        return order


def _cycle_violations(instance: Instance, solution: Solution) -> list:
    m = instance.m
    problems = []
    for label, arr in (("next", solution.next), ("prev", solution.prev), ("chosen", solution.chosen)):
        if len(arr) != m:
            problems.append(f"{label} has length {len(arr)}, expected {m}")
    if problems:
        return problems
    for c in range(m):
        nc = solution.next[c]
        if not 0 <= nc < m:
            problems.append(f"next[{c}] = {nc} out of range")
        elif solution.prev[nc] != c:
            problems.append(f"prev[next[{c}]] = {solution.prev[nc]}, expected {c}")
    if problems:
        return problems
    seen = 0
    c = 0
    for _ in range(m):
        seen += 1
        c = solution.next[c]
        if c == 0:
            break
    if c != 0 or seen != m:
        problems.append(f"next does not form a single cycle over all {m} clusters")
    return problems


def _membership_violations(instance: Instance, solution: Solution) -> list:
    problems = []
    for c in range(instance.m):
        v = solution.chosen[c]
        if not 0 <= v < instance.n or instance.cluster_of[v] != c:
            problems.append(f"chosen[{c}] = {v} is not a member of cluster {c}")
    return problems


def _structural_violations(instance: Instance, solution: Solution) -> list:
    problems = _cycle_violations(instance, solution)
    if problems:
        return problems
    return _membership_violations(instance, solution)


def validate(instance: Instance, solution: Solution) -> list:
    """Return every invariant violation found (empty list when valid).

    Checks array lengths, next/prev mutual consistency, the single-cycle
    property, chosen-vertex membership and the cached cost.  Independent
    violations are all reported, not just the first.
    """
    problems = _cycle_violations(instance, solution)
    if problems:
        return problems
    problems = _membership_violations(instance, solution)
    if all(0 <= v < instance.n for v in solution.chosen):
        actual = _cycle_cost(instance, solution)
        if actual != solution.cost:
            problems.append(f"cached cost {solution.cost} != recomputed cost {actual}")
    return problems


def _cycle_cost(instance: Instance, solution: Solution) -> int:
    dist = instance.dist
    chosen = solution.chosen
    nxt = solution.next
    total = 0
    c = 0
    for _ in range(instance.m):
        total += dist[chosen[c]][chosen[nxt[c]]]
        c = nxt[c]
    return total


def tour_cost(instance: Instance, solution: Solution) -> int:
    """Recompute the tour cost from scratch, ignoring the cache.

    Raises ValueError on a structurally broken solution.
    """
    problems = _structural_violations(instance, solution)
    if problems:
        raise ValueError("invalid solution: " + "; ".join(problems))
    return _cycle_cost(instance, solution)


def solution_from_order(instance: Instance, order: list, chosen: Optional[list] = None) -> Solution:
    """Build a solution from an explicit cluster order.

    ``chosen`` defaults to the first listed vertex of every cluster.
    """
    m = instance.m
    if sorted(order) != list(range(m)):
        raise ValueError("order must be a permutation of all cluster indices")
    nxt = [0] * m
    prv = [0] * m
    for i, c in enumerate(order):
        nc = order[(i + 1) % m]
        nxt[c] = nc
        prv[nc] = c
    if chosen is None:
        chosen = [members[0] for members in instance.clusters]
    else:
        chosen = list(chosen)
        for c, v in enumerate(chosen):
            if instance.cluster_of[v] != c:
                raise ValueError(f"chosen[{c}] = {v} is not a member of cluster {c}")
    sol = Solution(nxt, prv, chosen, 0)
    sol.cost = _cycle_cost(instance, sol)
    return sol


def random_initial_solution(instance: Instance, rng: random.Random) -> Solution:
    """Uniformly random cluster order; chosen = first listed vertex per cluster."""
    m = instance.m
    if m < 3:
        raise ValueError(f"need at least 3 clusters, got {m}")
    order = list(range(m))
    rng.shuffle(order)
    return solution_from_order(instance, order)


def relocate_delta(instance: Instance, solution: Solution, c: int, after: int) -> int:
    """Cost change of moving cluster ``c`` directly after cluster ``after``.

    Six distance lookups; the solution is not modified.  Raises
    NoOpMoveError when ``after`` is c's current predecessor, since the
    rebuilt tour would be identical.
    """
    if c == after:
        raise ValueError("cannot relocate a cluster after itself")
    prv = solution.prev
    p = prv[c]
    if after == p:
        raise NoOpMoveError(f"cluster {c} already follows cluster {after}")
    nxt = solution.next
    ch = solution.chosen
    dist = instance.dist
    uc = ch[c]
    up = ch[p]
    un = ch[nxt[c]]
    ua = ch[after]
    una = ch[nxt[after]]
    row_c = dist[uc]
    return (dist[up][un] - row_c[up] - row_c[un]) + (row_c[ua] + row_c[una] - dist[ua][una])


def apply_relocate(instance: Instance, solution: Solution, c: int, after: int,
                   delta: Optional[int] = None) -> Solution:
    """Splice cluster ``c`` out and reinsert it after ``after``; O(1).

    ``delta`` may carry a value previously obtained from relocate_delta to
    skip recomputation.
    """
    if delta is None:
        delta = relocate_delta(instance, solution, c, after)
    nxt = solution.next
    prv = solution.prev
    # neighbours from the pre-move tour; after != prev[c] so na != c
    p = prv[c]
    nx = nxt[c]
    na = nxt[after]
    nxt[p] = nx
    prv[nx] = p
    nxt[after] = c
    prv[c] = after
    nxt[c] = na
    prv[na] = c
    solution.cost += delta
    return solution


def vertex_swap_delta(instance: Instance, solution: Solution, c: int, v: int) -> int:
    """Cost change of selecting vertex ``v`` for cluster ``c``; four lookups.

    ``v`` may equal the incumbent, giving a delta of zero.
    """
    if instance.cluster_of[v] != c:
        raise ValueError(f"node {v} is not a member of cluster {c}")
    ch = solution.chosen
    dist = instance.dist
    uc = ch[c]
    up = ch[solution.prev[c]]
    un = ch[solution.next[c]]
    return dist[up][v] + dist[v][un] - dist[up][uc] - dist[uc][un]


def apply_vertex_swap(instance: Instance, solution: Solution, c: int, v: int,
                      delta: Optional[int] = None) -> Solution:
    """Make ``v`` the chosen vertex of cluster ``c``; O(1)."""
    if delta is None:
        delta = vertex_swap_delta(instance, solution, c, v)
    solution.chosen[c] = v
    solution.cost += delta
    return solution
