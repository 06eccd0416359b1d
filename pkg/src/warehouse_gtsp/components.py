"""The four search components: CO, IHC, OM and VM.

Each component takes a solution, mutates it in place according to its own
acceptance rule and reports whether the tour cost strictly decreased.

CO  (Cluster Optimisation)    exact vertex selection for the fixed cluster
                              order, via a layered shortest-path sweep
IHC (Insertion Hill Climber)  one random cluster relocation, kept only if
                              strictly improving
OM  (Order Mutation)          one random cluster relocation, applied
                              unconditionally
VM  (Vertex Mutation)         one random vertex replacement inside a random
                              cluster, applied unconditionally
"""

import random
from enum import Enum
from typing import NamedTuple

from .core import (
    Instance,
    Solution,
    apply_relocate,
    apply_vertex_swap,
    relocate_delta,
    vertex_swap_delta,
)


class ComponentKind(Enum):
    CO = "CO"
    IHC = "IHC"
    OM = "OM"
    VM = "VM"


class ComponentOutcome(NamedTuple):
    """Result of one component application.

    ``improved`` is true exactly when ``cost_delta`` is negative.
    """

    improved: bool
    cost_delta: int


def _draw_relocation(solution: Solution, rng: random.Random):
    """Uniform draw over the m*(m-2) genuine (cluster, anchor) relocations.

    Excludes the two placements that leave the tour unchanged (anchor = c
    itself and anchor = c's current predecessor) without rejection sampling.
    """
    m = len(solution.next)
    if m < 3:
        raise ValueError(f"relocation requires at least 3 clusters, got {m}")
    c = rng.randrange(m)
    p = solution.prev[c]
    k = rng.randrange(m - 2)
    lo, hi = (c, p) if c < p else (p, c)
    if k >= lo:
        k += 1
    if k >= hi:
        k += 1
    return c, k


def cluster_optimisation(instance: Instance, solution: Solution) -> ComponentOutcome:
    """Replace the vertex selection by an optimal one for the current order.

    Roots the sweep at a smallest cluster (lowest index on ties).  For each
    root vertex a forward dynamic-programming pass walks the cluster layers
    in tour order; parent indices are kept for backtracking.  Deterministic,
    never increases the cost, and exploring all selections at once makes it
    a very large scale neighbourhood step at polynomial cost.
    """
    clusters = instance.clusters
    dist = instance.dist
    m = instance.m
    if m < 2:
        return ComponentOutcome(False, 0)
    nxt = solution.next
    root = min(range(m), key=lambda c: len(clusters[c]))
    seq = [root]
    c = nxt[root]
    while c != root:
        seq.append(c)
        c = nxt[c]
    best_total = None
    best_root = best_last = 0
    best_parents = None
    for a in clusters[root]:
        row_a = dist[a]
        nodes = clusters[seq[1]]
        costs = [row_a[v] for v in nodes]
        parents = []
        for i in range(2, m):
            cur = clusters[seq[i]]
            ncosts = []
            npar = []
            for w in cur:
                row = dist[w]
                bv = costs[0] + row[nodes[0]]
                bj = 0
                for j in range(1, len(nodes)):
                    t = costs[j] + row[nodes[j]]
                    if t < bv:
                        bv = t
                        bj = j
                ncosts.append(bv)
                npar.append(bj)
            parents.append(npar)
            nodes = cur
            costs = ncosts
        bt = costs[0] + row_a[nodes[0]]
        bj = 0
        for j in range(1, len(nodes)):
            t = costs[j] + row_a[nodes[j]]
            if t < bt:
                bt = t
                bj = j
        if best_total is None or bt < best_total:
            best_total = bt
            best_root = a
            best_last = bj
            best_parents = parents
    delta = best_total - solution.cost
    chosen = solution.chosen
    j = best_last
    for i in range(m - 1, 1, -1):
        chosen[seq[i]] = clusters[seq[i]][j]
        j = best_parents[i - 2][j]
    chosen[seq[1]] = clusters[seq[1]][j]
    chosen[root] = best_root
    solution.cost = best_total
    return ComponentOutcome(delta < 0, delta)


def insertion_hill_climber(instance: Instance, solution: Solution,
                           rng: random.Random) -> ComponentOutcome:
    """Draw one relocation; apply it only when strictly improving."""
    c, after = _draw_relocation(solution, rng)
    delta = relocate_delta(instance, solution, c, after)
    if delta < 0:
        apply_relocate(instance, solution, c, after, delta)
        return ComponentOutcome(True, delta)
    return ComponentOutcome(False, 0)


def order_mutation(instance: Instance, solution: Solution,
                   rng: random.Random) -> ComponentOutcome:
    """Draw one relocation exactly like IHC; apply it unconditionally."""
    c, after = _draw_relocation(solution, rng)
    delta = relocate_delta(instance, solution, c, after)
    apply_relocate(instance, solution, c, after, delta)
    return ComponentOutcome(delta < 0, delta)


def vertex_mutation(instance: Instance, solution: Solution,
                    rng: random.Random) -> ComponentOutcome:
    """Re-draw the chosen vertex of a random cluster, incumbent included."""
    c = rng.randrange(instance.m)
    members = instance.clusters[c]
    v = members[rng.randrange(len(members))]
    delta = vertex_swap_delta(instance, solution, c, v)
    apply_vertex_swap(instance, solution, c, v, delta)
    return ComponentOutcome(delta < 0, delta)


_COMPONENT_FUNCS = {
    ComponentKind.CO: lambda instance, solution, rng: cluster_optimisation(instance, solution),
    ComponentKind.IHC: insertion_hill_climber,
    ComponentKind.OM: order_mutation,
    ComponentKind.VM: vertex_mutation,
}


def apply_component(kind: ComponentKind, instance: Instance, solution: Solution,
                    rng: random.Random) -> ComponentOutcome:
    """Apply one component by kind and return its outcome."""
    return _COMPONENT_FUNCS[kind](instance, solution, rng)
