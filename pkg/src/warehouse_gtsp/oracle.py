"""Exhaustive reference solvers for desk-sized instances.

These enumerate candidate solutions outright and exist to check the fast
search code against ground truth; both refuse inputs whose enumeration
would be too large.
"""

import itertools
import math

from .core import Instance, solution_from_order

MAX_SELECTION_STATES = 10 ** 6
MAX_TOUR_STATES = 10 ** 7


def optimal_selection_for_order(instance: Instance, order: list):
    """Best vertex selection for a fixed cluster order, by full enumeration.

    Returns ``(cost, chosen)`` with ``chosen`` indexed by cluster.  Ties go
    to the earliest assignment in lexicographic member order.
    """
    m = instance.m
    if sorted(order) != list(range(m)):
        raise ValueError("order must be a permutation of all cluster indices")
    member_lists = [instance.clusters[c] for c in order]
    states = math.prod(len(members) for members in member_lists)
    if states > MAX_SELECTION_STATES:
        raise ValueError(f"{states} selections exceed the enumeration bound")
    dist = instance.dist
    best_cost = None
    best_sel = None
    for sel in itertools.product(*member_lists):
        cost = dist[sel[-1]][sel[0]]
        for i in range(m - 1):
            cost += dist[sel[i]][sel[i + 1]]
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_sel = sel
    chosen = [0] * m
    for i, c in enumerate(order):
        chosen[c] = best_sel[i]
    return best_cost, chosen


def global_optimum(instance: Instance):
    """Exact optimum by enumerating cluster orders times vertex selections.

    Cluster orders are anchored at cluster 0 and deduplicated by direction.
    Returns ``(cost, solution)``.
    """
    m = instance.m
    sizes = math.prod(len(members) for members in instance.clusters)
    if math.factorial(max(m - 1, 1)) * sizes > MAX_TOUR_STATES:
        raise ValueError("instance too large for exhaustive optimisation")
    if m == 1:
        sol = solution_from_order(instance, [0])
        return sol.cost, sol
    if m == 2:
        orders = [[0, 1]]
    else:
        # a cycle and its reversal cost the same, keep one representative
        orders = ([0, *perm] for perm in itertools.permutations(range(1, m))
                  if perm[0] < perm[-1])
    best_cost = None
    best_order = None
    best_chosen = None
    for order in orders:
        cost, chosen = optimal_selection_for_order(instance, order)
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_order = list(order)
            best_chosen = chosen
    solution = solution_from_order(instance, best_order, best_chosen)
    return best_cost, solution
