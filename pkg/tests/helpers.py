"""Shared builders for seeded random test instances and solutions."""

import random

from warehouse_gtsp.core import Instance, solution_from_order


def tiny_instance(seed, min_m=3, max_m=6, max_size=4):
    """Random instance with bounded cluster count and sizes.

    Node ids are shuffled so clusters are not contiguous ranges.
    """
    rng = random.Random(seed)
    m = rng.randrange(min_m, max_m + 1)
    sizes = [rng.randrange(1, max_size + 1) for _ in range(m)]
    n = sum(sizes)
    coords = [(rng.randrange(201), rng.randrange(201)) for _ in range(n)]
    ids = list(range(n))
    rng.shuffle(ids)
    clusters = []
    pos = 0
    for size in sizes:
        clusters.append(ids[pos:pos + size])
        pos += size
    return Instance.from_coords(f"tiny{seed}", coords, clusters)


def random_solution(instance, rng):
    """Uniform random cluster order and uniform random vertex choices."""
    order = list(range(instance.m))
    rng.shuffle(order)
    chosen = [members[rng.randrange(len(members))]
              for members in instance.clusters]
    return solution_from_order(instance, order, chosen)
