"""Automated configuration discovery.

Enumerates every deterministic machine over three-component subsets of the
pool, discards the meaningless ones, scores the rest on a training set and
picks the configuration with the lowest total normalized cost.
"""

import hashlib
import itertools
import math
import os
import random
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import psutil

from .cmcs import Budget, Configuration, compute_budget, run
from .components import ComponentKind
from .core import Instance, random_initial_solution

POOL = tuple(ComponentKind)
# components able to lower the cost of an already-seen solution
IMPROVING_KINDS = (ComponentKind.CO, ComponentKind.IHC)


def derive_seed(master: int, *parts) -> int:
    """Stable 64-bit seed for one experimental cell.

    Hashing keeps cells independent of evaluation order and of each other.
    """
    text = ":".join([str(master), *[str(p) for p in parts]])
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big")


def default_workers() -> int:
    return psutil.cpu_count(logical=False) or os.cpu_count() or 1


def _config_name(comps, start, si, su) -> str:
    return "{}:s{}:i{}:u{}".format(
        "-".join(kind.value for kind in comps),
        start,
        "".join(str(x) for x in si),
        "".join(str(x) for x in su),
    )


def enumerate_raw(pool=POOL, k: int = 3) -> list:
    """All deterministic machines over k-subsets of the pool.

    Subsets keep pool order; for each, every start index and every pair of
    successor tables is emitted, lexicographically.  With the four-component
    pool and k = 3 this yields 4 * 3 * 3^3 * 3^3 = 8748 configurations.
    """
    configs = []
    for comps in itertools.combinations(pool, k):
        for start in range(k):
            for si in itertools.product(range(k), repeat=k):
                for su in itertools.product(range(k), repeat=k):
                    configs.append(Configuration(
                        comps, start, si, su,
                        name=_config_name(comps, start, si, su)))
    return configs


def is_meaningful(config: Configuration, improving=IMPROVING_KINDS) -> bool:
    """Filter rule: every component reachable from the start, and at least
    one reachable component able to improve a solution."""
    if config.violations():
        return False
    reachable = config.reachable()
    if len(reachable) != len(config.components):
        return False
    return any(config.components[i] in improving for i in reachable)


def enumerate_meaningful(pool=POOL, k: int = 3) -> list:
    """The filtered, duplicate-free configuration space, in stable order."""
    result = []
    seen = set()
    for config in enumerate_raw(pool, k):
        if not is_meaningful(config):
            continue
        if config in seen:
            continue
        seen.add(config)
        result.append(config)
    return result


@dataclass
class EvaluationMatrix:
    """Raw best costs: one row per configuration, one column per instance."""

    configs: list
    instance_names: list
    values: list
    alpha: Optional[float]


def _cell_budget(instance: Instance, alpha, budget) -> Budget:
    if budget is not None:
        return budget
    return Budget.wall_clock(compute_budget(instance.n, instance.m, alpha))


def _evaluate_cell(config: Configuration, instance: Instance, alpha,
                   seed: int, budget, repeats: int) -> int:
    best = None
    for r in range(repeats):
        init_rng = random.Random(derive_seed(seed, "init", instance.name, r))
        initial = random_initial_solution(instance, init_rng)
        run_rng = random.Random(derive_seed(seed, "run", config.name, instance.name, r))
        result = run(config, instance, initial, _cell_budget(instance, alpha, budget), run_rng)
        if best is None or result.best_cost < best:
            best = result.best_cost
    return best


def _evaluate_chunk(args):
    configs, instance, alpha, seed, budget, repeats = args
    return [_evaluate_cell(config, instance, alpha, seed, budget, repeats)
            for config in configs]


def evaluate(configs: list, instances: list, alpha: Optional[float], seed: int,
             budget: Optional[Budget] = None, repeats: int = 1,
             workers: Optional[int] = None) -> EvaluationMatrix:
    """Run every configuration on every instance and collect best costs.

    Each cell runs under ``budget`` if given, otherwise under the
    wall-clock budget computed from ``alpha``.  ``repeats > 1`` keeps the
    best cost over repeats; the initial solution of repeat r is shared by
    all configurations so they start from common ground.  Parallel workers
    split the configuration list per instance; results are merged by index,
    so the matrix does not depend on scheduling.
    """
    names = [config.name for config in configs]
    if len(set(names)) != len(names):
        raise ValueError("configuration names must be unique")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    if budget is None and alpha is None:
        raise ValueError("either alpha or an explicit budget is required")
    if workers is None:
        workers = default_workers()
    workers = max(1, min(workers, len(configs)))
    values = [[0] * len(instances) for _ in configs]
    if workers == 1:
        for col, instance in enumerate(instances):
            for row, config in enumerate(configs):
                values[row][col] = _evaluate_cell(config, instance, alpha,
                                                  seed, budget, repeats)
    else:
        chunk = math.ceil(len(configs) / workers)
        jobs = []
        for col, instance in enumerate(instances):
            for lo in range(0, len(configs), chunk):
                jobs.append((col, lo, (configs[lo:lo + chunk], instance,
                                       alpha, seed, budget, repeats)))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for (col, lo, _), costs in zip(jobs, pool.map(_evaluate_chunk,
                                                          [j[2] for j in jobs])):
                for off, cost in enumerate(costs):
                    values[lo + off][col] = cost
    return EvaluationMatrix(list(configs), [i.name for i in instances],
                            values, alpha)


@dataclass
class NormalizedMatrix:
    """Per-instance normalized costs plus the anchors used.

    ``values[r][c]`` is None for every configuration on a dropped (flat)
    instance column.
    """

    matrix: EvaluationMatrix
    values: list
    p0: list
    p50: list
    dropped: list


def _nearest_rank_median(column: list):
    ordered = sorted(column)
    return ordered[(len(ordered) + 1) // 2 - 1]


def normalize(matrix: EvaluationMatrix) -> NormalizedMatrix:
    """Map each column v to (v - P0) / (P50 - P0).

    P0 is the column minimum, P50 the nearest-rank median (lower middle
    for even counts).  0 marks the best configuration on that instance, 1
    the median one.  Columns with P50 = P0 carry no signal; they are
    dropped with a warning.
    """
    rows = len(matrix.values)
    cols = len(matrix.instance_names)
    values = [[None] * cols for _ in range(rows)]
    p0 = [0] * cols
    p50 = [0] * cols
    dropped = []
    for col in range(cols):
        column = [matrix.values[row][col] for row in range(rows)]
        lo = min(column)
        mid = _nearest_rank_median(column)
        p0[col] = lo
        p50[col] = mid
        if mid == lo:
            dropped.append(matrix.instance_names[col])
            warnings.warn(f"instance {matrix.instance_names[col]}: flat cost column "
                          "dropped from quality totals")
            continue
        span = mid - lo
        for row in range(rows):
            values[row][col] = (column[row] - lo) / span
    return NormalizedMatrix(matrix, values, p0, p50, dropped)


@dataclass
class TrainingReport:
    normalized: NormalizedMatrix
    q: list
    winner_index: int
    winner: Configuration

    @property
    def matrix(self) -> EvaluationMatrix:
        return self.normalized.matrix

    @property
    def alpha(self):
        return self.matrix.alpha


def select(normalized: NormalizedMatrix) -> TrainingReport:
    """Total the normalized costs per configuration and take the argmin.

    Ties keep the earliest configuration in enumeration order.
    """
    q = [sum(v for v in row if v is not None) for row in normalized.values]
    winner_index = min(range(len(q)), key=q.__getitem__)
    return TrainingReport(normalized, q, winner_index,
                          normalized.matrix.configs[winner_index])


def train(instances: list, alpha: Optional[float], seed: int,
          configs: Optional[list] = None, k: int = 3,
          budget: Optional[Budget] = None, repeats: int = 1,
          workers: Optional[int] = None) -> TrainingReport:
    """Enumerate (unless given), evaluate, normalize and select."""
    if configs is None:
        configs = enumerate_meaningful(k=k)
    matrix = evaluate(configs, instances, alpha, seed,
                      budget=budget, repeats=repeats, workers=workers)
    return select(normalize(matrix))


def dumps_report(report: TrainingReport) -> str:
    """Tab-separated report: metadata comments, then one row per
    configuration with its quality total and per-instance raw and
    normalized costs."""
    matrix = report.matrix
    norm = report.normalized
    lines = []
    lines.append(f"# alpha\t{matrix.alpha if matrix.alpha is not None else 'none'}")
    lines.append(f"# winner\t{report.winner.name}")
    lines.append("# p0\t" + "\t".join(str(v) for v in norm.p0))
    lines.append("# p50\t" + "\t".join(str(v) for v in norm.p50))
    if norm.dropped:
        lines.append("# dropped\t" + "\t".join(norm.dropped))
    header = ["config", "q"]
    header += [f"raw:{name}" for name in matrix.instance_names]
    header += [f"norm:{name}" for name in matrix.instance_names]
    lines.append("\t".join(header))
    for row, config in enumerate(matrix.configs):
        cells = [config.name, repr(report.q[row])]
        cells += [str(v) for v in matrix.values[row]]
        cells += ["-" if v is None else repr(v) for v in norm.values[row]]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def write_report(report: TrainingReport, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps_report(report))


@dataclass
class ReportRow:
    config_name: str
    q: float
    raw: list
    norm: list


def read_report(path):
    """Parse a report file back into (instance_names, winner_name, rows)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    winner = None
    header = None
    rows = []
    for ln in lines:
        if ln.startswith("# winner\t"):
            winner = ln.split("\t", 1)[1]
            continue
        if ln.startswith("#"):
            continue
        parts = ln.split("\t")
        if header is None:
            header = parts
            continue
        count = (len(parts) - 2) // 2
        raw = [int(v) for v in parts[2:2 + count]]
        norm = [None if v == "-" else float(v) for v in parts[2 + count:]]
        rows.append(ReportRow(parts[0], float(parts[1]), raw, norm))
    if header is None:
        raise ValueError(f"{path}: not a training report")
    names = [h[len("raw:"):] for h in header if h.startswith("raw:")]
    return names, winner, rows
