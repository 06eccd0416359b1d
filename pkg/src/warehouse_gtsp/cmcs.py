"""Conditional Markov chain control over a pool of search components.

A configuration fixes an ordered component list, a start index and two
successor tables: one consulted after an improving application, one after a
non-improving application.  ``run`` walks that chain under a wall-clock or
iteration budget, lets every component mutate the single working solution
in place, and remembers the best tour encountered.
"""

import math
import random
import time
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Optional, Union

from .components import ComponentKind, _COMPONENT_FUNCS
from .core import Instance, Solution, validate


class BudgetMode(Enum):
    WALL_CLOCK = "wall_clock"
    ITERATIONS = "iterations"


@dataclass(frozen=True)
class Budget:
    """Termination rule for a run: seconds of wall-clock time or a fixed
    number of component applications."""

    mode: BudgetMode
    limit: Union[int, float]

    @classmethod
    def wall_clock(cls, seconds: float) -> "Budget":
        if not seconds > 0:
            raise ValueError(f"wall-clock budget must be positive, got {seconds}")
        return cls(BudgetMode.WALL_CLOCK, float(seconds))

    @classmethod
    def iterations(cls, count: int) -> "Budget":
        if count < 0 or count != int(count):
            raise ValueError(f"iteration budget must be a non-negative integer, got {count}")
        return cls(BudgetMode.ITERATIONS, int(count))


def compute_budget(n: int, m: int, alpha: float) -> float:
    """Per-run wall-clock budget in seconds: alpha * n * m."""
    if n <= 0 or m <= 0:
        raise ValueError("n and m must be positive")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return alpha * n * m


def format_budget(n: int, m: int, alpha: float) -> str:
    """The budget rendered to four decimals, half-up on exact midpoints.

    Uses the decimal literal of ``alpha`` so the result does not wobble
    with binary float representation.
    """
    value = Decimal(n * m) * Decimal(str(alpha))
    return str(value.quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP))


# a successor table entry: the next component's index, or a probability
# tuple over all component indices
SuccessorEntry = Union[int, tuple]


@dataclass(frozen=True)
class Configuration:
    """A CMCS machine: components plus the two successor tables.

    ``succ_improved[i]`` and ``succ_unimproved[i]`` give the follower of
    component i after an improving / non-improving application.  Entries
    are indices for the deterministic machines used throughout; probability
    tuples over the component list are also accepted by ``run``.  Equality
    and hashing ignore ``name``.
    """

    components: tuple
    start: int
    succ_improved: tuple
    succ_unimproved: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "succ_improved",
                           tuple(tuple(e) if isinstance(e, (list, tuple)) else e
                                 for e in self.succ_improved))
        object.__setattr__(self, "succ_unimproved",
                           tuple(tuple(e) if isinstance(e, (list, tuple)) else e
                                 for e in self.succ_unimproved))

    def violations(self) -> list:
        """Return every structural problem found (empty when valid)."""
        problems = []
        k = len(self.components)
        if k == 0:
            return ["component list is empty"]
        for comp in self.components:
            if not isinstance(comp, ComponentKind):
                problems.append(f"not a component kind: {comp!r}")
        if len(set(self.components)) != k:
            problems.append("duplicate component in list")
        if not 0 <= self.start < k:
            problems.append(f"start index {self.start} out of range")
        for label, table in (("improved", self.succ_improved),
                             ("unimproved", self.succ_unimproved)):
            if len(table) != k:
                problems.append(f"{label} table has {len(table)} rows, expected {k}")
                continue
            for i, entry in enumerate(table):
                if isinstance(entry, int):
                    if not 0 <= entry < k:
                        problems.append(f"{label}[{i}] = {entry} out of range")
                elif isinstance(entry, tuple):
                    if len(entry) != k:
                        problems.append(f"{label}[{i}] distribution has {len(entry)} weights, expected {k}")
                    elif any(w < 0 for w in entry) or not math.isclose(sum(entry), 1.0, abs_tol=1e-9):
                        problems.append(f"{label}[{i}] weights must be non-negative and sum to 1")
                else:
                    problems.append(f"{label}[{i}] is neither an index nor a distribution")
        return problems

    def check(self) -> "Configuration":
        problems = self.violations()
        if problems:
            raise ValueError("invalid configuration: " + "; ".join(problems))
        return self

    @property
    def is_deterministic(self) -> bool:
        return all(isinstance(e, int)
                   for e in self.succ_improved + self.succ_unimproved)

    def reachable(self) -> set:
        """Component indices reachable from the start over either table."""
        seen = {self.start}
        stack = [self.start]
        while stack:
            i = stack.pop()
            for table in (self.succ_improved, self.succ_unimproved):
                entry = table[i]
                targets = [entry] if isinstance(entry, int) else \
                    [j for j, w in enumerate(entry) if w > 0]
                for j in targets:
                    if j not in seen:
                        seen.add(j)
                        stack.append(j)
        return seen


def conf1() -> Configuration:
    """Machine trained on the medium-sized testbed.

    CO -> IHC on both outcomes; IHC -> CO when improving, else VM;
    VM -> IHC when improving, else CO.
    """
    return Configuration(
        components=(ComponentKind.CO, ComponentKind.IHC, ComponentKind.VM),
        start=0,
        succ_improved=(1, 0, 1),
        succ_unimproved=(1, 2, 0),
        name="Conf1",
    )


def conf2() -> Configuration:
    """Machine trained on the large testbed.

    Identical to Conf1 except VM's successors are swapped: VM -> CO when
    improving, else back to IHC.
    """
    return Configuration(
        components=(ComponentKind.CO, ComponentKind.IHC, ComponentKind.VM),
        start=0,
        succ_improved=(1, 0, 0),
        succ_unimproved=(1, 2, 1),
        name="Conf2",
    )


@dataclass
class RunResult:
    best_cost: int
    best_solution: Solution
    iterations: int
    improvements: int
    elapsed: float


def _sample_successor(weights: tuple, rng: random.Random) -> int:
    r = rng.random()
    acc = 0.0
    for j, w in enumerate(weights):
        acc += w
        if r < acc:
            return j
    return len(weights) - 1


def run(config: Configuration, instance: Instance, initial: Solution,
        budget: Budget, rng: random.Random, trace: Optional[list] = None) -> RunResult:
    """Execute the chain on a private copy of ``initial``.

    Every component application is accepted into the working solution; the
    best cost seen is tracked separately and returned with a copy of the
    corresponding tour.  With an iteration budget and a fixed seed the run
    is bit-reproducible.  A wall-clock budget is checked before every
    application, so it overshoots by at most one component call.

    ``trace``, when given, receives one ``(component_index, improved)``
    pair per application.
    """
    config.check()
    problems = validate(instance, initial)
    if problems:
        raise ValueError("invalid initial solution: " + "; ".join(problems))
    work = initial.clone()
    funcs = [_COMPONENT_FUNCS[kind] for kind in config.components]
    si = config.succ_improved
    su = config.succ_unimproved
    clock = time.perf_counter
    if budget.mode is BudgetMode.ITERATIONS:
        max_iters = budget.limit
        deadline = math.inf
    else:
        max_iters = math.inf
        deadline = clock() + budget.limit
    best = work.clone()
    best_cost = work.cost
    iters = 0
    improvements = 0
    cur = config.start
    t0 = clock()
    while iters < max_iters and clock() < deadline:
        improved = funcs[cur](instance, work, rng).improved
        iters += 1
        if trace is not None:
            trace.append((cur, improved))
        if improved:
            improvements += 1
            # only an improving application can produce a new overall best
            if work.cost < best_cost:
                best_cost = work.cost
                best = work.clone()
        entry = si[cur] if improved else su[cur]
        cur = entry if type(entry) is int else _sample_successor(entry, rng)
    return RunResult(best_cost, best, iters, improvements, clock() - t0)


class ConfigFormatError(ValueError):
    """Raised for unparsable or inconsistent configuration text."""


def dumps_config(config: Configuration) -> str:
    """Serialize a deterministic configuration to its text form.

    One ``start`` line plus one line per component naming its improved and
    unimproved successors.  An optional leading ``name`` line carries the
    display name.
    """
    config.check()
    if not config.is_deterministic:
        raise ValueError("only deterministic configurations can be serialized")
    names = [kind.value for kind in config.components]
    lines = []
    if config.name:
        lines.append(f"name {config.name}")
    lines.append(f"start {names[config.start]}")
    for i, comp in enumerate(names):
        lines.append(f"{comp} {names[config.succ_improved[i]]} {names[config.succ_unimproved[i]]}")
    return "\n".join(lines) + "\n"


def loads_config(text: str) -> Configuration:
    """Parse the text form produced by dumps_config."""
    name = ""
    start_name = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "name":
            if len(parts) != 2:
                raise ConfigFormatError(f"line {lineno}: name takes one word")
            name = parts[1]
        elif parts[0] == "start":
            if len(parts) != 2:
                raise ConfigFormatError(f"line {lineno}: start takes one component")
            if start_name is not None:
                raise ConfigFormatError(f"line {lineno}: duplicate start line")
            start_name = parts[1]
        else:
            if len(parts) != 3:
                raise ConfigFormatError(
                    f"line {lineno}: expected 'COMPONENT improved unimproved', got {raw!r}")
            rows.append((lineno, parts[0], parts[1], parts[2]))
    if start_name is None:
        raise ConfigFormatError("missing start line")
    if not rows:
        raise ConfigFormatError("no component rows")
    kinds = []
    for lineno, comp, _, _ in rows:
        try:
            kind = ComponentKind(comp)
        except ValueError:
            raise ConfigFormatError(f"line {lineno}: unknown component {comp!r}") from None
        if kind in kinds:
            raise ConfigFormatError(f"line {lineno}: duplicate row for {comp}")
        kinds.append(kind)
    index = {kind.value: i for i, kind in enumerate(kinds)}

    def resolve(lineno, label):
        if label not in index:
            raise ConfigFormatError(f"line {lineno}: successor {label!r} has no component row")
        return index[label]

    si = tuple(resolve(lineno, imp) for lineno, _, imp, _ in rows)
    su = tuple(resolve(lineno, unimp) for lineno, _, _, unimp in rows)
    if start_name not in index:
        raise ConfigFormatError(f"start component {start_name!r} has no component row")
    config = Configuration(tuple(kinds), index[start_name], si, su, name=name)
    problems = config.violations()
    if problems:
        raise ConfigFormatError("; ".join(problems))
    return config


def write_config(config: Configuration, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dumps_config(config))


def read_config(path) -> Configuration:
    with open(path, "r", encoding="ascii") as fh:
        return loads_config(fh.read())


def builtin_config(name: str) -> Optional[Configuration]:
    """Resolve 'conf1' / 'conf2' (case-insensitive) to the shipped machines."""
    return {"conf1": conf1, "conf2": conf2}.get(name.lower(), lambda: None)()
