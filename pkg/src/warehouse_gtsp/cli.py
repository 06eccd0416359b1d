"""Command-line front end: gen, testbed, solve, train, bench and verify."""

import argparse
import glob
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .cmcs import (
    Budget,
    ConfigFormatError,
    builtin_config,
    compute_budget,
    format_budget,
    read_config,
    run,
    write_config,
)
from .components import ComponentKind, apply_component
from .core import random_initial_solution, tour_cost, validate
from .gen import (
    GeneratorParams,
    GtsplibFormatError,
    MANIFEST_NAME,
    TestbedKind,
    generate,
    read_gtsplib,
    read_manifest,
    make_testbed_spec,
    write_gtsplib,
    write_testbed,
)
from .oracle import global_optimum, optimal_selection_for_order
from .trainer import (
    _evaluate_cell,
    default_workers,
    enumerate_meaningful,
    train,
    write_report,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_VERIFY = 5


def _resolve_config(label: str):
    config = builtin_config(label)
    if config is not None:
        return config
    if os.path.exists(label):
        return read_config(label)
    raise ValueError(f"unknown configuration {label!r}: not a builtin name or a file")


def _load_instances(directory: str) -> list:
    """Instances of a testbed directory, in manifest order when one exists."""
    manifest = os.path.join(directory, MANIFEST_NAME)
    if os.path.exists(manifest):
        rows = read_manifest(manifest)
        paths = [os.path.join(directory, row.name + ".gtsp") for row in rows]
    else:
        paths = sorted(glob.glob(os.path.join(directory, "*.gtsp")))
    if not paths:
        raise ValueError(f"no instances found in {directory!r}")
    return [read_gtsplib(path) for path in paths]


def _parse_budget(args, instance=None):
    given = [name for name in ("alpha", "time", "iters")
             if getattr(args, name, None) is not None]
    if len(given) != 1:
        raise ValueError("exactly one of --alpha, --time or --iters is required")
    if args.iters is not None:
        return Budget.iterations(args.iters)
    if args.time is not None:
        return Budget.wall_clock(args.time)
    return Budget.wall_clock(compute_budget(instance.n, instance.m, args.alpha))


def cmd_gen(args) -> int:
    instance = generate(GeneratorParams(args.n, args.m, args.seed))
    out = args.out or instance.name + ".gtsp"
    write_gtsplib(instance, out)
    print(f"wrote {out} ({instance.name}: n={instance.n} m={instance.m} seed={args.seed})")
    return EXIT_OK


def cmd_testbed(args) -> int:
    spec = make_testbed_spec(TestbedKind(args.kind), args.base_seed)
    manifest = write_testbed(spec, args.out_dir)
    print(f"wrote {len(spec.pairs)} instances to {args.out_dir} (manifest: {manifest})")
    return EXIT_OK


def _write_solution(instance, solution, dest) -> None:
    order = solution.cluster_order(0)
    lines = [
        f"NAME: {instance.name}",
        f"COST: {solution.cost}",
        "CLUSTER_ORDER: " + " ".join(str(c + 1) for c in order),
        "NODE_TOUR: " + " ".join(str(solution.chosen[c] + 1) for c in order),
    ]
    with open(dest, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_solve(args) -> int:
    instance = read_gtsplib(args.instance)
    config = _resolve_config(args.config)
    budget = _parse_budget(args, instance)
    rng = random.Random(args.seed)
    initial = random_initial_solution(instance, rng)
    result = run(config, instance, initial, budget, rng)
    print(f"{instance.name}: best cost {result.best_cost}")
    out = args.out
    if out is None:
        root, _ = os.path.splitext(args.instance)
        out = root + ".sol"
    _write_solution(instance, result.best_solution, out)
    print(f"solution written to {out}")
    return EXIT_OK


def cmd_train(args) -> int:
    instances = _load_instances(args.dir)
    budget = Budget.iterations(args.iters) if args.iters is not None else None
    if budget is None and args.alpha is None:
        raise ValueError("either --alpha or --iters is required")
    configs = enumerate_meaningful(k=args.k)
    report = train(instances, args.alpha, args.seed, configs=configs,
                   budget=budget, repeats=args.repeats, workers=args.workers)
    print(f"evaluated {len(configs)} configurations on {len(instances)} instances")
    print(f"winner: {report.winner.name} (q = {report.q[report.winner_index]:.6g})")
    if args.report:
        write_report(report, args.report)
        print(f"report written to {args.report}")
    if args.out:
        write_config(report.winner, args.out)
        print(f"winning configuration written to {args.out}")
    return EXIT_OK


@dataclass
class BenchRow:
    name: str
    n: int
    m: int
    budget: str
    best: int
    costs: list


def _bench_instance(job):
    instance, configs, alpha, seed, budget, repeats = job
    return [_evaluate_cell(config, instance, alpha, seed, budget, repeats)
            for config in configs]


def bench(instances, configs, alpha, seed, repeats=1, budget=None, jobs=1) -> list:
    """Benchmark the configurations; parallelism is across instances only,
    so per-run timing stays honest."""
    job_list = [(instance, configs, alpha, seed, budget, repeats)
                for instance in instances]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            all_costs = list(pool.map(_bench_instance, job_list))
    else:
        all_costs = [_bench_instance(job) for job in job_list]
    rows = []
    for instance, costs in zip(instances, all_costs):
        if budget is not None:
            shown = str(budget.limit)
        else:
            shown = format_budget(instance.n, instance.m, alpha)
        rows.append(BenchRow(instance.name, instance.n, instance.m,
                             shown, min(costs), costs))
    return rows


def write_bench_table(rows, config_names, dest) -> None:
    lines = ["\t".join(["name", "n", "m", "budget", "best"] + list(config_names))]
    for row in rows:
        lines.append("\t".join([row.name, str(row.n), str(row.m), row.budget,
                                str(row.best)] + [str(c) for c in row.costs]))
    with open(dest, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_bench_table(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    header = lines[0].split("\t")
    if header[:5] != ["name", "n", "m", "budget", "best"]:
        raise GtsplibFormatError(f"{path}: not a bench table")
    config_names = header[5:]
    rows = []
    for ln in lines[1:]:
        parts = ln.split("\t")
        rows.append(BenchRow(parts[0], int(parts[1]), int(parts[2]), parts[3],
                             int(parts[4]), [int(c) for c in parts[5:]]))
    return config_names, rows


def _print_bench(rows, config_names) -> None:
    width = max(len(name) for name in config_names) + 2
    print("name".ljust(12) + "budget".rjust(8) + "best".rjust(8)
          + "".join(name.rjust(width) for name in config_names))
    wins = [0] * len(config_names)
    for row in rows:
        cells = []
        for i, cost in enumerate(row.costs):
            mark = "*" if cost == row.best else ""
            cells.append((str(cost) + mark).rjust(width))
            if cost == row.best:
                wins[i] += 1
        print(row.name.ljust(12) + row.budget.rjust(8)
              + str(row.best).rjust(8) + "".join(cells))
    summary = ", ".join(f"{name}: {w}/{len(rows)}"
                        for name, w in zip(config_names, wins))
    print(f"best-cost finishes: {summary}")


def cmd_bench(args) -> int:
    instances = _load_instances(args.dir)
    configs = [_resolve_config(label.strip())
               for label in args.configs.split(",") if label.strip()]
    if not configs:
        raise ValueError("no configurations given")
    names = [config.name or f"config{i}" for i, config in enumerate(configs)]
    if len(set(names)) != len(names):
        raise ValueError("configuration names must be unique")
    budget = Budget.iterations(args.iters) if args.iters is not None else None
    if budget is None and args.alpha is None:
        raise ValueError("either --alpha or --iters is required")
    jobs = 1 if args.serial else (args.jobs or default_workers())
    rows = bench(instances, configs, args.alpha, args.seed,
                 repeats=args.repeats, budget=budget, jobs=jobs)
    _print_bench(rows, names)
    if args.out:
        write_bench_table(rows, names, args.out)
        print(f"table written to {args.out}")
    return EXIT_OK


def _random_solution(instance, rng):
    """Random order and random vertex choices; used by the checks."""
    from .core import solution_from_order

    order = list(range(instance.m))
    rng.shuffle(order)
    chosen = [members[rng.randrange(len(members))] for members in instance.clusters]
    return solution_from_order(instance, order, chosen)


def _verification_checks(seed: int, trials: int) -> list:
    from .cmcs import conf2
    from .core import NoOpMoveError, relocate_delta, apply_relocate

    rng = random.Random(seed)
    results = []

    def tiny_instance():
        n = rng.randrange(8, 13)
        m = rng.randrange(4, 7)
        return generate(GeneratorParams(n, m, rng.randrange(10 ** 9)))

    # 1: CO against exhaustive selection for the same order
    bad = 0
    for _ in range(25):
        instance = tiny_instance()
        sol = random_initial_solution(instance, rng)
        expect, _ = optimal_selection_for_order(instance, sol.cluster_order(0))
        apply_component(ComponentKind.CO, instance, sol, rng)
        if sol.cost != expect or validate(instance, sol):
            bad += 1
    results.append(("co-matches-exhaustive", bad == 0, f"{bad} mismatches of 25"))

    # 2: move deltas against full recomputation
    bad = 0
    for _ in range(max(trials, 100)):
        instance = tiny_instance()
        sol = _random_solution(instance, rng)
        before = tour_cost(instance, sol)
        c = rng.randrange(instance.m)
        after = rng.randrange(instance.m)
        try:
            delta = relocate_delta(instance, sol, c, after)
        except (NoOpMoveError, ValueError):
            continue
        apply_relocate(instance, sol, c, after, delta)
        if tour_cost(instance, sol) - before != delta or validate(instance, sol):
            bad += 1
    results.append(("delta-matches-recompute", bad == 0, f"{bad} mismatches"))

    # 3: rectilinear tours on the integer grid always have even length
    odd = 0
    for _ in range(max(trials, 100)):
        instance = tiny_instance()
        sol = _random_solution(instance, rng)
        if sol.cost % 2:
            odd += 1
    for _ in range(5):
        instance = tiny_instance()
        cost, _ = global_optimum(instance)
        if cost % 2:
            odd += 1
    results.append(("tour-parity", odd == 0, f"{odd} odd tour costs"))

    # 4: IHC never increases the cost
    instance = generate(GeneratorParams(40, 10, rng.randrange(10 ** 9)))
    sol = random_initial_solution(instance, rng)
    bad = 0
    for _ in range(20000):
        before = sol.cost
        apply_component(ComponentKind.IHC, instance, sol, rng)
        if sol.cost > before:
            bad += 1
    results.append(("ihc-monotone", bad == 0 and not validate(instance, sol),
                    f"{bad} increases over 20000 applications"))

    # 5: long mixed component sequences keep solutions valid
    instance = generate(GeneratorParams(20, 6, rng.randrange(10 ** 9)))
    sol = random_initial_solution(instance, rng)
    kinds = list(ComponentKind)
    bad = 0
    for i in range(5000):
        apply_component(kinds[rng.randrange(4)], instance, sol, rng)
        if i % 250 == 0 and validate(instance, sol):
            bad += 1
    bad += 1 if validate(instance, sol) else 0
    results.append(("mixed-ops-validity", bad == 0, f"{bad} invalid states"))

    # 6: the chain finds desk-scale global optima
    hits = 0
    for k in range(3):
        instance = generate(GeneratorParams(12, 6, 7000 + k))
        optimum, _ = global_optimum(instance)
        init = random_initial_solution(instance, random.Random(k))
        result = run(conf2(), instance, init, Budget.iterations(30000),
                     random.Random(k + 100))
        if result.best_cost == optimum:
            hits += 1
    results.append(("cmcs-reaches-optimum", hits >= 2, f"{hits}/3 optima found"))
    return results


def _instance_checks(path: str, seed: int, trials: int) -> list:
    from .core import NoOpMoveError, relocate_delta, apply_relocate

    instance = read_gtsplib(path)
    rng = random.Random(seed)
    results = []

    bad = 0
    for _ in range(max(trials, 100)):
        sol = _random_solution(instance, rng)
        before = tour_cost(instance, sol)
        c = rng.randrange(instance.m)
        after = rng.randrange(instance.m)
        try:
            delta = relocate_delta(instance, sol, c, after)
        except (NoOpMoveError, ValueError):
            continue
        apply_relocate(instance, sol, c, after, delta)
        if tour_cost(instance, sol) - before != delta or validate(instance, sol):
            bad += 1
    results.append(("delta-matches-recompute", bad == 0, f"{bad} mismatches"))

    if instance.edge_weight_type == "MAN_2D":
        odd = sum(_random_solution(instance, rng).cost % 2
                  for _ in range(max(trials, 100)))
        results.append(("tour-parity", odd == 0, f"{odd} odd tour costs"))

    sol = _random_solution(instance, rng)
    before = sol.cost
    apply_component(ComponentKind.CO, instance, sol, rng)
    ok = sol.cost <= before and not validate(instance, sol)
    results.append(("co-never-worsens", ok, f"cost {before} -> {sol.cost}"))
    return results


def cmd_verify(args) -> int:
    if args.instance:
        results = _instance_checks(args.instance, args.seed, args.trials)
    else:
        results = _verification_checks(args.seed, args.trials)
    failed = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            failed += 1
    if failed:
        print(f"{failed} of {len(results)} checks failed")
        return EXIT_VERIFY
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgtsp",
        description="GTSP toolkit for warehouse order picking: generate "
                    "instances, run the Markov-chain search, train "
                    "configurations and benchmark them.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate one instance")
    p.add_argument("--n", type=int, required=True, help="number of nodes")
    p.add_argument("--m", type=int, required=True, help="number of clusters")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default: <name>.gtsp)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("testbed", help="generate a 30-instance testbed")
    p.add_argument("--kind", choices=[k.value for k in TestbedKind], required=True)
    p.add_argument("--base-seed", type=int, default=None,
                   help="seed of the first instance (defaults per kind)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_testbed)

    p = sub.add_parser("solve", help="run one configuration on one instance")
    p.add_argument("instance")
    p.add_argument("--config", default="conf2",
                   help="builtin name (conf1, conf2) or a configuration file")
    p.add_argument("--alpha", type=float, help="wall-clock budget alpha*n*m seconds")
    p.add_argument("--time", type=float, help="wall-clock budget in seconds")
    p.add_argument("--iters", type=int, help="iteration budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="solution path (default: <instance>.sol)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("train", help="train a configuration on a directory of instances")
    p.add_argument("dir")
    p.add_argument("--alpha", type=float)
    p.add_argument("--iters", type=int, help="iteration budget per run instead of alpha")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (default: physical cores)")
    p.add_argument("--k", type=int, default=3, help="components per configuration")
    p.add_argument("--report", help="write the full evaluation report here")
    p.add_argument("--out", help="write the winning configuration here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="compare configurations on a testbed directory")
    p.add_argument("dir")
    p.add_argument("--configs", default="conf1,conf2",
                   help="comma-separated builtin names or files")
    p.add_argument("--alpha", type=float)
    p.add_argument("--iters", type=int, help="iteration budget per run instead of alpha")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3,
                   help="runs per cell; the best cost counts")
    p.add_argument("--jobs", type=int, default=None,
                   help="parallel instances (default: physical cores)")
    p.add_argument("--serial", action="store_true", help="force sequential timed runs")
    p.add_argument("--out", help="write the result table here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the self-check battery")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--instance", help="check against one instance file")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (GtsplibFormatError, ConfigFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
