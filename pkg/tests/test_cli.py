import os
import subprocess
import sys

import pytest

from warehouse_gtsp.cli import (
    EXIT_FORMAT,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    main,
    read_bench_table,
)
from warehouse_gtsp.cmcs import conf1, format_budget, read_config
from warehouse_gtsp.gen import read_gtsplib, read_manifest
from warehouse_gtsp.trainer import read_report


def _gen(tmp_path, n=12, m=4, seed=5, name="a.gtsp"):
    path = str(tmp_path / name)
    assert main(["gen", "--n", str(n), "--m", str(m), "--seed", str(seed),
                 "--out", path]) == EXIT_OK
    return path


def test_gen_writes_readable_instance(tmp_path, capsys):
    path = _gen(tmp_path)
    out = capsys.readouterr().out
    assert "12wop4" in out
    inst = read_gtsplib(path)
    assert inst.n == 12 and inst.m == 4


def test_gen_rejects_bad_params(tmp_path):
    assert main(["gen", "--n", "5", "--m", "9",
                 "--out", str(tmp_path / "x.gtsp")]) == EXIT_USAGE


def test_usage_errors_exit_2():
    assert main(["gen", "--n", "10"]) == EXIT_USAGE
    assert main(["no-such-command"]) == EXIT_USAGE


def test_help_exits_zero():
    assert main(["--help"]) == EXIT_OK


def test_missing_file_exits_3(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "absent.gtsp"), "--iters", "5"]) == EXIT_IO
    assert "error" in capsys.readouterr().err


def test_malformed_instance_exits_4(tmp_path, capsys):
    path = tmp_path / "bad.gtsp"
    path.write_text("NAME: bad\nTYPE: GTSP\nDIMENSION: 2\nEOF\n")
    assert main(["solve", str(path), "--iters", "5"]) == EXIT_FORMAT
    assert "error" in capsys.readouterr().err


def test_solve_deterministic_under_iteration_budget(tmp_path, capsys):
    path = _gen(tmp_path)
    capsys.readouterr()
    sol_path = str(tmp_path / "a.sol")
    args = ["solve", path, "--config", "conf1", "--iters", "4000",
            "--seed", "3", "--out", sol_path]
    assert main(args) == EXIT_OK
    first_out = capsys.readouterr().out
    first_sol = open(sol_path).read()
    assert main(args) == EXIT_OK
    assert capsys.readouterr().out == first_out
    assert open(sol_path).read() == first_sol


def test_solve_requires_exactly_one_budget(tmp_path):
    path = _gen(tmp_path)
    assert main(["solve", path]) == EXIT_USAGE
    assert main(["solve", path, "--iters", "5", "--time", "0.1"]) == EXIT_USAGE


def test_solution_file_contents(tmp_path, capsys):
    path = _gen(tmp_path, n=15, m=5, seed=9, name="b.gtsp")
    sol_path = str(tmp_path / "b.sol")
    assert main(["solve", path, "--iters", "3000", "--seed", "1",
                 "--out", sol_path]) == EXIT_OK
    out = capsys.readouterr().out
    lines = open(sol_path).read().splitlines()
    assert lines[0] == "NAME: 15wop5"
    cost = int(lines[1].split()[-1])
    assert f"best cost {cost}" in out
    order = [int(x) for x in lines[2].split()[1:]]
    tour = [int(x) for x in lines[3].split()[1:]]
    assert sorted(order) == [1, 2, 3, 4, 5]
    assert len(tour) == 5
    inst = read_gtsplib(path)
    # 1-based node of 1-based cluster k must belong to cluster k-1
    for k, v in zip(order, tour):
        assert inst.cluster_of[v - 1] == k - 1
    # rebuilt tour matches the reported cost
    from warehouse_gtsp.core import solution_from_order

    chosen = [0] * inst.m
    for k, v in zip(order, tour):
        chosen[k - 1] = v - 1
    rebuilt = solution_from_order(inst, [k - 1 for k in order], chosen)
    assert rebuilt.cost == cost


def test_solve_default_solution_path(tmp_path, capsys):
    path = _gen(tmp_path, name="c.gtsp")
    assert main(["solve", path, "--iters", "50"]) == EXIT_OK
    assert os.path.exists(str(tmp_path / "c.sol"))


def test_solve_accepts_config_file(tmp_path, capsys):
    path = _gen(tmp_path)
    cfg = str(tmp_path / "mine.cfg")
    from warehouse_gtsp.cmcs import write_config

    write_config(conf1(), cfg)
    assert main(["solve", path, "--config", cfg, "--iters", "100"]) == EXIT_OK


def test_solve_unknown_config(tmp_path, capsys):
    path = _gen(tmp_path)
    assert main(["solve", path, "--config", "confX", "--iters", "5"]) == EXIT_USAGE


def test_testbed_writes_manifest_and_instances(tmp_path, capsys):
    out_dir = str(tmp_path / "bed")
    assert main(["testbed", "--kind", "medium", "--out-dir", out_dir]) == EXIT_OK
    rows = read_manifest(os.path.join(out_dir, "manifest.tsv"))
    assert len(rows) == 30
    assert rows[0] == type(rows[0])("150wop30", 150, 30, 1000)
    files = [f for f in os.listdir(out_dir) if f.endswith(".gtsp")]
    assert len(files) == 30


@pytest.mark.filterwarnings("ignore:instance .* flat")
def test_train_tiny_directory(tmp_path, capsys):
    bed = tmp_path / "bed"
    bed.mkdir()
    _gen(bed, n=10, m=4, seed=0, name="t0.gtsp")
    _gen(bed, n=10, m=4, seed=1, name="t1.gtsp")
    report_path = str(tmp_path / "report.tsv")
    cfg_path = str(tmp_path / "winner.cfg")
    capsys.readouterr()
    code = main(["train", str(bed), "--iters", "3", "--seed", "2",
                 "--workers", "1", "--report", report_path, "--out", cfg_path])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "winner:" in out
    names, winner, rows = read_report(report_path)
    assert names == ["10wop4", "10wop4"]
    assert len(rows) == 5184
    config = read_config(cfg_path)
    assert config.violations() == []
    assert config.name == winner


def test_train_requires_budget(tmp_path):
    bed = tmp_path / "bed"
    bed.mkdir()
    _gen(bed, name="t.gtsp")
    assert main(["train", str(bed)]) == EXIT_USAGE


def test_bench_round_trip(tmp_path, capsys):
    bed = tmp_path / "bed"
    bed.mkdir()
    _gen(bed, n=12, m=4, seed=3, name="x.gtsp")
    _gen(bed, n=14, m=5, seed=4, name="y.gtsp")
    table = str(tmp_path / "table.tsv")
    capsys.readouterr()
    code = main(["bench", str(bed), "--configs", "conf1,conf2",
                 "--alpha", "1e-5", "--repeats", "2", "--seed", "1",
                 "--serial", "--out", table])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "best-cost finishes" in out
    names, rows = read_bench_table(table)
    assert names == ["Conf1", "Conf2"]
    assert len(rows) == 2
    assert rows[0].budget == format_budget(12, 4, 1e-5)
    for row in rows:
        assert row.best == min(row.costs)
        assert row.best % 2 == 0


def test_bench_iteration_budget(tmp_path, capsys):
    bed = tmp_path / "bed"
    bed.mkdir()
    _gen(bed, n=12, m=4, seed=3, name="x.gtsp")
    code = main(["bench", str(bed), "--iters", "200", "--repeats", "1",
                 "--serial"])
    assert code == EXIT_OK


def test_verify_passes(capsys):
    assert main(["verify", "--trials", "200"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("PASS") >= 6 and "FAIL" not in out


def test_verify_instance_mode(tmp_path, capsys):
    path = _gen(tmp_path, n=20, m=6, seed=8)
    assert main(["verify", "--instance", path, "--trials", "100"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "tour-parity" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "warehouse_gtsp", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "wgtsp" in proc.stdout


def test_console_script_runs():
    proc = subprocess.run(["wgtsp", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
