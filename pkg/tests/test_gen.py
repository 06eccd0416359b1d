import io
import math

import pytest

from warehouse_gtsp.gen import (
    GeneratorParams,
    GtsplibFormatError,
    LARGE_PAIRS,
    MEDIUM_PAIRS,
    TestbedKind,
    build_testbed,
    dumps_gtsplib,
    generate,
    loads_gtsplib,
    read_gtsplib,
    read_manifest,
    make_testbed_spec,
    write_gtsplib,
    write_testbed,
)


def test_params_rejected():
    with pytest.raises(ValueError):
        GeneratorParams(10, 2, 0)
    with pytest.raises(ValueError):
        GeneratorParams(4, 5, 0)


def test_generate_all_singletons():
    inst = generate(GeneratorParams(30, 30, 1))
    assert inst.n == 30 and inst.m == 30
    assert all(len(members) == 1 for members in inst.clusters)


def test_generate_cluster_sizes_partition():
    inst = generate(GeneratorParams(150, 30, 2))
    sizes = [len(members) for members in inst.clusters]
    assert all(size >= 1 for size in sizes)
    assert sum(sizes) == 150
    seen = sorted(v for members in inst.clusters for v in members)
    assert seen == list(range(150))


def test_generate_coords_in_grid():
    for seed in range(5):
        inst = generate(GeneratorParams(60, 12, seed))
        for p in inst.coords:
            assert 0 <= p.x <= 200 and 0 <= p.y <= 200


def test_generate_deterministic_bytes():
    a = dumps_gtsplib(generate(GeneratorParams(80, 16, 9)))
    b = dumps_gtsplib(generate(GeneratorParams(80, 16, 9)))
    assert a == b


def test_generate_name_and_comment():
    inst = generate(GeneratorParams(150, 30, 77))
    assert inst.name == "150wop30"
    assert "77" in inst.comment


def test_coordinate_uniformity_chisquare():
    # pool 1e5 coordinate draws over 201 cells; generous 5-sigma-ish bound
    counts = [0] * 201
    draws = 0
    for seed in range(250):
        inst = generate(GeneratorParams(200, 40, 10_000 + seed))
        for p in inst.coords:
            counts[p.x] += 1
            counts[p.y] += 1
            draws += 2
    assert draws == 100_000
    expected = draws / 201
    chi2 = sum((c - expected) ** 2 / expected for c in counts)
    # 200 degrees of freedom: mean 200, sd = sqrt(400) = 20
    assert chi2 < 200 + 6 * math.sqrt(2 * 200)


def test_dumps_header_layout():
    inst = generate(GeneratorParams(150, 30, 1000))
    lines = dumps_gtsplib(inst).splitlines()
    assert lines[0] == "NAME: 150wop30"
    assert lines[1] == "TYPE: GTSP"
    assert lines[2].startswith("COMMENT: ")
    assert lines[3] == "DIMENSION: 150"
    assert lines[4] == "GTSP_SETS: 30"
    assert lines[5] == "EDGE_WEIGHT_TYPE: MAN_2D"
    assert lines[6] == "NODE_COORD_SECTION"
    assert lines[-1] == "EOF"


def test_dumps_singleton_set_line():
    inst = generate(GeneratorParams(5, 5, 3))
    text = dumps_gtsplib(inst)
    assert "\n1 1 -1\n" in text
    assert "\n5 5 -1\n" in text


def test_round_trip_preserves_everything():
    inst = generate(GeneratorParams(40, 8, 5))
    back = loads_gtsplib(dumps_gtsplib(inst))
    assert back.name == inst.name
    assert back.comment == inst.comment
    assert back.coords == inst.coords
    assert back.clusters == inst.clusters
    assert back.dist == inst.dist
    assert back.edge_weight_type == "MAN_2D"


def test_write_read_write_byte_stable_file(tmp_path):
    inst = generate(GeneratorParams(40, 8, 6))
    path = tmp_path / "a.gtsp"
    write_gtsplib(inst, str(path))
    text1 = path.read_text()
    write_gtsplib(read_gtsplib(str(path)), str(path))
    assert path.read_text() == text1


def test_read_accepts_file_object():
    inst = generate(GeneratorParams(12, 4, 1))
    back = read_gtsplib(io.StringIO(dumps_gtsplib(inst)))
    assert back.dist == inst.dist


def test_read_wrapped_set_section():
    text = (
        "NAME: wrap\nTYPE: GTSP\nDIMENSION: 4\nGTSP_SETS: 3\n"
        "EDGE_WEIGHT_TYPE: MAN_2D\nNODE_COORD_SECTION\n"
        "1 0 0\n2 1 0\n3 2 0\n4 3 0\n"
        "GTSP_SET_SECTION\n1 1\n2\n-1\n2 3 -1\n3 4 -1\nEOF\n"
    )
    inst = loads_gtsplib(text)
    assert inst.clusters == [[0, 1], [2], [3]]


def test_read_tolerates_header_spacing():
    text = (
        "NAME : padded\nTYPE: GTSP\nDIMENSION:4\nGTSP_SETS: 4\n"
        "EDGE_WEIGHT_TYPE:  MAN_2D\nNODE_COORD_SECTION\n"
        "1 0 0\n2 1 0\n3 2 0\n4 3 0\n"
        "GTSP_SET_SECTION\n1 1 -1\n2 2 -1\n3 3 -1\n4 4 -1\nEOF\n"
    )
    inst = loads_gtsplib(text)
    assert inst.name == "padded" and inst.n == 4


def test_read_euc2d():
    text = (
        "NAME: euc\nTYPE: GTSP\nDIMENSION: 3\nGTSP_SETS: 3\n"
        "EDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n"
        "1 0 0\n2 3 4\n3 0 10\n"
        "GTSP_SET_SECTION\n1 1 -1\n2 2 -1\n3 3 -1\nEOF\n"
    )
    inst = loads_gtsplib(text)
    assert inst.dist[0][1] == 5
    assert inst.dist[1][2] == round(math.hypot(3, 6))
    assert inst.edge_weight_type == "EUC_2D"


def test_read_explicit_full_matrix():
    text = (
        "NAME: exp\nTYPE: GTSP\nDIMENSION: 3\nGTSP_SETS: 3\n"
        "EDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n"
        "EDGE_WEIGHT_SECTION\n0 2 4\n2 0 6\n4 6 0\n"
        "GTSP_SET_SECTION\n1 1 -1\n2 2 -1\n3 3 -1\nEOF\n"
    )
    inst = loads_gtsplib(text)
    assert inst.coords is None
    assert inst.dist == [[0, 2, 4], [2, 0, 6], [4, 6, 0]]
    # and the explicit dialect round-trips byte-stably too
    assert dumps_gtsplib(loads_gtsplib(dumps_gtsplib(inst))) == dumps_gtsplib(inst)


@pytest.mark.parametrize("mutation,needle", [
    (lambda t: t.replace("TYPE: GTSP", "TYPE: TSP"), "unsupported TYPE"),
    (lambda t: t.replace("DIMENSION: 4", "DIMENSION: five"), "not an integer"),
    (lambda t: t.replace("DIMENSION: 4", "DIMENSION: 5"), "NODE_COORD_SECTION has"),
    (lambda t: t.replace("EDGE_WEIGHT_TYPE: MAN_2D", "EDGE_WEIGHT_TYPE: CEIL_2D"),
     "unknown edge weight type"),
    (lambda t: t.replace("\n2 2 -1", "\n2 1 -1"), "appears in"),
    (lambda t: t.replace("\n4 4 -1", ""), "defines 3 sets"),
    (lambda t: t.replace("4 4 -1", "4 4"), "terminator"),
    (lambda t: t.replace("NAME: base\n", ""), ""),  # headerless name is fine
])
def test_read_diagnostics(mutation, needle):
    base = (
        "NAME: base\nTYPE: GTSP\nDIMENSION: 4\nGTSP_SETS: 4\n"
        "EDGE_WEIGHT_TYPE: MAN_2D\nNODE_COORD_SECTION\n"
        "1 0 0\n2 1 0\n3 2 0\n4 3 0\n"
        "GTSP_SET_SECTION\n1 1 -1\n2 2 -1\n3 3 -1\n4 4 -1\nEOF\n"
    )
    text = mutation(base)
    if needle == "":
        loads_gtsplib(text)
        return
    with pytest.raises(GtsplibFormatError) as err:
        loads_gtsplib(text)
    assert needle in str(err.value)


def test_read_missing_headers():
    with pytest.raises(GtsplibFormatError):
        loads_gtsplib("TYPE: GTSP\nEOF\n")
    with pytest.raises(GtsplibFormatError):
        loads_gtsplib("garbage without colon\n")


def test_testbed_pairs_are_fixed():
    assert len(MEDIUM_PAIRS) == 30 and len(LARGE_PAIRS) == 30
    assert MEDIUM_PAIRS[0] == (150, 30) and MEDIUM_PAIRS[-1] == (202, 44)
    assert LARGE_PAIRS[0] == (550, 105) and LARGE_PAIRS[-1] == (602, 119)
    # m grows every second row, n strictly increases
    for pairs in (MEDIUM_PAIRS, LARGE_PAIRS):
        assert all(pairs[i][0] < pairs[i + 1][0] for i in range(29))


def test_build_testbed_names_and_seeds():
    spec = make_testbed_spec(TestbedKind.MEDIUM)
    instances = build_testbed(spec)
    assert [i.name for i in instances][:3] == ["150wop30", "151wop30", "153wop31"]
    assert len(instances) == 30
    again = build_testbed(spec)
    assert dumps_gtsplib(instances[7]) == dumps_gtsplib(again[7])


def test_write_testbed_manifest(tmp_path):
    spec = make_testbed_spec(TestbedKind.MEDIUM, base_seed=50)
    manifest = write_testbed(spec, str(tmp_path))
    rows = read_manifest(manifest)
    assert len(rows) == 30
    assert rows[0].name == "150wop30" and rows[0].seed == 50
    assert rows[29].name == "202wop44" and rows[29].seed == 79
    inst = read_gtsplib(str(tmp_path / "150wop30.gtsp"))
    assert inst.n == 150 and inst.m == 30


def test_read_manifest_rejects_garbage(tmp_path):
    path = tmp_path / "manifest.tsv"
    path.write_text("not\ta\tmanifest\n")
    with pytest.raises(GtsplibFormatError):
        read_manifest(str(path))
