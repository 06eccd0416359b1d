"""Instance generation and GTSPLIB-style text I/O.

Instances place n nodes uniformly on the integer grid [0, 200]^2 and
partition them into m clusters: node i seeds cluster i for i < m, every
further node joins a uniformly random cluster.  Distances are rectilinear.

The text format uses ``NAME`` / ``TYPE: GTSP`` / ``COMMENT`` /
``DIMENSION`` / ``GTSP_SETS`` / ``EDGE_WEIGHT_TYPE`` headers followed by
``NODE_COORD_SECTION`` (1-based ids) and ``GTSP_SET_SECTION`` (set id,
node ids, -1 terminator) and a closing ``EOF``.  Reading also accepts
``EUC_2D`` coordinates and ``EXPLICIT`` full matrices.
"""

import os
import random
from dataclasses import dataclass
from enum import Enum

from .core import GRID_MAX, Instance

MEDIUM_ALPHA = 1.8e-5
LARGE_ALPHA = 3.6e-6


class GtsplibFormatError(ValueError):
    """Raised for unparsable or internally inconsistent instance text."""


@dataclass(frozen=True)
class GeneratorParams:
    n: int
    m: int
    seed: int

    def __post_init__(self):
        if self.m < 3:
            raise ValueError(f"need at least 3 clusters, got {self.m}")
        if self.n < self.m:
            raise ValueError(f"need n >= m, got n={self.n} m={self.m}")


def generate(params: GeneratorParams) -> Instance:
    """Generate one instance; fully determined by (n, m, seed)."""
    rng = random.Random(params.seed)
    coords = [(rng.randint(0, GRID_MAX), rng.randint(0, GRID_MAX))
              for _ in range(params.n)]
    clusters = [[c] for c in range(params.m)]
    for v in range(params.m, params.n):
        clusters[rng.randrange(params.m)].append(v)
    name = f"{params.n}wop{params.m}"
    comment = f"pseudo-random order picking, seed {params.seed}"
    return Instance.from_coords(name, coords, clusters, comment=comment)


class TestbedKind(Enum):
    __test__ = False  # keep pytest collection away from the Test* name
    MEDIUM = "medium"
    LARGE = "large"


# one (n, m) row per instance of each testbed
MEDIUM_PAIRS = (
    (150, 30), (151, 30), (153, 31), (155, 31), (157, 32), (159, 32),
    (160, 33), (162, 33), (164, 34), (166, 34), (168, 35), (169, 35),
    (171, 36), (173, 36), (175, 37), (177, 37), (178, 38), (180, 38),
    (182, 39), (184, 39), (186, 40), (187, 40), (189, 41), (191, 41),
    (193, 42), (195, 42), (196, 43), (198, 43), (200, 44), (202, 44),
)
LARGE_PAIRS = (
    (550, 105), (551, 105), (553, 106), (555, 106), (557, 107), (559, 107),
    (560, 108), (562, 108), (564, 109), (566, 109), (568, 110), (569, 110),
    (571, 111), (573, 111), (575, 112), (577, 112), (578, 113), (580, 113),
    (582, 114), (584, 114), (586, 115), (587, 115), (589, 116), (591, 116),
    (593, 117), (595, 117), (596, 118), (598, 118), (600, 119), (602, 119),
)

DEFAULT_BASE_SEEDS = {TestbedKind.MEDIUM: 1000, TestbedKind.LARGE: 2000}


@dataclass(frozen=True)
class TestbedSpec:
    __test__ = False  # keep pytest collection away from the Test* name

    kind: TestbedKind
    pairs: tuple
    base_seed: int
    alpha: float


def make_testbed_spec(kind: TestbedKind, base_seed=None) -> TestbedSpec:
    """The 30-instance testbed of the given kind; instance k uses seed
    base_seed + k."""
    if base_seed is None:
        base_seed = DEFAULT_BASE_SEEDS[kind]
    if kind is TestbedKind.MEDIUM:
        return TestbedSpec(kind, MEDIUM_PAIRS, base_seed, MEDIUM_ALPHA)
    return TestbedSpec(kind, LARGE_PAIRS, base_seed, LARGE_ALPHA)


def build_testbed(spec: TestbedSpec) -> list:
    return [generate(GeneratorParams(n, m, spec.base_seed + k))
            for k, (n, m) in enumerate(spec.pairs)]


def dumps_gtsplib(instance: Instance) -> str:
    """Serialize an instance; writing, reading back and writing again is
    byte-identical."""
    lines = [f"NAME: {instance.name}", "TYPE: GTSP"]
    if instance.comment:
        lines.append(f"COMMENT: {instance.comment}")
    lines.append(f"DIMENSION: {instance.n}")
    lines.append(f"GTSP_SETS: {instance.m}")
    lines.append(f"EDGE_WEIGHT_TYPE: {instance.edge_weight_type}")
    if instance.edge_weight_type == "EXPLICIT":
        lines.append("EDGE_WEIGHT_FORMAT: FULL_MATRIX")
        lines.append("EDGE_WEIGHT_SECTION")
        for row in instance.dist:
            lines.append(" ".join(str(d) for d in row))
    else:
        lines.append("NODE_COORD_SECTION")
        for i, p in enumerate(instance.coords, start=1):
            lines.append(f"{i} {p.x} {p.y}")
    lines.append("GTSP_SET_SECTION")
    for k, members in enumerate(instance.clusters, start=1):
        lines.append(f"{k} {' '.join(str(v + 1) for v in members)} -1")
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def write_gtsplib(instance: Instance, dest) -> None:
    if hasattr(dest, "write"):
        dest.write(dumps_gtsplib(instance))
    else:
        with open(dest, "w", encoding="ascii") as fh:
            fh.write(dumps_gtsplib(instance))


_SECTION_KEYWORDS = {"NODE_COORD_SECTION", "GTSP_SET_SECTION",
                     "EDGE_WEIGHT_SECTION", "EOF"}
_SUPPORTED_WEIGHT_TYPES = ("MAN_2D", "EUC_2D", "EXPLICIT")


def _header_int(headers, key):
    if key not in headers:
        raise GtsplibFormatError(f"missing {key} header")
    try:
        value = int(headers[key].strip())
    except ValueError:
        raise GtsplibFormatError(f"{key} is not an integer: {headers[key]!r}") from None
    if value <= 0:
        raise GtsplibFormatError(f"{key} must be positive, got {value}")
    return value


def loads_gtsplib(text: str) -> Instance:
    """Parse instance text; raises GtsplibFormatError with a specific
    diagnostic for malformed headers, count mismatches, duplicate or
    missing nodes, non-partition set sections and unknown weight types."""
    headers = {}
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        head = line.split()[0].rstrip(":")
        if head in _SECTION_KEYWORDS and len(line.split()) == 1:
            if head == "EOF":
                break
            current = head
            sections[current] = []
            continue
        if current is None:
            if ":" not in line:
                raise GtsplibFormatError(
                    f"line {lineno}: expected 'KEY: value' header, got {raw!r}")
            key, rest = line.split(":", 1)
            # keep the value verbatim apart from the single separator space
            headers[key.strip().upper()] = rest[1:] if rest.startswith(" ") else rest
        else:
            sections[current].extend(line.split())

    kind = headers.get("TYPE", "").strip()
    if kind != "GTSP":
        raise GtsplibFormatError(f"unsupported TYPE {kind!r}, expected GTSP")
    n = _header_int(headers, "DIMENSION")
    m = _header_int(headers, "GTSP_SETS")
    if m > n:
        raise GtsplibFormatError(f"GTSP_SETS {m} exceeds DIMENSION {n}")
    ewt = headers.get("EDGE_WEIGHT_TYPE", "").strip()
    if ewt not in _SUPPORTED_WEIGHT_TYPES:
        raise GtsplibFormatError(
            f"unknown edge weight type {ewt!r}, supported: {', '.join(_SUPPORTED_WEIGHT_TYPES)}")
    name = headers.get("NAME", "")
    comment = headers.get("COMMENT", "")

    clusters = _parse_set_section(sections.get("GTSP_SET_SECTION"), n, m)
    try:
        if ewt == "EXPLICIT":
            fmt = headers.get("EDGE_WEIGHT_FORMAT", "").strip()
            if fmt != "FULL_MATRIX":
                raise GtsplibFormatError(
                    f"EXPLICIT weights need EDGE_WEIGHT_FORMAT: FULL_MATRIX, got {fmt!r}")
            dist = _parse_matrix_section(sections.get("EDGE_WEIGHT_SECTION"), n)
            return Instance.from_matrix(name, dist, clusters, comment=comment)
        coords = _parse_coord_section(sections.get("NODE_COORD_SECTION"), n, ewt)
        return Instance.from_coords(name, coords, clusters, comment=comment,
                                    edge_weight_type=ewt)
    except GtsplibFormatError:
        raise
    except ValueError as exc:
        raise GtsplibFormatError(str(exc)) from None


def _parse_coord_section(tokens, n, ewt):
    if tokens is None:
        raise GtsplibFormatError("missing NODE_COORD_SECTION")
    if len(tokens) != 3 * n:
        raise GtsplibFormatError(
            f"NODE_COORD_SECTION has {len(tokens)} tokens, expected {3 * n} for {n} nodes")
    coords = [None] * n
    for t in range(0, len(tokens), 3):
        try:
            i = int(tokens[t])
            x = float(tokens[t + 1])
            y = float(tokens[t + 2])
        except ValueError:
            raise GtsplibFormatError(
                f"bad coordinate entry: {' '.join(tokens[t:t + 3])!r}") from None
        if not 1 <= i <= n:
            raise GtsplibFormatError(f"node id {i} outside 1..{n}")
        if coords[i - 1] is not None:
            raise GtsplibFormatError(f"duplicate coordinates for node {i}")
        if ewt == "MAN_2D":
            if not (x.is_integer() and y.is_integer()):
                raise GtsplibFormatError(
                    f"MAN_2D requires integer coordinates, node {i} has ({x}, {y})")
            x, y = int(x), int(y)
        coords[i - 1] = (x, y)
    return coords


def _parse_set_section(tokens, n, m):
    if tokens is None:
        raise GtsplibFormatError("missing GTSP_SET_SECTION")
    try:
        values = [int(t) for t in tokens]
    except ValueError:
        raise GtsplibFormatError("GTSP_SET_SECTION contains a non-integer token") from None
    sets = {}
    pos = 0
    while pos < len(values):
        sid = values[pos]
        pos += 1
        if not 1 <= sid <= m:
            raise GtsplibFormatError(f"set id {sid} outside 1..{m}")
        if sid in sets:
            raise GtsplibFormatError(f"duplicate set id {sid}")
        members = []
        while True:
            if pos >= len(values):
                raise GtsplibFormatError(f"set {sid} is missing its -1 terminator")
            v = values[pos]
            pos += 1
            if v == -1:
                break
            members.append(v - 1)
        sets[sid] = members
    if len(sets) != m:
        raise GtsplibFormatError(f"GTSP_SETS says {m} but the section defines {len(sets)} sets")
    return [sets[sid] for sid in range(1, m + 1)]


def _parse_matrix_section(tokens, n):
    if tokens is None:
        raise GtsplibFormatError("missing EDGE_WEIGHT_SECTION")
    if len(tokens) != n * n:
        raise GtsplibFormatError(
            f"EDGE_WEIGHT_SECTION has {len(tokens)} entries, expected {n * n}")
    try:
        flat = [int(t) for t in tokens]
    except ValueError:
        raise GtsplibFormatError("EDGE_WEIGHT_SECTION contains a non-integer entry") from None
    return [flat[i * n:(i + 1) * n] for i in range(n)]


def read_gtsplib(source) -> Instance:
    if hasattr(source, "read"):
        return loads_gtsplib(source.read())
    with open(source, "r", encoding="ascii") as fh:
        return loads_gtsplib(fh.read())


@dataclass(frozen=True)
class ManifestRow:
    name: str
    n: int
    m: int
    seed: int


MANIFEST_NAME = "manifest.tsv"


def write_testbed(spec: TestbedSpec, out_dir) -> str:
    """Write every instance of the testbed plus a manifest; returns the
    manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    lines = ["name\tn\tm\tseed"]
    for k, (n, m) in enumerate(spec.pairs):
        inst = generate(GeneratorParams(n, m, spec.base_seed + k))
        write_gtsplib(inst, os.path.join(out_dir, inst.name + ".gtsp"))
        lines.append(f"{inst.name}\t{n}\t{m}\t{spec.base_seed + k}")
    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    with open(manifest_path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return manifest_path


def read_manifest(path) -> list:
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines or lines[0].split("\t") != ["name", "n", "m", "seed"]:
        raise GtsplibFormatError(f"{path}: not a testbed manifest")
    for ln in lines[1:]:
        parts = ln.split("\t")
        if len(parts) != 4:
            raise GtsplibFormatError(f"{path}: malformed manifest row {ln!r}")
        try:
            rows.append(ManifestRow(parts[0], int(parts[1]), int(parts[2]), int(parts[3])))
        except ValueError:
            raise GtsplibFormatError(f"{path}: malformed manifest row {ln!r}") from None
    return rows
