"""Text file formats. Every reader reports malformed input as a
:class:`ParseError` carrying the offending line number.

* instance: JSON with explicit id arrays
* hypercube bundle: JSON holding a partitioned source instance and a gadget
* provenance: JSON sidecar, sorted keys, paths relative to the sidecar
* CNF: DIMACS
* graph: ``k <parts>``, then ``p <part> <vertex>...`` lines, then ``e <u> <v>`` lines
* vectors: header ``k dim bound``, then ``<list> x_1 .. x_dim`` lines
* integer lists: one whitespace-separated list per line
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from pathlib import Path
from typing import Any, Sequence

from .errors import ParseError
from .gadget import dump_gadget, load_gadget
from .hypercube import HypercubeInstance
from .model import CnfFormula, GapGadget, MultipartiteGraph, SetCoverInstance, VectorSumInstance
from .universal import dump_universal, load_universal

__all__ = [
    "INSTANCE_FORMAT",
    "BUNDLE_FORMAT",
    "PROVENANCE_FORMAT",
    "dump_instance",
    "load_instance",
    "dump_bundle",
    "load_bundle",
    "dump_provenance",
    "load_provenance",
    "dump_cnf",
    "load_cnf",
    "dump_graph",
    "load_graph",
    "dump_vectors",
    "load_vectors",
    "dump_int_lists",
    "load_int_lists",
    "dump_gadget",
    "load_gadget",
    "dump_universal",
    "load_universal",
    "sha256_text",
]

INSTANCE_FORMAT = "gapcover-instance/1"
BUNDLE_FORMAT = "gapcover-hypercube/1"
PROVENANCE_FORMAT = "gapcover-provenance/1"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


# ---------------------------------------------------------------------------
# JSON helpers


def _json_load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _field(obj: dict, key: str, kind, text: str) -> Any:
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", 1)
    if key not in obj:
        raise ParseError(f"missing field {key!r}", None)
    value = obj[key]
    if not isinstance(value, kind):
        raise ParseError(f"field {key!r} has the wrong type", _line_of(text, key))
    return value


def _compact(obj: Any) -> str:
    return json.dumps(obj, separators=(", ", ": "), ensure_ascii=False)


# ---------------------------------------------------------------------------
# instances


def _instance_lines(inst: SetCoverInstance, indent: str = "") -> list[str]:
    part = "null" if inst.partition is None else _compact([list(r) for r in inst.partition])
    rows = [indent + "  " + _compact(list(r)) for r in inst.incidence]
    return [
        f'{indent}"set_ids": {_compact(list(inst.set_ids))},',
        f'{indent}"universe_ids": {_compact(list(inst.universe_ids))},',
        f'{indent}"partition": {part},',
        f'{indent}"incidence": [',
        ",\n".join(rows) if rows else None,
        f"{indent}]",
    ]


def dump_instance(inst: SetCoverInstance) -> str:
    """One incidence row per line, aligned with ``set_ids``."""
    lines = ["{", f'"format": "{INSTANCE_FORMAT}",'] + _instance_lines(inst) + ["}"]
    return "\n".join(x for x in lines if x is not None) + "\n"


def _instance_from(obj: dict, text: str) -> SetCoverInstance:
    set_ids = _field(obj, "set_ids", list, text)
    universe_ids = _field(obj, "universe_ids", list, text)
    incidence = _field(obj, "incidence", list, text)
    partition = obj.get("partition")
    line = _line_of(text, "incidence")
    if not all(isinstance(x, str) for x in set_ids + universe_ids):
        raise ParseError("ids must be strings", _line_of(text, "set_ids"))
    if len(incidence) != len(set_ids):
        raise ParseError(f"{len(incidence)} incidence rows for {len(set_ids)} sets", line)
    for r, row in enumerate(incidence):
        if not isinstance(row, list) or not all(isinstance(u, str) for u in row):
            raise ParseError(f"incidence row {r + 1} must be a list of ids", None if line is None else line + 1 + r)
    if partition is not None:
        if not isinstance(partition, list) or not all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(x, int) for x in p) for p in partition
        ):
            raise ParseError("partition must be a list of [start, stop] pairs", _line_of(text, "partition"))
        partition = tuple((a, b) for a, b in partition)
    return SetCoverInstance(tuple(set_ids), tuple(universe_ids), tuple(tuple(r) for r in incidence), partition)


def load_instance(text: str) -> SetCoverInstance:
    obj = _json_load(text)
    fmt = _field(obj, "format", str, text)
    if fmt != INSTANCE_FORMAT:
        raise ParseError(f"not an instance file (format {fmt!r})", _line_of(text, "format"))
    return _instance_from(obj, text)


# ---------------------------------------------------------------------------
# hypercube bundles


def dump_bundle(hc: HypercubeInstance) -> str:
    g = hc.gadget
    lines = [
        "{",
        f'"format": "{BUNDLE_FORMAT}",',
        f'"universe_size": "{hc.universe_size}",',
        '"gadget": {',
        f'  "k": {g.k}, "n": {g.n}, "m": {g.m}, "ell": {g.ell}, "h": {g.h},',
        '  "matrix": [',
        ",\n".join("    " + _compact(list(row)) for row in g.matrix),
        "  ]",
        "},",
        '"source": {',
        *[x for x in _instance_lines(hc.src, "  ") if x is not None],
        "}",
        "}",
    ]
    return "\n".join(lines) + "\n"


def load_bundle(text: str) -> HypercubeInstance:
    obj = _json_load(text)
    fmt = _field(obj, "format", str, text)
    if fmt != BUNDLE_FORMAT:
        raise ParseError(f"not a hypercube bundle (format {fmt!r})", _line_of(text, "format"))
    gd = _field(obj, "gadget", dict, text)
    try:
        k, n, m, ell, h = (int(gd[x]) for x in ("k", "n", "m", "ell", "h"))
        matrix = tuple(tuple(int(v) for v in row) for row in gd["matrix"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("malformed gadget", _line_of(text, "gadget")) from None
    if len(matrix) != m or any(len(row) != n for row in matrix):
        raise ParseError("gadget matrix does not match its header", _line_of(text, "matrix"))
    src = _instance_from(_field(obj, "source", dict, text), text)
    hc = HypercubeInstance(src, GapGadget(k, n, m, ell, h, matrix))
    declared = obj.get("universe_size")
    if declared is not None and str(hc.universe_size) != str(declared):
        raise ParseError(f"universe_size {declared} != m|U|^ell = {hc.universe_size}", _line_of(text, "universe_size"))
    return hc


# ---------------------------------------------------------------------------
# provenance


def dump_provenance(record: dict) -> str:
    return json.dumps({"format": PROVENANCE_FORMAT, **record}, indent=1, sort_keys=True) + "\n"


def load_provenance(text: str) -> dict:
    obj = _json_load(text)
    fmt = _field(obj, "format", str, text)
    if fmt != PROVENANCE_FORMAT:
        raise ParseError(f"not a provenance file (format {fmt!r})", _line_of(text, "format"))
    return obj


def relative_path(target: Path, base_dir: Path) -> str:
    return Path(os.path.relpath(Path(target).resolve(), Path(base_dir).resolve())).as_posix()


# ---------------------------------------------------------------------------
# DIMACS CNF


def dump_cnf(phi: CnfFormula) -> str:
    lines = [f"p cnf {phi.num_vars} {len(phi.clauses)}"]
    lines += [" ".join(map(str, c + (0,))) for c in phi.clauses]
    return "\n".join(lines) + "\n"


def load_cnf(text: str) -> CnfFormula:
    header = None
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        last = lineno
        if line.startswith("p"):
            if header is not None:
                raise ParseError("second 'p' line", lineno)
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise ParseError("header must be 'p cnf <vars> <clauses>'", lineno)
            try:
                header = (int(fields[2]), int(fields[3]))
            except ValueError:
                raise ParseError("header counts must be integers", lineno) from None
            if min(header) < 0:
                raise ParseError("header counts must be non-negative", lineno)
            continue
        if header is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            elif abs(lit) > header[0]:
                raise ParseError(f"literal {lit} exceeds declared {header[0]} variables", lineno)
            else:
                cur.append(lit)
    if header is None:
        raise ParseError("missing 'p cnf' header", last or 1)
    if cur:
        raise ParseError("last clause is not terminated by 0", last)
    if len(clauses) != header[1]:
        raise ParseError(f"header declares {header[1]} clauses, found {len(clauses)}", last or 1)
    return CnfFormula(header[0], tuple(clauses))


# ---------------------------------------------------------------------------
# multipartite graphs


def dump_graph(g: MultipartiteGraph) -> str:
    lines = [f"k {g.k}"]
    lines += [f"p {j + 1} " + " ".join(part) if part else f"p {j + 1}" for j, part in enumerate(g.parts)]
    lines += [f"e {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> MultipartiteGraph:
    k = None
    parts: dict[int, list[str]] = {}
    edges: list[tuple[str, str]] = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split("#", 1)[0].split()
        if not fields:
            continue
        tag = fields[0]
        if k is None:
            if tag != "k" or len(fields) != 2 or not fields[1].isdigit():
                raise ParseError("first line must be 'k <parts>'", lineno)
            k = int(fields[1])
            continue
        if tag == "p":
            if edges:
                raise ParseError("part line after edges", lineno)
            if len(fields) < 2 or not fields[1].isdigit() or not 1 <= int(fields[1]) <= k:
                raise ParseError(f"part number must be in 1..{k}", lineno)
            j = int(fields[1])
            if j in parts:
                raise ParseError(f"part {j} listed twice", lineno)
            for v in fields[2:]:
                if v in seen:
                    raise ParseError(f"vertex {v!r} already in part {seen[v]}", lineno)
                seen[v] = j
            parts[j] = fields[2:]
        elif tag == "e":
            if len(fields) != 3:
                raise ParseError("edge line must be 'e <u> <v>'", lineno)
            for v in fields[1:]:
                if v not in seen:
                    raise ParseError(f"unknown vertex {v!r}", lineno)
            if seen[fields[1]] == seen[fields[2]]:
                raise ParseError("edge inside a part", lineno)
            edges.append((fields[1], fields[2]))
        else:
            raise ParseError(f"unknown line type {tag!r}", lineno)
    if k is None:
        raise ParseError("empty graph file", 1)
    missing = [j for j in range(1, k + 1) if j not in parts]
    if missing:
        raise ParseError(f"parts {missing} not listed", None)
    return MultipartiteGraph.of([parts[j] for j in range(1, k + 1)], edges)


# ---------------------------------------------------------------------------
# vector-sum instances


def dump_vectors(vs: VectorSumInstance) -> str:
    lines = [f"{vs.k} {vs.dim} {vs.bound}"]
    lines += [f"{i + 1} " + " ".join(map(str, v)) for i, lst in enumerate(vs.vectors) for v in lst]
    return "\n".join(lines) + "\n"


def load_vectors(text: str) -> VectorSumInstance:
    lines = text.splitlines()
    header = None
    lists: list[list[tuple[int, ...]]] = []
    for lineno, raw in enumerate(lines, start=1):
        fields = raw.split("#", 1)[0].split()
        if not fields:
            continue
        try:
            nums = [int(x) for x in fields]
        except ValueError:
            raise ParseError("non-integer entry", lineno) from None
        if header is None:
            if len(nums) != 3 or nums[0] < 1 or nums[1] < 0 or nums[2] < 0:
                raise ParseError("header must be 'k dim bound'", lineno)
            header = nums
            lists = [[] for _ in range(nums[0])]
            continue
        k, dim, bound = header
        if len(nums) != dim + 1:
            raise ParseError(f"expected list number and {dim} entries", lineno)
        if not 1 <= nums[0] <= k:
            raise ParseError(f"list number must be in 1..{k}", lineno)
        if any(abs(x) > bound for x in nums[1:]):
            raise ParseError(f"entry outside [-{bound}, {bound}]", lineno)
        lists[nums[0] - 1].append(tuple(nums[1:]))
    if header is None:
        raise ParseError("missing header 'k dim bound'", 1)
    return VectorSumInstance(header[0], header[1], header[2], tuple(tuple(x) for x in lists))


# ---------------------------------------------------------------------------
# integer lists (k-SUM)


def dump_int_lists(lists: Sequence[Sequence[int]]) -> str:
    return "".join(" ".join(map(str, lst)) + "\n" for lst in lists)


def load_int_lists(text: str) -> list[list[int]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split("#", 1)[0].split()
        if not fields:
            continue
        try:
            out.append([int(x) for x in fields])
        except ValueError:
            raise ParseError("non-integer entry", lineno) from None
    if not out:
        raise ParseError("no lists", 1)
    return out
