"""Front-end reductions into partitioned Set Cover.

Each front end produces an instance whose yes-case has a cover with exactly
one set per part, and the matching ``*_witness`` function maps a source
certificate to those set positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .errors import DEFAULT_SIZE_BUDGET, BudgetExceeded, GapCoverError, ReductionError, check_budget
from .model import (
    CnfFormula,
    MultipartiteGraph,
    SetCoverInstance,
    VectorSumInstance,
    equal_partition,
    validate_formula,
    validate_graph,
    validate_vectorsum,
)


@dataclass(frozen=True)
class ReductionProvenance:
    kind: str  # sat | clique | ksum | vectorsum | setcover
    source_hash: str
    params: dict = field(default_factory=dict)
    rainbow_certified: bool = True

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "source_sha256": self.source_hash,
            "params": self.params,
            "rainbow_certified": self.rainbow_certified,
        }


def _mask_to_int(bits: np.ndarray) -> int:
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


# ---------------------------------------------------------------------------
# SAT


def variable_blocks(num_vars: int, k: int) -> list[list[int]]:
    """Split variables 1..n into k contiguous blocks of near-equal size."""
    q, r = divmod(num_vars, k)
    out, v = [], 1
    for i in range(k):
        size = q + (1 if i < r else 0)
        out.append(list(range(v, v + size)))
        v += size
    return out


def _assignment_id(part: int, block: list[int], bits: Sequence[bool]) -> str:
    body = ",".join(f"x{v}={int(b)}" for v, b in zip(block, bits)) or "-"
    return f"asg:{part}:{body}"


def sat_to_setcover(phi: CnfFormula, k: int, budget: int | None = None) -> SetCoverInstance:
    """Sets are partial assignments to one variable block; the universe is the
    clauses plus one guard per block."""
    report = validate_formula(phi)
    if not report:
        raise ReductionError(f"invalid formula: {report}")
    if k < 1:
        raise ReductionError("k must be >= 1")
    blocks = variable_blocks(phi.num_vars, k)
    total = sum(2 ** len(b) for b in blocks)
    check_budget("sat_to_setcover", total * max(len(phi.clauses), 1), budget)
    clause_ids = [f"clause:{c + 1}" for c in range(len(phi.clauses))]
    guard_ids = [f"guard:{i + 1}" for i in range(k)]
    universe = clause_ids + guard_ids
    set_ids, rows, widths = [], [], []
    for i, block in enumerate(blocks):
        widths.append(2 ** len(block))
        for bits in product((False, True), repeat=len(block)):
            value = dict(zip(block, bits))
            covered = [
                clause_ids[c]
                for c, clause in enumerate(phi.clauses)
                if any(abs(lit) in value and (lit > 0) == value[abs(lit)] for lit in clause)
            ]
            set_ids.append(_assignment_id(i + 1, block, bits))
            rows.append(tuple(covered) + (guard_ids[i],))
    return SetCoverInstance(tuple(set_ids), tuple(universe), tuple(rows), equal_partition(widths))


def sat_witness(phi: CnfFormula, k: int, assignment: Sequence[bool]) -> tuple[int, ...]:
    """Set positions (in the unpadded instance) chosen by a full assignment."""
    out, start = [], 0
    for block in variable_blocks(phi.num_vars, k):
        offset = 0
        for v in block:
            offset = offset * 2 + int(assignment[v - 1])
        out.append(start + offset)
        start += 2 ** len(block)
    return tuple(out)


# ---------------------------------------------------------------------------
# Clique


def encode_width(n: int) -> int:
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def encode_vertex(index: int, width: int) -> tuple[int, ...]:
    """Bits of a 0-based vertex index, most significant first."""
    return tuple(index >> (width - 1 - q) & 1 for q in range(width))


def sigma(i: int, j: int) -> int:
    """Canonical bijection ``[k] minus {i} -> [k-1]`` (ascending order preserved)."""
    return j if j < i else j - 1


def clique_edges(g: MultipartiteGraph) -> list[list[tuple[str, str]]]:
    """Edges grouped by part pair ``(i, j)``, ``i < j`` in lexicographic order;
    each edge is written lower part first."""
    k = g.k
    pos = {v: p for part in g.parts for p, v in enumerate(part)}
    part = g.part_of
    groups: dict[tuple[int, int], set[tuple[str, str]]] = {pair: set() for pair in combinations(range(1, k + 1), 2)}
    for a, b in g.edges:
        if part[a] > part[b]:
            a, b = b, a
        groups[(part[a], part[b])].add((a, b))
    return [sorted(groups[pair], key=lambda e: (pos[e[0]], pos[e[1]])) for pair in sorted(groups)]


def clique_to_setcover(g: MultipartiteGraph, k: int | None = None, budget: int | None = None) -> SetCoverInstance:
    """Sets are edges grouped by part pair; universe is ``[k] x [k-1]^{0,1} x [L]``
    with ``L`` the vertex encoding width."""
    report = validate_graph(g)
    if not report:
        raise ReductionError(f"invalid graph: {report}")
    k = g.k if k is None else k
    if k != g.k:
        raise ReductionError(f"graph has {g.k} parts, k = {k}")
    if k < 2:
        raise ReductionError("k must be >= 2")
    verts = g.vertices
    width = encode_width(len(verts))
    code = {v: encode_vertex(i, width) for i, v in enumerate(verts)}
    part = g.part_of
    funcs = list(product(range(1, k), repeat=2))  # (f(0), f(1))
    universe = [
        (i, f, l) for i in range(1, k + 1) for f in funcs for l in range(1, width + 1)
    ]
    index = {u: x for x, u in enumerate(universe)}
    uids = tuple(f"cl:{i}:{f[0]}.{f[1]}:{l}" for i, f, l in universe)
    groups = clique_edges(g)
    check_budget("clique_to_setcover", sum(map(len, groups)) * len(universe), budget)
    set_ids, rows = [], []
    for edges in groups:
        for a, b in edges:
            covered = []
            for v, w in ((a, b), (b, a)):
                i, j = part[v], part[w]
                for l in range(1, width + 1):
                    bit = code[v][l - 1]
                    for f in funcs:
                        if f[bit] == sigma(i, j):
                            covered.append(index[(i, f, l)])
            set_ids.append(f"e:{a}~{b}")
            rows.append(tuple(uids[x] for x in sorted(covered)))
    return SetCoverInstance(tuple(set_ids), uids, tuple(rows), equal_partition([len(e) for e in groups]))


def clique_witness(g: MultipartiteGraph, clique: Sequence[str]) -> tuple[int, ...]:
    members = set(clique)
    out, pos = [], 0
    for edges in clique_edges(g):
        hit = [pos + q for q, (a, b) in enumerate(edges) if a in members and b in members]
        if len(hit) != 1:
            raise GapCoverError("clique does not pick exactly one edge per part pair")
        out.append(hit[0])
        pos += len(edges)
    return tuple(out)


# ---------------------------------------------------------------------------
# Vector sum


def zero_sum_tuples(k: int, bound: int) -> list[tuple[int, ...]]:
    return [t for t in product(range(-bound, bound + 1), repeat=k) if sum(t) == 0]


def vectorsum_to_setcover(vs: VectorSumInstance, size_budget: int | None = None) -> SetCoverInstance:
    """Universe: one copy of ``[k]^|D|`` per coordinate, ``D`` the zero-sum
    k-tuples within the bound. ``x`` in list ``i`` covers ``u`` in copy ``j``
    iff ``u[l] == i`` and ``x[j] == D[l][i]`` for some ``l``."""
    report = validate_vectorsum(vs)
    if not report:
        raise ReductionError(f"invalid vector-sum instance: {report}")
    k, dim = vs.k, vs.dim
    D = zero_sum_tuples(k, vs.bound)
    block = k ** len(D)
    size = dim * block
    limit = DEFAULT_SIZE_BUDGET if size_budget is None else size_budget
    if size > limit:
        raise BudgetExceeded(f"vector-sum universe dim*k^|D| = {size}", size, limit)
    U = np.array(list(product(range(1, k + 1), repeat=len(D))), dtype=np.int64).reshape(block, len(D))
    Darr = np.array(D, dtype=np.int64).reshape(len(D), k)
    body = ["-".join(map(str, u)) for u in U.tolist()]
    uids = tuple(f"vs:{j + 1}:{b}" for j in range(dim) for b in body)
    cache: dict[tuple[int, int], np.ndarray] = {}

    def hits(i: int, v: int) -> np.ndarray:
        if (i, v) not in cache:
            ls = np.flatnonzero(Darr[:, i - 1] == v)
            cache[(i, v)] = (U[:, ls] == i).any(axis=1)
        return cache[(i, v)]

    set_ids, rows, masks = [], [], []
    for i, lst in enumerate(vs.vectors, start=1):
        for p, x in enumerate(lst, start=1):
            bits = np.concatenate([hits(i, x[j]) for j in range(dim)]) if dim else np.zeros(0, bool)
            idx = np.flatnonzero(bits)
            set_ids.append(f"v:{i}:{p}")
            rows.append(tuple(uids[q] for q in idx))
            masks.append(_mask_to_int(bits))
    inst = SetCoverInstance(tuple(set_ids), uids, tuple(rows), equal_partition([len(x) for x in vs.vectors]))
    inst.__dict__["masks"] = tuple(masks)
    return inst


def vectorsum_witness(vs: VectorSumInstance, picks: Sequence[int]) -> tuple[int, ...]:
    out, start = [], 0
    for lst, p in zip(vs.vectors, picks):
        out.append(start + p)
        start += len(lst)
    return tuple(out)


# ---------------------------------------------------------------------------
# k-SUM -> vector sum (base-p digits with guessed carries)


@dataclass(frozen=True)
class DigitMapping:
    """Maps shifted integers ``x in [0, M]`` to vectors in ``[-kp, kp]^d`` for
    target ``t``, assuming the column-wise carries ``carries`` (``c_1 .. c_{d-1}``)."""

    k: int
    p: int
    d: int
    t: int
    carries: tuple[int, ...]

    @property
    def column_targets(self) -> tuple[int | None, ...]:
        """``t_r + p c_{r+1} - c_r`` per digit, or None when no k digits can reach it."""
        c = (0,) + self.carries + (0,)
        out = []
        for r in range(self.d):
            need = _digit(self.t, self.p, r) + self.p * c[r + 1] - c[r]
            out.append(need if 0 <= need <= self.k * (self.p - 1) else None)
        return tuple(out)

    def __call__(self, x: int) -> tuple[int, ...]:
        out = []
        for r, need in enumerate(self.column_targets):
            if need is None:
                out.append(self.k * self.p)  # k copies sum to k^2 p, never zero
            else:
                out.append(self.k * _digit(x, self.p, r) - need)
        return tuple(out)


def _digit(x: int, p: int, r: int) -> int:
    return x // p**r % p


def digit_mappings(k: int, p: int, d: int, t: int) -> list[DigitMapping]:
    return [DigitMapping(k, p, d, t, c) for c in product(range(k + 1), repeat=d - 1)]


def ksum_parameters(lists: Sequence[Sequence[int]], p: int, d: int, R: int | None = None) -> tuple[int, int, int]:
    """Validate and return ``(k, R, M)``."""
    k = len(lists)
    if R is None:
        R = max((abs(x) for lst in lists for x in lst), default=0)
    if any(abs(x) > R for lst in lists for x in lst):
        raise ReductionError(f"integer outside [-{R}, {R}]")
    M = 2 * R
    bad = []
    if k < 1:
        bad.append("k >= 1")
    if d < 1:
        bad.append("d >= 1")
    if not k < p:
        bad.append(f"k < p (k = {k}, p = {p})")
    if p**d < k * M + 1:
        bad.append(f"p^d >= kM + 1 (p^d = {p ** d}, kM + 1 = {k * M + 1})")
    if bad:
        raise ReductionError("violated: " + "; ".join(bad))
    return k, R, M


def ksum_to_vectorsum(
    lists: Sequence[Sequence[int]], p: int, d: int, R: int | None = None
) -> list[VectorSumInstance]:
    """One vector-sum instance per carry guess, ``(k+1)^(d-1)`` in all; some
    instance has a zero-sum selection iff the integers have one."""
    k, R, _ = ksum_parameters(lists, p, d, R)
    t = k * R
    out = []
    for f in digit_mappings(k, p, d, t):
        vecs = [[f(x + R) for x in lst] for lst in lists]
        out.append(VectorSumInstance(k, d, k * p, tuple(tuple(v) for v in vecs)))
    return out


def ksum_carry_index(values: Sequence[int], p: int, d: int, R: int) -> int:
    """Index of the mapping whose carry guess matches a zero-sum selection."""
    k = len(values)
    shifted = [x + R for x in values]
    carries, c = [], 0
    for r in range(d - 1):
        c = (sum(_digit(x, p, r) for x in shifted) + c) // p
        carries.append(c)
    index = 0
    for c in carries:
        index = index * (k + 1) + c
    return index
