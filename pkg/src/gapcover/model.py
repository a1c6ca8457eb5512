"""Domain types shared by every reduction, plus instance validation and padding.

All types are frozen dataclasses. Constructors do not validate: malformed
values must be representable so that the ``validate_*`` functions can report
on them. Combinatorial indices that mirror the ``[n] = {1..n}`` notation
(parts, groups, labels) are 1-based; Python sequence positions are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import GapCoverError

Range = tuple[int, int]


@dataclass(frozen=True)
class SetCoverInstance:
    """Bipartite incidence structure ``(S, U, E)``.

    ``incidence[i]`` lists the universe ids covered by ``set_ids[i]`` in
    universe order. ``partition`` holds half-open ``(start, stop)`` ranges
    over positions in ``set_ids``.
    """

    set_ids: tuple[str, ...]
    universe_ids: tuple[str, ...]
    incidence: tuple[tuple[str, ...], ...]
    partition: tuple[Range, ...] | None = None

    @classmethod
    def build(
        cls,
        set_ids: Iterable[str],
        universe_ids: Iterable[str],
        incidence: Iterable[Iterable[str]],
        partition: Iterable[Sequence[int]] | None = None,
    ) -> "SetCoverInstance":
        universe = tuple(universe_ids)
        order = {u: i for i, u in enumerate(universe)}
        inc = tuple(
            tuple(sorted(set(row), key=lambda u: order.get(u, len(order)))) for row in incidence
        )
        part = None if partition is None else tuple((int(a), int(b)) for a, b in partition)
        return cls(tuple(set_ids), universe, inc, part)

    @classmethod
    def from_masks(
        cls,
        set_ids: Sequence[str],
        universe_ids: Sequence[str],
        masks: Sequence[int],
        partition: Sequence[Range] | None = None,
    ) -> "SetCoverInstance":
        universe = tuple(universe_ids)
        inc = tuple(tuple(universe[u] for u in _bits(mask)) for mask in masks)
        part = None if partition is None else tuple((int(a), int(b)) for a, b in partition)
        inst = cls(tuple(set_ids), universe, inc, part)
        inst.__dict__["masks"] = tuple(int(x) for x in masks)
        return inst

    @cached_property
    def universe_index(self) -> dict[str, int]:
        return {u: i for i, u in enumerate(self.universe_ids)}

    @cached_property
    def set_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.set_ids)}

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Per-set coverage as int bitmasks over universe positions."""
        index = self.universe_index
        out = []
        for sid, row in zip(self.set_ids, self.incidence):
            mask = 0
            for u in row:
                try:
                    mask |= 1 << index[u]
                except KeyError:
                    raise GapCoverError(f"set {sid!r} covers unknown universe id {u!r}") from None
            out.append(mask)
        return tuple(out)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.universe_ids)) - 1

    @property
    def k(self) -> int | None:
        return None if self.partition is None else len(self.partition)

    def parts(self) -> list[list[int]]:
        if self.partition is None:
            raise GapCoverError("no partition")
        return [list(range(a, b)) for a, b in self.partition]

    def part_of(self) -> dict[int, tuple[int, int]]:
        """Map set position to ``(part, index)``, both 1-based."""
        out = {}
        for j, (a, b) in enumerate(self.partition or ()):
            for pos in range(a, b):
                out[pos] = (j + 1, pos - a + 1)
        return out

    def covers(self, chosen: Iterable[int]) -> bool:
        mask = 0
        for s in chosen:
            mask |= self.masks[s]
        return mask == self.full_mask

    def uncovered(self, chosen: Iterable[int]) -> list[str]:
        mask = 0
        for s in chosen:
            mask |= self.masks[s]
        return [u for i, u in enumerate(self.universe_ids) if not mask >> i & 1]

    def is_rainbow(self, chosen: Iterable[int]) -> bool:
        """True when ``chosen`` holds exactly one set from each part."""
        if self.partition is None:
            return False
        chosen = sorted(set(chosen))
        if len(chosen) != len(self.partition):
            return False
        hits = [sum(a <= s < b for s in chosen) for a, b in self.partition]
        return all(h == 1 for h in hits)


@dataclass(frozen=True)
class GapGadget:
    """A ``(k, n, m, ell, h)`` gap-gadget given by an ``m x n`` matrix over ``[h]``.

    Side A has ``m`` groups of ``ell`` label vectors; side B has ``k`` parts of
    ``n`` vertices. Label vector ``a`` in group ``i`` is adjacent to vertex
    ``b`` of part ``j`` iff ``matrix[i][b] == a[j]``.
    """

    k: int
    n: int
    m: int
    ell: int
    h: int
    matrix: tuple[tuple[int, ...], ...]

    @cached_property
    def array(self):
        import numpy as np

        return np.array(self.matrix, dtype=np.int64).reshape(self.m, self.n)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, num_vars: int, clauses: Iterable[Iterable[int]]) -> "CnfFormula":
        return cls(int(num_vars), tuple(tuple(int(x) for x in c) for c in clauses))

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        """``assignment[v - 1]`` is the value of variable ``v``."""
        return all(any((lit > 0) == assignment[abs(lit) - 1] for lit in c) for c in self.clauses)


@dataclass(frozen=True)
class MultipartiteGraph:
    k: int
    parts: tuple[tuple[str, ...], ...]
    edges: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, parts: Iterable[Iterable[str]], edges: Iterable[Sequence[str]]) -> "MultipartiteGraph":
        parts = tuple(tuple(str(v) for v in p) for p in parts)
        return cls(len(parts), parts, tuple((str(u), str(v)) for u, v in edges))

    @cached_property
    def vertices(self) -> tuple[str, ...]:
        return tuple(v for p in self.parts for v in p)

    @cached_property
    def part_of(self) -> dict[str, int]:
        """Vertex name to 1-based part."""
        return {v: j + 1 for j, p in enumerate(self.parts) for v in p}

    @cached_property
    def edge_set(self) -> frozenset[frozenset[str]]:
        return frozenset(frozenset(e) for e in self.edges)


@dataclass(frozen=True)
class VectorSumInstance:
    k: int
    dim: int
    bound: int
    vectors: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def of(cls, vectors: Iterable[Iterable[Iterable[int]]], bound: int | None = None) -> "VectorSumInstance":
        vecs = tuple(tuple(tuple(int(x) for x in v) for v in lst) for lst in vectors)
        dims = {len(v) for lst in vecs for v in lst}
        dim = dims.pop() if len(dims) == 1 else (0 if not dims else -1)
        if bound is None:
            bound = max((abs(x) for lst in vecs for v in lst for x in v), default=0)
        return cls(len(vecs), dim, int(bound), vecs)


@dataclass(frozen=True)
class PipelineParams:
    """Parameters of one pipeline run.

    ``asymptotic`` holds the textbook parameter formulas evaluated on the
    actual sizes (often meaningless at small sizes); the remaining fields are
    the values actually used to build the output.
    """

    k: int
    delta: float
    epsilon_gadget: float = 0.1
    k_effective: int = 0
    n_gadget: int = 0
    h_effective: int = 0
    ell: int = 0
    m: int = 0
    M: int = 0
    N: float | None = None
    universe_size: int = 0
    asymptotic: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "delta": self.delta,
            "epsilon_gadget": self.epsilon_gadget,
            "k_effective": self.k_effective,
            "n_gadget": self.n_gadget,
            "h_effective": self.h_effective,
            "ell": self.ell,
            "m": self.m,
            "M": self.M,
            "N": self.N,
            # exact integer, often astronomically large
            "universe_size": str(self.universe_size),
            "asymptotic": self.asymptotic,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineParams":
        d = dict(d)
        d["universe_size"] = int(d["universe_size"])
        d["warnings"] = tuple(d.get("warnings", ()))
        return cls(**d)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "ok" if self.ok else "; ".join(self.violations)


def _duplicates(items: Sequence[str]) -> list[tuple[int, str]]:
    seen: set[str] = set()
    out = []
    for i, x in enumerate(items):
        if x in seen:
            out.append((i, x))
        seen.add(x)
    return out


def validate_instance(inst: SetCoverInstance, equal_parts: bool = True) -> ValidationReport:
    """``equal_parts=False`` accepts partitions that still need padding."""
    v: list[str] = []
    for i, s in _duplicates(inst.set_ids):
        v.append(f"set_ids[{i}]: duplicate set id {s!r}")
    for i, u in _duplicates(inst.universe_ids):
        v.append(f"universe_ids[{i}]: duplicate universe id {u!r}")
    if len(inst.incidence) != len(inst.set_ids):
        v.append(f"incidence: {len(inst.incidence)} rows for {len(inst.set_ids)} sets")
    known = set(inst.universe_ids)
    for i, row in enumerate(inst.incidence):
        for u in row:
            if u not in known:
                v.append(f"incidence[{i}]: unknown universe id {u!r}")
        for j, u in _duplicates(row):
            v.append(f"incidence[{i}][{j}]: repeated universe id {u!r}")
    if inst.partition is not None:
        v.extend(_partition_violations(inst.partition, len(inst.set_ids), equal_parts))
    return ValidationReport(tuple(v))


def _partition_violations(partition: Sequence[Range], size: int, equal_parts: bool = True) -> list[str]:
    v = []
    owner = [0] * size
    for j, (a, b) in enumerate(partition):
        if not 0 <= a <= b <= size:
            v.append(f"partition[{j}]: range ({a}, {b}) outside 0..{size}")
            continue
        for pos in range(a, b):
            owner[pos] += 1
    for pos, c in enumerate(owner):
        if c == 0:
            v.append(f"partition: set index {pos} not in any part")
        elif c > 1:
            v.append(f"partition: set index {pos} in {c} parts")
    widths = [b - a for a, b in partition]
    if equal_parts and len(set(widths)) > 1:
        v.append("partition: unequal part widths " + ", ".join(map(str, widths)))
    return v


def validate_formula(phi: CnfFormula) -> ValidationReport:
    v = []
    if phi.num_vars < 0:
        v.append(f"num_vars: negative ({phi.num_vars})")
    for i, c in enumerate(phi.clauses):
        if not c:
            v.append(f"clauses[{i}]: empty clause")
        for lit in c:
            if lit == 0 or abs(lit) > phi.num_vars:
                v.append(f"clauses[{i}]: literal {lit} out of range 1..{phi.num_vars}")
    return ValidationReport(tuple(v))


def validate_graph(g: MultipartiteGraph) -> ValidationReport:
    v = []
    if g.k != len(g.parts):
        v.append(f"k: {g.k} but {len(g.parts)} parts")
    seen: dict[str, int] = {}
    for j, p in enumerate(g.parts):
        for x in p:
            if x in seen:
                v.append(f"parts[{j}]: vertex {x!r} already in part {seen[x] + 1}")
            seen[x] = j
    for i, (a, b) in enumerate(g.edges):
        if a not in seen or b not in seen:
            v.append(f"edges[{i}]: unknown endpoint in ({a}, {b})")
        elif seen[a] == seen[b]:
            v.append(f"edges[{i}]: ({a}, {b}) inside part {seen[a] + 1}")
    return ValidationReport(tuple(v))


def validate_vectorsum(vs: VectorSumInstance) -> ValidationReport:
    v = []
    if vs.k != len(vs.vectors):
        v.append(f"k: {vs.k} but {len(vs.vectors)} lists")
    for i, lst in enumerate(vs.vectors):
        for j, x in enumerate(lst):
            if len(x) != vs.dim:
                v.append(f"vectors[{i}][{j}]: length {len(x)} != dim {vs.dim}")
            if any(abs(c) > vs.bound for c in x):
                v.append(f"vectors[{i}][{j}]: entry outside [-{vs.bound}, {vs.bound}]")
    return ValidationReport(tuple(v))


def validate_gadget(g: GapGadget) -> ValidationReport:
    v = []
    for name in ("k", "n", "m", "h"):
        if getattr(g, name) < 1:
            v.append(f"{name}: must be >= 1, got {getattr(g, name)}")
    if g.ell != g.h**g.k:
        v.append(f"ell: {g.ell} != h^k = {g.h ** g.k}")
    if len(g.matrix) != g.m:
        v.append(f"matrix: {len(g.matrix)} rows, expected m = {g.m}")
    for r, row in enumerate(g.matrix):
        if len(row) != g.n:
            v.append(f"matrix[{r}]: {len(row)} columns, expected n = {g.n}")
        for c, x in enumerate(row):
            if not 1 <= x <= g.h:
                v.append(f"matrix[{r}][{c}]: entry {x} outside [1, {g.h}] (M1)")
    return ValidationReport(tuple(v))


# ---------------------------------------------------------------------------


def pad_partition(inst: SetCoverInstance, k: int) -> SetCoverInstance:
    """Pad every part to the widest part with dummy sets covering nothing.

    Dummies are named ``pad:<part>:<index>`` and appended at the end of their
    part. Returns ``inst`` itself when the parts are already equal.
    """
    if inst.partition is None:
        raise GapCoverError("no partition")
    if len(inst.partition) != k:
        raise GapCoverError(f"partition has {len(inst.partition)} parts, expected {k}")
    widths = [b - a for a, b in inst.partition]
    width = max(widths, default=0)
    if all(w == width for w in widths):
        return inst
    set_ids: list[str] = []
    rows: list[tuple[str, ...]] = []
    ranges = []
    for j, (a, b) in enumerate(inst.partition):
        start = len(set_ids)
        set_ids.extend(inst.set_ids[a:b])
        rows.extend(inst.incidence[a:b])
        for p in range(width - (b - a)):
            set_ids.append(f"pad:{j + 1}:{p + 1}")
            rows.append(())
        ranges.append((start, len(set_ids)))
    return SetCoverInstance(tuple(set_ids), inst.universe_ids, tuple(rows), tuple(ranges))


def equal_partition(widths: Sequence[int]) -> tuple[Range, ...]:
    out, start = [], 0
    for w in widths:
        out.append((start, start + w))
        start += w
    return tuple(out)


def _bits(mask: int) -> list[int]:
    s = bin(mask)[:1:-1]
    out, i = [], s.find("1")
    while i >= 0:
        out.append(i)
        i = s.find("1", i + 1)
    return out
