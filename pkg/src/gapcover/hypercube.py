"""Hypercube set-system reduction: partitioned instance + gap-gadget -> gapped instance.

Universe elements of the output are pairs ``(i, f)`` where ``f`` maps the
``ell`` label vectors of group ``i`` (in lexicographic order) to source
universe elements. Set ``s`` covers ``(i, f)`` iff some label vector ``a`` of
group ``i`` is adjacent to ``s`` in the gadget and ``s`` covers ``f(a)`` in
the source.

A set family ``X`` covers every ``(i, f)`` iff each group has a label vector
whose gadget neighbourhood inside ``X`` covers the whole source universe.
:class:`HypercubeInstance` uses this to answer coverage questions without
materializing the ``m |U|^ell`` elements.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import DEFAULT_SIZE_BUDGET, BudgetExceeded, GapCoverError, ParseError, ReductionError
from .gadget import AVertex, label_vectors
from .model import GapGadget, SetCoverInstance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HypercubeElement:
    group: int  # 1..m
    assignment: tuple[str, ...]  # f(a) for the ell label vectors, canonical order


_SPECIAL = re.compile(r"([\\,()])")


def _escape(u: str) -> str:
    return _SPECIAL.sub(r"\\\1", u)


def encode_element(group: int, assignment: Iterable[str]) -> str:
    return f"hc:{group}:(" + ",".join(_escape(u) for u in assignment) + ")"


def decode_element(uid: str) -> HypercubeElement:
    m = re.fullmatch(r"hc:(\d+):\((.*)\)", uid, flags=re.S)
    if not m:
        raise ParseError(f"not a hypercube element id: {uid!r}")
    body = m.group(2)
    parts, cur, i = [], [], 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            if i + 1 >= len(body):
                raise ParseError(f"dangling escape in {uid!r}")
            cur.append(body[i + 1])
            i += 2
            continue
        if ch == ",":
            parts.append("".join(cur))
            cur = []
        elif ch in "()":
            raise ParseError(f"unescaped {ch!r} in {uid!r}")
        else:
            cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return HypercubeElement(int(m.group(1)), tuple(parts))


@dataclass(frozen=True)
class GroupWitness:
    group: int
    vertex: AVertex
    kind: str  # "heavy": >= k+1 neighbours in X; "subcover": <= k neighbours covering U
    sets: tuple[int, ...]  # positions of N(a) within X


class NotCovering(GapCoverError):
    def __init__(self, element: HypercubeElement):
        self.element = element
        super().__init__(f"X does not cover {encode_element(element.group, element.assignment)}")


class HypercubeInstance:
    """The reduced instance, held implicitly as (source, gadget)."""

    def __init__(self, src: SetCoverInstance, gadget: GapGadget):
        if src.partition is None:
            raise ReductionError("source instance has no partition")
        widths = {b - a for a, b in src.partition}
        if len(src.partition) != gadget.k:
            raise ReductionError(f"source has {len(src.partition)} parts, gadget k = {gadget.k}")
        if widths != {gadget.n}:
            raise ReductionError(f"source part widths {sorted(widths)} != gadget n = {gadget.n}")
        if gadget.ell != gadget.h**gadget.k:
            raise ReductionError(f"gadget ell = {gadget.ell} is not h^k = {gadget.h ** gadget.k}")
        self.src = src
        self.gadget = gadget

    @property
    def set_ids(self) -> tuple[str, ...]:
        return self.src.set_ids

    @property
    def universe_size(self) -> int:
        return self.gadget.m * len(self.src.universe_ids) ** self.gadget.ell

    @cached_property
    def labels(self) -> list[tuple[int, ...]]:
        return label_vectors(self.gadget.h, self.gadget.k)

    @cached_property
    def adjacent_sets(self) -> list[list[int]]:
        """``[i][a]``: bitmask over set positions adjacent to label vector ``a`` of group ``i``."""
        g = self.gadget
        out = []
        for i in range(g.m):
            row = g.matrix[i]
            by_value = []
            for j, (start, _) in enumerate(self.src.partition):
                masks = {}
                for b in range(g.n):
                    masks[row[b]] = masks.get(row[b], 0) | 1 << (start + b)
                by_value.append(masks)
            group = []
            for a in self.labels:
                mask = 0
                for j in range(g.k):
                    mask |= by_value[j].get(a[j], 0)
                group.append(mask)
            out.append(group)
        return out

    def _union(self, setmask: int) -> int:
        masks = self.src.masks
        out, pos = 0, 0
        while setmask:
            if setmask & 1:
                out |= masks[pos]
            setmask >>= 1
            pos += 1
        return out

    def covering_vertices(self, chosen: Iterable[int]) -> list[list[int]]:
        """Per group, the label-vector positions whose neighbourhood inside
        ``chosen`` covers the source universe."""
        xmask = 0
        for s in chosen:
            xmask |= 1 << s
        full = self.src.full_mask
        return [
            [a for a, adj in enumerate(group) if self._union(xmask & adj) == full]
            for group in self.adjacent_sets
        ]

    def covers(self, chosen: Iterable[int]) -> bool:
        return self.uncovered_element(chosen) is None

    def uncovered_element(self, chosen: Iterable[int]) -> HypercubeElement | None:
        """An element missed by ``chosen``, built as ``f(a) = `` the first
        source element not covered by ``N(a)`` inside ``chosen``."""
        xmask = 0
        for s in chosen:
            xmask |= 1 << s
        full = self.src.full_mask
        uids = self.src.universe_ids
        for i, group in enumerate(self.adjacent_sets):
            assignment = []
            for adj in group:
                missing = full & ~self._union(xmask & adj)
                if not missing:
                    break
                assignment.append(uids[(missing & -missing).bit_length() - 1])
            else:
                return HypercubeElement(i + 1, tuple(assignment))
        return None

    def element_covered_by(self, f: HypercubeElement, s: int) -> bool:
        """Direct edge rule, for spot checks against the materialized form."""
        index = self.src.universe_index
        adj = self.adjacent_sets[f.group - 1]
        cover = self.src.masks[s]
        return any(adj[a] >> s & 1 and cover >> index[u] & 1 for a, u in enumerate(f.assignment))

    def materialize(self, size_budget: int | None = None) -> SetCoverInstance:
        g = self.gadget
        n_u = len(self.src.universe_ids)
        n_s = len(self.src.set_ids)
        size = self.universe_size
        limit = DEFAULT_SIZE_BUDGET if size_budget is None else size_budget
        if size > limit:
            raise BudgetExceeded(f"reduced universe m*|U|^ell = {size}", size, limit)
        # cov[u, s]: s covers u in the source
        cov = np.zeros((n_u, n_s), dtype=bool)
        for s, mask in enumerate(self.src.masks):
            for u in range(n_u):
                if mask >> u & 1:
                    cov[u, s] = True
        columns = [[] for _ in range(n_s)]
        universe: list[str] = []
        uids = self.src.universe_ids
        offset = 0
        for i in range(g.m):
            adj = np.array(
                [[bool(mask >> s & 1) for s in range(n_s)] for mask in self.adjacent_sets[i]],
                dtype=bool,
            ).reshape(len(self.labels), n_s)
            # coverers of f, with f(a_0) varying slowest
            reach = cov & adj[0]
            for a in range(1, g.ell):
                reach = (reach[:, None, :] | (cov & adj[a])[None, :, :]).reshape(-1, n_s)
            for s in range(n_s):
                columns[s].append(np.flatnonzero(reach[:, s]) + offset)
            universe.extend(
                encode_element(i + 1, (uids[x] for x in f)) for f in np.ndindex(*(n_u,) * g.ell)
            )
            offset += n_u**g.ell
        assert len(universe) == size
        incidence = []
        masks = []
        for s in range(n_s):
            idx = np.concatenate(columns[s]) if columns[s] else np.zeros(0, dtype=np.int64)
            incidence.append(tuple(universe[x] for x in idx))
            bits = np.zeros(size, dtype=bool)
            bits[idx] = True
            masks.append(int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"))
        out = SetCoverInstance(self.src.set_ids, tuple(universe), tuple(incidence), self.src.partition)
        out.__dict__["masks"] = tuple(masks)
        return out


def apply_reduction(
    src: SetCoverInstance,
    gadget: GapGadget,
    size_budget: int | None = None,
    rainbow_certified: bool = False,
) -> SetCoverInstance:
    """Materialize the gapped instance; refuses when ``m |U|^ell`` exceeds the size budget."""
    hc = HypercubeInstance(src, gadget)
    if not rainbow_certified:
        log.warning(
            "source is not certified to have one-set-per-part solutions; "
            "completeness only holds for such solutions"
        )
    out = hc.materialize(size_budget)
    if len(out.universe_ids) != hc.universe_size:
        raise GapCoverError("internal: reduced universe has the wrong size")
    return out


def covering_witness(hc: HypercubeInstance, chosen: Iterable[int]) -> list[GroupWitness]:
    """For a cover ``chosen`` of the reduced universe, exhibit per group the
    label vector that makes it a cover.

    Raises :class:`NotCovering` with an explicit uncovered element otherwise.
    When the source has no solution of size ``k``, every returned witness is
    ``"heavy"``.
    """
    chosen = sorted(set(chosen))
    missing = hc.uncovered_element(chosen)
    if missing is not None:
        raise NotCovering(missing)
    xmask = sum(1 << s for s in chosen)
    k = hc.gadget.k
    out = []
    for i, good in enumerate(hc.covering_vertices(chosen)):
        adj = hc.adjacent_sets[i]
        best = min(good, key=lambda a: (bin(xmask & adj[a]).count("1"), a))
        sets = tuple(s for s in chosen if adj[best] >> s & 1)
        kind = "subcover" if len(sets) <= k else "heavy"
        out.append(GroupWitness(i + 1, AVertex(i + 1, hc.labels[best]), kind, sets))
    return out
