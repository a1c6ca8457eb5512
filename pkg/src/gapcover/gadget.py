"""Gap-gadgets built from block-rainbow matrices, with exhaustive verifiers.

The gadget for ``(k, n, h)`` with ``h = 2^t`` is an ``m x n`` matrix ``M`` over
``[h]`` with ``m = n * t``. Group ``i`` of side A holds every label vector
``a`` in ``[h]^k``; ``a`` is adjacent to vertex ``b`` of part ``j`` iff
``M[i][b] == a[j]``. Soundness rests on one matrix property: every set of at
most ``h`` columns takes pairwise distinct values in some row.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import Any

import numpy as np

from .errors import GapCoverError, ParseError, check_budget
from .model import GapGadget, validate_gadget
from .universal import build_universal, explicit_regime

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AVertex:
    group: int  # 1..m
    labels: tuple[int, ...]  # each in 1..h


@dataclass(frozen=True)
class BVertex:
    part: int  # 1..k
    index: int  # 1..n


@dataclass(frozen=True)
class Verdict:
    ok: bool
    counterexample: Any = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def block_width(h: int) -> int:
    if h < 2 or h & (h - 1):
        raise GapCoverError(f"h must be 2^t with t >= 1, got {h}")
    return h.bit_length() - 1


def round_down_pow2(h: int) -> int:
    return 1 << (int(h).bit_length() - 1) if h >= 1 else 0


def label_vectors(h: int, k: int) -> list[tuple[int, ...]]:
    """The label vectors of one group in canonical (lexicographic) order."""
    return list(product(range(1, h + 1), repeat=k))


# ---------------------------------------------------------------------------
# matrix construction


def matrix_route(n: int, h: int) -> str:
    """``"universal"`` when an (n t, h t)-universal set of size n t is promised,
    otherwise ``"rainbow"`` (direct greedy on the column-set constraints)."""
    t = block_width(h)
    return "universal" if explicit_regime(n * t, h * t) else "rainbow"


def build_matrix(n: int, h: int, seed: int = 0, budget: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Rows of a matrix over ``[h]`` with ``n`` columns that is rainbow on every
    column set of size at most ``h`` in some row.

    Has exactly ``n log h`` rows unless the greedy route needed more.
    """
    t = block_width(h)
    m = n * t
    if n < 1:
        raise GapCoverError("n must be >= 1")
    if matrix_route(n, h) == "universal":
        us = build_universal(m, h * t, seed=seed, budget=budget)
        rows = [
            tuple(((s >> (c * t)) & (h - 1)) + 1 for c in range(n)) for s in us.strings
        ]
    else:
        rows = _rainbow_rows(n, h, seed, budget)
    if len(rows) < m:
        # extra rows never hurt: the rainbow condition is existential over rows
        rows = [rows[r % len(rows)] for r in range(m)]
    matrix = tuple(rows)
    if any(not 1 <= x <= h for row in matrix for x in row):
        raise GapCoverError("internal: matrix entry outside [h]")
    return matrix


def _rainbow_rows(n: int, h: int, seed: int, budget: int | None) -> list[tuple[int, ...]]:
    c = min(h, n)
    check_budget("rainbow matrix construction", math.comb(n, c) * n * h, budget)
    combos = np.array(list(combinations(range(n), c)), dtype=np.int64).reshape(-1, c)
    rng = random.Random(seed)
    # success[a] = chance that c - a fresh uniform values avoid a used values and each other
    success = np.array(
        [math.prod((h - q) / h for q in range(a, c)) for a in range(c + 1)], dtype=np.float64
    )
    rows = []
    pending = combos
    while len(pending):
        q = len(pending)
        used = np.zeros(q, dtype=np.int64)
        assigned = np.zeros(q, dtype=np.int64)
        dead = np.zeros(q, dtype=bool)
        flat = pending.ravel()
        order = np.argsort(flat, kind="stable")
        bounds = np.searchsorted(flat[order], np.arange(n + 1))
        row = []
        for col in range(n):
            touched = order[bounds[col] : bounds[col + 1]] // c
            gains = []
            for v in range(h):
                clash = dead[touched] | ((used[touched] >> v) & 1).astype(bool)
                gains.append(np.where(clash, 0.0, success[assigned[touched] + 1]).sum())
            best = max(gains)
            choices = [v for v, g in enumerate(gains) if g >= best - 1e-12]
            v = choices[0] if len(choices) == 1 else rng.choice(choices)
            dead[touched] |= ((used[touched] >> v) & 1).astype(bool)
            used[touched] |= 1 << v
            assigned[touched] += 1
            row.append(v + 1)
        rows.append(tuple(row))
        pending = pending[dead]
    return rows


def verify_M2(matrix, h: int, budget: int | None = None) -> Verdict:
    """Every column set of size <= h is rainbow in some row.

    Checking sets of size exactly ``min(h, n)`` suffices: rainbow rows for a
    set are rainbow for all its subsets. Counterexample columns are 1-based.
    """
    arr = np.asarray(matrix, dtype=np.int64)
    if arr.ndim != 2:
        arr = arr.reshape(len(matrix), -1)
    m, n = arr.shape
    c = min(h, n)
    check_budget("verify_M2", math.comb(n, c) * max(m, 1), budget)
    if c <= 1:
        return Verdict(True)
    for chunk in _chunks(combinations(range(n), c), 1 << 14):
        vals = np.sort(arr[:, chunk], axis=2)  # (m, Q, c)
        rainbow = (np.diff(vals, axis=2) != 0).all(axis=2)
        covered = rainbow.any(axis=0)
        bad = np.flatnonzero(~covered)
        if bad.size:
            cols = tuple(int(x) + 1 for x in chunk[bad[0]])
            return Verdict(False, cols, f"columns {cols} are not rainbow in any row")
    return Verdict(True)


# ---------------------------------------------------------------------------
# gadgets


def gadget_warnings(k: int, n: int, h: int, epsilon: float = 0.1) -> list[str]:
    """Asymptotic preconditions of the construction that do not hold here."""
    out = []
    logn = math.log2(n) if n > 1 else 0.0
    loglogn = math.log2(logn) if logn > 1 else 0.0
    if loglogn <= 0:
        out.append(f"log log n is not positive for n = {n}; asymptotic preconditions undefined")
        return out
    if k * loglogn > logn:
        out.append(f"k log log n = {k * loglogn:.3f} > log n = {logn:.3f}")
    cap = logn / ((2 + epsilon) * loglogn)
    if h > cap:
        out.append(f"h = {h} > log n / ((2 + eps) log log n) = {cap:.3f}")
    return out


def build_gadget(
    k: int, n: int, h: int, seed: int = 0, epsilon: float = 0.1, budget: int | None = None
) -> GapGadget:
    """Build a ``(k, n, m, h^k, h)`` gap-gadget.

    ``h`` is rounded down to a power of two (the effective ``h`` is the
    gadget's ``h`` field). Unmet asymptotic preconditions are logged, not
    enforced.
    """
    if k < 1 or n < 1:
        raise GapCoverError("k and n must be >= 1")
    h_eff = round_down_pow2(h)
    if h_eff < 2:
        raise GapCoverError(f"h must be >= 2, got {h}")
    if h_eff != h:
        log.warning("h = %d rounded down to %d", h, h_eff)
    for w in gadget_warnings(k, n, h_eff, epsilon):
        log.warning(w)
    matrix = build_matrix(n, h_eff, seed=seed, budget=budget)
    g = GapGadget(k, n, len(matrix), h_eff**k, h_eff, matrix)
    report = validate_gadget(g)
    if not report:
        raise GapCoverError(f"internal: {report}")
    return g


def adjacent(g: GapGadget, a: AVertex, b: BVertex) -> bool:
    if not 1 <= a.group <= g.m or len(a.labels) != g.k or any(not 1 <= x <= g.h for x in a.labels):
        raise GapCoverError(f"A-vertex out of range: {a}")
    if not 1 <= b.part <= g.k or not 1 <= b.index <= g.n:
        raise GapCoverError(f"B-vertex out of range: {b}")
    return g.matrix[a.group - 1][b.index - 1] == a.labels[b.part - 1]


def neighbors(g: GapGadget, a: AVertex) -> list[BVertex]:
    row = g.matrix[a.group - 1]
    return [
        BVertex(j + 1, b + 1) for j in range(g.k) for b in range(g.n) if row[b] == a.labels[j]
    ]


def row_witness(g: GapGadget, group: int, bs: tuple[int, ...]) -> AVertex:
    """The common neighbor of ``b_1 .. b_k`` read straight off row ``group``."""
    row = g.matrix[group - 1]
    return AVertex(group, tuple(row[b - 1] for b in bs))


def verify_M1(g: GapGadget) -> Verdict:
    for r, row in enumerate(g.matrix):
        for c, x in enumerate(row):
            if not 1 <= x <= g.h:
                return Verdict(False, (r + 1, c + 1), f"entry {x} at ({r + 1}, {c + 1}) outside [1, {g.h}]")
    return Verdict(True)


def verify_G3(g: GapGadget, budget: int | None = None) -> Verdict:
    """For every ``(b_1 .. b_k)`` and every group, some label vector of the
    group is adjacent to all of them. Searches all ``ell`` label vectors."""
    m1 = verify_M1(g)
    if not m1:
        return Verdict(False, m1.counterexample, "M1 precheck failed: " + m1.detail)
    labels = np.array(label_vectors(g.h, g.k), dtype=np.int64)  # (ell, k)
    check_budget("verify_G3", g.n**g.k * g.m * len(labels), budget)
    arr = g.array
    for i in range(g.m):
        # adj[j][a, b]: label vector a is adjacent to vertex b of part j
        adj = [(labels[:, j][:, None] == arr[i][None, :]) for j in range(g.k)]
        joint = adj[0]
        for j in range(1, g.k):
            joint = joint[..., None] & adj[j].reshape((len(labels),) + (1,) * j + (g.n,))
        ok = joint.any(axis=0)
        if not ok.all():
            bs = tuple(int(x) + 1 for x in np.argwhere(~ok)[0])
            return Verdict(False, (bs, i + 1), f"no vertex of group {i + 1} adjacent to all of {bs}")
    return Verdict(True)


def verify_G4(g: GapGadget, budget: int | None = None) -> Verdict:
    """No ``X`` within B of size at most ``h`` lets every group pick a label
    vector with at least ``k + 1`` neighbors in ``X``."""
    labels = np.array(label_vectors(g.h, g.k), dtype=np.int64)
    ell = len(labels)
    size_b = g.k * g.n
    sizes = range(g.k + 1, min(g.h, size_b) + 1)
    check_budget("verify_G4", sum(math.comb(size_b, c) for c in sizes) * g.m * ell, budget)
    arr = g.array
    part = np.repeat(np.arange(g.k), g.n)  # vertex v = j * n + b
    col = np.tile(np.arange(g.n), g.k)
    # adj[i, a, v]
    adj = labels[None, :, part] == arr[:, col][:, None, :]
    for c in sizes:
        for chunk in _chunks(combinations(range(size_b), c), 1 << 12):
            counts = adj[:, :, chunk].sum(axis=3)  # (m, ell, Q)
            heavy = counts >= g.k + 1
            every = heavy.any(axis=1).all(axis=0)  # (Q,)
            bad = np.flatnonzero(every)
            if bad.size:
                q = int(bad[0])
                xs = [BVertex(int(part[v]) + 1, int(col[v]) + 1) for v in chunk[q]]
                picks = [
                    AVertex(i + 1, tuple(int(x) for x in labels[int(np.argmax(heavy[i, :, q]))]))
                    for i in range(g.m)
                ]
                return Verdict(False, (xs, picks), f"|X| = {c} <= h = {g.h} with heavy vertices in every group")
    return Verdict(True)


def check_greedy_infeasibility(k: int, ell: int, universe_size: int, m: int, h: int) -> bool:
    """Whether ``k (1 + ell ln|U| + ln m) < h``: parameters under which greedy
    on the reduced instance would already separate the two cases."""
    return k * (1 + ell * math.log(universe_size) + math.log(m)) < h


# ---------------------------------------------------------------------------
# file format: header "k n m ell h", then the matrix row-major


def dump_gadget(g: GapGadget) -> str:
    lines = [f"{g.k} {g.n} {g.m} {g.ell} {g.h}"]
    lines += [" ".join(map(str, row)) for row in g.matrix]
    return "\n".join(lines) + "\n"


def load_gadget(text: str) -> GapGadget:
    lines = [ln for ln in text.splitlines()]
    if not lines or not lines[0].strip():
        raise ParseError("missing header 'k n m ell h'", 1)
    try:
        k, n, m, ell, h = (int(x) for x in lines[0].split())
    except ValueError:
        raise ParseError("header must be 'k n m ell h'", 1) from None
    rows = []
    for r in range(m):
        lineno = r + 2
        if lineno > len(lines):
            raise ParseError(f"expected {m} matrix rows, file ends after {r}", len(lines))
        try:
            row = tuple(int(x) for x in lines[lineno - 1].split())
        except ValueError:
            raise ParseError("non-integer matrix entry", lineno) from None
        if len(row) != n:
            raise ParseError(f"expected {n} entries, got {len(row)}", lineno)
        rows.append(row)
    return GapGadget(k, n, m, ell, h, tuple(rows))


def _chunks(it, size: int):
    buf = []
    for x in it:
        buf.append(x)
        if len(buf) == size:
            yield np.array(buf, dtype=np.int64)
            buf = []
    if buf:
        yield np.array(buf, dtype=np.int64)
