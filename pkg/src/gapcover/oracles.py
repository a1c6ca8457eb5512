"""Ground-truth solvers: exact and greedy Set Cover, brute-force SAT, clique,
vector-sum and k-SUM. Every search takes an explicit work budget and raises
:class:`BudgetExceeded` rather than returning a guess."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Sequence

from .errors import BudgetExceeded, GapCoverError, check_budget, work_budget
from .hypercube import HypercubeInstance
from .model import CnfFormula, MultipartiteGraph, SetCoverInstance, VectorSumInstance


@dataclass(frozen=True)
class ExactResult:
    """``status`` is ``"opt"`` (``value`` is the optimum, at most ``bound``),
    ``"exceeds"`` (optimum is larger than ``bound``) or ``"infeasible"`` (some
    element is covered by no set)."""

    status: str
    bound: int
    value: int | None = None
    witness: tuple[int, ...] = ()

    @property
    def exceeds_bound(self) -> bool:
        return self.status != "opt"

    def describe(self, set_ids: Sequence[str] | None = None) -> str:
        if self.status == "opt":
            names = [set_ids[s] for s in self.witness] if set_ids else list(self.witness)
            return f"opt = {self.value}; witness {names}"
        if self.status == "infeasible":
            return "infeasible: some element is covered by no set"
        return f"opt > {self.bound}"


def _popcount(x: int) -> int:
    return bin(x).count("1")


def exact_opt(inst: SetCoverInstance, bound: int, budget: int | None = None) -> ExactResult:
    """Branch and bound: branch on the uncovered element with fewest candidate
    sets, prune with a max-coverage counting bound and a memo of failed
    (uncovered, remaining) states, iterative deepening on the cover size."""
    masks = list(inst.masks)
    full = inst.full_mask
    union = 0
    for mk in masks:
        union |= mk
    if union != full:
        return ExactResult("infeasible", bound)
    if full == 0:
        return ExactResult("opt", bound, 0, ())
    keep = _undominated(masks)
    n_u = len(inst.universe_ids)
    candidates = [[s for s in keep if masks[s] >> u & 1] for u in range(n_u)]
    order = sorted(range(n_u), key=lambda u: (len(candidates[u]), u))
    limit = work_budget(budget)
    nodes = 0
    failed: dict[int, int] = {}

    def search(uncovered: int, r: int, chosen: list[int]) -> bool:
        nonlocal nodes
        if not uncovered:
            return True
        if r == 0:
            return False
        if failed.get(uncovered, -1) >= r:
            return False
        nodes += 1
        if nodes > limit:
            raise BudgetExceeded("exact_opt search nodes", nodes, limit)
        best = max(_popcount(masks[s] & uncovered) for s in keep)
        if _popcount(uncovered) > r * best:
            failed[uncovered] = max(failed.get(uncovered, -1), r)
            return False
        pivot = next(u for u in order if uncovered >> u & 1)
        for s in candidates[pivot]:
            chosen.append(s)
            if search(uncovered & ~masks[s], r - 1, chosen):
                return True
            chosen.pop()
        failed[uncovered] = max(failed.get(uncovered, -1), r)
        return False

    for r in range(1, bound + 1):
        chosen: list[int] = []
        if search(full, r, chosen):
            return ExactResult("opt", bound, r, tuple(sorted(chosen)))
    return ExactResult("exceeds", bound)


def _undominated(masks: list[int]) -> list[int]:
    """Positions of sets not strictly contained in (or equal to an earlier) set."""
    keep = []
    for s, ms in enumerate(masks):
        if ms == 0:
            continue
        dominated = False
        for t, mt in enumerate(masks):
            if t != s and ms & mt == ms and (ms != mt or t < s):
                dominated = True
                break
        if not dominated:
            keep.append(s)
    return keep


def exhaustive_opt(inst: SetCoverInstance, bound: int, budget: int | None = None) -> ExactResult:
    """Plain subset enumeration by increasing size. Slow; used to check :func:`exact_opt`."""
    n = len(inst.set_ids)
    check_budget("exhaustive_opt", sum(math.comb(n, r) for r in range(bound + 1)), budget)
    union = 0
    for mk in inst.masks:
        union |= mk
    if union != inst.full_mask:
        return ExactResult("infeasible", bound)
    for r in range(bound + 1):
        for combo in combinations(range(n), r):
            if inst.covers(combo):
                return ExactResult("opt", bound, r, combo)
    return ExactResult("exceeds", bound)


def exact_opt_hypercube(hc: HypercubeInstance, bound: int, budget: int | None = None) -> ExactResult:
    """Exact optimum of the reduced instance without materializing it.

    Enumerates candidate covers by increasing size and tests each with the
    per-group coverage criterion; the witness is the lexicographically least
    minimum cover.
    """
    n = len(hc.set_ids)
    per_test = hc.gadget.m * hc.gadget.ell
    everything = tuple(range(n))
    check_budget("exact_opt_hypercube", per_test, budget)
    if not hc.covers(everything):
        return ExactResult("infeasible", bound)
    limit = work_budget(budget)
    spent = 0
    for r in range(min(bound, n) + 1):
        spent += math.comb(n, r) * per_test
        if spent > limit:
            raise BudgetExceeded("exact_opt_hypercube", spent, limit)
        for combo in combinations(range(n), r):
            if hc.covers(combo):
                return ExactResult("opt", bound, r, combo)
    return ExactResult("exceeds", bound)


@dataclass(frozen=True)
class GreedyResult:
    cover: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.cover)


def greedy_cover(inst: SetCoverInstance) -> GreedyResult:
    """Repeatedly take the set covering the most uncovered elements; ties go
    to the lexicographically smallest set id."""
    masks = inst.masks
    rank = {s: r for r, s in enumerate(sorted(range(len(masks)), key=lambda s: inst.set_ids[s]))}
    union = 0
    for mk in masks:
        union |= mk
    if union != inst.full_mask:
        missing = inst.uncovered(range(len(masks)))
        raise GapCoverError(f"element {missing[0]!r} is covered by no set")
    uncovered = inst.full_mask
    cover = []
    while uncovered:
        gains = [_popcount(mk & uncovered) for mk in masks]
        best = max(range(len(masks)), key=lambda s: (gains[s], -rank[s]))
        cover.append(best)
        uncovered &= ~masks[best]
    return GreedyResult(tuple(cover))


# ---------------------------------------------------------------------------
# source-problem oracles


@dataclass(frozen=True)
class Answer:
    exists: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.exists


def brute_sat(phi: CnfFormula, budget: int | None = None) -> Answer:
    """Witness is the lexicographically first satisfying assignment, ``False < True``."""
    check_budget("brute_sat", 2**phi.num_vars * max(len(phi.clauses), 1), budget)
    for bits in product((False, True), repeat=phi.num_vars):
        if phi.satisfied_by(bits):
            return Answer(True, bits)
    return Answer(False)


def brute_clique(g: MultipartiteGraph, k: int | None = None, budget: int | None = None) -> Answer:
    """Search for a ``k``-clique (default: one vertex in each part)."""
    k = g.k if k is None else k
    verts = g.vertices
    adj = {v: set() for v in verts}
    for a, b in g.edges:
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    limit = work_budget(budget)
    steps = 0

    def extend(clique: list[str], pool: list[str]) -> tuple | None:
        nonlocal steps
        if len(clique) == k:
            return tuple(clique)
        for i, v in enumerate(pool):
            steps += 1
            if steps > limit:
                raise BudgetExceeded("brute_clique", steps, limit)
            if len(clique) + len(pool) - i < k:
                return None
            found = extend(clique + [v], [w for w in pool[i + 1 :] if w in adj[v]])
            if found:
                return found
        return None

    if k == 0:
        return Answer(True, ())
    found = extend([], list(verts))
    return Answer(found is not None, found)


def brute_vectorsum(vs: VectorSumInstance, budget: int | None = None) -> Answer:
    """Witness is a tuple of 0-based positions, one per list."""
    check_budget("brute_vectorsum", math.prod(len(lst) for lst in vs.vectors), budget)
    for picks in product(*(range(len(lst)) for lst in vs.vectors)):
        total = [0] * vs.dim
        for lst, p in zip(vs.vectors, picks):
            for c, x in enumerate(lst[p]):
                total[c] += x
        if not any(total):
            return Answer(True, picks)
    return Answer(False)


def brute_ksum(lists: Sequence[Sequence[int]], target: int = 0, budget: int | None = None) -> Answer:
    """One integer from each list summing to ``target``; the last list is
    hashed. Witness is a tuple of 0-based positions."""
    if not lists:
        return Answer(target == 0, ())
    *head, last = lists
    check_budget("brute_ksum", math.prod(len(x) for x in head) + len(last), budget)
    where: dict[int, int] = {}
    for i, x in enumerate(last):
        where.setdefault(x, i)
    for picks in product(*(range(len(x)) for x in head)):
        rest = target - sum(lst[p] for lst, p in zip(head, picks))
        if rest in where:
            return Answer(True, picks + (where[rest],))
    return Answer(False)
