import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapcover.errors import BudgetExceeded, GapCoverError
from gapcover.model import CnfFormula, MultipartiteGraph, SetCoverInstance, VectorSumInstance
from gapcover.oracles import (
    brute_clique,
    brute_ksum,
    brute_sat,
    brute_vectorsum,
    exact_opt,
    exhaustive_opt,
    greedy_cover,
)

from .conftest import random_instance


def test_one_set_covers_everything():
    inst = SetCoverInstance.build(["all", "a"], ["x", "y"], [["x", "y"], ["x"]])
    assert exact_opt(inst, 3).value == 1
    assert greedy_cover(inst).size == 1


def test_two_singletons():
    inst = SetCoverInstance.build(["a", "b"], ["x", "y"], [["x"], ["y"]])
    res = exact_opt(inst, 2)
    assert (res.value, res.witness) == (2, (0, 1))
    assert exact_opt(inst, 1).status == "exceeds"


def test_uncoverable_is_infeasible():
    inst = SetCoverInstance.build(["a"], ["x", "y"], [["x"]])
    for b in range(3):
        res = exact_opt(inst, b)
        assert res.status == "infeasible" and res.exceeds_bound
    with pytest.raises(GapCoverError, match="'y'"):
        greedy_cover(inst)


@pytest.mark.parametrize("seed", range(40))
def test_exact_agrees_with_exhaustive(seed):
    inst = random_instance(random.Random(seed), 10, 8, 0.3)
    for b in (2, 4, 10):
        a, e = exact_opt(inst, b), exhaustive_opt(inst, b)
        assert (a.status, a.value) == (e.status, e.value)
        if a.status == "opt":
            assert inst.covers(a.witness) and len(a.witness) == a.value


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_monotone_in_bound(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(1, 9), rng.randint(1, 7), 0.35)
    prev = None
    for b in range(0, 6):
        res = exact_opt(inst, b)
        if prev is not None and prev.status == "opt":
            assert res.status == "opt" and res.value == prev.value
        prev = res


def test_classic_greedy_suboptimal():
    # greedy takes the big middle set first and then needs two more
    u = [f"e{i}" for i in range(6)]
    inst = SetCoverInstance.build(
        ["left", "mid", "right"], u,
        [["e0", "e1", "e2"], ["e1", "e2", "e3", "e4"], ["e3", "e4", "e5"]],
    )
    g = greedy_cover(inst)
    assert inst.covers(g.cover)
    opt = exact_opt(inst, 3).value
    assert opt == 2 and g.size == 3
    assert g.size <= opt * (1 + math.log(len(u)))


def test_greedy_ties_go_to_smallest_id():
    inst = SetCoverInstance.build(["zeta", "alpha"], ["x"], [["x"], ["x"]])
    assert greedy_cover(inst).cover == (1,)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_greedy_valid_and_bounded(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, rng.randint(1, 12), rng.randint(1, 10), 0.3)
    res = exact_opt(inst, 12)
    if res.status == "infeasible":
        return
    g = greedy_cover(inst)
    assert inst.covers(g.cover)
    assert res.value <= g.size <= res.value * (1 + math.log(len(inst.universe_ids)))


def test_budget_raises():
    inst = random_instance(random.Random(1), 30, 25, 0.1)
    with pytest.raises(BudgetExceeded):
        exact_opt(inst, 30, budget=2)
    with pytest.raises(BudgetExceeded):
        exhaustive_opt(inst, 10, budget=100)


def test_brute_sat():
    assert not brute_sat(CnfFormula.of(1, [(1,), (-1,)]))
    ans = brute_sat(CnfFormula.of(2, [(1, 2), (-1,)]))
    assert ans.witness == (False, True)


def test_brute_clique_triangle():
    g = MultipartiteGraph.of([["a"], ["b"], ["c"]], [("a", "b"), ("b", "c"), ("a", "c")])
    ans = brute_clique(g, 3)
    assert ans and set(ans.witness) == {"a", "b", "c"}
    assert not brute_clique(MultipartiteGraph.of([["a"], ["b"], ["c"]], [("a", "b")]), 3)


def test_brute_clique_matches_direct_check():
    rng = random.Random(2)
    for _ in range(50):
        parts = [[f"{j}{i}" for i in range(rng.randint(1, 3))] for j in range(3)]
        edges = [(a, b) for x, y in itertools.combinations(parts, 2) for a in x for b in y if rng.random() < 0.5]
        es = {frozenset(e) for e in edges}
        expect = any(
            all(frozenset(p) in es for p in itertools.combinations(tri, 2))
            for tri in itertools.product(*parts)
        )
        assert bool(brute_clique(MultipartiteGraph.of(parts, edges), 3)) == expect


def test_brute_ksum_example():
    ans = brute_ksum([[1, 2], [-1, -3]])
    assert ans.witness == (0, 0)
    assert not brute_ksum([[1, 2], [1, 3]])


def test_brute_vectorsum():
    vs = VectorSumInstance.of([[(1, 0), (0, 1)], [(0, -1)]])
    assert brute_vectorsum(vs).witness == (1, 0)
    assert not brute_vectorsum(VectorSumInstance.of([[(1,)], [(1,)]]))
