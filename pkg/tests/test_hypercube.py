import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapcover.errors import BudgetExceeded, ParseError, ReductionError
from gapcover.gadget import build_gadget
from gapcover.hypercube import (
    HypercubeElement,
    HypercubeInstance,
    NotCovering,
    apply_reduction,
    covering_witness,
    decode_element,
    encode_element,
)
from gapcover.model import SetCoverInstance, equal_partition
from gapcover.oracles import exact_opt, exact_opt_hypercube

from .conftest import planted_rainbow, random_partitioned


def test_element_id_format():
    assert encode_element(1, ["u1", "u1"]) == "hc:1:(u1,u1)"
    assert encode_element(1, ["u1", "u2"]) != encode_element(1, ["u2", "u1"])


@given(st.integers(1, 99), st.lists(st.text(min_size=0, max_size=5), min_size=1, max_size=5))
def test_element_ids_round_trip(group, assignment):
    uid = encode_element(group, assignment)
    assert decode_element(uid) == HypercubeElement(group, tuple(assignment))


def test_decode_rejects_garbage():
    with pytest.raises(ParseError):
        decode_element("f:1:(a)")
    with pytest.raises(ParseError):
        decode_element("hc:1:(a(b)")


def _small(seed, n=2, n_elems=3):
    rng = random.Random(seed)
    return random_partitioned(rng, 2, n, n_elems, 0.5)


@pytest.mark.parametrize("seed", range(8))
def test_universe_size_and_set_ids(seed):
    src = _small(seed, n=1 + seed % 3)
    g = build_gadget(2, src.partition[0][1], 2, seed=seed)
    out = apply_reduction(src, g, rainbow_certified=True)
    assert len(out.universe_ids) == g.m * len(src.universe_ids) ** g.ell
    assert len(set(out.universe_ids)) == len(out.universe_ids)
    assert out.set_ids == src.set_ids
    assert out.partition == src.partition


def test_materialized_edges_follow_the_rule():
    src = _small(3, n=2)
    g = build_gadget(2, 2, 2, seed=1)
    hc = HypercubeInstance(src, g)
    out = hc.materialize()
    rng = random.Random(0)
    for uid in rng.sample(out.universe_ids, 60):
        f = decode_element(uid)
        x = out.universe_index[uid]
        for s in range(len(src.set_ids)):
            assert bool(out.masks[s] >> x & 1) == hc.element_covered_by(f, s)


@pytest.mark.parametrize("seed", range(20))
def test_implicit_coverage_matches_materialized(seed):
    src = _small(seed, n=2, n_elems=2)
    hc = HypercubeInstance(src, build_gadget(2, 2, 2, seed=seed))
    out = hc.materialize()
    for r in range(len(src.set_ids) + 1):
        for combo in itertools.combinations(range(len(src.set_ids)), r):
            assert out.covers(combo) == hc.covers(combo)
            missing = hc.uncovered_element(combo)
            if missing is not None:
                uid = encode_element(missing.group, missing.assignment)
                assert uid in out.uncovered(combo)


@pytest.mark.parametrize("seed", range(10))
def test_planted_rainbow_cover_carries_over(seed):
    rng = random.Random(seed)
    src, picks = planted_rainbow(rng, 2, 3, 3)
    hc = HypercubeInstance(src, build_gadget(2, 3, 2, seed=seed))
    assert hc.covers(picks)
    witnesses = covering_witness(hc, picks)
    assert len(witnesses) == hc.gadget.m
    assert all(w.kind == "subcover" for w in witnesses)


def test_covering_witness_reports_missing_element():
    src = SetCoverInstance.build(["a", "b"], ["u", "v"], [["u"], []], equal_partition([1, 1]))
    hc = HypercubeInstance(src, build_gadget(2, 1, 2))
    with pytest.raises(NotCovering) as exc:
        covering_witness(hc, [0, 1])
    assert exc.value.element.group == 1


def test_shape_checks():
    src = SetCoverInstance.build(["a", "b", "c"], ["u"], [["u"]] * 3, [(0, 1), (1, 3)])
    with pytest.raises(ReductionError, match="widths"):
        HypercubeInstance(src, build_gadget(2, 1, 2))
    with pytest.raises(ReductionError, match="no partition"):
        HypercubeInstance(SetCoverInstance.build(["a"], ["u"], [["u"]]), build_gadget(1, 1, 2))
    with pytest.raises(ReductionError, match="parts"):
        HypercubeInstance(_small(0), build_gadget(3, 2, 2))


def test_size_budget():
    src = _small(1, n=2, n_elems=3)
    with pytest.raises(BudgetExceeded):
        apply_reduction(src, build_gadget(2, 2, 2), size_budget=10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_implicit_and_explicit_exact_agree(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    src = random_partitioned(rng, 2, n, rng.randint(1, 3), 0.45)
    hc = HypercubeInstance(src, build_gadget(2, n, 2, seed=seed % 5))
    a = exact_opt(hc.materialize(), 3)
    b = exact_opt_hypercube(hc, 3)
    assert (a.status, a.value) == (b.status, b.value)
