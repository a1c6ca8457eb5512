import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapcover.errors import BudgetExceeded, GapCoverError
from gapcover.gadget import (
    AVertex,
    BVertex,
    adjacent,
    block_width,
    build_gadget,
    build_matrix,
    check_greedy_infeasibility,
    dump_gadget,
    gadget_warnings,
    label_vectors,
    load_gadget,
    matrix_route,
    neighbors,
    row_witness,
    verify_G3,
    verify_G4,
    verify_M1,
    verify_M2,
)
from gapcover.model import GapGadget, validate_gadget


def test_h2_entries_are_bits():
    matrix = build_matrix(4, 2)
    assert {x for row in matrix for x in row} <= {1, 2}
    assert len(matrix) == 4


@pytest.mark.parametrize("n", [1, 3, 8])
def test_k1_h2_shape(n):
    g = build_gadget(1, n, 2)
    assert (g.ell, g.m) == (2, n)


def test_k2_n8_h2():
    g = build_gadget(2, 8, 2)
    assert (g.ell, g.m) == (4, 8)
    assert verify_G3(g) and verify_G4(g)


def test_ell_is_h_to_the_k():
    for k, n, h in [(1, 4, 4), (2, 5, 4), (3, 3, 2)]:
        g = build_gadget(k, n, h)
        assert g.ell == g.h**g.k
        assert g.m == n * block_width(h)


def test_singleton_columns_are_always_rainbow():
    assert verify_M2(((1, 1, 1),), 1)


def test_constant_matrix_fails_m2_and_g4():
    matrix = ((1,) * 4,) * 4
    res = verify_M2(matrix, 2)
    assert not res and len(res.counterexample) == 2
    g = GapGadget(2, 4, 4, 4, 2, matrix)
    # with h = 2 there is no |X| in k+1..h, so G4 holds vacuously; use k = 1
    g1 = GapGadget(1, 4, 4, 2, 2, matrix)
    res = verify_G4(g1)
    assert not res
    xs, picks = res.counterexample
    assert len(xs) == 2 and len(picks) == 4
    assert verify_G4(g)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 12), st.sampled_from([2, 4]), st.integers(0, 50))
def test_built_matrix_satisfies_m2(n, h, seed):
    matrix = build_matrix(n, h, seed=seed)
    assert verify_M2(matrix, h)
    assert len(matrix) >= n * block_width(h)


def test_route_selection():
    assert matrix_route(8, 2) == "rainbow"
    assert matrix_route(4096, 2) == "universal"


def test_universal_route_builds_valid_matrix():
    matrix = build_matrix(64, 2, budget=10**8)
    assert verify_M2(matrix, 2)


def test_g3_witness_formula():
    g = build_gadget(2, 4, 2, seed=3)
    for i in range(1, g.m + 1):
        for bs in itertools.product(range(1, g.n + 1), repeat=g.k):
            a = row_witness(g, i, bs)
            assert all(adjacent(g, a, BVertex(j + 1, b)) for j, b in enumerate(bs))


def test_adjacency_and_neighbors_agree():
    g = build_gadget(2, 3, 4, seed=1)
    for i in range(1, g.m + 1):
        for labels in label_vectors(g.h, g.k):
            a = AVertex(i, labels)
            direct = [BVertex(j, b) for j in range(1, 3) for b in range(1, 4) if adjacent(g, a, BVertex(j, b))]
            assert neighbors(g, a) == direct


def test_adjacent_range_checks():
    g = build_gadget(1, 2, 2)
    with pytest.raises(GapCoverError):
        adjacent(g, AVertex(99, (1,)), BVertex(1, 1))
    with pytest.raises(GapCoverError):
        adjacent(g, AVertex(1, (1,)), BVertex(1, 9))


def test_g3_fails_on_bad_entries():
    g = GapGadget(1, 2, 1, 2, 2, ((1, 3),))
    assert not verify_M1(g)
    assert not verify_G3(g)


def test_h_rounding_and_errors():
    assert build_gadget(1, 4, 5).h == 4
    with pytest.raises(GapCoverError):
        build_gadget(1, 4, 1)
    with pytest.raises(GapCoverError):
        block_width(6)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        verify_G4(build_gadget(1, 8, 4), budget=1)


def test_rebuild_is_byte_identical():
    assert dump_gadget(build_gadget(2, 8, 2, seed=7)) == dump_gadget(build_gadget(2, 8, 2, seed=7))


def test_file_round_trip():
    g = build_gadget(2, 5, 4, seed=2)
    text = dump_gadget(g)
    assert text.splitlines()[0] == f"2 5 {g.m} 16 4"
    back = load_gadget(text)
    assert back == g and validate_gadget(back)


def test_warnings_are_reported_not_enforced():
    ws = gadget_warnings(2, 8, 2)
    assert ws
    assert build_gadget(2, 8, 2)


def test_greedy_infeasibility_check():
    assert not check_greedy_infeasibility(2, 4, 5, 8, 2)
    assert check_greedy_infeasibility(1, 1, 1, 1, 4)
