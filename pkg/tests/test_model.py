import random
from dataclasses import replace

import pytest

from gapcover.errors import GapCoverError
from gapcover.model import (
    CnfFormula,
    GapGadget,
    MultipartiteGraph,
    PipelineParams,
    SetCoverInstance,
    VectorSumInstance,
    equal_partition,
    pad_partition,
    validate_formula,
    validate_gadget,
    validate_graph,
    validate_instance,
    validate_vectorsum,
)
from gapcover.oracles import exact_opt

from .conftest import random_instance


def test_one_set_covering_everything_is_valid():
    inst = SetCoverInstance.build(["s"], ["a", "b"], [["a", "b"]])
    assert validate_instance(inst)
    assert inst.covers([0])


def test_unknown_universe_id_is_reported():
    inst = SetCoverInstance(("s",), ("a",), (("a", "zz"),))
    report = validate_instance(inst)
    assert not report
    assert "unknown universe id" in str(report)


def test_unequal_part_widths_is_reported():
    inst = SetCoverInstance.build([f"s{i}" for i in range(5)], ["a"], [["a"]] * 5, [(0, 2), (2, 5)])
    assert "unequal part widths" in str(validate_instance(inst))
    assert validate_instance(inst, equal_parts=False)


def _valid():
    return SetCoverInstance.build(["s1", "s2", "s3", "s4"], ["a", "b", "c"],
                                  [["a"], ["b"], ["c"], ["a", "c"]], [(0, 2), (2, 4)])


@pytest.mark.parametrize(
    "mutate",
    [
        lambda i: replace(i, set_ids=("s1", "s1", "s3", "s4")),
        lambda i: replace(i, universe_ids=("a", "a", "c")),
        lambda i: replace(i, incidence=i.incidence[:3]),
        lambda i: replace(i, incidence=(("a", "a"),) + i.incidence[1:]),
        lambda i: replace(i, incidence=(("q",),) + i.incidence[1:]),
        lambda i: replace(i, partition=((0, 2), (2, 3))),
        lambda i: replace(i, partition=((0, 3), (2, 4))),
        lambda i: replace(i, partition=((0, 2), (2, 9))),
        lambda i: replace(i, partition=((0, 1), (1, 4))),
    ],
)
def test_every_single_field_corruption_is_caught(mutate):
    assert validate_instance(_valid())
    assert not validate_instance(mutate(_valid()))


def test_pad_partition_sizes_2_3():
    inst = SetCoverInstance.build([f"s{i}" for i in range(5)], ["a"], [["a"]] * 5, [(0, 2), (2, 5)])
    padded = pad_partition(inst, 2)
    assert [b - a for a, b in padded.partition] == [3, 3]
    assert padded.set_ids[2] == "pad:1:1"
    assert padded.incidence[2] == ()
    assert validate_instance(padded)


def test_pad_partition_fixed_point():
    inst = _valid()
    assert pad_partition(inst, 2) is inst


def test_pad_partition_without_partition():
    with pytest.raises(GapCoverError, match="no partition"):
        pad_partition(SetCoverInstance.build(["s"], ["a"], [["a"]]), 1)


@pytest.mark.parametrize("seed", range(5))
def test_pad_partition_preserves_opt(seed):
    rng = random.Random(seed)
    inst = random_instance(rng, 7, 6, 0.35, partition=((0, 3), (3, 7)))
    padded = pad_partition(inst, 2)
    a, b = exact_opt(inst, 7), exact_opt(padded, 7)
    assert (a.status, a.value) == (b.status, b.value)


def test_masks_and_helpers():
    inst = _valid()
    assert inst.masks == (0b001, 0b010, 0b100, 0b101)
    assert inst.uncovered([0]) == ["b", "c"]
    assert inst.part_of()[3] == (2, 2)
    assert inst.is_rainbow([1, 2]) and not inst.is_rainbow([0, 1])
    again = SetCoverInstance.from_masks(inst.set_ids, inst.universe_ids, inst.masks, inst.partition)
    assert again == inst


def test_other_validators():
    assert validate_formula(CnfFormula.of(2, [(1, -2)]))
    assert not validate_formula(CnfFormula.of(1, [(2,)]))
    assert not validate_formula(CnfFormula.of(1, [()]))
    assert validate_graph(MultipartiteGraph.of([["a"], ["b"]], [("a", "b")]))
    assert not validate_graph(MultipartiteGraph.of([["a", "b"], ["c"]], [("a", "b")]))
    assert not validate_graph(MultipartiteGraph.of([["a"], ["a"]], []))
    assert validate_vectorsum(VectorSumInstance.of([[(1, 0)], [(-1, 0)]]))
    assert not validate_vectorsum(VectorSumInstance(2, 2, 1, (((2, 0),), ((0, 0),))))
    assert not validate_vectorsum(VectorSumInstance(2, 2, 1, (((1,),), ((0, 0),))))
    assert validate_gadget(GapGadget(1, 2, 2, 2, 2, ((1, 2), (2, 1))))
    assert "M1" in str(validate_gadget(GapGadget(1, 2, 1, 2, 2, ((1, 3),))))
    assert "ell" in str(validate_gadget(GapGadget(2, 2, 1, 2, 2, ((1, 2),))))


def test_formula_satisfaction():
    phi = CnfFormula.of(2, [(1, -2), (2,)])
    assert phi.satisfied_by((True, True))
    assert not phi.satisfied_by((False, True))


def test_pipeline_params_round_trip():
    p = PipelineParams(k=2, delta=0.5, k_effective=2, h_effective=2, ell=4, m=2, M=4,
                       universe_size=2 * 24**64, asymptotic={"h": None}, warnings=("w",))
    d = p.as_dict()
    assert d["universe_size"] == str(2 * 24**64)
    assert PipelineParams.from_dict(d) == p


def test_equal_partition():
    assert equal_partition([2, 0, 3]) == ((0, 2), (2, 2), (2, 5))
