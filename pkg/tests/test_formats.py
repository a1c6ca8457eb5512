import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapcover import formats
from gapcover.errors import ParseError
from gapcover.gadget import build_gadget
from gapcover.hypercube import HypercubeInstance
from gapcover.model import CnfFormula, MultipartiteGraph, SetCoverInstance, VectorSumInstance, equal_partition

from .conftest import random_instance

ids = st.text(alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=8)


@st.composite
def instances(draw):
    uids = draw(st.lists(ids, unique=True, max_size=8))
    sids = draw(st.lists(ids, unique=True, max_size=8))
    rows = [tuple(u for u in uids if draw(st.booleans())) for _ in sids]
    partition = None
    if sids and draw(st.booleans()):
        cut = draw(st.integers(0, len(sids)))
        partition = ((0, cut), (cut, len(sids)))
    return SetCoverInstance(tuple(sids), tuple(uids), tuple(rows), partition)


@given(instances())
def test_instance_round_trip(inst):
    assert formats.load_instance(formats.dump_instance(inst)) == inst


def test_instance_round_trip_100_sets():
    inst = random_instance(random.Random(5), 100, 40, 0.3, partition=equal_partition([50, 50]))
    text = formats.dump_instance(inst)
    assert formats.load_instance(text) == inst
    assert formats.dump_instance(formats.load_instance(text)) == text


@given(st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.lists(st.integers(1, n).map(lambda v: v).flatmap(
        lambda v: st.sampled_from([v, -v])), min_size=1, max_size=4), max_size=6))))
def test_cnf_round_trip(data):
    n, clauses = data
    phi = CnfFormula.of(n, clauses)
    assert formats.load_cnf(formats.dump_cnf(phi)) == phi


def test_dimacs_example():
    assert formats.load_cnf("p cnf 2 1\n1 -2 0\n") == CnfFormula(2, ((1, -2),))


def test_dimacs_comments_and_multiline_clause():
    phi = formats.load_cnf("c hello\np cnf 3 2\n1 2\n 3 0 -1 0\n%\n0\n")
    assert phi.clauses == ((1, 2, 3), (-1,))


@pytest.mark.parametrize(
    "text, line",
    [
        ("p cnf 2 2\n1 -2 0\n", 2),  # truncated
        ("p cnf 2 1\n1 -2\n", 2),
        ("1 0\n", 1),
        ("p cnf 2 1\n1 x 0\n", 2),
        ("p cnf 1 1\n2 0\n", 2),
        ("p dnf 1 1\n1 0\n", 1),
    ],
)
def test_dimacs_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        formats.load_cnf(text)
    assert exc.value.line == line


names = st.text(alphabet="abcdefgh0123456789_", min_size=1, max_size=4)


@st.composite
def graphs(draw):
    k = draw(st.integers(1, 4))
    verts = draw(st.lists(names, unique=True, min_size=k, max_size=10))
    cuts = sorted(draw(st.lists(st.integers(0, len(verts)), min_size=k - 1, max_size=k - 1)))
    bounds = [0] + cuts + [len(verts)]
    parts = [verts[bounds[j]:bounds[j + 1]] for j in range(k)]
    part = {v: j for j, p in enumerate(parts) for v in p}
    pairs = [(a, b) for a in verts for b in verts if part[a] < part[b]]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return MultipartiteGraph.of(parts, edges)


@given(graphs())
def test_graph_round_trip(g):
    assert formats.load_graph(formats.dump_graph(g)) == g


def test_graph_errors():
    with pytest.raises(ParseError, match="line 1"):
        formats.load_graph("p 1 a\n")
    with pytest.raises(ParseError, match="unknown vertex") as exc:
        formats.load_graph("k 2\np 1 a\np 2 b\ne a c\n")
    assert exc.value.line == 4
    with pytest.raises(ParseError, match="inside a part"):
        formats.load_graph("k 2\np 1 a b\np 2 c\ne a b\n")
    with pytest.raises(ParseError, match="not listed"):
        formats.load_graph("k 2\np 1 a\n")


@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 3), st.data())
def test_vectors_round_trip(k, dim, bound, data):
    vec = st.tuples(*[st.integers(-bound, bound)] * dim)
    lists = [data.draw(st.lists(vec, max_size=4)) for _ in range(k)]
    vs = VectorSumInstance(k, dim, bound, tuple(tuple(x) for x in lists))
    assert formats.load_vectors(formats.dump_vectors(vs)) == vs


def test_vector_errors():
    with pytest.raises(ParseError) as exc:
        formats.load_vectors("2 2 1\n1 0 1\n3 0 0\n")
    assert exc.value.line == 3
    with pytest.raises(ParseError, match="outside"):
        formats.load_vectors("2 1 1\n1 5\n")


@given(st.lists(st.lists(st.integers(-50, 50), min_size=1, max_size=5), min_size=1, max_size=4))
def test_int_lists_round_trip(lists):
    assert formats.load_int_lists(formats.dump_int_lists(lists)) == lists


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_bundle_round_trip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    src = random_instance(rng, 2 * n, rng.randint(1, 3), 0.5, partition=equal_partition([n, n]))
    hc = HypercubeInstance(src, build_gadget(2, n, 2, seed=seed % 7))
    back = formats.load_bundle(formats.dump_bundle(hc))
    assert back.src == hc.src and back.gadget == hc.gadget


def test_bundle_rejects_wrong_size():
    src = SetCoverInstance.build(["a", "b"], ["u"], [["u"], []], [(0, 1), (1, 2)])
    text = formats.dump_bundle(HypercubeInstance(src, build_gadget(2, 1, 2)))
    with pytest.raises(ParseError, match="universe_size"):
        formats.load_bundle(text.replace('"universe_size": "1"', '"universe_size": "3"'))


def test_json_errors_have_lines():
    with pytest.raises(ParseError) as exc:
        formats.load_instance('{"format": "gapcover-instance/1",\n"set_ids": [1')
    assert exc.value.line == 2
    with pytest.raises(ParseError, match="not an instance"):
        formats.load_instance('{"format": "other"}')
    with pytest.raises(ParseError, match="missing field"):
        formats.load_instance('{"format": "gapcover-instance/1"}')


def test_provenance_is_sorted_and_tagged():
    text = formats.dump_provenance({"b": 1, "a": 2})
    assert text.index('"a"') < text.index('"b"')
    assert formats.load_provenance(text)["format"] == formats.PROVENANCE_FORMAT
