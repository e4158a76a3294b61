import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcotrace.graph import (
    Graph,
    GraphError,
    InstanceParseError,
    SizeClass,
    TaskInstance,
    TaskKind,
    complement,
    isolated_nodes,
    neighbors,
    parse_instance_text,
    remove_nodes,
    render_instance_text,
    sample_instance,
)

from helpers import worked_example

TABLE6 = ("The graph has 7 nodes. The nodes are numbered from 0 to 6, and the edges are: "
          "[(0, 3), (2, 6), (3, 4), (4, 6)].")


def random_graph(rng, n, p=0.4):
    return Graph(n, tuple((u, v) for u, v in combinations(range(n), 2) if rng.random() < p))


def test_parse_connected_example():
    inst = parse_instance_text(TABLE6, TaskKind.CONNECTED)
    assert inst.g.n == 7
    assert len(inst.g.edges) == 4


def test_parse_single_node():
    text = "The graph has 1 nodes. The nodes are numbered from 0 to 0, and the edges are: []."
    inst = parse_instance_text(text, TaskKind.CONNECTED)
    assert inst.g.n == 1 and inst.g.edges == ()


@pytest.mark.parametrize("bad", [
    "The graph has 3 nodes. The nodes are numbered from 0 to 2, and the edges are: [(0, 0)].",
    "The graph has 3 nodes. The nodes are numbered from 0 to 2, and the edges are: [(0, 7)].",
    "The graph has 3 nodes. The nodes are numbered from 0 to 2, and the edges are: [(0, 1), (0 2)].",
    "The graph has 3 nodes.",
])
def test_parse_rejects_malformed(bad):
    with pytest.raises((InstanceParseError, GraphError)):
        parse_instance_text(bad, TaskKind.CONNECTED)


def test_parse_error_names_offending_token():
    text = "The graph has 3 nodes. The nodes are numbered from 0 to 2, and the edges are: [(0, 1), (1, 9)]."
    with pytest.raises((InstanceParseError, GraphError), match="9"):
        parse_instance_text(text, TaskKind.CONNECTED)


def test_missing_query_is_an_error():
    with pytest.raises((InstanceParseError, GraphError)):
        parse_instance_text(TABLE6, TaskKind.NEIGHBOR)


def test_render_tsp_and_ged_examples():
    tsp, _ = worked_example(TaskKind.TSP)
    assert "(0, 1, 8309)" in render_instance_text(tsp)
    ged, _ = worked_example(TaskKind.GED)
    assert "(0, 'Si')" in render_instance_text(ged)


def test_render_empty_neighbor():
    inst = TaskInstance(TaskKind.NEIGHBOR, Graph(2), query=(0, 1))
    assert render_instance_text(inst).endswith("edges are: []. The given nodes are [0, 1].")


@pytest.mark.parametrize("kind", list(TaskKind))
def test_round_trip(kind):
    for seed in range(100):
        size = SizeClass.SMALL if seed % 2 else SizeClass.LARGE
        inst = sample_instance(kind, size, seed)
        text = render_instance_text(inst)
        back = parse_instance_text(text, kind)
        assert back.g == inst.g and back.h == inst.h and back.query == inst.query
        assert render_instance_text(back) == text


def test_neighbors_example():
    inst, _ = worked_example(TaskKind.NEIGHBOR)
    assert neighbors(inst.g, 7) == [0, 1, 2, 3, 4, 8, 9]


def test_neighbors_isolated_and_range():
    g = Graph(3, ((0, 1),))
    assert neighbors(g, 2) == []
    with pytest.raises(GraphError):
        neighbors(g, 3)


def test_isolated_nodes_example():
    inst, _ = worked_example(TaskKind.MIS)
    assert isolated_nodes(inst.g) == [0, 1, 2, 7]


def test_remove_nothing_is_identity():
    g = Graph(4, ((0, 1), (2, 3)))
    assert remove_nodes(g, []) is g


def test_remove_keeps_ids_and_surviving_adjacency():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 8)
        g = random_graph(rng, n)
        drop = {u for u in range(n) if rng.random() < 0.3}
        r = remove_nodes(g, drop)
        assert r.nodes == [u for u in range(n) if u not in drop]
        for u, v in combinations(r.nodes, 2):
            assert r.has_edge(u, v) == g.has_edge(u, v)
        brute = [u for u in r.nodes if not any((u in e) for e in r.edges)]
        assert isolated_nodes(r) == brute


def test_remove_out_of_range():
    with pytest.raises(GraphError):
        remove_nodes(Graph(2), [5])


def test_complement_small_cases():
    assert complement(Graph(3, ((0, 1), (0, 2), (1, 2)))).edges == ()
    assert complement(Graph(2)).edges == ((0, 1),)
    with pytest.raises(GraphError):
        complement(Graph(2, ((0, 1),), weights=(3,)))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.tuples(st.integers(0, max(n - 1, 0)), st.integers(0, max(n - 1, 0)))))))
def test_complement_involution(case):
    n, pairs = case
    edges = {(min(u, v), max(u, v)) for u, v in pairs if u != v}
    g = Graph(n, tuple(sorted(edges)))
    assert complement(complement(g)) == g


def test_graph_invariants():
    with pytest.raises(GraphError):
        Graph(3, ((0, 1), (1, 0)))
    with pytest.raises(GraphError):
        Graph(3, ((1, 1),))
    with pytest.raises(GraphError):
        Graph(2, ((0, 1),), weights=(0,))
    with pytest.raises(GraphError):
        TaskInstance(TaskKind.TSP, Graph(3, ((0, 1),), weights=(5,)))
    with pytest.raises(GraphError):
        TaskInstance(TaskKind.NEIGHBOR, Graph(3), query=(1, 1))
    with pytest.raises(GraphError):
        TaskInstance(TaskKind.MIS, Graph(30), size_class=SizeClass.SMALL)
    with pytest.raises(GraphError):
        TaskInstance(TaskKind.GED, Graph(2, labels=("C", "N")), h=Graph(3, labels=("C", "N", "O")))


def test_sampler_is_deterministic():
    assert sample_instance(TaskKind.MIS, SizeClass.SMALL, 7) == sample_instance(TaskKind.MIS, SizeClass.SMALL, 7)


def test_sampler_ranges():
    for seed in range(1000):
        assert 4 <= sample_instance(TaskKind.MIS, SizeClass.SMALL, seed).g.n <= 14
        tsp = sample_instance(TaskKind.TSP, SizeClass.SMALL, seed)
        assert tsp.g.is_complete and all(w > 0 for w in tsp.g.weights)


def test_rendered_edges_ascending():
    for seed in range(50):
        inst = sample_instance(TaskKind.MVC, SizeClass.LARGE, seed)
        assert list(inst.g.edges) == sorted(set(inst.g.edges))
        assert all(u < v for u, v in inst.g.edges)
