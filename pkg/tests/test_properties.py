"""Invariants checked on arbitrary small graphs rather than sampler output."""
from itertools import combinations

from hypothesis import given, settings
from hypothesis import strategies as st

from gcotrace.eval import evaluate, parse_answer
from gcotrace.graph import Graph, TaskInstance, TaskKind, complement, parse_instance_text, render_instance_text
from gcotrace.solvers import heuristic_solve, oracle_solve, solve
from gcotrace.thoughts import generate_trace, render_trace, verify_trace

from helpers import plain_objective

LABELS = ("C", "N", "O")


@st.composite
def graphs(draw, lo=1, hi=8):
    n = draw(st.integers(lo, hi))
    pairs = list(combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph(n, tuple(p for p, k in zip(pairs, keep) if k))


@st.composite
def instances(draw, kind):
    if kind is TaskKind.TSP:
        n = draw(st.integers(2, 7))
        pairs = list(combinations(range(n), 2))
        weights = draw(st.lists(st.integers(1, 50), min_size=len(pairs), max_size=len(pairs)))
        return TaskInstance(kind, Graph(n, tuple(pairs), tuple(weights)))
    if kind is TaskKind.GED:
        g = draw(graphs(1, 6))
        h = draw(graphs(g.n, g.n))
        lg = tuple(draw(st.sampled_from(LABELS)) for _ in range(g.n))
        lh = tuple(draw(st.sampled_from(LABELS)) for _ in range(g.n))
        return TaskInstance(kind, Graph(g.n, g.edges, labels=lg), Graph(h.n, h.edges, labels=lh))
    if kind is TaskKind.MCS:
        return TaskInstance(kind, draw(graphs(1, 5)), draw(graphs(1, 5)))
    if kind is TaskKind.DIAMETER:
        n = draw(st.integers(2, 8))
        extra = draw(graphs(n, n))
        path = {(i, i + 1) for i in range(n - 1)}
        return TaskInstance(kind, Graph(n, tuple(sorted(path | set(extra.edges)))))
    g = draw(graphs(2 if kind in (TaskKind.NEIGHBOR, TaskKind.DISTANCE) else 1))
    query = None
    if kind in (TaskKind.NEIGHBOR, TaskKind.DISTANCE):
        a, b = draw(st.lists(st.integers(0, g.n - 1), min_size=2, max_size=2, unique=True))
        query = (a, b)
    return TaskInstance(kind, g, query=query)


any_instance = st.sampled_from(list(TaskKind)).flatmap(instances)


@settings(max_examples=300, deadline=None)
@given(any_instance)
def test_solver_matches_oracle(inst):
    got, want = solve(inst), oracle_solve(inst)
    if want is None:
        assert got is None
    else:
        assert plain_objective(inst, got) == plain_objective(inst, want)


@settings(max_examples=300, deadline=None)
@given(any_instance)
def test_trace_replays_and_parses(inst):
    trace = generate_trace(inst)
    text = render_trace(trace)
    assert verify_trace(inst, text).ok
    assert parse_answer(inst.kind, text) == trace.final_solution
    assert evaluate(inst, text).optimal


@settings(max_examples=200, deadline=None)
@given(any_instance)
def test_instance_text_round_trip(inst):
    text = render_instance_text(inst)
    back = parse_instance_text(text, inst.kind)
    assert render_instance_text(back) == text


@settings(max_examples=200, deadline=None)
@given(graphs(1, 10))
def test_mis_mvc_duality_and_complement(g):
    mis = solve(TaskInstance(TaskKind.MIS, g))
    mvc = solve(TaskInstance(TaskKind.MVC, g))
    assert len(mis.nodes) + len(mvc.nodes) == g.n
    assert len(solve(TaskInstance(TaskKind.MCP, complement(g))).nodes) == len(mis.nodes)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([TaskKind.MIS, TaskKind.MVC, TaskKind.MCP, TaskKind.TSP, TaskKind.GED, TaskKind.MCS])
       .flatmap(instances))
def test_heuristic_ratio_bounded(inst):
    outcome = evaluate(inst, heuristic_solve(inst))
    assert outcome.valid
    assert 0.0 <= outcome.ratio <= 1.0
    assert (outcome.ratio == 1.0) == outcome.optimal
