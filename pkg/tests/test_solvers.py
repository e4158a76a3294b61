from itertools import combinations

import pytest

from gcotrace.eval import objective_value, validate_solution
from gcotrace.graph import NP_HARD_TASKS, Graph, SizeClass, TaskInstance, TaskKind, complement, sample_instance
from gcotrace.solvers import (
    OBJECTIVE_SENSE,
    ObjectiveSense,
    OracleLimitError,
    Solution,
    heuristic_solve,
    oracle_solve,
    solve,
    solve_components,
    solve_diameter,
    solve_distance,
    solve_ged,
    solve_mcp,
    solve_mcs,
    solve_mis,
    solve_mvc,
    solve_neighbor,
    solve_tsp,
)

from helpers import plain_objective, worked_example


def inst_of(kind):
    return worked_example(kind)[0]


def test_worked_examples():
    assert solve_neighbor(inst_of(TaskKind.NEIGHBOR)).nodes == (0, 1, 2, 9)
    assert solve_distance(inst_of(TaskKind.DISTANCE)).nodes == (4, 8, 1, 3)
    assert solve_components(inst_of(TaskKind.CONNECTED)).nodes == (0, 1, 5)
    assert len(solve_diameter(inst_of(TaskKind.DIAMETER)).nodes) == 8
    assert set(solve_mcp(inst_of(TaskKind.MCP)).nodes) == {2, 8}
    mis = solve_mis(inst_of(TaskKind.MIS)).nodes
    assert len(mis) == 6 and {0, 1, 2, 7} <= set(mis)
    assert solve_mvc(inst_of(TaskKind.MVC)).nodes == (1, 2)
    assert len(solve_mcs(inst_of(TaskKind.MCS)).nodes) == 4
    ged = inst_of(TaskKind.GED)
    assert objective_value(ged, solve_ged(ged)) == 6


def test_tsp_example_weight():
    inst = inst_of(TaskKind.TSP)
    sol = solve_tsp(inst)
    assert sol.nodes[0] == 0 and sol.nodes[-1] == 0
    assert plain_objective(inst, sol) == 15301


def test_degenerate_cases():
    empty = Graph(5)
    assert solve_mvc(TaskInstance(TaskKind.MVC, empty)).nodes == ()
    assert solve_mis(TaskInstance(TaskKind.MIS, empty)).nodes == (0, 1, 2, 3, 4)
    assert len(solve_mcp(TaskInstance(TaskKind.MCP, empty)).nodes) == 1
    assert solve_components(TaskInstance(TaskKind.CONNECTED, empty)).nodes == (0, 1, 2, 3, 4)
    assert solve_neighbor(TaskInstance(TaskKind.NEIGHBOR, Graph(4, ((0, 1), (2, 3))), query=(0, 2))).nodes == ()
    assert solve_distance(TaskInstance(TaskKind.DISTANCE, Graph(4, ((0, 1),)), query=(0, 3))) is None
    k4 = Graph(4, tuple(combinations(range(4), 2)))
    assert len(solve_diameter(TaskInstance(TaskKind.DIAMETER, k4)).nodes) == 2


def test_triangle_tour_and_trivial_pairs():
    tri = Graph(3, ((0, 1), (0, 2), (1, 2)), weights=(3, 4, 5))
    assert solve_tsp(TaskInstance(TaskKind.TSP, tri)).nodes == (0, 1, 2, 0)
    k2 = Graph(2, ((0, 1),))
    assert len(solve_mcs(TaskInstance(TaskKind.MCS, k2, h=k2)).nodes) == 2
    lab = Graph(3, ((0, 1),), labels=("C", "N", "O"))
    sol = solve_ged(TaskInstance(TaskKind.GED, lab, h=lab))
    assert sol.nodes == (0, 1, 2)


def test_disconnected_diameter_rejected():
    with pytest.raises(ValueError):
        solve_diameter(TaskInstance(TaskKind.DIAMETER, Graph(3, ((0, 1),))))


def test_ged_unequal_sizes_rejected():
    with pytest.raises(ValueError):
        TaskInstance(TaskKind.GED, Graph(2, labels=("C", "C")), h=Graph(3, labels=("C", "C", "C")))


@pytest.mark.parametrize("kind", list(TaskKind))
def test_against_oracle(kind):
    limit = {TaskKind.TSP: 9, TaskKind.MCS: 6, TaskKind.GED: 6}.get(kind, 8)
    for seed in range(60):
        inst = sample_instance(kind, SizeClass.SMALL, seed, max_nodes=limit)
        got, want = solve(inst), oracle_solve(inst)
        if want is None:
            assert got is None
            continue
        assert validate_solution(inst, got)[0]
        assert plain_objective(inst, got) == plain_objective(inst, want)


def test_oracle_limits():
    with pytest.raises(OracleLimitError):
        oracle_solve(sample_instance(TaskKind.MIS, SizeClass.LARGE, 0))
    assert oracle_solve(inst_of(TaskKind.MIS)).nodes.__len__() == 6
    assert len(oracle_solve(TaskInstance(TaskKind.MCP, Graph(1))).nodes) == 1


@pytest.mark.parametrize("kind", list(TaskKind))
def test_solutions_validate_on_both_sizes(kind):
    for seed in range(20):
        for size in SizeClass:
            inst = sample_instance(kind, size, seed)
            sol = solve(inst)
            if sol is not None:
                assert validate_solution(inst, sol) == (True, "")


def test_mis_mvc_duality_and_clique_complement():
    for seed in range(100):
        inst = sample_instance(TaskKind.MIS, SizeClass.SMALL, seed)
        g = inst.g
        mvc = solve_mvc(TaskInstance(TaskKind.MVC, g))
        assert len(solve_mis(inst).nodes) + len(mvc.nodes) == g.n
        if g.n <= 10:
            clique = solve_mcp(TaskInstance(TaskKind.MCP, complement(g)))
            assert len(clique.nodes) == len(solve_mis(inst).nodes)


def test_tsp_orientation_invariance():
    for seed in range(30):
        inst = sample_instance(TaskKind.TSP, SizeClass.SMALL, seed)
        tour = list(solve_tsp(inst).nodes)
        assert objective_value(inst, Solution(TaskKind.TSP, tuple(tour))) == \
            objective_value(inst, Solution(TaskKind.TSP, tuple(reversed(tour))))
        assert tour[1] < tour[-2]


def test_large_pairs_flagged_when_budgeted():
    for seed in range(5):
        inst = sample_instance(TaskKind.GED, SizeClass.LARGE, seed)
        sol = solve(inst)
        assert sol.exact == (inst.g.n <= 10)


@pytest.mark.parametrize("kind", sorted(NP_HARD_TASKS, key=lambda k: k.value))
def test_heuristics_valid_and_never_better(kind):
    better = (lambda a, b: a > b) if OBJECTIVE_SENSE[kind] is ObjectiveSense.MAX else (lambda a, b: a < b)
    for seed in range(60):
        inst = sample_instance(kind, SizeClass.SMALL if seed % 2 else SizeClass.LARGE, seed)
        exact = objective_value(inst, solve(inst))
        for strategy in ("greedy", "random"):
            h = heuristic_solve(inst, strategy, seed)
            assert validate_solution(inst, h)[0]
            assert not better(objective_value(inst, h), exact)


def test_greedy_examples():
    assert set(heuristic_solve(inst_of(TaskKind.MVC)).nodes) == {1, 2}
    assert heuristic_solve(TaskInstance(TaskKind.MIS, Graph(4))).nodes == (0, 1, 2, 3)


def test_greedy_gap_exists_for_mis():
    gaps = sum(
        len(heuristic_solve(inst).nodes) < len(solve_mis(inst).nodes)
        for inst in (sample_instance(TaskKind.MIS, SizeClass.SMALL, s) for s in range(500))
    )
    assert gaps >= 1


def test_heuristic_rejects_polynomial_and_unknown_strategy():
    with pytest.raises(ValueError):
        heuristic_solve(inst_of(TaskKind.NEIGHBOR))
    with pytest.raises(ValueError):
        heuristic_solve(inst_of(TaskKind.MIS), "annealing")
