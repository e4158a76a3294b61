import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcotrace.eval import (
    EmptyPoolWarning,
    EvalOutcome,
    Report,
    aggregate_report,
    best_of_n,
    evaluate,
    objective_value,
    optimality_rate,
    optimality_ratio,
    optimum_value,
    parse_answer,
    ratio_of,
    validate_solution,
)
from gcotrace.graph import NP_HARD_TASKS, Graph, SizeClass, TaskInstance, TaskKind, sample_instance
from gcotrace.solvers import Solution, heuristic_solve, oracle_solve
from gcotrace.thoughts import generate_trace, render_trace

from helpers import plain_objective, worked_example


def test_parse_final_sentence():
    _, lines = worked_example(TaskKind.MIS)
    assert set(parse_answer(TaskKind.MIS, "\n".join(lines)).nodes) == {0, 1, 2, 7, 3, 5}
    assert parse_answer(TaskKind.MIS, "I have no idea.") is None


def test_parse_variants():
    assert parse_answer(TaskKind.TSP, "the optimal solution of tsp is [0, 2, 1, 0]").nodes == (0, 2, 1, 0)
    sol = parse_answer(TaskKind.MCS, "The optimal solution of MCS is: [1, 2], [3, 4].")
    assert sol.nodes == (1, 2) and sol.h_nodes == (3, 4)
    assert parse_answer(TaskKind.MCS, "only [1, 2]") is None
    last = parse_answer(TaskKind.MVC, "The minimum vertex cover is [1]. The minimum vertex cover is [1, 2].")
    assert last.nodes == (1, 2)
    assert parse_answer(TaskKind.MVC, "maybe [4, 5] or [6]").nodes == (6,)


@pytest.mark.parametrize("kind", list(TaskKind))
def test_parse_recovers_generated_solution(kind):
    for seed in range(40):
        inst = sample_instance(kind, SizeClass.SMALL if seed % 2 else SizeClass.LARGE, seed)
        trace = generate_trace(inst)
        assert parse_answer(kind, render_trace(trace)) == trace.final_solution


def test_validation_examples():
    inst, _ = worked_example(TaskKind.MVC)
    assert validate_solution(inst, Solution(TaskKind.MVC, (1, 2))) == (True, "")
    ok, reason = validate_solution(inst, Solution(TaskKind.MVC, (1,)))
    assert not ok and "(2, 7)" in reason
    mis, _ = worked_example(TaskKind.MIS)
    ok, reason = validate_solution(mis, Solution(TaskKind.MIS, (3, 4)))
    assert not ok and "3" in reason and "4" in reason


def test_validation_shapes():
    g = Graph(4, ((0, 1), (1, 2), (2, 3)))
    dia = TaskInstance(TaskKind.DIAMETER, g)
    assert validate_solution(dia, Solution(TaskKind.DIAMETER, (0, 1, 2, 3)))[0]
    assert not validate_solution(dia, Solution(TaskKind.DIAMETER, (0, 2)))[0]
    con = TaskInstance(TaskKind.CONNECTED, Graph(4, ((0, 1),)))
    assert validate_solution(con, Solution(TaskKind.CONNECTED, (1, 2, 3)))[0]
    assert not validate_solution(con, Solution(TaskKind.CONNECTED, (0, 1, 2)))[0]
    tsp, _ = worked_example(TaskKind.TSP)
    assert not validate_solution(tsp, Solution(TaskKind.TSP, (0, 1, 2, 0)))[0]
    ged, _ = worked_example(TaskKind.GED)
    assert not validate_solution(ged, Solution(TaskKind.GED, (0, 0, 1, 2, 3)))[0]
    assert not validate_solution(dia, Solution(TaskKind.MIS, (0,)))[0]


@pytest.mark.parametrize("kind", list(TaskKind))
def test_oracle_outputs_validate_and_objectives_agree(kind):
    limit = {TaskKind.TSP: 8, TaskKind.MCS: 5, TaskKind.GED: 6}.get(kind, 8)
    for seed in range(40):
        inst = sample_instance(kind, SizeClass.SMALL, seed, max_nodes=limit)
        sol = oracle_solve(inst)
        if sol is None:
            continue
        assert validate_solution(inst, sol)[0]
        assert objective_value(inst, sol) == plain_objective(inst, sol)


def test_objectives():
    tsp, _ = worked_example(TaskKind.TSP)
    tour = Solution(TaskKind.TSP, (0, 4, 1, 2, 6, 3, 5, 0))
    assert objective_value(tsp, tour) == plain_objective(tsp, tour) == 15301
    assert objective_value(TaskInstance(TaskKind.MVC, Graph(3)), Solution(TaskKind.MVC, ())) == 0
    with pytest.raises(ValueError):
        objective_value(tsp, Solution(TaskKind.TSP, (0, 1, 0)))


def test_ratio_conventions():
    assert ratio_of(0, 0) == 1.0
    assert ratio_of(3, 0) == 0.0
    assert ratio_of(0, 3) == 0.0
    assert ratio_of(11, 12) == pytest.approx(11 / 12)
    assert ratio_of(12, 11) == pytest.approx(11 / 12)


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_ratio_bounds_and_symmetry(a, b):
    r = ratio_of(a, b)
    assert 0.0 <= r <= 1.0
    assert r == ratio_of(b, a)
    assert (r == 1.0) == (a == b)


def test_optimality_ratio():
    g = Graph(24, tuple((2 * i, 2 * i + 1) for i in range(12)))
    inst = TaskInstance(TaskKind.MIS, g)
    eleven = Solution(TaskKind.MIS, tuple(2 * i for i in range(11)))
    assert optimality_ratio(inst, eleven, 12) == pytest.approx(11 / 12)
    assert optimality_ratio(inst, Solution(TaskKind.MIS, (0, 1)), 12) == 0.0
    assert optimality_ratio(inst, None, 12) == 0.0
    neighbor, _ = worked_example(TaskKind.NEIGHBOR)
    with pytest.raises(ValueError):
        optimality_ratio(neighbor, Solution(TaskKind.NEIGHBOR, ()), 4)


def test_isomorphic_ged_has_ratio_one():
    lab = Graph(3, ((0, 1),), labels=("C", "N", "O"))
    inst = TaskInstance(TaskKind.GED, lab, h=lab)
    assert optimality_ratio(inst, Solution(TaskKind.GED, (0, 1, 2)), 0) == 1.0
    assert optimality_ratio(inst, Solution(TaskKind.GED, (1, 0, 2)), 0) == 0.0


def test_beating_a_budgeted_reference_counts_as_optimal():
    inst, _ = worked_example(TaskKind.MCS)
    sol = generate_trace(inst).final_solution
    outcome = evaluate(inst, sol, optimum=3)
    assert outcome.optimal and outcome.ratio == 1.0


def test_evaluate_outcomes():
    inst, lines = worked_example(TaskKind.MIS)
    good = evaluate(inst, "\n".join(lines))
    assert good.valid and good.optimal and good.ratio == 1.0 and good.objective == 6
    assert evaluate(inst, "nothing") == EvalOutcome(None, False, "no answer found", None, False, 0.0)
    bad = evaluate(inst, "The maximum independent set is [3, 4].")
    assert not bad.valid and bad.ratio == 0.0
    dist, _ = worked_example(TaskKind.DISTANCE)
    longer = evaluate(dist, Solution(TaskKind.DISTANCE, (4, 8, 1, 3)))
    assert longer.optimal and longer.ratio == 1.0


@pytest.mark.parametrize("kind", sorted(NP_HARD_TASKS, key=lambda k: k.value))
def test_ratio_one_iff_optimal(kind):
    for seed in range(30):
        inst = sample_instance(kind, SizeClass.SMALL, seed)
        opt = optimum_value(inst)
        for cand in (heuristic_solve(inst), heuristic_solve(inst, "random", seed), generate_trace(inst).final_solution):
            o = evaluate(inst, cand, opt)
            assert 0.0 <= o.ratio <= 1.0
            assert (o.ratio == 1.0) == o.optimal
            assert o.valid


def test_optimality_rate():
    yes = EvalOutcome(None, True, "", 1, True, 1.0)
    no = EvalOutcome(None, True, "", 1, False, 0.5)
    assert optimality_rate([yes, yes, yes, no]) == 0.75
    assert optimality_rate([yes]) == 1.0
    with pytest.warns(EmptyPoolWarning):
        assert optimality_rate([]) == 0.0


def test_best_of_n():
    inst, _ = worked_example(TaskKind.MIS)
    invalid = "The maximum independent set is [3, 4]."
    five = "The maximum independent set is [0, 1, 2, 7, 3]."
    six = "The maximum independent set is [0, 1, 2, 7, 3, 5]."
    assert best_of_n(inst, [invalid, five, six]).objective == 6
    assert best_of_n(inst, [five, six, six]).ratio == 1.0
    all_bad = best_of_n(inst, [invalid, "nothing"])
    assert all_bad.ratio == 0.0 and all_bad.parsed == parse_answer(TaskKind.MIS, invalid)
    with pytest.raises(ValueError):
        best_of_n(inst, [])


def test_best_of_n_finds_optimum_among_noise():
    for seed in range(20):
        inst = sample_instance(TaskKind.MVC, SizeClass.SMALL, seed)
        pool = [heuristic_solve(inst, "random", s) for s in range(31)]
        pool.insert(seed % 32, render_trace(generate_trace(inst)))
        assert best_of_n(inst, pool).optimal


def test_report_accounting_and_rendering():
    yes = EvalOutcome(None, True, "", 1, True, 1.0)
    half = EvalOutcome(None, True, "", 1, False, 0.5)
    tagged = [(TaskKind.MIS, SizeClass.SMALL, yes), (TaskKind.MIS, SizeClass.SMALL, half),
              (TaskKind.NEIGHBOR, SizeClass.LARGE, yes)]
    report = aggregate_report(tagged, "corpus.jsonl")
    assert report.total.count == 3
    cell = report.cell(TaskKind.MIS, SizeClass.SMALL)
    assert cell.rate == 0.5 and cell.mean_ratio == 0.75 and cell.validity == 1.0
    again = Report.from_dict(report.to_dict())
    assert again.to_dict() == report.to_dict()
    text = report.render_text()
    assert "MIS" in text and "50.0" in text and "instances 3" in text
    reordered = aggregate_report(list(reversed(tagged)), "corpus.jsonl")
    assert reordered.to_dict() == report.to_dict()


def test_greedy_mis_ratio_is_lower_on_large_graphs():
    def mean_ratio(size):
        outs = []
        for seed in range(150):
            inst = sample_instance(TaskKind.MIS, size, seed)
            outs.append((TaskKind.MIS, size, evaluate(inst, heuristic_solve(inst))))
        return aggregate_report(outs).cell(TaskKind.MIS, size).mean_ratio

    small, large = mean_ratio(SizeClass.SMALL), mean_ratio(SizeClass.LARGE)
    assert large < small < 1.0
