import itertools
import json
import math

import numpy as np
import pytest

from secgame import (
    AgentProblem,
    GordonLoeb,
    GridSpec,
    InputError,
    Portfolio,
    ProtectionItem,
    Rational,
    check_monotone_investment,
    check_one_over_e,
    check_submodular_conditions,
    solve,
    solve_gl,
)
from oracles import golden_min


def gl_objective(alpha, loss, v):
    return lambda x: loss * v ** (alpha * x + 1.0) + x


def test_solve_gl_clamps_to_zero():
    # loss*alpha*(-log v) = 1 makes the interior formula -1/alpha < 0
    v = math.exp(-0.1)
    assert solve_gl(1.0, 10.0, v) == 0.0


def test_solve_gl_against_golden_section():
    x = solve_gl(1.0, 10.0, 0.5)
    assert x == pytest.approx(1.793161721942465, abs=1e-12)
    oracle = golden_min(gl_objective(1.0, 10.0, 0.5), 0.0, 5.0)
    assert x == pytest.approx(oracle, abs=1e-6)


def test_solve_gl_figure1_rise_then_fall():
    # investment is zero for small v, positive in the middle, zero near v=1
    for alpha in (0.5, 1.0, 1.5):
        xs = [solve_gl(alpha, 10.0, v) for v in np.linspace(0.001, 0.999, 500)]
        positive = [x > 0 for x in xs]
        first = positive.index(True)
        last = len(xs) - 1 - positive[::-1].index(True)
        assert first > 0 and last < len(xs) - 1
        assert all(positive[first:last + 1])


def test_solve_gl_endpoints():
    assert solve_gl(1.0, 10.0, 0.0) == 0.0
    assert solve_gl(1.0, 10.0, 1.0) == 0.0


def test_solve_rational_zero_vulnerability():
    sol = solve(AgentProblem(model=Rational(a=1.0, b=1.0), loss=10.0, vulnerability=0.0))
    assert sol.x_star == 0.0
    assert sol.objective == 0.0
    assert sol.at_boundary


def test_solve_gl_low_vulnerability_stays_at_zero():
    # objective slope at 0 is 1 + loss*alpha*v*log v = 1 - 0.4605 > 0
    sol = solve(AgentProblem(model=GordonLoeb(alpha=1.0), loss=10.0, vulnerability=0.01))
    assert sol.x_star == 0.0
    oracle = golden_min(gl_objective(1.0, 10.0, 0.01), 0.0, 0.1)
    assert oracle == pytest.approx(0.0, abs=1e-6)


def test_solve_gl_interior_matches_oracle():
    sol = solve(AgentProblem(model=GordonLoeb(alpha=1.0), loss=10.0, vulnerability=0.5))
    assert sol.x_star == pytest.approx(solve_gl(1.0, 10.0, 0.5), abs=1e-12)
    oracle = golden_min(gl_objective(1.0, 10.0, 0.5), 0.0, 5.0)
    assert sol.x_star == pytest.approx(oracle, abs=1e-6)
    assert not sol.at_boundary
    assert sol.fraction_of_expected_loss == pytest.approx(sol.x_star / 5.0)


def test_solve_and_solve_gl_agree_on_grid():
    model = GordonLoeb(alpha=1.0)
    for v in np.linspace(0.02, 0.98, 50):
        for loss in np.geomspace(0.1, 100.0, 50):
            direct = solve_gl(1.0, float(loss), float(v))
            sol = solve(AgentProblem(model=model, loss=float(loss), vulnerability=float(v)))
            assert abs(sol.x_star - direct) <= 1e-6


def test_objective_never_above_do_nothing():
    rng = np.random.default_rng(5)
    for _ in range(200):
        model = GordonLoeb(alpha=float(rng.uniform(0.1, 3.0)))
        loss = float(rng.uniform(0.1, 50.0))
        v = float(rng.uniform(0.0, 1.0))
        sol = solve(AgentProblem(model=model, loss=loss, vulnerability=v))
        assert sol.objective <= loss * v + 1e-12


def test_solve_rational_against_golden_section():
    rng = np.random.default_rng(17)
    for _ in range(50):
        model = Rational(a=float(rng.uniform(0.2, 3.0)), b=float(rng.uniform(0.2, 3.0)))
        loss = float(rng.uniform(0.5, 50.0))
        v = float(rng.uniform(0.05, 1.0))
        sol = solve(AgentProblem(model=model, loss=loss, vulnerability=v))
        oracle = golden_min(lambda x: loss * model.eval(x, v) + x, 0.0, loss * v + 1.0)
        assert sol.x_star == pytest.approx(oracle, abs=1e-6)


def test_solve_portfolio_exact_against_enumeration():
    rng = np.random.default_rng(23)
    for _ in range(30):
        k = int(rng.integers(1, 7))
        items = tuple(
            ProtectionItem(float(c), float(s))
            for c, s in zip(rng.uniform(0.2, 2.0, k), rng.uniform(0.05, 0.95, k))
        )
        loss = float(rng.uniform(0.5, 30.0))
        v = float(rng.uniform(0.05, 1.0))
        best_obj, best_x = loss * v, 0.0
        for r in range(1, k + 1):
            for subset in itertools.combinations(range(k), r):
                cost = sum(items[j].cost for j in subset)
                prod = math.prod(items[j].s(v) for j in subset)
                obj = loss * v * prod + cost
                if obj < best_obj:
                    best_obj, best_x = obj, cost
        sol = solve(AgentProblem(model=Portfolio(items=items), loss=loss, vulnerability=v))
        assert sol.x_star == pytest.approx(best_x, abs=1e-12)
        assert sol.objective == pytest.approx(best_obj, abs=1e-12)


def test_solve_portfolio_relaxed_against_golden_section():
    rng = np.random.default_rng(29)
    for _ in range(30):
        k = int(rng.integers(1, 8))
        items = tuple(
            ProtectionItem(float(c), float(s))
            for c, s in zip(rng.uniform(0.2, 2.0, k), rng.uniform(0.05, 0.95, k))
        )
        model = Portfolio(items=items, relaxed=True)
        loss = float(rng.uniform(0.5, 30.0))
        v = float(rng.uniform(0.05, 1.0))
        sol = solve(AgentProblem(model=model, loss=loss, vulnerability=v))
        oracle = golden_min(lambda x: loss * model.eval(x, v) + x, 0.0, loss * v + 1e-9)
        assert loss * model.eval(sol.x_star, v) + sol.x_star <= (
            loss * model.eval(oracle, v) + oracle + 1e-9
        )
        assert sol.x_star == pytest.approx(oracle, abs=1e-5)


def test_check_one_over_e_trivial_zero():
    problem = AgentProblem(model=GordonLoeb(alpha=1.0), loss=10.0, vulnerability=0.01)
    holds, ratio = check_one_over_e(problem)
    assert holds and ratio == 0.0


def test_check_one_over_e_gl_example():
    problem = AgentProblem(model=GordonLoeb(alpha=1.0), loss=10.0, vulnerability=0.5)
    holds, ratio = check_one_over_e(problem)
    assert holds
    assert ratio <= 0.36788


def test_check_one_over_e_randomized():
    rng = np.random.default_rng(31)
    for _ in range(1000):
        problem = AgentProblem(
            model=GordonLoeb(alpha=float(rng.uniform(0.05, 5.0))),
            loss=float(rng.uniform(0.05, 200.0)),
            vulnerability=float(rng.uniform(0.0, 1.0)),
        )
        holds, _ = check_one_over_e(problem)
        assert holds


def test_submodular_rational_passes():
    grid = GridSpec.regular(0.0, 5.0, 9, 0.05, 0.95, 9)
    report = check_submodular_conditions(Rational(a=1.0, b=2.0), grid)
    assert report.passed
    assert report.violations == []


def test_submodular_gl_fails_near_v_one():
    grid = GridSpec.regular(0.0, 5.0, 9, 0.05, 0.95, 9)
    report = check_submodular_conditions(GordonLoeb(alpha=1.0), grid)
    assert not report.passed
    kinds = {v.kind for v in report.violations}
    assert "d2p_dxdv" in kinds
    # the mixed-partial sign flips only for v above 1/e
    vs = [v.coords["v"] for v in report.violations if v.kind == "d2p_dxdv"]
    assert min(vs) > 0.3


def test_submodular_degenerate_portfolio_is_flat():
    # empty portfolio: p(x, v) = v exactly, all derivatives vanish
    grid = GridSpec.regular(0.0, 5.0, 5, 0.05, 0.95, 5)
    report = check_submodular_conditions(Portfolio(items=()), grid)
    assert report.passed


def test_submodular_needs_three_points_per_axis():
    with pytest.raises(InputError):
        check_submodular_conditions(Rational(a=1.0, b=1.0), GridSpec(x=(0.0, 1.0), v=(0.1, 0.2, 0.3)))


def test_monotone_investment_rational():
    report = check_monotone_investment(
        Rational(a=1.0, b=1.0), np.linspace(0.0, 1.0, 20), [1.0, 10.0, 100.0]
    )
    assert report.passed


def test_monotone_investment_gl_violates_in_v():
    report = check_monotone_investment(
        GordonLoeb(alpha=1.0), np.linspace(0.01, 0.99, 50), [10.0]
    )
    assert not report.passed
    assert any(v.kind == "x_star_v" for v in report.violations)


def test_monotone_investment_single_points_trivial():
    report = check_monotone_investment(GordonLoeb(alpha=1.0), [0.5], [10.0])
    assert report.passed


def test_monotone_investment_rejects_unsorted():
    with pytest.raises(InputError):
        check_monotone_investment(Rational(a=1.0, b=1.0), [0.5, 0.2], [1.0])


def test_submodularity_implies_monotonicity_over_corpus():
    corpus = [
        Rational(a=1.0, b=1.0),
        Rational(a=2.0, b=0.5),
        Rational(a=0.5, b=3.0),
        GordonLoeb(alpha=0.5),
        GordonLoeb(alpha=1.0),
    ]
    v_grid = np.linspace(0.05, 0.95, 10)
    l_grid = [0.5, 5.0, 50.0]
    grid = GridSpec(x=tuple(np.linspace(0.0, 5.0, 9)), v=tuple(v_grid))
    for model in corpus:
        sub = check_submodular_conditions(model, grid)
        if sub.passed:
            assert check_monotone_investment(model, v_grid, l_grid).passed


def test_report_json_schema():
    report = check_monotone_investment(
        GordonLoeb(alpha=1.0), np.linspace(0.01, 0.99, 20), [10.0]
    )
    doc = json.loads(report.to_json())
    assert set(doc) >= {"grid", "violations", "pass"}
    assert doc["pass"] is False
    for violation in doc["violations"]:
        assert {"v", "l", "kind"} <= set(violation)
