"""Single-agent optimal security investment.

Minimizes loss * p(x, v) + x over x >= 0 for each breach-model family:
closed form for GordonLoeb, analytic first-order condition for Rational,
breakpoint enumeration for portfolios. Also numerical checkers for the
submodularity conditions that guarantee monotone comparative statics, and
for the 1/e bound on investment relative to the expected loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .breach_models import (
    BreachModel,
    GordonLoeb,
    Portfolio,
    Rational,
    knapsack_relaxed,
    _log_weights,
)
from .errors import InputError
from .reports import MonotonicityReport, Violation

ONE_OVER_E = 1.0 / math.e


@dataclass(frozen=True)
class AgentProblem:
    """An agent's investment problem: breach model, loss size, vulnerability."""

    model: BreachModel
    loss: float
    vulnerability: float

    def __post_init__(self):
        if not self.loss > 0:
            raise InputError(f"loss must be positive, got {self.loss}")
        if not 0.0 <= self.vulnerability <= 1.0:
            raise InputError(f"vulnerability must lie in [0, 1], got {self.vulnerability}")


@dataclass(frozen=True)
class InvestmentSolution:
    x_star: float
    objective: float
    at_boundary: bool
    fraction_of_expected_loss: float


def solve_gl(alpha: float, loss: float, v: float) -> float:
    """Closed-form optimal investment for the GordonLoeb family.

    Interior solution -log(-loss*alpha*log v) / (alpha*log v) - 1/alpha,
    clamped at zero. v = 0 and v = 1 return 0 (nothing to protect / the
    interior formula is singular and investment vanishes there).
    """
    if not alpha > 0:
        raise InputError(f"alpha must be positive, got {alpha}")
    if not loss > 0:
        raise InputError(f"loss must be positive, got {loss}")
    if not 0.0 <= v <= 1.0:
        raise InputError(f"vulnerability must lie in [0, 1], got {v}")
    if v <= 0.0 or v >= 1.0:
        return 0.0
    log_v = math.log(v)
    x = -math.log(-loss * alpha * log_v) / (alpha * log_v) - 1.0 / alpha
    return max(0.0, x)


def _solve_rational(model: Rational, loss: float, v: float) -> float:
    # first-order condition: (a x + 1)**(b+1) = loss*v*a*b
    lvab = loss * v * model.a * model.b
    if lvab <= 1.0:
        return 0.0
    return (lvab ** (1.0 / (model.b + 1.0)) - 1.0) / model.a


def _solve_portfolio_exact(items, loss: float, v: float):
    """Exact portfolio: candidate spends are subset cost sums.

    DFS over subsets minimizing loss*v*prod(s) + cost; branches whose cost
    alone already exceeds the incumbent objective cannot improve. Returns
    (x, objective) so the caller need not re-solve the knapsack at the
    budget boundary, where summation order could flip affordability.
    """
    n = len(items)
    costs = [it.cost for it in items]
    svals = [it.s(v) for it in items]
    order = sorted(range(n), key=lambda j: costs[j])
    best_obj = loss * v
    best_x = 0.0

    def rec(i, cost, prod):
        nonlocal best_obj, best_x
        obj = loss * v * prod + cost
        if obj < best_obj or (obj == best_obj and cost < best_x):
            best_obj, best_x = obj, cost
        if i == n or cost + costs[order[i]] >= best_obj:
            return
        j = order[i]
        rec(i + 1, cost + costs[j], prod * svals[j])
        rec(i + 1, cost, prod)

    rec(0, 0.0, 1.0)
    return best_x, best_obj


def _solve_portfolio_relaxed(items, loss: float, v: float) -> float:
    """Relaxed portfolio: walk the greedy breakpoints of the piecewise-linear
    log-multiplier and solve each segment's stationary point analytically.

    The objective loss*v*exp(-W(x)) + x is convex (W concave piecewise
    linear), so the first segment whose left derivative is non-negative
    ends the walk.
    """
    costs = [it.cost for it in items]
    weights = _log_weights(items, v)
    order = sorted(range(len(costs)), key=lambda j: -(weights[j] / costs[j]))
    x0 = 0.0
    term = loss * v  # loss*v*multiplier at the current breakpoint
    for j in order:
        if weights[j] <= 0.0:
            break
        d = weights[j] / costs[j]
        if d * term <= 1.0:
            # objective already increasing at x0: convexity => minimum here
            return x0
        # stationary point of loss*v*m0*exp(-d (x - x0)) + x on this segment
        xs = x0 + math.log(d * term) / d
        x1 = x0 + costs[j]
        if xs < x1:
            return xs
        x0 = x1
        term *= math.exp(-weights[j])
    return x0


def solve(problem: AgentProblem) -> InvestmentSolution:
    """Global minimizer of x -> loss * p(x, v) + x over x >= 0.

    Ties are broken toward the smaller spend: investing nothing wins
    whenever it is at least as good as the computed optimum.
    """
    model, loss, v = problem.model, problem.loss, problem.vulnerability
    objective = None
    if isinstance(model, GordonLoeb):
        x = solve_gl(model.alpha, loss, v)
    elif isinstance(model, Rational):
        x = _solve_rational(model, loss, v)
    elif isinstance(model, Portfolio):
        if model.relaxed:
            x = _solve_portfolio_relaxed(model.items, loss, v)
        else:
            x, objective = _solve_portfolio_exact(model.items, loss, v)
    else:
        raise InputError(f"unknown breach model {model!r}")
    if objective is None:
        objective = loss * model.eval(x, v) + x
    do_nothing = loss * v
    if x > 0.0 and objective >= do_nothing:
        x, objective = 0.0, do_nothing
    expected_loss = loss * v
    fraction = x / expected_loss if expected_loss > 0 else 0.0
    return InvestmentSolution(
        x_star=x,
        objective=objective,
        at_boundary=(x == 0.0),
        fraction_of_expected_loss=fraction,
    )


def check_one_over_e(problem: AgentProblem):
    """Theorem-2-style check: x*/(loss*v) <= 1/e for log-convex families.

    Returns (bound_holds, ratio). The caller asserts log-convexity of
    x -> p(x, v); GordonLoeb and relaxed portfolios qualify.
    """
    sol = solve(problem)
    denom = problem.loss * problem.vulnerability
    ratio = sol.x_star / denom if denom > 0 else 0.0
    return ratio <= ONE_OVER_E + 1e-9, ratio


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (x, v) evaluation grid."""

    x: tuple
    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(t) for t in self.x))
        object.__setattr__(self, "v", tuple(float(t) for t in self.v))

    @staticmethod
    def regular(x_lo, x_hi, nx, v_lo, v_hi, nv) -> "GridSpec":
        xs = [x_lo + i * (x_hi - x_lo) / (nx - 1) for i in range(nx)]
        vs = [v_lo + i * (v_hi - v_lo) / (nv - 1) for i in range(nv)]
        return GridSpec(x=tuple(xs), v=tuple(vs))


# violations smaller than this are finite-difference noise, not sign failures
_SIGN_TOL = 1e-7


def check_submodular_conditions(model: BreachModel, grid: GridSpec) -> MonotonicityReport:
    """Numerical sign check of dp/dx <= 0 and d2p/dxdv <= 0 over the grid.

    Uses the analytic x-derivative where available and central finite
    differences otherwise; cells needing one-sided stencils at the domain
    boundary are marked low-confidence.
    """
    xs, vs = grid.x, grid.v
    if len(xs) < 3 or len(vs) < 3:
        raise InputError("grid needs at least 3 points per axis")
    hx = 1e-4 * (max(xs) - min(xs))
    hv = 1e-4 * (max(vs) - min(vs))
    analytic = isinstance(model, (GordonLoeb, Rational))
    violations = []
    for x in xs:
        for v in vs:
            one_sided = False
            # dp/dx
            if analytic:
                dpdx = model.eval_dx(x, v)
            else:
                if x - hx >= 0:
                    dpdx = (model.eval(x + hx, v) - model.eval(x - hx, v)) / (2 * hx)
                else:
                    dpdx = (model.eval(x + hx, v) - model.eval(x, v)) / hx
                    one_sided = True
            # d2p/dxdv via a v-difference of the x-derivative
            v_lo, v_hi = v - hv, v + hv
            if v_lo < 0.0:
                v_lo, one_sided = v, True
            if v_hi > 1.0:
                v_hi, one_sided = v, True
            span = v_hi - v_lo
            if analytic:
                d2 = (model.eval_dx(x, v_hi) - model.eval_dx(x, v_lo)) / span
            else:
                def dp(vv):
                    if x - hx >= 0:
                        return (model.eval(x + hx, vv) - model.eval(x - hx, vv)) / (2 * hx)
                    return (model.eval(x + hx, vv) - model.eval(x, vv)) / hx

                d2 = (dp(v_hi) - dp(v_lo)) / span
            if dpdx > _SIGN_TOL:
                violations.append(Violation("dp_dx", {"x": x, "v": v}, dpdx, one_sided))
            if d2 > _SIGN_TOL:
                violations.append(Violation("d2p_dxdv", {"x": x, "v": v}, d2, one_sided))
    return MonotonicityReport(
        grid={"x": list(xs), "v": list(vs)},
        violations=violations,
        passed=not violations,
    )


def check_monotone_investment(model: BreachModel, v_grid: Sequence[float],
                              l_grid: Sequence[float]) -> MonotonicityReport:
    """Checks x*(v, l) is componentwise non-decreasing over the grids."""
    v_grid = [float(t) for t in v_grid]
    l_grid = [float(t) for t in l_grid]
    if any(b < a for a, b in zip(v_grid, v_grid[1:])) or any(
        b < a for a, b in zip(l_grid, l_grid[1:])
    ):
        raise InputError("grids must be sorted ascending")
    tol = 1e-9  # solver noise
    xstar = {
        (v, l): solve(AgentProblem(model=model, loss=l, vulnerability=v)).x_star
        for v in v_grid
        for l in l_grid
    }
    violations = []
    for l in l_grid:
        for v_a, v_b in zip(v_grid, v_grid[1:]):
            drop = xstar[(v_a, l)] - xstar[(v_b, l)]
            if drop > tol:
                violations.append(Violation("x_star_v", {"v": v_b, "l": l}, drop))
    for v in v_grid:
        for l_a, l_b in zip(l_grid, l_grid[1:]):
            drop = xstar[(v, l_a)] - xstar[(v, l_b)]
            if drop > tol:
                violations.append(Violation("x_star_l", {"v": v, "l": l_b}, drop))
    return MonotonicityReport(
        grid={"v": v_grid, "l": l_grid},
        violations=violations,
        passed=not violations,
    )
