"""Security breach probability families p(x, v).

All families share the contract p(0, v) = v, 0 <= p(x, v) <= v, and
p non-increasing in the investment x:

* ``GordonLoeb``: p(x, v) = v**(alpha*x + 1)
* ``Rational``:   p(x, v) = v / (a*x + 1)**b
* ``Portfolio``:  a finite set of independent protections, each with a cost
  and a multiplier s_j(v); spending x buys the best affordable subset (or
  its LP relaxation) and p(x, v) = v * multiplier(x, v).

The portfolio selection is a knapsack in the log domain: minimizing the
product of the chosen s_j(v) equals maximizing the sum of -log s_j(v)
under the budget.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InputError, UnsupportedOperationError

# exp(-LOG_CLAMP) is the smallest multiplier distinguished from zero; keeps
# log-domain knapsack arithmetic finite when some s_j(v) = 0.
LOG_CLAMP = 700.0

# Above this many items the exact knapsack switches from exhaustive subset
# search to a cost-discretized DP.
EXACT_SEARCH_LIMIT = 20


def _check_domain(x: float, v: float) -> None:
    if x < 0:
        raise InputError(f"investment must be non-negative, got {x}")
    if not 0.0 <= v <= 1.0:
        raise InputError(f"vulnerability must lie in [0, 1], got {v}")


@dataclass(frozen=True)
class GordonLoeb:
    """p(x, v) = v**(alpha*x + 1); alpha measures protection productivity."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise InputError(f"alpha must be positive, got {self.alpha}")

    def eval(self, x: float, v: float) -> float:
        _check_domain(x, v)
        return v ** (self.alpha * x + 1.0)

    def eval_dx(self, x: float, v: float) -> float:
        _check_domain(x, v)
        if v == 0.0:
            return 0.0
        return self.alpha * math.log(v) * v ** (self.alpha * x + 1.0)


@dataclass(frozen=True)
class Rational:
    """p(x, v) = v / (a*x + 1)**b; satisfies the monotone-investment conditions."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise InputError(f"a and b must be positive, got a={self.a}, b={self.b}")

    def eval(self, x: float, v: float) -> float:
        _check_domain(x, v)
        return v / (self.a * x + 1.0) ** self.b

    def eval_dx(self, x: float, v: float) -> float:
        _check_domain(x, v)
        return -v * self.a * self.b * (self.a * x + 1.0) ** (-self.b - 1.0)


@dataclass(frozen=True)
class ProtectionItem:
    """One protection: a price and the multiplier s(v) it applies.

    ``effectiveness`` may be a constant in [0, 1], a callable v -> s(v), or a
    tabulated pair (v_grid, s_values) interpolated linearly in v.
    """

    cost: float
    effectiveness: float | Callable[[float], float] | tuple

    def __post_init__(self):
        if not self.cost > 0:
            raise InputError(f"protection cost must be positive, got {self.cost}")
        eff = self.effectiveness
        if isinstance(eff, (tuple, list)):
            grid, values = eff
            grid = tuple(float(g) for g in grid)
            values = tuple(float(s) for s in values)
            if len(grid) != len(values) or len(grid) < 2:
                raise InputError("tabulated effectiveness needs matching grids of >= 2 points")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise InputError("effectiveness v-grid must be strictly increasing")
            object.__setattr__(self, "effectiveness", (grid, values))

    def s(self, v: float) -> float:
        eff = self.effectiveness
        if callable(eff):
            val = float(eff(v))
        elif isinstance(eff, tuple) and len(eff) == 2 and isinstance(eff[0], tuple):
            grid, values = eff
            val = float(np.interp(v, grid, values))
        else:
            val = float(eff)
        if not 0.0 <= val <= 1.0:
            raise InputError(f"effectiveness s(v) must lie in [0, 1], got {val}")
        return val


@dataclass(frozen=True)
class Portfolio:
    """Discrete protection portfolio; p(x, v) = v * best affordable multiplier."""

    items: tuple
    relaxed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    def eval(self, x: float, v: float) -> float:
        _check_domain(x, v)
        if self.relaxed:
            mult = knapsack_relaxed(self.items, x, v)
        else:
            mult, _ = knapsack_exact(self.items, x, v)
        return v * mult

    def eval_dx(self, x: float, v: float) -> float:
        raise UnsupportedOperationError(
            "Portfolio breach probability has no analytic derivative; "
            "use finite differences on eval()"
        )


BreachModel = GordonLoeb | Rational | Portfolio


def _log_weights(items: Sequence[ProtectionItem], v: float) -> list[float]:
    """-log s_j(v) per item, clamped to [0, LOG_CLAMP]."""
    ws = []
    for it in items:
        s = it.s(v)
        ws.append(LOG_CLAMP if s <= 0.0 else min(-math.log(s), LOG_CLAMP))
    return ws


def _subset_search(costs, weights, budget):
    """Exhaustive subset search (maximize weight sum under the budget).

    DFS in decreasing density order with a suffix-sum bound; exact.
    """
    n = len(costs)
    order = sorted(range(n), key=lambda j: -(weights[j] / costs[j]))
    suffix = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weights[order[i]]
    best_w = -1.0
    best_set: list = []
    chosen: list = []

    def rec(i, cost_left, w_sum):
        nonlocal best_w, best_set
        if w_sum > best_w:
            best_w = w_sum
            best_set = chosen.copy()
        if i == n or w_sum + suffix[i] <= best_w:
            return
        j = order[i]
        if costs[j] <= cost_left:
            chosen.append(j)
            rec(i + 1, cost_left - costs[j], w_sum + weights[j])
            chosen.pop()
        rec(i + 1, cost_left, w_sum)

    rec(0, budget, 0.0)
    return best_set


def _knapsack_dp(costs, weights, budget, step_frac):
    """Cost-discretized 0/1 knapsack DP; costs are rounded up so any DP-feasible
    subset is truly affordable (value may be slightly suboptimal)."""
    n = len(costs)
    step = budget * step_frac
    cap = int(budget / step)
    units = [math.ceil(c / step) for c in costs]
    dp = [0.0] * (cap + 1)
    keep = [bytearray(cap + 1) for _ in range(n)]
    for i in range(n):
        u, w = units[i], weights[i]
        if u > cap:
            continue
        row = keep[i]
        for cpos in range(cap, u - 1, -1):
            cand = dp[cpos - u] + w
            if cand > dp[cpos]:
                dp[cpos] = cand
                row[cpos] = 1
    chosen = []
    cpos = cap
    for i in range(n - 1, -1, -1):
        if keep[i][cpos]:
            chosen.append(i)
            cpos -= units[i]
    return chosen


def knapsack_exact(items: Sequence[ProtectionItem], budget: float, v: float,
                   dp_step_frac: float = 1e-3):
    """Best affordable subset of protections at vulnerability v.

    Minimizes the product of the chosen s_j(v) subject to the cost budget.
    Returns (multiplier, chosen index tuple). Exhaustive for up to
    EXACT_SEARCH_LIMIT items, cost-discretized DP above that.
    """
    if budget < 0:
        raise InputError(f"budget must be non-negative, got {budget}")
    if not 0.0 <= v <= 1.0:
        raise InputError(f"vulnerability must lie in [0, 1], got {v}")
    items = list(items)
    if not items:
        return 1.0, ()
    costs = [it.cost for it in items]
    weights = _log_weights(items, v)
    affordable = [j for j in range(len(items)) if costs[j] <= budget]
    if not affordable:
        return 1.0, ()
    if len(items) <= EXACT_SEARCH_LIMIT:
        chosen = _subset_search(costs, weights, budget)
    else:
        chosen = _knapsack_dp(costs, weights, budget, dp_step_frac)
    value = 1.0
    for j in chosen:
        value *= items[j].s(v)
    return value, tuple(sorted(chosen))


def knapsack_relaxed(items: Sequence[ProtectionItem], budget: float, v: float) -> float:
    """LP relaxation of the protection knapsack, solved greedily by density.

    Items are taken in decreasing (-log s_j)/cost order, the last one
    fractionally. The resulting budget -> multiplier map is continuous,
    non-increasing, and log-convex.
    """
    if budget < 0:
        raise InputError(f"budget must be non-negative, got {budget}")
    if not 0.0 <= v <= 1.0:
        raise InputError(f"vulnerability must lie in [0, 1], got {v}")
    costs = [it.cost for it in items]
    weights = _log_weights(items, v)
    order = sorted(range(len(costs)), key=lambda j: -(weights[j] / costs[j]))
    total_w = 0.0
    remaining = budget
    for j in order:
        if weights[j] <= 0.0 or remaining <= 0.0:
            break
        frac = min(1.0, remaining / costs[j])
        total_w += frac * weights[j]
        remaining -= frac * costs[j]
    return math.exp(-total_w)


def load_portfolio_csv(path) -> list[ProtectionItem]:
    """Load protection items from CSV.

    Two accepted layouts:

    * constant effectiveness -- header ``cost,s`` then one ``cost,s`` row
      per item;
    * tabulated effectiveness -- header ``cost,s_at_v0,...,s_at_vK``, then a
      companion v-grid row whose first cell is ``vgrid``, then one row per
      item with its cost and s values at those v points (interpolated
      linearly in between).
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise InputError(f"portfolio file {path} has no item rows")
    header = [c.strip() for c in rows[0]]
    if header[0] != "cost":
        raise InputError("portfolio CSV must start with a 'cost' header column")
    items = []
    if len(header) == 2 and header[1] == "s":
        for row in rows[1:]:
            items.append(ProtectionItem(cost=float(row[0]), effectiveness=float(row[1])))
        return items
    grid_row = rows[1]
    if grid_row[0].strip() != "vgrid":
        raise InputError("tabulated portfolio CSV needs a 'vgrid' row after the header")
    v_grid = tuple(float(c) for c in grid_row[1:])
    for row in rows[2:]:
        values = tuple(float(c) for c in row[1:])
        if len(values) != len(v_grid):
            raise InputError("item row length does not match the v-grid")
        items.append(ProtectionItem(cost=float(row[0]), effectiveness=(v_grid, values)))
    return items
