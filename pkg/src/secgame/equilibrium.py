"""Fulfilled-expectations equilibria of the binary security-adoption game.

Agents differ in loss size ell with CDF F on [0, 1]; an agent invests when
ell * h(gamma_expected) exceeds the option cost c. When expectations are
fulfilled the equilibria are the solutions of

    w(gamma) := h(gamma) * F^{-1}(1 - gamma) = c

plus the corner gamma = 0 when w(0) <= c (nobody invests, nobody deviates)
and gamma = 1 when w(1) >= c. Also: critical-mass diagnostics, the social
welfare function, and the planner's optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import epidemic
from .epidemic import DEFAULT_TOL, EpidemicModel
from .errors import ConsistencyError, InputError

_ENDPOINT_STEP = 1e-4  # one-sided difference step for endpoint derivatives


@dataclass(frozen=True)
class Uniform01:
    """Loss sizes uniform on [0, 1]."""

    def f_inv(self, u: float) -> float:
        return u

    def cdf(self, ell: float) -> float:
        return min(1.0, max(0.0, ell))

    def quantile_integral(self, a: float, b: float) -> float:
        # int_a^b (1-u) du
        return ((1.0 - a) ** 2 - (1.0 - b) ** 2) / 2.0


@dataclass(frozen=True)
class Power:
    """F(ell) = ell**k on [0, 1]."""

    k: float

    def __post_init__(self):
        if not self.k > 0:
            raise InputError(f"power exponent must be positive, got {self.k}")

    def f_inv(self, u: float) -> float:
        return u ** (1.0 / self.k)

    def cdf(self, ell: float) -> float:
        return min(1.0, max(0.0, ell)) ** self.k

    def quantile_integral(self, a: float, b: float) -> float:
        # int_a^b (1-u)**(1/k) du
        e = 1.0 + 1.0 / self.k
        return ((1.0 - a) ** e - (1.0 - b) ** e) / e


@dataclass(frozen=True)
class PiecewiseLinearCDF:
    """Continuous piecewise-linear CDF given by knots ((ell, F), ...) with
    F(0) = 0, F(1) = 1 and strictly increasing F values."""

    knots: tuple

    def __post_init__(self):
        knots = tuple((float(l), float(F)) for l, F in self.knots)
        object.__setattr__(self, "knots", knots)
        ls = [l for l, _ in knots]
        Fs = [F for _, F in knots]
        if len(knots) < 2 or ls[0] != 0.0 or ls[-1] != 1.0:
            raise InputError("knots must run from ell=0 to ell=1")
        if abs(Fs[0]) > 1e-12 or abs(Fs[-1] - 1.0) > 1e-12:
            raise InputError("knot CDF values must run from 0 to 1")
        if any(b <= a for a, b in zip(ls, ls[1:])) or any(
            b <= a for a, b in zip(Fs, Fs[1:])
        ):
            raise InputError("knots must be strictly increasing in both coordinates")

    def f_inv(self, u: float) -> float:
        ls = [l for l, _ in self.knots]
        Fs = [F for _, F in self.knots]
        return float(np.interp(u, Fs, ls))

    def cdf(self, ell: float) -> float:
        ls = [l for l, _ in self.knots]
        Fs = [F for _, F in self.knots]
        return float(np.interp(ell, ls, Fs))


@dataclass(frozen=True)
class Homogeneous:
    """Degenerate types: every agent has the same loss size ell."""

    ell: float

    def __post_init__(self):
        if not self.ell > 0:
            raise InputError(f"loss size must be positive, got {self.ell}")

    def f_inv(self, u: float) -> float:
        return self.ell

    def cdf(self, ell: float) -> float:
        return 1.0 if ell >= self.ell else 0.0

    def quantile_integral(self, a: float, b: float) -> float:
        return self.ell * (b - a)


TypeDistribution = Uniform01 | Power | PiecewiseLinearCDF | Homogeneous


def f_inv(types: TypeDistribution, u: float) -> float:
    """Quantile function F^{-1}(u)."""
    if not 0.0 <= u <= 1.0:
        raise InputError(f"quantile argument must lie in [0, 1], got {u}")
    return types.f_inv(u)


def _adaptive_simpson(f, a, b, tol):
    """Classic adaptive Simpson quadrature with Richardson acceptance."""

    def simpson(lo, hi, flo, fmid, fhi):
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)

    def rec(lo, hi, flo, fmid, fhi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flm, frm = f(lmid), f(rmid)
        left = simpson(lo, mid, flo, flm, fmid)
        right = simpson(mid, hi, fmid, frm, fhi)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return rec(lo, mid, flo, flm, fmid, left, eps / 2.0, depth - 1) + rec(
            mid, hi, fmid, frm, fhi, right, eps / 2.0, depth - 1
        )

    if b <= a:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 48)


def quantile_integral(types: TypeDistribution, a: float, b: float,
                      tol: float = 1e-12) -> float:
    """int_a^b F^{-1}(1-u) du, via closed forms where available and
    adaptive Simpson quadrature otherwise."""
    if b <= a:
        return 0.0
    if hasattr(types, "quantile_integral"):
        return types.quantile_integral(a, b)
    return _adaptive_simpson(lambda u: types.f_inv(1.0 - u), a, b, tol)


@dataclass(frozen=True)
class GameSpec:
    epidemic: EpidemicModel
    types: TypeDistribution
    cost: float

    def __post_init__(self):
        if not self.cost > 0:
            raise InputError(f"cost must be positive, got {self.cost}")


def willingness(spec: GameSpec, gamma: float, tol: float = DEFAULT_TOL) -> float:
    """w(gamma) = h(gamma) * F^{-1}(1 - gamma), the fulfilled-expectations
    inverse demand for protection."""
    if not 0.0 <= gamma <= 1.0:
        raise InputError(f"gamma must lie in [0, 1], got {gamma}")
    return epidemic.h(spec.epidemic, gamma, tol) * spec.types.f_inv(1.0 - gamma)


@dataclass(frozen=True)
class Equilibrium:
    gamma_star: float
    stable: bool
    kind: str  # "zero" | "interior" | "full"


@dataclass
class EquilibriumReport:
    equilibria: list
    critical_mass: bool
    gamma_peak: float
    c_peak: float
    w0: float
    warnings: list


def _bisect_root(f, lo, hi, flo, fhi, tol):
    # f(lo) and f(hi) have opposite signs
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return 0.5 * (lo + hi)


def _golden_max(f, lo, hi, tol=1e-9):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def find_equilibria(spec: GameSpec, grid_n: int = 201, tol: float = 1e-10) -> EquilibriumReport:
    """All fulfilled-expectations equilibria with stability labels.

    Scans w(gamma) - c for sign changes on a uniform grid and refines each
    bracket by bisection. An interior root is stable iff w crosses c from
    above (adoption self-corrects back); unstable iff from below. The
    corner gamma = 0 is an equilibrium when w(0) <= c, the corner gamma = 1
    when w(1) >= c.
    """
    if grid_n < 50:
        raise InputError(f"grid_n must be at least 50, got {grid_n}")
    c = spec.cost
    grid = [i / (grid_n - 1) for i in range(grid_n)]
    wvals = [willingness(spec, gamma) for gamma in grid]
    f = lambda gamma: willingness(spec, gamma) - c

    roots = []  # (gamma, stable)
    warnings = []
    near_zero = 1e-14
    for i in range(grid_n - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = wvals[i] - c, wvals[i + 1] - c
        if abs(fa) <= near_zero:
            roots.append((a, None))
            continue
        if fa > 0 and fb < 0:
            roots.append((_bisect_root(f, a, b, fa, fb, tol), True))
        elif fa < 0 and fb > 0:
            roots.append((_bisect_root(f, a, b, fa, fb, tol), False))
        elif abs(fb) > near_zero and (fa > 0) == (fb > 0):
            # tangency guard: a sign flip at the midpoint means two roots
            # this grid is too coarse to separate
            mid = 0.5 * (a + b)
            fmid = f(mid)
            if fmid != 0.0 and (fmid > 0) != (fa > 0):
                warnings.append(f"two roots inside grid cell [{a:.6g}, {b:.6g}]")
                roots.append((_bisect_root(f, a, mid, fa, fmid, tol),
                              fa > 0))
                roots.append((_bisect_root(f, mid, b, fmid, fb, tol),
                              fmid > 0))
    if abs(wvals[-1] - c) <= near_zero:
        roots.append((1.0, None))

    # grid points that were themselves roots: classify by neighbor signs
    resolved = []
    for gamma, stable in roots:
        if stable is None:
            eps = 1.0 / (grid_n - 1) / 4.0
            left = f(max(0.0, gamma - eps))
            right = f(min(1.0, gamma + eps))
            stable = left > 0 or right < 0
        resolved.append((gamma, stable))

    equilibria = []
    w0 = wvals[0]
    w1 = wvals[-1]
    if w0 <= c:
        equilibria.append(Equilibrium(0.0, True, "zero"))
    if w1 >= c:
        equilibria.append(Equilibrium(1.0, True, "full"))
    edge_pad = 10.0 * max(tol, 1.0 / (grid_n - 1) * 1e-6)
    for gamma, stable in resolved:
        if any(abs(gamma - e.gamma_star) <= edge_pad for e in equilibria):
            continue
        if gamma <= edge_pad and w0 <= c:
            continue
        if gamma >= 1.0 - edge_pad and w1 >= c:
            continue
        equilibria.append(Equilibrium(gamma, stable, "interior"))
    equilibria.sort(key=lambda e: e.gamma_star)

    # single peak of the demand curve (c0 in the cost-sweep story)
    i_max = max(range(grid_n), key=lambda i: wvals[i])
    lo = grid[max(0, i_max - 1)]
    hi = grid[min(grid_n - 1, i_max + 1)]
    gamma_peak = _golden_max(lambda gamma: willingness(spec, gamma), lo, hi)
    w_peak = willingness(spec, gamma_peak)
    if wvals[i_max] >= w_peak:
        gamma_peak, w_peak = grid[i_max], wvals[i_max]

    return EquilibriumReport(
        equilibria=equilibria,
        critical_mass=critical_mass(spec)["positive"],
        gamma_peak=gamma_peak,
        c_peak=w_peak,
        w0=w0,
        warnings=warnings,
    )


def critical_mass(spec: GameSpec, grid_n: int = 201) -> dict:
    """Positive critical mass iff the demand curve w rises near gamma = 0.

    Also reports the underlying diagnostics: whether w(0) = 0, the forward
    difference of h at 0, and the type density near the top of the support.
    Single-peakedness of w is verified numerically rather than assumed.
    """
    step = _ENDPOINT_STEP
    w0 = willingness(spec, 0.0)
    slope_w0 = (willingness(spec, step) - w0) / step
    h0 = epidemic.h(spec.epidemic, 0.0)
    slope_h0 = (epidemic.h(spec.epidemic, step) - h0) / step
    density_top = (spec.types.cdf(1.0) - spec.types.cdf(1.0 - step)) / step

    grid = [i / (grid_n - 1) for i in range(grid_n)]
    wvals = [willingness(spec, gamma) for gamma in grid]
    signs = []
    for a, b in zip(wvals, wvals[1:]):
        d = b - a
        if d > 1e-12:
            signs.append(1)
        elif d < -1e-12:
            signs.append(-1)
    single_peaked = all(
        not (s1 < 0 and s2 > 0) for s1, s2 in zip(signs, signs[1:])
    )

    return {
        "positive": slope_w0 > 0.0,
        "conditions": {
            "i": abs(w0) <= 1e-12,
            "ii_value": slope_h0,
            "iii_value": density_top,
        },
        "single_peaked": single_peaked,
    }


def welfare(spec: GameSpec, gamma: float, tol: float = DEFAULT_TOL) -> float:
    """Social welfare W(gamma): the public externality accrues to everyone,
    the private one only to the secure fraction, minus adoption costs."""
    if not 0.0 <= gamma <= 1.0:
        raise InputError(f"gamma must lie in [0, 1], got {gamma}")
    gval = epidemic.g(spec.epidemic, gamma, tol)
    hval = epidemic.h(spec.epidemic, gamma, tol)
    upper = quantile_integral(spec.types, gamma, 1.0)
    lower = quantile_integral(spec.types, 0.0, gamma)
    return gval * upper + (gval + hval) * lower - spec.cost * gamma


@dataclass
class WelfareReport:
    gamma_social: float
    W_social: float
    gamma_market: float
    W_market: float
    efficiency_loss: float
    poa: float | None  # None when market welfare is ~0


def social_optimum(spec: GameSpec, grid_n: int = 201, market: str = "largest") -> WelfareReport:
    """Planner's optimum versus the market equilibrium.

    The market outcome is the largest stable equilibrium by default
    (``market="smallest"`` selects the low-adoption trap instead). Raises
    ConsistencyError if the planner's fraction falls below the market's,
    which would contradict the welfare theorem.
    """
    if grid_n < 200:
        raise InputError(f"grid_n must be at least 200, got {grid_n}")
    if market not in ("largest", "smallest"):
        raise InputError(f"market must be 'largest' or 'smallest', got {market!r}")
    report = find_equilibria(spec, grid_n=max(grid_n, 201))
    stable = [e.gamma_star for e in report.equilibria if e.stable]
    candidates = stable or [e.gamma_star for e in report.equilibria]
    gamma_market = (max(candidates) if market == "largest" else min(candidates))

    grid = [i / (grid_n - 1) for i in range(grid_n)]
    Ws = [welfare(spec, gamma) for gamma in grid]
    i_max = max(range(grid_n), key=lambda i: Ws[i])
    lo = grid[max(0, i_max - 1)]
    hi = grid[min(grid_n - 1, i_max + 1)]
    gamma_social = _golden_max(lambda gamma: welfare(spec, gamma), lo, hi)
    W_social = welfare(spec, gamma_social)
    # never report a refined point worse than the scan or the market point
    for cand, Wc in ((grid[i_max], Ws[i_max]), (gamma_market, welfare(spec, gamma_market))):
        if Wc > W_social:
            gamma_social, W_social = cand, Wc

    W_market = welfare(spec, gamma_market)
    if gamma_social < gamma_market - 1e-6:
        raise ConsistencyError(
            f"planner fraction {gamma_social} below market fraction {gamma_market}"
        )
    efficiency_loss = W_social - W_market
    poa = W_social / W_market if W_market > 1e-12 else None
    return WelfareReport(
        gamma_social=gamma_social,
        W_social=W_social,
        gamma_market=gamma_market,
        W_market=W_market,
        efficiency_loss=efficiency_loss,
        poa=poa,
    )
