"""Mean-field epidemic risk on sparse random graphs.

A fraction gamma of agents is secure (state S), the rest negligent (N).
N agents suffer a direct loss with probability p; a lossy agent contaminates
each neighbor with probability q (neighbor in S) or q_plus (neighbor in N).
On a locally tree-like graph with degree generating function Psi, the
probability y(gamma) that a random neighbor carries a loss solves

    y = 1 - gamma * Psi(1 - q*y) - (1 - gamma) * (1 - p) * Psi(1 - q_plus*y)

and the per-state breach probabilities follow from y. The incentive
function h(gamma) = p0 - p1 and the externality g(gamma) = p0(0) - p0(gamma)
drive the equilibrium analysis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import ConvergenceError, InputError
from .reports import MonotonicityReport, Violation

DEFAULT_TOL = 1e-12
MAX_ITER = 10 ** 6


@dataclass(frozen=True)
class Poisson:
    """Poisson(lam) degrees: Psi(s) = exp(lam*(s-1)), the Erdos-Renyi limit."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise InputError(f"lambda must be positive, got {self.lam}")

    def psi(self, s: float) -> float:
        return math.exp(self.lam * (s - 1.0))

    def psi_prime(self, s: float) -> float:
        return self.lam * math.exp(self.lam * (s - 1.0))


@dataclass(frozen=True)
class Fixed:
    """Every node has degree d: Psi(s) = s**d."""

    d: int

    def __post_init__(self):
        if self.d < 0 or self.d != int(self.d):
            raise InputError(f"degree must be a non-negative integer, got {self.d}")

    def psi(self, s: float) -> float:
        return s ** self.d if self.d > 0 else 1.0

    def psi_prime(self, s: float) -> float:
        return self.d * s ** (self.d - 1) if self.d > 0 else 0.0


@dataclass(frozen=True)
class Empirical:
    """Finite degree law given as ((degree, prob), ...)."""

    pmf: tuple

    def __post_init__(self):
        pmf = tuple((int(k), float(p)) for k, p in self.pmf)
        object.__setattr__(self, "pmf", pmf)
        if any(k < 0 for k, _ in pmf):
            raise InputError("degrees must be non-negative")
        if any(p < 0 for _, p in pmf):
            raise InputError("probabilities must be non-negative")
        total = sum(p for _, p in pmf)
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"degree pmf must sum to 1, got {total}")

    def psi(self, s: float) -> float:
        return sum(p * (s ** k if k > 0 else 1.0) for k, p in self.pmf)

    def psi_prime(self, s: float) -> float:
        return sum(p * k * s ** (k - 1) for k, p in self.pmf if k > 0)


DegreeDistribution = Poisson | Fixed | Empirical


def psi(dist: DegreeDistribution, s: float) -> float:
    """Generating function E[s**D] for s in [0, 1]."""
    if not 0.0 <= s <= 1.0:
        raise InputError(f"s must lie in [0, 1], got {s}")
    return dist.psi(s)


@dataclass(frozen=True)
class EpidemicModel:
    p: float
    q: float
    q_plus: float
    degree: DegreeDistribution

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InputError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.q <= self.q_plus <= 1.0:
            raise InputError(
                f"need 0 <= q <= q_plus <= 1, got q={self.q}, q_plus={self.q_plus}"
            )


@dataclass(frozen=True)
class FixedPointResult:
    y: float
    iterations: int
    residual: float


def _G(model: EpidemicModel, gamma: float, y: float) -> float:
    return (
        1.0
        - gamma * model.degree.psi(1.0 - model.q * y)
        - (1.0 - gamma) * (1.0 - model.p) * model.degree.psi(1.0 - model.q_plus * y)
    )


def _bisect_y(model: EpidemicModel, gamma: float, tol: float):
    # root of y - G(y); G(0) >= 0 and G(1) <= 1 bracket it
    lo, hi = 0.0, 1.0
    iterations = 0
    while hi - lo > min(tol, 1e-14) and iterations < 200:
        mid = 0.5 * (lo + hi)
        if mid - _G(model, gamma, mid) < 0.0:
            lo = mid
        else:
            hi = mid
        iterations += 1
    y = 0.5 * (lo + hi)
    return y, iterations


@lru_cache(maxsize=1 << 16)
def _fixed_point_cached(model: EpidemicModel, gamma: float, tol: float) -> FixedPointResult:
    if model.p * (1.0 - gamma) == 0.0:
        # no direct-loss seeding: the percolation outcome is y = 0 even when
        # the bare equation also has a supercritical positive root
        return FixedPointResult(y=0.0, iterations=0, residual=abs(_G(model, gamma, 0.0)))
    y = 1.0
    prev_delta = math.inf
    need_bisect = True
    iterations = 0
    for iterations in range(1, MAX_ITER + 1):
        y_next = min(1.0, max(0.0, _G(model, gamma, y)))
        delta = abs(y_next - y)
        y = y_next
        ratio = delta / prev_delta if prev_delta > 0 else 0.0
        if delta <= tol:
            # the iterates sit within ~delta*ratio/(1-ratio) of the root;
            # accept only under fast contraction, else refine by bisection
            need_bisect = ratio > 0.5
            break
        if iterations > 10 and ratio >= 1.0 - 1e-9:
            break  # stalled (near-critical slow contraction)
        prev_delta = delta
    if need_bisect:
        y, extra = _bisect_y(model, gamma, tol)
        iterations += extra
    residual = abs(y - _G(model, gamma, y))
    if residual > max(100.0 * tol, 1e-10):
        raise ConvergenceError(
            f"fixed point did not converge at gamma={gamma}", best=y, residual=residual
        )
    return FixedPointResult(y=y, iterations=iterations, residual=residual)


def fixed_point_y(model: EpidemicModel, gamma: float, tol: float = DEFAULT_TOL) -> FixedPointResult:
    """Unique solution y(gamma) of the mean-field loss fixed point.

    Iterates y <- G(y) from y0 = 1; G is monotone in y so the iterates
    decrease to the largest fixed point. Falls back to bisection on
    y - G(y) when contraction stalls near criticality.
    """
    if not 0.0 <= gamma <= 1.0:
        raise InputError(f"gamma must lie in [0, 1], got {gamma}")
    if not tol > 0:
        raise InputError(f"tolerance must be positive, got {tol}")
    return _fixed_point_cached(model, gamma, tol)


def breach_probs(model: EpidemicModel, gamma: float, tol: float = DEFAULT_TOL):
    """(p0, p1): breach probabilities of a negligent / secure agent."""
    y = fixed_point_y(model, gamma, tol).y
    p1 = 1.0 - model.degree.psi(1.0 - model.q * y)
    p0 = 1.0 - (1.0 - model.p) * model.degree.psi(1.0 - model.q_plus * y)
    return p0, p1


def h(model: EpidemicModel, gamma: float, tol: float = DEFAULT_TOL) -> float:
    """Incentive function: breach-probability reduction bought by protection."""
    p0, p1 = breach_probs(model, gamma, tol)
    return p0 - p1


def g(model: EpidemicModel, gamma: float, tol: float = DEFAULT_TOL) -> float:
    """Public externality: drop in a negligent agent's breach probability
    relative to a fully insecure network."""
    p0_base, _ = breach_probs(model, 0.0, tol)
    p0, _ = breach_probs(model, gamma, tol)
    return p0_base - p0


@dataclass(frozen=True)
class CurvePoint:
    gamma: float
    y: float
    p0: float
    p1: float
    h: float
    g: float


def curve(model: EpidemicModel, gammas, tol: float = DEFAULT_TOL) -> list[CurvePoint]:
    """Evaluate (y, p0, p1, h, g) along a gamma grid."""
    p0_base, _ = breach_probs(model, 0.0, tol)
    points = []
    for gamma in gammas:
        y = fixed_point_y(model, gamma, tol).y
        p1 = 1.0 - model.degree.psi(1.0 - model.q * y)
        p0 = 1.0 - (1.0 - model.p) * model.degree.psi(1.0 - model.q_plus * y)
        points.append(
            CurvePoint(gamma=gamma, y=y, p0=p0, p1=p1, h=p0 - p1, g=p0_base - p0)
        )
    return points


def check_network_monotone(model: EpidemicModel, gamma_grid, tol: float = DEFAULT_TOL) -> MonotonicityReport:
    """Checks whether h(gamma) is increasing over the grid (the condition
    aligning incentives in the binary-choice network game).

    Reports the largest gamma up to which h increases strictly, every
    non-increasing consecutive pair, and whether h is flat throughout.
    """
    grid = [float(t) for t in gamma_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise InputError("gamma grid must be sorted ascending")
    hs = [h(model, gamma, tol) for gamma in grid]
    strict_tol = 1e-12
    violations = []
    prefix_end = grid[0] if grid else 0.0
    prefix_intact = True
    for i in range(len(grid) - 1):
        if hs[i + 1] > hs[i] + strict_tol:
            if prefix_intact:
                prefix_end = grid[i + 1]
        else:
            prefix_intact = False
            violations.append(
                Violation("h_increasing", {"gamma": grid[i + 1]}, hs[i] - hs[i + 1])
            )
    flat = all(abs(a - b) <= strict_tol for a, b in zip(hs, hs[1:]))
    return MonotonicityReport(
        grid={"gamma": grid},
        violations=violations,
        passed=not violations,
        extras={"increasing_prefix_end": prefix_end, "flat": flat},
    )
