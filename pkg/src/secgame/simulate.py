"""Monte-Carlo validation of the mean-field breach probabilities.

Generates sparse random graphs (Erdos-Renyi via geometric edge skipping, or
an erased configuration model), assigns secure/negligent states i.i.d.,
seeds direct losses among negligent nodes, and spreads losses by breadth-
first percolation: a lossy node attempts each incident edge once, succeeding
with probability q against a secure endpoint and q_plus against a negligent
one. Replications draw from Philox counter-based substreams keyed by
(seed, replication), so results are reproducible bit-for-bit.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .epidemic import DegreeDistribution, Empirical, EpidemicModel, Fixed, Poisson
from .errors import InputError


@dataclass(frozen=True)
class ErdosRenyi:
    """G(n, lam/n): each pair independently present with probability lam/n."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise InputError(f"lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class ConfigurationModel:
    """Erased configuration model with i.i.d. degrees from the given law."""

    degree: DegreeDistribution


@dataclass(frozen=True)
class SimConfig:
    n: int
    graph: ErdosRenyi | ConfigurationModel
    epidemic: EpidemicModel
    gamma: float
    replications: int
    seed: int
    one_hop: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"n must be at least 1, got {self.n}")
        if self.replications < 1:
            raise InputError(f"replications must be at least 1, got {self.replications}")
        if not 0.0 <= self.gamma <= 1.0:
            raise InputError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not 0 <= self.seed < 2 ** 64:
            raise InputError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SimResult:
    p0_hat: float
    p1_hat: float
    stderr0: float
    stderr1: float
    loss_fraction: float


@dataclass
class Graph:
    """Undirected graph in CSR form: neighbors of u are
    indices[indptr[u]:indptr[u+1]]."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def num_edges(self) -> int:
        return int(self.indices.size) // 2


def _pairs_from_flat(flat: np.ndarray, n: int):
    """Invert the lexicographic pair index: flat m -> (i, j), i < j.

    Pairs with first coordinate < i occupy the first i*(2n-1-i)/2 slots;
    invert with a float sqrt and fix rounding by one-step corrections.
    """
    a = 2 * n - 1
    i = ((a - np.sqrt(a * a - 8.0 * flat)) // 2).astype(np.int64)
    i = np.clip(i, 0, n - 2)
    for _ in range(2):  # sqrt rounding can misplace boundary cases by one
        c_i = i * (a - i) // 2
        i = np.where(c_i > flat, i - 1, i)
        c_next = (i + 1) * (a - i - 1) // 2
        i = np.where(c_next <= flat, i + 1, i)
    c_i = i * (a - i) // 2
    j = flat - c_i + i + 1
    return i, j


def _er_edge_list(n: int, lam: float, rng: np.random.Generator):
    """Sample G(n, lam/n) edges by geometric skips over the pair index."""
    m_total = n * (n - 1) // 2
    if m_total == 0:
        return (np.empty(0, dtype=np.int64),) * 2
    p = min(lam / n, 1.0)
    blocks = []
    pos = -1
    expected_left = int(m_total * p) + 1
    while pos < m_total - 1:
        size = max(expected_left + 4 * int(math.sqrt(expected_left)) + 16, 64)
        gaps = rng.geometric(p, size=size).astype(np.int64)
        flat = pos + np.cumsum(gaps)
        blocks.append(flat[flat < m_total])
        pos = int(flat[-1])
        expected_left = max(int((m_total - pos) * p) + 1, 1)
    flat = np.concatenate(blocks) if blocks else np.empty(0, dtype=np.int64)
    return _pairs_from_flat(flat, n)


def _sample_degrees(dist: DegreeDistribution, n: int, rng: np.random.Generator):
    if isinstance(dist, Poisson):
        return rng.poisson(dist.lam, size=n).astype(np.int64)
    if isinstance(dist, Fixed):
        return np.full(n, dist.d, dtype=np.int64)
    if isinstance(dist, Empirical):
        ks = np.array([k for k, _ in dist.pmf], dtype=np.int64)
        ps = np.array([p for _, p in dist.pmf], dtype=float)
        ps = ps / ps.sum()
        return rng.choice(ks, size=n, p=ps)
    raise InputError(f"unknown degree distribution {dist!r}")


def _config_model_edge_list(n: int, dist: DegreeDistribution, rng: np.random.Generator):
    """Erased configuration model: pair stubs uniformly, drop self-loops and
    multi-edges. An odd stub total is corrected by resampling one degree."""
    degrees = _sample_degrees(dist, n, rng)
    attempts = 0
    while degrees.sum() % 2 == 1:
        degrees[-1] = _sample_degrees(dist, 1, rng)[0]
        attempts += 1
        if attempts > 64:
            # degenerate laws (e.g. constant odd degree) can never flip parity
            degrees[int(np.argmax(degrees))] -= 1
    stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
    rng.shuffle(stubs)
    u, w = stubs[0::2], stubs[1::2]
    keep = u != w
    u, w = u[keep], w[keep]
    lo = np.minimum(u, w)
    hi = np.maximum(u, w)
    key = lo * n + hi
    _, first = np.unique(key, return_index=True)
    return lo[first], hi[first]


def _build_graph(n: int, u: np.ndarray, w: np.ndarray) -> Graph:
    deg = np.bincount(u, minlength=n) + np.bincount(w, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    src = np.concatenate([u, w])
    dst = np.concatenate([w, u])
    order = np.argsort(src, kind="stable")
    return Graph(n=n, indptr=indptr, indices=dst[order])


def generate_graph(config: SimConfig, rng: np.random.Generator) -> Graph:
    if isinstance(config.graph, ErdosRenyi):
        u, w = _er_edge_list(config.n, config.graph.lam, rng)
    elif isinstance(config.graph, ConfigurationModel):
        u, w = _config_model_edge_list(config.n, config.graph.degree, rng)
    else:
        raise InputError(f"unknown graph family {config.graph!r}")
    return _build_graph(config.n, u, w)


def percolate(graph: Graph, states: np.ndarray, model: EpidemicModel,
              rng: np.random.Generator, one_hop: bool = False) -> np.ndarray:
    """Spread losses from direct-loss seeds; returns the per-node loss flags.

    states[i] is True for secure nodes. Each lossy node attempts every
    incident edge exactly once; the transmission succeeds with probability
    q if the target is secure, q_plus otherwise. With one_hop=True only the
    directly-hit seeds transmit (the literal one-sentence reading of the
    contagion model); the default multi-hop spread is what the mean-field
    fixed point describes.
    """
    n = graph.n
    lossy = (~states) & (rng.random(n) < model.p)
    frontier = np.flatnonzero(lossy)
    while frontier.size:
        starts = graph.indptr[frontier]
        counts = graph.indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        base = np.repeat(starts, counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        targets = graph.indices[base + offsets]
        probs = np.where(states[targets], model.q, model.q_plus)
        hit = rng.random(total) < probs
        new = np.unique(targets[hit & ~lossy[targets]])
        lossy[new] = True
        if one_hop:
            break
        frontier = new
    return lossy


def _substream(seed: int, replication: int) -> np.random.Generator:
    # Philox is counter-based: distinct 128-bit keys give independent,
    # platform-stable streams
    return np.random.Generator(np.random.Philox(key=(seed << 64) | replication))


def run(config: SimConfig) -> SimResult:
    """Average the per-replication loss frequencies among N and S nodes.

    Each replication generates its own graph, states, and percolation from
    the (seed, replication) substream. A replication with no S (or no N)
    nodes contributes nothing to that estimator. The overall loss fraction
    is the mixture gamma*p1 + (1-gamma)*p0 per replication, which ties the
    three estimators together exactly.
    """
    gamma = config.gamma
    p0s, p1s, losses = [], [], []
    for rep in range(config.replications):
        rng = _substream(config.seed, rep)
        graph = generate_graph(config, rng)
        states = rng.random(config.n) < gamma
        lossy = percolate(graph, states, config.epidemic, rng, config.one_hop)
        n_s = int(states.sum())
        n_n = config.n - n_s
        p1 = float(lossy[states].mean()) if n_s else math.nan
        p0 = float(lossy[~states].mean()) if n_n else math.nan
        p1s.append(p1)
        p0s.append(p0)
        if gamma == 0.0:
            losses.append(p0)
        elif gamma == 1.0:
            losses.append(p1)
        else:
            losses.append(gamma * p1 + (1.0 - gamma) * p0)
    return SimResult(
        p0_hat=_nanmean(p0s),
        p1_hat=_nanmean(p1s),
        stderr0=_nanstderr(p0s),
        stderr1=_nanstderr(p1s),
        loss_fraction=_nanmean(losses),
    )


def _nanmean(values) -> float:
    vals = [v for v in values if not math.isnan(v)]
    return sum(vals) / len(vals) if vals else math.nan


def _nanstderr(values) -> float:
    vals = [v for v in values if not math.isnan(v)]
    if len(vals) < 2:
        return 0.0
    mean = sum(vals) / len(vals)
    var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return math.sqrt(var / len(vals))


def config_digest(config: SimConfig) -> str:
    """Short stable hash of the full configuration."""
    payload = json.dumps(asdict(config), sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def result_record(config: SimConfig, result: SimResult) -> dict:
    """JSON-ready record for one simulation run."""

    def clean(x):
        return None if math.isnan(x) else x

    return {
        "config_hash": config_digest(config),
        "gamma": config.gamma,
        "p0_hat": clean(result.p0_hat),
        "p1_hat": clean(result.p1_hat),
        "stderr0": result.stderr0,
        "stderr1": result.stderr1,
        "n": config.n,
        "replications": config.replications,
    }
