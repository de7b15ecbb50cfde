"""Monte Carlo simulation of IC-N, plain IC and COICM diffusion.

All simulators use coin-world semantics: a run first draws one uniform per
edge and one per node, then propagates deterministically.  Edge ``(u, v)``
transmits iff its coin is below the probability of the channel ``u`` is
active on; a node deceived by an all-positive arrival turns positive iff its
coin is below its (post-prebunking) susceptibility.  Because every coin is
drawn up front, two runs with the same seed share the same world, which
gives common random numbers across interventions for free.

Per-run seeds for :func:`estimate_spread` come from
``numpy.random.SeedSequence(master_seed, spawn_key=(run_index,))``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ConfigError
from .graph import Graph, NodeParams

INACTIVE = 0
POSITIVE = 1
NEGATIVE = -1


@dataclass(frozen=True, eq=False)
class DiffusionOutcome:
    state: np.ndarray  # int8 per node: 0 inactive, 1 positive, -1 negative
    first_hit_time: np.ndarray  # int32 per node, -1 when never activated
    positive_count: int
    negative_count: int

    def tobytes(self) -> bytes:
        return self.state.tobytes() + self.first_hit_time.tobytes()


@dataclass(frozen=True)
class SpreadEstimate:
    mean_positive: float
    mean_negative: float
    stderr_positive: float
    stderr_negative: float
    runs: int


def run_seed(master_seed: int, run_index: int) -> np.random.SeedSequence:
    """Seed of run ``run_index``; independent of execution order."""
    return np.random.SeedSequence(int(master_seed), spawn_key=(int(run_index),))


def _node_set(graph: Graph, nodes: Iterable[int], what: str) -> list[int]:
    out = []
    seen = set()
    for v in nodes:
        v = graph.check_node(v)
        if v not in seen:
            seen.add(v)
            out.append(v)
    return sorted(out)


def _check_icn_inputs(graph, params, seeds, x):
    params.check(graph)
    seeds = _node_set(graph, seeds, "seed")
    x = _node_set(graph, x, "intervention")
    if not seeds:
        raise ConfigError("seed set is empty")
    if set(seeds) & set(x):
        raise ConfigError("intervention set overlaps the seed set")
    return seeds, x


def _coins(graph: Graph, rng_seed, nodes: bool = True):
    rng = np.random.default_rng(rng_seed)
    edge_u = rng.random(graph.m).tolist()
    node_u = rng.random(graph.n).tolist() if nodes else None
    return edge_u, node_u


def _icn_world(out, n, seeds, qx, edge_u, node_u):
    """Propagate one IC-N world; returns (state, time, n_pos, n_neg)."""
    state = [0] * n
    hit = [-1] * n
    for s in seeds:
        state[s] = POSITIVE
        hit[s] = 0
    npos, nneg = len(seeds), 0
    frontier = list(seeds)
    t = 0
    while frontier:
        arrivals = {}
        for u in frontier:
            if state[u] > 0:
                for v, pp, _, e in out[u]:
                    if state[v] == 0 and edge_u[e] < pp and v not in arrivals:
                        arrivals[v] = POSITIVE
            else:
                for v, _, pm, e in out[u]:
                    if state[v] == 0 and edge_u[e] < pm:
                        arrivals[v] = NEGATIVE
        t += 1
        frontier = list(arrivals)
        for v, sign in arrivals.items():
            if sign > 0 and node_u[v] < qx[v]:
                state[v] = POSITIVE
                npos += 1
            else:
                state[v] = NEGATIVE
                nneg += 1
            hit[v] = t
    return state, hit, npos, nneg


def _ic_world(out, n, seeds, blocked, edge_u):
    state = [0] * n
    hit = [-1] * n
    for b in blocked:
        state[b] = 2  # sentinel: removed from the graph
    for s in seeds:
        state[s] = POSITIVE
        hit[s] = 0
    count = len(seeds)
    frontier = list(seeds)
    t = 0
    while frontier:
        t += 1
        nxt = []
        for u in frontier:
            for v, pp, _, e in out[u]:
                if state[v] == 0 and edge_u[e] < pp:
                    state[v] = POSITIVE
                    hit[v] = t
                    nxt.append(v)
        count += len(nxt)
        frontier = nxt
    for b in blocked:
        state[b] = 0
    return state, hit, count


def _coicm_world(out, n, seeds_m, seeds_t, delay, edge_u):
    state = [0] * n
    hit = [-1] * n
    for s in seeds_m:
        state[s] = POSITIVE
        hit[s] = 0
    frontier = list(seeds_m)
    if delay == 0:
        for s in seeds_t:
            state[s] = NEGATIVE
            hit[s] = 0
        frontier += list(seeds_t)
    t = 0
    while frontier or t < delay:
        arrivals = {}
        for u in frontier:
            if state[u] > 0:
                for v, pp, _, e in out[u]:
                    if state[v] == 0 and edge_u[e] < pp and v not in arrivals:
                        arrivals[v] = POSITIVE
            else:
                for v, _, pm, e in out[u]:
                    if state[v] == 0 and edge_u[e] < pm:
                        arrivals[v] = NEGATIVE
        t += 1
        if t == delay:
            for s in seeds_t:
                if state[s] == 0:
                    arrivals[s] = NEGATIVE
        frontier = list(arrivals)
        for v, sign in arrivals.items():
            state[v] = sign
            hit[v] = t
    return state, hit


def _outcome(state, hit) -> DiffusionOutcome:
    st = np.array(state, dtype=np.int8)
    return DiffusionOutcome(
        state=st,
        first_hit_time=np.array(hit, dtype=np.int32),
        positive_count=int(np.count_nonzero(st == POSITIVE)),
        negative_count=int(np.count_nonzero(st == NEGATIVE)),
    )


def simulate_icn(graph: Graph, params: NodeParams, seeds, x=(), rng_seed=0) -> DiffusionOutcome:
    """One IC-N run from positive ``seeds`` with the nodes in ``x`` prebunked."""
    seeds, x = _check_icn_inputs(graph, params, seeds, x)
    edge_u, node_u = _coins(graph, rng_seed)
    qx = params.q_after(x).tolist()
    state, hit, _, _ = _icn_world(graph.out_lists(), graph.n, seeds, qx, edge_u, node_u)
    return _outcome(state, hit)


def simulate_ic(graph: Graph, seeds, blocked=(), rng_seed=0) -> DiffusionOutcome:
    """Classic IC on ``p_plus`` with the ``blocked`` nodes removed."""
    seeds = _node_set(graph, seeds, "seed")
    blocked = _node_set(graph, blocked, "blocked")
    if not seeds:
        raise ConfigError("seed set is empty")
    if set(seeds) & set(blocked):
        raise ConfigError("a seed node is blocked")
    edge_u, _ = _coins(graph, rng_seed, nodes=False)
    state, hit, _ = _ic_world(graph.out_lists(), graph.n, seeds, blocked, edge_u)
    return _outcome(state, hit)


def simulate_coicm(graph: Graph, seeds_m, seeds_t=(), delay: int = 0, rng_seed=0) -> DiffusionOutcome:
    """Campaign-oblivious competitive IC.

    Misinformation (positive) leaves ``seeds_m`` at step 0; the corrective
    campaign (negative) starts at step ``delay`` from those ``seeds_t`` that
    are still inactive then.  Corrective information wins simultaneous
    arrivals.  A corrective seed already reached by misinformation before
    ``delay`` stays positive.
    """
    seeds_m = _node_set(graph, seeds_m, "seed")
    seeds_t = _node_set(graph, seeds_t, "corrective seed")
    if not seeds_m:
        raise ConfigError("misinformation seed set is empty")
    if set(seeds_m) & set(seeds_t):
        raise ConfigError("misinformation and corrective seed sets overlap")
    if delay < 0:
        raise ConfigError("delay must be non-negative")
    edge_u, _ = _coins(graph, rng_seed, nodes=False)
    state, hit = _coicm_world(graph.out_lists(), graph.n, seeds_m, seeds_t, int(delay), edge_u)
    return _outcome(state, hit)


# ---------------------------------------------------------------------------
# Monte Carlo estimation


def _batch(job):
    """Per-run (positive, negative) counts for run indices ``lo..hi-1``."""
    kind, graph, args, master_seed, lo, hi = job
    out = graph.out_lists()
    n = graph.n
    pos = np.empty(hi - lo)
    neg = np.empty(hi - lo)
    for j, r in enumerate(range(lo, hi)):
        seed = run_seed(master_seed, r)
        if kind == "icn":
            seeds, qx = args
            edge_u, node_u = _coins(graph, seed)
            _, _, a, b = _icn_world(out, n, seeds, qx, edge_u, node_u)
        elif kind == "ic":
            seeds, blocked = args
            edge_u, _ = _coins(graph, seed, nodes=False)
            _, _, a = _ic_world(out, n, seeds, blocked, edge_u)
            b = 0
        else:
            seeds_m, seeds_t, delay = args
            edge_u, _ = _coins(graph, seed, nodes=False)
            state, _ = _coicm_world(out, n, seeds_m, seeds_t, delay, edge_u)
            a = sum(1 for s in state if s > 0)
            b = sum(1 for s in state if s < 0)
        pos[j] = a
        neg[j] = b
    return pos, neg


def _summarize(pos: np.ndarray, neg: np.ndarray) -> SpreadEstimate:
    runs = pos.size
    if runs > 1:
        sp = float(pos.std(ddof=1)) / math.sqrt(runs)
        sn = float(neg.std(ddof=1)) / math.sqrt(runs)
    else:
        sp = sn = 0.0
    return SpreadEstimate(float(pos.mean()), float(neg.mean()), sp, sn, runs)


def _estimate(kind, graph, args, runs, master_seed, workers) -> tuple[np.ndarray, np.ndarray]:
    if runs < 1:
        raise ConfigError("runs must be at least 1")
    workers = max(1, int(workers or 1))
    if workers == 1 or runs < 2 * workers:
        return _batch((kind, graph, args, master_seed, 0, runs))
    bounds = np.linspace(0, runs, workers + 1).astype(int)
    jobs = [(kind, graph, args, master_seed, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_batch, jobs))
    return (np.concatenate([p for p, _ in parts]), np.concatenate([q for _, q in parts]))


def spread_samples(graph, params, seeds, x, runs, master_seed, workers=1):
    """Per-run (positive, negative) counts of IC-N, in run-index order."""
    seeds, x = _check_icn_inputs(graph, params, seeds, x)
    qx = params.q_after(x).tolist()
    return _estimate("icn", graph, (seeds, qx), runs, master_seed, workers)


def estimate_spread(graph: Graph, params: NodeParams, seeds, x=(), runs: int = 1000,
                    master_seed: int = 0, workers: int = 1) -> SpreadEstimate:
    """Mean and standard error of IC-N spreads over ``runs`` simulations."""
    return _summarize(*spread_samples(graph, params, seeds, x, runs, master_seed, workers))


def estimate_ic_spread(graph: Graph, seeds, blocked=(), runs: int = 1000,
                       master_seed: int = 0, workers: int = 1) -> SpreadEstimate:
    seeds = _node_set(graph, seeds, "seed")
    blocked = _node_set(graph, blocked, "blocked")
    if set(seeds) & set(blocked):
        raise ConfigError("a seed node is blocked")
    return _summarize(*_estimate("ic", graph, (seeds, blocked), runs, master_seed, workers))


def estimate_coicm_spread(graph: Graph, seeds_m, seeds_t=(), delay: int = 0, runs: int = 1000,
                          master_seed: int = 0, workers: int = 1) -> SpreadEstimate:
    seeds_m = _node_set(graph, seeds_m, "seed")
    seeds_t = _node_set(graph, seeds_t, "corrective seed")
    if set(seeds_m) & set(seeds_t):
        raise ConfigError("misinformation and corrective seed sets overlap")
    return _summarize(*_estimate("coicm", graph, (seeds_m, seeds_t, int(delay)),
                                 runs, master_seed, workers))
