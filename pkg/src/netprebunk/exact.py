"""Exact diffusion probabilities by enumerating coin worlds.

Two independent routes are provided:

* :func:`exact_spread`, :func:`exact_ic` and :func:`exact_coicm` branch
  round by round over only the coins a world actually consults (an edge coin
  when its source fires at an inactive target, a deception coin on a node's
  first all-positive arrival).  Coins that are never consulted are
  marginalised implicitly, so the cost tracks the reachable structure.
* :func:`live_edge_worlds` plus the ``*_world`` propagators enumerate every
  world in full; they are slow and meant for tiny graphs in tests.

Neither route shares code with :mod:`netprebunk.diffusion`.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable

import numpy as np

from .errors import ConfigError, ResourceError
from .graph import Graph, NodeParams

ENUMERATION_BUDGET = 24


def _check_budget(coins: int, budget: int) -> None:
    if coins > budget:
        raise ResourceError(
            f"exact enumeration needs {coins} coins, budget is {budget}")


def _options(p: float):
    """(outcome, probability) pairs of a Bernoulli(p) coin, zero branches dropped."""
    if p >= 1.0:
        return ((True, 1.0),)
    if p <= 0.0:
        return ((False, 1.0),)
    return ((True, p), (False, 1.0 - p))


def _branch(graph: Graph, frontier0: list[tuple[int, int]], removed: set[int],
            resolve: Callable, schedule: dict[int, list[int]]):
    """Round-by-round world enumeration.

    ``frontier0`` holds ``(node, sign)`` pairs active at step 0.  ``resolve(v,
    signs)`` gives ``[(sign, prob), ...]`` for a node reached by arrivals with
    the given set of signs.  ``schedule[t]`` lists nodes that receive a forced
    corrective arrival at step ``t``.  Returns (ap_plus, ap_minus).
    """
    n = graph.n
    out = graph.out_lists()
    ap_plus = np.zeros(n)
    ap_minus = np.zeros(n)
    last_scheduled = max(schedule, default=-1)

    state0 = [0] * n
    for v, s in frontier0:
        state0[v] = s

    def recurse(state, frontier, t, w):
        attempts = []
        for u in frontier:
            su = state[u]
            for v, pp, pm, _ in out[u]:
                if state[v] == 0 and v not in removed:
                    p = pp if su > 0 else pm
                    if p > 0.0:
                        attempts.append((v, su, p))
        forced = [v for v in schedule.get(t + 1, ()) if state[v] == 0]
        if not attempts and not forced:
            if t + 1 <= last_scheduled:
                recurse(state, [], t + 1, w)
                return
            for v in range(n):
                if state[v] > 0:
                    ap_plus[v] += w
                elif state[v] < 0:
                    ap_minus[v] += w
            return
        for live in itertools.product(*(_options(p) for _, _, p in attempts)):
            wl = w
            arrivals: dict[int, set] = {}
            for (v, sign, _), (ok, pr) in zip(attempts, live):
                wl *= pr
                if ok:
                    arrivals.setdefault(v, set()).add(sign)
            for v in forced:
                arrivals.setdefault(v, set()).add(-1)
            if wl == 0.0:
                continue
            nodes = sorted(arrivals)
            choices = [resolve(v, arrivals[v]) for v in nodes]
            for combo in itertools.product(*choices):
                wc = wl
                new_state = list(state)
                for v, (sign, pr) in zip(nodes, combo):
                    wc *= pr
                    new_state[v] = sign
                if wc > 0.0:
                    recurse(new_state, nodes, t + 1, wc)

    recurse(state0, [v for v, _ in frontier0], 0, 1.0)
    return ap_plus, ap_minus


def _nodes(graph: Graph, nodes: Iterable[int]) -> list[int]:
    return sorted({graph.check_node(v) for v in nodes})


def exact_spread(graph: Graph, params: NodeParams, seeds, x=(), budget: int = ENUMERATION_BUDGET):
    """Exact IC-N spreads.

    Returns ``(sigma_plus, sigma_minus, ap_plus, ap_minus)`` where the last two
    are per-node probabilities of ending positive / negative.  Raises
    :class:`ResourceError` when ``|E| + |V \\ S|`` exceeds ``budget``.
    """
    params.check(graph)
    seeds = _nodes(graph, seeds)
    x = _nodes(graph, x)
    if not seeds:
        raise ConfigError("seed set is empty")
    if set(seeds) & set(x):
        raise ConfigError("intervention set overlaps the seed set")
    _check_budget(graph.m + graph.n - len(seeds), budget)
    qx = params.q_after(x)

    def resolve(v, signs):
        if -1 in signs:
            return ((-1, 1.0),)
        q = float(qx[v])
        return tuple(o for o in ((1, q), (-1, 1.0 - q)) if o[1] > 0.0)

    ap_p, ap_m = _branch(graph, [(s, 1) for s in seeds], set(), resolve, {})
    return float(ap_p.sum()), float(ap_m.sum()), ap_p, ap_m


def exact_ic(graph: Graph, seeds, blocked=(), budget: int = ENUMERATION_BUDGET):
    """Exact IC activation probabilities with ``blocked`` nodes removed.

    Returns ``(sigma, ap)``.
    """
    seeds = _nodes(graph, seeds)
    blocked = set(_nodes(graph, blocked))
    if blocked & set(seeds):
        raise ConfigError("a seed node is blocked")
    _check_budget(graph.m, budget)
    ap, _ = _branch(graph, [(s, 1) for s in seeds], blocked, lambda v, s: ((1, 1.0),), {})
    return float(ap.sum()), ap


def exact_coicm(graph: Graph, seeds_m, seeds_t=(), delay: int = 0,
                triggered=(), budget: int = ENUMERATION_BUDGET):
    """Exact COICM probabilities (positive = misinformation).

    ``seeds_t`` start at step ``delay``.  Nodes in ``triggered`` act as
    corrective seeds with a node-specific delay equal to the step at which
    anything first reaches them.  Returns ``(sigma_m, sigma_t, ap_m, ap_t)``.
    """
    seeds_m = _nodes(graph, seeds_m)
    seeds_t = _nodes(graph, seeds_t)
    trig = set(_nodes(graph, triggered))
    if set(seeds_m) & (set(seeds_t) | trig):
        raise ConfigError("misinformation and corrective seed sets overlap")
    _check_budget(graph.m, budget)
    frontier = [(s, 1) for s in seeds_m]
    schedule = {}
    if delay == 0:
        frontier += [(s, -1) for s in seeds_t]
    elif seeds_t:
        schedule[int(delay)] = list(seeds_t)

    def resolve(v, signs):
        if -1 in signs or v in trig:
            return ((-1, 1.0),)
        return ((1, 1.0),)

    ap_m, ap_t = _branch(graph, frontier, set(), resolve, schedule)
    return float(ap_m.sum()), float(ap_t.sum()), ap_m, ap_t


# ---------------------------------------------------------------------------
# full enumeration over every coin


def live_edge_worlds(graph: Graph, budget: int = 16):
    """Yield ``(live, prob)`` for every edge live/dead pattern (``p_plus``)."""
    _check_budget(graph.m, budget)
    for live in itertools.product((True, False), repeat=graph.m):
        pr = 1.0
        for ok, p in zip(live, graph.p_plus.tolist()):
            pr *= p if ok else 1.0 - p
        if pr > 0.0:
            yield live, pr


def icn_world(graph: Graph, seeds, deceived, live_plus, live_minus=None) -> list[int]:
    """Final IC-N states in one world.

    ``deceived[v]`` is the outcome of node ``v``'s deception coin; the live
    patterns say which edges transmit each channel.
    """
    live_minus = live_plus if live_minus is None else live_minus
    n = graph.n
    state = [0] * n
    for s in seeds:
        state[s] = 1
    newly = set(seeds)
    while newly:
        pos_in, neg_in = set(), set()
        for e, (u, v) in enumerate(zip(graph.src.tolist(), graph.dst.tolist())):
            if u in newly and state[v] == 0:
                if state[u] > 0 and live_plus[e]:
                    pos_in.add(v)
                if state[u] < 0 and live_minus[e]:
                    neg_in.add(v)
        for v in neg_in:
            state[v] = -1
        for v in pos_in - neg_in:
            state[v] = 1 if deceived[v] else -1
        newly = pos_in | neg_in
    return state


def ic_world(graph: Graph, seeds, blocked, live) -> list[int]:
    n = graph.n
    state = [0] * n
    for s in seeds:
        state[s] = 1
    blocked = set(blocked)
    changed = True
    while changed:
        changed = False
        for e, (u, v) in enumerate(zip(graph.src.tolist(), graph.dst.tolist())):
            if live[e] and state[u] == 1 and state[v] == 0 and v not in blocked:
                state[v] = 1
                changed = True
    return state


def coicm_world(graph: Graph, seeds_m, seeds_t, live, delay: int = 0, triggered=()) -> list[int]:
    """Final COICM states in one world (1 misinformation, -1 corrective)."""
    n = graph.n
    state = [0] * n
    trig = set(triggered)
    for s in seeds_m:
        state[s] = 1
    newly = set(seeds_m)
    if delay == 0:
        for s in seeds_t:
            state[s] = -1
        newly |= set(seeds_t)
    t = 0
    while newly or t < delay:
        reached: dict[int, int] = {}
        for e, (u, v) in enumerate(zip(graph.src.tolist(), graph.dst.tolist())):
            if u in newly and state[v] == 0 and live[e]:
                reached[v] = min(reached.get(v, 1), state[u])
        t += 1
        if t == delay:
            for s in seeds_t:
                if state[s] == 0:
                    reached[s] = -1
        for v, sign in reached.items():
            state[v] = -1 if v in trig else sign
        newly = set(reached)
    return state
