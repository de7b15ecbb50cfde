"""Comparison strategies for picking prebunking targets.

Unless noted, every strategy picks from ``V \\ S`` and returns exactly
``min(k, |candidates|)`` distinct nodes, breaking ties by node index.
"""

from __future__ import annotations

import heapq
import math
from typing import Iterable, Sequence

import numpy as np

from .activation import TreeDP
from .errors import ConfigError
from .graph import Graph, NodeParams
from .mia import MIAIndex
from .solver import InterventionSet


def default_candidates(graph: Graph, seeds: Iterable[int]) -> list[int]:
    s = set(seeds)
    return [v for v in range(graph.n) if v not in s]


def _check_k(k: int) -> int:
    if k < 0:
        raise ConfigError("k must be non-negative")
    return int(k)


def _top(scores: dict[int, float], k: int, largest: bool = True) -> tuple[int, ...]:
    sign = -1.0 if largest else 1.0
    return tuple(v for _, v in sorted((sign * s, v) for v, s in scores.items())[:k])


def random_targets(candidates: Sequence[int], k: int, rng_seed: int) -> InterventionSet:
    """Uniform sample without replacement.

    Drawn as a prefix of one seeded permutation, so smaller budgets with the
    same seed give prefixes of larger ones.
    """
    k = _check_k(k)
    cand = sorted(set(int(c) for c in candidates))
    if k > len(cand):
        raise ConfigError(f"k={k} exceeds the {len(cand)} candidates")
    perm = np.random.default_rng(rng_seed).permutation(len(cand))
    return InterventionSet(tuple(cand[i] for i in perm[:k]), k)


def gullible_targets(params: NodeParams, candidates: Sequence[int], k: int) -> InterventionSet:
    """Highest susceptibility first."""
    k = _check_k(k)
    q = params.q
    return InterventionSet(_top({int(v): float(q[v]) for v in candidates}, k), k)


def degree_targets(graph: Graph, candidates: Sequence[int], k: int) -> InterventionSet:
    """Highest out-degree first."""
    k = _check_k(k)
    deg = graph.out_degree()
    return InterventionSet(_top({int(v): float(deg[v]) for v in candidates}, k), k)


def seed_distances(graph: Graph, seeds: Iterable[int]) -> dict[int, float]:
    """Multi-source shortest distances under ``-log p_plus``; reachable only."""
    adj = graph.out_lists()
    dist: dict[int, float] = {}
    heap = [(0.0, s) for s in sorted({graph.check_node(s) for s in seeds})]
    best = {s: 0.0 for _, s in heap}
    while heap:
        d, u = heapq.heappop(heap)
        if u in dist:
            continue
        dist[u] = d
        for v, pp, _, _ in adj[u]:
            if pp <= 0.0 or v in dist:
                continue
            nd = d - math.log(pp)
            if nd < best.get(v, math.inf):
                best[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def distance_targets(graph: Graph, seeds, candidates: Sequence[int], k: int) -> InterventionSet:
    """Closest to the seeds first.  Unreachable candidates are never picked,
    so fewer than ``k`` nodes come back when too few are reachable."""
    k = _check_k(k)
    dist = seed_distances(graph, seeds)
    s = set(seeds)
    scores = {int(v): dist[v] for v in candidates if v in dist and v not in s}
    chosen = _top(scores, k, largest=False)
    return InterventionSet(chosen, k)


# ---------------------------------------------------------------------------
# AdvancedGreedy: sampled live-edge graphs, gains from dominator trees


def dominator_tree(succ: dict[int, list[int]], root: int):
    """Immediate dominators of the nodes reachable from ``root``.

    Iterative algorithm of Cooper, Harvey and Kennedy.  Returns ``(idom,
    postorder)``; ``idom[root] == root``.
    """
    post: list[int] = []
    seen = {root}
    stack = [(root, iter(succ.get(root, ())))]
    while stack:
        node, it = stack[-1]
        for nxt in it:
            if nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, iter(succ.get(nxt, ()))))
                break
        else:
            stack.pop()
            post.append(node)
    order = {v: i for i, v in enumerate(post)}
    preds: dict[int, list[int]] = {v: [] for v in post}
    for u in post:
        for v in succ.get(u, ()):
            preds[v].append(u)
    idom = {root: root}
    rpo = post[::-1]
    changed = True
    while changed:
        changed = False
        for v in rpo[1:]:
            new = None
            for u in preds[v]:
                if u not in idom:
                    continue
                if new is None:
                    new = u
                    continue
                a, b = u, new
                while a != b:
                    while order[a] < order[b]:
                        a = idom[a]
                    while order[b] < order[a]:
                        b = idom[b]
                new = a
            if idom.get(v) != new:
                idom[v] = new
                changed = True
    return idom, post


def blocking_gains(succ: dict[int, list[int]], seeds: Sequence[int], blocked: set[int]) -> dict[int, int]:
    """For one live-edge world: how many nodes each node's removal disconnects
    from the seeds (itself included).  Seeds are not scored."""
    root = -1
    live = {root: [s for s in seeds]}
    for u, vs in succ.items():
        if u not in blocked:
            live[u] = [v for v in vs if v not in blocked]
    idom, post = dominator_tree(live, root)
    size = {v: 1 for v in post}
    for v in post:
        if v != root:
            size[idom[v]] += size[v]
    s = set(seeds)
    return {v: c for v, c in size.items() if v != root and v not in s}


def greedy_blocking(worlds: Sequence[dict[int, list[int]]], weights: Sequence[float],
                    seeds: Sequence[int], candidates: Sequence[int], k: int) -> list[int]:
    """Greedy node removal maximising the weighted total of disconnected nodes."""
    seeds = list(seeds)
    pool = set(candidates) - set(seeds)
    blocked: set[int] = set()
    gains = [blocking_gains(w, seeds, blocked) for w in worlds]
    chosen = []
    while len(chosen) < k and pool:
        total: dict[int, float] = {}
        for g, wt in zip(gains, weights):
            for v, c in g.items():
                total[v] = total.get(v, 0.0) + wt * c
        best = min(pool, key=lambda v: (-total.get(v, 0.0), v))
        chosen.append(best)
        pool.discard(best)
        blocked.add(best)
        for i, g in enumerate(gains):
            if best in g:
                gains[i] = blocking_gains(worlds[i], seeds, blocked)
    return chosen


def sample_live_worlds(graph: Graph, rho: int, rng_seed: int) -> list[dict[int, list[int]]]:
    rng = np.random.default_rng(rng_seed)
    src, dst, p = graph.src, graph.dst, graph.p_plus
    worlds = []
    for _ in range(rho):
        live = rng.random(graph.m) < p
        succ: dict[int, list[int]] = {}
        for u, v in zip(src[live].tolist(), dst[live].tolist()):
            succ.setdefault(u, []).append(v)
        worlds.append(succ)
    return worlds


def advanced_greedy_targets(graph: Graph, seeds, k: int, rho: int = 100, rng_seed: int = 0,
                            candidates: Sequence[int] | None = None) -> InterventionSet:
    """Influence-minimisation greedy on ``rho`` sampled IC worlds."""
    k = _check_k(k)
    if rho < 1:
        raise ConfigError("rho must be at least 1")
    seeds = sorted({graph.check_node(s) for s in seeds})
    if candidates is None:
        candidates = default_candidates(graph, seeds)
    worlds = sample_live_worlds(graph, rho, rng_seed)
    chosen = greedy_blocking(worlds, [1.0 / rho] * rho, seeds, candidates, k)
    return InterventionSet(tuple(chosen), k)


# ---------------------------------------------------------------------------
# CMIA-O: corrective seeding on local arborescences under COICM


class _TreeState:
    """COICM DP of one in-arborescence under a fixed corrective seed set."""

    __slots__ = ("dp", "root", "base", "entry", "certain")

    def __init__(self, miia, seeds, active):
        self.dp = dp = TreeDP(miia, seeds, active)
        self.root = dp.local[miia.root]
        self.base = self._run()
        # (region node, hops, path probability) at which each member's
        # corrective information would enter the region
        entry = {}
        for w in miia.members:
            if w in dp.local:
                entry[w] = (dp.local[w], 0, 1.0)
            else:
                i, h, pr = entry[miia.link[w]]
                entry[w] = (i, h + 1, pr * miia.link_p_minus[w])
        self.entry = entry
        self.certain: dict[tuple[int, int], float] = {}

    def _run(self, **kw) -> float:
        return self.dp.run([1.0] * len(self.dp), **kw)[0][self.root]

    def gain(self, w: int) -> float:
        """Drop in the root's misinformation probability if ``w`` also seeds
        corrective information.

        One external arrival is an independent event, so the root's
        probability is affine in its chance: ``pr * (base - certain)``.
        """
        i, h, pr = self.entry[w]
        r = self.certain.get((i, h))
        if r is None:
            if h == 0:
                r = self._run(neg_extra=(i,))
            else:
                r = self._run(inject={h: [(i, 1.0)]})
            self.certain[(i, h)] = r
        return pr * (self.base - r)


class CMIAO:
    """Greedy corrective-seed selection.

    In each in-arborescence the misinformation seeds start positive and the
    chosen corrective seeds start negative at step 0; with every
    susceptibility at 1 the activation recursion is COICM on the tree
    (corrective information wins ties).  ``p_plus`` is the single COICM edge
    probability.

    A candidate outside the current DP region only touches it where its path
    first joins the region, so it is scored by one external arrival there
    instead of a rebuilt DP.  Candidates whose information cannot reach any
    region node on their path by the last step misinformation can arrive
    there have gain exactly zero and are skipped.

    Blocked influence is submodular in the corrective seed set on each tree,
    so stale gains are upper bounds and selection re-scores lazily: only the
    candidate on top of the heap is refreshed.
    """

    def __init__(self, graph: Graph, seeds_m, theta: float, exclude: Iterable[int] = (),
                 index: MIAIndex | None = None):
        if not np.array_equal(graph.p_plus, graph.p_minus):
            graph = graph.with_probabilities(graph.p_plus, graph.p_plus)
            index = None
        self.graph = graph
        self.seeds = sorted({graph.check_node(s) for s in seeds_m})
        if not self.seeds:
            raise ConfigError("seed set is empty")
        if index is None:
            index = MIAIndex(graph, theta)
        elif index.graph is not graph or index.theta != float(theta):
            raise ConfigError("MIA index was built for another graph or threshold")
        self.index = index
        reach = set()
        for s in self.seeds:
            reach.update(index.mioa(s).members)
        reach -= set(self.seeds)
        cand = reach - set(exclude)
        self.candidates = sorted(cand)
        self.pool = set(cand)
        self.selected: list[int] = []
        self.watch: dict[int, set[int]] = {}
        self.users: dict[int, list[int]] = {}
        self._state: dict[int, _TreeState] = {}
        for v in sorted(reach):
            miia = index.miia(v)
            st = _TreeState(miia, self.seeds, ())
            dp = st.dp
            if v not in dp.local:
                continue
            last = {}
            for t, z in enumerate(dp.schedule):
                for i in z:
                    last[dp.nodes[i]] = t
            # slack[y]: largest hop count at which corrective information
            # entering the region at y still arrives in time somewhere
            slack = {}
            for w in miia.members:
                if w in dp.local:
                    c = miia.link.get(w)
                    slack[w] = max(last[w], slack[c] - 1 if c is not None else -1)
            watch = set()
            for w in miia.members:
                if w in cand:
                    i, h, _ = st.entry[w]
                    if h <= slack[dp.nodes[i]]:
                        watch.add(w)
            self.watch[v] = watch
            self._state[v] = st
            for w in watch:
                self.users.setdefault(w, []).append(v)
        self.evaluated = sorted(self.watch)
        self._heap = [(-self.delta(w), w, 0) for w in self.candidates]
        heapq.heapify(self._heap)

    def _tree(self, v: int) -> _TreeState:
        st = self._state.get(v)
        if st is None:
            active = sorted(self.watch[v].intersection(self.selected))
            st = self._state[v] = _TreeState(self.index.miia(v), self.seeds, active)
        return st

    def delta(self, w: int) -> float:
        """Current marginal decrease in summed misinformation probability."""
        return sum(self._tree(v).gain(w) for v in self.users.get(w, ()))

    def step(self) -> int | None:
        r = len(self.selected)
        while self._heap:
            neg, w, stamp = heapq.heappop(self._heap)
            if w not in self.pool:
                continue
            if stamp == r:
                break
            heapq.heappush(self._heap, (-self.delta(w), w, r))
        else:
            return None
        self.pool.discard(w)
        self.selected.append(w)
        for v in self.users.get(w, ()):
            self._state.pop(v, None)
        return w

    def run(self, k: int) -> list[int]:
        while len(self.selected) < k and self.pool:
            if self.step() is None:
                break
        return list(self.selected)


def hop_zone(graph: Graph, seeds, tau: int) -> set[int]:
    """Nodes within ``tau`` hops of the seeds (seeds included)."""
    zone = set(seeds)
    frontier = set(seeds)
    for _ in range(tau):
        frontier = {v for u in frontier for v in graph.successors(u)} - zone
        zone |= frontier
    return zone


def cmia_o_targets(graph: Graph, seeds_m, k: int, theta: float = 0.001, *, tau: int = 0,
                   index: MIAIndex | None = None) -> InterventionSet:
    """Corrective seeds for influence blocking; nodes within ``tau`` hops of
    a misinformation seed are excluded."""
    k = _check_k(k)
    exclude = hop_zone(graph, seeds_m, tau)
    sel = CMIAO(graph, seeds_m, theta, exclude=exclude, index=index)
    return InterventionSet(tuple(sel.run(k)), k)


ALGORITHMS = ("mia-npp", "random", "gullible", "degree", "distance", "advanced-greedy", "cmia-o")
