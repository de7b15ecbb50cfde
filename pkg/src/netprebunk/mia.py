"""Maximum influence paths and thresholded in/out arborescences.

A path's propagation probability is the product of its edges' ``p_plus``.
Maximising it is a shortest-path problem under weights ``-log p``; the
arborescences are single-source Dijkstra sweeps with the distance cutoff
``-log theta``.

Ties are broken deterministically: the heap orders by ``(distance, node)``
and, between equally short routes into a node, the one through the smaller
predecessor index wins.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import ConfigError
from .graph import Graph

LOG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Arborescence:
    """Rooted tree of maximum influence paths into (``in``) or out of
    (``out``) ``root``.

    ``link[w]`` is the next node on ``w``'s path toward the root: the child of
    ``w`` in an in-arborescence, its parent in an out-arborescence.  The
    ``link_p_*`` maps hold the probabilities of that tree edge.
    """

    root: int
    direction: str
    members: tuple[int, ...]  # in settle order, root first
    link: dict
    link_p_plus: dict
    link_p_minus: dict
    dist: dict
    path_prob: dict

    def __contains__(self, v) -> bool:
        return v in self.dist

    def __len__(self) -> int:
        return len(self.members)

    def child(self, w: int) -> int | None:
        if self.direction != "in":
            raise ConfigError("child() is defined for in-arborescences")
        return self.link.get(w)

    def parent(self, w: int) -> int | None:
        if self.direction != "out":
            raise ConfigError("parent() is defined for out-arborescences")
        return self.link.get(w)

    def path_to_root(self, w: int) -> list[int]:
        path = [w]
        while path[-1] != self.root:
            path.append(self.link[path[-1]])
        return path


def _weighted_lists(graph: Graph, reverse: bool):
    key = "_mia_in" if reverse else "_mia_out"
    cached = graph.__dict__.get(key)
    if cached is not None:
        return cached
    src = graph.src.tolist()
    dst = graph.dst.tolist()
    pp = graph.p_plus.tolist()
    pm = graph.p_minus.tolist()
    lists = [[] for _ in range(graph.n)]
    for e in range(graph.m):
        if pp[e] <= 0.0:
            continue
        w = -math.log(pp[e])
        if reverse:
            lists[dst[e]].append((src[e], w, pp[e], pm[e]))
        else:
            lists[src[e]].append((dst[e], w, pp[e], pm[e]))
    for row in lists:
        row.sort()
    object.__setattr__(graph, key, lists)
    return lists


def _sweep(graph: Graph, root: int, reverse: bool, cutoff: float, target: int | None = None):
    """Dijkstra from ``root``; returns (order, dist, pred, pred_pp, pred_pm)."""
    adj = _weighted_lists(graph, reverse)
    limit = cutoff + LOG_TOL
    dist = {root: 0.0}
    pred: dict[int, int] = {}
    pred_pp: dict[int, float] = {}
    pred_pm: dict[int, float] = {}
    settled = set()
    order = []
    heap = [(0.0, root)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in settled or d > dist[u]:
            continue
        settled.add(u)
        order.append(u)
        if u == target:
            break
        for v, w, p, q in adj[u]:
            if v in settled:
                continue
            nd = d + w
            if nd > limit:
                continue
            old = dist.get(v)
            if old is None or nd < old:
                dist[v] = nd
                pred[v] = u
                pred_pp[v] = p
                pred_pm[v] = q
                heapq.heappush(heap, (nd, v))
            elif nd == old and u < pred[v]:
                pred[v] = u
                pred_pp[v] = p
                pred_pm[v] = q
    return order, dist, pred, pred_pp, pred_pm


def max_influence_path(graph: Graph, u: int, v: int) -> list[int]:
    """Nodes of the maximum influence path ``u -> v``; empty if unreachable."""
    u = graph.check_node(u)
    v = graph.check_node(v)
    if u == v:
        raise ConfigError("path endpoints must differ")
    order, dist, pred, _, _ = _sweep(graph, u, False, math.inf, target=v)
    if v not in dist or v not in set(order):
        return []
    path = [v]
    while path[-1] != u:
        path.append(pred[path[-1]])
    return path[::-1]


def path_probability(graph: Graph, path) -> float:
    pp = 1.0
    for a, b in zip(path, path[1:]):
        e = graph.edge_id(a, b)
        if e is None:
            raise ConfigError(f"no edge {a}->{b}")
        pp *= float(graph.p_plus[e])
    return pp


def _build(graph: Graph, v: int, theta: float, reverse: bool) -> Arborescence:
    v = graph.check_node(v)
    if not 0.0 < theta <= 1.0:
        raise ConfigError("theta must lie in (0, 1]")
    order, dist, pred, pred_pp, pred_pm = _sweep(graph, v, reverse, -math.log(theta))
    pp = {v: 1.0}
    for w in order[1:]:
        pp[w] = pp[pred[w]] * pred_pp[w]
    return Arborescence(
        root=v,
        direction="in" if reverse else "out",
        members=tuple(order),
        link=pred,
        link_p_plus=pred_pp,
        link_p_minus=pred_pm,
        dist={w: dist[w] for w in order},
        path_prob=pp,
    )


def build_miia(graph: Graph, v: int, theta: float) -> Arborescence:
    """Maximum influence in-arborescence of ``v``: every node whose best path
    into ``v`` has probability at least ``theta``."""
    return _build(graph, v, theta, reverse=True)


def build_mioa(graph: Graph, v: int, theta: float) -> Arborescence:
    """Maximum influence out-arborescence of ``v``."""
    return _build(graph, v, theta, reverse=False)


class MIAIndex:
    """Memoised MIIA/MIOA construction for one graph and threshold.

    Arborescences depend only on structure and ``p_plus``, so one index can
    serve several selections that differ only in node parameters.
    """

    def __init__(self, graph: Graph, theta: float):
        if not 0.0 < theta <= 1.0:
            raise ConfigError("theta must lie in (0, 1]")
        self.graph = graph
        self.theta = float(theta)
        self._in: dict[int, Arborescence] = {}
        self._out: dict[int, Arborescence] = {}

    def miia(self, v: int) -> Arborescence:
        a = self._in.get(v)
        if a is None:
            a = self._in[v] = build_miia(self.graph, v, self.theta)
        return a

    def mioa(self, v: int) -> Arborescence:
        a = self._out.get(v)
        if a is None:
            a = self._out[v] = build_mioa(self.graph, v, self.theta)
        return a
