"""MIA-NPP: greedy prebunking target selection over local arborescences.

Every candidate ``u`` in the union of the seeds' out-arborescences is scored
by how much prebunking it lowers ``ap+`` summed over the in-arborescences it
belongs to.  After each pick only the in-arborescences containing the picked
node are re-evaluated, and their old contributions are swapped for new ones.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from typing import Iterable

from .activation import TOL, TreeDP
from .diffusion import estimate_spread
from .errors import ConfigError, InvariantError
from .exact import exact_spread
from .graph import Graph, NodeParams
from .mia import MIAIndex

log = logging.getLogger(__name__)

AUDIT_TOL = 1e-9


@dataclass(frozen=True)
class InterventionSet:
    targets: tuple[int, ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.budget < 0:
            raise ConfigError("budget must be non-negative")
        if len(self.targets) > self.budget:
            raise ConfigError("more targets than the budget allows")
        if len(set(self.targets)) != len(self.targets):
            raise ConfigError("duplicate targets")

    def __len__(self) -> int:
        return len(self.targets)

    def __iter__(self):
        return iter(self.targets)

    def prefix(self, k: int) -> "InterventionSet":
        return InterventionSet(self.targets[:k], k)

    def labels(self, graph: Graph) -> list[str]:
        return [graph.labels[t] for t in self.targets]


class LocalGreedy:
    """Greedy selection with a per-(candidate, evaluated node) gain ledger.

    Subclasses supply :meth:`_contributions`, returning ``{w: gain}`` for one
    evaluated node ``v`` under the current selection, and :meth:`_apply`,
    which records a pick.  ``delta[w]`` always equals the sum of the cached
    contributions that mention ``w``.
    """

    def __init__(self, candidates: Iterable[int], evaluated: Iterable[int]):
        self.pool = set(candidates)
        self.evaluated = list(evaluated)
        self.selected: list[int] = []
        self.contrib: dict[int, dict[int, float]] = {}
        self.users: dict[int, list[int]] = {}  # w -> evaluated nodes whose gains mention w
        self.delta: dict[int, float] = {w: 0.0 for w in self.pool}
        self._version: dict[int, int] = {}
        self._heap: list = []

    # hooks -------------------------------------------------------------
    def _contributions(self, v: int) -> dict[int, float]:
        raise NotImplementedError

    def _apply(self, u: int) -> None:
        raise NotImplementedError

    def _watch(self, v: int) -> Iterable[int]:
        """Nodes whose selection can change ``v``'s contributions."""
        return self.contrib[v].keys()

    # engine ------------------------------------------------------------
    def _push(self, w: int) -> None:
        if w in self.pool:
            ver = self._version.get(w, 0) + 1
            self._version[w] = ver
            heapq.heappush(self._heap, (-self.delta[w], w, ver))

    def _add(self, v: int, sign: float) -> None:
        for w, g in self.contrib[v].items():
            self.delta[w] = self.delta.get(w, 0.0) + sign * g

    def initialize(self) -> None:
        for v in self.evaluated:
            self.contrib[v] = self._contributions(v)
            self._add(v, 1.0)
            for w in self._watch(v):
                self.users.setdefault(w, []).append(v)
        for w in sorted(self.pool):
            self._push(w)

    def step(self) -> int | None:
        """Pick the best remaining candidate (ties: smallest index)."""
        while self._heap:
            _, u, ver = heapq.heappop(self._heap)
            if u in self.pool and self._version.get(u) == ver:
                break
        else:
            return None
        touched = self.users.get(u, [])
        for v in touched:
            self._add(v, -1.0)
        self.pool.discard(u)
        self.selected.append(u)
        self._apply(u)
        changed = set()
        for v in touched:
            self.contrib[v] = self._contributions(v)
            self._add(v, 1.0)
            changed.update(self.contrib[v])
        for w in sorted(changed):
            self._push(w)
        return u

    def run(self, k: int, audit: bool = False) -> list[int]:
        while len(self.selected) < k and self.pool:
            if self.step() is None:
                break
            if audit:
                self.audit()
        return list(self.selected)

    def recomputed_delta(self) -> dict[int, float]:
        """Gains rebuilt from scratch, for auditing the incremental ledger."""
        fresh: dict[int, float] = {}
        for v in self.evaluated:
            for w, g in self._contributions(v).items():
                fresh[w] = fresh.get(w, 0.0) + g
        return fresh

    def audit(self, tol: float = AUDIT_TOL) -> None:
        fresh = self.recomputed_delta()
        for w in set(fresh) | set(self.delta):
            a = fresh.get(w, 0.0)
            b = self.delta.get(w, 0.0)
            if abs(a - b) > tol:
                raise InvariantError(f"gain ledger drifted for node {w}: {b} vs {a}")


class MIANPP(LocalGreedy):
    """Stateful MIA-NPP selector; :func:`mia_npp` is the one-shot wrapper."""

    def __init__(self, graph: Graph, params: NodeParams, seeds, theta: float,
                 index: MIAIndex | None = None, form: str = "tree"):
        params.check(graph)
        self.graph = graph
        self.params = params
        self.seeds = sorted({graph.check_node(s) for s in seeds})
        if not self.seeds:
            raise ConfigError("seed set is empty")
        if index is None:
            index = MIAIndex(graph, theta)
        elif index.graph is not graph or index.theta != float(theta):
            raise ConfigError("MIA index was built for another graph or threshold")
        self.index = index
        self.form = form
        seed_set = set(self.seeds)
        cand = set()
        for s in self.seeds:
            cand.update(index.mioa(s).members)
        cand -= seed_set
        self.candidates = sorted(cand)
        self.q = params.q.tolist()
        self.eps = params.eps.tolist()
        self.qx = list(self.q)
        self.x: set[int] = set()
        self.dps: dict[int, TreeDP] = {}
        for v in self.candidates:
            dp = TreeDP(index.miia(v), self.seeds, form=form)
            if v in dp.local:
                self.dps[v] = dp
        super().__init__(self.candidates, sorted(self.dps))
        self.initialize()

    def _contributions(self, v: int) -> dict[int, float]:
        dp = self.dps[v]
        q = dp.local_q(self.qx)
        root = dp.local[v]
        base = dp.run(q)[0][root]
        out = {}
        for i, w in enumerate(dp.nodes):
            if dp.is_seed[i] or w in self.x:
                continue
            saved = q[i]
            q[i] = (1.0 - self.eps[w]) * saved
            g = base - dp.run(q)[0][root]
            q[i] = saved
            if g < -TOL:
                log.warning("negative gain %.3g for node %d at %d", g, w, v)
            out[w] = g
        return out

    def _apply(self, u: int) -> None:
        self.x.add(u)
        self.qx[u] = (1.0 - self.eps[u]) * self.q[u]

    def select(self, k: int, audit: bool = False) -> "InterventionSet":
        if k < 0:
            raise ConfigError("k must be non-negative")
        self.run(k, audit=audit)
        chosen = self.selected[:k]
        return InterventionSet(tuple(chosen), k)


def mia_npp(graph: Graph, params: NodeParams, seeds, k: int, theta: float = 0.001, *,
            index: MIAIndex | None = None, form: str = "tree", audit: bool = False) -> InterventionSet:
    """Select up to ``k`` prebunking targets; fewer only when the candidate
    set is exhausted."""
    if k < 0:
        raise ConfigError("k must be non-negative")
    return MIANPP(graph, params, seeds, theta, index=index, form=form).select(k, audit=audit)


def evaluate_objective(graph: Graph, params: NodeParams, seeds, x=(), mode: str = "exact",
                       runs: int = 1000, seed: int = 0) -> tuple[float, float]:
    """Expected (misinformation, corrective) spread of an intervention."""
    x = list(x)
    if mode == "exact":
        sp, sm, _, _ = exact_spread(graph, params, seeds, x)
        return sp, sm
    if mode in ("monte_carlo", "mc"):
        est = estimate_spread(graph, params, seeds, x, runs=runs, master_seed=seed)
        return est.mean_positive, est.mean_negative
    raise ConfigError(f"unknown evaluation mode {mode!r}")
