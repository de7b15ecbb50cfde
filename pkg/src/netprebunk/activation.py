"""Positive/negative activation probabilities inside an in-arborescence.

The recursion walks the tree in synchronous steps.  ``Z_t`` holds the nodes
that may fire at step ``t``; each pushes to its unique child, and the child
collects two products over its pushing parents: the chance that no
information arrives (``beta``) and the chance that no corrective information
arrives (``beta_neg``).  From those,

    pi+_{t+1}(v) = q_v^X (beta_neg - beta) * inactive_t(v)
    pi-_{t+1}(v) = (q_v^X (1 - beta_neg) + (1 - q_v^X)(1 - beta)) * inactive_t(v)

and the cumulative probabilities grow by those increments.

Two variants of the recurrence are available:

``form="paper"``
    ``inactive_t(v) = (1 - ap+_t(v)) (1 - ap-_t(v))`` and parents push with
    their unconditional first-activation probabilities.  Exact whenever each
    node can only be reached at one step (e.g. a single seed in the tree).
``form="tree"`` (default)
    ``inactive_t(v) = 1 - ap+_t(v) - ap-_t(v)`` and each parent's push is
    conditioned on that parent not having transmitted earlier.  Parents in an
    in-arborescence have disjoint ancestries, so this is exact on trees with
    any seed placement.  It coincides with ``"paper"`` when activation times
    are unique.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError, InvariantError
from .mia import Arborescence

TOL = 1e-12
FORMS = ("tree", "paper")


def _clamp(p: float) -> float:
    if p < 0.0:
        if p < -TOL:
            raise InvariantError(f"probability {p} below 0")
        return 0.0
    if p > 1.0:
        if p > 1.0 + TOL:
            raise InvariantError(f"probability {p} above 1")
        return 1.0
    return p


@dataclass
class ActivationTrace:
    root: int
    ap_plus: dict  # node -> probability, for nodes the seeds can reach
    ap_minus: dict
    steps: int
    pi_plus: list = field(default_factory=list)  # per step: {node: pi}
    pi_minus: list = field(default_factory=list)

    def plus(self, v: int) -> float:
        return self.ap_plus.get(v, 0.0)

    def minus(self, v: int) -> float:
        return self.ap_minus.get(v, 0.0)

    @property
    def root_plus(self) -> float:
        return self.plus(self.root)

    @property
    def root_minus(self) -> float:
        return self.minus(self.root)


class TreeDP:
    """The recursion restricted to the part of an in-arborescence that the
    seeds can reach.

    Built once per (arborescence, seed sets); :meth:`run` then evaluates any
    susceptibility assignment.  Local node ``i`` is ``nodes[i]``.
    """

    def __init__(self, miia: Arborescence, seeds=(), neg_seeds=(), form: str = "tree"):
        if miia.direction != "in":
            raise ConfigError("activation probabilities need an in-arborescence")
        if form not in FORMS:
            raise ConfigError(f"unknown recurrence form {form!r}")
        self.form = form
        self.root = miia.root
        pos = [s for s in seeds if s in miia]
        neg = [s for s in neg_seeds if s in miia]
        if set(pos) & set(neg):
            raise ConfigError("a node cannot seed both campaigns")
        # nodes downstream of some seed, in first-visit order
        local: dict[int, int] = {}
        nodes: list[int] = []
        for s in sorted(pos) + sorted(neg):
            w = s
            while w is not None and w not in local:
                local[w] = len(nodes)
                nodes.append(w)
                w = miia.link.get(w)
        self.nodes = nodes
        self.local = local
        k = len(nodes)
        self.child = [-1] * k
        self.p_plus = [0.0] * k
        self.p_minus = [0.0] * k
        for i, w in enumerate(nodes):
            c = miia.link.get(w)
            if c is not None:
                self.child[i] = local[c]
                self.p_plus[i] = miia.link_p_plus[w]
                self.p_minus[i] = miia.link_p_minus[w]
        self.pos = [local[s] for s in sorted(pos)]
        self.neg = [local[s] for s in sorted(neg)]
        self.is_seed = [False] * k
        for i in self.pos + self.neg:
            self.is_seed[i] = True
        # Z_t depends only on structure, so precompute the schedule
        sched = []
        z = sorted(set(self.pos + self.neg))
        seen_steps = 0
        while z:
            sched.append(z)
            z = sorted({self.child[i] for i in z if self.child[i] >= 0})
            seen_steps += 1
            if seen_steps > k + 1:
                raise InvariantError("arborescence links contain a cycle")
        self.schedule = sched

    def __len__(self) -> int:
        return len(self.nodes)

    def run(self, q: list[float], record: bool = False, inject=None, neg_extra=()):
        """Evaluate with local susceptibilities ``q`` (already post-prebunking).

        ``inject`` optionally maps a step ``t`` to ``[(i, prob), ...]``:
        corrective information reaching local node ``i`` from outside the
        tree region at step ``t`` with probability ``prob``, independently of
        everything inside the region.  ``neg_extra`` lists local nodes that
        additionally start negative at step 0.

        Returns ``(ap_plus, ap_minus, steps, history)`` as local lists.
        """
        k = len(self.nodes)
        ap_p = [0.0] * k
        ap_m = [0.0] * k
        pi_p = [0.0] * k
        pi_m = [0.0] * k
        for i in self.pos:
            ap_p[i] = pi_p[i] = 1.0
        for i in self.neg:
            ap_m[i] = pi_m[i] = 1.0
        is_seed = self.is_seed
        z = self.schedule[0] if self.schedule else []
        if neg_extra:
            is_seed = list(is_seed)
            for i in neg_extra:
                if is_seed[i]:
                    raise ConfigError("extra negative node is already a seed")
                is_seed[i] = True
                ap_m[i] = pi_m[i] = 1.0
            z = sorted(set(z) | set(neg_extra))
        inject = inject or {}
        last_inject = max(inject, default=0)
        history = [] if record else None
        if record:
            history.append(({i: pi_p[i] for i in z}, {i: pi_m[i] for i in z}))
        child, cp, cm = self.child, self.p_plus, self.p_minus
        exact = self.form == "tree"
        steps = 0
        t = 0
        while z or t < last_inject:
            if t > k + last_inject + 1:
                raise InvariantError("arborescence links contain a cycle")
            beta = {}
            beta_neg = {}
            for w in z:
                v = child[w]
                if v < 0:
                    continue
                a = pi_p[w] * cp[w]
                b = pi_m[w] * cm[w]
                if exact:
                    earlier = cp[w] * (ap_p[w] - pi_p[w]) + cm[w] * (ap_m[w] - pi_m[w])
                    denom = 1.0 - earlier
                    if denom > TOL:
                        a /= denom
                        b /= denom
                    else:
                        a = b = 0.0
                beta[v] = beta.get(v, 1.0) * (1.0 - a - b)
                beta_neg[v] = beta_neg.get(v, 1.0) * (1.0 - b)
            for v, pr in inject.get(t + 1, ()):
                beta[v] = beta.get(v, 1.0) * (1.0 - pr)
                beta_neg[v] = beta_neg.get(v, 1.0) * (1.0 - pr)
            new_p = {}
            new_m = {}
            for v, bt in beta.items():
                if is_seed[v]:
                    new_p[v] = new_m[v] = 0.0
                    continue
                bn = beta_neg[v]
                if exact:
                    inactive = 1.0 - ap_p[v] - ap_m[v]
                else:
                    inactive = (1.0 - ap_p[v]) * (1.0 - ap_m[v])
                qv = q[v]
                new_p[v] = _clamp(qv * (bn - bt) * inactive)
                new_m[v] = _clamp((qv * (1.0 - bn) + (1.0 - qv) * (1.0 - bt)) * inactive)
            for w in z:
                pi_p[w] = pi_m[w] = 0.0
            for v in new_p:
                pi_p[v] = new_p[v]
                pi_m[v] = new_m[v]
                ap_p[v] = _clamp(ap_p[v] + new_p[v])
                ap_m[v] = _clamp(ap_m[v] + new_m[v])
                if exact and ap_p[v] + ap_m[v] > 1.0 + TOL:
                    raise InvariantError("ap+ + ap- exceeds 1")
            t += 1
            if new_p:
                steps = t
            if record and new_p:
                history.append((dict(new_p), dict(new_m)))
            z = sorted(beta)
        return ap_p, ap_m, steps, history

    def root_plus(self, q: list[float]) -> float:
        i = self.local.get(self.root)
        if i is None:
            return 0.0
        return self.run(q)[0][i]

    def local_q(self, qx) -> list[float]:
        """Gather global post-prebunking susceptibilities into local order."""
        return [float(qx[g]) for g in self.nodes]


def ap_plus(miia: Arborescence, seeds, x, params, *, neg_seeds=(), form: str = "tree",
            record_steps: bool = False) -> ActivationTrace:
    """Activation probabilities of every node of ``miia`` reachable from the
    seeds, with the nodes in ``x`` prebunked.

    ``neg_seeds`` start in the negative state (used for corrective seeding).
    """
    if miia.direction != "in":
        raise ConfigError("activation probabilities need an in-arborescence")
    seeds = set(seeds)
    if seeds & set(x):
        raise ConfigError("intervention set overlaps the seed set")
    dp = TreeDP(miia, seeds, neg_seeds, form=form)
    qx = params.q_after(sorted(set(x)))
    ap_p, ap_m, steps, hist = dp.run(dp.local_q(qx), record=record_steps)
    trace = ActivationTrace(
        root=miia.root,
        ap_plus={g: ap_p[i] for i, g in enumerate(dp.nodes)},
        ap_minus={g: ap_m[i] for i, g in enumerate(dp.nodes)},
        steps=steps,
    )
    if record_steps:
        trace.pi_plus = [{dp.nodes[i]: p for i, p in a.items()} for a, _ in hist]
        trace.pi_minus = [{dp.nodes[i]: p for i, p in b.items()} for _, b in hist]
    return trace
