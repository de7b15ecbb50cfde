"""Directed graph with per-edge propagation probabilities, node parameters,
and the loaders that build them from TSV files."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DataError, ParseError, ValidationError

log = logging.getLogger(__name__)

ROOT_LABEL = "ROOT"


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable directed graph.

    Nodes are dense indices ``0..n-1`` with opaque string labels.  Every edge
    carries two propagation probabilities, one per information channel
    (``p_plus`` for misinformation, ``p_minus`` for corrective information).
    Use :meth:`from_edges` or :meth:`from_labeled_edges` to build one.
    """

    labels: tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    p_plus: np.ndarray
    p_minus: np.ndarray
    _index: dict = field(init=False, repr=False)
    out_edges: tuple = field(init=False, repr=False)
    in_edges: tuple = field(init=False, repr=False)
    _edge_ids: dict = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.labels)
        index = {lab: i for i, lab in enumerate(self.labels)}
        if len(index) != n:
            raise ValidationError("duplicate node labels")
        out = [[] for _ in range(n)]
        inn = [[] for _ in range(n)]
        ids = {}
        for e, (u, v) in enumerate(zip(self.src.tolist(), self.dst.tolist())):
            if not (0 <= u < n and 0 <= v < n):
                raise IndexError(f"edge {e} references unknown node")
            if u == v:
                raise ValidationError(f"self-loop on node {self.labels[u]!r}")
            if (u, v) in ids:
                raise ValidationError(
                    f"duplicate edge {self.labels[u]!r}->{self.labels[v]!r}")
            ids[(u, v)] = e
            out[u].append(e)
            inn[v].append(e)
        for arr in (self.p_plus, self.p_minus):
            if arr.size and (np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr))):
                raise ValidationError("edge probabilities must lie in [0, 1]")
        if self.p_plus.size and np.any((self.p_plus == 0.0) & (self.p_minus == 0.0)):
            raise ValidationError("edges with p_plus = p_minus = 0 must be omitted")
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "out_edges", tuple(tuple(x) for x in out))
        object.__setattr__(self, "in_edges", tuple(tuple(x) for x in inn))
        object.__setattr__(self, "_edge_ids", ids)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, labels: Sequence[str], edges: Iterable[tuple]) -> "Graph":
        """Build from ``(src, dst, p_plus[, p_minus])`` index tuples.

        Edges whose probabilities are both zero are dropped.
        """
        src, dst, pp, pm = [], [], [], []
        for row in edges:
            u, v, p = row[0], row[1], float(row[2])
            q = float(row[3]) if len(row) > 3 else p
            if p == 0.0 and q == 0.0:
                continue
            src.append(int(u))
            dst.append(int(v))
            pp.append(p)
            pm.append(q)
        return cls(
            labels=tuple(str(x) for x in labels),
            src=_frozen(src, np.int64),
            dst=_frozen(dst, np.int64),
            p_plus=_frozen(pp, np.float64),
            p_minus=_frozen(pm, np.float64),
        )

    @classmethod
    def from_labeled_edges(cls, rows: Iterable[tuple], nodes: Iterable[str] = ()) -> "Graph":
        """Build from ``(src_label, dst_label, p_plus[, p_minus])`` rows.

        Indices follow first appearance: first the optional ``nodes`` then
        labels in row order (source before destination).
        """
        index: dict[str, int] = {}
        for lab in nodes:
            index.setdefault(str(lab), len(index))
        edges = []
        for row in rows:
            u = index.setdefault(str(row[0]), len(index))
            v = index.setdefault(str(row[1]), len(index))
            edges.append((u, v, *row[2:]))
        return cls.from_edges(list(index), edges)

    def with_probabilities(self, p_plus, p_minus=None) -> "Graph":
        """Same structure, new per-edge probabilities (aligned with edge ids)."""
        p_plus = np.asarray(p_plus, dtype=np.float64)
        p_minus = p_plus if p_minus is None else np.asarray(p_minus, dtype=np.float64)
        if p_plus.shape != self.src.shape or p_minus.shape != self.src.shape:
            raise ConfigError("probability arrays must have one entry per edge")
        return Graph.from_edges(
            self.labels,
            zip(self.src.tolist(), self.dst.tolist(), p_plus.tolist(), p_minus.tolist()),
        )

    # -- queries ----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    node_count = n

    @property
    def m(self) -> int:
        return int(self.src.size)

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise IndexError(f"unknown node label {label!r}") from None

    def label(self, i: int) -> str:
        return self.labels[i]

    def indices(self, labels: Iterable[str]) -> list[int]:
        return [self.index(x) for x in labels]

    def check_node(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self.n:
            raise IndexError(f"node index {v} out of range for graph with {self.n} nodes")
        return v

    def edge_id(self, u: int, v: int) -> int | None:
        return self._edge_ids.get((u, v))

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._edge_ids

    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n)

    def successors(self, u: int) -> list[int]:
        dst = self.dst
        return [int(dst[e]) for e in self.out_edges[u]]

    def predecessors(self, v: int) -> list[int]:
        src = self.src
        return [int(src[e]) for e in self.in_edges[v]]

    def edges(self):
        """Iterate ``(src, dst, p_plus, p_minus)`` in edge-id order."""
        return zip(self.src.tolist(), self.dst.tolist(),
                   self.p_plus.tolist(), self.p_minus.tolist())

    def out_lists(self) -> list[list[tuple[int, float, float, int]]]:
        """Per-node ``(dst, p_plus, p_minus, edge_id)`` lists for hot loops."""
        cached = self.__dict__.get("_out_lists")
        if cached is None:
            dst = self.dst.tolist()
            pp = self.p_plus.tolist()
            pm = self.p_minus.tolist()
            cached = [[(dst[e], pp[e], pm[e], e) for e in es] for es in self.out_edges]
            object.__setattr__(self, "_out_lists", cached)
        return cached

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class NodeParams:
    """Per-node susceptibility ``q`` and prebunking effect ``eps``."""

    q: np.ndarray
    eps: np.ndarray
    n_share: np.ndarray | None = None
    n_fake: np.ndarray | None = None

    def __post_init__(self):
        q = _frozen(self.q, np.float64)
        eps = _frozen(self.eps, np.float64)
        if q.ndim != 1 or q.shape != eps.shape:
            raise ConfigError("q and eps must be 1-d arrays of equal length")
        for name, a in (("q", q), ("eps", eps)):
            if a.size and (np.any(np.isnan(a)) or a.min() < 0.0 or a.max() > 1.0):
                raise ConfigError(f"{name} entries must lie in [0, 1]")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "eps", eps)
        if (self.n_share is None) != (self.n_fake is None):
            raise ConfigError("n_share and n_fake must be given together")
        if self.n_share is not None:
            share = _frozen(self.n_share, np.int64)
            fake = _frozen(self.n_fake, np.int64)
            if share.shape != q.shape or fake.shape != q.shape:
                raise ConfigError("count arrays must have length n")
            if np.any(share < 0) or np.any(fake < 0) or np.any(fake > share):
                raise ConfigError("need 0 <= n_fake <= n_share")
            object.__setattr__(self, "n_share", share)
            object.__setattr__(self, "n_fake", fake)

    @property
    def n(self) -> int:
        return int(self.q.size)

    @classmethod
    def uniform(cls, n: int, q: float = 1.0, eps: float = 1.0) -> "NodeParams":
        return cls(np.full(n, q), np.full(n, eps))

    def q_after(self, x: Iterable[int]) -> np.ndarray:
        """Susceptibility after prebunking the nodes in ``x``."""
        qx = self.q.copy()
        idx = np.fromiter(x, dtype=np.int64)
        if idx.size:
            qx[idx] = (1.0 - self.eps[idx]) * self.q[idx]
        return qx

    def replace(self, q=None, eps=None) -> "NodeParams":
        return NodeParams(self.q if q is None else q, self.eps if eps is None else eps,
                          self.n_share, self.n_fake)

    def check(self, graph: Graph) -> None:
        if self.n != graph.n:
            raise ConfigError(f"params cover {self.n} nodes, graph has {graph.n}")


@dataclass(frozen=True, eq=False)
class NodeStats:
    """Per-node share counts from merged diffusion trees; ``total`` is D."""

    labels: tuple[str, ...]
    n_share: np.ndarray
    n_fake: np.ndarray
    total: int

    def __post_init__(self):
        share = _frozen(self.n_share, np.int64)
        fake = _frozen(self.n_fake, np.int64)
        if share.shape != (len(self.labels),) or fake.shape != share.shape:
            raise ConfigError("count arrays must align with labels")
        if np.any(fake > share) or np.any(fake < 0):
            raise ConfigError("need 0 <= n_fake <= n_share")
        if share.size and int(share.max()) > self.total:
            raise ConfigError("total news count D must bound every n_share")
        object.__setattr__(self, "n_share", share)
        object.__setattr__(self, "n_fake", fake)

    def for_graph(self, graph: Graph) -> "NodeStats":
        """Reorder to ``graph``'s node indices (missing labels count zero)."""
        pos = {lab: i for i, lab in enumerate(self.labels)}
        share = np.zeros(graph.n, dtype=np.int64)
        fake = np.zeros(graph.n, dtype=np.int64)
        for i, lab in enumerate(graph.labels):
            j = pos.get(lab)
            if j is not None:
                share[i] = self.n_share[j]
                fake[i] = self.n_fake[j]
        return NodeStats(graph.labels, share, fake, self.total)


# ---------------------------------------------------------------------------
# file formats


def _rows(path: Path):
    """Yield ``(line_no, fields)`` for non-blank, non-comment TSV lines."""
    with open(path, encoding="utf-8") as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield no, line.split("\t")


def _prob(text: str, path, no) -> float:
    try:
        p = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", path, no) from None
    if not 0.0 <= p <= 1.0:
        raise ParseError(f"probability {p} outside [0, 1]", path, no)
    return p


def load_edge_list(path, default_p: float | None = None, undirected: bool = False) -> Graph:
    """Read ``src<TAB>dst[<TAB>p]`` rows into a :class:`Graph`.

    Rows without a probability take ``default_p``.  With ``undirected`` each
    row contributes both directions.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such file: {path}")
    rows = []
    seen = set()
    for no, fields in _rows(path):
        if len(fields) not in (2, 3):
            raise ParseError(f"expected 2 or 3 fields, got {len(fields)}", path, no)
        u, v = fields[0], fields[1]
        if not u or not v:
            raise ParseError("empty node label", path, no)
        if len(fields) == 3:
            p = _prob(fields[2], path, no)
        elif default_p is None:
            raise ConfigError(f"{path}:{no}: row has no probability and no default was given")
        else:
            p = float(default_p)
        if u == v:
            raise ValidationError(f"{path}:{no}: self-loop on {u!r}")
        pairs = [(u, v), (v, u)] if undirected else [(u, v)]
        for a, b in pairs:
            if (a, b) in seen:
                if undirected:
                    continue
                raise ValidationError(f"{path}:{no}: duplicate edge {a!r}->{b!r}")
            seen.add((a, b))
            rows.append((a, b, p))
    return Graph.from_labeled_edges(rows)


def write_edge_list(graph: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# nodes={graph.n} edges={graph.m}\n")
        for u, v, pp, _ in graph.edges():
            fh.write(f"{graph.labels[u]}\t{graph.labels[v]}\t{pp!r}\n")


def merge_diffusion_trees(tree_files: Sequence, labels: Sequence[bool]) -> tuple[Graph, NodeStats]:
    """Merge per-article diffusion trees into one network.

    Each file is an edge list whose first source label is the article (root).
    All roots collapse into a single node labelled ``ROOT``; duplicate edges
    collapse to one.  ``labels[i]`` is true when tree ``i`` is fake news.
    Edge probabilities are placeholders (1.0); assign real ones with
    :func:`netprebunk.harness.synthesize_params_upfd`.
    """
    tree_files = list(tree_files)
    labels = list(labels)
    if not tree_files:
        raise ConfigError("no diffusion trees given")
    if len(labels) != len(tree_files):
        raise ConfigError(f"{len(tree_files)} tree files but {len(labels)} labels")
    edges: dict[tuple[str, str], None] = {}
    share: dict[str, int] = {}
    fake: dict[str, int] = {}
    dropped = 0
    for path, is_fake in zip(tree_files, labels):
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"no such file: {path}")
        root = None
        users = set()
        for no, fields in _rows(path):
            if len(fields) not in (2, 3):
                raise ParseError(f"expected 2 or 3 fields, got {len(fields)}", path, no)
            u, v = fields[0], fields[1]
            if root is None:
                root = u
            u = ROOT_LABEL if u == root else u
            v = ROOT_LABEL if v == root else v
            if u == v:
                dropped += 1
                continue
            edges.setdefault((u, v), None)
            users.update(x for x in (u, v) if x != ROOT_LABEL)
        if root is None:
            raise DataError(f"{path}: empty diffusion tree")
        for user in users:
            share[user] = share.get(user, 0) + 1
            if is_fake:
                fake[user] = fake.get(user, 0) + 1
    if dropped:
        log.warning("dropped %d self-loop rows while merging trees", dropped)
    graph = Graph.from_labeled_edges(((u, v, 1.0) for u, v in edges), nodes=[ROOT_LABEL])
    stats = NodeStats(
        graph.labels,
        [share.get(lab, 0) for lab in graph.labels],
        [fake.get(lab, 0) for lab in graph.labels],
        total=len(tree_files),
    )
    return graph, stats


def build_set_cover_gadget(universe_size: int, subsets: Sequence[Iterable[int]]):
    """Reduction graph from a set-cover instance.

    Nodes are ``a`` (index 0), ``b1..bm`` (one per subset) and ``c1..cn``
    (one per element).  Edges ``a->b_j`` for every subset and ``b_j->c_i``
    when element ``i`` is in subset ``j``; every probability, susceptibility
    and effect is 1.  Returns ``(graph, params, seed)`` with seed ``a``.
    """
    subsets = [sorted(set(int(i) for i in s)) for s in subsets]
    covered = set()
    for s in subsets:
        for i in s:
            if not 0 <= i < universe_size:
                raise ConfigError(f"element {i} outside universe of size {universe_size}")
        covered.update(s)
    missing = set(range(universe_size)) - covered
    if missing:
        raise ConfigError(f"elements {sorted(missing)} are not covered by any subset")
    m = len(subsets)
    labels = ["a"] + [f"b{j + 1}" for j in range(m)] + [f"c{i + 1}" for i in range(universe_size)]
    edges = [(0, 1 + j, 1.0) for j in range(m)]
    for j, s in enumerate(subsets):
        edges.extend((1 + j, 1 + m + i, 1.0) for i in s)
    graph = Graph.from_edges(labels, edges)
    return graph, NodeParams.uniform(graph.n, 1.0, 1.0), 0


# NodeParams / NodeStats TSV


def read_node_params(path, graph: Graph) -> NodeParams:
    """Read ``node<TAB>q<TAB>eps`` rows; every graph node must be listed."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such file: {path}")
    q = np.full(graph.n, np.nan)
    eps = np.full(graph.n, np.nan)
    for no, fields in _rows(path):
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", path, no)
        try:
            i = graph.index(fields[0])
        except IndexError:
            raise ParseError(f"unknown node {fields[0]!r}", path, no) from None
        q[i] = _prob(fields[1], path, no)
        eps[i] = _prob(fields[2], path, no)
    missing = np.flatnonzero(np.isnan(q))
    if missing.size:
        raise DataError(f"{path}: no parameters for {missing.size} nodes "
                        f"(first: {graph.labels[missing[0]]!r})")
    return NodeParams(q, eps)


def write_node_params(params: NodeParams, graph: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# node\tq\teps\n")
        for lab, q, e in zip(graph.labels, params.q.tolist(), params.eps.tolist()):
            fh.write(f"{lab}\t{q!r}\t{e!r}\n")


def read_node_stats(path, total: int | None = None) -> NodeStats:
    """Read ``node<TAB>n_share<TAB>n_fake``; a ``# D=<int>`` comment sets D."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"no such file: {path}")
    labels, share, fake = [], [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if s.startswith("#") and "D=" in s and total is None:
                try:
                    total = int(s.split("D=", 1)[1].split()[0])
                except ValueError:
                    pass
    for no, fields in _rows(path):
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", path, no)
        try:
            a, b = int(fields[1]), int(fields[2])
        except ValueError:
            raise ParseError("counts must be integers", path, no) from None
        labels.append(fields[0])
        share.append(a)
        fake.append(b)
    if total is None:
        raise ConfigError(f"{path}: total news count D unknown (add '# D=<n>')")
    return NodeStats(tuple(labels), share, fake, total)


def write_node_stats(stats: NodeStats, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# D={stats.total}\n")
        for lab, a, b in zip(stats.labels, stats.n_share.tolist(), stats.n_fake.tolist()):
            fh.write(f"{lab}\t{a}\t{b}\n")
