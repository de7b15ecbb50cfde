"""Experiment harness: parameter synthesis, observation noise and
suppression-curve experiments with CSV/JSON export.

Every random draw in an experiment comes from a named stream derived from
the config's ``master_seed``, so an identical config reproduces identical
results.  Target sets are selected once at the largest budget and evaluated
by prefixes; the ``k = 0`` cell is simulated once and shared by every curve
of the same diffusion model.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import json
import logging
import math
import time
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .baselines import (
    ALGORITHMS,
    advanced_greedy_targets,
    cmia_o_targets,
    default_candidates,
    degree_targets,
    distance_targets,
    gullible_targets,
    random_targets,
)
from .diffusion import SpreadEstimate, estimate_coicm_spread, estimate_ic_spread, estimate_spread
from .errors import ConfigError, DataError, PrebunkError
from .graph import (
    ROOT_LABEL,
    Graph,
    NodeParams,
    NodeStats,
    load_edge_list,
    read_node_params,
    read_node_stats,
)
from .solver import InterventionSet, mia_npp

log = logging.getLogger(__name__)

PARAM_MODES = ("wc", "upfd", "explicit")
DEFAULT_K_GRID = tuple(range(0, 201, 20))


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for one experiment; see README for the file format."""

    param_mode: str = "wc"
    graph: str | None = None  # edge list; wc mode builds a synthetic network when absent
    undirected: bool = False
    stats: str | None = None  # upfd node statistics
    params: str | None = None  # explicit node parameters
    seeds: tuple[str, ...] = ()  # seed labels; wc mode samples them when empty
    nodes: int = 2000
    attach: int = 3
    seed_count: int = 5
    seed_pool: int = 50
    c: float = 30.0
    mu_q: float = 0.7
    var_q: float = 0.3
    mu_eps: float = 0.5
    var_eps: float = 0.1
    noise_var: float | None = None  # None: algorithms see the true parameters
    noise_levels: tuple[float, ...] = (0.0, 0.1, 0.5, 1.0)
    eps_obs: float = 0.5
    k_grid: tuple[int, ...] = DEFAULT_K_GRID
    runs: int = 1000
    master_seed: int = 0
    theta: float = 0.001
    thetas: tuple[float, ...] = (0.1, 0.01, 0.001, 0.0001)
    algorithms: tuple[str, ...] = ALGORITHMS
    rho: int = 100
    paired: bool = False
    workers: int = 1
    mu_eps_grid: tuple[float, ...] = (0.2, 0.5, 1.0)
    taus: tuple[int, ...] = (0, 1)

    def __post_init__(self):
        if self.param_mode not in PARAM_MODES:
            raise ConfigError(f"param_mode must be one of {', '.join(PARAM_MODES)}")
        ks = tuple(int(k) for k in self.k_grid)
        if not ks or ks[0] != 0 or any(b <= a for a, b in zip(ks, ks[1:])):
            raise ConfigError("k_grid must be strictly ascending and start at 0")
        object.__setattr__(self, "k_grid", ks)
        if self.runs < 1:
            raise ConfigError("runs must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if self.rho < 1:
            raise ConfigError("rho must be at least 1")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
        for th in (self.theta, *self.thetas):
            if not 0.0 < th <= 1.0:
                raise ConfigError("theta values must lie in (0, 1]")
        if self.noise_var is not None and self.noise_var < 0:
            raise ConfigError("noise variance must be non-negative")
        if any(s < 0 for s in self.noise_levels):
            raise ConfigError("noise variances must be non-negative")
        if any(t < 0 for t in self.taus):
            raise ConfigError("delays must be non-negative")

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: (list(v) if isinstance(v, tuple) else v)
                for f in dataclasses.fields(self) for v in [getattr(self, f.name)]}

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        """Build from ``key -> text`` pairs, converting by field type."""
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kw = {}
        for key, text in values.items():
            name = key.strip().replace("-", "_")
            if name not in fields:
                raise ConfigError(f"unknown config key {key!r}")
            kw[name] = _convert(name, fields[name].type, str(text).strip())
        return cls(**kw)

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "ExperimentConfig":
        """Read a flat ``key = value`` file; ``overrides`` win over the file."""
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"no such config file: {path}")
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        try:
            parser.read_string("[experiment]\n" + path.read_text(encoding="utf-8"))
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        values = dict(parser["experiment"])
        values.update(overrides or {})
        cfg = cls.from_mapping(values)
        # relative data paths resolve against the config file's directory
        fix = {}
        for name in ("graph", "stats", "params"):
            p = getattr(cfg, name)
            if p is not None and name not in (overrides or {}) and not Path(p).is_absolute():
                fix[name] = str(path.parent / p)
        return cfg.replace(**fix) if fix else cfg


def _convert(name: str, kind: str, text: str):
    try:
        if kind.startswith("tuple"):
            items = [t.strip() for t in text.split(",") if t.strip()]
            if "int" in kind:
                return tuple(int(t) for t in items)
            if "float" in kind:
                return tuple(float(t) for t in items)
            return tuple(items)
        if kind == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind.startswith("float"):  # optional float
            return None if text.lower() in ("", "none") else float(text)
        return None if text == "" else text
    except ValueError:
        raise ConfigError(f"bad value for {name}: {text!r}") from None


def stream_seed(master_seed: int, name: str) -> int:
    """Independent integer seed for the named random stream."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(zlib.crc32(name.encode()),))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


# ---------------------------------------------------------------------------
# parameter synthesis


def truncated_normal(mu: float, var: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Normal(mu, var) restricted to [0, 1], sampled by rejection."""
    if var < 0:
        raise ConfigError("variance must be non-negative")
    if var == 0:
        if not 0.0 <= mu <= 1.0:
            raise ConfigError("a degenerate distribution needs its mean in [0, 1]")
        return np.full(size, float(mu))
    sd = math.sqrt(var)
    out = np.empty(size)
    filled = 0
    for _ in range(10_000):
        if filled == size:
            break
        draw = rng.normal(mu, sd, size=max(2 * (size - filled), 16))
        ok = draw[(draw >= 0.0) & (draw <= 1.0)][: size - filled]
        out[filled:filled + ok.size] = ok
        filled += ok.size
    else:
        raise ConfigError(f"rejection sampling of N[0,1]({mu}, {var}) does not converge")
    return out


def synthesize_params_upfd(stats: NodeStats, c: float = 30.0, mu_eps: float = 0.5,
                           var_eps: float = 0.1, rng_seed: int = 0):
    """Share-count based parameters.

    Returns ``(p_in, params)``: ``p_in[v] = min(1, c * n_share(v) / D)`` is
    the probability of every edge into ``v``, ``q_v`` is the smoothed fake
    ratio ``(n_fake + 1) / (n_share + 2)`` (1 for the merged root) and
    ``eps_v`` is drawn from the truncated normal.
    """
    if stats.total <= 0:
        raise ConfigError("total news count D must be positive")
    share = stats.n_share.astype(np.float64)
    fake = stats.n_fake.astype(np.float64)
    p_in = np.minimum(1.0, c * share / stats.total)
    q = (fake + 1.0) / (share + 2.0)
    for i, lab in enumerate(stats.labels):
        if lab == ROOT_LABEL:
            q[i] = 1.0
    eps = truncated_normal(mu_eps, var_eps, len(stats.labels), np.random.default_rng(rng_seed))
    return p_in, NodeParams(q, eps, stats.n_share, stats.n_fake)


def wc_probabilities(graph: Graph) -> np.ndarray:
    """Weighted-cascade probabilities ``1 / d_in(v)`` per edge."""
    indeg = graph.in_degree()
    d = indeg[graph.dst]
    if np.any(d == 0):
        raise DataError("edge into a node with in-degree 0")
    return 1.0 / d.astype(np.float64)


def synthesize_params_wc(graph: Graph, mu_q: float = 0.7, var_q: float = 0.3, mu_eps: float = 0.5,
                         var_eps: float = 0.1, rng_seed: int = 0):
    """Returns ``(edge probabilities, params)`` with truncated-normal q and eps."""
    rng = np.random.default_rng(rng_seed)
    q = truncated_normal(mu_q, var_q, graph.n, rng)
    eps = truncated_normal(mu_eps, var_eps, graph.n, rng)
    return wc_probabilities(graph), NodeParams(q, eps)


def pick_seeds(graph: Graph, count: int = 5, pool: int = 50, rng_seed: int = 0) -> tuple[int, ...]:
    """``count`` nodes drawn uniformly from the ``pool`` highest out-degrees."""
    if count < 1:
        raise ConfigError("need at least one seed")
    deg = graph.out_degree()
    top = np.lexsort((np.arange(graph.n), -deg))[:pool]
    if count > top.size:
        raise ConfigError(f"cannot draw {count} seeds from {top.size} nodes")
    chosen = np.random.default_rng(rng_seed).choice(top, size=count, replace=False)
    return tuple(sorted(int(v) for v in chosen))


def synthetic_network(nodes: int = 2000, attach: int = 3, rng_seed: int = 0) -> Graph:
    """Barabasi-Albert network with every undirected edge in both directions
    (probabilities are placeholders)."""
    import networkx as nx

    if nodes <= attach or attach < 1:
        raise ConfigError("need nodes > attach >= 1")
    g = nx.barabasi_albert_graph(nodes, attach, seed=rng_seed)
    edges = []
    for u, v in sorted(g.edges()):
        edges.append((u, v, 1.0, 1.0))
        edges.append((v, u, 1.0, 1.0))
    return Graph.from_edges([str(i) for i in range(nodes)], edges)


def apply_observation_noise(params: NodeParams, sigma_sq: float, mean_eps: float = 0.5,
                            rng_seed: int = 0) -> NodeParams:
    """Noisy view of ``params``: ``q + N(0, sigma_sq)`` clamped to [0, 1] and a
    constant effect ``mean_eps`` for every node."""
    if sigma_sq < 0:
        raise ConfigError("noise variance must be non-negative")
    if not 0.0 <= mean_eps <= 1.0:
        raise ConfigError("mean effect must lie in [0, 1]")
    q = params.q.copy()
    if sigma_sq > 0:
        q = np.clip(q + np.random.default_rng(rng_seed).normal(0.0, math.sqrt(sigma_sq), q.size),
                    0.0, 1.0)
    return NodeParams(q, np.full(params.n, float(mean_eps)), params.n_share, params.n_fake)


# ---------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True, eq=False)
class Scenario:
    """A graph with true parameters (for diffusion), observed parameters (for
    selection) and misinformation seeds."""

    graph: Graph
    true_params: NodeParams
    observed: NodeParams
    seeds: tuple[int, ...]

    def __post_init__(self):
        if self.observed is self.true_params:
            raise PrebunkError("observed and true parameters must be distinct objects")


def build_scenario(config: ExperimentConfig) -> Scenario:
    ms = config.master_seed
    if config.param_mode == "wc":
        if config.graph:
            graph = load_edge_list(config.graph, default_p=1.0, undirected=config.undirected)
        else:
            graph = synthetic_network(config.nodes, config.attach, stream_seed(ms, "graph"))
        p, true = synthesize_params_wc(graph, config.mu_q, config.var_q, config.mu_eps,
                                       config.var_eps, stream_seed(ms, "params"))
        graph = graph.with_probabilities(p)
    elif config.param_mode == "upfd":
        if not config.graph or not config.stats:
            raise ConfigError("upfd mode needs graph and stats files")
        graph = load_edge_list(config.graph, default_p=1.0)
        stats = read_node_stats(config.stats).for_graph(graph)
        p_in, true = synthesize_params_upfd(stats, config.c, config.mu_eps, config.var_eps,
                                            stream_seed(ms, "params"))
        graph = graph.with_probabilities(p_in[graph.dst])
    else:
        if not config.graph or not config.params:
            raise ConfigError("explicit mode needs graph and params files")
        graph = load_edge_list(config.graph, default_p=None, undirected=config.undirected)
        true = read_node_params(config.params, graph)
    seeds = _scenario_seeds(config, graph)
    if config.noise_var is None:
        observed = NodeParams(true.q.copy(), true.eps.copy(), true.n_share, true.n_fake)
    else:
        observed = apply_observation_noise(true, config.noise_var, config.eps_obs,
                                           stream_seed(ms, "noise"))
    return Scenario(graph, true, observed, seeds)


def _scenario_seeds(config: ExperimentConfig, graph: Graph) -> tuple[int, ...]:
    if config.seeds:
        try:
            return tuple(sorted(set(graph.indices(config.seeds))))
        except (IndexError, KeyError) as exc:
            raise ConfigError(f"unknown seed label: {exc}") from None
    if config.param_mode == "upfd":
        return (graph.index(ROOT_LABEL),)
    if config.param_mode == "wc":
        return pick_seeds(graph, config.seed_count, config.seed_pool,
                          stream_seed(config.master_seed, "seeds"))
    raise ConfigError("explicit mode needs seed labels")


def select_targets(algorithm: str, graph: Graph, params: NodeParams, seeds, k: int, *,
                   theta: float = 0.001, rho: int = 100, rng_seed: int = 0,
                   tau: int = 0) -> InterventionSet:
    """Dispatch to one of the selection strategies by name."""
    seeds = sorted(seeds)
    if algorithm == "mia-npp":
        return mia_npp(graph, params, seeds, k, theta=theta)
    if algorithm == "cmia-o":
        return cmia_o_targets(graph, seeds, k, theta, tau=tau)
    if algorithm == "advanced-greedy":
        return advanced_greedy_targets(graph, seeds, k, rho=rho, rng_seed=rng_seed)
    cand = default_candidates(graph, seeds)
    if algorithm == "random":
        return random_targets(cand, min(k, len(cand)), rng_seed)
    if algorithm == "gullible":
        return gullible_targets(params, cand, k)
    if algorithm == "degree":
        return degree_targets(graph, cand, k)
    if algorithm == "distance":
        return distance_targets(graph, seeds, cand, k)
    raise ConfigError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class SuppressionCurve:
    """Mean misinformation spread per budget for one strategy."""

    algorithm: str
    ks: tuple[int, ...]
    means: tuple[float, ...]
    stderrs: tuple[float, ...]
    targets: tuple[int, ...] = ()
    select_ms: float = 0.0

    @property
    def relative(self) -> tuple[float, ...]:
        y0 = self.means[0]
        if y0 == 0:
            return tuple(1.0 for _ in self.means)
        return tuple(1.0 if k == 0 else m / y0 for k, m in zip(self.ks, self.means))

    @property
    def relative_stderr(self) -> tuple[float, ...]:
        y0 = self.means[0]
        return tuple(0.0 if (k == 0 or y0 == 0) else s / y0 for k, s in zip(self.ks, self.stderrs))

    def at(self, k: int) -> tuple[float, float]:
        """(relative spread, its standard error) at budget ``k``."""
        i = self.ks.index(k)
        return self.relative[i], self.relative_stderr[i]

    def rows(self):
        for k, m, s, r in zip(self.ks, self.means, self.stderrs, self.relative):
            yield (self.algorithm, k, m, s, r)


Evaluator = Callable[[str, int, Sequence[int]], SpreadEstimate]


def _evaluator(config: ExperimentConfig, run: Callable[[Sequence[int], int], SpreadEstimate]) -> Evaluator:
    """Wrap a spread estimator with the config's seeding policy."""

    def evaluate(name: str, k: int, x: Sequence[int]) -> SpreadEstimate:
        if config.paired:
            seed = stream_seed(config.master_seed, "evaluate")
        else:
            seed = stream_seed(config.master_seed, f"evaluate:{name}:{k}")
        return run(list(x), seed)

    return evaluate


def _curve(name: str, config: ExperimentConfig, targets: InterventionSet, base: SpreadEstimate,
           evaluate: Evaluator, select_ms: float) -> SuppressionCurve:
    means, errs = [], []
    for k in config.k_grid:
        if k == 0:
            est = base
        else:
            est = evaluate(name, k, targets.targets[:k])
        means.append(est.mean_positive)
        errs.append(est.stderr_positive)
        log.info("%s k=%d mean=%.3f", name, k, est.mean_positive)
    return SuppressionCurve(name, config.k_grid, tuple(means), tuple(errs), targets.targets, select_ms)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t0) * 1000.0


def _icn_evaluator(config: ExperimentConfig, scenario: Scenario, params: NodeParams | None = None):
    params = scenario.true_params if params is None else params
    if params is scenario.observed:
        raise PrebunkError("diffusion must run on the true parameters")
    return _evaluator(config, lambda x, seed: estimate_spread(
        scenario.graph, params, scenario.seeds, x, runs=config.runs, master_seed=seed,
        workers=config.workers))


def run_suppression_experiment(config: ExperimentConfig,
                               scenario: Scenario | None = None) -> list[SuppressionCurve]:
    """One curve per configured algorithm: selection on observed parameters,
    Monte Carlo evaluation on true ones."""
    scenario = scenario or build_scenario(config)
    evaluate = _icn_evaluator(config, scenario)
    base = evaluate("none", 0, ())
    kmax = config.k_grid[-1]
    curves = []
    for name in config.algorithms:
        targets, ms = _timed(lambda: select_targets(
            name, scenario.graph, scenario.observed, scenario.seeds, kmax, theta=config.theta,
            rho=config.rho, rng_seed=stream_seed(config.master_seed, f"select:{name}")))
        log.info("%s selected %d targets in %.0f ms", name, len(targets), ms)
        curves.append(_curve(name, config, targets, base, evaluate, ms))
    return curves


def run_theta_sensitivity(config: ExperimentConfig, thetas: Sequence[float] | None = None,
                          scenario: Scenario | None = None):
    """MIA-NPP curves per threshold plus selection wall-clock (ms) per threshold."""
    thetas = tuple(config.thetas if thetas is None else thetas)
    scenario = scenario or build_scenario(config)
    evaluate = _icn_evaluator(config, scenario)
    base = evaluate("none", 0, ())
    kmax = config.k_grid[-1]
    curves, timing = [], {}
    for th in thetas:
        targets, ms = _timed(lambda: mia_npp(scenario.graph, scenario.observed,
                                             scenario.seeds, kmax, theta=th))
        timing[th] = ms
        curves.append(_curve(f"mia-npp@theta={th:g}", config, targets, base, evaluate, ms))
    return curves, timing


def run_noise_experiment(config: ExperimentConfig, levels: Sequence[float] | None = None,
                         scenario: Scenario | None = None) -> list[SuppressionCurve]:
    """MIA-NPP with full observation, then with noisy q and a constant
    observed effect for each noise variance."""
    levels = tuple(config.noise_levels if levels is None else levels)
    scenario = scenario or build_scenario(config.replace(noise_var=None))
    evaluate = _icn_evaluator(config, scenario)
    base = evaluate("none", 0, ())
    kmax = config.k_grid[-1]
    true = scenario.true_params
    targets, ms = _timed(lambda: mia_npp(scenario.graph, scenario.observed, scenario.seeds,
                                         kmax, theta=config.theta))
    curves = [_curve("mia-npp", config, targets, base, evaluate, ms)]
    for s2 in levels:
        obs = apply_observation_noise(true, s2, config.eps_obs,
                                      stream_seed(config.master_seed, f"noise:{s2!r}"))
        targets, ms = _timed(lambda: mia_npp(scenario.graph, obs, scenario.seeds, kmax,
                                             theta=config.theta))
        curves.append(_curve(f"mia-npp@noise={s2:g}", config, targets, base, evaluate, ms))
    return curves


def run_pbc_comparison(config: ExperimentConfig,
                       scenario: Scenario | None = None) -> list[SuppressionCurve]:
    """Blocking (IC), clarification with delays (COICM) and prebunking with
    several mean effects (IC-N); each curve is normalised by its own model's
    spread without intervention."""
    scenario = scenario or build_scenario(config)
    g, seeds = scenario.graph, scenario.seeds
    kmax = config.k_grid[-1]
    ms0 = config.master_seed
    curves = []

    ic_eval = _evaluator(config, lambda x, seed: estimate_ic_spread(
        g, seeds, x, runs=config.runs, master_seed=seed, workers=config.workers))
    ic_base = ic_eval("ic", 0, ())
    blockers, ms = _timed(lambda: advanced_greedy_targets(
        g, seeds, kmax, rho=config.rho, rng_seed=stream_seed(ms0, "select:advanced-greedy")))
    curves.append(_curve("blocking", config, blockers, ic_base, ic_eval, ms))

    for tau in config.taus:
        ev = _evaluator(config, lambda x, seed, tau=tau: estimate_coicm_spread(
            g, seeds, x, delay=tau, runs=config.runs, master_seed=seed, workers=config.workers))
        chosen, ms = _timed(lambda: cmia_o_targets(g, seeds, kmax, config.theta, tau=tau))
        curves.append(_curve(f"clarification@tau={tau}", config, chosen, ic_base, ev, ms))

    for mu in config.mu_eps_grid:
        eps = truncated_normal(mu, config.var_eps, g.n,
                               np.random.default_rng(stream_seed(ms0, f"eps:{mu!r}")))
        true = scenario.true_params.replace(eps=eps)
        seen = NodeParams(true.q.copy(), eps.copy())
        ev = _evaluator(config, lambda x, seed, true=true: estimate_spread(
            g, true, seeds, x, runs=config.runs, master_seed=seed, workers=config.workers))
        base = ev("icn", 0, ())
        chosen, ms = _timed(lambda: mia_npp(g, seen, seeds, kmax, theta=config.theta))
        curves.append(_curve(f"prebunking@mu_eps={mu:g}", config, chosen, base, ev, ms))
    return curves


# ---------------------------------------------------------------------------
# export

CSV_HEADER = ("algorithm", "k", "mean_spread", "stderr", "relative_spread")


def curves_to_csv(curves: Sequence[SuppressionCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in curves:
        for alg, k, m, s, r in c.rows():
            w.writerow((alg, k, repr(float(m)), repr(float(s)), repr(float(r))))
    return buf.getvalue()


def curves_to_json(curves: Sequence[SuppressionCurve], config: ExperimentConfig | None = None,
                   seeds: Sequence[str] = (), timing: bool = True) -> str:
    """JSON document with config echo, seed labels and code version.

    Wall-clock fields vary between runs; pass ``timing=False`` for output that
    is byte-identical across repeated runs.
    """
    doc = {
        "version": __version__,
        "config": config.as_dict() if config is not None else None,
        "seeds": list(seeds),
        "curves": [],
    }
    for c in curves:
        entry = {
            "algorithm": c.algorithm,
            "k": list(c.ks),
            "mean_spread": [float(m) for m in c.means],
            "stderr": [float(s) for s in c.stderrs],
            "relative_spread": [float(r) for r in c.relative],
            "targets": list(c.targets),
        }
        if timing:
            entry["select_ms"] = round(float(c.select_ms), 3)
        doc["curves"].append(entry)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def export_results(curves: Sequence[SuppressionCurve], path, fmt: str = "csv", *,
                   config: ExperimentConfig | None = None, seeds: Sequence[str] = (),
                   timing: bool = True) -> Path:
    if fmt == "csv":
        text = curves_to_csv(curves)
    elif fmt == "json":
        text = curves_to_json(curves, config, seeds, timing)
    else:
        raise ConfigError(f"unknown export format {fmt!r}")
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path
