"""Command-line front end: ``netprebunk ingest | select | simulate | experiment``.

Results go to standard output or files, logs to standard error.  Exit codes:
0 success, 2 usage or configuration error, 3 data error, 4 resource budget
exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import secrets
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .baselines import ALGORITHMS
from .diffusion import estimate_coicm_spread, estimate_ic_spread, estimate_spread
from .errors import ConfigError, DataError, PrebunkError
from .graph import (
    Graph,
    NodeParams,
    load_edge_list,
    merge_diffusion_trees,
    read_node_params,
    write_edge_list,
    write_node_stats,
)
from .harness import (
    ExperimentConfig,
    build_scenario,
    curves_to_csv,
    curves_to_json,
    export_results,
    run_noise_experiment,
    run_pbc_comparison,
    run_suppression_experiment,
    run_theta_sensitivity,
    select_targets,
)

log = logging.getLogger("netprebunk")

MODES = ("suppression", "theta", "pbc", "noise")


def _labels(text: str | None) -> list[str]:
    if not text:
        return []
    if text.startswith("@"):
        path = Path(text[1:])
        if not path.exists():
            raise ConfigError(f"no such file: {path}")
        return [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()
                if ln.strip() and not ln.startswith("#")]
    return [t.strip() for t in text.split(",") if t.strip()]


def _resolve_seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(32)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _nodes(graph: Graph, labels: list[str], what: str) -> list[int]:
    try:
        return graph.indices(labels)
    except IndexError as exc:
        raise ConfigError(f"{what}: {exc}") from None


def _graph(args) -> Graph:
    return load_edge_list(args.graph, default_p=args.default_p, undirected=args.undirected)


def _params(args, graph: Graph, required: bool) -> NodeParams:
    if args.params:
        return read_node_params(args.params, graph)
    if required:
        raise ConfigError("--params is required here")
    return NodeParams.uniform(graph.n, 1.0, 1.0)


# -- subcommands -------------------------------------------------------------


def cmd_ingest(args) -> int:
    out = Path(args.out_graph)
    if args.edges:
        graph = load_edge_list(args.edges, default_p=args.default_p, undirected=args.undirected)
        write_edge_list(graph, out)
        print(f"{graph.n} nodes, {graph.m} edges -> {out}")
        return 0
    if args.manifest:
        trees, flags = _read_manifest(Path(args.manifest))
    else:
        trees = args.trees or []
        flags = [_flag(t) for t in _labels(args.labels)]
    graph, stats = merge_diffusion_trees(trees, flags)
    write_edge_list(graph, out)
    if args.out_stats:
        write_node_stats(stats, args.out_stats)
    print(f"{graph.n} nodes, {graph.m} edges from {stats.total} trees -> {out}")
    return 0


def _flag(text: str) -> bool:
    low = text.strip().lower()
    if low in ("fake", "1", "true"):
        return True
    if low in ("real", "0", "false"):
        return False
    raise ConfigError(f"veracity label must be fake or real, got {text!r}")


def _read_manifest(path: Path):
    if not path.exists():
        raise ConfigError(f"no such file: {path}")
    trees, flags = [], []
    for no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ConfigError(f"{path}:{no}: expected 'path<TAB>fake|real'")
        p = Path(parts[0])
        trees.append(p if p.is_absolute() else path.parent / p)
        flags.append(_flag(parts[1]))
    return trees, flags


def cmd_select(args) -> int:
    seed = _resolve_seed(args)
    if args.algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {args.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    graph = _graph(args)
    params = _params(args, graph, required=args.algorithm in ("mia-npp", "gullible"))
    seeds = _nodes(graph, _labels(args.seeds), "--seeds")
    if not seeds:
        raise ConfigError("--seeds is required")
    chosen = select_targets(args.algorithm, graph, params, seeds, args.k, theta=args.theta,
                            rho=args.rho, rng_seed=seed, tau=args.tau)
    text = "".join(f"{lab}\n" for lab in chosen.labels(graph))
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    return 0


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    graph = _graph(args)
    seeds = _nodes(graph, _labels(args.seeds), "--seeds")
    if not seeds:
        raise ConfigError("--seeds is required")
    targets = _nodes(graph, _labels(args.targets), "--targets")
    if args.model == "icn":
        params = _params(args, graph, required=True)
        est = estimate_spread(graph, params, seeds, targets, runs=args.runs, master_seed=seed,
                              workers=args.workers)
    elif args.model == "ic":
        est = estimate_ic_spread(graph, seeds, targets, runs=args.runs, master_seed=seed,
                                 workers=args.workers)
    else:
        est = estimate_coicm_spread(graph, seeds, targets, delay=args.delay, runs=args.runs,
                                    master_seed=seed, workers=args.workers)
    doc = {
        "model": args.model,
        "runs": est.runs,
        "seed": seed,
        "mean_positive": est.mean_positive,
        "stderr_positive": est.stderr_positive,
        "mean_negative": est.mean_negative,
        "stderr_negative": est.stderr_negative,
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def _overrides(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_experiment(args) -> int:
    overrides = _overrides(args.set)
    if args.workers is not None:
        overrides["workers"] = str(args.workers)
    if args.seed is not None:
        overrides["master_seed"] = str(args.seed)
    if args.config:
        config = ExperimentConfig.from_file(args.config, overrides)
        if "master_seed" not in overrides and not _file_sets(args.config, "master_seed"):
            overrides["master_seed"] = str(_resolve_seed(args))
            config = ExperimentConfig.from_file(args.config, overrides)
    else:
        with resources.as_file(resources.files("netprebunk") / "data" / "fixture.conf") as path:
            log.info("no --config given; running the bundled 20-node fixture")
            config = ExperimentConfig.from_file(path, overrides)
    scenario = build_scenario(config)
    if args.mode == "suppression":
        curves = run_suppression_experiment(config, scenario)
    elif args.mode == "theta":
        curves, timing = run_theta_sensitivity(config, scenario=scenario)
        for th, ms in timing.items():
            log.info("theta=%g selection %.1f ms", th, ms)
    elif args.mode == "pbc":
        curves = run_pbc_comparison(config, scenario)
    else:
        curves = run_noise_experiment(config, scenario=scenario)
    seeds = [scenario.graph.labels[s] for s in scenario.seeds]
    if args.output:
        export_results(curves, args.output, args.format, config=config, seeds=seeds,
                       timing=not args.no_timing)
        log.info("wrote %s", args.output)
    else:
        if args.format == "csv":
            sys.stdout.write(curves_to_csv(curves))
        else:
            sys.stdout.write(curves_to_json(curves, config, seeds, timing=not args.no_timing))
    return 0


def _file_sets(path, key: str) -> bool:
    text = Path(path).read_text(encoding="utf-8")
    return any(ln.split("=", 1)[0].strip() == key for ln in text.splitlines() if "=" in ln
               and not ln.lstrip().startswith(("#", ";")))


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netprebunk", description=(
        "Prebunking target selection and competitive diffusion experiments."))
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--verbose", action="store_true", help="log progress to standard error")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_flags(sp):
        sp.add_argument("--graph", required=True, help="edge list: src<TAB>dst[<TAB>p]")
        sp.add_argument("--default-p", type=float, default=None,
                        help="probability for rows without one")
        sp.add_argument("--undirected", action="store_true",
                        help="add both directions of every edge")
        sp.add_argument("--params", help="node parameters: node<TAB>q<TAB>eps")
        sp.add_argument("--seeds", help="comma-separated seed labels or @file")
        sp.add_argument("--seed", type=int, default=None,
                        help="random seed (generated and printed when omitted)")

    ing = sub.add_parser("ingest", help="canonicalise an edge list or merge diffusion trees")
    src = ing.add_mutually_exclusive_group(required=True)
    src.add_argument("--edges", help="edge list to canonicalise")
    src.add_argument("--trees", nargs="+", help="diffusion tree files (root = first source)")
    src.add_argument("--manifest", help="file of 'tree_path<TAB>fake|real' lines")
    ing.add_argument("--labels", help="comma-separated fake|real per --trees file")
    ing.add_argument("--default-p", type=float, default=None)
    ing.add_argument("--undirected", action="store_true")
    ing.add_argument("--out-graph", required=True)
    ing.add_argument("--out-stats", help="node statistics output (tree merging only)")
    ing.set_defaults(func=cmd_ingest)

    sel = sub.add_parser("select", help="choose intervention targets")
    graph_flags(sel)
    sel.add_argument("--algorithm", default="mia-npp", help=", ".join(ALGORITHMS))
    sel.add_argument("--k", type=int, required=True, help="budget")
    sel.add_argument("--theta", type=float, default=0.001, help="influence threshold")
    sel.add_argument("--rho", type=int, default=100, help="sampled graphs (advanced-greedy)")
    sel.add_argument("--tau", type=int, default=0, help="hop exclusion zone (cmia-o)")
    sel.add_argument("--output", help="also write the target labels here")
    sel.set_defaults(func=cmd_select)

    sim = sub.add_parser("simulate", help="Monte Carlo spread of a target set")
    graph_flags(sim)
    sim.add_argument("--targets", help="comma-separated labels or @file (prebunked, blocked "
                                       "or corrective seeds depending on --model)")
    sim.add_argument("--model", choices=("icn", "ic", "coicm"), default="icn")
    sim.add_argument("--delay", type=int, default=0, help="corrective delay (coicm)")
    sim.add_argument("--runs", type=int, default=1000)
    sim.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sim.set_defaults(func=cmd_simulate)

    exp = sub.add_parser("experiment", help="run a suppression-curve experiment")
    exp.add_argument("--config", help="key = value file (default: bundled 20-node fixture)")
    exp.add_argument("--mode", choices=MODES, default="suppression")
    exp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    exp.add_argument("--output", help="result file (default: standard output)")
    exp.add_argument("--format", choices=("csv", "json"), default="csv")
    exp.add_argument("--no-timing", action="store_true",
                     help="omit wall-clock fields from JSON for byte-stable output")
    exp.add_argument("--seed", type=int, default=None, help="master seed")
    exp.add_argument("--workers", type=int, default=None,
                     help="simulation processes (default: all CPUs)")
    exp.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.command == "experiment" and args.workers is None:
        args.workers = os.cpu_count() or 1
    try:
        return args.func(args)
    except PrebunkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
