"""
Command-line front end: ``python -m ripslab <command> [flags]``.

Values come from built-in defaults, then the ``--config`` file, then explicit
flags. Exit codes: 0 success, 1 failed invocation, 2 invalid configuration.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from dotenv import load_dotenv
from pydantic import ValidationError

from .complex import betti_of_graph, is_point_like
from .config import get_setting, load_key_value_file
from .covernerve import build_cover_adaptive, verify_nerve
from .dismantle import ROBBER_ALIASES, ROBBER_STRATEGIES, certify_contractible, dismantle, pursue, replay
from .domains import Domain, PointCloud, format_cloud_csv, make_density, make_domain, read_cloud_csv, sample
from .errors import ConfigError, LabError, LabIOError
from .lab import (cover_settings, emit, estimate_threshold, load_results, load_sweep_config, radius_for,
                  run_sweep, summarize)
from .logger import LabLogger
from .proximity import Graph, build_graph, format_edge_list

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

DEFAULTS: Dict[str, Any] = {
    "domain": "box",
    "domain_params": None,
    "density": "uniform",
    "ratio": 2.0,
    "axis": 0,
    "dim": 2,
    "n": 500,
    "seed": 0,
    "robber": "greedy",
    "target": 0.5,
    "key": "dismantlable",
}

ROBBER_CHOICES = list(ROBBER_STRATEGIES) + list(ROBBER_ALIASES)
ROBBER_HELP = "Robber strategy: greedy (alias greedy-distance-maximizing) or random (alias uniform-random)"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Key-value or JSON file with defaults for these flags")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR (default: $RIPSLAB_LOG_LEVEL or WARNING)")
    parser.add_argument("--out", help="Output file (default: stdout)")
    parser.add_argument("--format", choices=["json", "csv"], help="Output format")
    parser.add_argument("--seed", type=int, help="Random seed (base seed for sweeps)")


def _add_domain(parser: argparse.ArgumentParser, with_density: bool = True, many_dims: bool = False) -> None:
    parser.add_argument("--domain", help="box, ball, polytope, annulus or box-minus-ball")
    parser.add_argument("--domain-params", help="JSON object of domain parameters, e.g. '{\"radius\": 2}'")
    if many_dims:
        parser.add_argument("--dim", type=int, nargs="+", help="Ambient dimensions d")
    else:
        parser.add_argument("--dim", type=int, help="Ambient dimension d")
    if with_density:
        parser.add_argument("--density", help="uniform or bounded-ratio")
        parser.add_argument("--ratio", type=float, help="nu_max / nu_min for bounded-ratio densities")
        parser.add_argument("--axis", type=int, help="Split axis for bounded-ratio densities")


def _add_cloud(parser: argparse.ArgumentParser) -> None:
    _add_domain(parser)
    parser.add_argument("--n", type=int, help="Number of sample points")
    parser.add_argument("--cloud", help="Read the point cloud from this CSV instead of sampling")


def _add_radius(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--c", type=float, help="Radius constant: r = c (ln n / n)^(1/d)")
    group.add_argument("--r", type=float, help="Explicit radius")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ripslab",
                                     description="Random Vietoris-Rips complexes: dismantling, homology and nerves")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="Sample a point cloud and write it as CSV")
    _add_common(p)
    _add_domain(p)
    p.add_argument("--n", type=int, help="Number of sample points")

    p = sub.add_parser("graph", help="Build the radius graph and write its edge list")
    _add_common(p)
    _add_cloud(p)
    _add_radius(p)

    p = sub.add_parser("dismantle", help="Dismantle the radius graph by dominated-vertex deletion")
    _add_common(p)
    _add_cloud(p)
    _add_radius(p)
    p.add_argument("--order-seed", type=int, help="Seeded random deletion priority instead of lowest id")
    p.add_argument("--certify", action="store_true", default=None, help="Add the contractibility certificate")
    p.add_argument("--dim-cap", type=int, help="Homology dimension cap for --certify")

    p = sub.add_parser("betti", help="GF(2) Betti profile of the clique complex")
    _add_common(p)
    _add_cloud(p)
    _add_radius(p)
    p.add_argument("--dim-cap", type=int, help="Highest simplex dimension enumerated (default d+1)")
    p.add_argument("--no-reduce", action="store_true", default=None,
                   help="Skip dismantling before the homology computation")

    p = sub.add_parser("cover", help="Build the inflated ball cover of the domain")
    _add_common(p)
    _add_domain(p, with_density=False)
    _add_radius(p)
    p.add_argument("--n", type=int, help="n used with --c to derive r")
    p.add_argument("--epsilon", type=float, help="Inflation fraction of r")

    p = sub.add_parser("verify-nerve", help="Check the three nerve conditions on one sample")
    _add_common(p)
    _add_cloud(p)
    _add_radius(p)
    p.add_argument("--epsilon", type=float, help="Inflation fraction of r")

    p = sub.add_parser("pursuit", help="Play the cop's retract strategy against a robber")
    _add_common(p)
    _add_cloud(p)
    _add_radius(p)
    p.add_argument("--robber", choices=ROBBER_CHOICES, help=ROBBER_HELP)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over (d, n, c)")
    _add_common(p)
    _add_domain(p, many_dims=True)
    p.add_argument("--n", type=int, nargs="+", help="Values of n")
    p.add_argument("--c", type=float, nargs="+", help="Values of c")
    p.add_argument("--trials", type=int, help="Trials per cell")
    p.add_argument("--checks", nargs="+", help="Subset of dismantle betti coverage nerve pursuit")
    p.add_argument("--dim-cap", type=int, help="Homology dimension cap (default d+1)")
    p.add_argument("--epsilon", type=float, help="Inflation fraction of r for the nerve check")
    p.add_argument("--workers", type=int, help="Worker processes (default: $RIPSLAB_WORKERS or 1)")
    p.add_argument("--stream", help="Append each finished trial to this JSON-lines file")
    p.add_argument("--allow-large-radius", action="store_true", default=None,
                   help="Permit cells with r >= diam(K)")
    p.add_argument("--robber", choices=ROBBER_CHOICES, help=ROBBER_HELP + " for the pursuit check")
    p.add_argument("--progress", action="store_true", default=None, help="Show a progress bar on stderr")

    p = sub.add_parser("threshold", help="Estimate the threshold constant from sweep results")
    _add_common(p)
    p.add_argument("--results", help="Sweep results (JSON, JSON lines or CSV)")
    p.add_argument("--target", type=float, help="Target probability (default 0.5)")
    p.add_argument("--key", choices=["dismantlable", "covered"], help="Which event to threshold")
    p.add_argument("--resamples", type=int, help="Bootstrap resamples")
    return parser


def resolve_options(args: argparse.Namespace, parser: argparse.ArgumentParser) -> Dict[str, Any]:
    """Merge defaults, the --config file and explicit flags (flags win)."""
    known = {action.dest for action in _subparser(parser, args.command)._actions}
    opts = dict(DEFAULTS)
    if args.config:
        file_values = load_key_value_file(args.config)
        unknown = sorted(k for k in file_values if k not in known)
        if unknown:
            raise ConfigError(f"Unknown keys in {args.config} for '{args.command}': {unknown}")
        opts.update(file_values)
    opts.update({k: v for k, v in vars(args).items() if v is not None})
    if isinstance(opts.get("domain_params"), str):
        try:
            opts["domain_params"] = json.loads(opts["domain_params"])
        except json.JSONDecodeError as e:
            raise ConfigError(f"--domain-params is not valid JSON: {e}")
    return opts


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise ConfigError(f"Unknown command '{command}'")


def _as_list(value: Any, cast: Callable[[Any], Any]) -> List[Any]:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [cast(v) for v in value]
    if isinstance(value, str) and "," in value:
        return [cast(v) for v in value.split(",") if v.strip()]
    return [cast(value)]


def _scalar(value: Any, cast: Callable[[Any], Any]) -> Any:
    values = _as_list(value, cast)
    if len(values) != 1:
        raise ConfigError(f"expected a single value, got {value!r}")
    return values[0]


def _option(opts: Dict[str, Any], key: str, default: Any) -> Any:
    """Option value, or ``default`` only when the option was not given at all."""
    value = opts.get(key)
    return default if value is None else value


def _domain(opts: Dict[str, Any], dim: int) -> Domain:
    return make_domain(opts["domain"], dim, **(opts.get("domain_params") or {}))


def _cloud(opts: Dict[str, Any]) -> Tuple[PointCloud, Domain]:
    if opts.get("cloud"):
        cloud = read_cloud_csv(opts["cloud"], domain_tag=opts["domain"])
        return cloud, _domain(opts, cloud.dim)
    dim = _scalar(opts["dim"], int)
    domain = _domain(opts, dim)
    density = make_density(opts["density"], domain, float(opts["ratio"]), int(opts["axis"]))
    cloud = sample(domain, density, _scalar(opts["n"], int), _scalar(opts["seed"], int))
    return cloud, domain


def _radius(opts: Dict[str, Any], n: int, d: int) -> float:
    if opts.get("r") is not None:
        return _scalar(opts["r"], float)
    if opts.get("c") is not None:
        return radius_for(_scalar(opts["c"], float), n, d)
    raise ConfigError("one of --r or --c is required")


def _graph(opts: Dict[str, Any]) -> Tuple[PointCloud, Domain, Graph, float]:
    cloud, domain = _cloud(opts)
    r = _radius(opts, cloud.n, cloud.dim)
    return cloud, domain, build_graph(cloud, r), r


def write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        raise LabIOError(f"Could not write output: {e}", out)
    logger.info(f"Wrote {out}")


def _json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, default=str) + "\n"


def cmd_sample(opts: Dict[str, Any]) -> int:
    cloud, _ = _cloud(opts)
    write_output(format_cloud_csv(cloud), opts.get("out"))
    return 0


def cmd_graph(opts: Dict[str, Any]) -> int:
    _, _, graph, r = _graph(opts)
    logger.info(f"Radius graph at r={r}: {graph.n} vertices, {graph.edge_count()} edges")
    write_output(format_edge_list(graph), opts.get("out"))
    return 0


def cmd_dismantle(opts: Dict[str, Any]) -> int:
    cloud, _, graph, r = _graph(opts)
    record = dismantle(graph, seed=opts.get("order_seed"))
    report = {"r": r, "record": record.to_dict(), "replay_ok": replay(graph, record)}
    if opts.get("certify"):
        dim_cap = _option(opts, "dim_cap", cloud.dim + 1)
        report["certificate"] = certify_contractible(record, graph, int(get_setting("complex", "simplex_budget")),
                                                     int(dim_cap)).to_dict()
    write_output(_json(report), opts.get("out"))
    return 0


def cmd_betti(opts: Dict[str, Any]) -> int:
    cloud, _, graph, r = _graph(opts)
    dim_cap = int(_option(opts, "dim_cap", cloud.dim + 1))
    profile = betti_of_graph(graph, dim_cap, int(get_setting("complex", "simplex_budget")),
                             reduce=not opts.get("no_reduce"))
    write_output(_json({"r": r, "profile": profile.to_dict(), "point_like": is_point_like(profile)}),
                 opts.get("out"))
    return 0


def cmd_cover(opts: Dict[str, Any]) -> int:
    dim = _scalar(opts["dim"], int)
    domain = _domain(opts, dim)
    r = _radius(opts, _scalar(opts["n"], int), dim)
    epsilon = float(_option(opts, "epsilon", get_setting("cover", "epsilon")))
    cover = build_cover_adaptive(domain, r, epsilon, seed=_scalar(opts["seed"], int), **cover_settings())
    write_output(cover.to_json() + "\n", opts.get("out"))
    return 0


def cmd_verify_nerve(opts: Dict[str, Any]) -> int:
    cloud, domain, graph, r = _graph(opts)
    epsilon = float(_option(opts, "epsilon", get_setting("cover", "epsilon")))
    settings = cover_settings()
    cover = build_cover_adaptive(domain, r, epsilon, seed=_scalar(opts["seed"], int), **settings)
    report = verify_nerve(cloud, graph, cover, settings["scan_pitch_fraction"])
    write_output(report.to_json() + "\n", opts.get("out"))
    return 0


def cmd_pursuit(opts: Dict[str, Any]) -> int:
    _, _, graph, r = _graph(opts)
    record = dismantle(graph)
    transcript = pursue(graph, record, opts["robber"], seed=_scalar(opts["seed"], int))
    write_output(_json({"r": r, "transcript": transcript.to_dict()}), opts.get("out"))
    return 0


def sweep_values(opts: Dict[str, Any]) -> Dict[str, Any]:
    """Translate resolved CLI options into SweepConfig fields."""
    values: Dict[str, Any] = {
        "domain": {"kind": opts["domain"], "params": opts.get("domain_params") or {}},
        "density": {"kind": opts["density"], "ratio": float(opts["ratio"]), "axis": int(opts["axis"])},
        "dims": _as_list(opts["dim"], int),
        "n_values": _as_list(opts["n"], int),
        "c_values": _as_list(opts.get("c"), float),
        "base_seed": _scalar(opts["seed"], int),
    }
    if not values["c_values"]:
        raise ConfigError("sweep needs --c values")
    workers = _option(opts, "workers", os.getenv("RIPSLAB_WORKERS"))
    optional = {
        "trials": opts.get("trials"),
        "dim_cap": opts.get("dim_cap"),
        "checks": _as_list(opts["checks"], str) if opts.get("checks") is not None else None,
        "epsilon": opts.get("epsilon"),
        "workers": None if workers in (None, "") else int(workers),
        "stream_path": opts.get("stream"),
        "allow_large_radius": opts.get("allow_large_radius"),
        "robber": opts.get("robber"),
    }
    values.update({k: v for k, v in optional.items() if v is not None})
    return values


def cmd_sweep(opts: Dict[str, Any]) -> int:
    config = load_sweep_config(sweep_values(opts))
    event_logger = LabLogger("sweep")
    results = run_sweep(config, progress=bool(opts.get("progress")), event_logger=event_logger)
    failed = sum(1 for res in results if res.errors)
    logger.info(f"Sweep finished: {len(results)} trials, {failed} with errors")
    text = emit(results, opts.get("format") or "csv", opts.get("out"))
    if opts.get("out") is None:
        sys.stdout.write(text)
    return 0


def cmd_threshold(opts: Dict[str, Any]) -> int:
    if not opts.get("results"):
        raise ConfigError("threshold needs --results")
    results = load_results(opts["results"])
    resamples = int(_option(opts, "resamples", get_setting("lab", "bootstrap_resamples")))
    estimates = estimate_threshold(results, float(opts["target"]), resamples=resamples,
                                   seed=_scalar(opts["seed"], int), key=opts["key"])
    table = summarize(results)
    if (opts.get("format") or "json") == "csv":
        frame = pd.DataFrame([e.to_dict() for e in estimates]).drop(columns=["observed"])
        text = frame.to_csv(index=False, lineterminator="\n")
    else:
        text = _json({"key": opts["key"], "target": float(opts["target"]),
                      "estimates": [e.to_dict() for e in estimates],
                      "summary": json.loads(table.to_json(orient="records"))})
    write_output(text, opts.get("out"))
    return 0


COMMANDS: Dict[str, Callable[[Dict[str, Any]], int]] = {
    "sample": cmd_sample,
    "graph": cmd_graph,
    "dismantle": cmd_dismantle,
    "betti": cmd_betti,
    "cover": cmd_cover,
    "verify-nerve": cmd_verify_nerve,
    "pursuit": cmd_pursuit,
    "sweep": cmd_sweep,
    "threshold": cmd_threshold,
}


def configure_logging(level_name: Optional[str]) -> None:
    name = (level_name or os.getenv("RIPSLAB_LOG_LEVEL") or "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        raise ConfigError(f"Unknown log level '{level_name}'")
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        configure_logging(args.log_level)
        opts = resolve_options(args, parser)
        return COMMANDS[args.command](opts)
    except (ConfigError, ValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return 2
    except (LabError, ValueError, IndexError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
