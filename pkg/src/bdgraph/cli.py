"""Command-line interface.

Subcommands: classify | simulate | stationary-check | drift-check | suite.
Exit codes: 0 ok, 1 check failure, 2 usage error, 3 I/O error.
Every run with a fixed seed is byte-reproducible (suite reports carry a
timestamp field that is excluded from that contract).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classify import ExcludedCaseError, classify
from .exact import (
    box_states,
    diagonal_states,
    drift_GQ_batch,
    drift_log_quarterplane,
    drift_S_batch,
    drift_two_step_S_batch,
    linear_drift_one_step,
    linear_drift_two_step,
    shell_states,
    star_drift_weights,
    suggested_shell_start_GQ,
    suggested_shell_start_S,
    truncated_stationary,
)
from .graphs import (
    Graph,
    GraphError,
    build_complete,
    build_cycle,
    build_lattice_torus,
    build_path,
    build_star,
)
from .model import ModelParams
from .simulate import ProxySettings, StopRule, replicate, run
from .suites import DEFAULT_SUITE_SEED, SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


@dataclass
class ExperimentSpec:
    """Resolvable description of one experiment (mirrors the CLI surface)."""

    graph: str
    alpha: float
    beta: float
    chain: str = "dtmc"
    initial: str | None = None
    steps: int = 100_000
    max_time: float | None = None
    max_total_spin: int | None = None
    proxy: bool = False
    replicas: int = 1
    seed: int = 0
    suite: str | None = None

    def resolve(self) -> tuple[Graph, ModelParams, np.ndarray, StopRule]:
        g = parse_graph_spec(self.graph)
        params = ModelParams(self.alpha, self.beta)
        if self.initial:
            init = np.asarray([int(v) for v in self.initial.split(",")], dtype=np.int64)
        else:
            init = np.zeros(g.vertex_count, dtype=np.int64)
        stop = StopRule(
            max_steps=self.steps,
            max_time=self.max_time,
            max_total_spin=self.max_total_spin,
            explosion_proxy=ProxySettings() if self.proxy else None,
        )
        return g, params, init, stop


def parse_graph_spec(spec: str) -> Graph:
    """Parse ``builder:args`` specs (complete:4, star:3, cycle:5, path:2,
    torus:L,d) or an edge-list file path (``edges:PATH`` or a bare path)."""
    if ":" in spec:
        kind, _, arg = spec.partition(":")
        kind = kind.strip().lower()
        try:
            if kind == "complete":
                return build_complete(int(arg))
            if kind == "star":
                return build_star(int(arg))
            if kind == "cycle":
                return build_cycle(int(arg))
            if kind == "path":
                return build_path(int(arg))
            if kind == "torus":
                parts = arg.replace("x", ",").split(",")
                half_width = int(parts[0])
                dim = int(parts[1]) if len(parts) > 1 else 1
                return build_lattice_torus(half_width, dim)
            if kind in ("edges", "edgelist", "file"):
                return Graph.from_edge_list_file(arg)
        except ValueError as exc:
            raise GraphError(f"bad graph spec {spec!r}: {exc}") from exc
        raise GraphError(f"unknown graph builder {kind!r}")
    path = Path(spec)
    if path.exists():
        return Graph.from_edge_list_file(path)
    raise GraphError(f"unrecognized graph spec {spec!r} (not a builder spec or file)")


def _load_config(path: str) -> dict:
    """Flat key=value config file; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


_CONFIG_TYPES = {
    "alpha": float,
    "beta": float,
    "steps": int,
    "time": float,
    "replicas": int,
    "seed": int,
    "cap": int,
    "max_total_spin": int,
    "thin": int,
    "window": int,
    "smin": int,
    "smax": int,
    "threshold": float,
    "quick": lambda s: s.lower() in ("1", "true", "yes"),
    "proxy": lambda s: s.lower() in ("1", "true", "yes"),
    "diagonal": lambda s: s.lower() in ("1", "true", "yes"),
}


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not getattr(args, "config", None):
        return
    try:
        cfg = _load_config(args.config)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    for key, raw in cfg.items():
        if not hasattr(args, key):
            parser.error(f"unknown config key {key!r}")
        if getattr(args, key) == parser.get_default(key):
            caster = _CONFIG_TYPES.get(key, str)
            try:
                setattr(args, key, caster(raw))
            except ValueError as exc:
                parser.error(f"bad config value for {key}: {exc}")


def _emit(obj: dict) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _cmd_classify(args, parser) -> int:
    try:
        g = parse_graph_spec(args.graph)
        report = classify(g, ModelParams(args.alpha, args.beta))
    except (GraphError, ExcludedCaseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report.to_json_dict())
    return EXIT_OK


def _cmd_simulate(args, parser) -> int:
    spec = ExperimentSpec(
        graph=args.graph,
        alpha=args.alpha,
        beta=args.beta,
        chain=args.chain,
        initial=args.init,
        steps=args.steps,
        max_time=args.time,
        max_total_spin=args.max_total_spin,
        proxy=args.proxy,
        replicas=args.replicas,
        seed=args.seed,
    )
    try:
        g, params, init, stop = spec.resolve()
    except (GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.replicas == 1:
            traj, summary = run(
                g, params, init, stop, args.seed, chain=args.chain, window=args.window
            )
            if traj is not None:
                traj.to_csv(out / "trajectory.csv", thin=args.thin)
            (out / "summary.json").write_text(
                json.dumps(summary.to_json_dict(), indent=2, sort_keys=True) + "\n"
            )
        else:
            result = replicate(
                g, params, init, stop, args.chain, args.replicas, args.seed, window=args.window
            )
            payload = {
                "n_replicas": result.n_replicas,
                "base_seed": result.base_seed,
                "aggregate": result.aggregate,
                "summaries": [s.to_json_dict() for s in result.summaries],
            }
            (out / "aggregate.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _cmd_stationary_check(args, parser) -> int:
    try:
        g = parse_graph_spec(args.graph)
        params = ModelParams(args.alpha, args.beta)
        regime = classify(g, params)
    except (GraphError, ExcludedCaseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if regime.regime != "Ergodic":
        print(
            f"warning: regime is {regime.regime} ({regime.theorem}); "
            "stationary check skipped",
            file=sys.stderr,
        )
        _emit(
            {
                "name": "stationary-check",
                "skipped": True,
                "reason": f"regime {regime.regime} is not Ergodic",
                "regime": regime.to_json_dict(),
            }
        )
        return EXIT_OK
    try:
        dist = truncated_stationary(g, params, args.cap)
        traj, summary = run(
            g,
            params,
            np.zeros(g.vertex_count, dtype=np.int64),
            StopRule(max_steps=args.steps),
            args.seed,
            chain="ctmc",
        )
        occupancy = traj.time_weighted_occupancy()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    tv = dist.tv_to_occupancy(occupancy)
    boundary_ok = dist.boundary_mass < 1e-4
    record = {
        "name": "stationary-check",
        "theorem": "stationary-law (T1.1)",
        "skipped": False,
        "events": args.steps,
        "cap": args.cap,
        "seed": args.seed,
        "tv_distance": tv,
        "boundary_mass": dist.boundary_mass,
        "boundary_mass_ok": boundary_ok,
        "tolerance": args.tolerance,
        "passed": bool(tv < args.tolerance and boundary_ok),
    }
    if not boundary_ok:
        record["warning"] = (
            "boundary-layer mass exceeds 1e-4; the truncated law is not a valid "
            "proxy for the uncapped chain at this cap"
        )
    if args.out:
        try:
            outdir = Path(args.out)
            outdir.mkdir(parents=True, exist_ok=True)
            dist.to_csv(outdir / "stationary.csv", min_prob=1e-12)
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
    _emit(record)
    return EXIT_OK if record["passed"] else EXIT_CHECK_FAILED


def _cmd_drift_check(args, parser) -> int:
    try:
        g = parse_graph_spec(args.graph)
        params = ModelParams(args.alpha, args.beta)
    except (GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    kind = args.kind
    try:
        if kind == "Q":
            smin = args.smin if args.smin is not None else suggested_shell_start_GQ(g, params)
            smax = args.smax if args.smax is not None else smin + 40
            states = shell_states(g.vertex_count, smin, smax)
            vals = drift_GQ_batch(g, params, states)
            stat, op, threshold = float(vals.max()), "<=", args.threshold if args.threshold is not None else -0.1
            passed = stat <= threshold
        elif kind == "S":
            smin = args.smin if args.smin is not None else suggested_shell_start_S(g, params)
            smax = args.smax if args.smax is not None else smin + 40
            if args.diagonal:
                states = diagonal_states(g.vertex_count, smin, smax)
            else:
                states = shell_states(g.vertex_count, smin, smax)
            vals = drift_S_batch(g, params, states)
            stat, op, threshold = float(vals.min()), ">=", args.threshold if args.threshold is not None else 0.1
            passed = stat >= threshold
        elif kind == "S2":
            smin = args.smin if args.smin is not None else 50
            smax = args.smax if args.smax is not None else smin + 10
            states = shell_states(g.vertex_count, smin, smax)
            vals = drift_two_step_S_batch(g, params, states)
            stat, op, threshold = float(vals.min()), ">", args.threshold if args.threshold is not None else 0.0
            passed = stat > threshold
        elif kind == "star":
            hi = args.smax if args.smax is not None else 20
            w = star_drift_weights(g)
            states = box_states(g.vertex_count, 0, hi)
            one = min(linear_drift_one_step(g, params, s, w) for s in states)
            two = min(linear_drift_two_step(g, params, s, w) for s in states)
            stat, op, threshold = float(min(one, two)), ">", args.threshold if args.threshold is not None else 0.0
            passed = one >= 0.0 and two > threshold
        elif kind == "log2d":
            smin = args.smin if args.smin is not None else 20
            smax = args.smax if args.smax is not None else 1000
            worst = -math.inf
            for s in range(smin, smax + 1):
                for x in range(0, s + 1):
                    worst = max(worst, drift_log_quarterplane(params, x, s - x))
            stat, op, threshold = worst, "<=", args.threshold if args.threshold is not None else 0.0
            passed = stat <= threshold
        else:  # pragma: no cover - argparse choices guard this
            parser.error(f"unknown drift kind {kind}")
    except (GraphError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    record = {
        "name": f"drift-check:{kind}",
        "graph": args.graph,
        "alpha": params.alpha,
        "beta": params.beta,
        "statistic": stat,
        "comparison": op,
        "threshold": threshold,
        "states": int(states.shape[0]) if kind != "log2d" else (smax - smin + 1),
        "passed": bool(passed),
    }
    _emit(record)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _cmd_suite(args, parser) -> int:
    report = run_suite(args.name, seed=args.seed, quick=args.quick)
    for record in report.records:
        status = "PASS" if record.passed else "FAIL"
        print(f"[{status}] {record.name} [{record.theorem}]: {record.estimate}", file=sys.stderr)
    _emit(report.to_json_dict())
    if args.out:
        try:
            outdir = Path(args.out)
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / f"suite-{args.name}.json").write_text(
                json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n"
            )
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdgraph",
        description="Interacting birth-and-death chains on finite graphs: "
        "classify regimes, simulate, and verify against exact oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--graph", required=True, help="complete:N | star:N | cycle:N | path:N | torus:L,D | edges:PATH")
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--beta", type=float, required=True)
        p.add_argument("--config", help="flat key=value config file (CLI flags win)")

    p = sub.add_parser("classify", help="print the regime report as JSON")
    add_common(p)
    p.set_defaults(func=_cmd_classify, _subparser=p)

    p = sub.add_parser("simulate", help="run the chain and write trajectory CSV + summary JSON")
    add_common(p)
    p.add_argument("--chain", choices=("dtmc", "ctmc"), default="dtmc")
    p.add_argument("--steps", type=int, default=100_000)
    p.add_argument("--time", type=float, default=None, help="CTMC time horizon")
    p.add_argument("--max-total-spin", type=int, default=None, dest="max_total_spin")
    p.add_argument("--proxy", action="store_true", help="stop on the explosion proxy (CTMC)")
    p.add_argument("--init", default=None, help="comma-separated initial configuration")
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--thin", type=int, default=1, help="keep every k-th event in the CSV")
    p.add_argument("--window", type=int, default=None, help="detector window (default: second half)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_simulate, _subparser=p)

    p = sub.add_parser("stationary-check", help="compare CTMC occupancy to the truncated stationary law")
    add_common(p)
    p.add_argument("--cap", type=int, default=25)
    p.add_argument("--steps", type=int, default=1_000_000, help="number of CTMC events")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=0.02, help="TV distance threshold")
    p.add_argument("--out", default=None, help="also write the truncated law CSV here")
    p.set_defaults(func=_cmd_stationary_check, _subparser=p)

    p = sub.add_parser("drift-check", help="exhaustive drift certification on shells/boxes")
    add_common(p)
    p.add_argument("--kind", choices=("Q", "S", "S2", "star", "log2d"), required=True)
    p.add_argument("--smin", type=int, default=None)
    p.add_argument("--smax", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--diagonal", action="store_true", help="S only: restrict to constant configurations")
    p.set_defaults(func=_cmd_drift_check, _subparser=p)

    p = sub.add_parser("suite", help="run a named verification suite")
    p.add_argument("name", choices=SUITE_NAMES)
    p.add_argument("--seed", type=int, default=DEFAULT_SUITE_SEED)
    p.add_argument("--quick", action="store_true", help="reduced replicas and widened tolerances")
    p.add_argument("--out", default=None, help="also write the report JSON here")
    p.add_argument("--config", help="flat key=value config file (CLI flags win)")
    p.set_defaults(func=_cmd_suite, _subparser=p)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = getattr(args, "_subparser", parser)
    _apply_config(args, sub)
    return args.func(args, sub)


if __name__ == "__main__":
    sys.exit(main())
