"""
Command-line entry point.

    hrdepth simulate --model bm --n 4 --m 8 --seed 7 --out p.csv
    hrdepth depth --paths p.csv --query h.csv
    hrdepth check sparre --m 10
    hrdepth experiment zero-trend --model bm --n 100000 --m-schedule 4,16,64,256
    hrdepth schema

Every run is described by a RunConfig built from ``--config`` (a RunConfig
JSON, or a report that embeds one) with the command-line flags applied on
top. Exit codes: 0 success, 2 configuration or usage error, 3 numeric
failure or resource cap.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from .analysis.plotting import plot_report, write_replicates_csv
from .client import DepthLabClient
from .config import Settings
from .depth.exact import sparre_andersen_exact
from .exceptions import ConfigError, NumericError, ResourceCapError
from .gridfn.models import FamilyKind
from .models import Command, ExperimentKind, RunConfig
from .processes.io import read_ensemble, write_ensemble
from .processes.models import ProcessKind, ProcessModel
from .smoothing.models import DensityFamily, SmoothingDensity
from .smoothing.operations import grad_l1, grad_l1_quadrature, tv_shift_check

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

CHECKS = ("lemma1", "sparre", "gradl1")

_PASSTHROUGH = (
    "n", "m", "seed", "jobs", "out", "paths", "subset", "intervals", "reps", "n_schedule",
    "m_schedule", "eps", "r", "r_grid", "n_ref", "delta", "plot", "csv",
)


def _ints(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x]


def _floats(text: str) -> List[float]:
    return [float(x) for x in text.split(",") if x]


def _paths(text: str) -> List[str]:
    return [x for x in text.split(",") if x]


def _intervals(text: str) -> List[List[int]]:
    """``0:2,2:4`` -> [[0, 2], [2, 4]]."""
    return [[int(x) for x in pair.split(":")] for pair in text.split(",") if pair]


def _density(text: str) -> Dict[str, Any]:
    """``gaussian:0.5`` -> {"family": "gaussian", "scale": 0.5}; the scale defaults to 1."""
    family, _, scale = text.partition(":")
    return {"family": family, "scale": float(scale) if scale else 1.0}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="RunConfig JSON, or a report embedding one")
    common.add_argument("--out", help="output file (CSV for simulate/smooth, report JSON otherwise)")
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--jobs", type=int, help="worker count; wins over HRDEPTH_JOBS")
    common.add_argument("--verbose", "-v", action="store_true", help="log progress at INFO level")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", choices=[k.value for k in ProcessKind], help="process kind")
    model.add_argument("--alpha", type=float, help="stability index for --model stable")
    model.add_argument("--rate", type=float, help="intensity for Poisson-type models")
    model.add_argument("--smoothing", type=_density, help="smoothing density FAMILY[:SCALE]")
    model.add_argument("--n", type=int, help="number of paths")
    model.add_argument("--m", type=int, help="grid resolution")

    query = argparse.ArgumentParser(add_help=False)
    query.add_argument("--query", help="grid-function CSV for h")
    query.add_argument("--constant", type=float, help="use the constant function h = C")

    parser = argparse.ArgumentParser(prog="hrdepth", description="Half-region depth laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common, model], help="simulate sample paths to CSV")

    p = sub.add_parser("smooth", parents=[common], help="add an independent Z to every path")
    p.add_argument("--paths", help="input ensemble CSV")
    p.add_argument("--smoothing", type=_density, help="smoothing density FAMILY[:SCALE]")

    p = sub.add_parser("depth", parents=[common, query], help="empirical depth of h")
    p.add_argument("--paths", help="input ensemble CSV")
    p.add_argument("--subset", type=_ints, help="restrict to grid indices, e.g. 0,3,5")
    p.add_argument("--intervals", type=_intervals, help="increment depth over u:v pairs, e.g. 0:2,2:4")

    sub.add_parser("exact", parents=[common], help="exact product depth and zero-depth verdict (needs --config)")

    p = sub.add_parser("check", parents=[common], help="closed-form checks")
    p.add_argument("target", choices=CHECKS)
    p.add_argument("--m", type=int, help="steps for sparre")
    p.add_argument("--delta", type=float, help="shift for the total-variation shift check (default 0.1)")
    p.add_argument("--smoothing", type=_density, help="density FAMILY[:SCALE] (default gaussian:1)")

    p = sub.add_parser("experiment", parents=[common, model, query], help="run an experiment")
    p.add_argument("target", choices=[k.value for k in ExperimentKind])
    p.add_argument("--reps", type=int, help="replications per sample size")
    p.add_argument("--n-schedule", type=_ints, help="sample sizes, e.g. 100,1000,10000")
    p.add_argument("--m-schedule", type=_ints, help="resolutions for zero-trend, e.g. 4,16,64")
    p.add_argument("--family", choices=[k.value for k in FamilyKind], help="function family")
    p.add_argument("--radius", type=float, help="family sup-norm radius")
    p.add_argument("--lipschitz", type=float, help="family Lipschitz constant")
    p.add_argument("--derivative-lipschitz", type=float, help="Lipschitz constant of the derivative for smooth-ball")
    p.add_argument("--constants", type=_floats, help="finite-list members h = C, e.g. --constants=-0.5,0,0.5")
    p.add_argument("--functions", type=_paths, help="finite-list members as grid-function CSVs, comma separated")
    p.add_argument("--eps", type=float, help="net radius")
    p.add_argument("--r", type=int, help="max subset size for the subset experiment")
    p.add_argument("--r-grid", type=_floats, help="radii for the rate tail or the norm-tail experiment")
    p.add_argument("--n-ref", type=int, help="oracle sample size")
    p.add_argument("--h2", type=float, help="upper constant for c2-gap")
    p.add_argument("--plot", help="write an SVG chart")
    p.add_argument("--csv", help="write per-replication statistics as CSV")

    sub.add_parser("schema", help="print the RunConfig JSON schema")
    return parser


def load_config(path: Path) -> Dict[str, Any]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    if "config_hash" in data and isinstance(data.get("config"), dict):
        data = data["config"]
    return data


def _merge_model(data: Dict[str, Any], args: argparse.Namespace) -> None:
    if getattr(args, "model", None):
        data["model"] = {**(data.get("model") or {}), "kind": args.model}
    if data.get("model") is None:
        return
    model = dict(data["model"])
    for name in ("alpha", "rate"):
        if getattr(args, name, None) is not None:
            model[name] = getattr(args, name)
    smoothing = getattr(args, "smoothing", None)
    if smoothing is not None and args.command != "smooth":
        model["smoothing"] = smoothing
    data["model"] = model


def build_config(args: argparse.Namespace) -> RunConfig:
    """Config file first, then every flag that was given."""
    data = load_config(args.config) if args.config else {}
    data["command"] = args.command
    if getattr(args, "target", None):
        data["target"] = args.target
    _merge_model(data, args)

    for name in _PASSTHROUGH:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if getattr(args, "smoothing", None) is not None:
        data["density"] = args.smoothing
    if getattr(args, "query", None):
        data["h"] = {"path": args.query}
    elif getattr(args, "constant", None) is not None:
        data["h"] = {"constant": args.constant}
    if getattr(args, "h2", None) is not None:
        data["h2"] = {"constant": args.h2}
    if getattr(args, "family", None):
        family = {"kind": args.family}
        for name in ("radius", "lipschitz", "derivative_lipschitz", "constants"):
            if getattr(args, name) is not None:
                family[name] = getattr(args, name)
        if args.functions is not None:
            family["paths"] = args.functions
        data["family"] = family
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid run configuration: {e}") from e


def _emit(payload: Dict[str, Any], out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _stamp(payload: Dict[str, Any], cfg: RunConfig) -> Dict[str, Any]:
    return {**payload, "config_hash": cfg.config_hash(), "seed": cfg.seed, "config": cfg.embedded()}


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [name for name in names if getattr(cfg, name) is None]
    if missing:
        raise ConfigError(f"{cfg.command.value} needs: {', '.join(missing)}")


def run_simulate(client: DepthLabClient, cfg: RunConfig) -> None:
    _require(cfg, "model", "n", "out")
    model: ProcessModel = cfg.model
    if model.kind is ProcessKind.PRODUCT_SEQUENCE:
        m = cfg.m or len(model.marginals)
    else:
        _require(cfg, "m")
        m = cfg.m
    ens = client.simulate(model, cfg.n, m, cfg.seed)
    write_ensemble(ens, cfg.out, extra={"config_hash": cfg.config_hash()})
    logger.info("wrote %d paths on %d points to %s", ens.n, ens.grid.size, cfg.out)


def run_smooth(client: DepthLabClient, cfg: RunConfig) -> None:
    _require(cfg, "paths", "density", "out")
    ens = client.smooth(read_ensemble(cfg.paths), cfg.density, cfg.seed)
    write_ensemble(ens, cfg.out, extra={"config_hash": cfg.config_hash(), "smoothing_seed": cfg.seed})


def run_depth(client: DepthLabClient, cfg: RunConfig) -> None:
    _require(cfg, "paths", "h")
    ens = read_ensemble(cfg.paths)
    h = cfg.h.build(ens.grid)
    if cfg.intervals is not None:
        estimate = client.increment_depth(ens, h, cfg.intervals)
    elif cfg.subset is not None:
        estimate = client.depth_subset(ens, h, cfg.index_subset())
    else:
        estimate = client.depth(ens, h)
    _emit(_stamp(estimate.report(), cfg), cfg.out)


def run_exact(client: DepthLabClient, cfg: RunConfig) -> None:
    _require(cfg, "marginals", "a")
    payload: Dict[str, Any] = {"value": client.exact(cfg.marginals, cfg.a)}
    if cfg.tail is not None:
        payload["verdict"] = client.verdict(cfg.marginals, cfg.a, cfg.tail).model_dump(mode="json")
    _emit(_stamp(payload, cfg), cfg.out)


def run_check(client: DepthLabClient, cfg: RunConfig) -> None:
    density = cfg.density or SmoothingDensity(family=DensityFamily.GAUSSIAN, scale=1.0)
    if cfg.target == "sparre":
        _require(cfg, "m")
        value = sparre_andersen_exact(cfg.m)
        payload: Dict[str, Any] = {"check": "sparre", "m": cfg.m, "value": value}
    elif cfg.target == "gradl1":
        value = grad_l1(density)
        payload = {
            "check": "gradl1",
            "density": density.model_dump(mode="json"),
            "value": value,
            "quadrature": grad_l1_quadrature(density),
        }
    else:
        delta = 0.1 if cfg.delta is None else cfg.delta
        result = tv_shift_check(density, delta)
        value = result.lhs
        payload = {"check": "lemma1", "density": density.model_dump(mode="json"), **result.model_dump()}
        payload["holds"] = result.holds
    print(f"{value:.6f}")
    print(f"config_hash={cfg.config_hash()} seed={cfg.seed}")
    if cfg.out:
        _emit(_stamp(payload, cfg), cfg.out)


def run_experiment(client: DepthLabClient, cfg: RunConfig) -> None:
    try:
        experiment = cfg.experiment()
    except ValidationError as e:
        raise ConfigError(f"invalid experiment configuration: {e}") from e
    report = client.run_experiment(cfg.target, experiment)
    report = report.model_copy(update={"config_hash": cfg.config_hash()})
    if cfg.plot:
        plot_report(report, cfg.plot)
    if cfg.csv:
        write_replicates_csv(report, cfg.csv)
    payload = report.report()
    payload["config"] = cfg.embedded()
    _emit(payload, cfg.out)


_RUNNERS = {
    Command.SIMULATE: run_simulate,
    Command.SMOOTH: run_smooth,
    Command.DEPTH: run_depth,
    Command.EXACT: run_exact,
    Command.CHECK: run_check,
    Command.EXPERIMENT: run_experiment,
}


def _configure_logging(settings: Settings, verbose: bool) -> None:
    level = logging.INFO if verbose else getattr(logging, settings.log_level, logging.WARNING)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    logging.getLogger("hrdepth").setLevel(level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    if args.command == "schema":
        print(json.dumps(RunConfig.model_json_schema(), indent=2))
        return EXIT_OK

    try:
        cfg = build_config(args)
        settings = Settings.from_env(jobs=cfg.jobs)
        _configure_logging(settings, args.verbose)
        _RUNNERS[cfg.command](DepthLabClient(settings), cfg)
    except (ValueError, OSError) as e:
        print(f"hrdepth: error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, ResourceCapError) as e:
        print(f"hrdepth: error: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
