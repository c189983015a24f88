"""Command-line front end.

    bdris channel-gain | sum-rate | timing  [--config F] [--out F] [--seed S]
                                            [--strategies A,B] [--n-list 4,8]
                                            [--trials T] [--workers W]
    bdris project --in Z.csv --op symuni [--group-size G] --out T.csv

Precedence for scenario values: command-line flags, then the TOML config
file, then built-in defaults.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime as _dt
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .channel import ScenarioConfig
from .evaluation import (DEFAULT_N_LIST, DEFAULT_STRATEGIES, POO_MAX_N, parse_strategy,
                         run_channel_gain, run_sum_rate, run_timing)
from .projections import (Architecture, ScatteringMatrix, project_group, project_single, sym,
                          symuni, uni)

log = logging.getLogger("bdris")

EXPERIMENTS = {
    "channel-gain": run_channel_gain,
    "sum-rate": run_sum_rate,
    "timing": run_timing,
}
PROJECTIONS = ("sym", "uni", "symuni", "group", "single")


class ConfigError(ValueError):
    pass


@dataclass
class RunManifest:
    subcommand: str
    config_path: Optional[str] = None
    out_path: Optional[str] = None
    strategies: tuple = ()
    n_list: tuple = DEFAULT_N_LIST
    seed: Optional[int] = None
    trials: Optional[int] = None
    workers: int = 1
    poo_max_n: int = POO_MAX_N
    timestamp: str = dataclasses.field(
        default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())


def parse_config(text: str, **overrides) -> ScenarioConfig:
    """Build a ScenarioConfig from a TOML document.

    Keys are the ScenarioConfig field names, matched case-insensitively
    (``n = 16``, ``snr_db = 20``). Missing keys keep their defaults; unknown
    keys are rejected. ``overrides`` (non-None values) win over the document.
    """
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    by_lower = {name.lower(): name for name in ScenarioConfig.field_names()}
    values = {}
    for key, value in doc.items():
        name = by_lower.get(key.lower())
        if name is None:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(value, dict):
            raise ConfigError(f"config key {key!r} must be a scalar")
        values[name] = value
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ScenarioConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def format_complex(z: complex) -> str:
    re_, im = float(z.real), float(z.imag)
    sign = "-" if np.signbit(im) else "+"
    return f"{re_:.17g}{sign}{abs(im):.17g}j"


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[complex(cell.strip().replace(" ", "")) for cell in row]
                for row in csv.reader(fh) if row]
    return np.array(rows, dtype=complex)


def write_matrix_csv(path, Z: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in np.atleast_2d(Z):
            writer.writerow([format_complex(z) for z in row])


def run_project(Z: np.ndarray, op: str, group_size: Optional[int] = None):
    """Apply a named projection; returns (matrix, residuals or None)."""
    if op == "sym":
        return sym(Z), None
    if op == "uni":
        Q = uni(Z)
        return Q, {"unitarity": float(np.linalg.norm(Q @ Q.conj().T - np.eye(len(Q))))}
    if op == "symuni":
        S = symuni(Z)
    elif op == "single":
        S = project_single(Z)
    elif op == "group":
        if group_size is None:
            raise ConfigError("--group-size is required for --op group")
        S = project_group(Z, group_size)
    else:
        raise ConfigError(f"unknown projection {op!r}")
    return S.theta, S.residuals()


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bdris", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment and write a CSV")
        p.add_argument("--config", help="TOML scenario file")
        p.add_argument("--out", help="output CSV (default: stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--strategies", type=_csv_list,
                       help="comma-separated labels, e.g. PoP-FC,PoO-FC or proposed1")
        p.add_argument("--n-list", type=lambda s: [int(x) for x in _csv_list(s)],
                       help="comma-separated RIS sizes (default 4,8,16,32,64)")
        p.add_argument("--poo-max-n", type=int, default=POO_MAX_N)
        if name != "timing":
            p.add_argument("--workers", type=int, default=1, help="trial-level threads")
    p = sub.add_parser("project", help="project a matrix read from CSV")
    p.add_argument("--in", dest="input", required=True, help="CSV of complex entries (a+bj)")
    p.add_argument("--op", choices=PROJECTIONS, default="symuni")
    p.add_argument("--group-size", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--residuals-out", help="residual CSV (default: <out>.residuals.csv)")
    return parser


def _run_experiment(args) -> int:
    text = Path(args.config).read_text() if args.config else ""
    config = parse_config(text, seed=args.seed, trials=args.trials)
    manifest = RunManifest(
        subcommand=args.command, config_path=args.config, out_path=args.out,
        strategies=tuple(args.strategies or DEFAULT_STRATEGIES[args.command]),
        n_list=tuple(args.n_list or DEFAULT_N_LIST), seed=config.seed, trials=config.trials,
        workers=getattr(args, "workers", 1), poo_max_n=args.poo_max_n)
    for label in manifest.strategies:
        parse_strategy(label, config.group_size)
    log.info("manifest: %s", manifest)
    # the config's own N only has to satisfy the divisibility check
    kwargs = dict(poo_max_n=manifest.poo_max_n)
    if args.command != "timing":
        kwargs["workers"] = manifest.workers
    result = EXPERIMENTS[args.command](config, manifest.strategies, manifest.n_list, **kwargs)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            result.to_csv(fh)
    else:
        result.to_csv(sys.stdout)
    return 0


def _run_project(args) -> int:
    Z = read_matrix_csv(args.input)
    theta, residuals = run_project(Z, args.op, args.group_size)
    write_matrix_csv(args.out, theta)
    if residuals is not None:
        res_path = args.residuals_out or f"{args.out}.residuals.csv"
        with open(res_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("residual", "value"))
            for name, value in residuals.items():
                writer.writerow((name, format(value, ".17g")))
        for name, value in residuals.items():
            print(f"{name}={value:.3e}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "project":
            return _run_project(args)
        return _run_experiment(args)
    except (ConfigError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"bdris: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
