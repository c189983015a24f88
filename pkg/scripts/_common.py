"""Shared argument handling for the experiment scripts."""
import argparse
import logging
import sys
from pathlib import Path

from bdris.cli import parse_config


def base_parser(description, default_out):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", type=Path, help="TOML scenario file")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--n-list", default="4,8,16,32,64")
    p.add_argument("--out", type=Path, default=Path(default_out))
    p.add_argument("--plot", type=Path, help="also save a PNG (needs matplotlib)")
    return p


def scenario(args):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    text = args.config.read_text() if args.config else ""
    return parse_config(text, trials=args.trials, seed=args.seed)


def n_list(args):
    return [int(n) for n in args.n_list.split(",")]


def finish(result, args, metric, ylabel, logy=False):
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        result.to_csv(fh)
    print(f"wrote {args.out}", file=sys.stderr)
    for row in result.rows:
        if row.metric == metric:
            print(f"{row.strategy:>14}  N={row.N:<3d} {metric}={row.mean:.6g}")
    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 4))
        for strategy in dict.fromkeys(r.strategy for r in result.rows):
            series = result.series(strategy, metric)
            if series:
                ax.plot(list(series), list(series.values()), marker="o", label=strategy)
        ax.set_xscale("log", base=2)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel("N")
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote {args.plot}", file=sys.stderr)
