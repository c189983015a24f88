"""Monte-Carlo experiments: channel gain, sum-rate and CPU time versus N.

Strategy labels have the form ``<passive>[+<active>]``:

    passive  NoRIS | PoP-<arch> | PoO-<arch>, arch in FC, SC, GC, GC<n>
    active   FP | RZF

``PoP`` projects the low-complexity relaxed solution, ``PoO`` the optimal
one. A bare ``GC`` takes its group size from the scenario. ``proposed1`` and
``proposed2`` are aliases for ``PoP-FC+FP`` and ``PoP-FC+RZF``.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import logging
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .active import fp_beamforming, rzf_beamforming, sum_rate
from .channel import ChannelSet, ScenarioConfig, effective_channel, sample_channels
from .passive import (LOW_COMPLEXITY, OPTIMAL, RelaxedSolution, relaxed_lowcomplexity,
                      relaxed_optimal, sum_channel_gain, sum_channel_gain_gradient)
from .projections import Architecture, project

log = logging.getLogger(__name__)

DEFAULT_N_LIST = (4, 8, 16, 32, 64)
POO_MAX_N = 32
CSV_HEADER = ("strategy", "N", "metric", "mean", "std", "mean_time_s", "trials")

ALIASES = {"proposed1": "PoP-FC+FP", "proposed2": "PoP-FC+RZF"}
DEFAULT_STRATEGIES = {
    "channel-gain": ("NoRIS", "PoP-FC", "PoP-GC", "PoP-SC", "PoO-FC", "PoO-GC", "PoO-SC"),
    "sum-rate": ("PoP-FC+FP", "PoP-FC+RZF", "NoRIS+FP"),
    "timing": ("PoP-FC+FP", "PoP-FC+RZF", "PoO-FC+FP"),
}

_LABEL_RE = re.compile(
    r"^(?:(?P<noris>NoRIS)|(?P<relax>PoP|PoO)-(?P<arch>FC|SC|GC(?P<gs>\d+)?))"
    r"(?:\+(?P<active>FP|RZF))?$")


@dataclass(frozen=True)
class StrategySpec:
    """One (passive, active) combination. ``passive`` is None for NoRIS."""

    passive: Optional[str] = None
    arch: Optional[Architecture] = None
    active: Optional[str] = None

    @property
    def label(self) -> str:
        if self.passive is None:
            head = "NoRIS"
        else:
            head = ("PoP" if self.passive == LOW_COMPLEXITY else "PoO") + "-" + self.arch.short_name
        return head + (f"+{self.active}" if self.active else "")


def parse_strategy(label: str, group_size: Optional[int] = None) -> StrategySpec:
    label = ALIASES.get(label.strip(), label.strip())
    m = _LABEL_RE.match(label)
    if not m:
        raise ValueError(f"unrecognised strategy label {label!r}")
    active = m.group("active")
    if m.group("noris"):
        return StrategySpec(None, None, active)
    relax = LOW_COMPLEXITY if m.group("relax") == "PoP" else OPTIMAL
    arch_name = m.group("arch")
    if arch_name == "FC":
        arch = Architecture.fully_connected()
    elif arch_name == "SC":
        arch = Architecture.single_connected()
    else:
        gs = m.group("gs")
        if gs is None:
            if group_size is None:
                raise ValueError(f"{label!r} needs a group size")
            gs = group_size
        arch = Architecture.group_connected(int(gs))
    return StrategySpec(relax, arch, active)


def _as_specs(strategies, group_size) -> list[StrategySpec]:
    return [s if isinstance(s, StrategySpec) else parse_strategy(s, group_size) for s in strategies]


@dataclass
class ResultRow:
    strategy: str
    N: int
    metric: str
    mean: float
    std: float
    mean_time_s: float
    trials: int


@dataclass
class ExperimentResult:
    rows: list

    def get(self, strategy: str, N: int, metric: Optional[str] = None) -> ResultRow:
        for r in self.rows:
            if r.strategy == strategy and r.N == N and (metric is None or r.metric == metric):
                return r
        raise KeyError((strategy, N, metric))

    def series(self, strategy: str, metric: str) -> dict:
        return {r.N: r.mean for r in self.rows if r.strategy == strategy and r.metric == metric}

    def to_csv(self, stream=None) -> str:
        """Write the rows as CSV (17 significant digits) and return the text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([r.strategy, r.N, r.metric, _fmt(r.mean), _fmt(r.std),
                             _fmt(r.mean_time_s), r.trials])
        text = buf.getvalue()
        if stream is not None:
            stream.write(text)
        return text


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _std(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.std(values, ddof=1)) if values.size >= 2 else float("nan")


@dataclass
class PipelineOutcome:
    theta: Optional[np.ndarray]
    gain: float
    rate: float
    passive_time: float
    active_time: float

    @property
    def total_time(self) -> float:
        return self.passive_time + self.active_time


def two_stage(ch: ChannelSet, spec: StrategySpec, P_t: float,
              relaxed_cache: Optional[dict] = None) -> PipelineOutcome:
    """Stage 1 designs Theta, stage 2 designs W for the resulting channel.

    ``relaxed_cache`` lets several architectures share one relaxed solution of
    the same channel; cached solves are not re-timed.
    """
    theta = None
    t0 = time.perf_counter()
    if spec.passive is not None:
        relaxed = None if relaxed_cache is None else relaxed_cache.get(spec.passive)
        if relaxed is None:
            relaxed = (relaxed_lowcomplexity(ch) if spec.passive == LOW_COMPLEXITY
                       else relaxed_optimal(ch))
            if relaxed_cache is not None:
                relaxed_cache[spec.passive] = relaxed
        theta = project(relaxed.theta, spec.arch).theta
    t1 = time.perf_counter()
    rate = float("nan")
    if spec.active is not None:
        F = ch.G_mat if theta is None else effective_channel(ch, theta)
        if spec.active == "FP":
            W = fp_beamforming(F, P_t, ch.noise_power)[0].W
        else:
            W = rzf_beamforming(F, P_t, ch.noise_power).W
    t2 = time.perf_counter()
    if spec.active is not None:
        rate = sum_rate(F, W, ch.noise_power)
    gain = (float(np.vdot(ch.G_mat, ch.G_mat).real) if theta is None
            else sum_channel_gain(ch, theta))
    return PipelineOutcome(theta, gain, rate, t1 - t0, t2 - t1)


def _runnable(spec: StrategySpec, N: int, poo_max_n: int) -> bool:
    if spec.passive == OPTIMAL and N > poo_max_n:
        log.warning("skipping %s at N=%d (PoO capped at N <= %d)", spec.label, N, poo_max_n)
        return False
    if spec.arch is not None and spec.arch.kind == "group" and N % spec.arch.group_size:
        raise ValueError(f"{spec.label}: group size does not divide N={N}")
    return True


def _run(config: ScenarioConfig, specs, N_list, metric_fn, poo_max_n, workers):
    rows = []
    for N in N_list:
        cfg = dataclasses.replace(config, N=int(N))
        active = [s for s in specs if _runnable(s, cfg.N, poo_max_n)]
        if not active:
            continue

        def trial(t, cfg=cfg, active=active):
            ch = sample_channels(cfg, t)
            cache = {}
            return [two_stage(ch, s, cfg.transmit_power, cache) for s in active]

        indices = range(cfg.trials)
        if workers and workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                outcomes = list(pool.map(trial, indices))
        else:
            outcomes = [trial(t) for t in indices]
        for j, spec in enumerate(active):
            per_trial = [o[j] for o in outcomes]
            times = [o.total_time for o in per_trial]
            for metric, values in metric_fn(per_trial):
                rows.append(ResultRow(spec.label, cfg.N, metric, float(np.mean(values)),
                                      _std(values), float(np.mean(times)), cfg.trials))
    return ExperimentResult(rows)


def run_channel_gain(config: ScenarioConfig, strategies=None, N_list=DEFAULT_N_LIST,
                     poo_max_n: int = POO_MAX_N, workers: int = 1) -> ExperimentResult:
    """Mean sum channel gain per (strategy, N); draws are paired across strategies."""
    strategies = DEFAULT_STRATEGIES["channel-gain"] if strategies is None else strategies
    specs = _as_specs(strategies, config.group_size)
    for s in specs:
        if s.active is not None:
            raise ValueError(f"{s.label}: the channel-gain experiment takes passive strategies only")
    return _run(config, specs, N_list,
                lambda outs: [("sum_channel_gain", [o.gain for o in outs])], poo_max_n, workers)


def run_sum_rate(config: ScenarioConfig, strategies=None, N_list=DEFAULT_N_LIST,
                 poo_max_n: int = POO_MAX_N, workers: int = 1) -> ExperimentResult:
    strategies = DEFAULT_STRATEGIES["sum-rate"] if strategies is None else strategies
    specs = _as_specs(strategies, config.group_size)
    for s in specs:
        if s.active is None:
            raise ValueError(f"{s.label}: the sum-rate experiment needs an active stage (+FP or +RZF)")
    return _run(config, specs, N_list,
                lambda outs: [("sum_rate", [o.rate for o in outs])], poo_max_n, workers)


def run_timing(config: ScenarioConfig, strategies=None, N_list=DEFAULT_N_LIST,
               poo_max_n: int = POO_MAX_N) -> ExperimentResult:
    """Wall-clock time of the two-stage solve, channel generation excluded.

    Reports mean and median of the passive-stage and total times. Trials run
    sequentially so timings do not contend.
    """
    strategies = DEFAULT_STRATEGIES["timing"] if strategies is None else strategies
    specs = _as_specs(strategies, config.group_size)

    def metrics(outs):
        passive = [o.passive_time for o in outs]
        active = [o.active_time for o in outs]
        total = [o.total_time for o in outs]
        return [
            ("passive_time_s", passive),
            ("passive_time_s_median", [float(np.median(passive))] * len(outs)),
            ("active_time_s", active),
            ("total_time_s", total),
            ("total_time_s_median", [float(np.median(total))] * len(outs)),
        ]

    # no shared relaxed cache across strategies: each one pays its own solve
    rows = []
    for N in N_list:
        cfg = dataclasses.replace(config, N=int(N))
        for spec in specs:
            if not _runnable(spec, cfg.N, poo_max_n):
                continue
            outs = [two_stage(sample_channels(cfg, t), spec, cfg.transmit_power)
                    for t in range(cfg.trials)]
            times = [o.total_time for o in outs]
            for metric, values in metrics(outs):
                std = 0.0 if metric.endswith("_median") else _std(values)
                rows.append(ResultRow(spec.label, cfg.N, metric, float(np.mean(values)), std,
                                      float(np.mean(times)), cfg.trials))
    return ExperimentResult(rows)


def projected_gradient_oracle(ch: ChannelSet, step_count: int = 5000, restarts: int = 20,
                              seed: int = 0, theta0=None, tol: float = 1e-15) -> RelaxedSolution:
    """Maximize f over ``||Theta||_F^2 <= N`` by projected gradient ascent.

    Works with matrix products only (no vectorization, no eigendecomposition).
    Since f is convex the ascent step ``Theta + t * grad`` followed by
    rescaling onto the ball never decreases f; the step is taken large
    (t -> infinity), which reduces to ``Theta <- sqrt(N) grad / ||grad||``.
    Starts: Theta = 0 (or ``theta0``) plus ``restarts`` random points on the
    sphere. Intended for small N as a test oracle.
    """
    N = ch.N
    radius = np.sqrt(N)
    rng = np.random.default_rng(seed)
    starts = [np.zeros((N, N), complex) if theta0 is None else np.asarray(theta0, complex)]
    for _ in range(restarts):
        Z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        starts.append(Z * (radius / np.linalg.norm(Z)))

    best_theta, best_val = None, -np.inf
    for theta in starts:
        val = sum_channel_gain(ch, theta)
        for _ in range(step_count):
            g = sum_channel_gain_gradient(ch, theta)
            g_norm = np.linalg.norm(g)
            if g_norm == 0.0:
                break
            new = g * (radius / g_norm)
            new_val = sum_channel_gain(ch, new)
            if new_val <= val * (1.0 + tol):
                if new_val > val:
                    theta, val = new, new_val
                break
            theta, val = new, new_val
        if val > best_val:
            best_theta, best_val = theta, val
    return RelaxedSolution(best_theta, "projected_gradient", best_val)
