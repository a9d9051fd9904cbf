"""Discrete-event simulation of the full tandem polling network.

Independent replications, each on its own random stream derived from
``(seed, replication)``.  Confidence intervals are Student-t intervals on
the replication means.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as st

from . import _simkernel as K
from .exceptions import InvalidConfig
from .measures import NetworkReport
from .model import NetworkParams, Strategy

MEASURES = (
    "th11", "th21", "th12", "th22",
    "L11", "L21", "L12", "L22",
    "w11", "w21", "w12", "w22", "w1", "w2",
    "loss11", "loss21", "loss12", "loss22",
    "tagged_w11", "tagged_w21", "tagged_w12", "tagged_w22",
    "wip",
)


@dataclass(frozen=True)
class SimConfig:
    params: NetworkParams
    strategy: Strategy
    horizon: float = 1e6
    warmup: float | None = None
    replications: int = 10
    seed: int = 0
    confidence: float = 0.95

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        if not isinstance(self.params, NetworkParams):
            raise InvalidConfig("expected NetworkParams", "params")
        if not (isinstance(self.horizon, (int, float)) and math.isfinite(self.horizon)):
            raise InvalidConfig(f"must be a finite number, got {self.horizon!r}", "horizon")
        if self.warmup is None:
            object.__setattr__(self, "warmup", 0.1 * float(self.horizon))
        if self.warmup < 0:
            raise InvalidConfig(f"must be >= 0, got {self.warmup}", "warmup")
        if not self.horizon > self.warmup:
            raise InvalidConfig(
                f"horizon {self.horizon} must exceed warmup {self.warmup}", "horizon"
            )
        if int(self.replications) != self.replications or self.replications < 1:
            raise InvalidConfig(f"must be a positive integer, got {self.replications}", "replications")
        if not 0 < self.confidence < 1:
            raise InvalidConfig(f"must lie in (0, 1), got {self.confidence}", "confidence")


@dataclass(frozen=True)
class Interval:
    mean: float
    half_width: float

    @property
    def low(self) -> float:
        return self.mean - self.half_width

    @property
    def high(self) -> float:
        return self.mean + self.half_width

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high


@dataclass(frozen=True, eq=False)
class Replication:
    """Per-replication point estimates plus raw whole-run counters."""

    values: dict
    offered: tuple[int, int]
    lost1: tuple[int, int]
    lost2: tuple[int, int]
    departed: tuple[int, int]
    in_system: tuple[int, int]
    events: int


@dataclass(frozen=True, eq=False)
class SimEstimate:
    config: SimConfig
    estimates: dict[str, Interval]
    replications: list[Replication] = field(repr=False)

    def __getitem__(self, name: str) -> Interval:
        return self.estimates[name]


def _ratio(num, den):
    if den > 0:
        return num / den
    return 0.0 if num == 0 else math.nan


def _replication_values(stats, window) -> dict:
    out = {}
    for k in (0, 1):
        i = k + 1
        base = K.STRIDE * k
        th1 = stats[base + K.DONE1] / window
        th2 = stats[base + K.DONE2] / window
        L1 = stats[base + K.AREA1] / window
        L2 = stats[base + K.AREA2] / window
        out[f"th{i}1"] = th1
        out[f"th{i}2"] = th2
        out[f"L{i}1"] = L1
        out[f"L{i}2"] = L2
        out[f"w{i}1"] = _ratio(L1, th1)
        out[f"w{i}2"] = _ratio(L2, th2)
        out[f"w{i}"] = out[f"w{i}1"] + out[f"w{i}2"]
        out[f"loss{i}1"] = stats[base + K.LOST1] / window
        out[f"loss{i}2"] = stats[base + K.LOST2] / window
        out[f"tagged_w{i}1"] = _ratio(stats[base + K.SOJ1], stats[base + K.NSOJ1])
        out[f"tagged_w{i}2"] = _ratio(stats[base + K.SOJ2], stats[base + K.NSOJ2])
    out["wip"] = out["L11"] + out["L12"] + out["L21"] + out["L22"]
    return out


def replication_seed(seed: int, replication: int) -> int:
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(replication)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _kernel_args(config: SimConfig):
    p = config.params
    return (
        np.array([p.lambda1, p.lambda2]),
        np.array([p.mu11, p.mu21]),
        np.array([p.mu12, p.mu22]),
        np.array([p.mus1, p.mus2]),
        np.array([p.n1, p.n2], dtype=np.int64),
        np.array([int(config.strategy.station2_phase(1)), int(config.strategy.station2_phase(2))],
                 dtype=np.int64),
    )


def simulate_replication(config: SimConfig, replication: int, trace_len: int = 0):
    """Run one replication; returns ``(Replication, trace)``.

    ``trace`` holds up to ``trace_len`` rows ``(time, phase, l11, l21, l12, l22)``
    recorded after each event.
    """
    trace = np.zeros((trace_len, 6))
    stats, n = K.run_replication(
        replication_seed(config.seed, replication), *_kernel_args(config),
        float(config.horizon), float(config.warmup), trace,
    )
    window = float(config.horizon) - float(config.warmup)

    def pair(slot):
        return tuple(int(stats[K.STRIDE * k + slot]) for k in (0, 1))

    in_system = tuple(
        int(stats[K.STRIDE * k + K.END_Q1] + stats[K.STRIDE * k + K.END_Q2]) for k in (0, 1)
    )
    rep = Replication(
        _replication_values(stats, window),
        pair(K.OFFERED), pair(K.ALL_LOST1), pair(K.ALL_LOST2), pair(K.DEPARTED),
        in_system, int(stats[K.N_EVENTS_SLOT]),
    )
    return rep, trace[:n]


def _interval(samples: np.ndarray, confidence: float) -> Interval:
    mean = float(np.mean(samples))
    r = len(samples)
    if r < 2:
        return Interval(mean, math.inf)
    sd = float(np.std(samples, ddof=1))
    q = float(st.t.ppf(0.5 + confidence / 2, r - 1))
    return Interval(mean, q * sd / math.sqrt(r))


def run_simulation(config: SimConfig) -> SimEstimate:
    reps = [simulate_replication(config, r)[0] for r in range(int(config.replications))]
    estimates = {
        name: _interval(np.array([rep.values[name] for rep in reps]), config.confidence)
        for name in MEASURES
    }
    return SimEstimate(config, estimates, reps)


@dataclass(frozen=True)
class Comparison:
    measure: str
    analytic: float
    simulated: Interval
    inside: bool

    @property
    def deviation(self) -> float:
        return abs(self.analytic - self.simulated.mean)


def analytic_values(report: NetworkReport) -> dict:
    out = {}
    for i in (1, 2):
        r = report[i]
        out.update({
            f"th{i}1": r.th_i1, f"th{i}2": r.th_i2,
            f"L{i}1": r.L_i1, f"L{i}2": r.L_i2,
            f"w{i}1": r.w_i1, f"w{i}2": r.w_i2, f"w{i}": r.w_i,
            f"loss{i}1": r.loss_i1, f"loss{i}2": r.loss_i2,
            f"tagged_w{i}1": r.w_i1, f"tagged_w{i}2": r.w_i2,
        })
    out["wip"] = report.wip
    return out


def validate_against_analysis(
    config: SimConfig, report: NetworkReport, estimate: SimEstimate | None = None
) -> tuple[list[Comparison], float]:
    """Check each analytical measure against the simulation interval.

    Runs the simulation unless ``estimate`` is supplied.  Returns the
    per-measure comparisons and the worst absolute deviation.
    """
    est = run_simulation(config) if estimate is None else estimate
    rows = []
    for name, value in analytic_values(report).items():
        iv = est.estimates[name]
        rows.append(Comparison(name, value, iv, iv.contains(value)))
    finite = [r.deviation for r in rows if math.isfinite(r.deviation)]
    return rows, max(finite, default=0.0)
