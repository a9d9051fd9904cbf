"""Throughput, queue-length, waiting-time and loss measures.

Each product is analysed on its own subsystem.  Station-2 throughput of
product ``i`` counts service completions, which happen only in the station-1
phase that gates station 2 for ``i`` (``U_i`` under SP, ``U_i'`` under OP).
Waiting times are Little ratios ``L / TH`` of the effective throughput.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidParams, ZeroThroughput
from .generator import GeneratorMatrix, build_full_generator, build_subsystem_generator
from .model import FullSpace, NetworkParams, Phase, Strategy, SubsystemSpace, check_product
from .solver import SolverOptions, StationaryDistribution, solve_stationary


@dataclass(frozen=True)
class PerformanceReport:
    """Steady-state measures of one product.

    ``w_i1``, ``w_i2`` and ``w_i`` are NaN when the matching throughput is
    zero (undefined rather than infinite).
    """

    product: int
    th_i1: float
    th_i2: float
    L_i1: float
    L_i2: float
    w_i1: float
    w_i2: float
    w_i: float
    loss_i1: float
    loss_i2: float

    @property
    def wip_total(self) -> float:
        return self.L_i1 + self.L_i2


@dataclass(frozen=True)
class NetworkReport:
    params: NetworkParams
    strategy: Strategy
    product1: PerformanceReport
    product2: PerformanceReport

    def __getitem__(self, product: int) -> PerformanceReport:
        return self.product1 if check_product(product) == 1 else self.product2

    @property
    def wip(self) -> float:
        return self.product1.wip_total + self.product2.wip_total


@dataclass(frozen=True, eq=False)
class SubsystemSolution:
    params: NetworkParams
    strategy: Strategy
    product: int
    generator: GeneratorMatrix
    dist: StationaryDistribution

    @property
    def space(self) -> SubsystemSpace:
        return self.generator.space


def _probabilities(dist, params: NetworkParams, product: int) -> tuple[np.ndarray, SubsystemSpace]:
    pi = np.asarray(getattr(dist, "probabilities", dist), dtype=float)
    space = SubsystemSpace(params, product)
    if pi.shape != (space.size,):
        raise InvalidParams(
            "dist", f"length {pi.shape} does not match subsystem {product} with {space.size} states"
        )
    return pi, space


def throughput(dist, params: NetworkParams, strategy, product: int) -> tuple[float, float]:
    strategy = Strategy.parse(strategy)
    pi, space = _probabilities(dist, params, product)
    serving = space.phase == Phase.service(product)
    gate = (space.phase == strategy.station2_phase(product)) & (space.li2 >= 1)
    th1 = params.mu(product, 1) * float(pi[serving].sum())
    th2 = params.mu(product, 2) * float(pi[gate].sum())
    return th1, th2


def queue_lengths(dist, params: NetworkParams, product: int) -> tuple[float, float]:
    pi, space = _probabilities(dist, params, product)
    return float(pi @ space.queue1), float(pi @ space.li2)


def loss_rates(dist, params: NetworkParams, strategy, product: int) -> tuple[float, float]:
    """Rates of units turned away at station-1 arrival and at station-2 entry."""
    pi, space = _probabilities(dist, params, product)
    cap = params.cap(product)
    full1 = space.queue1 == cap
    full2 = (space.phase == Phase.service(product)) & (space.li2 == cap)
    return (
        params.lam(product) * float(pi[full1].sum()),
        params.mu(product, 1) * float(pi[full2].sum()),
    )


def waiting_times(th_i1: float, th_i2: float, L_i1: float, L_i2: float) -> tuple[float, float, float]:
    if th_i1 <= 0 or th_i2 <= 0:
        raise ZeroThroughput(f"throughputs ({th_i1}, {th_i2}) must be positive")
    w1 = L_i1 / th_i1
    w2 = L_i2 / th_i2
    return w1, w2, w1 + w2


def report(dist, params: NetworkParams, strategy, product: int) -> PerformanceReport:
    th1, th2 = throughput(dist, params, strategy, product)
    L1, L2 = queue_lengths(dist, params, product)
    loss1, loss2 = loss_rates(dist, params, strategy, product)
    try:
        w1, w2, w = waiting_times(th1, th2, L1, L2)
    except ZeroThroughput:
        w1 = L1 / th1 if th1 > 0 else math.nan
        w2 = L2 / th2 if th2 > 0 else math.nan
        w = w1 + w2
    return PerformanceReport(product, th1, th2, L1, L2, w1, w2, w, loss1, loss2)


def solve_subsystem(
    params: NetworkParams, strategy, product: int, options: SolverOptions | None = None
) -> SubsystemSolution:
    strategy = Strategy.parse(strategy)
    gen = build_subsystem_generator(params, strategy, product)
    return SubsystemSolution(params, strategy, product, gen, solve_stationary(gen, options))


def analyze_product(
    params: NetworkParams, strategy, product: int, options: SolverOptions | None = None
) -> PerformanceReport:
    sol = solve_subsystem(params, strategy, product, options)
    return report(sol.dist, params, sol.strategy, product)


def analyze(params: NetworkParams, strategy, options: SolverOptions | None = None) -> NetworkReport:
    """Solve both subsystems and collect the per-product reports."""
    strategy = Strategy.parse(strategy)
    return NetworkReport(
        params,
        strategy,
        analyze_product(params, strategy, 1, options),
        analyze_product(params, strategy, 2, options),
    )


# --- full-chain oracle ---------------------------------------------------

def marginal_subsystem(full_pi, full_space: FullSpace, product: int) -> np.ndarray:
    """Sum a full-chain distribution over the untracked station-2 queue."""
    check_product(product)
    params = full_space.params
    space = SubsystemSpace(params, product)
    tracked = full_space.l12 if product == 1 else full_space.l22
    target = space.index(full_space.l11, full_space.l21, full_space.phase, tracked)
    out = np.zeros(space.size)
    np.add.at(out, target, np.asarray(getattr(full_pi, "probabilities", full_pi)))
    return out


def analyze_full_chain(
    params: NetworkParams, strategy, options: SolverOptions | None = None
) -> tuple[NetworkReport, StationaryDistribution, FullSpace]:
    """Measures computed directly on the undecomposed chain.

    Independent of the subsystem reduction: both station-2 queues are in the
    state, and every expectation is taken over the full distribution.
    """
    strategy = Strategy.parse(strategy)
    gen = build_full_generator(params, strategy)
    dist = solve_stationary(gen, options)
    pi = dist.probabilities
    sp_ = gen.space
    reports = []
    for i in (1, 2):
        q1 = sp_.l11 if i == 1 else sp_.l21
        q2 = sp_.l12 if i == 1 else sp_.l22
        cap = params.cap(i)
        serving = sp_.phase == Phase.service(i)
        gate = (sp_.phase == strategy.station2_phase(i)) & (q2 >= 1)
        th1 = params.mu(i, 1) * float(pi[serving].sum())
        th2 = params.mu(i, 2) * float(pi[gate].sum())
        L1, L2 = float(pi @ q1), float(pi @ q2)
        loss1 = params.lam(i) * float(pi[q1 == cap].sum())
        loss2 = params.mu(i, 1) * float(pi[serving & (q2 == cap)].sum())
        w1 = L1 / th1 if th1 > 0 else math.nan
        w2 = L2 / th2 if th2 > 0 else math.nan
        reports.append(PerformanceReport(i, th1, th2, L1, L2, w1, w2, w1 + w2, loss1, loss2))
    return NetworkReport(params, strategy, *reports), dist, sp_
