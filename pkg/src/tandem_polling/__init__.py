"""Exact analysis and simulation of a two-station, two-product tandem polling
network with setups, exhaustive service, finite buffers and loss, under
synchronized (SP) or out-of-sync (OP) polling at station 2."""
from .balance import balance_residuals, residual_against_balance_equations
from .config import ExperimentConfig, load_config, parse_config
from .exceptions import (
    DimensionTooLarge,
    InvalidConfig,
    InvalidParams,
    PollingError,
    ReducibleChain,
    SingularSystem,
    ZeroThroughput,
)
from .generator import GeneratorMatrix, build_full_generator, build_subsystem_generator
from .measures import (
    NetworkReport,
    PerformanceReport,
    analyze,
    analyze_full_chain,
    analyze_product,
    loss_rates,
    queue_lengths,
    report,
    solve_subsystem,
    throughput,
    waiting_times,
)
from .model import (
    FullSpace,
    FullState,
    NetworkParams,
    Phase,
    Strategy,
    SubsystemSpace,
    SubsystemState,
    count_full_states,
    count_subsystem_states,
    enumerate_full_states,
    enumerate_subsystem_states,
)
from .simulator import (
    SimConfig,
    SimEstimate,
    run_simulation,
    simulate_replication,
    validate_against_analysis,
)
from .solver import SolverOptions, StationaryDistribution, gth_solve, solve_stationary
from .tables import TableRow, reproduce_table, sweep_buffers

__version__ = "0.1.0"
