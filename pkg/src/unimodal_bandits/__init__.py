"""Unimodal multi-armed bandits: IMED-UB and baselines, exact divergence
tools, instance constants, per-step invariant checking, and a reproducible
Monte Carlo experiment harness."""

from .env import (
    BanditConfig,
    BanditEnv,
    PullStats,
    StepRecord,
    empirical_best_set,
    leader,
)
from .errors import ConfigError, ParameterError, StateError
from .expfam import Bernoulli, Exponential, Family, Gaussian, make_family
from .graph import UnimodalGraph, UnimodalityReport, line_graph, validate_unimodal
from .invariants import ViolationReport, check_step, check_trace
from .policies import (
    Imed,
    ImedUB,
    Osub,
    Policy,
    PolicySpec,
    Uts,
    imed_index,
    make_policy,
    transport_kl,
)
from .runner import (
    ExperimentConfig,
    RegretCurves,
    RunResult,
    check_trace_dir,
    derive_run_seed,
    emit_outputs,
    load_config,
    log_grid,
    parse_config,
    read_trace,
    run_experiment,
    seed_sequence,
    simulate_policy_run,
    write_trace,
)
from .theory import (
    TheoryReport,
    alpha_nu,
    epsilon_nu,
    lower_bound_constant,
    pull_count_leading_term,
)

__version__ = "0.1.0"

__all__ = [
    "BanditConfig",
    "BanditEnv",
    "Bernoulli",
    "ConfigError",
    "Exponential",
    "ExperimentConfig",
    "Family",
    "Gaussian",
    "Imed",
    "ImedUB",
    "Osub",
    "ParameterError",
    "Policy",
    "PolicySpec",
    "PullStats",
    "RegretCurves",
    "RunResult",
    "StateError",
    "StepRecord",
    "TheoryReport",
    "UnimodalGraph",
    "UnimodalityReport",
    "Uts",
    "ViolationReport",
    "alpha_nu",
    "check_step",
    "check_trace",
    "check_trace_dir",
    "derive_run_seed",
    "emit_outputs",
    "empirical_best_set",
    "epsilon_nu",
    "imed_index",
    "leader",
    "line_graph",
    "load_config",
    "log_grid",
    "lower_bound_constant",
    "make_family",
    "make_policy",
    "parse_config",
    "pull_count_leading_term",
    "read_trace",
    "run_experiment",
    "seed_sequence",
    "simulate_policy_run",
    "transport_kl",
    "validate_unimodal",
    "write_trace",
]
