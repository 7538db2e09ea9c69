"""Distributed learning for power allocation on fading interference channels.

Thin wrapper over the C++ core: model construction, policy enumeration,
regret-matching / multiplicative-weights learning, stochastic local search
for Pareto and Nash-bargaining points, and exact verification oracles.
"""

from ._core import (  # noqa: F401
    ConfigError,
    ExperimentConfig,
    FadingModel,
    GainAlphabet,
    InstanceTooLargeError,
    PolicySet,
    PowerPolicy,
    ValidationError,
    brute_force_nb,
    brute_force_pareto,
    cross_state_probability,
    disagreement_point,
    enumerate_multirate,
    enumerate_policies,
    exact_utility,
    interference_threshold,
    is_epsilon_ce,
    is_epsilon_cce,
    load_config,
    make_model_with_cross_pmfs,
    make_symmetric_model,
    run_cce_learning,
    run_ce_learning,
    run_nash_bargaining,
    run_pareto_search,
    snr_db_to_budget,
    state_probability,
    validate_model,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "FadingModel",
    "GainAlphabet",
    "InstanceTooLargeError",
    "PolicySet",
    "PowerPolicy",
    "ValidationError",
    "brute_force_nb",
    "brute_force_pareto",
    "cross_state_probability",
    "disagreement_point",
    "enumerate_multirate",
    "enumerate_policies",
    "exact_utility",
    "interference_threshold",
    "is_epsilon_ce",
    "is_epsilon_cce",
    "load_config",
    "make_model_with_cross_pmfs",
    "make_symmetric_model",
    "run_cce_learning",
    "run_ce_learning",
    "run_nash_bargaining",
    "run_pareto_search",
    "snr_db_to_budget",
    "state_probability",
    "validate_model",
]
