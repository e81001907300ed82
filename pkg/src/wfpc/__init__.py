"""Weighted Fast Probabilistic Consensus: voting power, fairness and simulation."""

from .adversary import AdversaryConfig, adversary_opinion, build_population
from .complexity import (
    QueryLoadProfile,
    asymptotic_class,
    compare_telemetry,
    expected_queries,
    fair_gossip_threshold,
    query_load_profile,
)
from .protocol import NodeState, ProtocolConfig, eta, majority_reduction_check, sample_quorum, update_opinion
from .scheme import (
    FAIR,
    Constant,
    Identity,
    Power,
    VotingPowerReport,
    VotingScheme,
    WeightFn,
    fairness_gap,
    sampling_probs,
    theorem2_counterexample,
    voting_power_exact,
    voting_power_mc,
)
from .sim import (
    ExperimentConfig,
    ExperimentResult,
    agreement_failure,
    assign_initial_opinions,
    run_experiment,
    run_once,
    sweep,
)
from .weights import WeightVector, ZipfParams, fit_zipf, split_weight, zipf_weights

__version__ = "0.1.0"
