"""bribelab: cost analysis and simulation of bribery-funded chain-race
attacks on proof-of-work blockchains."""

from .model import (
    AttackParams,
    Config,
    ConfigError,
    CostReport,
    DomainError,
    GameState,
    MinerPopulation,
    ValidationError,
    load_config,
    parse_config,
    reachable_states,
    walk_states,
)
from .values import (
    EquilibriumAudit,
    ValueTable,
    audit_equilibrium,
    build_value_table,
    miner_value,
    miner_value_table,
    payout_at,
)
from .analytics import (
    ForwardMass,
    best_case_cost,
    expected_attack_blocks,
    expected_cost,
    expected_duration,
    failure_probability,
    forward_mass,
    pooled_smoothing_cost,
    success_probability,
    worst_case_cost,
)
from .bounds import (
    BoundResult,
    budish_miner_cost,
    budish_total_cost,
    expected_stopping_time_bound,
    lemma2_bound,
    lemma3_bound,
    lemma4_bound,
    participation_loss_bound,
    select_fmax,
    success_lower_bound,
    thm4_worst_case_bound,
    thm5_expected_cost_bound,
    thresholding_cost,
    thresholding_miner_cost,
)
from .mc import (
    AggregateReport,
    CoupledTrial,
    DefectAlways,
    DeviationReport,
    EquilibriumAttack,
    HonestAlways,
    Strategy,
    ThresholdDefect,
    TrialRecord,
    cost_quantiles,
    deviation_experiment,
    deviation_trial,
    run_trial,
    run_trials,
)

__version__ = "0.1.0"
