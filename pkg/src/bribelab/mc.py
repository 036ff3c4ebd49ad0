"""Seeded Monte Carlo simulation of the attack game.

Trials are keyed by (master_seed, trial_index) into independent Philox
(counter-based) streams, so the aggregate over n trials is bit-identical at
any concurrency level: parallelism only changes which thread evaluates a
trial, never the randomness it consumes. Within a trial one uniform is drawn
per step and maps to the mined-block owner by cumulative power share (honest
miners occupy the prefix of the share axis).
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import (
    AttackParams,
    CostReport,
    DomainError,
    GameState,
    MinerPopulation,
    ValidationError,
)
from .values import ValueTable

THREADS_ENV = "BRIBELAB_THREADS"


def thread_cap(requested: int | None = None) -> int:
    cap = os.environ.get(THREADS_ENV)
    n = requested if requested is not None else (int(cap) if cap else 1)
    if cap:
        n = min(n, int(cap))
    return max(1, n)


def trial_generator(master_seed: int, trial_index: int) -> np.random.Generator:
    key = np.array([master_seed, trial_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class Strategy:
    """Decision rule for a non-committed miner. Must be a pure function of
    (miner index, game state, value table) so coupled trials stay valid."""

    def attacks(self, miner: int, state: GameState, table: ValueTable) -> bool:
        raise NotImplementedError


class HonestAlways(Strategy):
    def attacks(self, miner, state, table):
        return False


class EquilibriumAttack(Strategy):
    """Always attack: the unique subgame perfect equilibrium behavior under
    the discrete-derivative payout schedule."""

    def attacks(self, miner, state, table):
        return True


class DefectAlways(Strategy):
    def attacks(self, miner, state, table):
        return False


class ThresholdDefect(Strategy):
    """Defend whenever the gap is at or above the cutoff, attack below it."""

    def __init__(self, l_cutoff: int):
        self.l_cutoff = l_cutoff

    def attacks(self, miner, state, table):
        return state.gap_l < self.l_cutoff


@dataclass(frozen=True)
class TrialRecord:
    gap_path: tuple[int, ...]
    miner_sequence: tuple[int, ...]
    payouts_paid: tuple[float, ...]
    outcome: bool
    cost: CostReport
    epsilon_paid: float = 0.0

    @property
    def duration(self) -> int:
        return len(self.gap_path)

    @property
    def attack_blocks(self) -> int:
        return sum(1 for p in self.payouts_paid if p > 0.0)


def _cumulative_shares(population: MinerPopulation) -> np.ndarray:
    powers = np.array(population.honest_powers + population.noncommitted_powers)
    return np.cumsum(powers)


def _check_strategies(population: MinerPopulation, strategies) -> None:
    n_total = len(population.honest_powers) + len(population.noncommitted_powers)
    if len(strategies) != n_total:
        raise ValidationError(f"need one strategy per miner ({n_total})")
    for i in range(len(population.honest_powers)):
        if not isinstance(strategies[i], HonestAlways):
            raise ValidationError(f"honest miner {i} must use HonestAlways")


def _all_equilibrium(population: MinerPopulation, strategies) -> bool:
    n_h = len(population.honest_powers)
    return all(isinstance(s, EquilibriumAttack) for s in strategies[n_h:])


def _walk(l0: int, up: np.ndarray) -> tuple[np.ndarray, int, bool]:
    """Gap path from the per-step up/down booleans; truncated at the first
    hit of zero. Returns (full untruncated path, duration, success)."""
    steps = np.where(up, 1, -1)
    path = l0 + np.cumsum(steps)
    hits = np.nonzero(path == 0)[0]
    if hits.size:
        return path, int(hits[0]) + 1, True
    return path, len(path), False


def _equilibrium_trial(params, table, honest_cut, u):
    """Summary of one all-participate trial from its uniform draws."""
    l0 = params.initial_gap_l0
    up = u < honest_cut
    path, dur, success = _walk(l0, up)
    gap_before = np.concatenate(([l0], path[: dur - 1]))
    att = np.nonzero(~up[:dur])[0]
    c_vals = table.payouts[att, gap_before[att]]
    eps = 0.0
    if params.epsilon_payment > 0.0:
        eps = params.epsilon_payment * int((c_vals == 0.0).sum())
    # sum sequentially in time order so the generic per-step path produces
    # bit-identical totals
    corr = 0.0
    for v in c_vals.tolist():
        corr += v
    return path, dur, success, gap_before, att, corr, eps


def run_trial(
    params: AttackParams,
    population: MinerPopulation,
    table: ValueTable,
    strategies,
    seed: int,
) -> TrialRecord:
    """One deterministic trial: same seed, same record."""
    _check_strategies(population, strategies)
    cum = _cumulative_shares(population)
    rng = trial_generator(seed, 0)
    T = params.horizon_T
    R = params.reward_R

    if _all_equilibrium(population, strategies):
        u = rng.random(T)
        path, dur, success, gap_before, att, corr, eps = _equilibrium_trial(
            params, table, float(np.sum(population.honest_powers)), u
        )
        miners = np.searchsorted(cum, u[:dur], side="right")
        payouts = np.zeros(dur)
        payouts[att] = R + table.payouts[att, gap_before[att]]
        return TrialRecord(
            gap_path=tuple(int(x) for x in path[:dur]),
            miner_sequence=tuple(int(m) for m in miners),
            payouts_paid=tuple(float(x) for x in payouts),
            outcome=success,
            cost=CostReport(
                per_block_component=len(att) * R,
                corruption_component=corr,
                success=success,
            ),
            epsilon_paid=eps,
        )

    # generic per-step loop for arbitrary strategy mixes
    l = params.initial_gap_l0
    gap_path, miners, payouts = [], [], []
    corr = 0.0
    blocks = 0
    eps = 0.0
    success = False
    for t in range(T):
        u = rng.random()
        miner = int(np.searchsorted(cum, u, side="right"))
        attack = strategies[miner].attacks(miner, GameState(t, l), table)
        if attack:
            c = float(table.payouts[t, l])
            if c == 0.0 and params.epsilon_payment > 0.0:
                eps += params.epsilon_payment
            corr += c
            blocks += 1
            payouts.append(R + c)
            l -= 1
        else:
            payouts.append(0.0)
            l += 1
        gap_path.append(l)
        miners.append(miner)
        if l == 0:
            success = True
            break
    return TrialRecord(
        gap_path=tuple(gap_path),
        miner_sequence=tuple(miners),
        payouts_paid=tuple(payouts),
        outcome=success,
        cost=CostReport(
            per_block_component=blocks * R, corruption_component=corr, success=success
        ),
        epsilon_paid=eps,
    )


@dataclass(frozen=True)
class AggregateReport:
    """Order-independent aggregate of n trials, stored per trial index."""

    params: AttackParams
    master_seed: int
    n_trials: int
    outcomes: np.ndarray
    durations: np.ndarray
    attack_blocks: np.ndarray
    corruption: np.ndarray
    epsilon_paid: np.ndarray

    @property
    def per_block(self) -> np.ndarray:
        return self.attack_blocks * self.params.reward_R

    @property
    def totals(self) -> np.ndarray:
        return self.per_block + self.corruption

    @property
    def success_rate(self) -> float:
        return float(self.outcomes.mean())

    @property
    def mean_total(self) -> float:
        return float(self.totals.mean())

    @property
    def stderr_total(self) -> float:
        return float(self.totals.std(ddof=1) / np.sqrt(self.n_trials)) if self.n_trials > 1 else 0.0

    @property
    def mean_duration(self) -> float:
        return float(self.durations.mean())

    def duration_histogram(self) -> dict[int, int]:
        vals, counts = np.unique(self.durations, return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}


def run_trials(
    params: AttackParams,
    population: MinerPopulation,
    table: ValueTable,
    strategies,
    master_seed: int,
    n_trials: int,
    threads: int | None = None,
) -> AggregateReport:
    if n_trials < 1:
        raise ValidationError("n_trials must be >= 1")
    _check_strategies(population, strategies)
    T = params.horizon_T
    honest_cut = float(np.sum(population.honest_powers))
    fast = _all_equilibrium(population, strategies)

    outcomes = np.zeros(n_trials, dtype=bool)
    durations = np.zeros(n_trials, dtype=np.int64)
    blocks = np.zeros(n_trials, dtype=np.int64)
    corruption = np.zeros(n_trials)
    eps_paid = np.zeros(n_trials)

    def worker(i: int) -> None:
        if fast:
            u = trial_generator(master_seed, i).random(T)
            _, dur, success, _, att, corr, eps = _equilibrium_trial(
                params, table, honest_cut, u
            )
            outcomes[i] = success
            durations[i] = dur
            blocks[i] = len(att)
            corruption[i] = corr
            eps_paid[i] = eps
        else:
            rec = _generic_trial(params, population, table, strategies, master_seed, i)
            outcomes[i] = rec.outcome
            durations[i] = rec.duration
            blocks[i] = rec.attack_blocks
            corruption[i] = rec.cost.corruption_component
            eps_paid[i] = rec.epsilon_paid

    n_threads = thread_cap(threads)
    if n_threads == 1:
        for i in range(n_trials):
            worker(i)
    else:
        chunk = max(1, n_trials // (n_threads * 8))

        def run_range(lo: int, hi: int) -> None:
            for i in range(lo, hi):
                worker(i)

        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            futs = [
                pool.submit(run_range, lo, min(lo + chunk, n_trials))
                for lo in range(0, n_trials, chunk)
            ]
            for f in futs:
                f.result()

    return AggregateReport(
        params=params,
        master_seed=master_seed,
        n_trials=n_trials,
        outcomes=outcomes,
        durations=durations,
        attack_blocks=blocks,
        corruption=corruption,
        epsilon_paid=eps_paid,
    )


def _generic_trial(params, population, table, strategies, master_seed, trial_index):
    """run_trial body with the stream keyed by (master_seed, trial_index)."""
    cum = _cumulative_shares(population)
    rng = trial_generator(master_seed, trial_index)
    T, R = params.horizon_T, params.reward_R
    l = params.initial_gap_l0
    gap_path, miners, payouts = [], [], []
    corr, blocks, eps = 0.0, 0, 0.0
    success = False
    for t in range(T):
        u = rng.random()
        miner = int(np.searchsorted(cum, u, side="right"))
        attack = strategies[miner].attacks(miner, GameState(t, l), table)
        if attack:
            c = float(table.payouts[t, l])
            if c == 0.0 and params.epsilon_payment > 0.0:
                eps += params.epsilon_payment
            corr += c
            blocks += 1
            payouts.append(R + c)
            l -= 1
        else:
            payouts.append(0.0)
            l += 1
        gap_path.append(l)
        miners.append(miner)
        if l == 0:
            success = True
            break
    return TrialRecord(
        gap_path=tuple(gap_path),
        miner_sequence=tuple(miners),
        payouts_paid=tuple(payouts),
        outcome=success,
        cost=CostReport(
            per_block_component=blocks * R, corruption_component=corr, success=success
        ),
        epsilon_paid=eps,
    )


@dataclass(frozen=True)
class QuantileEntry:
    label: str
    value: float
    flagged: bool  # True when the trial count cannot resolve this quantile


@dataclass(frozen=True)
class QuantileTable:
    entries: tuple[QuantileEntry, ...]
    max_observed: float

    def as_dict(self) -> dict[str, float]:
        d = {e.label: e.value for e in self.entries}
        d["max"] = self.max_observed
        return d


def cost_quantiles(report: AggregateReport) -> QuantileTable:
    """Empirical quantiles of total trial cost (p50/p90/p99/p999 and the max
    observed). Quantiles beyond p99 are flagged below 1000 trials."""
    totals = report.totals
    n = report.n_trials
    entries = []
    for label, q in (("p50", 0.5), ("p90", 0.9), ("p99", 0.99), ("p999", 0.999)):
        flagged = q > 0.99 and n < 1000
        entries.append(QuantileEntry(label, float(np.quantile(totals, q)), flagged))
    return QuantileTable(entries=tuple(entries), max_observed=float(totals.max()))


@dataclass(frozen=True)
class CoupledTrial:
    """One coupled pair: identical randomness, deviant participates in one
    run and defects in the other."""

    path_participate: np.ndarray
    path_defect: np.ndarray
    duration_participate: int
    duration_defect: int
    success_participate: bool
    success_defect: bool
    utility_participate: float
    utility_defect: float
    deviant_mined: np.ndarray  # per-step: did the deviant mine this block


@dataclass(frozen=True)
class DeviationReport:
    deviant: int
    deviant_share: float
    n_trials: int
    mean_equilibrium_utility: float
    mean_defection_utility: float
    mean_difference: float
    stderr_difference: float
    flip_probability: float


def deviation_trial(
    params: AttackParams,
    population: MinerPopulation,
    table: ValueTable,
    deviant: int,
    master_seed: int,
    trial_index: int,
) -> CoupledTrial:
    n_h = len(population.honest_powers)
    if deviant < n_h:
        raise DomainError("deviant must be a non-committed miner")
    cum = _cumulative_shares(population)
    lo = cum[deviant - 1] if deviant > 0 else 0.0
    hi = cum[deviant]
    share = hi - lo
    if share > params.gamma + 1e-15:
        raise DomainError("deviant share exceeds gamma")
    honest_cut = float(np.sum(population.honest_powers))
    stake = params.phi * share * params.reward_R
    T, l0 = params.horizon_T, params.initial_gap_l0

    u = trial_generator(master_seed, trial_index).random(T)
    mined_by_dev = (u >= lo) & (u < hi)
    up_p = u < honest_cut
    up_d = up_p | mined_by_dev  # deviant defends instead of attacking

    path_p, dur_p, succ_p = _walk(l0, up_p)
    path_d, dur_d, succ_d = _walk(l0, up_d)

    # deviant's corruption payouts along the participate run
    gap_before = np.concatenate(([l0], path_p[: dur_p - 1]))
    idx = np.nonzero(mined_by_dev[:dur_p])[0]
    util_p = float(table.payouts[idx, gap_before[idx]].sum())
    if not succ_p:
        util_p += stake
    util_d = 0.0 if succ_d else stake

    return CoupledTrial(
        path_participate=path_p[:dur_p],
        path_defect=path_d[:dur_d],
        duration_participate=dur_p,
        duration_defect=dur_d,
        success_participate=succ_p,
        success_defect=succ_d,
        utility_participate=util_p,
        utility_defect=util_d,
        deviant_mined=mined_by_dev,
    )


def deviation_experiment(
    params: AttackParams,
    population: MinerPopulation,
    table: ValueTable,
    deviant: int,
    master_seed: int,
    n_trials: int,
) -> DeviationReport:
    """Coupled comparison of EquilibriumAttack vs DefectAlways for one miner,
    all other randomness held fixed. Reports the mean utility difference and
    the empirical probability that the deviant's participation flips the
    attack from failure to success."""
    if n_trials < 1:
        raise ValidationError("n_trials must be >= 1")
    util_p = np.zeros(n_trials)
    util_d = np.zeros(n_trials)
    flips = np.zeros(n_trials, dtype=bool)
    cum = _cumulative_shares(population)
    share = cum[deviant] - (cum[deviant - 1] if deviant > 0 else 0.0)
    for i in range(n_trials):
        ct = deviation_trial(params, population, table, deviant, master_seed, i)
        util_p[i] = ct.utility_participate
        util_d[i] = ct.utility_defect
        flips[i] = ct.success_participate and not ct.success_defect
    diff = util_p - util_d
    stderr = float(diff.std(ddof=1) / np.sqrt(n_trials)) if n_trials > 1 else 0.0
    return DeviationReport(
        deviant=deviant,
        deviant_share=float(share),
        n_trials=n_trials,
        mean_equilibrium_utility=float(util_p.mean()),
        mean_defection_utility=float(util_d.mean()),
        mean_difference=float(diff.mean()),
        stderr_difference=stderr,
        flip_probability=float(flips.mean()),
    )
