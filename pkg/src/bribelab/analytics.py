"""Exact forward dynamic programming over the absorbing attack walk.

Under universal participation the gap decreases with probability 1 - g_def
and increases with probability g_def each step; the attack succeeds at the
first time the gap hits zero. Everything here is exact (64-bit) DP: success
and failure probabilities, expected duration, expected cost decomposed into
per-block reimbursement and corruption payouts, and best/worst-case costs
over positive-probability trajectories via min/max DP.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import AttackParams, CostReport, DomainError
from .values import ValueTable

# probabilities below this are flushed to zero in the forward pass; the
# induced absolute error is bounded by T * width * FLUSH, far below 1e-12
FLUSH = 1e-300


@dataclass(frozen=True)
class ForwardMass:
    """alive[t, l]: probability mass of unabsorbed paths at (t, l);
    absorbed_at[t]: probability that the first hit of 0 is exactly step t."""

    params: AttackParams
    up_prob: float
    alive: np.ndarray
    absorbed_at: np.ndarray

    def __post_init__(self):
        self.alive.setflags(write=False)
        self.absorbed_at.setflags(write=False)

    @property
    def success(self) -> float:
        return float(self.absorbed_at.sum())

    @property
    def failure(self) -> float:
        # accumulated directly from surviving mass, never as 1 - success,
        # so values near 1 keep full absolute precision
        return float(self.alive[-1].sum())


def forward_mass(params: AttackParams, up_prob: float | None = None) -> ForwardMass:
    T, l0 = params.horizon_T, params.initial_gap_l0
    p_up = params.g_def if up_prob is None else float(up_prob)
    if not (0.0 <= p_up < 1.0):
        raise DomainError("up probability must lie in [0, 1)")
    p_down = 1.0 - p_up
    L = l0 + T

    alive = np.zeros((T + 1, L + 1))
    absorbed_at = np.zeros(T + 1)
    alive[0, l0] = 1.0
    for t in range(T):
        cur = alive[t]
        nxt = alive[t + 1]
        nxt[2 : L + 1] += cur[1:L] * p_up
        nxt[1:L] += cur[2 : L + 1] * p_down
        absorbed_at[t + 1] = cur[1] * p_down
        nxt[nxt < FLUSH] = 0.0
    return ForwardMass(params=params, up_prob=p_up, alive=alive, absorbed_at=absorbed_at)


def success_probability(params: AttackParams) -> float:
    return forward_mass(params).success


def failure_probability(params: AttackParams) -> float:
    return forward_mass(params).failure


def expected_duration(params: AttackParams) -> float:
    """Exact expectation of min(first-hit time of 0, T) in blocks."""
    fm = forward_mass(params)
    T = params.horizon_T
    return float(np.dot(np.arange(T + 1), fm.absorbed_at) + T * fm.failure)


def expected_attack_blocks(params: AttackParams) -> float:
    """Expected number of attacking blocks mined before absorption/horizon.
    Counted directly during the DP (each alive step mines an attacking block
    with probability 1 - g_def), avoiding parity bookkeeping."""
    fm = forward_mass(params)
    return float(fm.alive[:-1].sum() * (1.0 - params.g_def))


def expected_cost(params: AttackParams, table: ValueTable) -> CostReport:
    """Exact expected attack cost under equilibrium play, decomposed into
    the per-block R reimbursement and the corruption payouts c."""
    fm = forward_mass(params)
    T = params.horizon_T
    L = fm.alive.shape[1] - 1
    p_att = 1.0 - params.g_def
    c = table.payouts[:T, : L + 1]
    corruption = float((fm.alive[:-1, 1:] * c[:, 1:]).sum() * p_att)
    blocks = float(fm.alive[:-1].sum() * p_att)
    return CostReport(
        per_block_component=blocks * params.reward_R,
        corruption_component=corruption,
        success_probability=fm.success,
    )


def _extreme_cost(params: AttackParams, table: ValueTable, maximize: bool) -> CostReport:
    """Min/max corruption over positive-probability trajectories by backward
    DP, tracking the attacking-block count along the arg-extreme path."""
    T, l0 = params.horizon_T, params.initial_gap_l0
    L = l0 + T
    c = table.payouts
    defend_feasible = params.g_def > 0.0

    val = np.zeros(L + 2)  # index l = 0..L+1; layer T
    blocks = np.zeros(L + 2)
    for t in range(T - 1, -1, -1):
        att_cont = val.copy()
        att_cont[0] = 0.0  # hitting 0 is terminal
        att_blocks = blocks.copy()
        att_blocks[0] = 0.0
        attack = c[t, 1 : L + 1] + att_cont[0:L]
        attack_b = 1.0 + att_blocks[0:L]
        if defend_feasible:
            defend = val[2 : L + 2]
            defend_b = blocks[2 : L + 2]
            if maximize:
                take_attack = attack >= defend
            else:
                take_attack = attack <= defend
            new_val = np.where(take_attack, attack, defend)
            new_blocks = np.where(take_attack, attack_b, defend_b)
        else:
            new_val, new_blocks = attack, attack_b
        val = np.concatenate([[0.0], new_val, [0.0]])
        blocks = np.concatenate([[0.0], new_blocks, [0.0]])
        # cells above l0 + t are unreachable from the start; their values are
        # never consulted along queried recursion paths
    return CostReport(
        per_block_component=float(blocks[l0]) * params.reward_R,
        corruption_component=float(val[l0]),
    )


def worst_case_cost(params: AttackParams, table: ValueTable) -> CostReport:
    return _extreme_cost(params, table, maximize=True)


def best_case_cost(params: AttackParams, table: ValueTable) -> CostReport:
    return _extreme_cost(params, table, maximize=False)


def pooled_smoothing_cost(params: AttackParams, base: CostReport) -> CostReport:
    """Payout-smoothing variant: the defending-chain payout is duplicated and
    split across the pool proportional to power, doubling the per-block
    component while leaving the corruption payouts unchanged."""
    return CostReport(
        per_block_component=2.0 * base.per_block_component,
        corruption_component=base.corruption_component,
        success=base.success,
        success_probability=base.success_probability,
    )
