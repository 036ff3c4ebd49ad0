"""Backward induction for the attack value table.

The table holds the threshold-miner value function over (t, l) together with
the per-state corruption payout schedule: the payout for mining an attacking
block out of state (t, l) is the discrete l-derivative of the next layer,
c_{t,l} = w(t+1, l+1) - w(t+1, l-1). Under this schedule universal
participation by all sub-threshold miners is the unique subgame perfect
equilibrium; `audit_equilibrium` checks the incentive inequalities
numerically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import AttackParams, DomainError, GameState, alive_mask


@dataclass(frozen=True)
class ValueTable:
    """wmax[t, l] for t in 0..T, l in 0..width; payouts[t, l] = c_{t,l} for
    t in 0..T-1, l in 1..width. Immutable after construction."""

    params: AttackParams
    wmax: np.ndarray
    payouts: np.ndarray

    def __post_init__(self):
        self.wmax.setflags(write=False)
        self.payouts.setflags(write=False)

    @property
    def width(self) -> int:
        return self.wmax.shape[1] - 1

    def wmax_at(self, t: int, l: int) -> float:
        T = self.params.horizon_T
        if not (0 <= t <= T):
            raise DomainError(f"timestep {t} outside 0..{T}")
        if l < 0:
            raise DomainError("gap must be non-negative")
        if l > self.width:
            # beyond the stored rectangle the walk cannot reach 0 in time
            return self.params.phi_gamma_R
        return float(self.wmax[t, l])

    def payout_at(self, t_minus_1: int, l: int) -> float:
        """c_{t-1,l}: the payout for the attacking block mined going out of
        state (t-1, l). Adds epsilon_payment when the base payout is zero."""
        T = self.params.horizon_T
        if not (0 <= t_minus_1 <= T - 1):
            raise DomainError(f"payout index t-1={t_minus_1} outside 0..{T - 1}")
        if l < 1:
            raise DomainError("payouts are defined only for gap l >= 1")
        base = 0.0 if l > self.width else float(self.payouts[t_minus_1, l])
        if base == 0.0 and self.params.epsilon_payment > 0.0:
            return self.params.epsilon_payment
        return base


def build_value_table(params: AttackParams) -> ValueTable:
    """Solve the three-case recursion exactly over the full rectangle
    t in [0, T], l in [0, l0 + T + 1], so payouts at both parities are
    queryable. The interior step is the convex combination
    (g_def + gamma) * w(t+1, l+1) + (1 - g_def - gamma) * w(t+1, l-1).
    """
    T = params.horizon_T
    L = params.initial_gap_l0 + T + 1
    top = params.phi_gamma_R
    q = params.g_def + params.gamma

    wmax = np.empty((T + 1, L + 1))
    wmax[:, 0] = 0.0
    wmax[T, 1:] = top
    for t in range(T - 1, -1, -1):
        nxt = np.append(wmax[t + 1], top)  # l = L+1 cannot hit 0 within T steps
        wmax[t, 1:] = q * nxt[2 : L + 2] + (1.0 - q) * nxt[0:L]

    payouts = np.zeros((max(T, 1), L + 1))
    for t in range(T):
        nxt = np.append(wmax[t + 1], top)
        payouts[t, 1:] = nxt[2 : L + 2] - nxt[0:L]
    payouts[:, 0] = np.nan  # undefined: w(t, -1) does not exist
    return ValueTable(params=params, wmax=wmax, payouts=payouts)


def payout_at(table: ValueTable, t_minus_1: int, l: int) -> float:
    return table.payout_at(t_minus_1, l)


def miner_value_table(table: ValueTable, power_share: float) -> np.ndarray:
    """Value table w(t, l) of an individual non-committed miner of the given
    power share, computed by its own recursion (boundary phi*p*R; interior
    g_def * w(t+1,l+1) + (1-g_def) * w(t+1,l-1) + p * c_{t,l}), not via the
    (p/gamma)-scaling identity, so the identity stays testable."""
    params = table.params
    if not (0.0 <= power_share <= params.gamma + 1e-15):
        raise DomainError(
            f"power_share {power_share!r} outside [0, gamma={params.gamma!r}]"
        )
    T, L = params.horizon_T, table.width
    p = power_share
    g = params.g_def
    stake = params.phi * p * params.reward_R

    wm = np.empty((T + 1, L + 1))
    wm[:, 0] = 0.0
    wm[T, 1:] = stake
    for t in range(T - 1, -1, -1):
        # above the rectangle the gap cannot close and all future c are 0
        nxt = np.append(wm[t + 1], stake)
        wm[t, 1:] = g * nxt[2 : L + 2] + (1.0 - g) * nxt[0:L] + p * table.payouts[t, 1:]
    return wm


def miner_value(table: ValueTable, power_share: float, state: GameState) -> float:
    wm = miner_value_table(table, power_share)
    t, l = state
    if not (0 <= t <= table.params.horizon_T) or l < 0:
        raise DomainError(f"state {state} outside the table")
    if l > table.width:
        return table.params.phi * power_share * table.params.reward_R
    return float(wm[t, l])


@dataclass(frozen=True)
class EquilibriumAudit:
    """Result of the participation-incentive audit.

    max_violation is the largest value of
        (w(t, l+1; m) - w(t, l-1; m)) - c_{t-1, l}
    over reachable interior states and the power grid; non-positive (up to
    rounding) means no miner ever prefers defending. max_gamma_slack is the
    absolute slack at p = gamma, where the inequality is tight by design.
    """

    power_grid: tuple[float, ...]
    max_violation: float
    max_gamma_slack: float
    pivotal_ok: bool
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance and self.pivotal_ok


def audit_equilibrium(table: ValueTable, power_grid) -> EquilibriumAudit:
    params = table.params
    T, L = params.horizon_T, table.width
    grid = tuple(float(p) for p in power_grid)
    for p in grid:
        if p > params.gamma + 1e-15:
            raise DomainError(f"power grid entry {p!r} exceeds gamma")

    # decision states: (t-1, l) alive-reachable with l >= 1, step into t
    mask = alive_mask(params, width=L)
    decision = mask[:T, :]  # rows t-1 = 0..T-1
    stake_top = params.phi_gamma_R

    max_violation = -np.inf
    max_gamma_slack = 0.0
    pivotal_ok = True
    for p in grid:
        wm = miner_value_table(table, p)
        padded = np.concatenate([wm[1:], np.full((T, 1), params.phi * p * params.reward_R)], axis=1)
        marginal = padded[:, 2 : L + 2] - wm[1:, 0:L]  # w(t,l+1) - w(t,l-1), l=1..L
        viol = marginal - table.payouts[:T, 1 : L + 1]
        sel = decision[:, 1 : L + 1]
        if sel.any():
            worst = float(viol[sel].max())
            max_violation = max(max_violation, worst)
            if p == params.gamma:
                max_gamma_slack = float(np.abs(viol[sel]).max())
        # pivotal final step: payout phi*gamma*R must beat the miner's stake
        # (checked only for shares strictly below gamma beyond rounding)
        if p < params.gamma * (1.0 - 1e-9):
            if not stake_top > params.phi * p * params.reward_R:
                pivotal_ok = False
    if not np.isfinite(max_violation):
        max_violation = 0.0
    return EquilibriumAudit(
        power_grid=grid,
        max_violation=max_violation,
        max_gamma_slack=max_gamma_slack,
        pivotal_ok=pivotal_ok,
        tolerance=1e-12 * stake_top,
    )
