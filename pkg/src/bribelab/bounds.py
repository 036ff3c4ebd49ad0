"""Closed-form costs and concentration bounds, as pure functions.

Each bound carries its hypotheses: functions whose formulas require the
supercritical drift condition 1 - 2*g_def - 2*gamma > 0 (or another
precondition) return a BoundResult with a validity flag instead of a bare
number, so parameter sweeps never abort mid-run and never silently emit a
value outside a bound's domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import AttackParams, DomainError, MinerPopulation


@dataclass(frozen=True)
class BoundResult:
    value: float | None
    valid: bool
    hypothesis_note: str = ""

    def require(self) -> float:
        if not self.valid or self.value is None:
            raise DomainError(f"bound not valid here: {self.hypothesis_note}")
        return self.value


def budish_total_cost(T: int, phi: float, R: float = 1.0) -> float:
    """Total bribe needed to pay every miner their full expected loss from
    attack success: (T + phi) * R."""
    return (T + phi) * R


def budish_miner_cost(T: int, phi: float, power_share: float, R: float = 1.0) -> float:
    """Per-miner Budish payment (T + phi) * p * R."""
    return (T + phi) * power_share * R


def participation_loss_bound(u: float, U: float, epsilon: float) -> float:
    """Expected loss of a miner who participates, given sure-outcome loss u
    and devaluation loss U flipped with probability at most epsilon: u + eps*U."""
    if u < 0 or U < 0:
        raise DomainError("losses must be non-negative")
    if not (0.0 <= epsilon <= 1.0):
        raise DomainError("epsilon must lie in [0, 1]")
    return u + epsilon * U


def thresholding_cost(T: int, f_max: float, phi: float, R: float = 1.0) -> float:
    """Total cost of the flat thresholding attack: (T + f_max * phi) * R."""
    if not (0.0 <= f_max <= 1.0):
        raise DomainError("f_max must lie in [0, 1]")
    return (T + f_max * phi) * R


def thresholding_miner_cost(
    T: int, f_max: float, phi: float, power_share: float, R: float = 1.0
) -> float:
    return (T + f_max * phi) * power_share * R


def select_fmax(
    population: MinerPopulation, pflip, coverage_target: float
) -> BoundResult:
    """Minimal flip-probability threshold f such that miners with
    pflip(share) <= f jointly hold at least coverage_target of the power.
    pflip must be monotone non-decreasing in the share."""
    if not coverage_target > 0.5:
        raise DomainError("coverage_target must exceed 1/2")
    shares = sorted(population.noncommitted_powers)
    covered = 0.0
    for s in shares:
        covered += s
        if covered >= coverage_target - 1e-15:
            return BoundResult(value=float(pflip(s)), valid=True)
    return BoundResult(
        value=None,
        valid=False,
        hypothesis_note=(
            f"non-committed power {covered:.6g} cannot reach coverage "
            f"{coverage_target:.6g} even with f = 1"
        ),
    )


def expected_stopping_time_bound(l0: int, g_def: float) -> float:
    """Expected stopping time of the downward-biased gap walk: l0/(1-2*g_def)."""
    if g_def >= 0.5:
        raise DomainError("expected stopping time requires g_def < 1/2")
    return l0 / (1.0 - 2.0 * g_def)


def success_lower_bound(params: AttackParams) -> BoundResult:
    """Hoeffding lower bound on attack success probability:
    1 - exp(-(l0 - T*(1-2*g_def))^2 / (2T)), valid for T > l0/(1-2*g_def)."""
    T, l0, g = params.horizon_T, params.initial_gap_l0, params.g_def
    if g >= 0.5 or T <= l0 / (1.0 - 2.0 * g):
        return BoundResult(
            value=None, valid=False, hypothesis_note="requires T > l0/(1-2*g_def)"
        )
    fail = math.exp(-((l0 - T * (1.0 - 2.0 * g)) ** 2) / (2.0 * T))
    return BoundResult(value=max(0.0, 1.0 - fail), valid=True)


def lemma2_bound(tau_minus_t: int, g_def: float, gamma: float) -> float:
    """Bound on the probability that the participation-rate walk sits in
    {1, 2} after tau - t steps: (1/sqrt(tau-t)) * (1-g-gamma)^(5/2) /
    (sqrt(2*pi) * (g+gamma)^(7/2)), clamped to 1."""
    if tau_minus_t < 1:
        raise DomainError("lemma2_bound requires tau - t >= 1 (use the trivial bound 1)")
    q = g_def + gamma
    if not (0.0 < q < 1.0):
        raise DomainError("g_def + gamma must lie in (0, 1)")
    raw = (1.0 - q) ** 2.5 / (math.sqrt(2.0 * math.pi) * q**3.5) / math.sqrt(tau_minus_t)
    return min(raw, 1.0)


def lemma3_bound(T_minus_tau: int, g_def: float, gamma: float) -> BoundResult:
    """Bound on the probability that the minimum of the remaining walk is
    attained now: exp(-(T-tau) * (1-2*g_def-2*gamma)^2 / 2)."""
    if T_minus_tau < 0:
        raise DomainError("T - tau must be non-negative")
    drift = 1.0 - 2.0 * g_def - 2.0 * gamma
    if drift <= 0.0:
        return BoundResult(
            value=None, valid=False, hypothesis_note="requires g_def + gamma < 1/2"
        )
    return BoundResult(value=math.exp(-0.5 * T_minus_tau * drift**2), valid=True)


def lemma4_bound(a: float, t: int, T: int) -> float:
    """Bound on sum_{i=t..T} exp(-a*(T-i)) / max(sqrt(i-t), 1) for 0 < a <= 1.

    Splitting the sum at k = ceil(T - 2*ln(1+sqrt(n))/a + 1), n = T+1-t,
    gives min(exp(a)/(1+sqrt(n)) + 1/((1-exp(-a))*sqrt(n - 2*ln(1+sqrt(n))/a)),
    1 + 1/(1-exp(-a))); the first branch is dropped when its radicand is
    non-positive."""
    if not (0.0 < a <= 1.0):
        raise DomainError("lemma4_bound requires 0 < a <= 1")
    if T < t:
        raise DomainError("lemma4_bound requires T >= t")
    n = T + 1 - t
    tail = 1.0 + 1.0 / (1.0 - math.exp(-a))
    radicand = n - 2.0 * math.log(1.0 + math.sqrt(n)) / a
    if radicand <= 0.0:
        return tail
    head = math.exp(a) / (1.0 + math.sqrt(n))
    geo = 1.0 / ((1.0 - math.exp(-a)) * math.sqrt(radicand))
    return min(head + geo, tail)


def thm4_worst_case_bound(params: AttackParams) -> BoundResult:
    """Closed-form bound on worst-case total attack cost:
    T*R + phi*gamma*R * [4*ln(1+sqrt(T))/(1-2g-2gamma)
                         + sqrt(2/pi)*(1-g-gamma)^(5/2)/(g+gamma)^(7/2)*2*sqrt(T)]."""
    T, g, gamma = params.horizon_T, params.g_def, params.gamma
    drift = 1.0 - 2.0 * g - 2.0 * gamma
    if drift <= 0.0:
        return BoundResult(
            value=None, valid=False, hypothesis_note="requires g_def + gamma < 1/2"
        )
    q = g + gamma
    bracket = 4.0 * math.log(1.0 + math.sqrt(T)) / drift + math.sqrt(2.0 / math.pi) * (
        1.0 - q
    ) ** 2.5 / q**3.5 * 2.0 * math.sqrt(T)
    value = T * params.reward_R + params.phi_gamma_R * bracket
    return BoundResult(value=value, valid=True)


def thm5_expected_cost_bound(params: AttackParams) -> BoundResult:
    """Closed-form bound on expected total attack cost:
    R*(l0/2 + l0/(2*(1-2g))) + phi*gamma*R * T *
    exp(-((1-2g-2gamma)^2*T/2 - (1-2g)*l0)/2). Flagged vacuous when the
    corruption term exceeds the trivial T*phi*gamma*R."""
    T, l0, g, gamma = (
        params.horizon_T,
        params.initial_gap_l0,
        params.g_def,
        params.gamma,
    )
    drift = 1.0 - 2.0 * g - 2.0 * gamma
    if drift <= 0.0:
        return BoundResult(
            value=None, valid=False, hypothesis_note="requires g_def + gamma < 1/2"
        )
    exponent = -0.5 * (drift**2 * T / 2.0 - (1.0 - 2.0 * g) * l0)
    per_block = params.reward_R * (l0 / 2.0 + 0.5 * l0 / (1.0 - 2.0 * g))
    corruption = params.phi_gamma_R * T * math.exp(exponent)
    note = "vacuous regime" if exponent >= 0.0 else ""
    return BoundResult(value=per_block + corruption, valid=True, hypothesis_note=note)
