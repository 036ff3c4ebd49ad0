"""Core domain types: attack parameters, miner populations, game states.

All money is kept in multiples of the block reward R (R defaults to 1.0),
so every downstream quantity is homogeneous in R. Currency conversion is
presentation-layer only and never enters these types.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class ConfigError(ValueError):
    """A configuration document does not conform to the schema."""


class ValidationError(ValueError):
    """A domain invariant is violated; the message names the field."""


class DomainError(ValueError):
    """An operation was called outside its mathematical domain."""


class GameState(NamedTuple):
    """One node of the chain race: timestep t and gap l (defending minus
    attacking chain length). l == 0 is absorbing: the attack has succeeded."""

    t: int
    gap_l: int


@dataclass(frozen=True)
class AttackParams:
    horizon_T: int
    initial_gap_l0: int
    gamma: float
    g_def: float
    phi: float
    reward_R: float = 1.0
    epsilon_payment: float = 0.0

    def __post_init__(self):
        if not isinstance(self.horizon_T, int) or self.horizon_T < 1:
            raise ValidationError("horizon_T must be an integer >= 1")
        if not isinstance(self.initial_gap_l0, int) or self.initial_gap_l0 < 1:
            raise ValidationError("initial_gap_l0 must be an integer >= 1")
        if not (0.0 < self.gamma < 1.0):
            raise ValidationError("gamma must lie in (0, 1)")
        if not (0.0 <= self.g_def < 1.0):
            raise ValidationError("g_def must lie in [0, 1)")
        if not (self.phi > 0.0 and math.isfinite(self.phi)):
            raise ValidationError("phi must be a positive finite real")
        if not (self.reward_R > 0.0 and math.isfinite(self.reward_R)):
            raise ValidationError("reward_R must be a positive finite real")
        if self.epsilon_payment < 0.0:
            raise ValidationError("epsilon_payment must be non-negative")

    @property
    def supercritical(self) -> bool:
        """True when g_def + gamma < 1/2, the regime where the attacking walk
        drifts toward success and the concentration bounds apply."""
        return self.g_def + self.gamma < 0.5

    @property
    def phi_gamma_R(self) -> float:
        """The terminal stake of a threshold-size miner, phi*gamma*R.
        Every payout in the value table lies in [0, phi_gamma_R]."""
        return self.phi * self.gamma * self.reward_R


@dataclass(frozen=True)
class MinerPopulation:
    """Power shares partitioned into honest and non-committed miners.

    Shares are fractions of total power and must sum to 1. Non-committed
    shares must not exceed gamma: the payout rule does not incentivize
    larger miners, so they are assumed honest by construction.
    """

    honest_powers: tuple[float, ...]
    noncommitted_powers: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "honest_powers", tuple(float(p) for p in self.honest_powers))
        object.__setattr__(
            self, "noncommitted_powers", tuple(float(p) for p in self.noncommitted_powers)
        )
        for p in self.honest_powers + self.noncommitted_powers:
            if p < 0.0:
                raise ValidationError("power shares must be non-negative")
        total = math.fsum(self.honest_powers + self.noncommitted_powers)
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"power shares must sum to 1 (got {total!r})")

    @property
    def honest_total(self) -> float:
        return math.fsum(self.honest_powers)

    def validate_against(self, params: AttackParams) -> None:
        if abs(self.honest_total - params.g_def) > 1e-9:
            raise ValidationError(
                f"honest_powers sum {self.honest_total!r} does not match g_def {params.g_def!r}"
            )
        for p in self.noncommitted_powers:
            if p > params.gamma + 1e-15:
                raise ValidationError(
                    f"noncommitted share {p!r} exceeds gamma {params.gamma!r}"
                )

    @classmethod
    def default_for(cls, params: AttackParams) -> "MinerPopulation":
        """One honest bloc of share g_def plus the non-committed power split
        into ceil((1-g_def)/gamma) equal miners, each of share <= gamma."""
        rest = 1.0 - params.g_def
        n = max(1, math.ceil(rest / params.gamma - 1e-12))
        honest = (params.g_def,) if params.g_def > 0 else ()
        return cls(honest, tuple(rest / n for _ in range(n)))


@dataclass(frozen=True)
class CostReport:
    """Decomposition of attack cost: per-block reimbursement (R per attacking
    block) vs. corruption payouts (the c schedule). total is always the exact
    sum of the two, so both the including and excluding conventions are
    directly reportable."""

    per_block_component: float
    corruption_component: float
    success: bool | None = None
    success_probability: float | None = None

    def __post_init__(self):
        if self.per_block_component < 0 or self.corruption_component < 0:
            raise ValidationError("cost components must be non-negative")

    @property
    def total(self) -> float:
        return self.per_block_component + self.corruption_component


@dataclass(frozen=True)
class Config:
    params: AttackParams
    population: MinerPopulation
    seed: int = 0


_SCHEMA_KEYS = {"T", "l0", "gamma", "g_def", "phi", "reward", "epsilon", "seed", "miners"}
_REQUIRED_KEYS = {"T", "l0", "gamma", "g_def", "phi"}


def parse_config(doc) -> Config:
    """Parse a config document (dict, JSON text, path, or open file).

    Schema: T (int), l0 (int), gamma, g_def, phi (floats), optional reward
    (default 1.0), epsilon (default 0.0), seed (uint64, default 0), and
    optional miners = {"honest": [...], "noncommitted": [...]}. Unknown keys
    are rejected.
    """
    if isinstance(doc, dict):
        data = doc
    else:
        if hasattr(doc, "read"):
            text = doc.read()
        elif isinstance(doc, (str, os.PathLike)) and os.path.exists(doc):
            with open(doc, "r", encoding="utf-8") as fh:
                text = fh.read()
        elif isinstance(doc, str):
            text = doc
        else:
            raise ConfigError(f"cannot read config from {type(doc).__name__}")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config document must be a JSON object")

    unknown = set(data) - _SCHEMA_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = _REQUIRED_KEYS - set(data)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")

    def _int(key):
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"key {key!r} must be an integer")
        return v

    def _float(key, default=None):
        v = data.get(key, default)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"key {key!r} must be a number")
        return float(v)

    params = AttackParams(
        horizon_T=_int("T"),
        initial_gap_l0=_int("l0"),
        gamma=_float("gamma"),
        g_def=_float("g_def"),
        phi=_float("phi"),
        reward_R=_float("reward", 1.0),
        epsilon_payment=_float("epsilon", 0.0),
    )

    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not (0 <= seed < 2**64):
        raise ConfigError("key 'seed' must be an unsigned 64-bit integer")

    miners = data.get("miners")
    if miners is None:
        population = MinerPopulation.default_for(params)
    else:
        if not isinstance(miners, dict) or set(miners) - {"honest", "noncommitted"}:
            raise ConfigError("key 'miners' must be {'honest': [...], 'noncommitted': [...]}")
        population = MinerPopulation(
            tuple(miners.get("honest", ())), tuple(miners.get("noncommitted", ()))
        )
    population.validate_against(params)
    return Config(params=params, population=population, seed=seed)


def load_config(source) -> tuple[AttackParams, MinerPopulation]:
    cfg = parse_config(source)
    return cfg.params, cfg.population


def walk_states(T: int, l0: int) -> set[GameState]:
    """All states (t, l) reachable by the +/-1 gap walk started at (0, l0),
    treating l == 0 as absorbing (no expansion past a success)."""
    states = {GameState(0, l0)}
    frontier = {l0}
    for t in range(T):
        nxt = set()
        for l in frontier:
            if l == 0:
                continue  # absorbed; attack already succeeded
            nxt.add(l + 1)
            nxt.add(l - 1)
        states.update(GameState(t + 1, l) for l in nxt)
        frontier = nxt
    return states


def reachable_states(params: AttackParams) -> set[GameState]:
    return walk_states(params.horizon_T, params.initial_gap_l0)


def alive_mask(params: AttackParams, width: int | None = None) -> np.ndarray:
    """Boolean array of shape (T+1, width+1): mask[t, l] is True iff (t, l)
    is reachable and not yet absorbed (l >= 1, or the start state)."""
    T, l0 = params.horizon_T, params.initial_gap_l0
    L = l0 + T if width is None else width
    mask = np.zeros((T + 1, L + 1), dtype=bool)
    mask[0, l0] = True
    for t in range(T):
        cur = mask[t]
        nxt = mask[t + 1]
        # up from l-1, down from l+1; no expansion out of l == 0
        nxt[2 : L + 1] |= cur[1:L]
        nxt[1:L] |= cur[2 : L + 1]
        nxt[0] = False
    return mask
