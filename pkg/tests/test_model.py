import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from bribelab import (
    AttackParams,
    ConfigError,
    CostReport,
    MinerPopulation,
    ValidationError,
    load_config,
    parse_config,
    reachable_states,
    walk_states,
)
from oracles import enum_attack_walk


class TestAttackParams:
    def test_case_study_params_valid_and_supercritical(self):
        p = AttackParams(horizon_T=2500, initial_gap_l0=150, gamma=0.05,
                         g_def=0.4, phi=158000.0)
        assert p.supercritical
        assert p.phi_gamma_R == pytest.approx(7900.0)

    def test_boundary_of_drift_assumption_not_supercritical(self):
        p = AttackParams(horizon_T=1, initial_gap_l0=1, gamma=0.5, g_def=0.5, phi=1.0)
        assert not p.supercritical

    @pytest.mark.parametrize(
        "kwargs,field",
        [
            (dict(horizon_T=0), "horizon_T"),
            (dict(initial_gap_l0=0), "initial_gap_l0"),
            (dict(gamma=0.0), "gamma"),
            (dict(gamma=1.0), "gamma"),
            (dict(g_def=-0.1), "g_def"),
            (dict(g_def=1.0), "g_def"),
            (dict(phi=0.0), "phi"),
            (dict(reward_R=0.0), "reward_R"),
            (dict(epsilon_payment=-1.0), "epsilon_payment"),
        ],
    )
    def test_invariant_violations_name_the_field(self, kwargs, field):
        base = dict(horizon_T=10, initial_gap_l0=2, gamma=0.1, g_def=0.3, phi=100.0)
        base.update(kwargs)
        with pytest.raises(ValidationError, match=field):
            AttackParams(**base)


class TestConfig:
    def test_case_study_document(self):
        doc = {"T": 2500, "l0": 150, "gamma": 0.05, "g_def": 0.4, "phi": 158000}
        params, pop = load_config(doc)
        assert params.supercritical
        assert params.reward_R == 1.0 and params.epsilon_payment == 0.0
        assert abs(sum(pop.honest_powers) + sum(pop.noncommitted_powers) - 1.0) <= 1e-12

    def test_default_population_split(self):
        # ceil(0.6 / 0.05) = 12 equal non-committed miners of share 0.05
        doc = {"T": 10, "l0": 2, "gamma": 0.05, "g_def": 0.4, "phi": 10.0}
        _, pop = load_config(doc)
        assert pop.honest_powers == (0.4,)
        assert len(pop.noncommitted_powers) == 12
        assert all(abs(s - 0.05) < 1e-12 for s in pop.noncommitted_powers)

    def test_json_text_and_unknown_keys(self):
        text = json.dumps({"T": 5, "l0": 1, "gamma": 0.2, "g_def": 0.1,
                           "phi": 3.0, "bogus": 1})
        with pytest.raises(ConfigError, match="bogus"):
            load_config(text)

    def test_missing_keys(self):
        with pytest.raises(ConfigError, match="phi"):
            load_config({"T": 5, "l0": 1, "gamma": 0.2, "g_def": 0.1})

    def test_malformed_json(self):
        with pytest.raises(ConfigError, match="JSON"):
            load_config("{not json")

    def test_explicit_miners_checked_against_params(self):
        doc = {"T": 5, "l0": 1, "gamma": 0.2, "g_def": 0.5, "phi": 3.0,
               "miners": {"honest": [0.4], "noncommitted": [0.2, 0.2, 0.2]}}
        with pytest.raises(ValidationError, match="g_def"):
            load_config(doc)

    def test_miner_above_gamma_rejected(self):
        doc = {"T": 5, "l0": 1, "gamma": 0.2, "g_def": 0.5, "phi": 3.0,
               "miners": {"honest": [0.5], "noncommitted": [0.25, 0.25]}}
        with pytest.raises(ValidationError, match="gamma"):
            load_config(doc)

    def test_seed_key_accepted(self):
        cfg = parse_config({"T": 5, "l0": 1, "gamma": 0.2, "g_def": 0.1,
                            "phi": 3.0, "seed": 7})
        assert cfg.seed == 7

    @given(g_def=st.floats(0.0, 0.6), gamma=st.floats(0.01, 0.3))
    @settings(max_examples=60, deadline=None)
    def test_default_population_normalized(self, g_def, gamma):
        p = AttackParams(horizon_T=3, initial_gap_l0=1, gamma=gamma,
                         g_def=g_def, phi=1.0)
        pop = MinerPopulation.default_for(p)
        total = math.fsum(pop.honest_powers + pop.noncommitted_powers)
        assert abs(total - 1.0) <= 1e-12
        assert all(s <= gamma + 1e-12 for s in pop.noncommitted_powers)


class TestReachableStates:
    def test_two_step_walk(self):
        p = AttackParams(horizon_T=2, initial_gap_l0=1, gamma=0.05, g_def=0.4, phi=1.0)
        assert reachable_states(p) == {(0, 1), (1, 0), (1, 2), (2, 1), (2, 3)}

    def test_single_step(self):
        p = AttackParams(horizon_T=1, initial_gap_l0=1, gamma=0.05, g_def=0.4, phi=1.0)
        assert reachable_states(p) == {(0, 1), (1, 0), (1, 2)}

    def test_empty_game(self):
        assert walk_states(0, 3) == {(0, 3)}

    @pytest.mark.parametrize("T,l0", [(4, 1), (6, 3), (10, 2), (8, 5)])
    def test_parity_and_cone(self, T, l0):
        for t, l in walk_states(T, l0):
            assert l >= 0
            assert abs(l - l0) <= t
            assert (l + l0 + t) % 2 == 0

    @pytest.mark.parametrize("T,l0,g", [(6, 2, 0.3), (8, 1, 0.5), (10, 4, 0.2)])
    def test_every_state_visited_with_positive_probability(self, T, l0, g):
        # collect states actually visited by the enumerated outcome tree
        visited = set()

        def rec(t, l):
            visited.add((t, l))
            if l == 0 or t == T:
                return
            rec(t + 1, l - 1)
            rec(t + 1, l + 1)

        rec(0, l0)
        assert visited == walk_states(T, l0)


class TestCostReport:
    def test_total_is_exact_sum(self):
        r = CostReport(per_block_component=1.25, corruption_component=3.5)
        assert r.total == 1.25 + 3.5

    def test_negative_components_rejected(self):
        with pytest.raises(ValidationError):
            CostReport(per_block_component=-1.0, corruption_component=0.0)


def test_enumeration_smoke_against_oracle():
    # the walk-tree oracle agrees with first principles on a hand case
    res = enum_attack_walk(2, 1, 0.4)
    assert res["success"] == pytest.approx(0.6)
    assert res["duration"] == pytest.approx(1.4)
