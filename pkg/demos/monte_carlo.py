"""Seeded simulation against the exact dynamic program.

Runs 100k reproducible trials of case study B under the equilibrium
strategy profile and compares the empirical success rate, mean cost, and
mean duration against the exact forward DP. Also prints the tail of the
empirical cost distribution, which the analytic expectation hides.
"""
import math

from bribelab import (
    AttackParams,
    EquilibriumAttack,
    HonestAlways,
    MinerPopulation,
    build_value_table,
    cost_quantiles,
    expected_cost,
    expected_duration,
    run_trials,
    success_probability,
    worst_case_cost,
)

params = AttackParams(horizon_T=400, initial_gap_l0=150, gamma=0.03,
                      g_def=0.2, phi=158000.0)
population = MinerPopulation.default_for(params)
table = build_value_table(params)
strategies = [HonestAlways()] * len(population.honest_powers) + [
    EquilibriumAttack()
] * len(population.noncommitted_powers)

n = 100_000
agg = run_trials(params, population, table, strategies, master_seed=2024,
                 n_trials=n)

exact = expected_cost(params, table)
p = success_probability(params)
se_p = math.sqrt(p * (1 - p) / n)
print(f"success rate   sim {agg.success_rate:.6f}   exact {p:.6f}"
      f"   ({abs(agg.success_rate - p) / max(se_p, 1e-300):.2f} sigma)")
print(f"mean cost (R)  sim {agg.mean_total:.3f} +/- {agg.stderr_total:.3f}"
      f"   exact {exact.total:.3f}")
print(f"mean duration  sim {agg.mean_duration:.2f}"
      f"   exact {expected_duration(params):.2f}")

print("\ncost distribution (R):")
q = cost_quantiles(agg)
for entry in q.entries:
    flag = "  (under-resolved)" if entry.flagged else ""
    print(f"  {entry.label:>4}  {entry.value:10.3f}{flag}")
print(f"   max  {q.max_observed:10.3f}"
      f"   (analytic worst case {worst_case_cost(params, table).total:.3f})")
