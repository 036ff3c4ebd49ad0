"""Walk through the two headline case studies.

Both use phi = 158000 (the valuation multiplier) and l0 = 150 (a gap deep
enough that reorged transactions are long since considered final). Case A is
a long-horizon attack against strong committed defense; case B is a shorter
horizon against weaker defense. The striking output is how far the expected
bribe falls below the flat full-compensation cost (T + phi) * R.
"""
from bribelab import (
    AttackParams,
    budish_total_cost,
    build_value_table,
    expected_cost,
    expected_duration,
    failure_probability,
    success_lower_bound,
    worst_case_cost,
)

CASES = {
    "A (T=2500, g_def=0.40, gamma=0.05)": AttackParams(
        horizon_T=2500, initial_gap_l0=150, gamma=0.05, g_def=0.4, phi=158000.0
    ),
    "B (T=400, g_def=0.20, gamma=0.03)": AttackParams(
        horizon_T=400, initial_gap_l0=150, gamma=0.03, g_def=0.2, phi=158000.0
    ),
}

BTC_PER_BLOCK = 6.25

for label, params in CASES.items():
    table = build_value_table(params)
    exp = expected_cost(params, table)
    worst = worst_case_cost(params, table)
    budish = budish_total_cost(params.horizon_T, params.phi)
    hoeff = success_lower_bound(params)

    print(f"case {label}")
    print(f"  failure probability        {failure_probability(params):.3e}")
    if hoeff.valid:
        print(f"  Hoeffding success bound    >= {hoeff.value:.12f}")
    print(f"  expected duration          {expected_duration(params):.1f} blocks")
    print(f"  expected cost              {exp.total:.2f} R"
          f"  ({exp.per_block_component:.1f} per-block + "
          f"{exp.corruption_component:.2f} corruption)")
    print(f"  worst-case cost            {worst.total:.1f} R"
          f"  = {worst.total / params.phi:.4f} phi*R")
    print(f"  flat full compensation     {budish:.0f} R")
    print(f"  expected cost in BTC       {exp.total * BTC_PER_BLOCK:.0f}"
          f"  vs flat {budish * BTC_PER_BLOCK:.0f}")
    print()
