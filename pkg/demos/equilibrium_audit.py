"""Check that universal participation really is an equilibrium.

Two independent checks on a mid-sized instance:

1. The numerical audit: for each power share on a grid, the marginal loss a
   miner takes by attacking (w(t, l+1) - w(t, l-1)) never exceeds the payout
   c_{t-1,l} on any reachable decision state. At share = gamma the
   inequality is tight by construction.

2. A coupled Monte Carlo deviation experiment: one miner plays defect-always
   against everyone else participating, with all randomness shared between
   the paired runs. Participation should never lose in expectation, and the
   probability that this one miner's choice flips the attack outcome
   (P_flip) grows with their power share.
"""
from bribelab import (
    AttackParams,
    MinerPopulation,
    audit_equilibrium,
    build_value_table,
    deviation_experiment,
)

params = AttackParams(horizon_T=400, initial_gap_l0=50, gamma=0.05,
                      g_def=0.3, phi=1000.0)
table = build_value_table(params)

grid = [0.01, 0.02, 0.03, 0.04, 0.05]
audit = audit_equilibrium(table, grid)
print("equilibrium audit:", "PASS" if audit.passed else "FAIL")
print(f"  max violation     {audit.max_violation:.3e}  (tolerance {audit.tolerance:.3e})")
print(f"  slack at gamma    {audit.max_gamma_slack:.3e}")
print(f"  pivotal check     {audit.pivotal_ok}")
print()

print(f"{'share':>6} {'mean utility diff':>18} {'stderr':>10} {'P_flip':>8}")
for share in (0.01, 0.03, 0.05):
    rest = 1.0 - params.g_def - share
    n = round(rest / 0.05)
    pop = MinerPopulation((params.g_def,), (share,) + tuple(rest / n for _ in range(n)))
    rep = deviation_experiment(params, pop, table, deviant=1, master_seed=42,
                               n_trials=20000)
    print(f"{share:>6.2f} {rep.mean_difference:>18.4f}"
          f" {rep.stderr_difference:>10.4f} {rep.flip_probability:>8.4f}")
