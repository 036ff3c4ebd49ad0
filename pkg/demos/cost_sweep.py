"""Reproduce the cost-vs-horizon curve.

Sweeping the horizon T at l0=150, gamma=0.05, g_def=0.4 shows the
characteristic shape: corruption cost peaks where attack success is most
uncertain (participation is most pivotal there) and then decays rapidly as
success becomes certain, while success probability rises monotonically.

Run with an output path to also save the figure:
    python demos/cost_sweep.py sweep.svg
"""
import sys

from bribelab.cli import SWEEP_BASELINE, sweep_rows

grid = list(range(200, 1300, 100)) + [1400, 1700, 2000, 2500, 3000, 4000, 5000]
rows = sweep_rows("T", grid, SWEEP_BASELINE)

print(f"{'T':>6} {'success':>12} {'corruption (R)':>16} {'total (R)':>12}")
for r in rows:
    print(f"{r['T']:>6} {r['success_probability']:>12.6f}"
          f" {r['expected_corruption_cost']:>16.4f}"
          f" {r['expected_total_cost']:>12.2f}")

peak = max(rows, key=lambda r: r["expected_corruption_cost"])
last = rows[-1]
print(f"\npeak corruption cost at T={peak['T']}"
      f" ({peak['expected_corruption_cost']:.1f} R);"
      f" decays {peak['expected_corruption_cost'] / last['expected_corruption_cost']:.2e}x"
      f" by T={last['T']}")

if len(sys.argv) > 1:
    from bribelab.cli import _sweep_svg

    _sweep_svg(rows, "T", sys.argv[1])
    print(f"figure written to {sys.argv[1]}")
