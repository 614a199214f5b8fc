"""Miniature versions of the two benchmark experiments.

Both run from declarative manifests (the CLI consumes the same JSON
shape via `isinglearn nmin` / `isinglearn error-curve`). Everything is
seeded; rerunning reproduces the numbers except wall-clock columns.

Run: python3 demos/05_sample_complexity_experiments.py
"""

from isinglearn import (ExperimentManifest, loglog_slope, run_error_curve,
                        run_nmin_search, semilog_slope)

# How does the minimal sample size depend on coupling width? For a
# ferromagnet the curve is U-shaped: weak couplings hide below the
# noise floor, while very strong ones saturate the spins so single
# samples carry little information per edge. The monotone exponential
# growth shows up for spin glasses, where frustration compounds with
# width; the acceptance suite runs that version on the 4x4 glass.
nmin_manifest = ExperimentManifest(
    kind="nmin_vs_beta", seed=77, side=2, betas=(0.4, 0.8, 1.2),
    trials=5, n_start=250, rel_width=0.15,
)
rows = run_nmin_search(nmin_manifest)
print("minimal n for all-trials recovery, 2x2 ferromagnet:")
for r in rows:
    print(f"  width {r['param']:.1f}: n_min = {r['n_min']:>6d} "
          f"(resolved={r['success']}, {r['wall_seconds']:.1f}s)")
glass_manifest = ExperimentManifest(
    kind="nmin_vs_beta", seed=77, family="spin_glass", side=2,
    betas=(0.4, 0.8, 1.2), trials=5, n_start=250, rel_width=0.15,
)
rows = run_nmin_search(glass_manifest)
print("same sweep on a 2x2 spin glass:")
for r in rows:
    print(f"  width {r['param']:.1f}: n_min = {r['n_min']:>6d}")
widths = [r["param"] for r in rows]
print("spin-glass semilog slope:",
      round(semilog_slope(widths, [r["n_min"] for r in rows]), 2))

# How fast does the coupling error shrink with n? The estimator obeys
# a 1/sqrt(n) law once the penalty schedule kicks in.
error_manifest = ExperimentManifest(
    kind="error_vs_n", seed=78, side=2, beta=0.8,
    ns=(1000, 4000, 16000, 64000), trials=3,
)
rows = run_error_curve(error_manifest)
print("\nmean coupling error vs n, 2x2 ferromagnet:")
for r in rows:
    print(f"  n = {r['n']:>6d}: error = {r['mean_error']:.4f}")
ns = [r["n"] for r in rows]
slope = loglog_slope(ns, [r["mean_error"] for r in rows])
print(f"log-log slope: {slope:.3f} (ideal -0.5)")
