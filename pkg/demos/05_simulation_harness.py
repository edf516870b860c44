"""Reproducible synthetic experiments comparing the two decision rules.

The first experiment draws probability maps from fixed decay patterns and
averages instance Dice over replicates; the second draws a different block
size for every image, so no single fixed threshold can win, while the ranked
volume search adapts per image.  All randomness is counter-based, so the
reports are bit-identical for a given seed regardless of thread count.
"""

from rankseg import DecaySpec, run_example1, run_example2

specs = [
    DecaySpec("step", beta=0.1, rho=0.1),
    DecaySpec("exponential", beta=1.05),
    DecaySpec("linear", beta=1.0),
]
report = run_example1(specs, replicates=30, seed=0, threads=4)
print("fixed decay patterns (30 replicates, 28x28):")
for row in report.rows:
    print(f"  {row.method:14s} {row.decay}({row.beta:g}): "
          f"{row.mean:.3f} +/- {row.stderr:.3f}")

print("\nheterogeneous block sizes (200 instances, 64x64):")
report2 = run_example2(n=200, seed=0, threads=4)
for row in report2.rows:
    print(f"  {row.method:14s} {row.mean:.3f} +/- {row.stderr:.3f}")
print("\nper-image best thresholds ranged over",
      sorted(set(report2.optimal_thresholds)))
print("-> a fixed cut point cannot match the adaptive volume search.")
