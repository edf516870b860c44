"""End-to-end tour of the command-line interface on NPY tensors.

Creates a probability tensor, predicts masks, evaluates them against a
sampled ground truth, and times the scoring algorithms — exactly what the
installed `rankseg` console script does, driven in-process here so the demo
is self-contained.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from rankseg import sample_mask, write_npy
from rankseg.cli import main

work = Path(tempfile.mkdtemp(prefix="rankseg_demo_"))
rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([6])))

probs = rng.uniform(0.0, 1.0, (32, 32))
write_npy(work / "probs.npy", probs)

print("$ rankseg predict probs.npy --out mask.npy")
main(["predict", str(work / "probs.npy"), "--out", str(work / "mask.npy")])
meta = json.loads((work / "mask.npy.json").read_text())
print("  sidecar:", {k: meta[k] for k in ("tau_hat", "d0", "algorithm_used")})

gt = sample_mask(probs, rng)
write_npy(work / "gt.npy", gt.astype("|u1"))
print("\n$ rankseg eval --pred mask.npy --gt gt.npy")
main(["eval", "--pred", str(work / "mask.npy"), "--gt", str(work / "gt.npy")])

print("\n$ rankseg simulate example1 --decay step --beta 0.5 --rho 0.1 --reps 5")
main(["simulate", "example1", "--decay", "step", "--beta", "0.5",
      "--rho", "0.1", "--reps", "5"])

print("\n$ rankseg bench --sizes 1024,2048")
main(["bench", "--sizes", "1024,2048"])

print(f"\nartifacts left in {work}")
