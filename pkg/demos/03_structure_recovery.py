"""End-to-end structure recovery, in-process and through the CLI.

Run: python3 demos/03_structure_recovery.py
"""

import json
import os
import tempfile

from isinglearn import (fit_all_nodes, lambda_schedule, learn_structure,
                        make_grid_model, perfect_recovery, result_to_json,
                        sample_exact, save_model, write_samples_text)
from isinglearn.cli import main

model = make_grid_model(3, 0.7)
n = 250000
samples = sample_exact(model, n, seed=21)

# The penalty schedule needs only (p, n, confidence); the threshold is
# the smallest coupling magnitude you want to be able to see.
lam = lambda_schedule(model.p, n, epsilon=0.05)
print(f"penalty lambda = {lam:.5f} at n = {n}")

edge_set = learn_structure(samples, lam, alpha_threshold=0.7)
print("recovered edges:", len(edge_set.edges),
      "| exact match:", perfect_recovery(edge_set, model))
worst = max(abs(edge_set.weights[e] - model.couplings[e])
            for e in model.couplings)
print("worst |weight - truth| over true edges:", round(worst, 3))

# The same result as an interchange document (this is what the CLI
# writes): per-edge weights plus one convergence report per vertex.
estimates = fit_all_nodes(samples, lam)
doc = json.loads(result_to_json(lam, 0.7, edge_set, estimates))
print("result JSON keys:", sorted(doc))
print("first edge entry:", doc["edges"][0])

# Same pipeline through the command line, file formats included.
with tempfile.TemporaryDirectory() as d:
    model_path = os.path.join(d, "model.json")
    samples_path = os.path.join(d, "samples.txt")
    result_path = os.path.join(d, "result.json")
    save_model(model, model_path)
    write_samples_text(samples, samples_path)
    rc = main(["learn", "--samples", samples_path, "--threshold", "0.7",
               "--out", result_path])
    cli_doc = json.load(open(result_path))
    print("\nCLI exit code:", rc, "| edges:", len(cli_doc["edges"]),
          "| lambda matches:", cli_doc["lambda"] == lam)
