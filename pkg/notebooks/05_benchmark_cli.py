"""
Benchmark configs and the tubal-bench command
=============================================

Experiments are described by JSON configs.  Presets ship with the package;
``tubal-bench dump-preset NAME`` prints one, and ``run``, ``sweep`` and
``ablation`` execute a config and write one CSV trace per run plus
``summary.csv``.
"""

import csv
import json
import os
import tempfile

from tubal.bench import cli, dumps, loads, preset, preset_names

print("presets:", ", ".join(preset_names()))

# Shrink a preset into a quick config
cfg = json.loads(dumps(preset("fig3a")))
cfg["name"] = "demo"
cfg["problem"].update(n1=12, n2=12, multi_rank=[2, 2, 2])
cfg["problem"]["m"] = 5 * 4 * 12 * 3
cfg["rank"] = 4
for s in cfg["solvers"]:
    s["max_iters"] = 150
cfg = loads(json.dumps(cfg))

with tempfile.TemporaryDirectory() as d:
    path = os.path.join(d, "demo.json")
    with open(path, "w") as fh:
        fh.write(dumps(cfg))
    code = cli.main(["run", "--config", path, "--out-dir", d, "--no-timing", "-q"])
    print("exit code:", code)
    with open(os.path.join(d, "demo", "summary.csv")) as fh:
        for row in csv.DictReader(fh):
            print(f"{row['label']:13s} {row['status']:9s} final={float(row['final_rel_err']):.1e} "
                  f"to 1e-6 at {row['iters_to_1e-6'] or '-'}")

    # A step-size sweep over two values
    cli.main(["sweep", "--config", path, "--axis", "step_size", "--values", "0.3,0.9",
              "--out-dir", d, "-q"])
    print(sorted(os.listdir(os.path.join(d, "demo", "sweep_step_size")))[:4])
