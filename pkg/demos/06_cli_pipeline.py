"""
==========================
Command-line pipeline
==========================

The ``bernoulli-sets`` command wraps the library in a file-based pipeline:
generate data, calibrate, predict and evaluate. Everything is JSON-lines so
each stage can be inspected or replaced. This demo drives the same entry
point from Python inside a temporary directory.
"""

# %%
# Setup
# -----
import json
import tempfile
from pathlib import Path

from bernoulli_sets.cli import main

work = Path(tempfile.mkdtemp())
f = lambda name: str(work / name)  # noqa: E731

# %%
# Generate, split by hand, calibrate
# ----------------------------------
main(["synth", "--generator", "aps-synth", "--n", "1000", "--k", "10", "--m", "5",
      "--noise", "0.8", "--seed", "1", "--out", f("all.jsonl")])
lines = Path(f("all.jsonl")).read_text().splitlines()
Path(f("cal.jsonl")).write_text("\n".join([lines[0]] + lines[1:301]) + "\n")
Path(f("test.jsonl")).write_text("\n".join([lines[0]] + lines[301:]) + "\n")
main(["calibrate", "--in", f("cal.jsonl"), "--alpha", "0.1", "--out", f("cal.json")])
print("t =", json.loads(Path(f("cal.json")).read_text())["t"])

# %%
# Predict and evaluate
# --------------------
main(["predict", "--in", f("test.jsonl"), "--calibration", f("cal.json"), "--sample", "--seed", "0",
      "--out", f("params.jsonl")])
main(["evaluate", "--params", f("params.jsonl"), "--truth", f("test.jsonl"),
      "--heatmap", f("heatmap.csv"), "--out", f("metrics.json")])
print(json.dumps(json.loads(Path(f("metrics.json")).read_text()), indent=2)[:600])

# %%
# Geometry helpers
# ----------------
main(["vertices", "--p", "0.5,0.3,0.2", "--d", "0.1"])

# %%
# Takeaways
# ---------
# - Each stage reads and writes plain files with a header line.
# - Exit codes: 0 ok, 2 invalid input, 3 I/O error, 4 saturation under --strict-saturation.
