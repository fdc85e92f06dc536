# A small quality-indicator table, same layout as the full benchmark writes.
import tempfile
from pathlib import Path

from batchopt.harness import ExperimentSpec, run_experiment

spec = ExperimentSpec("primary", horizons=[12, 24], n_trials=5)
with tempfile.TemporaryDirectory() as out:
    run_experiment(spec, out)
    print((Path(out) / "summary_primary.csv").read_text())
    print((Path(out) / "comparison_primary.csv").read_text())
    print(sorted(p.name for p in Path(out).iterdir()))
