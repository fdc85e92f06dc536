"""Experiment matrices, seeded repetition and result files.

Output layout under ``out``::

    <preset>_<ALGO>_<H>H/trace_<i>.csv      gens,OV per trial
    <preset>_<ALGO>_<H>H/archive_<i>.csv    PSAF runs only
    summary_<preset>.csv                    one row per (algorithm, horizon)
    comparison_<preset>.csv                 +/-/= per PSAF cell vs its baseline

Trial ``i`` uses seed ``base_seed + i`` with NumPy's PCG64 generator, so
results do not depend on execution order or worker count.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .evolutionary import EAParams, RunTrace, TraceEntry, run
from .metrics import QualityReport, TrialRecord
from .plant import PlantConfig, get_preset
from .problem import Problem
from .psaf import PsafParams, psaf_search

log = logging.getLogger(__name__)

HORIZONS = (12, 24, 36, 48, 60, 72, 168)
ALGORITHMS = ("GA", "DE", "PSAF-GA", "PSAF-DE")

OPTIMA = {
    "primary": {12: 100, 24: 350, 36: 625, 48: 900, 60: 1150, 72: 1425, 168: 3550},
    "variant": {12: 100, 24: 325, 36: 575, 48: 800, 60: 1000, 72: 1250, 168: 2825},
}

THRESHOLDS = {"primary": (95.0, 99.5), "variant": (90.0, 95.0)}


def normalize_algorithm(name: str) -> str:
    key = name.strip().upper()
    if key not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
    return key


def generations_for(horizon: float) -> int:
    return 15 if horizon >= 168 else 20


@dataclass
class ExperimentSpec:
    preset: str = "primary"
    horizons: Sequence[float] = HORIZONS
    algorithms: Sequence[str] = ALGORITHMS
    thresholds: tuple[float, float] | None = None
    n_trials: int = 30
    base_seed: int = 0
    ea: dict = field(default_factory=dict)
    psaf: dict = field(default_factory=dict)
    plant: PlantConfig | None = None
    optima: dict | None = None

    def __post_init__(self):
        if self.plant is None:
            self.plant = get_preset(self.preset)
        if self.optima is None:
            if self.preset not in OPTIMA:
                raise ValueError(f"no known optima for preset {self.preset!r}")
            self.optima = OPTIMA[self.preset]
        if self.thresholds is None:
            self.thresholds = THRESHOLDS.get(self.preset, THRESHOLDS["primary"])
        for h in self.horizons:
            if h not in self.optima:
                raise ValueError(f"no known optimum for {h} h on preset {self.preset!r}")
        self.algorithms = tuple(normalize_algorithm(a) for a in self.algorithms)
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")

    def ea_params(self, horizon: float, trial: int) -> EAParams:
        kw = {"n_generations": generations_for(horizon)}
        kw.update(self.ea)
        kw["seed"] = self.base_seed + trial
        return EAParams(**kw)

    def psaf_params(self, algorithm: str, horizon: float, trial: int) -> PsafParams:
        kw = dict(self.psaf)
        kw["baseline"] = algorithm.split("-", 1)[1]
        return PsafParams(ea=self.ea_params(horizon, trial), **kw)


@dataclass
class TrialResult:
    record: TrialRecord
    archive_csv: str | None = None


def run_trial(spec: ExperimentSpec, algorithm: str, horizon: float, trial: int) -> TrialResult:
    problem = Problem(spec.plant, horizon)
    if algorithm.startswith("PSAF"):
        params = spec.psaf_params(algorithm, horizon, trial)
        state = psaf_search(problem, params)
        return TrialResult(TrialRecord.from_trace(state.trace, params.ea.seed), state.archive.to_csv())
    params = spec.ea_params(horizon, trial)
    _, trace = run(algorithm, problem, params)
    return TrialResult(TrialRecord.from_trace(trace, params.seed))


def _run_trial_args(args):
    return run_trial(*args)


def cell_dir(out: Path, preset: str, algorithm: str, horizon: float) -> Path:
    return out / f"{preset}_{algorithm}_{_fmt(horizon)}H"


def run_cell(spec: ExperimentSpec, algorithm: str, horizon: float,
             workers: int = 1) -> list[TrialResult]:
    """All trials of one (algorithm, horizon) cell, in trial order."""
    jobs = [(spec, algorithm, horizon, i) for i in range(spec.n_trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_trial_args, jobs))
    return [run_trial(*job) for job in jobs]


def write_cell(out: Path, preset: str, algorithm: str, horizon: float,
               results: Sequence[TrialResult]) -> Path:
    d = cell_dir(Path(out), preset, algorithm, horizon)
    d.mkdir(parents=True, exist_ok=True)
    for i, r in enumerate(results):
        r.record.trace.to_csv(d / f"trace_{i}.csv")
        if r.archive_csv is not None:
            (d / f"archive_{i}.csv").write_text(r.archive_csv)
    return d


def run_experiment(spec: ExperimentSpec, out: str | Path | None = None,
                   workers: int = 1) -> list[QualityReport]:
    """Run every (algorithm, horizon) cell of ``spec`` and score it."""
    reports = []
    for algorithm in spec.algorithms:
        for horizon in spec.horizons:
            results = run_cell(spec, algorithm, horizon, workers)
            report = QualityReport.from_trials(algorithm, horizon, spec.optima[horizon],
                                               spec.thresholds, [r.record for r in results])
            log.info("%s %s %sH: SR=%s", spec.preset, algorithm, _fmt(horizon), report.sr)
            reports.append(report)
            if out is not None:
                write_cell(Path(out), spec.preset, algorithm, horizon, results)
    if out is not None:
        emit_tables(reports, out, spec.preset, compare=has_baselines(reports))
    return reports


def summary_csv(reports: Sequence[QualityReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(reports[0].columns())
    for rep in reports:
        w.writerow(rep.row())
    return buf.getvalue()


def compare_cell(metric: str, psaf_value: float, base_value: float) -> str:
    """Mark a PSAF cell against its baseline: '+' better, '-' worse, '=' equal.

    Success rates are better when higher. Evaluation and generation counts are
    better when lower; 0 means "never succeeded", so a 0 against a non-zero
    count is 'incomparable'.
    """
    a, b = round(psaf_value, 2), round(base_value, 2)
    if a == b:
        return "="
    if metric == "SR":
        return "+" if a > b else "-"
    if a == 0 or b == 0:
        return "incomparable"
    return "+" if a < b else "-"


def comparison_csv(reports: Sequence[QualityReport]) -> str:
    index = {(r.algorithm, r.horizon): r for r in reports}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = None
    for rep in reports:
        if not rep.algorithm.startswith("PSAF"):
            continue
        baseline = rep.algorithm.split("-", 1)[1]
        base = index.get((baseline, rep.horizon))
        if base is None:
            raise ValueError(f"no {baseline} result at {rep.horizon} h to compare {rep.algorithm} with")
        if header is None:
            header = rep.columns()
            w.writerow(header)
        row = [rep.algorithm, f"{_fmt(rep.horizon)}H", _fmt(rep.optimum)]
        for metric, mine, theirs in (("SR", rep.sr, base.sr), ("AESR", rep.aesr, base.aesr),
                                     ("AGSR", rep.agsr, base.agsr)):
            for p in rep.thresholds:
                row.append(f"{mine[p]:.2f}{compare_cell(metric, mine[p], theirs[p])}")
        w.writerow(row)
    return buf.getvalue()


def has_baselines(reports: Sequence[QualityReport]) -> bool:
    """True when every PSAF report has its baseline at the same horizon."""
    cells = {(r.algorithm, r.horizon) for r in reports}
    return all((r.algorithm.split("-", 1)[1], r.horizon) in cells
               for r in reports if r.algorithm.startswith("PSAF"))


def emit_tables(reports: Sequence[QualityReport], out: str | Path, preset: str,
                compare: bool = True) -> list[Path]:
    """Write the summary CSV and, if ``compare``, the PSAF comparison CSV.

    Raises ValueError when comparing and a PSAF row lacks its baseline.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / f"summary_{preset}.csv"]
    written[0].write_text(summary_csv(reports))
    if compare and any(r.algorithm.startswith("PSAF") for r in reports):
        path = out / f"comparison_{preset}.csv"
        path.write_text(comparison_csv(reports))
        written.append(path)
    return written


def median_trace(traces: Iterable[RunTrace]) -> RunTrace:
    """Per-generation median of best-so-far across trials."""
    traces = list(traces)
    if not traces:
        raise ValueError("no traces to aggregate")
    n = min(len(t) for t in traces)
    entries = []
    for k in range(n):
        values = [t[k].best for t in traces]
        evals = int(np.median([t[k].evaluations for t in traces]))
        entries.append(TraceEntry(traces[0][k].generation, float(np.median(values)), evals))
    return RunTrace(entries)


def aggregate_traces(directory: str | Path) -> RunTrace:
    files = sorted(Path(directory).glob("trace_*.csv"), key=lambda p: int(p.stem.split("_")[1]))
    return median_trace(RunTrace.from_csv(f) for f in files)


def _fmt(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else str(x)
