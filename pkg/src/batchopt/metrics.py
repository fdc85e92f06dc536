"""Success rate and time-to-target indicators over repeated trials.

For a threshold ``p`` (percent of the known optimum) a trial succeeds when its
best objective reaches ``p * optimum / 100``. Evaluations and generations to
success are read off the first trace entry whose best-so-far crosses the
threshold; they are averaged over successful trials only and reported as 0
when no trial succeeds. The initial population is generation 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .evolutionary import RunTrace


@dataclass
class TrialRecord:
    trace: RunTrace
    best: float
    seed: int = 0

    @classmethod
    def from_trace(cls, trace: RunTrace, seed: int = 0) -> "TrialRecord":
        return cls(trace, trace.best, seed)


def _target(optimum: float, p: float) -> float:
    if not optimum > 0:
        raise ValueError("optimum must be positive")
    if not 0 < p <= 100:
        raise ValueError("threshold percentage must lie in (0, 100]")
    return p * optimum / 100.0


def _check(trials: Sequence[TrialRecord]) -> None:
    if len(trials) == 0:
        raise ValueError("no trials to aggregate")


def first_crossing(trace: RunTrace, target: float):
    """First trace entry whose best-so-far reaches ``target``, or None."""
    for entry in trace:
        if entry.best >= target:
            return entry
    return None


def success_rate(trials: Sequence[TrialRecord], optimum: float, p: float) -> float:
    _check(trials)
    target = _target(optimum, p)
    hits = sum(t.best >= target for t in trials)
    return 100.0 * hits / len(trials)


def _mean_crossing(trials, optimum, p, attr) -> float:
    _check(trials)
    target = _target(optimum, p)
    values = []
    for t in trials:
        entry = first_crossing(t.trace, target)
        if entry is not None:
            values.append(getattr(entry, attr))
    return float(np.mean(values)) if values else 0.0


def avg_evals_to_solution(trials: Sequence[TrialRecord], optimum: float, p: float) -> float:
    return _mean_crossing(trials, optimum, p, "evaluations")


def avg_gens_to_solution(trials: Sequence[TrialRecord], optimum: float, p: float) -> float:
    return _mean_crossing(trials, optimum, p, "generation")


@dataclass
class QualityReport:
    algorithm: str
    horizon: float
    optimum: float
    thresholds: tuple[float, float]
    n_trials: int
    sr: dict[float, float] = field(default_factory=dict)
    aesr: dict[float, float] = field(default_factory=dict)
    agsr: dict[float, float] = field(default_factory=dict)

    @classmethod
    def from_trials(cls, algorithm: str, horizon: float, optimum: float,
                    thresholds: Sequence[float], trials: Sequence[TrialRecord]) -> "QualityReport":
        rep = cls(algorithm, horizon, optimum, tuple(thresholds), len(trials))
        for p in thresholds:
            rep.sr[p] = success_rate(trials, optimum, p)
            rep.aesr[p] = avg_evals_to_solution(trials, optimum, p)
            rep.agsr[p] = avg_gens_to_solution(trials, optimum, p)
        return rep

    def columns(self) -> list[str]:
        cols = ["Algorithm", "Time Horizon", "Objective Value"]
        for name in ("SR", "AESR", "AGSR"):
            cols += [f"{name}@{_pct(p)}" for p in self.thresholds]
        return cols

    def row(self) -> list[str]:
        out = [self.algorithm, f"{_pct(self.horizon)}H", _pct(self.optimum)]
        for table in (self.sr, self.aesr, self.agsr):
            out += [f"{table[p]:.2f}" for p in self.thresholds]
        return out


def _pct(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else str(x)
