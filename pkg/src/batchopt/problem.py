"""The schedule optimisation problem: maximise plant yield over binary vectors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .plant import PlantConfig, expected_length, get_preset, simulate_yield


@dataclass
class Problem:
    """Binary maximisation problem with bounds 0 <= x <= 1.

    Every call to :meth:`evaluate` runs the simulator once and is counted.
    """

    config: PlantConfig
    horizon: float
    n_evals: int = 0

    @classmethod
    def from_preset(cls, preset: str, horizon: float) -> "Problem":
        return cls(get_preset(preset), horizon)

    @property
    def n_var(self) -> int:
        return expected_length(self.horizon)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.zeros(self.n_var, dtype=np.uint8), np.ones(self.n_var, dtype=np.uint8)

    def evaluate(self, bits) -> float:
        self.n_evals += 1
        return simulate_yield(self.config, bits, self.horizon)

    def fresh(self) -> "Problem":
        """Same problem with the evaluation counter reset."""
        return Problem(self.config, self.horizon)
