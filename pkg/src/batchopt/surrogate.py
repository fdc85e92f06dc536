"""Evaluation archive and a radial-basis-function surrogate over binary genomes.

The model is a Gaussian RBF interpolant on normalised Hamming distance with a
constant term::

    f(x) = c + sum_i w_i * exp(-(d(x, x_i) / eps) ** 2)

fitted by solving the ridge-regularised saddle-point system

    [Phi + lam*I  1] [w]   [y]
    [1^T          0] [c] = [0]

so a constant archive gives a constant model and two points blend linearly.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .encoding import InstructionVector


class ArchiveTooSmall(ValueError):
    pass


@dataclass
class EvalArchive:
    """Every distinct genome evaluated on the real simulator, in insertion order."""

    genomes: list[np.ndarray] = field(default_factory=list)
    objectives: list[float] = field(default_factory=list)
    _index: dict[bytes, int] = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.genomes)

    def __contains__(self, genome) -> bool:
        return _key(genome) in self._index

    def add(self, genome, objective: float) -> bool:
        """Insert ``genome``; returns False (and changes nothing) if already present."""
        bits = _bits(genome)
        k = bits.tobytes()
        if k in self._index:
            return False
        self._index[k] = len(self.genomes)
        self.genomes.append(bits)
        self.objectives.append(float(objective))
        return True

    def lookup(self, genome) -> float | None:
        i = self._index.get(_key(genome))
        return None if i is None else self.objectives[i]

    def X(self) -> np.ndarray:
        return np.vstack(self.genomes) if self.genomes else np.empty((0, 0), dtype=np.uint8)

    def y(self) -> np.ndarray:
        return np.asarray(self.objectives, dtype=float)

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["genome", "objective"])
        for g, f in zip(self.genomes, self.objectives):
            w.writerow(["".join(map(str, g.tolist())), f"{f:.2f}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> "EvalArchive":
        archive = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                bits = np.frombuffer(row["genome"].encode(), dtype=np.uint8) - ord("0")
                archive.add(bits, float(row["objective"]))
        return archive


def _bits(genome) -> np.ndarray:
    if isinstance(genome, InstructionVector):
        return genome.bits
    return np.ascontiguousarray(genome, dtype=np.uint8).ravel()


def _key(genome) -> bytes:
    return _bits(genome).tobytes()


def hamming(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Normalised Hamming distances between the rows of two 0/1 matrices."""
    A = np.atleast_2d(A).astype(float)
    B = np.atleast_2d(B).astype(float)
    L = A.shape[1]
    return (A @ (1.0 - B).T + (1.0 - A) @ B.T) / L


@dataclass(frozen=True)
class SurrogateModel:
    X: np.ndarray
    weights: np.ndarray
    constant: float
    bandwidth: float
    regularization: float

    def predict(self, G: np.ndarray) -> np.ndarray:
        """Predictions for the rows of a 0/1 matrix."""
        G = np.atleast_2d(G)
        if G.shape[1] != self.X.shape[1]:
            raise ValueError(f"genome length {G.shape[1]} != model length {self.X.shape[1]}")
        K = np.exp(-(hamming(G, self.X) / self.bandwidth) ** 2)
        return self.constant + K @ self.weights


def fit(archive: EvalArchive, regularization: float = 1e-8,
        bandwidth: float | None = None) -> SurrogateModel:
    """Fit the RBF model on the whole archive.

    The bandwidth defaults to the median pairwise distance between archived
    genomes.
    """
    if len(archive) < 2:
        raise ArchiveTooSmall(f"need at least 2 distinct genomes to fit, archive has {len(archive)}")
    X = archive.X()
    y = archive.y()
    D = hamming(X, X)
    if bandwidth is None:
        iu = np.triu_indices(len(y), k=1)
        bandwidth = float(np.median(D[iu]))
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    n = len(y)
    A = np.zeros((n + 1, n + 1))
    A[:n, :n] = np.exp(-(D / bandwidth) ** 2) + regularization * np.eye(n)
    A[:n, n] = 1.0
    A[n, :n] = 1.0
    rhs = np.append(y, 0.0)
    try:
        sol = scipy.linalg.solve(A, rhs, assume_a="sym")
    except (scipy.linalg.LinAlgError, ValueError):
        sol = scipy.linalg.lstsq(A, rhs)[0]
    if not np.all(np.isfinite(sol)):
        sol = scipy.linalg.lstsq(A, rhs)[0]
    return SurrogateModel(X=X, weights=sol[:n], constant=float(sol[n]),
                          bandwidth=bandwidth, regularization=regularization)


def predict(model: SurrogateModel, genome) -> float:
    if model is None:
        raise ValueError("surrogate has not been fitted")
    return float(model.predict(_bits(genome))[0])


def predict_many(model: SurrogateModel, genomes) -> np.ndarray:
    if model is None:
        raise ValueError("surrogate has not been fitted")
    if len(genomes) == 0:
        return np.empty(0)
    return model.predict(np.vstack([_bits(g) for g in genomes]))
