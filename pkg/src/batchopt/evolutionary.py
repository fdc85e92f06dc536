"""Genetic algorithm and differential evolution over binary schedules.

Both algorithms expose the same three pieces so that the surrogate-assisted
wrapper in :mod:`batchopt.psaf` can swap the selection score and run the loop
on a cheap model:

``select(population, scores, n, rng)``
    indices of mating parents
``vary(population, parents, rng)``
    unevaluated offspring
``survive(population, offspring)``
    next population

The GA uses binary tournaments, two-point crossover, bit-flip mutation and
(mu + lambda) truncation. DE works on a continuous relaxation in ``[0, 1]^L``
(DE/rand/1/bin); a trial bit is 1 where its relaxed value is >= 0.5, and each
trial competes one-to-one with its target.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .encoding import InstructionVector, random_init
from .problem import Problem

Evaluator = Callable[[np.ndarray], float]


@dataclass(eq=False)
class Individual:
    genome: InstructionVector
    fitness: float | None = None
    # DE keeps its continuous genome; the binary one is derived from it
    relaxed: np.ndarray | None = None
    # index of the population member a DE trial competes with
    target: int | None = None

    @property
    def bits(self) -> np.ndarray:
        return self.genome.bits

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


@dataclass(frozen=True)
class EAParams:
    population_size: int = 30
    n_offspring: int = 10
    n_generations: int = 20
    crossover_rate: float = 0.9
    # None means 1 / L
    mutation_rate: float | None = None
    de_F: float = 0.5
    de_CR: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.n_offspring < 1:
            raise ValueError("n_offspring must be >= 1")
        if self.n_generations < 0:
            raise ValueError("n_generations must be >= 0")
        for name in ("crossover_rate", "de_F", "de_CR"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")

    def with_(self, **changes) -> "EAParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class TraceEntry:
    generation: int  # initial population is generation 1
    best: float
    evaluations: int


@dataclass
class RunTrace:
    entries: list[TraceEntry] = field(default_factory=list)

    def append(self, entry: TraceEntry) -> None:
        self.entries.append(entry)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def best(self) -> float:
        return max(e.best for e in self.entries)

    def best_at(self, generation: int) -> float:
        """Best-so-far after ``generation`` (clamped to the last entry)."""
        best = None
        for e in self.entries:
            if e.generation > generation:
                break
            best = e.best
        if best is None:
            raise ValueError(f"trace has no entry at or before generation {generation}")
        return best

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["gens", "OV"])
        for e in self.entries:
            w.writerow([e.generation, f"{e.best:.2f}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path, population_size: int = 30, n_offspring: int = 10) -> "RunTrace":
        return cls.parse_csv(Path(path).read_text(), population_size, n_offspring)

    @classmethod
    def parse_csv(cls, text: str, population_size: int = 30, n_offspring: int = 10) -> "RunTrace":
        """Read ``gens,OV`` rows; evaluation counts are rebuilt from the budget."""
        rows = csv.DictReader(io.StringIO(text))
        return cls([
            TraceEntry(int(r["gens"]), float(r["OV"]),
                       population_size + (int(r["gens"]) - 1) * n_offspring)
            for r in rows
        ])


def tournament(scores: Sequence[float], n_select: int, size: int,
               rng: np.random.Generator) -> list[int]:
    """Pick ``n_select`` winners of ``size``-way tournaments (maximisation).

    Competitors are drawn uniformly without replacement; ties go to the lower
    population index.
    """
    scores = np.asarray(scores, dtype=float)
    n = scores.shape[0]
    size = min(size, n)
    winners = []
    for _ in range(n_select):
        comp = np.sort(rng.choice(n, size=size, replace=False))
        winners.append(int(comp[np.argmax(scores[comp])]))
    return winners


def mu_plus_lambda(population: list[Individual], offspring: list[Individual],
                   mu: int) -> list[Individual]:
    pool = list(population) + list(offspring)
    # stable sort: ties keep parents ahead of children and lower indices first
    order = sorted(range(len(pool)), key=lambda i: -pool[i].fitness)
    return [pool[i] for i in order[:mu]]


def _bits_to_individual(bits: np.ndarray, horizon: float, **kw) -> Individual:
    return Individual(InstructionVector(bits, horizon), **kw)


class GA:
    name = "GA"

    def __init__(self, params: EAParams):
        self.params = params

    def select(self, population, scores, n, rng, size: int = 2) -> list[int]:
        return tournament(scores, n, size, rng)

    def n_parents(self) -> int:
        return 2 * ((self.params.n_offspring + 1) // 2)

    def vary(self, population, parents, rng) -> list[Individual]:
        p = self.params
        horizon = population[0].genome.horizon
        L = population[0].bits.shape[0]
        pm = p.mutation_rate if p.mutation_rate is not None else 1.0 / L
        children = []
        for k in range(0, len(parents) - 1, 2):
            a = population[parents[k]].bits
            b = population[parents[k + 1]].bits
            c1, c2 = a.copy(), b.copy()
            if rng.random() < p.crossover_rate:
                i, j = np.sort(rng.choice(L + 1, size=2, replace=False))
                c1[i:j], c2[i:j] = b[i:j], a[i:j]
            for c in (c1, c2):
                flip = rng.random(L) < pm
                c[flip] ^= 1
                children.append(c)
        return [_bits_to_individual(c, horizon) for c in children[: p.n_offspring]]

    def survive(self, population, offspring):
        return mu_plus_lambda(population, offspring, self.params.population_size)


class DE:
    name = "DE"

    def __init__(self, params: EAParams):
        self.params = params

    def select(self, population, scores, n, rng, size: int = 1) -> list[int]:
        # rand/1: base vectors are uniform unless a tournament size is imposed
        if size <= 1:
            return [int(i) for i in rng.integers(0, len(population), size=n)]
        return tournament(scores, n, size, rng)

    def n_parents(self) -> int:
        return self.params.n_offspring

    @staticmethod
    def relaxed(ind: Individual) -> np.ndarray:
        if ind.relaxed is None:
            return ind.bits.astype(float)
        return ind.relaxed

    def vary(self, population, parents, rng) -> list[Individual]:
        p = self.params
        horizon = population[0].genome.horizon
        n = len(population)
        if n < 4:
            raise ValueError("DE needs a population of at least 4")
        trials = []
        for base in parents:
            others = [i for i in range(n) if i != base]
            target, r2, r3 = (int(i) for i in rng.choice(others, size=3, replace=False))
            x_base = self.relaxed(population[base])
            x_tgt = self.relaxed(population[target])
            v = np.clip(x_base + p.de_F * (self.relaxed(population[r2]) - self.relaxed(population[r3])), 0.0, 1.0)
            L = v.shape[0]
            mask = rng.random(L) < p.de_CR
            mask[rng.integers(L)] = True
            u = np.where(mask, v, x_tgt)
            trials.append(_bits_to_individual(threshold(u), horizon, relaxed=u, target=target))
        return trials

    def survive(self, population, offspring):
        nxt = list(population)
        for trial in offspring:
            t = trial.target
            if trial.fitness >= nxt[t].fitness:
                nxt[t] = trial
        return nxt


def threshold(relaxed: np.ndarray) -> np.ndarray:
    """Map a relaxed DE vector to bits: values >= 0.5 become 1."""
    return (np.asarray(relaxed) >= 0.5).astype(np.uint8)


ALGORITHMS = {"GA": GA, "DE": DE}


def make_algorithm(name: str, params: EAParams):
    try:
        return ALGORITHMS[name.upper()](params)
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}") from None


def evaluate_all(individuals: list[Individual], evaluate: Evaluator) -> None:
    for ind in individuals:
        ind.fitness = float(evaluate(ind.bits))


def initial_population(problem: Problem, params: EAParams, rng: np.random.Generator) -> list[Individual]:
    pop = [Individual(random_init(problem.horizon, rng)) for _ in range(params.population_size)]
    evaluate_all(pop, problem.evaluate)
    return pop


def best_of(population: list[Individual]) -> Individual:
    # first maximal member, i.e. lowest index on ties
    return max(population, key=lambda ind: ind.fitness)


def generation_step(algo, population, evaluate: Evaluator, rng) -> tuple[list[Individual], list[Individual]]:
    """One select/vary/evaluate/survive cycle; returns (population, offspring)."""
    scores = [ind.fitness for ind in population]
    parents = algo.select(population, scores, algo.n_parents(), rng)
    offspring = algo.vary(population, parents, rng)
    evaluate_all(offspring, evaluate)
    return algo.survive(population, offspring), offspring


def _step(algo, population, problem: Problem, rng, generation: int, best_so_far: float | None):
    population, offspring = generation_step(algo, population, problem.evaluate, rng)
    best = max(best_of(population).fitness, *(o.fitness for o in offspring))
    if best_so_far is not None:
        best = max(best, best_so_far)
    return population, TraceEntry(generation, best, problem.n_evals)


def ga_step(population, params: EAParams, problem: Problem, rng, generation: int = 0,
            best_so_far: float | None = None):
    return _step(GA(params), population, problem, rng, generation, best_so_far)


def de_step(population, params: EAParams, problem: Problem, rng, generation: int = 0,
            best_so_far: float | None = None):
    return _step(DE(params), population, problem, rng, generation, best_so_far)


def run(algorithm: str, problem: Problem, params: EAParams) -> tuple[Individual, RunTrace]:
    """Run a baseline GA or DE from a random population.

    The trace starts with the initial population as generation 1 and then has
    one entry per generation, so cumulative evaluations are
    ``population_size + (generation - 1) * n_offspring``.
    """
    algo = make_algorithm(algorithm, params)
    rng = np.random.default_rng(params.seed)
    population = initial_population(problem, params, rng)
    best = best_of(population)
    trace = RunTrace([TraceEntry(1, best.fitness, problem.n_evals)])
    for gen in range(2, params.n_generations + 2):
        population, offspring = generation_step(algo, population, problem.evaluate, rng)
        for cand in (*population, *offspring):
            if cand.fitness > best.fitness:
                best = cand
        trace.append(TraceEntry(gen, best.fitness, problem.n_evals))
    return best, trace
