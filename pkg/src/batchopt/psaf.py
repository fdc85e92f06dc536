"""Probabilistic surrogate-assisted wrapper around the GA and DE baselines.

Each generation:

1. alpha phase: mating parents are chosen by ``alpha``-way tournaments on the
   surrogate's predictions, then the baseline's variation makes offspring;
2. beta phase: the baseline keeps running for ``beta`` generations with the
   surrogate as its (free) fitness;
3. the best-predicted candidates not yet in the archive become the
   ``n_infills`` infill solutions, the only ones sent to the simulator;
4. infills are archived, the surrogate is refitted on the whole archive, and
   (mu + lambda) survival on true fitness forms the next population.

With ``use_surrogate=False`` a generation is exactly one baseline generation,
which makes paired-seed comparisons against :func:`batchopt.evolutionary.run`
bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .encoding import random_init
from .evolutionary import (
    EAParams,
    Individual,
    RunTrace,
    TraceEntry,
    best_of,
    evaluate_all,
    generation_step,
    initial_population,
    make_algorithm,
    mu_plus_lambda,
    tournament,
)
from .problem import Problem
from .surrogate import EvalArchive, SurrogateModel, fit, predict_many


@dataclass(frozen=True)
class PsafParams:
    alpha: int = 5
    beta: int = 5
    n_infills: int = 10
    baseline: str = "GA"
    ea: EAParams = field(default_factory=EAParams)
    use_surrogate: bool = True
    regularization: float = 1e-8

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.n_infills < 1:
            raise ValueError("n_infills must be >= 1")
        if self.baseline.upper() not in ("GA", "DE"):
            raise ValueError(f"unknown baseline {self.baseline!r}")

    def with_(self, **changes) -> "PsafParams":
        return replace(self, **changes)


@dataclass
class PsafState:
    population: list[Individual]
    archive: EvalArchive
    model: SurrogateModel | None
    trace: RunTrace
    best: Individual
    problem: Problem


def _predicted(individuals, model) -> list[Individual]:
    preds = predict_many(model, [ind.bits for ind in individuals])
    return [Individual(ind.genome, float(p), ind.relaxed, ind.target)
            for ind, p in zip(individuals, preds)]


def alpha_phase(population: list[Individual], model: SurrogateModel, params: PsafParams,
                rng: np.random.Generator, n_parents: int | None = None) -> list[int]:
    """Parent indices, each the surrogate-best of ``alpha`` random competitors."""
    algo = make_algorithm(params.baseline, params.ea)
    n = algo.n_parents() if n_parents is None else n_parents
    scores = predict_many(model, [ind.bits for ind in population])
    return tournament(scores, n, params.alpha, rng)


def beta_phase(seed_population: list[Individual], model: SurrogateModel, params: PsafParams,
               rng: np.random.Generator) -> list[Individual]:
    """Run the baseline on the surrogate for ``beta`` generations.

    Returns the seed followed by every offspring created, all carrying
    predicted (not true) fitness. No simulator call is made.
    """
    pop = _predicted(seed_population, model)
    if params.beta == 0:
        return pop
    algo = make_algorithm(params.baseline, params.ea.with_(population_size=len(pop)))

    def surrogate(bits):
        return float(model.predict(bits)[0])

    pool = list(pop)
    for _ in range(params.beta):
        pop, offspring = generation_step(algo, pop, surrogate, rng)
        pool.extend(offspring)
    return pool


def select_infills(candidates: list[Individual], archive: EvalArchive, n_infills: int,
                   horizon: float, rng: np.random.Generator) -> list[Individual]:
    """Top ``n_infills`` distinct, unarchived candidates by predicted fitness.

    Shortfalls are filled with fresh random genomes.
    """
    order = sorted(range(len(candidates)), key=lambda i: -candidates[i].fitness)
    chosen: list[Individual] = []
    seen: set[bytes] = set()
    for i in order:
        c = candidates[i]
        key = c.bits.tobytes()
        if key in seen or c.bits in archive:
            continue
        seen.add(key)
        chosen.append(Individual(c.genome, None, c.relaxed))
        if len(chosen) == n_infills:
            return chosen
    while len(chosen) < n_infills:
        g = random_init(horizon, rng)
        key = g.bits.tobytes()
        if key in seen or g.bits in archive:
            continue
        seen.add(key)
        chosen.append(Individual(g))
    return chosen


def init_state(problem: Problem, params: PsafParams, rng: np.random.Generator) -> PsafState:
    population = initial_population(problem, params.ea, rng)
    archive = EvalArchive()
    for ind in population:
        archive.add(ind.bits, ind.fitness)
    model = _refit(archive, params)
    best = best_of(population)
    trace = RunTrace([TraceEntry(1, best.fitness, problem.n_evals)])
    return PsafState(population, archive, model, trace, best, problem)


def _refit(archive: EvalArchive, params: PsafParams) -> SurrogateModel | None:
    if not params.use_surrogate or len(archive) < 2:
        return None
    return fit(archive, regularization=params.regularization)


def psaf_generation(state: PsafState, params: PsafParams, rng: np.random.Generator) -> PsafState:
    problem = state.problem
    algo = make_algorithm(params.baseline, params.ea)
    if state.model is None:
        population, evaluated = generation_step(algo, state.population, problem.evaluate, rng)
    else:
        parents = alpha_phase(state.population, state.model, params, rng)
        offspring = algo.vary(state.population, parents, rng)
        candidates = beta_phase(list(state.population) + offspring, state.model, params, rng)
        evaluated = select_infills(candidates[len(state.population):], state.archive,
                                   params.n_infills, problem.horizon, rng)
        evaluate_all(evaluated, problem.evaluate)
        population = mu_plus_lambda(state.population, evaluated, params.ea.population_size)

    for ind in evaluated:
        state.archive.add(ind.bits, ind.fitness)
        if ind.fitness > state.best.fitness:
            state.best = ind
    state.population = population
    state.model = _refit(state.archive, params)
    gen = state.trace[-1].generation + 1
    state.trace.append(TraceEntry(gen, state.best.fitness, problem.n_evals))
    return state


def psaf_search(problem: Problem, params: PsafParams) -> PsafState:
    rng = np.random.default_rng(params.ea.seed)
    state = init_state(problem, params, rng)
    for _ in range(params.ea.n_generations):
        psaf_generation(state, params, rng)
    return state


def run_psaf(problem: Problem, params: PsafParams) -> tuple[Individual, RunTrace]:
    state = psaf_search(problem, params)
    return state.best, state.trace
