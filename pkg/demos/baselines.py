# GA and DE on the 72h primary problem, a few seeds each.
from batchopt import EAParams, Problem, run

for algo in ("GA", "DE"):
    for seed in range(3):
        problem = Problem.from_preset("primary", 72)
        best, trace = run(algo, problem, EAParams(seed=seed))
        print(algo, seed, "best", best.fitness, "of 1425 after", problem.n_evals, "evaluations")

# the trace is what the plots use
print(trace.to_csv()[:60])
