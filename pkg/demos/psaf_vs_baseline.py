# PSAF wraps GA/DE: the surrogate picks parents and pre-screens offspring,
# only 10 infills per generation go to the simulator.
import statistics

from batchopt import EAParams, Problem, PsafParams, run, run_psaf

H, seeds = 168, range(5)
for base in ("GA", "DE"):
    plain, assisted = [], []
    for s in seeds:
        ea = EAParams(seed=s, n_generations=15)
        plain.append(run(base, Problem.from_preset("primary", H), ea)[1].best_at(5))
        assisted.append(run_psaf(Problem.from_preset("primary", H), PsafParams(baseline=base, ea=ea))[1].best_at(5))
    print(f"{base}: median best at gen 5  plain {statistics.median(plain):g}  "
          f"PSAF {statistics.median(assisted):g}  (optimum 3550)")

# switch the surrogate off and PSAF is the baseline, bit for bit
ea = EAParams(seed=3)
a = run("GA", Problem.from_preset("primary", 12), ea)[1]
b = run_psaf(Problem.from_preset("primary", 12), PsafParams(alpha=1, beta=0, ea=ea, use_surrogate=False))[1]
print("identical traces:", a.entries == b.entries)
