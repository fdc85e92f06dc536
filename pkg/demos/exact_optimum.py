# Best achievable yield per horizon, by exhaustive search over plant states.
import time

from batchopt import get_preset, simulate
from batchopt.optimum import exact_optimum, verify

for preset in ("primary", "variant"):
    plant = get_preset(preset)
    for h in (12, 24, 36):
        t = time.time()
        res = exact_optimum(plant, h)
        print(f"{preset:8s} {h:3d}h  optimum {res.value:6g}  states {res.n_states:6d}  "
              f"{time.time() - t:.1f}s  replays: {verify(plant, res)}")

# the search hands back a schedule that reaches the optimum
res = exact_optimum(get_preset("primary"), 12)
starts = [(e.time, e.unit) for e in simulate(get_preset("primary"), res.schedule, 12).events
          if e.action == "start"]
print(starts)
