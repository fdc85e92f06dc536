# Run one hand-written schedule through the plant simulator and look at what happened.
import numpy as np

from batchopt import from_starts, get_preset, simulate, audit_mass

plant = get_preset("primary")
for u in plant.units:
    print(u.name, u.process, "cap", u.capacity, "takes", u.processing_time, "h")

# mix once, react twice, purify three times: 100 units of product in 12 h
schedule = from_starts([(0, "mixing"), (4.5, "reaction"), (7.5, "purification"),
                        (7.5, "reaction"), (9, "purification"), (10.5, "purification")], 12)
out = simulate(plant, schedule, 12)
for e in out.events:
    print(f"{e.time:5.1f}h  {e.unit:6s} {e.action:9s} {e.amount:g}")
print("yield", out.yield_amount, "drawn", out.total_drawn, "mass ok", audit_mass(out))

# a request on a busy unit waits for the unit instead of vanishing
out = simulate(plant, from_starts([(0, "mixing"), (1, "mixing")], 12), 12)
print([(e.time, e.action) for e in out.events if e.unit == "unit1"])

# the bottleneck variant: half the intermediate storage
variant = get_preset("variant")
blocked = simulate(variant, from_starts([(0, "mixing")], 12), 12)
print("state2 after one mix on the variant:", blocked.final_state.state_amounts[1],
      "still in the mixer:", blocked.final_state.in_flight[0][0])

# every 0/1 vector of the right length is a valid input
rng = np.random.default_rng(1)
print("random 24h schedule yields", simulate(plant, rng.integers(0, 2, 144), 24).yield_amount)
