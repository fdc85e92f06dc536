"""Exact optimum of the plant by dynamic programming over simulator states.

A schedule only matters through the ticks at which batches actually start, and
a batch can only start on a free unit. At each tick the search therefore
branches on "start or not" for every free unit, with the same batch sizing,
blocking and downstream-first order as the simulator, and keeps the best
product amount per distinct plant state. This enumerates every reachable
behaviour, so the result is the global maximum, and the stored back-pointers
rebuild a schedule that attains it.

The transition model is written out separately from
:func:`batchopt.plant.simulate` so the two can check each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import BIT_PROCESSES, InstructionVector
from .plant import PlantConfig, expected_length, simulate_yield

# unit order within a tick: purification, reaction, mixing
_DOWNSTREAM_FIRST = (2, 1, 0)


@dataclass(frozen=True)
class OptimumResult:
    value: float
    schedule: InstructionVector
    n_states: int  # largest frontier seen; a rough size measure


def _tick(config: PlantConfig, key, value, allow_starts: bool):
    """Expand one plant state through a tick; yields (key, value, started units)."""
    caps = [u.capacity for u in config.units]
    dur = config.processing_ticks
    limits = [s.storage_limit for s in config.states]

    a2, a3, units = key
    # advance clocks: remaining ticks drop by one, reaching 0 means finished
    units = tuple((r - 1 if r > 0 else 0, f) for r, f in units)
    branches = [((a2, a3), units, value, ())]
    for u in _DOWNSTREAM_FIRST:
        nxt = []
        for (b2, b3), us, v, started in branches:
            amounts = [0.0, b2, b3]
            r, f = us[u]
            if r == 0 and f > 0:
                if u == 2:
                    v += f
                    f = 0.0
                else:
                    moved = min(f, limits[u + 1] - amounts[u + 1])
                    amounts[u + 1] += moved
                    f -= moved
                us = us[:u] + ((r, f),) + us[u + 1:]
            nxt.append(((amounts[1], amounts[2]), us, v, started))
            if not allow_starts or r != 0 or f != 0:
                continue
            if u == 0:
                amt = caps[0]
                new_amounts = amounts
                new_us = us
            else:
                ur, uf = us[u - 1]
                held = uf if ur == 0 else 0.0
                amt = min(caps[u], amounts[u] + held)
                if amt <= 0:
                    continue
                direct = min(amt, held)
                new_amounts = list(amounts)
                new_amounts[u] -= amt - direct
                new_us = us[: u - 1] + ((ur, uf - direct),) + us[u:]
            new_us = new_us[:u] + ((dur[u], amt),) + new_us[u + 1:]
            nxt.append(((new_amounts[1], new_amounts[2]), new_us, v, started + (u,)))
        branches = nxt
    for (b2, b3), us, v, started in branches:
        yield (b2, b3, us), v, started


def exact_optimum(config: PlantConfig, horizon: float) -> OptimumResult:
    """Maximum product amount reachable within ``horizon`` and a schedule for it."""
    if not np.isinf(config.states[0].initial_amount):
        raise ValueError("exact search assumes an unlimited feed state")
    n_bits = expected_length(horizon)
    n_steps = n_bits // 3
    start_key = (config.states[1].initial_amount, config.states[2].initial_amount,
                 ((0, 0.0), (0, 0.0), (0, 0.0)))
    frontier = {start_key: 0.0}
    parents: list[dict] = []
    widest = 1
    for t in range(n_steps + 1):
        nxt: dict = {}
        back: dict = {}
        for key, value in frontier.items():
            for new_key, v, started in _tick(config, key, value, allow_starts=t < n_steps):
                if v > nxt.get(new_key, -1.0):
                    nxt[new_key] = v
                    back[new_key] = (key, started)
        parents.append(back)
        frontier = nxt
        widest = max(widest, len(frontier))

    best_key = max(frontier, key=frontier.get)
    best = frontier[best_key]
    bits = np.zeros(n_bits, dtype=np.uint8)
    key = best_key
    for t in range(n_steps, -1, -1):
        key, started = parents[t][key]
        for u in started:
            bits[3 * t + BIT_PROCESSES.index(config.units[u].process)] = 1
    schedule = InstructionVector(bits, horizon)
    return OptimumResult(best, schedule, widest)


def verify(config: PlantConfig, result: OptimumResult) -> bool:
    """Replay the rebuilt schedule through the simulator under both busy policies."""
    h = result.schedule.horizon
    return (simulate_yield(config, result.schedule, h) == result.value
            and simulate_yield(config, result.schedule, h, defer_busy=False) == result.value)
