"""Discrete-event simulator of the mixing -> reaction -> purification flowshop.

The plant is a serial chain of four material states joined by three units::

    state1 --mixing--> state2 --reaction--> state3 --purification--> state4

A schedule tells the simulator at which half-hour ticks each unit should try to
start a batch. Nothing a schedule asks for raises: a request that cannot run
is dropped or postponed, so every binary vector of the right length evaluates
to a yield.

Rules, applied on a half-hour grid:

* A batch takes ``min(capacity, input available)``, where finished output
  still sitting in the upstream unit counts as available. A start with nothing
  to take is skipped.
* Storage limits bind on deposits. A finished batch moves into its output
  state as far as space allows; the rest stays in the unit, which cannot start
  again until it is empty.
* A request for a unit that is still running is remembered and executed at the
  first tick the unit is free again (``defer_busy=False`` drops it instead).
* Within a tick, batches finish first; then each unit, downstream first
  (purification, reaction, mixing), unloads its output and tries to start.
* Material deposited into the product state at exactly the horizon counts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

UNLIMITED = math.inf

#: Half-hour grid used by schedules and event times.
TICKS_PER_HOUR = 2

PROCESSES = ("mixing", "reaction", "purification")


@dataclass(frozen=True)
class UnitSpec:
    name: str
    capacity: float
    process: str
    processing_time: float
    price: float = 0.0


@dataclass(frozen=True)
class StateSpec:
    name: str
    storage_limit: float = UNLIMITED
    initial_amount: float = 0.0
    price: float = 0.0


@dataclass(frozen=True)
class PlantConfig:
    """A three-unit, four-state serial plant.

    ``units[i]`` consumes ``states[i]`` and deposits into ``states[i + 1]``.
    """

    units: tuple[UnitSpec, ...]
    states: tuple[StateSpec, ...]
    name: str = "custom"

    def __post_init__(self):
        if len(self.units) != 3 or len(self.states) != 4:
            raise ValueError("a plant needs exactly 3 units and 4 states")
        kinds = [u.process for u in self.units]
        if kinds != list(PROCESSES):
            raise ValueError(f"units must run {PROCESSES} in chain order, got {kinds}")
        for u in self.units:
            if not u.capacity > 0:
                raise ValueError(f"unit {u.name!r} capacity must be positive")
            ticks = u.processing_time * TICKS_PER_HOUR
            if u.processing_time <= 0 or ticks != round(ticks):
                raise ValueError(
                    f"unit {u.name!r} processing time must be a positive multiple of 0.5 h"
                )
        for s in self.states:
            if not s.storage_limit > 0:
                raise ValueError(f"state {s.name!r} storage limit must be positive")
            if s.initial_amount < 0 or s.initial_amount > s.storage_limit:
                raise ValueError(f"state {s.name!r} initial amount out of range")

    def unit_for(self, process: str) -> int:
        return PROCESSES.index(process)

    @property
    def processing_ticks(self) -> tuple[int, ...]:
        return tuple(int(round(u.processing_time * TICKS_PER_HOUR)) for u in self.units)

    def to_dict(self) -> dict:
        def lim(x):
            return "Unlimited" if math.isinf(x) else x

        return {
            "name": self.name,
            "units": [
                {
                    "name": u.name,
                    "capacity": u.capacity,
                    "process": u.process,
                    "processing_time": u.processing_time,
                    "price": u.price,
                }
                for u in self.units
            ],
            "states": [
                {
                    "name": s.name,
                    "storage_limit": lim(s.storage_limit),
                    "initial_amount": lim(s.initial_amount),
                    "price": s.price,
                }
                for s in self.states
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlantConfig":
        def num(x, default):
            if x is None:
                return default
            if isinstance(x, str):
                if x.strip().lower() == "unlimited":
                    return UNLIMITED
                return float(x)
            return float(x)

        units = tuple(
            UnitSpec(
                name=u["name"],
                capacity=num(u["capacity"], None),
                process=u["process"],
                processing_time=num(u["processing_time"], None),
                price=num(u.get("price"), 0.0),
            )
            for u in data["units"]
        )
        states = tuple(
            StateSpec(
                name=s["name"],
                storage_limit=num(s.get("storage_limit"), UNLIMITED),
                initial_amount=num(s.get("initial_amount"), 0.0),
                price=num(s.get("price"), 0.0),
            )
            for s in data["states"]
        )
        return cls(units=units, states=states, name=data.get("name", "custom"))


def _preset(name: str, intermediate_storage: float) -> PlantConfig:
    return PlantConfig(
        name=name,
        units=(
            UnitSpec("unit1", 100.0, "mixing", 4.5),
            UnitSpec("unit2", 75.0, "reaction", 3.0),
            UnitSpec("unit3", 50.0, "purification", 1.5),
        ),
        states=(
            StateSpec("state1", UNLIMITED, UNLIMITED),
            StateSpec("state2", intermediate_storage, 0.0),
            StateSpec("state3", intermediate_storage, 0.0),
            StateSpec("state4", UNLIMITED, 0.0),
        ),
    )


PRESETS = {
    "primary": _preset("primary", 100.0),
    # tighter intermediate storage -> stronger bottleneck
    "variant": _preset("variant", 50.0),
}


def get_preset(name: str) -> PlantConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown plant preset {name!r}; choose from {sorted(PRESETS)}") from None


def load_config(path: str | Path) -> PlantConfig:
    """Load a plant from a JSON file with ``units`` and ``states`` lists."""
    with open(path) as fh:
        return PlantConfig.from_dict(json.load(fh))


def save_config(config: PlantConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(config.to_dict(), fh, indent=2)


@dataclass
class SimState:
    clock: float
    state_amounts: list[float]
    unit_busy_until: list[float]
    # per unit: (amount, completion time) or None
    in_flight: list[tuple[float, float] | None]

    @classmethod
    def initial(cls, config: PlantConfig) -> "SimState":
        return cls(
            clock=0.0,
            state_amounts=[s.initial_amount for s in config.states],
            unit_busy_until=[0.0] * len(config.units),
            in_flight=[None] * len(config.units),
        )

    def reserved(self, state_index: int) -> float:
        """Material already promised to ``state_index`` by its feeding unit."""
        batch = self.in_flight[state_index - 1]
        return batch[0] if batch is not None else 0.0


@dataclass(frozen=True)
class Event:
    time: float
    unit: str
    action: str  # "start", "complete", "deferred" or "skipped"
    amount: float


@dataclass
class SimOutcome:
    yield_amount: float
    events: list[Event]
    total_drawn: float
    final_state: SimState = field(repr=False)
    horizon: float = 0.0
    # material sitting in states 2-4 before the run started
    initial_held: float = 0.0
    # (time, state amounts) at the end of every tick, when recorded
    snapshots: list[tuple[float, tuple[float, ...]]] = field(default_factory=list, repr=False)


def start_amount(config: PlantConfig, process: str, state_amounts: Sequence[float],
                 upstream_held: float = 0.0) -> float:
    """Batch size ``process`` would start with given current contents.

    ``upstream_held`` is finished output still waiting inside the feeding unit;
    it can be taken directly. Downstream storage does not bound the start.
    """
    i = config.unit_for(process)
    return max(0.0, min(config.units[i].capacity, state_amounts[i] + upstream_held))


def _as_bits(schedule) -> np.ndarray:
    bits = getattr(schedule, "bits", schedule)
    return np.asarray(bits).ravel()


def expected_length(horizon: float) -> int:
    ticks = horizon * TICKS_PER_HOUR
    if horizon <= 0 or ticks != round(ticks):
        raise ValueError(f"horizon must be a positive multiple of 0.5 h, got {horizon}")
    return int(round(ticks)) * 3


def simulate(config: PlantConfig, schedule, horizon: float, record: bool = True,
             defer_busy: bool = True) -> SimOutcome:
    """Run ``schedule`` on ``config`` for ``horizon`` hours.

    ``schedule`` is an :class:`~batchopt.encoding.InstructionVector` or any flat
    0/1 sequence of length ``6 * horizon``; bit ``3*k + j`` asks process
    ``BIT_PROCESSES[j]`` to start at tick ``k``. Set ``record=False`` to skip
    building the event list when only the yield is needed.

    Both busy-unit policies reach the same optimum: any run under one can be
    replayed under the other by setting bits exactly at the ticks batches
    actually started.

    Raises ``ValueError`` only for a malformed length.
    """
    # deferred: encoding imports from this module
    from .encoding import BIT_PROCESSES

    bits = _as_bits(schedule)
    n = expected_length(horizon)
    if bits.shape[0] != n:
        raise ValueError(f"schedule length {bits.shape[0]} != {n} for {horizon} h horizon")
    n_steps = n // 3
    cols = [BIT_PROCESSES.index(p) for p in PROCESSES]
    starts = bits.reshape(n_steps, 3)[:, cols].astype(bool).tolist()

    caps = [u.capacity for u in config.units]
    dur = config.processing_ticks
    limits = [s.storage_limit for s in config.states]
    names = [u.name for u in config.units]
    amounts = [s.initial_amount for s in config.states]
    # per unit: batch amount (0 when idle) and the tick it finishes; a finished
    # batch that did not fit downstream stays in the unit and blocks it
    batch = [0.0, 0.0, 0.0]
    done = [0, 0, 0]
    pending = [False, False, False]
    drawn = 0.0
    events: list[Event] = []
    snapshots: list[tuple[float, tuple[float, ...]]] = []
    half = 1.0 / TICKS_PER_HOUR

    for t in range(n_steps + 1):
        if record:
            for u in (0, 1, 2):
                if batch[u] > 0.0 and done[u] == t:
                    events.append(Event(t * half, names[u], "complete", batch[u]))
        row = starts[t] if t < n_steps else (False, False, False)
        for u in (2, 1, 0):
            if batch[u] > 0.0 and done[u] <= t:
                moved = min(batch[u], limits[u + 1] - amounts[u + 1])
                amounts[u + 1] += moved
                batch[u] -= moved
            if t == n_steps:
                continue
            if batch[u] > 0.0:
                if row[u]:
                    if defer_busy:
                        pending[u] = True
                    if record:
                        events.append(Event(t * half, names[u], "deferred" if defer_busy else "skipped", 0.0))
                continue
            if not (row[u] or pending[u]):
                continue
            pending[u] = False
            held = batch[u - 1] if u > 0 and done[u - 1] <= t else 0.0
            amt = min(caps[u], amounts[u] + held)
            if amt <= 0.0:
                if record:
                    events.append(Event(t * half, names[u], "skipped", 0.0))
                continue
            if u == 0:
                amounts[0] -= amt
                drawn += amt
            else:
                direct = min(amt, held)
                batch[u - 1] -= direct
                amounts[u] -= amt - direct
            batch[u] = amt
            done[u] = t + dur[u]
            if record:
                events.append(Event(t * half, names[u], "start", amt))
        if record:
            snapshots.append((t * half, tuple(amounts)))

    final = SimState(
        clock=n_steps * half,
        state_amounts=list(amounts),
        # a blocked unit stays busy at least until the horizon
        unit_busy_until=[max(d, n_steps) * half if b > 0 else d * half
                         for b, d in zip(batch, done)],
        in_flight=[(b, d * half) if b > 0 else None for b, d in zip(batch, done)],
    )
    return SimOutcome(
        yield_amount=amounts[3] - config.states[3].initial_amount,
        events=events,
        total_drawn=drawn,
        final_state=final,
        horizon=horizon,
        initial_held=sum(s.initial_amount for s in config.states[1:]),
        snapshots=snapshots,
    )


def simulate_yield(config: PlantConfig, schedule, horizon: float, defer_busy: bool = True) -> float:
    return simulate(config, schedule, horizon, record=False, defer_busy=defer_busy).yield_amount


def audit_mass(outcome: SimOutcome, final_state: SimState | None = None, tol: float = 1e-9) -> bool:
    """Check that everything drawn from the feed is still somewhere downstream."""
    st = final_state if final_state is not None else outcome.final_state
    held = sum(st.state_amounts[1:]) - outcome.initial_held
    in_flight = sum(b[0] for b in st.in_flight if b is not None)
    return abs(outcome.total_drawn - (held + in_flight)) <= tol
