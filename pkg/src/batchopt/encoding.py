"""Binary instruction vectors.

A schedule for an ``H``-hour horizon is a flat 0/1 vector of length
``2 * H * 3``: one group of three bits per half-hour step. Within a group the
bit positions follow :data:`BIT_PROCESSES`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .plant import TICKS_PER_HOUR, expected_length

#: Process started by each bit position within a timestep group. Swap to
#: ``("mixing", "reaction", "purification")`` to read groups the other way round.
BIT_PROCESSES = ("purification", "reaction", "mixing")


@dataclass(frozen=True, eq=False)
class InstructionVector:
    bits: np.ndarray
    horizon: float

    def __post_init__(self):
        bits = np.asarray(self.bits)
        n = expected_length(self.horizon)
        if bits.ndim != 1 or bits.shape[0] != n:
            raise ValueError(f"expected {n} bits for a {self.horizon} h horizon, got shape {bits.shape}")
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("instruction vector must be binary")
        bits = bits.astype(np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return self.bits.shape[0]

    def __eq__(self, other):
        if not isinstance(other, InstructionVector):
            return NotImplemented
        return self.horizon == other.horizon and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.horizon, self.bits.tobytes()))

    @property
    def n_steps(self) -> int:
        return len(self) // 3

    def to_text(self) -> str:
        return f"# horizon={format_horizon(self.horizon)}\n" + "".join(map(str, self.bits.tolist())) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "InstructionVector":
        horizon = None
        line = None
        for raw in text.splitlines():
            raw = raw.strip()
            if not raw:
                continue
            if raw.startswith("#"):
                key, _, value = raw[1:].strip().partition("=")
                if key.strip() == "horizon":
                    horizon = float(value)
            else:
                line = raw
        if horizon is None or line is None:
            raise ValueError("text must contain a '# horizon=H' header and one line of bits")
        if set(line) - {"0", "1"}:
            raise ValueError("bit line may contain only '0' and '1'")
        return cls(np.frombuffer(line.encode(), dtype=np.uint8) - ord("0"), horizon)


def format_horizon(horizon: float) -> str:
    return str(int(horizon)) if float(horizon).is_integer() else str(horizon)


@dataclass(frozen=True)
class TimestepCommand:
    time: float
    start_purification: bool = False
    start_reaction: bool = False
    start_mixing: bool = False

    def starts(self, process: str) -> bool:
        return getattr(self, f"start_{process}")


def decode(v: InstructionVector) -> list[TimestepCommand]:
    groups = v.bits.reshape(-1, 3)
    out = []
    for k, group in enumerate(groups):
        flags = {f"start_{p}": bool(group[j]) for j, p in enumerate(BIT_PROCESSES)}
        out.append(TimestepCommand(time=k / TICKS_PER_HOUR, **flags))
    return out


def encode(commands: Iterable[TimestepCommand], horizon: float) -> InstructionVector:
    bits = np.zeros(expected_length(horizon), dtype=np.uint8)
    n_steps = len(bits) // 3
    for cmd in commands:
        k = cmd.time * TICKS_PER_HOUR
        if k != round(k) or not 0 <= k < n_steps:
            raise ValueError(f"command time {cmd.time} is off the grid for {horizon} h")
        for j, p in enumerate(BIT_PROCESSES):
            if cmd.starts(p):
                bits[int(k) * 3 + j] = 1
    return InstructionVector(bits, horizon)


def from_starts(starts: Iterable[tuple[float, str]], horizon: float) -> InstructionVector:
    """Build a vector from ``(time, process)`` pairs, e.g. ``(4.5, "reaction")``."""
    by_time: dict[float, dict[str, bool]] = {}
    for time, process in starts:
        if process not in BIT_PROCESSES:
            raise ValueError(f"unknown process {process!r}")
        by_time.setdefault(time, {})[f"start_{process}"] = True
    return encode((TimestepCommand(t, **f) for t, f in by_time.items()), horizon)


def random_init(horizon: float, rng: np.random.Generator) -> InstructionVector:
    """Random schedule with at most half of its bits set.

    The number of ones is uniform on ``0 .. L // 2``, their positions uniform
    without replacement.
    """
    n = expected_length(horizon)
    k = int(rng.integers(0, n // 2 + 1))
    bits = np.zeros(n, dtype=np.uint8)
    bits[rng.choice(n, size=k, replace=False)] = 1
    return InstructionVector(bits, horizon)
