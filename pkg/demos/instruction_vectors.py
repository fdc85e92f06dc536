# The decision vector: 3 start bits per half hour, purification/reaction/mixing.
import numpy as np

from batchopt import InstructionVector, decode, random_init
from batchopt.encoding import BIT_PROCESSES

print(BIT_PROCESSES)
v = random_init(12, np.random.default_rng(0))
print(len(v), "bits,", v.bits.sum(), "set")  # at most half

for cmd in decode(v)[:6]:
    print(cmd.time, [p for p in BIT_PROCESSES if cmd.starts(p)])

text = v.to_text()  # what archives and files use
print(text[:40], "...")
assert InstructionVector.from_text(text) == v

# popcount is uniform on 0..L/2, so the mean sits at L/4
rng = np.random.default_rng(2)
counts = [random_init(12, rng).bits.sum() for _ in range(5000)]
print("mean ones", np.mean(counts), "vs", 72 / 4)
