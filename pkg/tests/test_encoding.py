import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from batchopt.encoding import (
    BIT_PROCESSES,
    InstructionVector,
    TimestepCommand,
    decode,
    encode,
    from_starts,
    random_init,
)


def test_length_at_12h():
    assert len(InstructionVector(np.zeros(72, dtype=int), 12)) == 72


def test_index_convention():
    assert BIT_PROCESSES == ("purification", "reaction", "mixing")
    bits = np.zeros(72, dtype=int)
    bits[0] = 1
    cmds = decode(InstructionVector(bits, 12))
    assert cmds[0] == TimestepCommand(0.0, start_purification=True)
    assert not any(c.start_reaction or c.start_mixing for c in cmds)


def test_all_zero_decodes_to_idle_steps():
    cmds = decode(InstructionVector(np.zeros(72, dtype=int), 12))
    assert len(cmds) == 24
    assert [c.time for c in cmds] == [k / 2 for k in range(24)]
    assert not any(c.start_purification or c.start_reaction or c.start_mixing for c in cmds)


def test_from_starts_positions():
    v = from_starts([(0, "mixing"), (4.5, "reaction"), (11.5, "purification")], 12)
    assert np.flatnonzero(v.bits).tolist() == [2, 9 * 3 + 1, 23 * 3]


@pytest.mark.parametrize("bits, horizon", [
    (np.zeros(71, dtype=int), 12),
    (np.full(72, 2), 12),
    (np.zeros((2, 36), dtype=int), 12),
])
def test_rejects_malformed(bits, horizon):
    with pytest.raises(ValueError):
        InstructionVector(bits, horizon)


def test_encode_rejects_off_grid_time():
    with pytest.raises(ValueError):
        encode([TimestepCommand(12.0, start_mixing=True)], 12)
    with pytest.raises(ValueError):
        encode([TimestepCommand(0.25, start_mixing=True)], 12)


def test_bits_are_read_only():
    v = InstructionVector(np.zeros(6, dtype=int), 1)
    with pytest.raises(ValueError):
        v.bits[0] = 1


def test_text_round_trip():
    v = random_init(12, np.random.default_rng(3))
    text = v.to_text()
    assert text.splitlines()[0] == "# horizon=12"
    assert InstructionVector.from_text(text) == v


def test_text_rejects_garbage():
    with pytest.raises(ValueError):
        InstructionVector.from_text("0101")
    with pytest.raises(ValueError):
        InstructionVector.from_text("# horizon=1\n01x100\n")


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 48).flatmap(
    lambda n: st.tuples(st.just(n / 2), st.lists(st.integers(0, 1), min_size=3 * n, max_size=3 * n))))
def test_encode_decode_identity(case):
    horizon, bits = case
    v = InstructionVector(np.array(bits), horizon)
    cmds = decode(v)
    assert len(cmds) == 2 * horizon
    assert encode(cmds, horizon) == v
    assert decode(encode(cmds, horizon)) == cmds


def test_random_init_deterministic():
    a = random_init(12, np.random.default_rng(11))
    b = random_init(12, np.random.default_rng(11))
    assert a == b


@pytest.mark.parametrize("horizon", [0.5, 12, 168])
def test_random_init_at_most_half(horizon):
    rng = np.random.default_rng(0)
    for _ in range(500):
        v = random_init(horizon, rng)
        assert v.bits.sum() <= len(v) // 2


def test_random_init_popcount_law():
    rng = np.random.default_rng(2024)
    counts = np.array([random_init(12, rng).bits.sum() for _ in range(10_000)])
    assert abs(counts.mean() - 72 / 4) <= 0.05 * 72 / 4
    observed = np.bincount(counts, minlength=37)
    assert len(observed) == 37
    assert stats.chisquare(observed).pvalue > 0.001


def test_random_init_positions_uniform():
    rng = np.random.default_rng(5)
    hits = sum(random_init(12, rng).bits.astype(int) for _ in range(5000))
    assert stats.chisquare(hits).pvalue > 0.001
