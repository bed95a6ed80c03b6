import collections

import pytest

from qrcd import SplitMix64

# published stream for the reference splitmix64 implementation
REFERENCE_SEED = 1234567
REFERENCE_OUTPUTS = [
    6457827717110365317,
    3203168211198807973,
    9817491932198370423,
    4593380528125082431,
]

# frozen draw sequence: pins the cross-platform determinism contract
GOLDEN_SEED_42_D5 = [
    3, 1, 3, 4, 0, 2, 0, 3, 0, 4, 2, 1, 3, 0, 1, 0, 4, 1, 2, 3,
    2, 1, 0, 4, 2, 0, 2, 1, 3, 1, 1, 2, 3, 3, 0, 3, 3, 3, 4, 4,
    1, 2, 4, 4, 3, 0, 1, 0, 3, 0, 4, 3, 2, 2, 4, 3, 4, 4, 2, 4,
    0, 2, 2, 3, 2, 3, 4, 4, 2, 2, 1, 2, 0, 4, 0, 4, 0, 4, 4, 0,
    2, 1, 0, 0, 3, 2, 4, 4, 0, 4, 4, 1, 0, 1, 1, 4, 3, 1, 0, 2,
]


def test_matches_reference_stream():
    rng = SplitMix64(REFERENCE_SEED)
    assert [rng.next_uint64() for _ in range(4)] == REFERENCE_OUTPUTS


def test_golden_draw_sequence():
    rng = SplitMix64(42)
    assert [rng.randbelow(5) for _ in range(100)] == GOLDEN_SEED_42_D5


def test_same_seed_same_stream():
    a, b = SplitMix64(987), SplitMix64(987)
    assert [a.randbelow(17) for _ in range(500)] == [b.randbelow(17) for _ in range(500)]


def test_d1_always_zero():
    rng = SplitMix64(5)
    assert all(rng.randbelow(1) == 0 for _ in range(50))


def test_uniformity_chi_square():
    # 4 degrees of freedom; cutoff at significance 1e-6 is 33.38
    rng = SplitMix64(2024)
    counts = collections.Counter(rng.randbelow(5) for _ in range(1_000_000))
    expected = 200_000
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 33.38
    for i in range(5):
        assert 0.198 <= counts[i] / 1_000_000 <= 0.202


def test_range_and_errors():
    rng = SplitMix64(1)
    assert all(0 <= rng.randbelow(7) < 7 for _ in range(1000))
    with pytest.raises(ValueError):
        rng.randbelow(0)
    with pytest.raises(ValueError):
        SplitMix64(-1)
