from collections import Counter

import pytest

from quasicrypt.rng import SplitMix64


@pytest.mark.parametrize("seed,expected", [
    (0, [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]),
    (1234567, [6457827717110365317, 3203168211198807973, 9817491932198370423]),
])
def test_reference_outputs(seed, expected):
    rng = SplitMix64(seed)
    assert [rng.next_u64() for _ in expected] == expected


def test_deterministic_permutation():
    assert SplitMix64(5).permutation(10) == SplitMix64(5).permutation(10)
    assert sorted(SplitMix64(5).permutation(10)) == list(range(10))


def test_below_range_and_spread():
    rng = SplitMix64(1)
    counts = Counter(rng.below(3) for _ in range(3000))
    assert set(counts) == {0, 1, 2}
    assert all(900 < c < 1100 for c in counts.values())
    with pytest.raises(ValueError):
        rng.below(0)


def test_permutations_cover_s3():
    rng = SplitMix64(2)
    seen = Counter(tuple(rng.permutation(3)) for _ in range(600))
    assert len(seen) == 6
