import math

import numpy as np
import pytest

from mdlink.modem import (
    bits_of_value,
    constellation,
    demap_level,
    label_value,
    map_symbol,
    mod2_via_floor,
    noise_sigma,
)


def test_natural_mapping_corners():
    assert map_symbol((0, 0), "natural", 4) == -3.0
    assert map_symbol((1, 1), "natural", 4) == 3.0
    assert map_symbol((0, 1), "natural", 4) == -1.0
    assert map_symbol((1, 0), "natural", 4) == 1.0


def test_gray_mapping():
    # c = (1-MSB)(2 MSB + LSB) + MSB(2 MSB + (1-LSB))
    assert map_symbol((1, 0), "gray", 4) == 3.0
    assert map_symbol((0, 0), "gray", 4) == -3.0
    assert map_symbol((0, 1), "gray", 4) == -1.0
    assert map_symbol((1, 1), "gray", 4) == 1.0


def test_qam4_mapping():
    assert map_symbol((1, 0), "qam4", 4) == (1.0, -1.0)
    assert map_symbol((0, 0), "qam4", 4) == (-1.0, -1.0)
    assert map_symbol((1, 1), "qam4", 4) == (1.0, 1.0)


def test_mapping_errors():
    with pytest.raises(ValueError):
        map_symbol((0, 0), "natural", 3)
    with pytest.raises(ValueError):
        map_symbol((0, 0, 0), "gray", 8)
    with pytest.raises(ValueError):
        map_symbol((0, 0, 0), "qam4", 8)
    with pytest.raises(ValueError):
        map_symbol((0, 0), "banana", 4)


def test_natural_generalizes_to_any_power_of_two():
    for m in (2, 8, 16):
        n = int(math.log2(m))
        levels = sorted(map_symbol([(c >> (n - 1 - i)) & 1 for i in range(n)], "natural", m)
                        for c in range(m))
        assert levels == list(constellation(m).levels)


def test_labelings_are_bijections():
    for labeling in ("natural", "gray"):
        seen = set()
        for c in range(4):
            bits = bits_of_value(c, labeling, 4)
            assert label_value(bits, labeling, 4) == c
            seen.add(map_symbol(bits, labeling, 4))
        assert seen == {-3.0, -1.0, 1.0, 3.0}


def test_demap_level_roundtrip():
    for labeling in ("natural", "gray"):
        for c in range(4):
            bits = bits_of_value(c, labeling, 4)
            level = map_symbol(bits, labeling, 4)
            assert demap_level(level, labeling, 4) == bits
    with pytest.raises(ValueError):
        demap_level(2.0, "natural", 4)


def test_constellation_energy():
    c = constellation(4)
    assert c.levels == (-3.0, -1.0, 1.0, 3.0)
    assert c.es == pytest.approx((4 * 4 - 1) / 3)
    assert np.mean(np.square(c.levels)) == pytest.approx(c.es)


def test_mod2_via_floor():
    assert mod2_via_floor(0) == 0
    assert mod2_via_floor(3) == 1
    for x in range(1001):
        assert mod2_via_floor(x) == x % 2
    with pytest.raises(ValueError):
        mod2_via_floor(-1)


def test_mod2_matches_parity_on_larger_range():
    assert all(mod2_via_floor(x) == x % 2 for x in range(10_001))


def test_noise_sigma_reference_points():
    assert noise_sigma(10.0, 5.0, 1) == pytest.approx(0.5)
    assert noise_sigma(0.0, 1.0, 1) == pytest.approx(math.sqrt(0.5))
    assert noise_sigma(10 * math.log10(2), 2.0, 2) == pytest.approx(0.5)
