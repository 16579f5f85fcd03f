import numpy as np
import pytest

from mdlink.channel import (
    ChannelTaps,
    add_awgn,
    convolve,
    example_channel,
    is_minimum_phase,
    make_taps,
    parse_channel,
)


def test_example_channel_values():
    assert example_channel(0).h.tolist() == [1.0]
    expect2 = np.array([3.0, 2.0, 1.0]) / np.sqrt(14.0)
    assert np.allclose(example_channel(2).h, expect2, atol=1e-15)
    expect5 = np.arange(6, 0, -1) / np.sqrt(91.0)
    assert np.allclose(example_channel(5).h, expect5, atol=1e-15)


def test_example_channel_unit_energy_and_min_phase():
    for L in range(9):
        taps = example_channel(L)
        assert abs(np.dot(taps.h, taps.h) - 1.0) <= 1e-12
        assert taps.h[0] != 0.0
        assert is_minimum_phase(taps)


def test_example_channel_rejects_negative_memory():
    with pytest.raises(ValueError):
        example_channel(-1)


def test_make_taps_renormalizes_with_warning():
    with pytest.warns(UserWarning):
        taps = make_taps([3.0, 2.0, 1.0])
    assert np.allclose(taps.h, np.array([3.0, 2.0, 1.0]) / np.sqrt(14.0))
    # already normalized: silent
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        make_taps(example_channel(2).h)


def test_channel_taps_invariants():
    with pytest.raises(ValueError):
        ChannelTaps(np.array([0.5, 0.5]))  # not unit energy
    with pytest.raises(ValueError):
        make_taps([0.0, 1.0])  # leading zero
    with pytest.raises(ValueError):
        make_taps([0.0, 0.0])


def test_parse_channel():
    assert parse_channel("example:2").memory == 2
    taps = parse_channel("0.8,0.6")
    assert np.allclose(taps.h, [0.8, 0.6])
    with pytest.raises(ValueError):
        parse_channel("example:x")
    with pytest.raises(ValueError):
        parse_channel("")


def test_convolve_identity_for_memoryless():
    taps = example_channel(0)
    x = np.array([3.0, -1.0, 1.0])
    assert np.array_equal(convolve(x, taps, history=-3.0), x)


def test_convolve_uses_history():
    taps = example_channel(2)
    x = np.array([3.0, -3.0, -3.0, -3.0])
    r = convolve(x, taps, history=-3.0)
    # r[0] = 3 h0 - 3 h1 - 3 h2 = 0 for taps (3,2,1)/sqrt(14)
    assert r[0] == pytest.approx(0.0, abs=1e-12)
    assert r[1] == pytest.approx(-3 * taps.h[0] + 3 * taps.h[1] - 3 * taps.h[2])


def test_convolve_linearity_with_matched_history():
    taps = example_channel(3)
    rng = np.random.default_rng(1)
    a = rng.normal(size=32)
    b = rng.normal(size=32)
    ra = convolve(a, taps, history=0.0)
    rb = convolve(b, taps, history=0.0)
    rab = convolve(a + b, taps, history=0.0)
    assert np.allclose(rab, ra + rb, atol=1e-12)


def test_convolve_impulse_recovers_taps():
    taps = example_channel(2)
    base = np.full(8, -3.0)
    bumped = base.copy()
    bumped[3] += 1.0
    diff = convolve(bumped, taps, history=-3.0) - convolve(base, taps, history=-3.0)
    assert np.allclose(diff[3:6], taps.h, atol=1e-12)
    assert np.allclose(diff[:3], 0.0, atol=1e-12)


def test_add_awgn_zero_sigma_and_determinism():
    x = np.linspace(-1, 1, 100)
    assert np.array_equal(add_awgn(x, 0.0, 7), x)
    assert np.array_equal(add_awgn(x, 0.4, 7), add_awgn(x, 0.4, 7))
    assert not np.array_equal(add_awgn(x, 0.4, 7), add_awgn(x, 0.4, 8))
    with pytest.raises(ValueError):
        add_awgn(x, -0.1, 7)


def test_add_awgn_variance():
    noise = add_awgn(np.zeros(1_000_000), 0.5, 123)
    assert np.var(noise) == pytest.approx(0.25, rel=0.01)
    assert np.mean(noise) == pytest.approx(0.0, abs=0.005)


def test_is_minimum_phase():
    assert is_minimum_phase(example_channel(0))
    taps2 = example_channel(2)
    assert is_minimum_phase(taps2)
    roots = np.roots(taps2.h)
    assert np.max(np.abs(roots)) == pytest.approx(1 / np.sqrt(3), rel=1e-9)
    flipped = make_taps(np.ascontiguousarray(taps2.h[::-1]))
    assert not is_minimum_phase(flipped)
