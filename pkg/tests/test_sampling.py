import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from unionvol.sampling import (LEVEL_WINDOW_HI, LEVEL_WINDOW_LO, level,
                               make_rng, poisson, poisson_many, pow2)


def _chi_square_poisson(draws, rate):
    """GOF p-value of draws against the Poisson(rate) pmf, tail-merged."""
    draws = np.asarray(draws)
    hi = int(draws.max()) + 1
    observed = np.bincount(draws, minlength=hi + 1).astype(float)
    expected = scipy.stats.poisson.pmf(np.arange(hi + 1), rate) * len(draws)
    expected[-1] = len(draws) - expected[:-1].sum()  # fold the tail in
    # merge bins until every expected count is >= 5
    obs_bins, exp_bins = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= 5.0:
            obs_bins.append(o_acc)
            exp_bins.append(e_acc)
            o_acc = e_acc = 0.0
    obs_bins[-1] += o_acc
    exp_bins[-1] += e_acc
    stat, p = scipy.stats.chisquare(obs_bins, exp_bins)
    return p


class TestPoisson:
    def test_zero_rate_returns_zero_without_consuming_randomness(self):
        rng = make_rng(7)
        before = rng.bit_generator.state["state"]["state"]
        assert poisson(0.0, rng) == 0
        assert rng.bit_generator.state["state"]["state"] == before

    @pytest.mark.parametrize("rate", [-1.0, math.inf, math.nan])
    def test_bad_rate_rejected(self, rate):
        with pytest.raises(ValueError):
            poisson(rate, make_rng(0))

    def test_deterministic_replay(self):
        a = [poisson(4.2, make_rng(123)) for _ in range(1)]
        b = [poisson(4.2, make_rng(123)) for _ in range(1)]
        assert a == b
        seq1 = [poisson(77.0, make_rng(5)) for _ in range(1)]
        seq2 = [poisson(77.0, make_rng(5)) for _ in range(1)]
        assert seq1 == seq2

    @pytest.mark.parametrize("rate", [0.3, 3.7, 12.0])
    def test_inversion_regime_matches_poisson_law(self, rate):
        rng = make_rng(42)
        draws = [poisson(rate, rng) for _ in range(20_000)]
        assert _chi_square_poisson(draws, rate) > 1e-4

    @pytest.mark.parametrize("rate", [35.0, 80.0, 400.0])
    def test_rejection_regime_matches_poisson_law(self, rate):
        rng = make_rng(99)
        draws = [poisson(rate, rng) for _ in range(20_000)]
        assert _chi_square_poisson(draws, rate) > 1e-4

    def test_moments_across_the_cutoff(self):
        # mean and variance must not jump at the method switch
        rng = make_rng(1)
        for rate in (29.5, 30.5):
            draws = np.array([poisson(rate, rng) for _ in range(40_000)])
            assert draws.mean() == pytest.approx(rate, rel=0.02)
            assert draws.var() == pytest.approx(rate, rel=0.05)

    def test_poisson_many_matches_scalar_sequence(self):
        rates = [0.0, 2.5, 0.0, 50.0, 7.0]
        batch = poisson_many(rates, make_rng(11))
        rng = make_rng(11)
        singles = [poisson(r, rng) for r in rates]
        assert batch.tolist() == singles


class TestLevel:
    def _threshold(self, n, eps):
        return LEVEL_WINDOW_LO * math.log(n) / (eps * eps)

    def test_window_constants(self):
        assert LEVEL_WINDOW_LO == 32.0
        assert LEVEL_WINDOW_HI == 64.0
        assert LEVEL_WINDOW_HI == 2 * LEVEL_WINDOW_LO

    @given(st.floats(min_value=1e-6, max_value=1e12),
           st.integers(min_value=2, max_value=10 ** 6),
           st.floats(min_value=0.01, max_value=1.0))
    @settings(max_examples=300)
    def test_window_membership(self, vol, n, eps):
        l = level(vol, n, eps)
        t = self._threshold(n, eps)
        assert math.ldexp(t, l) <= vol < math.ldexp(t, l + 1)

    @given(st.integers(min_value=2, max_value=10 ** 4),
           st.floats(min_value=0.05, max_value=1.0),
           st.integers(min_value=-20, max_value=40))
    @settings(max_examples=200)
    def test_exact_boundaries(self, n, eps, l):
        t = self._threshold(n, eps)
        at_edge = math.ldexp(t, l)
        assert level(at_edge, n, eps) == l
        just_below = math.nextafter(at_edge, 0.0)
        assert level(just_below, n, eps) == l - 1

    def test_monotone_in_volume(self):
        vols = np.geomspace(1.0, 1e9, 400)
        ls = [level(v, 128, 0.25) for v in vols]
        assert all(a <= b for a, b in zip(ls, ls[1:]))

    def test_rejects_bad_volume(self):
        for bad in (0.0, -1.0, math.inf, math.nan):
            with pytest.raises(ValueError):
                level(bad, 16, 0.5)

    def test_doubling_volume_steps_level_by_one(self):
        base = 12345.6
        assert level(2 * base, 64, 0.3) == level(base, 64, 0.3) + 1


class TestPow2:
    def test_values(self):
        assert pow2(0) == 1.0
        assert pow2(10) == 1024.0
        assert pow2(-3) == 0.125
        assert pow2(math.inf) == math.inf
