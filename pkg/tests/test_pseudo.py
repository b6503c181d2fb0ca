import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from residualdep import BivariateSample, DataError, PseudoSample, TieError, TiePolicy, \
    compute_ranks, frechet_pseudo, joint_exceedance_count, pareto_pseudo, shift_half


def _sample(x, y):
    return BivariateSample(np.asarray(x, float), np.asarray(y, float))


class TestRanks:
    def test_sorted_distinct(self):
        rx, _ = compute_ranks(_sample([1.0, 2.0, 3.0], [0, 1, 2]))
        assert_array_equal(rx, [1, 2, 3])

    def test_hand_counted_permutation(self):
        # rank = #{j : x_j <= x_i}
        rx, _ = compute_ranks(_sample([3.0, 1.0, 2.0], [0, 1, 2]))
        assert_array_equal(rx, [3, 1, 2])

    def test_tie_first_occurrence(self):
        rx, _ = compute_ranks(_sample([1.0, 1.0], [0, 1]))
        assert_array_equal(rx, [1, 2])

    def test_tie_strict_raises_with_value(self):
        with pytest.raises(TieError, match="2.5"):
            compute_ranks(_sample([2.5, 2.5, 1.0], [0, 1, 2]), TiePolicy.STRICT)

    def test_tie_jitter_is_deterministic_permutation(self):
        s = _sample([1.0, 1.0, 1.0, 4.0], [0, 1, 2, 3])
        rx1, _ = compute_ranks(s, TiePolicy.JITTER, jitter_seed=5)
        rx2, _ = compute_ranks(s, TiePolicy.JITTER, jitter_seed=5)
        assert_array_equal(rx1, rx2)
        assert sorted(rx1) == [1, 2, 3, 4]
        assert rx1[3] == 4  # noise at 1e-9 scale cannot flip a gap of 3

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=60, unique=True))
    @settings(max_examples=60, deadline=None)
    def test_rank_definition_matches_count(self, xs):
        xs = np.asarray(xs)
        rx, _ = compute_ranks(_sample(xs, np.arange(len(xs))))
        counts = [(xs <= xi).sum() for xi in xs]
        assert_array_equal(rx, counts)


class TestPseudoValues:
    def test_pareto_example_n3(self):
        t = pareto_pseudo(np.array([1, 2, 3]), np.array([2, 1, 3]))
        assert_allclose(t, [4 / 3, 4 / 3, 4.0], rtol=0, atol=0)

    def test_pareto_comonotone_is_plotting_position(self):
        r = np.array([2, 4, 1, 3])
        assert_allclose(pareto_pseudo(r, r), 5.0 / (5.0 - r), atol=0)

    def test_top_rank_hits_maximum(self):
        n = 6
        rx = np.arange(1, n + 1)
        t = pareto_pseudo(rx, rx)
        assert t.max() == n + 1

    def test_frechet_example_n3(self):
        v = frechet_pseudo(np.array([3, 1, 2]), np.array([3, 2, 1]))
        assert v[0] == pytest.approx(3.476059496782207, abs=1e-12)
        assert shift_half(v)[0] == pytest.approx(3.976059496782207, abs=1e-12)

    def test_frechet_equal_ranks(self):
        r = np.array([2, 4, 1, 3])
        assert_allclose(frechet_pseudo(r, r), -1.0 / np.log(r / 5.0), atol=1e-15)

    def test_bottom_rank_smallest_value(self):
        n = 1000
        rx = np.arange(1, n + 1)
        v = frechet_pseudo(rx, rx)
        assert v.min() == pytest.approx(1.0 / np.log(n + 1), rel=1e-12)

    def test_value_ranges(self):
        rng = np.random.default_rng(3)
        n = 200
        s = _sample(rng.random(n), rng.random(n))
        p = PseudoSample.from_sample(s)
        assert p.t_sorted.min() >= (n + 1) / n
        assert p.t_sorted.max() <= n + 1
        assert np.all(np.isfinite(p.v_sorted))
        assert p.v_sorted.min() >= 1.0 / np.log(n + 1) - 1e-12
        assert p.v_sorted.max() <= -1.0 / np.log(n / (n + 1)) + 1e-12
        assert_allclose(p.vstar_sorted, p.v_sorted + 0.5, rtol=0, atol=0)

    def test_rank_invariance_under_monotone_transforms(self):
        rng = np.random.default_rng(8)
        x, y = rng.random(100), rng.random(100)
        base = PseudoSample.from_sample(_sample(x, y))
        warped = PseudoSample.from_sample(_sample(np.exp(3 * x), np.arctan(y) - 2))
        assert_array_equal(base.rx, warped.rx)
        assert_allclose(base.t_sorted, warped.t_sorted, rtol=0, atol=0)
        assert_allclose(base.v_sorted, warped.v_sorted, rtol=0, atol=0)

    def test_order_statistic_identity_brute_force(self):
        rng = np.random.default_rng(21)
        for n in (5, 17, 50):
            x, y = rng.random(n), rng.random(n)
            p = PseudoSample.from_sample(_sample(x, y))
            rmin = np.minimum(p.rx, p.ry)
            brute = np.sort((n + 1.0) / (n + 1.0 - np.sort(rmin)))
            assert_allclose(p.t_sorted, brute, rtol=0, atol=0)

    def test_rejects_nan_and_mismatched(self):
        with pytest.raises(DataError):
            BivariateSample(np.array([1.0, np.nan]), np.array([1.0, 2.0]))
        with pytest.raises(DataError):
            BivariateSample(np.array([1.0, 2.0]), np.array([1.0]))
        with pytest.raises(DataError):
            BivariateSample(np.array([1.0]), np.array([1.0]))


class TestJointExceedance:
    def test_comonotone_counts_m(self):
        x = np.arange(20.0)
        s = _sample(x, 2 * x + 1)
        for m in (1, 5, 20):
            assert joint_exceedance_count(s, m, 1.0) == m

    def test_antimonotone_zero(self):
        x = np.arange(20.0)
        s = _sample(x, -x)
        for m in range(1, 11):
            assert joint_exceedance_count(s, m, 1.0) == 0

    def test_matches_indicator_count_brute_force(self):
        rng = np.random.default_rng(99)
        n = 20
        s = _sample(rng.random(n), rng.random(n))
        p = PseudoSample.from_sample(s)
        for m in range(1, n + 1):
            # O(n^2) recount: pairwise comparisons define the order statistics
            xs, ys = np.sort(s.x), np.sort(s.y)
            brute = sum(
                1 for i in range(n)
                if s.x[i] >= xs[n - m] and s.y[i] >= ys[n - m]
            )
            via_t = int(np.sum(p.t_sorted >= (n + 1) / m))
            assert brute == joint_exceedance_count(s, m, 1.0) == via_t

    def test_indicator_identity_many_samples(self):
        rng = np.random.default_rng(1234)
        for _ in range(50):
            n = int(rng.integers(2, 101))
            s = _sample(rng.random(n), rng.random(n))
            p = PseudoSample.from_sample(s)
            ms = np.arange(1, n + 1)
            counts = np.array([joint_exceedance_count(s, int(m), 1.0) for m in ms])
            via_t = (p.t_sorted[None, :] >= (n + 1) / ms[:, None]).sum(axis=1)
            assert_array_equal(counts, via_t)

    def test_bounds_checked(self):
        s = _sample(np.arange(5.0), np.arange(5.0))
        with pytest.raises(ValueError):
            joint_exceedance_count(s, 6, 1.0)
        with pytest.raises(ValueError):
            joint_exceedance_count(s, 1, 0.1)
