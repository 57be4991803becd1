"""Statistical tests checked against scipy as an independent reference."""

import numpy as np
import pytest
import scipy.special as scisp
import scipy.stats as scist
from hypothesis import given, settings
from hypothesis import strategies as st

from dyadbci import stats
from dyadbci.errors import DegenerateTestError, EmptyGroupError, SampleSizeError


class TestSpecialFunctions:
    def test_incomplete_beta_against_scipy(self):
        xs = np.linspace(0.0, 1.0, 41)
        for a in (0.5, 1.0, 2.5, 10.0, 40.0):
            for b in (0.5, 1.0, 3.0, 25.0):
                for x in xs:
                    ours = stats.regularized_incomplete_beta(a, b, float(x))
                    ref = float(scisp.betainc(a, b, x))
                    assert ours == pytest.approx(ref, abs=1e-10)

    def test_incomplete_beta_bounds(self):
        assert stats.regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
        assert stats.regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
        with pytest.raises(ValueError):
            stats.regularized_incomplete_beta(-1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            stats.regularized_incomplete_beta(1.0, 1.0, 1.5)

    def test_lower_gamma_against_scipy(self):
        for s in (0.5, 1.0, 3.5, 10.0, 50.0):
            for x in (0.0, 0.01, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0):
                ours = stats.regularized_lower_gamma(s, x)
                ref = float(scisp.gammainc(s, x))
                assert ours == pytest.approx(ref, abs=1e-10)

    def test_lower_gamma_guards(self):
        with pytest.raises(ValueError):
            stats.regularized_lower_gamma(0.0, 1.0)
        with pytest.raises(ValueError):
            stats.regularized_lower_gamma(1.0, -0.5)

    def test_chi_square_closed_form(self):
        # with df = 2 the survival function is exp(-x/2)
        assert stats.chi_square_sf(2.0, 2.0) == pytest.approx(np.exp(-1.0), abs=1e-12)
        assert stats.chi_square_sf(0.0, 4.0) == pytest.approx(1.0)

    def test_chi_square_against_scipy(self):
        for df in (1, 2, 5, 10):
            for x in (0.1, 1.0, 3.84, 10.0, 30.0):
                assert stats.chi_square_sf(x, df) == pytest.approx(
                    float(scist.chi2.sf(x, df)), abs=1e-10
                )

    def test_student_t_against_scipy(self):
        for df in (1, 3, 10, 59):
            for t in (-4.0, -0.77, 0.0, 0.5, 2.2, 8.0):
                assert stats.student_t_sf2(t, df) == pytest.approx(
                    float(2 * scist.t.sf(abs(t), df)), abs=1e-10
                )


class TestPairedT:
    def test_known_small_sample(self):
        res = stats.paired_t_test([1.0, 2.0, 3.0, 4.0], [1.1, 2.0, 3.2, 3.9])
        assert res.kind == "paired_t"
        assert res.statistic == pytest.approx(-0.7745966692, abs=1e-9)
        assert res.df == 3
        assert res.n == 4
        ref = scist.ttest_rel([1.0, 2.0, 3.0, 4.0], [1.1, 2.0, 3.2, 3.9])
        assert res.p_value == pytest.approx(float(ref.pvalue), abs=1e-10)

    def test_against_scipy_on_random_data(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n = int(rng.integers(3, 40))
            a = rng.normal(0, 1, n)
            b = a + rng.normal(0.2, 0.8, n)
            ours = stats.paired_t_test(a, b)
            ref = scist.ttest_rel(a, b)
            assert ours.statistic == pytest.approx(float(ref.statistic), abs=1e-6)
            assert ours.p_value == pytest.approx(float(ref.pvalue), abs=1e-6)

    def test_identical_inputs(self):
        res = stats.paired_t_test([0.3, 0.5, 0.7], [0.3, 0.5, 0.7])
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_constant_offset_is_degenerate(self):
        with pytest.raises(DegenerateTestError):
            stats.paired_t_test([1.0, 2.0, 3.0], [1.5, 2.5, 3.5])

    def test_sample_size_guard(self):
        with pytest.raises(SampleSizeError):
            stats.paired_t_test([1.0], [2.0])

    def test_shape_guard(self):
        with pytest.raises(ValueError):
            stats.paired_t_test([1.0, 2.0], [1.0, 2.0, 3.0])

    def test_sign_convention(self):
        res = stats.paired_t_test([2.0, 3.0, 4.1], [1.0, 2.0, 3.0])
        assert res.statistic > 0

    @given(
        n=st.integers(min_value=2, max_value=30),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=50, deadline=None)
    def test_antisymmetry(self, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=n)
        b = a + rng.normal(size=n) + 0.1
        fwd = stats.paired_t_test(a, b)
        rev = stats.paired_t_test(b, a)
        assert fwd.statistic == pytest.approx(-rev.statistic, rel=1e-12)
        assert fwd.p_value == pytest.approx(rev.p_value, rel=1e-12)


class TestKruskalWallis:
    def test_known_two_groups(self):
        res = stats.kruskal_wallis([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
        assert res.statistic == pytest.approx(27.0 / 7.0, abs=1e-12)
        assert res.df == 1
        ref = scist.kruskal([1, 2, 3], [4, 5, 6])
        assert res.p_value == pytest.approx(float(ref.pvalue), abs=1e-10)

    def test_ties_match_scipy(self):
        groups = [[1, 1, 2, 3], [2, 2, 3, 4], [1, 4, 4, 4]]
        res = stats.kruskal_wallis(groups)
        ref = scist.kruskal(*groups)
        assert res.statistic == pytest.approx(float(ref.statistic), abs=1e-10)
        assert res.p_value == pytest.approx(float(ref.pvalue), abs=1e-10)

    def test_against_scipy_on_random_data(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            k = int(rng.integers(2, 6))
            groups = [
                rng.integers(0, 12, size=int(rng.integers(2, 20))).astype(float)
                for _ in range(k)
            ]
            if all(np.all(g == groups[0][0]) for g in groups):
                continue
            ours = stats.kruskal_wallis(groups)
            ref = scist.kruskal(*groups)
            assert ours.statistic == pytest.approx(float(ref.statistic), abs=1e-6)
            assert ours.p_value == pytest.approx(float(ref.pvalue), abs=1e-6)

    def test_all_identical_observations(self):
        res = stats.kruskal_wallis([[2.0, 2.0], [2.0, 2.0, 2.0]])
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_group_guards(self):
        with pytest.raises(EmptyGroupError):
            stats.kruskal_wallis([[1.0, 2.0]])
        with pytest.raises(EmptyGroupError):
            stats.kruskal_wallis([[1.0], []])

    def test_rank_invariance(self):
        # H depends on ranks only, so a monotone transform changes nothing
        groups = [[0.1, 0.5, 0.3], [0.9, 0.7, 1.4], [0.2, 2.0]]
        res_raw = stats.kruskal_wallis(groups)
        res_exp = stats.kruskal_wallis([np.exp(g) for g in groups])
        assert res_raw.statistic == pytest.approx(res_exp.statistic, rel=1e-12)


class TestF1:
    def test_hand_computed_binary(self):
        confusion = np.array([[5.0, 1.0], [2.0, 4.0]])
        per_class, macro = stats.f1_scores(confusion)
        p0, r0 = 5 / 7, 5 / 6
        p1, r1 = 4 / 5, 4 / 6
        f0 = 2 * p0 * r0 / (p0 + r0)
        f1 = 2 * p1 * r1 / (p1 + r1)
        assert per_class[0] == pytest.approx(f0, abs=1e-12)
        assert per_class[1] == pytest.approx(f1, abs=1e-12)
        assert macro == pytest.approx((f0 + f1) / 2, abs=1e-12)

    def test_perfect_prediction(self):
        per_class, macro = stats.f1_scores(np.diag([3.0, 4.0, 5.0]))
        assert np.all(per_class == 1.0)
        assert macro == 1.0

    def test_absent_class_warns_and_scores_zero(self):
        confusion = np.array([[3.0, 0.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 0.0]])
        with pytest.warns(UserWarning):
            per_class, macro = stats.f1_scores(confusion)
        assert per_class[2] == 0.0
        assert macro == pytest.approx(np.mean(per_class))

    def test_never_predicted_class(self):
        confusion = np.array([[2.0, 0.0], [3.0, 0.0]])
        per_class, _ = stats.f1_scores(confusion)
        assert per_class[1] == 0.0

    def test_shape_guard(self):
        with pytest.raises(ValueError):
            stats.f1_scores(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            stats.f1_scores(np.array([[1.0, -1.0], [0.0, 1.0]]))


class TestBenjaminiHochberg:
    def test_all_rejected(self):
        reject = stats.benjamini_hochberg([0.01, 0.04, 0.03, 0.005], alpha=0.05)
        assert reject.tolist() == [True, True, True, True]

    def test_partial_rejection(self):
        p = [0.01, 0.02, 0.165, 0.205, 0.396]
        reject = stats.benjamini_hochberg(p, alpha=0.05)
        assert reject.tolist() == [True, True, False, False, False]

    def test_none_rejected(self):
        reject = stats.benjamini_hochberg([0.5, 0.9, 0.7], alpha=0.05)
        assert not np.any(reject)

    def test_empty_input(self):
        assert stats.benjamini_hochberg([]).size == 0

    def test_less_conservative_than_bonferroni(self):
        rng = np.random.default_rng(11)
        p = np.concatenate([rng.uniform(0, 0.01, 5), rng.uniform(0.2, 1.0, 20)])
        bh = int(np.sum(stats.benjamini_hochberg(p, alpha=0.05)))
        bonferroni = int(np.sum(p <= 0.05 / p.size))
        assert bh >= bonferroni

    @given(
        m=st.integers(min_value=1, max_value=40),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_rejections_respect_p_order(self, m, seed):
        rng = np.random.default_rng(seed)
        p = rng.uniform(0, 1, m)
        reject = stats.benjamini_hochberg(p, alpha=0.05)
        if np.any(reject):
            cutoff = p[reject].max()
            assert np.all(reject[p < cutoff])
