import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from somascope.errors import DataError
from somascope.inference import (
    chi_square_sf,
    f_sf,
    fit_binomial_logit,
    lr_test,
    rank_average,
    spearman,
    t_sf,
    two_way_anova,
)


def oracle_ranks(values):
    """Independent average-rank oracle: positions from a sorted copy."""
    s = sorted(values)
    return [(s.index(v) + 1 + (len(s) - 1 - s[::-1].index(v) + 1)) / 2 for v in values]


def oracle_pearson(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


class TestSurvivalFunctions:
    def test_chi_square_at_zero(self):
        assert chi_square_sf(0.0, 3) == 1.0

    def test_chi_square_reference(self):
        # Series oracle value: P(chi2_1 > 3.84) ~ 0.05.
        assert chi_square_sf(3.84, 1) == pytest.approx(0.0500, abs=5e-4)

    def test_chi_square_series_oracle_even_df(self):
        # For even df the survival function has the closed form
        # exp(-x/2) * sum_{k<df/2} (x/2)^k / k!.
        for df in (2, 4, 10):
            for x in (0.5, 2.0, 7.3):
                half = x / 2
                expected = math.exp(-half) * sum(half**k / math.factorial(k) for k in range(df // 2))
                assert chi_square_sf(x, df) == pytest.approx(expected, abs=1e-10)

    def test_t_symmetry(self):
        assert t_sf(-1.3, 7) == pytest.approx(1.0 - t_sf(1.3, 7), abs=1e-12)

    def test_t_df1_closed_form(self):
        # Cauchy: P(T > x) = 1/2 - atan(x)/pi.
        for x in (0.0, 0.7, 2.5):
            assert t_sf(x, 1) == pytest.approx(0.5 - math.atan(x) / math.pi, abs=1e-10)

    def test_f_at_zero(self):
        assert f_sf(0.0, 3, 10) == 1.0

    @given(st.floats(0.01, 50), st.floats(0.02, 50))
    @settings(max_examples=50)
    def test_monotone_decreasing(self, a, b):
        lo, hi = sorted((a, b))
        if hi - lo < 1e-9:
            return
        assert chi_square_sf(hi, 4) <= chi_square_sf(lo, 4)
        assert f_sf(hi, 3, 8) <= f_sf(lo, 3, 8)

    def test_invalid_df(self):
        with pytest.raises(DataError):
            chi_square_sf(1.0, 0)


class TestSpearman:
    def test_identity(self):
        r = spearman(list(range(1, 26)), list(range(1, 26)))
        assert r.rho == 1.0
        assert r.p == 0.0

    def test_reversal_negates(self):
        x = [3.0, 1.0, 4.0, 1.5, 9.0, 2.0]
        y = [1.0, 5.0, 2.0, 8.0, 3.0, 9.0]
        r1 = spearman(x, y)
        r2 = spearman([-v for v in x], y)
        assert r2.rho == pytest.approx(-r1.rho, abs=1e-12)

    def test_symmetry(self):
        x = [1.0, 2.0, 2.0, 4.0, 5.0]
        y = [5.0, 6.0, 7.0, 8.0, 7.0]
        assert spearman(x, y).rho == pytest.approx(spearman(y, x).rho, abs=1e-15)

    def test_against_rank_pearson_oracle(self):
        # Expected value derived via the independent rank-and-Pearson oracle.
        x = [1, 2, 3, 4, 5]
        y = [5, 6, 7, 8, 7]
        expected = oracle_pearson(oracle_ranks(x), oracle_ranks(y))
        r = spearman(x, y)
        assert r.rho == pytest.approx(expected, abs=1e-12)

    def test_randomized_oracle_with_ties(self):
        rng = random.Random(42)
        for _ in range(100):
            n = rng.randint(5, 50)
            x = [rng.randint(0, 10) + 0.5 * rng.randint(0, 4) for _ in range(n)]
            y = [rng.randint(0, 10) + 0.5 * rng.randint(0, 4) for _ in range(n)]
            if len(set(x)) < 2 or len(set(y)) < 2:
                continue
            expected_rho = oracle_pearson(oracle_ranks(x), oracle_ranks(y))
            r = spearman(x, y)
            assert abs(r.rho - expected_rho) <= 1e-12
            if abs(expected_rho) < 1.0 - 1e-12:
                t = expected_rho * math.sqrt((n - 2) / (1 - expected_rho**2))
                expected_p = 2 * t_sf(abs(t), n - 2)
                assert abs(r.p - expected_p) <= 1e-9

    def test_monotone_transform_invariance(self):
        x = [0.3, 1.2, 5.5, 2.2, 0.01, 9.0]
        y = [4.0, 2.0, 8.0, 1.0, 0.5, 3.0]
        base = spearman(x, y).rho
        assert spearman([math.exp(v) for v in x], y).rho == pytest.approx(base, abs=1e-15)

    def test_exact_permutation(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
        y = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0]
        r = spearman(x, y, method="exact")
        rx, ry = rank_average(x), rank_average(y)
        count = sum(
            1
            for perm in itertools.permutations(range(6))
            if abs(oracle_pearson(list(rx), [ry[i] for i in perm])) >= abs(r.rho) - 1e-12
        )
        assert r.p == pytest.approx(count / math.factorial(6), abs=1e-12)

    def test_errors(self):
        with pytest.raises(DataError):
            spearman([1, 2], [1, 2])
        with pytest.raises(DataError):
            spearman([1, 2, 3], [1, 2])
        with pytest.raises(DataError):
            spearman([1, 1, 1], [1, 2, 3])


class TestBinomialLogit:
    def test_equal_proportions_zero_slope(self):
        design = [[1, 0], [1, 1]]
        res = fit_binomial_logit([30, 30], [100, 100], design)
        assert abs(res.coefficients[1]) < 1e-8
        assert res.converged

    def test_saturated_closed_form(self):
        res = fit_binomial_logit([30, 60], [100, 100], [[1, 0], [1, 1]])
        assert res.coefficients[0] == pytest.approx(math.log(30 / 70), abs=1e-6)
        assert res.coefficients[1] == pytest.approx(math.log(60 / 40) - math.log(30 / 70), abs=1e-6)

    def test_lr_matches_deviance_formula(self):
        s = np.array([30.0, 60.0])
        t = np.array([100.0, 100.0])
        res = fit_binomial_logit(s, t, [[1, 0], [1, 1]])
        pooled = s.sum() / t.sum()
        phat = s / t
        dev = 2 * float(
            (s * np.log(phat / pooled)).sum() + ((t - s) * np.log((1 - phat) / (1 - pooled))).sum()
        )
        assert res.lr_stat == pytest.approx(dev, abs=1e-8)
        assert res.lr_p == pytest.approx(chi_square_sf(dev, 1), abs=1e-8)

    def test_month_trend_sign(self):
        # Success probability declines with month: the fitted slope is negative.
        months = np.arange(12.0)
        totals = np.full(12, 5000.0)
        prob = 1 / (1 + np.exp(-(-2.0 - 0.04 * months)))
        successes = np.round(totals * prob)
        design = np.column_stack([np.ones(12), months])
        res = fit_binomial_logit(successes, totals, design)
        assert res.converged
        assert res.coefficients[1] < 0

    def test_rank_deficiency_error(self):
        with pytest.raises(DataError):
            fit_binomial_logit([1, 2], [10, 10], [[1, 2], [1, 2]])

    def test_saturated_multi_group_log_odds(self):
        # One parameter per group reproduces empirical log-odds within 1e-6.
        s = [10.0, 40.0, 70.0]
        t = [100.0, 100.0, 100.0]
        design = [[1, 0, 0], [1, 1, 0], [1, 0, 1]]
        res = fit_binomial_logit(s, t, design)
        logodds = [math.log(x / (n - x)) for x, n in zip(s, t)]
        assert res.coefficients[0] == pytest.approx(logodds[0], abs=1e-6)
        assert res.coefficients[0] + res.coefficients[1] == pytest.approx(logodds[1], abs=1e-6)
        assert res.coefficients[0] + res.coefficients[2] == pytest.approx(logodds[2], abs=1e-6)


class TestLrTest:
    def test_identical_models(self):
        res = fit_binomial_logit([30, 60], [100, 100], [[1, 0], [1, 1]])
        lr, p = lr_test(res, res, df=1)
        assert lr == 0.0
        assert p == 1.0

    def test_two_group_fixture(self):
        full = fit_binomial_logit([30, 60], [100, 100], [[1, 0], [1, 1]])
        null = fit_binomial_logit([30, 60], [100, 100], [[1], [1]])
        lr, p = lr_test(full, null, df=1)
        assert lr == pytest.approx(full.lr_stat, abs=1e-8)
        assert p == pytest.approx(chi_square_sf(lr, 1), abs=1e-12)

    def test_nesting_violation(self):
        full = fit_binomial_logit([30, 60], [100, 100], [[1, 0], [1, 1]])
        null = fit_binomial_logit([30, 60], [100, 100], [[1], [1]])
        with pytest.raises(DataError):
            lr_test(null, full, df=1)

    def test_constant_terms_invariance(self):
        # Adding the same constant (binomial coefficients) to both
        # log-likelihoods leaves the LR statistic unchanged.
        full = fit_binomial_logit([30, 60], [100, 100], [[1, 0], [1, 1]])
        null = fit_binomial_logit([30, 60], [100, 100], [[1], [1]])
        const = math.lgamma(101) * 2 - math.lgamma(31) - math.lgamma(71) - math.lgamma(61) - math.lgamma(41)
        lr_kernel, _ = lr_test(full, null, df=1)
        shifted_full = type(full)(
            coefficients=full.coefficients,
            log_likelihood=full.log_likelihood + const,
            null_log_likelihood=full.null_log_likelihood + const,
            lr_stat=full.lr_stat,
            lr_p=full.lr_p,
            converged=True,
            iterations=full.iterations,
        )
        shifted_null = type(null)(
            coefficients=null.coefficients,
            log_likelihood=null.log_likelihood + const,
            null_log_likelihood=null.null_log_likelihood + const,
            lr_stat=null.lr_stat,
            lr_p=null.lr_p,
            converged=True,
            iterations=null.iterations,
        )
        lr_shifted, _ = lr_test(shifted_full, shifted_null, df=1)
        assert lr_shifted == pytest.approx(lr_kernel, abs=1e-9)


def manual_ss_2x2(values):
    """Textbook decomposition for a balanced 2x2 design with 2 replicates,
    values ordered (a1,b1) x2, (a1,b2) x2, (a2,b1) x2, (a2,b2) x2."""
    y = np.asarray(values, float).reshape(2, 2, 2)
    grand = y.mean()
    ma = y.mean(axis=(1, 2))
    mb = y.mean(axis=(0, 2))
    mab = y.mean(axis=2)
    ss_a = 4 * ((ma - grand) ** 2).sum()
    ss_b = 4 * ((mb - grand) ** 2).sum()
    ss_ab = 2 * ((mab - ma[:, None] - mb[None, :] + grand) ** 2).sum()
    ss_resid = ((y - mab[:, :, None]) ** 2).sum()
    return ss_a, ss_b, ss_ab, ss_resid


class TestTwoWayAnova:
    def test_all_equal(self):
        res = two_way_anova([5.0] * 8, ["a1", "a1", "a1", "a1", "a2", "a2", "a2", "a2"],
                            ["b1", "b1", "b2", "b2", "b1", "b1", "b2", "b2"])
        assert res.factor_a.F == 0.0
        assert res.factor_a.p == 1.0
        assert res.factor_b.F == 0.0

    def test_2x2_manual_decomposition(self):
        values = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
        fa = ["a1"] * 4 + ["a2"] * 4
        fb = ["b1", "b1", "b2", "b2"] * 2
        res = two_way_anova(values, fa, fb)
        ss_a, ss_b, ss_ab, ss_resid = manual_ss_2x2(values)
        assert res.factor_a.sum_sq == pytest.approx(ss_a, abs=1e-8)
        assert res.factor_b.sum_sq == pytest.approx(ss_b, abs=1e-8)
        assert res.interaction.sum_sq == pytest.approx(ss_ab, abs=1e-8)
        assert res.residual.sum_sq == pytest.approx(ss_resid, abs=1e-8)
        assert res.factor_a.df == 1
        assert res.residual.df == 4

    def test_ss_additivity(self):
        rng = random.Random(5)
        values = [rng.gauss(0, 1) for _ in range(24)]
        fa = ["a1", "a2", "a3"] * 8
        fb = ["b1"] * 12 + ["b2"] * 12
        res = two_way_anova(values, fa, fb)
        total = float(np.var(values) * len(values))
        parts = res.factor_a.sum_sq + res.factor_b.sum_sq + res.interaction.sum_sq + res.residual.sum_sq
        assert parts == pytest.approx(total, abs=1e-8)

    def test_4x6_df_structure(self):
        # 4 x 6 with 3 replicates per cell: dfs (3, 5, 15, 48).
        rng = random.Random(9)
        fa, fb, values = [], [], []
        for a in range(4):
            for b in range(6):
                for _ in range(3):
                    fa.append(f"a{a}")
                    fb.append(f"b{b}")
                    values.append(rng.gauss(a * 0.5 + b * 0.3, 1.0))
        res = two_way_anova(values, fa, fb)
        assert res.factor_a.df == 3
        assert res.factor_b.df == 5
        assert res.interaction.df == 15
        assert res.residual.df == 48

    def test_no_replicates_interaction_absent(self):
        values = [1.0, 2.0, 3.0, 5.0]
        res = two_way_anova(values, ["a1", "a1", "a2", "a2"], ["b1", "b2", "b1", "b2"])
        assert res.interaction is None
        assert res.residual.df == 1

    def test_incomplete_design_rejected(self):
        with pytest.raises(DataError):
            two_way_anova([1.0, 2.0, 3.0], ["a1", "a1", "a2"], ["b1", "b2", "b1"])

    def test_p_values_in_range(self):
        rng = random.Random(13)
        values = [rng.gauss(0, 1) for _ in range(16)]
        fa = ["a1", "a2"] * 8
        fb = ["b1"] * 8 + ["b2"] * 8
        res = two_way_anova(values, fa, fb)
        for eff in (res.factor_a, res.factor_b, res.interaction):
            assert 0.0 <= eff.p <= 1.0
