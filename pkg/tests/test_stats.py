import math

import numpy as np
import pytest

from neggamma.density import reg_inc_gamma_p
from neggamma.errors import EmptyInput, NoConvergence
from neggamma.samplers import SamplePair, gamma_batch
from neggamma.stats import SummaryStats, accumulate, ks_statistic, pearson_standard_error, quad_1d


def _fold(pairs):
    stats = SummaryStats()
    for y1, y2 in pairs:
        accumulate(stats, SamplePair(y1, y2))
    return stats


class TestSummaryStats:
    def test_perfect_positive(self):
        stats = _fold([(1, 2), (2, 4), (3, 6)])
        assert stats.mean1 == 2.0
        assert stats.var1 == pytest.approx(1.0)
        assert stats.var2 == pytest.approx(4.0)
        assert stats.corr == pytest.approx(1.0)

    def test_perfect_negative(self):
        assert _fold([(1, 3), (2, 2), (3, 1)]).corr == pytest.approx(-1.0)

    def test_constant_coordinate_is_degenerate(self):
        stats = _fold([(1, 3), (1, 2), (1, 1)])
        assert not stats.corr_defined
        assert math.isnan(stats.corr)

    def test_single_pair(self):
        stats = _fold([(1.0, 2.0)])
        assert math.isnan(stats.var1) and math.isnan(stats.cov)

    def test_batch_matches_numpy(self, stream):
        y = stream.uniforms((2, 5000))
        stats = SummaryStats().update_batch(y[0], y[1])
        assert stats.var1 == pytest.approx(np.var(y[0], ddof=1), rel=1e-12)
        assert stats.cov == pytest.approx(np.cov(y[0], y[1])[0, 1], rel=1e-10, abs=1e-14)
        assert stats.corr == pytest.approx(np.corrcoef(y[0], y[1])[0, 1], abs=1e-12)

    def test_streaming_matches_batch(self, stream):
        y = 10.0 + stream.uniforms((2, 2000))
        one = _fold(zip(y[0], y[1]))
        other = SummaryStats().update_batch(y[0], y[1])
        for name in ("mean1", "mean2", "var1", "var2", "cov", "corr"):
            assert getattr(one, name) == pytest.approx(getattr(other, name), rel=1e-10, abs=1e-12), name

    def test_merge_over_random_partitions(self, stream):
        y = stream.uniforms((2, 3000))
        whole = SummaryStats().update_batch(y[0], y[1])
        for trial in range(10):
            cuts = np.sort((stream.uniforms(4) * 3000).astype(int))
            merged = SummaryStats()
            for part in np.split(np.arange(3000), cuts):
                merged.merge(SummaryStats().update_batch(y[0][part], y[1][part]))
            assert merged.n == whole.n
            for name in ("mean1", "var2", "cov", "corr"):
                assert getattr(merged, name) == pytest.approx(getattr(whole, name), rel=1e-10, abs=1e-12), name


class TestPearsonStandardError:
    def test_independent_pairs(self, stream):
        y = stream.uniforms((2, 10**5))
        assert pearson_standard_error(y[0], y[1]) == pytest.approx(1 / math.sqrt(10**5), rel=0.02)

    def test_reduces_to_normal_theory(self, stream):
        rho = -0.6
        u = stream.uniforms((2, 2 * 10**5))
        # Box-Muller pair with correlation rho
        radius = np.sqrt(-2 * np.log(u[0]))
        z1 = radius * np.cos(2 * np.pi * u[1])
        z2 = radius * np.sin(2 * np.pi * u[1])
        y2 = rho * z1 + math.sqrt(1 - rho**2) * z2
        expected = (1 - rho**2) / math.sqrt(z1.size)
        assert pearson_standard_error(z1, y2) == pytest.approx(expected, rel=0.03)

    def test_wider_than_normal_theory_for_skewed_pairs(self, stream):
        shock = gamma_batch(1.0, 10**5, stream)
        y1 = shock + gamma_batch(1.0, 10**5, stream)
        y2 = shock + gamma_batch(1.0, 10**5, stream)
        rho = np.corrcoef(y1, y2)[0, 1]
        assert pearson_standard_error(y1, y2) > 1.2 * (1 - rho**2) / math.sqrt(10**5)

    def test_needs_two_pairs(self):
        with pytest.raises(EmptyInput):
            pearson_standard_error([1.0], [2.0])


class TestKolmogorovSmirnov:
    def test_quantile_points(self):
        x = (np.arange(100) + 0.5) / 100
        assert ks_statistic(x, lambda t: t).statistic == pytest.approx(0.005, abs=1e-12)

    def test_uniform_draws(self, stream):
        result = ks_statistic(stream.uniforms(10**5), lambda t: t)
        assert result.n == 10**5
        assert result.critical_1pct == pytest.approx(1.6276 / math.sqrt(10**5))
        assert result.passed

    def test_gamma_draws(self, stream):
        x = gamma_batch(3.0, 10**5, stream)
        assert ks_statistic(x, lambda t: reg_inc_gamma_p(3.0, t)).passed

    def test_invariant_under_monotone_maps(self, stream):
        x = gamma_batch(3.0, 1000, stream)
        direct = ks_statistic(x, lambda t: reg_inc_gamma_p(3.0, t)).statistic
        mapped = ks_statistic(np.exp(x), lambda t: reg_inc_gamma_p(3.0, np.log(t))).statistic
        assert mapped == pytest.approx(direct, abs=1e-12)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            ks_statistic([], lambda t: t)


class TestQuadrature:
    def test_log(self):
        assert quad_1d(math.log, 0.0, 1.0) == pytest.approx(-1.0, abs=1e-10)

    def test_log_squared(self):
        assert quad_1d(lambda x: math.log(x) ** 2, 0.0, 1.0) == pytest.approx(2.0, abs=1e-10)

    def test_log_times_log_complement(self):
        value = quad_1d(lambda x: math.log(x) * math.log1p(-x), 0.0, 1.0)
        assert value == pytest.approx(2 - math.pi**2 / 6, abs=1e-9)

    def test_tilted_log(self):
        assert quad_1d(lambda x: math.log(x) * (1 - 2 * x), 0.0, 1.0) == pytest.approx(-0.5, abs=1e-10)

    def test_divergent_integral(self):
        with pytest.raises(NoConvergence):
            quad_1d(lambda x: 1 / x, 0.0, 1.0)
