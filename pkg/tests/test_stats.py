import pytest
import scipy.stats

from fbmvar import stats
from fbmvar.rng import stream


def test_ks_1samp_matches_scipy():
    rng = stream(77, 0)
    x = rng.standard_normal(5000)
    d, p = stats.ks_1samp_normal(x)
    ref = scipy.stats.kstest(x, "norm")
    assert d == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, abs=0.02)


def test_ks_1samp_rejects_shift():
    rng = stream(78, 0)
    x = rng.standard_normal(5000) + 0.2
    _, p = stats.ks_1samp_normal(x)
    assert p < 1e-6


def test_ks_2samp_matches_scipy():
    rng = stream(79, 0)
    x = rng.standard_normal(4000)
    y = rng.standard_normal(3000) * 1.04
    d, p = stats.ks_2samp(x, y)
    ref = scipy.stats.ks_2samp(x, y)
    assert d == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, abs=0.02)


def test_ks_2samp_same_law():
    rng = stream(80, 0)
    _, p = stats.ks_2samp(rng.standard_normal(4000), rng.standard_normal(4000))
    assert p > 0.01


def test_kolmogorov_sf_limits():
    assert stats.kolmogorov_sf(0.0) == 1.0
    assert stats.kolmogorov_sf(0.02) == pytest.approx(1.0, abs=1e-6)
    assert stats.kolmogorov_sf(5.0) < 1e-20
    assert stats.kolmogorov_sf(0.8275) == pytest.approx(0.5, abs=0.005)


def test_through_origin_slope():
    rng = stream(81, 0)
    x = rng.uniform(0.5, 2.0, 20_000)
    y = 3.0 * x + rng.standard_normal(20_000) * 0.1
    slope, se = stats.through_origin_slope(x, y)
    assert slope == pytest.approx(3.0, abs=4 * se)
    assert se < 0.01


def test_least_squares_slope():
    slope, intercept = stats.least_squares_slope([1, 2, 3, 4], [3, 5, 7, 9])
    assert slope == pytest.approx(2.0, abs=1e-12)
    assert intercept == pytest.approx(1.0, abs=1e-12)


def test_variance_known_mean():
    rng = stream(82, 0)
    v = rng.standard_normal(50_000) * 2.0
    var, se = stats.variance_and_se(v, known_mean=0.0)
    assert var == pytest.approx(4.0, abs=4 * se)


def test_count_inversions():
    assert stats.count_inversions([5, 4, 3, 2]) == 0
    assert stats.count_inversions([5, 6, 3, 4]) == 2
    assert stats.count_inversions([1]) == 0
