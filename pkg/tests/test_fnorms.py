import math

import numpy as np
import pytest

from rarelab.errors import DomainError, FitQualityError
from rarelab.fnorms import (GN_TUPLES, DecaySeries, band_limited_corpus, fit_rate,
                            gauss_kronrod, gn_decompose, gn_inequality_check, grid_norm, lp_norm,
                            solve_theta)
from rarelab.grids import StripGrid, TorusGrid


def test_sin_norms_on_torus():
    g = TorusGrid(1, 64)
    x = g.mesh()[0]
    f = np.sin(2 * np.pi * x)
    assert lp_norm(f, 2.0, g) == pytest.approx(math.sqrt(0.5), rel=1e-14)
    assert lp_norm(f, 1.0, g) == pytest.approx(2 / math.pi, rel=2e-3)
    assert lp_norm(f, math.inf, g) == pytest.approx(1.0)
    # centered-difference symbol: derivative amplitude sin(2 pi h)/h
    h = 1 / 64
    amp = math.sin(2 * math.pi * h) / h
    assert grid_norm(f, 1, 2.0, g) == pytest.approx(math.sqrt(0.5 * (1 + amp ** 2)), rel=1e-12)


def test_vector_norm_sums_components():
    g = TorusGrid(2, 16)
    f = np.ones((2,) + g.shape)
    assert lp_norm(f, 2.0, g) == pytest.approx(math.sqrt(2.0))


def test_strip_norm_trims_boundary_rows():
    s = StripGrid.covering(1, 16, 4.0)
    f = np.exp(-s.x1() ** 2)
    assert lp_norm(f, 2.0, s) ** 2 == pytest.approx(math.sqrt(math.pi / 2), rel=1e-10)
    with pytest.raises(DomainError):
        grid_norm(f, 4, 2.0, s)


def test_gauss_kronrod_accuracy():
    val, err = gauss_kronrod(lambda x: np.exp(-x * x), -10.0, 10.0)
    assert val == pytest.approx(math.sqrt(math.pi), rel=1e-10)
    val, _ = gauss_kronrod(lambda x: np.abs(x - 0.3), -1.0, 1.0, points=[0.3])
    assert val == pytest.approx(0.5 * 1.3 ** 2 + 0.5 * 0.7 ** 2, rel=1e-12)


def test_fit_rate_exact_and_noisy():
    t = np.linspace(0.0, 5.0, 30)
    s = fit_rate(DecaySeries(t, 3.0 * np.exp(-1.7 * t), "exponential"))
    assert s.fitted_param == pytest.approx(1.7, rel=1e-12) and s.residual < 1e-12
    rng = np.random.default_rng(3)
    tp = np.geomspace(10, 1000, 20)
    noisy = (1 + tp) ** -0.5 * np.exp(0.01 * rng.normal(size=tp.size))
    s = fit_rate(DecaySeries(tp, noisy, "power"))
    assert abs(s.fitted_param + 0.5) < 0.02 and s.residual < 0.02
    assert np.allclose(s.predict(tp), noisy, rtol=0.05)


def test_fit_rate_rejects_bad_data():
    t = np.linspace(0, 1, 10)
    with pytest.raises(FitQualityError):
        fit_rate(DecaySeries(t, np.zeros(10), "exponential"))
    with pytest.raises(FitQualityError):
        fit_rate(DecaySeries(t, np.ones(10), "exponential"), t_min=0.9)
    with pytest.raises(DomainError):
        DecaySeries(t, np.ones(10), "linear")


def test_decay_series_csv_roundtrip():
    t = np.array([0.0, 1.0])
    s = DecaySeries(t, np.array([1.0, 0.5]), "exponential")
    lines = s.to_csv().splitlines()
    assert lines[0] == "t,norm,model,fitted_exponent,fit_residual"
    assert float(lines[2].split(",")[1]) == 0.5


def test_solve_theta_tuples():
    linf = GN_TUPLES[0]
    assert [solve_theta(linf.j, linf.m[k - 1], linf.p, linf.q, linf.r[k - 1], k)
            for k in (1, 2, 3)] == pytest.approx([0.5, 1.0, 0.75])
    with pytest.raises(DomainError):
        solve_theta(1, 1, math.inf, 2.0, 2.0, 1)  # theta = 1.5


def test_gn_decomposition_and_bound():
    grid = StripGrid.covering(3, 16, 6.0)
    corpus = band_limited_corpus(grid, 12, seed=7)
    w = grid.weights()
    for u in corpus:
        D = gn_decompose(u)
        assert np.max(np.abs(D.reconstruct() - u)) <= 1e-12
        a, b, c = D.parts
        scale = np.sum(w * u * u)
        for x, y in ((a, b), (a, c), (b, c)):
            assert abs(np.sum(w * x * y)) <= 1e-12 * scale
        # u2 has zero x3-mean-free part, u3 zero x3 mean
        assert np.max(np.abs(c.mean(axis=2))) <= 1e-13
    for tup in GN_TUPLES:
        r, _ = gn_inequality_check(corpus[0], tup.j, tup.m, tup.p, tup.q, tup.r, grid)
        r3, _ = gn_inequality_check(3.0 * corpus[0], tup.j, tup.m, tup.p, tup.q, tup.r, grid)
        assert 0 < r < 1 and r3 == pytest.approx(r, rel=1e-12)


def test_corpus_is_seeded():
    grid = StripGrid.covering(2, 16, 4.0)
    a = band_limited_corpus(grid, 3, seed=1)
    b = band_limited_corpus(grid, 3, seed=1)
    c = band_limited_corpus(grid, 3, seed=2)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], c[0])
