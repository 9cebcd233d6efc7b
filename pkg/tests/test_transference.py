import math

import mpmath
import numpy as np
import pytest

from gtransfer.transference import (
    GAUSSIAN,
    LAGUERRE,
    ResolutionError,
    ScalingMap,
    WindowError,
    asymptotic_check_hermite,
    asymptotic_check_laguerre,
    fit_decay,
    g_norm_transfer_experiment,
    inner_product_limit_experiment,
    linearization_coeffs,
    log_omega,
    log_Z,
    norm_limit_experiment,
    omega_log_sup,
    polynomial_limit_experiment,
    scale_function,
    stirling_ratio_check,
    sweep_map,
    truncated_g_split,
    window_grid,
    windowed_objects,
)

SWEEP = (1e2, 1e3, 1e4)


# --- scaling maps ------------------------------------------------------------

def test_scale_function_examples():
    x = np.array([-1.5, -1.0, -0.3, 0.0, 0.8, 1.0, 1.2])
    ind = scale_function(np.ones_like, ScalingMap.to_gaussian(7.0))(x)
    np.testing.assert_array_equal(ind, [0, 1, 1, 1, 1, 1, 0])
    np.testing.assert_allclose(scale_function(lambda y: y, ScalingMap.to_gaussian(4.0))(x),
                               np.where(np.abs(x) <= 1, 2 * x, 0.0))
    np.testing.assert_allclose(scale_function(lambda y: y, ScalingMap.to_laguerre(0.0, 10.0))(x),
                               np.where(np.abs(x) <= 1, 5 * (1 - x), 0.0))


def test_scaling_round_trip():
    for s in (ScalingMap.to_gaussian(50.0), ScalingMap.to_laguerre(1.0, 30.0)):
        x = np.linspace(-1, 1, 9)
        np.testing.assert_allclose(s.from_limit(s.to_limit(x)), x, atol=1e-15)
    with pytest.raises(ValueError):
        ScalingMap("sideways", 1.0)
    with pytest.raises(ValueError):
        ScalingMap.to_gaussian(0.0)


# --- limits ---------------------------------------------------------------------

def test_norm_limit_examples():
    rep = norm_limit_experiment(np.ones_like, GAUSSIAN, SWEEP)
    assert all(e < 1e-14 for e in rep.errors)
    rep = norm_limit_experiment(lambda x: x, GAUSSIAN, (1e3,), squared=True)
    assert rep.targets[0] == pytest.approx(1e3 / 2002, rel=1e-12)
    assert rep.limits[0] == pytest.approx(0.5, rel=1e-14)
    rep = norm_limit_experiment(lambda y: y, LAGUERRE, (1e3,), alpha=0.0, squared=True)
    assert rep.targets[0] == pytest.approx(1e6 * 2 / (1002 * 1003), rel=1e-12)
    assert rep.targets[0] == pytest.approx(1.990038, abs=1e-6)
    assert rep.limits[0] == pytest.approx(2.0, rel=1e-14)


def test_norm_limit_decay():
    for rep in (norm_limit_experiment(np.cos, GAUSSIAN, SWEEP),
                norm_limit_experiment(lambda y: y * y, LAGUERRE, SWEEP, alpha=1.5)):
        assert rep.strictly_decreasing()
        assert rep.exponent <= -0.8
        assert [r[0] for r in rep.rows()] == list(SWEEP)


def test_inner_product_examples():
    for k in (1, 2, 4):
        rep = inner_product_limit_experiment(np.ones_like, k, GAUSSIAN, SWEEP)
        assert max(abs(t) for t in rep.targets) < 1e-12 and abs(rep.limits[0]) < 1e-12
    rep = inner_product_limit_experiment(lambda x: x, 1, GAUSSIAN, SWEEP)
    for lam, t in zip(SWEEP, rep.targets):
        assert t == pytest.approx(2 * lam / (2 * lam + 2), rel=1e-12)
    assert rep.limits[0] == pytest.approx(1.0, rel=1e-13)
    rep = inner_product_limit_experiment(lambda y: y, 1, LAGUERRE, SWEEP, alpha=0.0)
    assert rep.limits[0] == pytest.approx(-1.0, rel=1e-13)
    assert rep.strictly_decreasing()


def test_asymptotic_hermite_examples():
    assert asymptotic_check_hermite(0, 0.7, 50.0) == 0.0
    x = np.linspace(-2, 2, 9)
    assert np.max(asymptotic_check_hermite(1, x, 1e3)) < 1e-12
    lam = 1e4
    err = float(asymptotic_check_hermite(2, 1.0, lam))
    assert err == pytest.approx(abs(2 * (lam + 1) / lam - 1 - 1), rel=1e-8)
    assert err == pytest.approx(2e-4, rel=1e-6)


def test_asymptotic_laguerre_examples():
    assert asymptotic_check_laguerre(0, 1.0, 2.0, 50.0) == 0.0
    assert float(asymptotic_check_laguerre(1, 0.0, 1.0, 1e3)) == pytest.approx(2e-3, rel=1e-9)
    rep = polynomial_limit_experiment(2, [0.5], LAGUERRE, SWEEP, alpha=1.0)
    assert abs(rep.exponent + 1) < 0.1


def test_polynomial_limit_rates():
    for n in range(2, 7):
        rep = polynomial_limit_experiment(n, np.linspace(-2, 2, 21), GAUSSIAN)
        assert abs(rep.exponent + 1) <= 0.15
        rep = polynomial_limit_experiment(n, np.linspace(0, 4, 21), LAGUERRE, alpha=0.5)
        assert abs(rep.exponent + 1) <= 0.15
    rep = polynomial_limit_experiment(1, np.linspace(-2, 2, 21), GAUSSIAN)
    assert all(e == 0.0 for e in rep.errors)


def test_g_norm_transfer_examples():
    rep = g_norm_transfer_experiment(np.ones_like, GAUSSIAN, SWEEP, N=16)
    assert max(rep.targets) < 1e-20 and rep.limits[0] < 1e-20
    rep = g_norm_transfer_experiment(lambda x: x, GAUSSIAN, SWEEP, N=16)
    for lam, t in zip(SWEEP, rep.targets):
        assert t == pytest.approx(lam / (4 * lam + 4), rel=1e-10)
    assert rep.limits[0] == pytest.approx(0.25, rel=1e-12)
    rep = g_norm_transfer_experiment(lambda x: x ** 3 - 1.5 * x, GAUSSIAN, SWEEP)
    assert rep.strictly_decreasing() and rep.errors[-1] < 5e-3


# --- windowed objects -----------------------------------------------------------

def test_log_Z_duplication():
    lam = 10.0
    dup = 0.5 * math.log(lam) + math.lgamma(lam) - 0.5 * math.log(math.pi) - math.lgamma(lam + 0.5)
    assert log_Z(lam) == pytest.approx(dup, abs=1e-12)
    ref = mpmath.log(mpmath.sqrt(lam) * mpmath.gamma(lam) ** 2 * mpmath.power(2, 2 * lam)
                     / (2 * mpmath.pi * mpmath.gamma(2 * lam)))
    assert log_Z(lam) == pytest.approx(float(ref), abs=1e-12)


def test_omega_p2_is_one():
    for s in (ScalingMap.to_gaussian(1e3), ScalingMap.to_laguerre(0.0, 1e3)):
        y = window_grid(s, 3.0, 31)
        np.testing.assert_array_equal(log_omega(y, 2.0, s), 0.0)


def test_omega_bound_counterexample():
    """The |Omega| <= 1 bound for p < 2 fails on the Gaussian side once |y| > ~1."""
    s = ScalingMap.to_gaussian(100.0)
    omega = math.exp(float(log_omega(3.0, 1.5, s)))
    assert omega == pytest.approx(1.06608, abs=1e-5)
    assert omega_log_sup(1.5, s, 3.0) > 0
    # near the origin the bound holds
    y = np.linspace(-0.95, 0.95, 39)
    assert np.all(log_omega(y, 1.5, s) <= 1e-15)


def test_omega_sup_exact():
    for s in (ScalingMap.to_gaussian(400.0), ScalingMap.to_laguerre(0.5, 400.0)):
        for p in (1.2, 1.5, 3.0, 6.0):
            for K in (0.5, 2.0, 5.0):
                grid = window_grid(s, K, 20001)
                if s.direction == GAUSSIAN:
                    grid = np.concatenate([grid, [0.0, math.sqrt(0.5)]])
                    grid = grid[np.abs(grid) <= K]
                brute = float(np.max(log_omega(grid, p, s)))
                assert omega_log_sup(p, s, K) >= brute - 1e-12
                assert omega_log_sup(p, s, K) <= brute + 1e-6


def test_omega_laguerre_side_sign():
    s = ScalingMap.to_laguerre(0.0, 1e3)
    y = window_grid(s, 5.0, 51)
    assert np.all(log_omega(y, 1.5, s) >= 0)
    assert np.all(log_omega(y, 4.0, s) <= 0)


def test_windowed_factorization():
    for s, phi in ((ScalingMap.to_gaussian(1e3), np.cos),
                   (ScalingMap.to_laguerre(0.0, 1e3), lambda y: np.exp(-y / 2))):
        for p in (1.5, 2.0, 4.0):
            w = windowed_objects(phi, s, 2.0, p, N=24)
            assert w.factorization_error() < 1e-10
            if p == 2.0:
                np.testing.assert_array_equal(w.omega, 1.0)


def test_window_conditions():
    with pytest.raises(WindowError):
        windowed_objects(np.cos, ScalingMap.to_gaussian(4.0), 3.0, 2.0)
    with pytest.raises(WindowError):
        windowed_objects(np.cos, ScalingMap.to_laguerre(0.0, 2.0), 3.0, 2.0)
    with pytest.raises(WindowError):
        omega_log_sup(2.0, ScalingMap.to_gaussian(100.0), 0.0)


def test_window_grid_inside():
    s = ScalingMap.to_gaussian(100.0)
    y = window_grid(s, 2.0, 11)
    assert y[0] == -2.0 and y[-1] == 2.0


# --- truncated split --------------------------------------------------------------

def test_truncation_tails_vanish_for_polynomials():
    s = ScalingMap.to_gaussian(1e3)
    phi = lambda y: y ** 3 - 1.5 * y  # noqa: E731
    box = truncated_g_split(phi, s, 2.0, 3, M=12, scheme="box")
    assert box.tail_time < 1e-12 and box.tail_space < 1e-12
    anti = truncated_g_split(phi, s, 2.0, 6, M=24)
    assert anti.tail_time < 1e-12 and anti.tail_space < 1e-12
    # the Cauchy-product cut at N = degree still leaves cross terms
    partial = truncated_g_split(phi, s, 2.0, 3, M=12)
    assert partial.tail_time > 1e-6


def test_truncation_tails_decay():
    s = ScalingMap.to_gaussian(1e4)
    tails = [truncated_g_split(np.sin, s, 2.0, N) for N in (4, 8, 16)]
    total = [t.tail_time + t.tail_space for t in tails]
    assert total[0] > total[1] > total[2]
    assert tails[0].M == 16 and tails[0].FN.shape == tails[0].y.shape


def test_truncation_resolution_error():
    s = ScalingMap.to_laguerre(0.0, 1e4)
    with pytest.raises(ResolutionError):
        truncated_g_split(np.cos, s, 4.0, 8)


def test_truncation_argument_checks():
    s = ScalingMap.to_gaussian(1e3)
    with pytest.raises(ValueError):
        truncated_g_split(np.sin, s, 2.0, 8, M=4)
    with pytest.raises(ValueError):
        truncated_g_split(np.sin, s, 2.0, 8, scheme="diagonal")


# --- linearization and Stirling ----------------------------------------------------

def test_linearization_examples():
    row = linearization_coeffs(0.0, 0.0, 1, 1)
    np.testing.assert_allclose(row.nu, [1 / 3, 0.0, 2 / 3], atol=1e-12)
    assert row.as_dict() == pytest.approx({0: 1 / 3, 1: 0.0, 2: 2 / 3})
    for m, n in ((0, 4), (3, 0)):
        row = linearization_coeffs(1.0, 0.5, m, n)
        d = row.as_dict()
        assert d[max(m, n)] == pytest.approx(1.0) and len(d) == 1
    row = linearization_coeffs(1.0, 0.0, 2, 3)
    assert np.min(row.nu) >= -1e-12


def test_linearization_symmetry_and_sum():
    for a, b in ((0.5, 0.5), (2.0, 1.0), (-0.5, 0.0)):
        for m in range(6):
            for n in range(6):
                r1 = linearization_coeffs(a, b, m, n)
                r2 = linearization_coeffs(a, b, n, m)
                np.testing.assert_allclose(r1.nu, r2.nu, atol=1e-12)
                assert math.fsum(r1.nu) == pytest.approx(1.0, abs=1e-10)


def test_linearization_order_check():
    with pytest.raises(ValueError):
        linearization_coeffs(0.0, 0.0, 3, 3, order=4)
    with pytest.raises(ValueError):
        linearization_coeffs(0.0, 0.0, -1, 3)


def test_stirling_ratio():
    assert stirling_ratio_check(1e6, 1, 1) < 1e-2
    errs = [stirling_ratio_check(lam, 2, 3) for lam in (1e3, 1e4, 1e5, 1e6)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    slope, _ = fit_decay((1e3, 1e4, 1e5, 1e6), errs)
    assert slope == pytest.approx(-1.0, abs=0.1)
    with pytest.raises(ValueError):
        stirling_ratio_check(10.0, 3, 2)


# --- plumbing -------------------------------------------------------------------------

def test_fit_decay():
    p = np.array([1e2, 1e3, 1e4])
    slope, resid = fit_decay(p, 3.0 / p)
    assert slope == pytest.approx(-1.0) and resid < 1e-12
    assert math.isnan(fit_decay(p, [0.0, 0.0, 1.0])[0])


def test_sweep_map_order():
    vals = list(range(20))
    assert sweep_map(lambda v: v * v, vals, workers=4) == [v * v for v in vals]
    assert sweep_map(lambda v: v, []) == []


def test_sweep_threads_match_serial(monkeypatch):
    monkeypatch.setenv("GTRANSFER_MAX_WORKERS", "1")
    serial = norm_limit_experiment(np.cos, GAUSSIAN, SWEEP)
    monkeypatch.setenv("GTRANSFER_MAX_WORKERS", "4")
    threaded = norm_limit_experiment(np.cos, GAUSSIAN, SWEEP)
    assert serial.rows() == threaded.rows()
