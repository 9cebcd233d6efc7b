"""The numba and numpy kernel paths agree; log-gamma helpers match mpmath."""

import math
import os
import subprocess
import sys

import mpmath
import numpy as np
import pytest

from gtransfer import _accel
from gtransfer._kernels import bilinear_rows, christoffel, lgamma_array, recurrence_table
from gtransfer.loggamma import (
    lgamma,
    log_binom,
    log_factorial,
    log_gamma_ratio,
    log_poch,
    log_poch_scaled,
)
from gtransfer.measure import MeasureSpec, gauss_rule
from gtransfer.orthopoly import FamilySpec, monic_recurrence, szego_recurrence

needs_numba = pytest.mark.skipif(not _accel.HAS_NUMBA, reason="numba not installed")


@pytest.fixture(autouse=True)
def high_precision():
    with mpmath.workdps(40):
        yield


@pytest.fixture
def numpy_path():
    old = _accel.use_numba(False)
    yield
    _accel.use_numba(old)


@needs_numba
def test_recurrence_paths_agree():
    x = np.linspace(-1, 1, 101)
    a, b, c = szego_recurrence(FamilySpec.jacobi(1.0, 0.5), 40)
    np.testing.assert_allclose(recurrence_table.jit(x, a, b, c, 40),
                               recurrence_table.numpy(x, a, b, c, 40), rtol=1e-13, atol=1e-13)


@needs_numba
def test_christoffel_paths_agree():
    alpha, beta = monic_recurrence(FamilySpec.laguerre(1.5), 301)
    x = np.linspace(0.1, 900.0, 57)
    ls_j, st_j = christoffel.jit(x, alpha, np.sqrt(beta), 300)
    ls_n, st_n = christoffel.numpy(x, alpha, np.sqrt(beta), 300)
    np.testing.assert_allclose(ls_j, ls_n, rtol=1e-12)
    np.testing.assert_allclose(st_j, st_n, rtol=1e-10, atol=1e-14)


@needs_numba
def test_bilinear_paths_agree():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((33, 20))
    A[:, 3] = 0.0
    W = rng.standard_normal((20, 20))
    W = W + W.T
    np.testing.assert_allclose(bilinear_rows.jit(A, W), bilinear_rows.numpy(A, W), rtol=1e-12,
                               atol=1e-12)


@needs_numba
def test_lgamma_paths_agree():
    x = np.geomspace(1e-6, 1e7, 200)
    np.testing.assert_allclose(lgamma_array.jit(x), lgamma_array.numpy(x), rtol=1e-15, atol=1e-15)


def test_dispatch_switch(numpy_path):
    assert not _accel.numba_enabled()
    rule = gauss_rule(MeasureSpec.gamma(0.5), 40)
    assert math.fsum(rule.weights) == pytest.approx(1.0, rel=1e-14)


@needs_numba
def test_rules_identical_across_paths():
    _accel.use_numba(True)
    fast = gauss_rule(MeasureSpec.jacobi_beta(2.0, 0.5), 64)
    old = _accel.use_numba(False)
    try:
        slow = gauss_rule(MeasureSpec.jacobi_beta(2.0, 0.5), 64)
    finally:
        _accel.use_numba(old)
    np.testing.assert_allclose(fast.nodes, slow.nodes, atol=1e-15)
    np.testing.assert_allclose(fast.weights, slow.weights, rtol=1e-12)


def test_env_flag_selects_numpy():
    code = "from gtransfer import _accel; print(_accel.numba_enabled())"
    env = dict(os.environ, GTRANSFER_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "False"


def test_max_workers_env(monkeypatch):
    monkeypatch.setenv("GTRANSFER_MAX_WORKERS", "3")
    assert _accel.max_workers() == 3
    monkeypatch.setenv("GTRANSFER_MAX_WORKERS", "junk")
    assert _accel.max_workers() >= 1


def test_lgamma_against_mpmath():
    for x in (1e-8, 0.1, 0.5, 1.0, 2.5, 10.0, 171.5, 1e4, 1e6, 1e10):
        ref = float(mpmath.loggamma(x))
        assert lgamma(x) == pytest.approx(ref, rel=1e-13, abs=1e-14)
    xs = np.array([0.3, 7.0, 300.0])
    np.testing.assert_allclose(lgamma(xs), [math.lgamma(v) for v in xs], rtol=1e-13)
    with pytest.raises(ValueError):
        lgamma(0.0)
    with pytest.raises(ValueError):
        lgamma(float("nan"))


def test_log_poch_large_argument():
    for x, n in ((1e6, 7), (0.5, 40), (2e5 + 0.5, 300)):
        ref = float(mpmath.log(mpmath.rf(x, n)))
        assert log_poch(x, n) == pytest.approx(ref, rel=1e-14)
        scaled = float(mpmath.log(mpmath.rf(x, n) / mpmath.power(x, n)))
        assert log_poch_scaled(x, n) == pytest.approx(scaled, rel=1e-12, abs=1e-15)
    with pytest.raises(ValueError):
        log_poch(1.0, -1)


def test_gamma_ratio_and_binom():
    assert log_gamma_ratio(1e6 + 3, 1e6) == pytest.approx(
        float(mpmath.log(mpmath.rf(1e6, 3))), rel=1e-14)
    assert log_gamma_ratio(2.3, 7.9) == pytest.approx(
        float(mpmath.loggamma(2.3) - mpmath.loggamma(7.9)), rel=1e-13)
    assert math.exp(log_binom(5.0, 2)) == pytest.approx(10.0, rel=1e-13)
    assert math.exp(log_binom(3.5, 3)) == pytest.approx(float(mpmath.binomial(3.5, 3)), rel=1e-13)
    assert log_factorial(20) == pytest.approx(math.log(math.factorial(20)), rel=1e-14)
