import math

import mpmath
import numpy as np
import pytest

from gtransfer.measure import (
    MeasureSpec,
    default_order,
    gauss_rule,
    integrate,
    lp_norm,
    measure_for,
)
from gtransfer.orthopoly import FamilySpec


MEASURES = [
    MeasureSpec.jacobi_beta(0.0, 0.0),
    MeasureSpec.jacobi_beta(1.0, 0.5),
    MeasureSpec.jacobi_beta(-0.5, 2.0),
    MeasureSpec.jacobi_beta(499.5, 499.5),
    MeasureSpec.gaussian(),
    MeasureSpec.gamma(0.0),
    MeasureSpec.gamma(1.5),
]


@mpmath.workdps(80)
def exact_moment(m, j):
    if m.kind == "gaussian":
        return mpmath.mpf(0) if j % 2 else mpmath.gamma((j + 1) / mpmath.mpf(2)) / mpmath.sqrt(mpmath.pi)
    if m.kind == "gamma":
        return mpmath.rf(m.alpha + 1, j)
    a, b = mpmath.mpf(m.alpha), mpmath.mpf(m.beta)
    # x = 2u - 1 with u ~ Beta(b + 1, a + 1)
    total = mpmath.mpf(0)
    for i in range(j + 1):
        total += mpmath.binomial(j, i) * 2 ** i * (-1) ** (j - i) * mpmath.rf(b + 1, i) / mpmath.rf(a + b + 2, i)
    return total


def abs_moment(m, j):
    rule = gauss_rule(m, 64)
    return integrate(lambda x: np.abs(x) ** j, rule)


def test_examples():
    r = gauss_rule(MeasureSpec.gaussian(), 1)
    assert r.nodes[0] == pytest.approx(0.0, abs=1e-15) and r.weights[0] == pytest.approx(1.0)
    r = gauss_rule(MeasureSpec.jacobi_beta(0.0, 0.0), 2)
    np.testing.assert_allclose(np.sort(r.nodes), [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-14)
    np.testing.assert_allclose(r.weights, [0.5, 0.5], rtol=1e-14)
    assert integrate(lambda x: x * x, r) == pytest.approx(1 / 3, rel=1e-14)
    r = gauss_rule(MeasureSpec.gamma(0.0), 1)
    assert r.nodes[0] == pytest.approx(1.0) and r.weights[0] == pytest.approx(1.0)


def test_integrate_examples():
    for m in MEASURES:
        assert integrate(lambda x: np.ones_like(x), gauss_rule(m, 5)) == pytest.approx(1.0, rel=1e-14)
    assert integrate(lambda x: x * x, gauss_rule(MeasureSpec.gaussian(), 2)) == pytest.approx(0.5)
    for a in (0.0, 1.5, 3.0):
        assert integrate(lambda x: x, gauss_rule(MeasureSpec.gamma(a), 1)) == pytest.approx(a + 1)


def test_lp_norm_examples():
    rule = gauss_rule(MeasureSpec.gaussian(), 10)
    for p in (1.0, 1.5, 2.0, 4.0):
        assert lp_norm(lambda x: -3.0 * np.ones_like(x), p, rule) == pytest.approx(3.0, rel=1e-14)
    assert lp_norm(lambda x: x, 2.0, rule) == pytest.approx(math.sqrt(0.5), rel=1e-14)


@pytest.mark.parametrize("m", MEASURES, ids=str)
def test_moments_exact(m):
    """An order-n rule integrates x^j exactly for j <= 2n - 1."""
    order = 12
    rule = gauss_rule(m, order)
    for j in range(2 * order):
        q = integrate(lambda x: x ** j, rule)
        ref = float(exact_moment(m, j))
        # odd moments of symmetric measures vanish: measure the error on E|x|^j
        scale = max(abs(ref), abs_moment(m, j))
        assert abs(q - ref) <= 1e-12 * scale


@pytest.mark.parametrize("m", MEASURES, ids=str)
def test_rule_invariants(m):
    rule = gauss_rule(m, 40)
    lo, hi = m.domain
    assert np.all(rule.weights > 0)
    assert math.fsum(rule.weights) == pytest.approx(1.0, rel=1e-14)
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all((rule.nodes > lo) & (rule.nodes < hi))
    np.testing.assert_allclose(np.exp(rule.log_weights), rule.weights, rtol=1e-12)


def test_against_scipy_roots():
    from scipy.special import roots_genlaguerre, roots_hermite, roots_jacobi

    x, w = roots_jacobi(30, 1.0, 0.5)
    r = gauss_rule(MeasureSpec.jacobi_beta(1.0, 0.5), 30)
    np.testing.assert_allclose(r.nodes, x, atol=1e-14)
    np.testing.assert_allclose(r.weights, w / w.sum(), rtol=1e-11)
    x, w = roots_hermite(30)
    r = gauss_rule(MeasureSpec.gaussian(), 30)
    np.testing.assert_allclose(r.nodes, x, atol=1e-13)
    np.testing.assert_allclose(r.weights, w / w.sum(), rtol=1e-10, atol=1e-30)
    x, w = roots_genlaguerre(30, 1.5)
    r = gauss_rule(MeasureSpec.gamma(1.5), 30)
    np.testing.assert_allclose(r.nodes, x, rtol=1e-13)
    np.testing.assert_allclose(r.weights, w / w.sum(), rtol=1e-10, atol=1e-40)


def test_order_range():
    for bad in (0, -3, 513):
        with pytest.raises(ValueError):
            gauss_rule(MeasureSpec.gaussian(), bad)


def test_integrate_rejects_nonfinite():
    rule = gauss_rule(MeasureSpec.gamma(0.0), 8)
    with pytest.raises(ValueError), np.errstate(divide="ignore"):
        integrate(lambda x: 1.0 / (x - rule.nodes[3]), rule)


def test_measure_for():
    assert measure_for(FamilySpec.hermite()) == MeasureSpec.gaussian()
    assert measure_for(FamilySpec.laguerre(2.0)) == MeasureSpec.gamma(2.0)
    assert measure_for(FamilySpec.gegenbauer(3.0)) == MeasureSpec.jacobi_beta(2.5, 2.5)
    assert measure_for(FamilySpec.jacobi(1.0, 2.0)) == MeasureSpec.jacobi_beta(1.0, 2.0)


def test_log_density_normalized():
    for m in (MeasureSpec.jacobi_beta(1.0, 0.5), MeasureSpec.gamma(1.5)):
        lo, hi = m.domain
        hi = min(hi, 80.0)
        val = mpmath.quad(lambda t: mpmath.e ** float(m.log_density(float(t))), [lo, hi])
        assert float(val) == pytest.approx(1.0, rel=1e-8)


def test_default_order():
    assert default_order(10) == 64
    assert default_order(100) == 116


def test_invalid_measure():
    with pytest.raises(ValueError):
        MeasureSpec.jacobi_beta(-1.5, 0.0)
