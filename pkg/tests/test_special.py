import math

import numpy as np
import pytest
from scipy.special import eval_gegenbauer

from phasekit.special import (EVEN_ORDER, ODD_ORDER, GegenbauerOrder, build_quadrature, gegenbauer_eval,
                              gegenbauer_norm_sq, gegenbauer_table)

# 2^(1-2a) pi Gamma(2a) / (a Gamma(a)^2), checked against mpmath quadrature of the weight
N0_SQ_QUARTER = 2.39628046947118441488
N0_SQ_THREE_QUARTER = 1.74803836952807987364


def monomial_gegenbauer(n, alpha, x):
    return sum((-1) ** i * math.gamma(n - i + alpha)
               / (math.gamma(alpha) * math.factorial(i) * math.factorial(n - 2 * i)) * (2 * x) ** (n - 2 * i)
               for i in range(n // 2 + 1))


def test_order_validation():
    with pytest.raises(ValueError):
        GegenbauerOrder(-0.5)


def test_eval_examples():
    assert gegenbauer_eval(EVEN_ORDER, 0, 0.3) == 1
    assert gegenbauer_eval(EVEN_ORDER, 1, 0.5) == pytest.approx(0.25)
    assert gegenbauer_eval(ODD_ORDER, 2, 1.0) == pytest.approx(1.875, abs=1e-15)


@pytest.mark.parametrize("alpha", [0.25, 0.75])
@pytest.mark.parametrize("n", range(7))
def test_recurrence_matches_monomial_expansion(alpha, n):
    for x in np.linspace(-1, 1, 11):
        assert gegenbauer_eval(alpha, n, x) == pytest.approx(monomial_gegenbauer(n, alpha, x), abs=1e-12)


def test_table_matches_scipy():
    x = np.linspace(-0.99, 0.99, 37)
    for order in (EVEN_ORDER, ODD_ORDER):
        tab = gegenbauer_table(order, 60, x)
        for n in (5, 30, 59):
            np.testing.assert_allclose(tab[:, n], eval_gegenbauer(n, order.alpha, x), rtol=1e-10, atol=1e-12)


def test_norm_constants():
    assert gegenbauer_norm_sq(EVEN_ORDER, 0) == pytest.approx(N0_SQ_QUARTER, rel=1e-13)
    assert gegenbauer_norm_sq(ODD_ORDER, 0) == pytest.approx(N0_SQ_THREE_QUARTER, rel=1e-13)


@pytest.mark.parametrize("order", [EVEN_ORDER, ODD_ORDER])
def test_norm_ratio_recurrence(order):
    a = order.alpha
    for n in (0, 1, 7, 100, 5000):
        ratio = gegenbauer_norm_sq(order, n + 1) / gegenbauer_norm_sq(order, n)
        assert ratio == pytest.approx((n + 2 * a) * (n + a) / ((n + 1) * (n + 1 + a)), rel=1e-12)
    assert 0 < gegenbauer_norm_sq(order, 10_000) < math.inf


def test_quadrature_rule():
    rule = build_quadrature(256)
    assert rule.weights.sum() == pytest.approx(math.pi / 2, abs=1e-12)
    assert np.all(np.diff(rule.lambda_nodes) < 0)
    assert np.all(np.abs(rule.lambda_nodes) < 1)
    assert rule.integrate_lambda(np.ones(256)) == pytest.approx(2, abs=1e-12)
    with pytest.raises(ValueError):
        build_quadrature(32)


def test_quadrature_weighted_integrals():
    rule = build_quadrature(512)
    w = rule.one_minus_lambda_sq ** -0.25
    lam = rule.lambda_nodes
    c1 = gegenbauer_table(EVEN_ORDER, 2, lam)[:, 1]
    assert abs(rule.integrate_lambda(w * c1)) <= 1e-10
    big = build_quadrature(2048)
    val = big.integrate_lambda(big.one_minus_lambda_sq ** -0.25)
    assert val == pytest.approx(N0_SQ_QUARTER, abs=1e-6)


@pytest.mark.parametrize("order", [EVEN_ORDER, ODD_ORDER])
def test_orthogonality_converges(order):
    errs = []
    for Q in (256, 1024, 4096):
        rule = build_quadrature(Q)
        c = gegenbauer_table(order, 41, rule.lambda_nodes)
        weight = rule.one_minus_lambda_sq ** (order.alpha - 0.5)
        gram = (c * (rule.lambda_weights * weight)[:, None]).T @ c
        norms = np.array([gegenbauer_norm_sq(order, n) for n in range(41)])
        errs.append(np.max(np.abs(gram - np.diag(norms)) / np.sqrt(np.outer(norms, norms))))
    assert errs[-1] < errs[0]
    assert errs[-1] < 1e-8
