"""Gegenbauer polynomials, their norms, and the spectral quadrature rule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre


@dataclass(frozen=True)
class GegenbauerOrder:
    alpha: float

    def __post_init__(self):
        if not self.alpha > -0.5:
            raise ValueError(f"Gegenbauer order must exceed -1/2, got {self.alpha}")


EVEN_ORDER = GegenbauerOrder(0.25)
ODD_ORDER = GegenbauerOrder(0.75)


def _alpha(order) -> float:
    return order.alpha if isinstance(order, GegenbauerOrder) else GegenbauerOrder(float(order)).alpha


def gegenbauer_table(order, n_terms: int, lam) -> np.ndarray:
    """Evaluate ``C_0 .. C_{n_terms-1}`` at every point of ``lam``.

    Uses the three-term recurrence
    ``(n+1) C_{n+1} = 2(n+alpha) x C_n - (n+2alpha-1) C_{n-1}``.
    Returns an array of shape ``lam.shape + (n_terms,)``.
    """
    alpha = _alpha(order)
    lam = np.asarray(lam, dtype=float)
    out = np.empty(lam.shape + (n_terms,))
    if n_terms == 0:
        return out
    out[..., 0] = 1.0
    if n_terms > 1:
        out[..., 1] = 2 * alpha * lam
    for n in range(1, n_terms - 1):
        out[..., n + 1] = (2 * (n + alpha) * lam * out[..., n]
                           - (n + 2 * alpha - 1) * out[..., n - 1]) / (n + 1)
    return out


def gegenbauer_eval(order, n: int, lam: float) -> float:
    """``C_n^(alpha)(lam)``."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    return float(gegenbauer_table(order, n + 1, lam)[..., n])


# Bernoulli coefficients B_2k / (2k (2k-1)) of the Stirling series
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360, 1 / 156)


def _stirling_tail(x: float) -> float:
    inv = 1 / x
    inv2 = inv * inv
    acc = 0.0
    for c in reversed(_STIRLING):
        acc = acc * inv2 + c
    return acc * inv


def log_gamma_ratio(n: int, a: float) -> float:
    """``log(Gamma(n + a) / Gamma(n + 1))`` without the cancellation of two lgammas."""
    if n < 30:
        return math.log(math.gamma(n + a) / math.gamma(n + 1))
    x, y = n + a, n + 1.0
    d = a - 1
    return ((x - 0.5) * math.log1p(d / y) + d * (math.log(y) - 1)
            + _stirling_tail(x) - _stirling_tail(y))


def log_norm_sq(order, n) -> np.ndarray:
    """``log N_n^2(alpha)`` with
    ``N_n^2 = 2^(1-2a) pi Gamma(n+2a) / ((n+a) n! Gamma(a)^2)``."""
    alpha = _alpha(order)
    n = np.atleast_1d(np.asarray(n))
    const = (1 - 2 * alpha) * math.log(2) + math.log(math.pi) - 2 * math.lgamma(alpha)
    vals = [const + log_gamma_ratio(k, 2 * alpha) - math.log(k + alpha) for k in n.tolist()]
    return np.array(vals)


def gegenbauer_norm_sq(order, n: int) -> float:
    """Squared norm of ``C_n^(alpha)`` under the weight ``(1 - x^2)^(alpha - 1/2)``."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    return float(np.exp(log_norm_sq(order, n)[0]))


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Legendre rule on ``phi in (0, pi/2)`` with ``lambda = cos 2 phi``.

    ``weights`` integrate in ``phi``. Integrals over ``lambda`` use
    ``lambda_weights = weights * 2 sin 2phi`` since ``|d lambda| = 2 sin 2phi d phi``.
    """

    phi_nodes: np.ndarray
    lambda_nodes: np.ndarray
    weights: np.ndarray

    @property
    def node_count(self) -> int:
        return self.phi_nodes.shape[0]

    @property
    def lambda_weights(self) -> np.ndarray:
        return self.weights * 2 * np.sin(2 * self.phi_nodes)

    @property
    def one_minus_lambda_sq(self) -> np.ndarray:
        """``1 - lambda^2`` evaluated as ``sin^2 2phi`` (no cancellation near the ends)."""
        return np.sin(2 * self.phi_nodes) ** 2

    def integrate_phi(self, values) -> float:
        return float(np.dot(self.weights, values))

    def integrate_lambda(self, values) -> float:
        """``int_{-1}^{1} g(lambda) d lambda`` from samples ``g(lambda_k)``."""
        return float(np.dot(self.lambda_weights, values))


DEFAULT_NODES = 2048


def build_quadrature(Q: int = DEFAULT_NODES) -> QuadratureRule:
    if Q < 64:
        raise ValueError(f"quadrature needs at least 64 nodes, got {Q}")
    x, w = roots_legendre(Q)
    phi = (x + 1) * (np.pi / 4)
    w = w * (np.pi / 4)
    for arr in (phi, w):
        arr.setflags(write=False)
    lam = np.cos(2 * phi)
    lam.setflags(write=False)
    return QuadratureRule(phi_nodes=phi, lambda_nodes=lam, weights=w)
