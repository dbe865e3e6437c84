"""Phase-state coefficients in the number basis.

The parity-resolved eigenstates of ``cos 2phi`` are

    <2n|lam,e>   = (1 - lam^2)^(-1/8) C_n^(1/4)(lam) / N_n(1/4)
    <2n+1|lam,o> = (1 - lam^2)^(+1/8) C_n^(3/4)(lam) / N_n(3/4)

and ``|lam,+->  = (|lam,e> +- |lam,o>) / sqrt(2)``. These are continuum
normalized; on a quadrature grid they are stored as sampled coefficient
functions and only ever contracted through quadrature sums.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError
from .fock import TruncationConfig, f_ratio_array
from .special import EVEN_ORDER, ODD_ORDER, QuadratureRule, gegenbauer_table, log_norm_sq


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


class Sign(enum.Enum):
    PLUS = "+"
    MINUS = "-"


def _coeff_columns(parity: Parity, n_terms: int, lam, one_minus_sq) -> np.ndarray:
    if parity is Parity.EVEN:
        order, power = EVEN_ORDER, -0.125
    else:
        order, power = ODD_ORDER, 0.125
    poly = gegenbauer_table(order, n_terms, lam)
    inv_norm = np.exp(-0.5 * log_norm_sq(order, np.arange(n_terms)))
    envelope = np.asarray(one_minus_sq, dtype=float) ** power
    return poly * inv_norm * envelope[..., None]


def coeff_table(parity: Parity, n_terms: int, lam) -> np.ndarray:
    """Coefficients for sublattice indices ``0 .. n_terms-1`` at each ``lam``.

    For ``Parity.EVEN`` column ``n`` is ``<2n|lam,e>``; for ``Parity.ODD`` it is
    ``<2n+1|lam,o>``.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(np.abs(lam) >= 1):
        raise DomainError("lambda must lie strictly inside (-1, 1)")
    return _coeff_columns(parity, n_terms, lam, (1 - lam) * (1 + lam))


def coeff(parity: Parity, n: int, lam: float) -> float:
    """``<2n|lam,e>`` or ``<2n+1|lam,o>``.

    Raises
    ------
    DomainError
        If ``|lam| >= 1``.
    """
    if n < 0:
        raise ValueError("index must be non-negative")
    return float(coeff_table(parity, n + 1, lam)[..., n])


def recurrence_residual(parity: Parity, lam: float, n_limit: int) -> float:
    """Largest mismatch in the parity recurrence for ``n = 0 .. n_limit``.

    Even: ``sqrt f(2n+1) c_{n+1} = 2 lam c_n - sqrt f(2n-1) c_{n-1}``.
    Odd:  ``sqrt f(2n+2) c_{n+1} = 2 lam c_n - sqrt f(2n) c_{n-1}``.
    """
    c = coeff_table(parity, n_limit + 2, lam)
    n = np.arange(n_limit + 1)
    shift = 1 if parity is Parity.EVEN else 2
    up = np.sqrt(f_ratio_array(2 * n + shift))
    down = np.sqrt(f_ratio_array(2 * n + shift - 2))
    prev = np.concatenate(([0.0], c[:n_limit]))
    lhs = up * c[1:n_limit + 2]
    rhs = 2 * lam * c[:n_limit + 1] - down * prev
    return float(np.max(np.abs(lhs - rhs)))


def phi_label(lam: float, branch: Sign) -> float:
    """Eigenvalue of the phase operator on ``|lam, branch>``.

    ``phi = arccos(lam)/2`` for Plus, ``phi - pi`` for Minus.
    """
    phi = 0.5 * math.acos(lam)
    return phi if branch is Sign.PLUS else phi - math.pi


def display_label(lam: float, branch: Sign) -> float:
    """Angular label of ``|phi>``: Plus in ``(0, pi/2)``, Minus in ``(pi, 3pi/2)``."""
    phi = 0.5 * math.acos(lam)
    return phi if branch is Sign.PLUS else phi + math.pi


@dataclass(frozen=True, eq=False)
class PhaseStateTable:
    """``<n|lam_k, +->`` for every quadrature node ``k`` (rows) and ``n`` (columns)."""

    cfg: TruncationConfig
    grid: QuadratureRule
    coeffs_plus: np.ndarray
    coeffs_minus: np.ndarray

    @property
    def node_count(self) -> int:
        return self.grid.node_count

    def coeffs(self, branch: Sign) -> np.ndarray:
        return self.coeffs_plus if branch is Sign.PLUS else self.coeffs_minus

    def phi_state(self, k: int, branch: Sign) -> np.ndarray:
        """``<n|phi_k>`` including the ``sqrt(2 sin 2phi)`` angular normalization."""
        scale = math.sqrt(2 * math.sin(2 * self.grid.phi_nodes[k]))
        return scale * self.coeffs(branch)[k]

    def spectral_sum(self, plus_values, minus_values) -> np.ndarray:
        """``sum_k W_k (g+_k |k,+><k,+| + g-_k |k,-><k,-|)`` with ``W_k`` the lambda weights.

        Accumulation runs over nodes in fixed order; the result is symmetrized
        so it is exactly symmetric.
        """
        w = self.grid.lambda_weights
        vp, vm = self.coeffs_plus, self.coeffs_minus
        out = (vp * (w * plus_values)[:, None]).T @ vp
        out += (vm * (w * minus_values)[:, None]).T @ vm
        return (out + out.T) / 2


def build_phase_table(cfg: TruncationConfig, grid: QuadratureRule) -> PhaseStateTable:
    s = grid.one_minus_lambda_sq
    lam = grid.lambda_nodes
    even = _coeff_columns(Parity.EVEN, cfg.even_dim, lam, s)
    odd = _coeff_columns(Parity.ODD, cfg.odd_dim, lam, s)
    plus = np.empty((grid.node_count, cfg.dim))
    plus[:, 0::2] = even / math.sqrt(2)
    plus[:, 1::2] = odd / math.sqrt(2)
    minus = plus.copy()
    minus[:, 1::2] *= -1
    plus.setflags(write=False)
    minus.setflags(write=False)
    return PhaseStateTable(cfg=cfg, grid=grid, coeffs_plus=plus, coeffs_minus=minus)


def resolution_of_identity(table: PhaseStateTable) -> np.ndarray:
    """Quadrature realization of ``int d lam (|lam,+><lam,+| + |lam,-><lam,-|)``."""
    ones = np.ones(table.node_count)
    return table.spectral_sum(ones, ones)


def identity_defect(table: PhaseStateTable, upto: int | None = None) -> float:
    """``max |P_ij - delta_ij|`` over number indices ``<= upto`` (default ``n_max/2``)."""
    upto = table.cfg.n_max // 2 if upto is None else upto
    p = resolution_of_identity(table)[: upto + 1, : upto + 1]
    return float(np.max(np.abs(p - np.eye(upto + 1))))


def orthonormality_error(grid: QuadratureRule, parity: Parity, upto: int = 20) -> float:
    """``max |int c_m c_n d lam - delta_mn|`` over sublattice indices ``<= upto``."""
    c = _coeff_columns(parity, upto + 1, grid.lambda_nodes, grid.one_minus_lambda_sq)
    gram = (c * grid.lambda_weights[:, None]).T @ c
    return float(np.max(np.abs(gram - np.eye(upto + 1))))


TABLE_HEADER = ("node", "lambda", "phi", "branch", "n", "coefficient")


def write_table_csv(table: PhaseStateTable, path) -> None:
    """Dump the table as one row per (node, branch, n)."""
    path = Path(path)
    grid = table.grid
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TABLE_HEADER)
        for k in range(table.node_count):
            lam = repr(float(grid.lambda_nodes[k]))
            for branch in Sign:
                phi = float(grid.phi_nodes[k])
                label = repr(phi if branch is Sign.PLUS else phi - math.pi)
                row = table.coeffs(branch)[k]
                for n in range(table.cfg.dim):
                    w.writerow((k, lam, label, branch.value, n, repr(float(row[n]))))
