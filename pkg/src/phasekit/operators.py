"""Phase operators in the number basis.

``cos 2phi`` is built exactly from its ``n <-> n+2`` band. ``cos^2 phi`` and
``sin^2 phi`` are ``(I +- cos 2phi)/2``. Everything that needs the full phase
spectrum (``phi`` itself, ``cos phi``, ``sin phi``, ``tan phi``) goes through
quadrature over the phase-state table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import DimensionMismatch
from .fock import BandedHermitianOperator, TruncationConfig, build_ladder, build_quadratures, f_ratio_array
from .phase_states import PhaseStateTable

TAN_CAP = 1e8


def _band_values(cfg: TruncationConfig) -> np.ndarray:
    """``<n|cos 2phi|n+2> = sqrt(f(n+1))/2`` for ``n = 0 .. n_max-2``."""
    return 0.5 * np.sqrt(f_ratio_array(np.arange(1, cfg.dim - 1)))


def build_cos2phi(cfg: TruncationConfig) -> BandedHermitianOperator:
    band = _band_values(cfg)
    m = np.diag(band, 2) + np.diag(band, -2)
    return BandedHermitianOperator(m, 2)


def build_cos_sq(cfg: TruncationConfig) -> BandedHermitianOperator:
    c = build_cos2phi(cfg).entries
    return BandedHermitianOperator((np.eye(cfg.dim) + c) / 2, 2)


def build_sin_sq(cfg: TruncationConfig) -> BandedHermitianOperator:
    c = build_cos2phi(cfg).entries
    return BandedHermitianOperator((np.eye(cfg.dim) - c) / 2, 2)


def _inv_sqrt_energy(cfg: TruncationConfig) -> np.ndarray:
    return 1 / np.sqrt(np.arange(cfg.dim) + 0.5)


def direct_cos_sq(cfg: TruncationConfig) -> np.ndarray:
    """``(N+1/2)^(-1/2) q^2 (N+1/2)^(-1/2)`` from the truncated ``q``.

    Only rows below ``n_max`` are free of truncation error.
    """
    q = build_quadratures(cfg).position.entries
    d = _inv_sqrt_energy(cfg)
    return (d[:, None] * (q @ q) * d[None, :]).real


def direct_sin_sq(cfg: TruncationConfig) -> np.ndarray:
    p = build_quadratures(cfg).momentum.entries
    d = _inv_sqrt_energy(cfg)
    return (d[:, None] * (p @ p) * d[None, :]).real


@dataclass(frozen=True)
class SpectralFunction:
    """Values of a function of the phase on the two branches.

    Both callables receive the node angle ``phi`` in ``(0, pi/2)``;
    ``minus_value`` returns the function at the Minus-branch eigenvalue.
    """

    plus_value: Callable[[np.ndarray], np.ndarray]
    minus_value: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def of_eigenvalue(cls, g) -> "SpectralFunction":
        """Apply ``g`` to the eigenvalues ``phi`` and ``phi - pi``."""
        return cls(g, lambda phi: g(phi - np.pi))

    @classmethod
    def of_display_label(cls, g) -> "SpectralFunction":
        """Apply ``g`` to the angular labels ``phi`` and ``phi + pi``."""
        return cls(g, lambda phi: g(phi + np.pi))

    @classmethod
    def of_lambda(cls, h) -> "SpectralFunction":
        """Function of ``lambda = cos 2phi`` only, identical on both branches."""
        return cls(lambda phi: h(np.cos(2 * phi)), lambda phi: h(np.cos(2 * phi)))


IDENTITY = SpectralFunction(lambda phi: np.ones_like(phi), lambda phi: np.ones_like(phi))
PHI = SpectralFunction.of_eigenvalue(lambda phi: phi)
PHI_DISPLAY = SpectralFunction.of_display_label(lambda phi: phi)
COS_PHI = SpectralFunction(np.cos, lambda phi: -np.cos(phi))
SIN_PHI = SpectralFunction(np.sin, lambda phi: -np.sin(phi))
TAN_PHI = SpectralFunction(np.tan, np.tan)
COS2PHI = SpectralFunction.of_lambda(lambda lam: lam)


def capped_nodes(table: PhaseStateTable, func: SpectralFunction, cap: float) -> np.ndarray:
    """Indices of nodes where either branch value exceeds ``cap`` in magnitude."""
    phi = table.grid.phi_nodes
    big = (np.abs(func.plus_value(phi)) > cap) | (np.abs(func.minus_value(phi)) > cap)
    return np.flatnonzero(big)


def build_spectral_operator(table: PhaseStateTable, func: SpectralFunction,
                            cap: float | None = None) -> BandedHermitianOperator:
    """Number-basis matrix of ``sum_k W_k [g+(phi_k)|k,+><k,+| + g-(phi_k)|k,-><k,-|]``.

    Nodes where ``|g| > cap`` are left out of the sum.
    """
    phi = table.grid.phi_nodes
    gp = np.asarray(func.plus_value(phi), dtype=float)
    gm = np.asarray(func.minus_value(phi), dtype=float)
    if cap is not None:
        drop = capped_nodes(table, func, cap)
        gp = gp.copy()
        gm = gm.copy()
        gp[drop] = 0.0
        gm[drop] = 0.0
    return BandedHermitianOperator.dense(table.spectral_sum(gp, gm))


def build_phi(table: PhaseStateTable, display: bool = False) -> BandedHermitianOperator:
    """The phase operator.

    With ``display=True`` the Minus branch carries ``phi + pi`` instead of the
    eigenvalue ``phi - pi``; the two differ by ``2 pi`` on that branch.
    """
    return build_spectral_operator(table, PHI_DISPLAY if display else PHI)


def build_cos_phi(table: PhaseStateTable) -> BandedHermitianOperator:
    return build_spectral_operator(table, COS_PHI)


def build_sin_phi(table: PhaseStateTable) -> BandedHermitianOperator:
    return build_spectral_operator(table, SIN_PHI)


def build_tan_phi(table: PhaseStateTable, cap: float = TAN_CAP) -> BandedHermitianOperator:
    return build_spectral_operator(table, TAN_PHI, cap=cap)


def _entries(op) -> np.ndarray:
    return op.entries if isinstance(op, BandedHermitianOperator) else np.asarray(op)


def commutator(a, b) -> np.ndarray:
    a, b = _entries(a), _entries(b)
    if a.ndim != 2 or a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"cannot commute shapes {a.shape} and {b.shape}")
    return a @ b - b @ a


@dataclass(frozen=True)
class CommReport:
    """Largest interior deviations of the commutator identities with ``N``."""

    cos2phi_vs_ladder: float
    cos_sq_vs_half: float
    sin_sq_vs_half: float

    def max(self) -> float:
        return max(self.cos2phi_vs_ladder, self.cos_sq_vs_half, self.sin_sq_vs_half)


def check_comm_relations(cfg: TruncationConfig) -> CommReport:
    """Compare ``[cos 2phi, N]``, ``[cos^2 phi, N]``, ``[sin^2 phi, N]`` with their closed forms."""
    number = build_quadratures(cfg).number
    c2 = commutator(build_cos2phi(cfg), number)
    a, ad = build_ladder(cfg)
    d = _inv_sqrt_energy(cfg)
    rhs = d[:, None] * (a @ a - ad @ ad) * d[None, :]
    cs = commutator(build_cos_sq(cfg), number)
    ss = commutator(build_sin_sq(cfg), number)
    k = cfg.last_interior + 1
    return CommReport(
        cos2phi_vs_ladder=float(np.max(np.abs(c2 - rhs)[:k, :k])),
        cos_sq_vs_half=float(np.max(np.abs(cs - c2 / 2)[:k, :k])),
        sin_sq_vs_half=float(np.max(np.abs(ss + c2 / 2)[:k, :k])),
    )


def truncated_block_spectra(cfg: TruncationConfig) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues of the truncated even and odd tridiagonal blocks of ``cos 2phi``."""
    band = _band_values(cfg)
    even_off, odd_off = band[0::2], band[1::2]
    even = eigvalsh_tridiagonal(np.zeros(cfg.even_dim), even_off)
    odd = eigvalsh_tridiagonal(np.zeros(cfg.odd_dim), odd_off)
    return even, odd
