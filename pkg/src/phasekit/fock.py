"""Truncated Fock space: configuration, states and the elementary operators.

All matrices are indexed by occupation number, row ``n`` being ``<n|``.
Units are dimensionless with ``hbar * omega = 1``, so that
``H = q^2 + p^2 = N + 1/2`` and ``a = q + i p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.stats import poisson

from .errors import DomainError, TruncationInsufficient

COHERENT_TAIL_TOL = 1e-12
HERMITICITY_TOL = 1e-14


@dataclass(frozen=True)
class TruncationConfig:
    """Size of the retained number basis ``|0>, ..., |n_max>``.

    ``interior_margin`` counts the rows at the top of the basis that are
    treated as contaminated by truncation in interior-restricted checks.
    """

    n_max: int = 256
    interior_margin: int = 4

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 8 or self.n_max % 2:
            raise ValueError(f"n_max must be an even integer >= 8, got {self.n_max}")
        if int(self.interior_margin) != self.interior_margin or self.interior_margin < 2:
            raise ValueError(f"interior_margin must be an integer >= 2, got {self.interior_margin}")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    @property
    def last_interior(self) -> int:
        """Highest row index considered free of truncation effects."""
        return self.n_max - self.interior_margin

    @property
    def even_dim(self) -> int:
        return self.n_max // 2 + 1

    @property
    def odd_dim(self) -> int:
        return self.n_max // 2


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FockVector:
    """Complex amplitudes over number states; index ``n`` holds ``<n|psi>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def inner(self, other: "FockVector") -> complex:
        """Return ``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class BandedHermitianOperator:
    """Hermitian operator in the number basis.

    Storage is dense; ``bandwidth`` records the largest ``|row - col|``
    that may carry a nonzero entry and is enforced on construction.
    """

    entries: np.ndarray
    bandwidth: int

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator must be square, got shape {a.shape}")
        if not np.iscomplexobj(a):
            a = a.astype(float)
        scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
        if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITICITY_TOL * scale:
            raise ValueError("operator is not Hermitian")
        bw = int(self.bandwidth)
        if bw < a.shape[0] - 1:
            rows, cols = np.indices(a.shape)
            if np.any(a[np.abs(rows - cols) > bw] != 0):
                raise ValueError(f"nonzero entry outside declared bandwidth {bw}")
        object.__setattr__(self, "entries", _readonly(a))
        object.__setattr__(self, "bandwidth", bw)

    @classmethod
    def dense(cls, entries: np.ndarray) -> "BandedHermitianOperator":
        """Wrap a full matrix, declaring the maximal bandwidth."""
        entries = np.asarray(entries)
        return cls(entries, entries.shape[0] - 1)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def apply(self, state: FockVector) -> FockVector:
        return FockVector(self.entries @ state.amplitudes)

    def expectation(self, state: FockVector) -> complex:
        v = state.amplitudes
        return complex(np.vdot(v, self.entries @ v))

    def __matmul__(self, other):
        if isinstance(other, BandedHermitianOperator):
            return self.entries @ other.entries
        if isinstance(other, FockVector):
            return self.apply(other)
        return self.entries @ other


def f_ratio(n: int) -> float:
    """Coupling ratio ``n(n+1) / ((n - 1/2)(n + 3/2))``, zero for ``n <= 0``.

    It governs the ``n <-> n+2`` band of ``cos 2phi``; on ``n >= 1`` it
    decreases strictly from 8/5 towards 1.
    """
    if n <= 0:
        return 0.0
    return n * (n + 1) / ((n - 0.5) * (n + 1.5))


def f_ratio_exact(n: int) -> Fraction:
    """Rational value of :func:`f_ratio`."""
    if n <= 0:
        return Fraction(0)
    return Fraction(4 * n * (n + 1), (2 * n - 1) * (2 * n + 3))


def f_ratio_array(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    out = np.zeros_like(n)
    pos = n >= 1
    m = n[pos]
    out[pos] = m * (m + 1) / ((m - 0.5) * (m + 1.5))
    return out


def build_ladder(cfg: TruncationConfig) -> tuple[np.ndarray, np.ndarray]:
    """Return the truncated annihilation and creation matrices ``(a, a_dag)``."""
    a = np.diag(np.sqrt(np.arange(1, cfg.dim, dtype=float)), 1)
    return a, a.T.copy()


class Quadratures(NamedTuple):
    position: BandedHermitianOperator
    momentum: BandedHermitianOperator
    number: BandedHermitianOperator
    hamiltonian: BandedHermitianOperator


def build_quadratures(cfg: TruncationConfig) -> Quadratures:
    """Position, momentum, number operator and Hamiltonian.

    ``q = (a + a_dag)/2`` and ``p = (a - a_dag)/(2i)``.
    """
    a, ad = build_ladder(cfg)
    q = (a + ad) / 2
    p = (a - ad) / 2j
    n = np.diag(np.arange(cfg.dim, dtype=float))
    return Quadratures(
        position=BandedHermitianOperator(q, 1),
        momentum=BandedHermitianOperator(p, 1),
        number=BandedHermitianOperator(n, 0),
        hamiltonian=BandedHermitianOperator(n + 0.5 * np.eye(cfg.dim), 0),
    )


def fock_state(cfg: TruncationConfig, n: int) -> FockVector:
    if not 0 <= n <= cfg.n_max:
        raise DomainError(f"number state {n} outside 0..{cfg.n_max}")
    v = np.zeros(cfg.dim, dtype=complex)
    v[n] = 1.0
    return FockVector(v)


def coherent_tail(cfg: TruncationConfig, abs_alpha: float) -> float:
    """Poisson weight discarded by truncating ``|alpha>`` at ``n_max``."""
    return float(poisson.sf(cfg.n_max, abs_alpha**2)) if abs_alpha > 0 else 0.0


def coherent_state(cfg: TruncationConfig, abs_alpha: float, phase_angle: float,
                   tail_tol: float = COHERENT_TAIL_TOL) -> FockVector:
    """Coherent state ``|alpha>``, ``alpha = abs_alpha * exp(i phase_angle)``.

    Amplitudes are formed in log space and renormalized after truncation.

    Raises
    ------
    TruncationInsufficient
        If the discarded Poisson tail exceeds ``tail_tol``.
    """
    if abs_alpha < 0:
        raise DomainError("abs_alpha must be non-negative")
    tail = coherent_tail(cfg, abs_alpha)
    if tail > tail_tol:
        raise TruncationInsufficient(
            f"|alpha|={abs_alpha} leaves Poisson tail {tail:.3g} beyond n_max={cfg.n_max}")
    if abs_alpha == 0:
        return fock_state(cfg, 0)
    n = np.arange(cfg.dim)
    x = abs_alpha**2
    lgam = np.array([math.lgamma(k + 1) for k in n])
    log_mag = -x / 2 + n * math.log(abs_alpha) - lgam / 2
    amps = np.exp(log_mag) * np.exp(1j * phase_angle * n)
    amps /= np.sqrt(np.sum(np.abs(amps) ** 2))
    return FockVector(amps)
