"""Free evolution under ``H = N + 1/2`` (``omega = 1``).

Both state evolution and the Heisenberg transport are diagonal phase
multiplications. Phases at integer multiples of ``pi/2`` are snapped to
exact ``1, i, -1, -i`` so quarter-period relations hold bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

from .fock import BandedHermitianOperator, FockVector
from .phase_states import PhaseStateTable

_QUARTER = np.array([1, 1j, -1, -1j])


def unit_phase(theta) -> np.ndarray:
    """``exp(i theta)``, exact where ``theta`` is a multiple of ``pi/2``."""
    theta = np.asarray(theta, dtype=float)
    q = theta / (np.pi / 2)
    nearest = np.rint(q)
    out = np.exp(1j * theta)
    snap = np.abs(q - nearest) <= 1e-12 * np.maximum(1.0, np.abs(q))
    out[snap] = _QUARTER[nearest[snap].astype(np.int64) % 4]
    return out


def evolve_state(state: FockVector, t: float) -> FockVector:
    """``exp(-i t H) |psi>``."""
    n = np.arange(state.dim)
    return FockVector(state.amplitudes * unit_phase(-t * (n + 0.5)))


def heisenberg(op: BandedHermitianOperator, t: float) -> BandedHermitianOperator:
    """``exp(i H t) A exp(-i H t)``: entry ``(m, n)`` picks up ``exp(i t (m - n))``."""
    idx = np.arange(op.dim)
    phase = unit_phase(t * np.subtract.outer(idx, idx))
    return BandedHermitianOperator(op.entries * phase, op.bandwidth)


def node_pair(table: PhaseStateTable, k: int) -> np.ndarray:
    """Orthonormal columns spanning the sampled ``|lam_k,+>``, ``|lam_k,->`` pair.

    The truncated samples are nearly but not exactly orthogonal; a symmetric
    (Loewdin) orthonormalization keeps the Plus/Minus labelling intact.
    """
    if not 0 <= k < table.node_count:
        raise IndexError(f"node {k} outside 0..{table.node_count - 1}")
    u = np.stack([table.coeffs_plus[k], table.coeffs_minus[k]], axis=1)
    vals, vecs = np.linalg.eigh(u.T @ u)
    return u @ (vecs @ np.diag(vals ** -0.5) @ vecs.T)


def phase_basis_matrix_elements(op: BandedHermitianOperator, table: PhaseStateTable,
                                k: int) -> np.ndarray:
    """2x2 block ``M[i, j] = <u_i| A |u_j>`` in the node-``k`` Plus/Minus pair.

    So ``A |u_1> ~ M[0,0] |u_1> + M[1,0] |u_2>``.
    """
    u = node_pair(table, k)
    return u.conj().T @ op.entries @ u


def quarter_period_blocks(phi: float) -> dict[str, np.ndarray]:
    """Closed-form Plus/Minus blocks of the transported operators at node angle ``phi``.

    ``phi`` blocks at ``t = pi/2, 3pi/2`` are written with the Minus branch
    labelled ``phi + pi``; the ``t = pi`` block uses the eigenvalue ``phi - pi``.
    """
    pi = math.pi
    s = math.sin(phi)
    c = math.cos(phi)
    return {
        "phi@pi/2": np.array([[pi - phi, -0.5j * pi], [0.5j * pi, pi - phi]]),
        "phi@pi": np.array([[phi - pi, 0], [0, phi]], dtype=complex),
        "phi@3pi/2": np.array([[pi - phi, 0.5j * pi], [-0.5j * pi, pi - phi]]),
        "cos_phi@pi/2": np.array([[0, 1j * s], [-1j * s, 0]]),
        "cos_phi@3pi/2": np.array([[0, -1j * s], [1j * s, 0]]),
        "sin_phi@pi/2": np.array([[0, 1j * c], [-1j * c, 0]]),
        "sin_phi@3pi/2": np.array([[0, -1j * c], [1j * c, 0]]),
    }
