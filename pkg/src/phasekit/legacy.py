"""Susskind-Glogower and Pegg-Barnett constructions, kept as baselines.

The truncated shift ``E`` loses ``E E^dag = I`` at the top row, so the
finite-dimensional identities carry a mirrored ``|n_max><n_max|`` defect next
to the genuine ``|0><0|`` one.
"""

from __future__ import annotations

import numpy as np

from .fock import BandedHermitianOperator, TruncationConfig


def build_shift_E(cfg: TruncationConfig) -> tuple[np.ndarray, np.ndarray]:
    """One-sided shift ``E = sum_n |n><n+1|`` and its adjoint."""
    e = np.eye(cfg.dim, k=1)
    return e, e.T.copy()


def build_sg(cfg: TruncationConfig) -> tuple[BandedHermitianOperator, BandedHermitianOperator]:
    """``C = (E + E^dag)/2`` and ``S = (E - E^dag)/(2i)``."""
    e, ed = build_shift_E(cfg)
    return BandedHermitianOperator((e + ed) / 2, 1), BandedHermitianOperator((e - ed) / 2j, 1)


def sg_defects(cfg: TruncationConfig) -> dict[str, float]:
    """Deviations of the SG algebra from its predicted finite-dimensional form.

    Every value is zero when the identities hold exactly, including the
    bottom ``|0><0|`` defects and the top truncation defect. With
    ``S = (E - E^dag)/(2i)`` the commutator works out to
    ``[C, S] = (i/2)(|0><0| - |n_max><n_max|)``; the often-quoted form with
    ``1/(2i)`` in place of ``i/2`` has the opposite sign and is reported
    separately as ``C_S_commutator_printed_sign``.
    """
    c, s = (op.entries for op in build_sg(cfg))
    n = np.diag(np.arange(cfg.dim, dtype=float))
    e, ed = build_shift_E(cfg)
    p0 = np.zeros((cfg.dim, cfg.dim))
    p0[0, 0] = 1
    ptop = np.zeros_like(p0)
    ptop[-1, -1] = 1
    eye = np.eye(cfg.dim)
    k = slice(0, cfg.n_max)  # rows/cols free of the top-edge artifact for [C,N], [S,N]
    return {
        "E_dag_E": float(np.max(np.abs(ed @ e + p0 - eye))),
        "E_E_dag": float(np.max(np.abs(e @ ed - (eye - ptop)))),
        "C_N_vs_iS": float(np.max(np.abs((c @ n - n @ c) - 1j * s)[k, k])),
        "S_N_vs_minus_iC": float(np.max(np.abs((s @ n - n @ s) + 1j * c)[k, k])),
        "C_S_commutator": float(np.max(np.abs((c @ s - s @ c) - 0.5j * (p0 - ptop)))),
        "C2_plus_S2": float(np.max(np.abs(c @ c + s @ s - (eye - p0 / 2 - ptop / 2)))),
    }


def sg_printed_sign_deviation(cfg: TruncationConfig) -> float:
    """Distance of ``[C, S]`` from ``(1/(2i))(|0><0| - |n_max><n_max|)``."""
    c, s = (op.entries for op in build_sg(cfg))
    p = np.zeros((cfg.dim, cfg.dim))
    p[0, 0], p[-1, -1] = 1, -1
    return float(np.max(np.abs((c @ s - s @ c) - p / 2j)))


def pb_cycling(s: int) -> np.ndarray:
    """``|0><1| + |1><2| + ... + |s-1><s| + |s><0|`` as an integer matrix."""
    if s < 1:
        raise ValueError("Pegg-Barnett dimension parameter s must be >= 1")
    m = np.eye(s + 1, k=1, dtype=np.int64)
    m[s, 0] = 1
    return m


def pb_divergence(s: int) -> int:
    """``<0| U^dag N U |0>`` for the cycling operator ``U``; equals ``s``."""
    u = pb_cycling(s)
    v = u[:, 0]
    number = np.arange(s + 1, dtype=np.int64)
    return int(v @ (number * v))
