"""The identity suite run by ``phasekit verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import dynamics, legacy, observables, operators, phase_states
from .errors import PhasekitError
from .fock import FockVector, TruncationConfig, fock_state
from .phase_states import Parity, Sign
from .special import EVEN_ORDER, build_quadrature, gegenbauer_norm_sq


@dataclass(frozen=True)
class Check:
    check_id: str
    paper_eq: str
    measured: float
    tolerance: float
    strict: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.measured):
            return False
        return self.measured < self.tolerance if self.strict else self.measured <= self.tolerance

    def as_row(self) -> dict:
        return {"check_id": self.check_id, "paper_eq": self.paper_eq,
                "measured": float(self.measured), "tolerance": float(self.tolerance),
                "pass": self.passed}


DEFAULT_TOLERANCES = {
    "trig_identity": 0.0,
    "direct_cos_sq": 1e-13,
    "direct_sin_sq": 1e-13,
    "comm_cos2phi_N": 1e-13,
    "comm_cos_sq_N": 1e-13,
    "comm_sin_sq_N": 1e-13,
    "recurrence_even": 1e-10,
    "recurrence_odd": 1e-10,
    "orthonormality_even": 1e-6,
    "orthonormality_odd": 1e-6,
    "eigen_relation": 1e-8,
    "block_spectra_inside": 1.0,
    "resolution_of_identity": 1e-3,
    "spectral_vs_banded_cos2phi": 1e-6,
    "cos2phi_commutes_phi": 1e-6,
    "vacuum_phi": 2e-3,
    "cos_sin_phi_parity": 1e-6,
    "odd_moments": 1e-8,
    "heisenberg_cos_phi_pi": 1e-12,
    "heisenberg_sin_phi_pi": 1e-12,
    "heisenberg_cos_sq": 1e-12,
    "heisenberg_sin_sq": 1e-12,
    "heisenberg_cos2phi": 1e-12,
    "full_period": 0.0,
    "evolve_pi_swaps_branches": 1e-12,
    "node_blocks": 5e-2,
    "exact_moments": 0.0,
    "uniform_limit_identity": 0.0,
    "moment_sidedness": 0.0,
    "coherent_series_vs_matrix": 1e-10,
    "classical_limit_decreasing": 0.0,
    "vacuum_distribution_norm": 1e-6,
    "vacuum_density_quarter": 1e-6,
    "sg_identities": 0.0,
    "pb_divergence": 0.0,
}

BLOCK_TARGETS = (-0.6, -0.3, 0.0, 0.3, 0.6)
RECURRENCE_LAMBDAS = np.linspace(-0.95, 0.95, 20)


def _maxabs(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def node_indices(table, targets=BLOCK_TARGETS) -> list[int]:
    lam = table.grid.lambda_nodes
    return [int(np.argmin(np.abs(lam - t))) for t in targets]


def node_block_deviation(table) -> float:
    """Largest deviation of the transported Plus/Minus blocks from their closed forms."""
    phi_op = operators.build_phi(table)
    phi_disp = operators.build_phi(table, display=True)
    cos_op = operators.build_cos_phi(table)
    sin_op = operators.build_sin_phi(table)
    h = math.pi / 2
    transported = {
        "phi@pi/2": dynamics.heisenberg(phi_disp, h),
        "phi@pi": dynamics.heisenberg(phi_op, 2 * h),
        "phi@3pi/2": dynamics.heisenberg(phi_disp, 3 * h),
        "cos_phi@pi/2": dynamics.heisenberg(cos_op, h),
        "cos_phi@3pi/2": dynamics.heisenberg(cos_op, 3 * h),
        "sin_phi@pi/2": dynamics.heisenberg(sin_op, h),
        "sin_phi@3pi/2": dynamics.heisenberg(sin_op, 3 * h),
    }
    worst = 0.0
    for k in node_indices(table):
        expected = dynamics.quarter_period_blocks(float(table.grid.phi_nodes[k]))
        for name, op in transported.items():
            block = dynamics.phase_basis_matrix_elements(op, table, k)
            worst = max(worst, _maxabs(block - expected[name]))
    return worst


def _guarded(fn: Callable[[], float]) -> float:
    try:
        return fn()
    except PhasekitError:
        return math.inf


def run_identity_suite(cfg: TruncationConfig, Q: int,
                       tolerances: dict[str, float] | None = None) -> list[Check]:
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
        tol.update(tolerances)
    checks: list[Check] = []

    def add(check_id, paper_eq, measured, strict=False):
        checks.append(Check(check_id, paper_eq, float(measured), tol[check_id], strict))

    eye = np.eye(cfg.dim)
    cos_sq = operators.build_cos_sq(cfg)
    sin_sq = operators.build_sin_sq(cfg)
    c2 = operators.build_cos2phi(cfg)
    edge = cfg.n_max - 1
    add("trig_identity", "2.2", _maxabs(cos_sq.entries + sin_sq.entries - eye))
    add("direct_cos_sq", "2.4", _maxabs((operators.direct_cos_sq(cfg) - cos_sq.entries)[:edge, :edge]))
    add("direct_sin_sq", "2.5", _maxabs((operators.direct_sin_sq(cfg) - sin_sq.entries)[:edge, :edge]))
    comm = operators.check_comm_relations(cfg)
    add("comm_cos2phi_N", "2.12", comm.cos2phi_vs_ladder)
    add("comm_cos_sq_N", "2.13", comm.cos_sq_vs_half)
    add("comm_sin_sq_N", "2.14", comm.sin_sq_vs_half)

    n_limit = min(200, cfg.n_max // 2)
    add("recurrence_even", "2.23/2.25", max(phase_states.recurrence_residual(Parity.EVEN, lam, n_limit)
                                           for lam in RECURRENCE_LAMBDAS))
    add("recurrence_odd", "2.24/2.26", max(phase_states.recurrence_residual(Parity.ODD, lam, n_limit)
                                          for lam in RECURRENCE_LAMBDAS))

    grid = build_quadrature(Q)
    upto = min(20, cfg.odd_dim - 1)
    add("orthonormality_even", "2.27-2.28", phase_states.orthonormality_error(grid, Parity.EVEN, upto))
    add("orthonormality_odd", "2.27-2.28", phase_states.orthonormality_error(grid, Parity.ODD, upto))

    table = phase_states.build_phase_table(cfg, grid)
    rows = cfg.last_interior + 1
    vp = table.coeffs_plus
    resid = (vp @ c2.entries.T - grid.lambda_nodes[:, None] * vp)[:, :rows]
    add("eigen_relation", "2.15", float(np.max(np.linalg.norm(resid, axis=1) / np.linalg.norm(vp, axis=1))))
    even, odd = operators.truncated_block_spectra(cfg)
    add("block_spectra_inside", "2.15", max(_maxabs(even), _maxabs(odd)), strict=True)
    add("resolution_of_identity", "2.36", phase_states.identity_defect(table))

    half = cfg.n_max // 2 + 1
    c2_spec = operators.build_spectral_operator(table, operators.COS2PHI).entries
    phi_op = operators.build_phi(table).entries
    add("spectral_vs_banded_cos2phi", "2.37/2.7", _maxabs((c2_spec - c2.entries)[:half, :half]))
    add("cos2phi_commutes_phi", "2.32", _maxabs(operators.commutator(c2, phi_op)[:half, :half]))
    add("vacuum_phi", "2.37", abs(phi_op[0, 0] + math.pi / 4))
    same = np.add.outer(np.arange(cfg.dim), np.arange(cfg.dim)) % 2 == 0
    cos_op = operators.build_cos_phi(table)
    sin_op = operators.build_sin_phi(table)
    add("cos_sin_phi_parity", "2.6/2.32", max(_maxabs(cos_op.entries[same]), _maxabs(sin_op.entries[same])))
    add("odd_moments", "3.14", max(abs(observables.moment_odd_is_zero(n, k, table, kind))
                                   for n in (0, 1, 2, 3) for k in (0, 1) for kind in ("cos", "sin")))

    h = math.pi / 2
    add("heisenberg_cos_phi_pi", "3.10", _maxabs(dynamics.heisenberg(cos_op, 2 * h).entries + cos_op.entries))
    add("heisenberg_sin_phi_pi", "3.10 (sin)", _maxabs(dynamics.heisenberg(sin_op, 2 * h).entries + sin_op.entries))
    add("heisenberg_cos_sq", "3.12", max(
        _maxabs(dynamics.heisenberg(cos_sq, h).entries - sin_sq.entries),
        _maxabs(dynamics.heisenberg(cos_sq, 2 * h).entries - cos_sq.entries),
        _maxabs(dynamics.heisenberg(cos_sq, 3 * h).entries - sin_sq.entries)))
    add("heisenberg_sin_sq", "3.12 (sin)", max(
        _maxabs(dynamics.heisenberg(sin_sq, h).entries - cos_sq.entries),
        _maxabs(dynamics.heisenberg(sin_sq, 2 * h).entries - sin_sq.entries),
        _maxabs(dynamics.heisenberg(sin_sq, 3 * h).entries - cos_sq.entries)))
    add("heisenberg_cos2phi", "3.13", max(
        _maxabs(dynamics.heisenberg(c2, h).entries + c2.entries),
        _maxabs(dynamics.heisenberg(c2, 2 * h).entries - c2.entries),
        _maxabs(dynamics.heisenberg(c2, 3 * h).entries + c2.entries)))
    ops = [c2, cos_sq, sin_sq, cos_op, sin_op, operators.build_phi(table)]
    add("full_period", "2.3", max(_maxabs(dynamics.heisenberg(op, 4 * h).entries - op.entries) for op in ops))
    k_mid = node_indices(table, (0.3,))[0]
    plus = FockVector(table.coeffs_plus[k_mid])
    evolved = dynamics.evolve_state(plus, math.pi).amplitudes
    add("evolve_pi_swaps_branches", "3.4", _maxabs(evolved - (-1j) * table.coeffs_minus[k_mid]))
    add("node_blocks", "3.6-3.9, 3.11", node_block_deviation(table))

    def exact_moments():
        expected = {(0, 2): Fraction(7, 20), (1, 2): Fraction(9, 28), (2, 2): Fraction(5, 12),
                    (0, 3): Fraction(11, 40), (1, 3): Fraction(13, 56), (2, 3): Fraction(3, 8)}
        bad = sum(observables.moment_even(n, k, cfg, exact=True) != v for (n, k), v in expected.items())
        bad += sum(observables.moment_even(n, 1, cfg, exact=True) != Fraction(1, 2)
                   for n in range(0, min(50, cfg.last_interior - 2) + 1))
        return float(bad)
    add("exact_moments", "3.16-3.18, 3.21-3.22", _guarded(exact_moments))
    add("uniform_limit_identity", "3.23", float(sum(lhs != rhs for lhs, rhs in
                                                    map(observables.uniform_limit_identity, range(1, 9)))))

    def sidedness():
        bad = 0
        for k in (2, 3, 4):
            for n in range(0, 11):
                side = observables.moment_report(n, k, cfg, exact=True).side
                want = observables.Side.BELOW if n < 2 else observables.Side.ABOVE
                bad += side is not want
        return float(bad)
    add("moment_sidedness", "3.19", _guarded(sidedness))

    def series_vs_matrix():
        worst = 0.0
        for a, ph in ((2.0, 0.0), (2.0, math.pi / 6), (1.0, 0.3)):
            mat = observables.coherent_matrix_expectations(cfg, a, ph)
            worst = max(worst, abs(mat["cos2phi"] - observables.coherent_cos2phi(a, ph)),
                        abs(mat["comm_cos2phi_H"] - observables.coherent_comm_h(a, ph)))
        return worst
    add("coherent_series_vs_matrix", "3.24-3.25", _guarded(series_vs_matrix))

    def decreasing():
        devs = {}
        for a in (2.0, 4.0, 8.0):
            for row in observables.classical_limit_report([a], math.pi / 6, cfg):
                devs.setdefault(row.quantity, []).append(row.deviation)
        return float(sum(not (d[0] > d[1] > d[2]) for d in devs.values()))
    add("classical_limit_decreasing", "3.26-3.29", _guarded(decreasing))

    vac = fock_state(cfg, 0)
    add("vacuum_distribution_norm", "2.35-2.36", abs(observables.phase_distribution(vac, table).total() - 1))
    add("vacuum_density_quarter", "2.34", abs(observables.phase_density(vac, math.pi / 4, Sign.PLUS)
                                              - 1 / gegenbauer_norm_sq(EVEN_ORDER, 0)))
    add("sg_identities", "1.12, 1.15-1.17", max(legacy.sg_defects(cfg).values()))
    add("pb_divergence", "1.23", float(sum(legacy.pb_divergence(s) != s for s in (1, 10, 100, 1000))))
    return checks
