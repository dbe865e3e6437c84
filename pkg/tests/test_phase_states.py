import math

import numpy as np
import pytest

from phasekit.errors import DomainError
from phasekit.fock import TruncationConfig
from phasekit.phase_states import (Parity, Sign, build_phase_table, coeff, display_label, identity_defect,
                                   orthonormality_error, phi_label, recurrence_residual, resolution_of_identity,
                                   write_table_csv)
from phasekit.special import build_quadrature

INV_SQRT_N0_QUARTER = 0.645998003740751967612  # 1/sqrt(N_0^2(1/4)), mpmath
N0_SQ_THREE_QUARTER = 1.74803836952807987364


def test_coeff_examples():
    assert coeff(Parity.EVEN, 0, 0.0) == pytest.approx(INV_SQRT_N0_QUARTER, rel=1e-13)
    assert abs(coeff(Parity.EVEN, 1, 0.0)) < 1e-16
    expected = 0.64 ** 0.125 / math.sqrt(N0_SQ_THREE_QUARTER)
    assert coeff(Parity.ODD, 0, 0.6) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("lam", [1.0, -1.0, 1.5])
def test_coeff_domain(lam):
    with pytest.raises(DomainError):
        coeff(Parity.EVEN, 0, lam)


def test_recurrence_examples():
    assert recurrence_residual(Parity.EVEN, 0.3, 100) <= 1e-10
    assert recurrence_residual(Parity.ODD, -0.7, 100) <= 1e-10
    assert recurrence_residual(Parity.EVEN, 0.0, 4) <= 1e-14


@pytest.mark.parametrize("lam", np.linspace(-0.98, 0.98, 20))
@pytest.mark.parametrize("parity", list(Parity))
def test_recurrence_many_lambdas(parity, lam):
    assert recurrence_residual(parity, lam, 200) <= 1e-10


def test_recurrence_detects_wrong_order(monkeypatch):
    from phasekit import phase_states
    from phasekit.special import GegenbauerOrder
    monkeypatch.setattr(phase_states, "EVEN_ORDER", GegenbauerOrder(0.3))
    assert recurrence_residual(Parity.EVEN, 0.3, 50) > 1e-3


def test_phi_labels():
    assert phi_label(0.0, Sign.PLUS) == pytest.approx(math.pi / 4)
    assert phi_label(0.0, Sign.MINUS) == pytest.approx(-3 * math.pi / 4)
    assert display_label(0.0, Sign.MINUS) == pytest.approx(5 * math.pi / 4)
    assert 0 < phi_label(1 - 1e-12, Sign.PLUS) < 1e-5
    for lam in np.linspace(-0.99, 0.99, 9):
        assert display_label(lam, Sign.MINUS) - phi_label(lam, Sign.MINUS) == pytest.approx(2 * math.pi)


def test_table_structure(small_table, small_cfg):
    p, m = small_table.coeffs_plus, small_table.coeffs_minus
    np.testing.assert_array_equal(p[:, 0::2], m[:, 0::2])
    np.testing.assert_array_equal(p[:, 1::2], -m[:, 1::2])
    assert np.all(np.isfinite(p))
    assert p.shape == (small_table.node_count, small_cfg.dim)


def test_table_matches_pointwise_coeff(small_table):
    k = 77
    lam = float(small_table.grid.lambda_nodes[k])
    assert small_table.coeffs_plus[k, 6] == pytest.approx(coeff(Parity.EVEN, 3, lam) / math.sqrt(2), rel=1e-10)
    assert small_table.coeffs_minus[k, 7] == pytest.approx(-coeff(Parity.ODD, 3, lam) / math.sqrt(2), rel=1e-10)


def test_quadrature_orthonormality(grid):
    assert orthonormality_error(grid, Parity.EVEN, 20) <= 1e-6
    assert orthonormality_error(grid, Parity.ODD, 20) <= 1e-6


def test_plus_minus_discrete_overlap_shrinks():
    overlaps = []
    for n_max in (16, 64, 256):
        tab = build_phase_table(TruncationConfig(n_max), build_quadrature(256))
        k = 100
        overlaps.append(abs(tab.coeffs_plus[k] @ tab.coeffs_minus[k])
                        / (tab.coeffs_plus[k] @ tab.coeffs_plus[k]))
    assert overlaps[0] > overlaps[1] > overlaps[2]


def test_resolution_of_identity_cross_parity_exact(table):
    p = resolution_of_identity(table)
    odd_even = p[0::2, 1::2]
    assert np.max(np.abs(odd_even)) == 0.0
    assert identity_defect(table) <= 1e-6


def test_table_csv(tmp_path):
    tab = build_phase_table(TruncationConfig(8), build_quadrature(64))
    path = tmp_path / "t.csv"
    write_table_csv(tab, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "node,lambda,phi,branch,n,coefficient"
    assert len(lines) == 1 + 64 * 2 * 9
    node, lam, phi, branch, n, value = lines[1 + 9 + 3].split(",")
    assert (node, branch, n) == ("0", "-", "3")
    assert float(value) == tab.coeffs_minus[0, 3]
