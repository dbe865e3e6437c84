"""Phase statistics: number-state moments, phase distributions, coherent states."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import TruncationInsufficient
from .fock import (FockVector, TruncationConfig, build_quadratures, coherent_state, f_ratio,
                   f_ratio_exact)
from .operators import SpectralFunction, build_cos2phi, build_cos_sq, build_sin_sq, build_spectral_operator
from .phase_states import Parity, PhaseStateTable, Sign, _coeff_columns


def _check_reach(n: int, k: int, cfg: TruncationConfig) -> None:
    if n < 0 or n + 2 * k > cfg.last_interior:
        raise TruncationInsufficient(
            f"moment (n={n}, k={k}) reaches beyond row {cfg.last_interior} of n_max={cfg.n_max}")


def cos2phi_diag_powers(n: int, p_max: int, exact: bool = False) -> list:
    """``<n|cos^p 2phi|n>`` for ``p = 0 .. p_max``.

    Walks the ``n <-> n+2`` band. The exact variant uses the similar
    non-symmetric band (1 upward, ``f/4`` downward), whose powers have the same
    diagonal but rational entries.
    """
    reach = p_max
    lo = n - 2 * min(reach, n // 2)
    size = (n + 2 * reach - lo) // 2 + 1
    start = (n - lo) // 2
    sites = [lo + 2 * i for i in range(size)]
    if exact:
        # link i joins sites i and i+1, i.e. numbers s and s+2 with ratio f(s+1)
        down = [f_ratio_exact(s + 1) / 4 for s in sites[:-1]]
        vec = [Fraction(0)] * size
        vec[start] = Fraction(1)
        out = [Fraction(1)]
        for _ in range(p_max):
            new = [Fraction(0)] * size
            for i in range(size):
                if i + 1 < size:
                    new[i] += vec[i + 1]          # T'[i, i+1] = 1
                if i > 0:
                    new[i] += down[i - 1] * vec[i - 1]  # T'[i, i-1] = f/4
            vec = new
            out.append(vec[start])
        return out
    band = np.array([0.5 * math.sqrt(f_ratio(s + 1)) for s in sites[:-1]])
    vec = np.zeros(size)
    vec[start] = 1.0
    out = [1.0]
    for _ in range(p_max):
        new = np.zeros(size)
        new[:-1] += band * vec[1:]
        new[1:] += band * vec[:-1]
        vec = new
        out.append(float(vec[start]))
    return out


def moment_even(n: int, k: int, cfg: TruncationConfig, exact: bool = False,
                kind: str = "cos"):
    """``<n|cos^(2k) phi|n>`` (or ``sin``) through the binomial expansion of ``((1 +- cos 2phi)/2)^k``.

    Odd powers of ``cos 2phi`` are kept in the sum; they vanish on number
    states, which is what makes the cos and sin moments coincide.

    Raises
    ------
    TruncationInsufficient
        If ``n + 2k`` exceeds the interior of the basis.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if kind not in ("cos", "sin"):
        raise ValueError(f"kind must be 'cos' or 'sin', got {kind!r}")
    _check_reach(n, k, cfg)
    sign = 1 if kind == "cos" else -1
    diag = cos2phi_diag_powers(n, k, exact=exact)
    if exact:
        total = sum(Fraction(comb(k, j) * sign**j) * diag[j] for j in range(k + 1))
        return total / 2**k
    return math.fsum(comb(k, j) * sign**j * diag[j] for j in range(k + 1)) / 2**k


def moment_even_spectral(n: int, k: int, table: PhaseStateTable, kind: str = "cos") -> float:
    """Same moment from the quadrature-built operator ``cos^(2k) phi``."""
    g = np.cos if kind == "cos" else np.sin
    func = SpectralFunction.of_eigenvalue(lambda phi: g(phi) ** (2 * k))
    return float(build_spectral_operator(table, func).entries[n, n])


def moment_odd_is_zero(n: int, k: int, table: PhaseStateTable, kind: str = "cos") -> float:
    """``<n|cos^(2k+1) phi|n>`` (or ``sin``) via the spectral operator; ideally zero."""
    g = np.cos if kind == "cos" else np.sin
    func = SpectralFunction.of_eigenvalue(lambda phi: g(phi) ** (2 * k + 1))
    return float(build_spectral_operator(table, func).entries[n, n])


def uniform_moment_exact(k: int) -> Fraction:
    """``(2k-1)!! / (2k)!!``, the ``2k``-th moment of ``cos`` under a uniform phase."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Fraction(math.comb(2 * k, k), 4**k)


def uniform_moment(k: int) -> float:
    if k > 30:
        raise ValueError("k must be <= 30")
    return float(uniform_moment_exact(k))


def uniform_limit_identity(k: int) -> tuple[Fraction, Fraction]:
    """``(2^-k sum_m 4^-m C(k,2m) C(2m,m), (2k-1)!!/(2k)!!)`` as exact rationals."""
    if not 1 <= k <= 20:
        raise ValueError("k must be in 1..20")
    lhs = sum(Fraction(comb(k, 2 * m) * comb(2 * m, m), 4**m) for m in range(k // 2 + 1))
    return lhs / 2**k, uniform_moment_exact(k)


class Side(enum.Enum):
    BELOW = "BelowUniform"
    EQUAL = "Equal"
    ABOVE = "AboveUniform"


@dataclass(frozen=True)
class MomentReport:
    n: int
    k: int
    value: float | Fraction
    uniform_value: float | Fraction
    side: Side


def moment_report(n: int, k: int, cfg: TruncationConfig, exact: bool = False) -> MomentReport:
    value = moment_even(n, k, cfg, exact=exact)
    uniform = uniform_moment_exact(k) if exact else uniform_moment(k)
    diff = value - uniform
    if abs(diff) <= 1e-12:
        side = Side.EQUAL
    else:
        side = Side.BELOW if diff < 0 else Side.ABOVE
    return MomentReport(n=n, k=k, value=value, uniform_value=uniform, side=side)


@dataclass(frozen=True, eq=False)
class PhaseDistribution:
    """``|<phi_k|psi>|^2`` on the Plus interval ``(0, pi/2)`` and Minus interval ``(pi, 3pi/2)``."""

    phi_plus: np.ndarray
    phi_minus: np.ndarray
    density_plus: np.ndarray
    density_minus: np.ndarray
    weights: np.ndarray

    def total(self) -> float:
        return float(np.dot(self.weights, self.density_plus + self.density_minus))

    def rows(self):
        for phi, d in zip(self.phi_plus, self.density_plus):
            yield float(phi), Sign.PLUS.value, float(d)
        for phi, d in zip(self.phi_minus, self.density_minus):
            yield float(phi), Sign.MINUS.value, float(d)


def phase_distribution(state: FockVector, table: PhaseStateTable) -> PhaseDistribution:
    """Density of ``state`` over the angular labels at every quadrature node."""
    grid = table.grid
    scale = np.sqrt(2 * np.sin(2 * grid.phi_nodes))
    amp_p = scale * (table.coeffs_plus @ state.amplitudes)
    amp_m = scale * (table.coeffs_minus @ state.amplitudes)
    return PhaseDistribution(
        phi_plus=np.asarray(grid.phi_nodes),
        phi_minus=grid.phi_nodes + np.pi,
        density_plus=np.abs(amp_p) ** 2,
        density_minus=np.abs(amp_m) ** 2,
        weights=np.asarray(grid.weights),
    )


def phase_density(state: FockVector, phi: float, branch: Sign) -> float:
    """``|<phi|psi>|^2`` at an arbitrary angle ``phi`` in ``(0, pi/2)`` of the given branch."""
    s2 = math.sin(2 * phi)
    lam = math.cos(2 * phi)
    even = _coeff_columns(Parity.EVEN, (state.dim + 1) // 2, lam, s2 * s2)
    odd = _coeff_columns(Parity.ODD, state.dim // 2, lam, s2 * s2)
    sign = 1 if branch is Sign.PLUS else -1
    amp = (even @ state.amplitudes[0::2] + sign * (odd @ state.amplitudes[1::2])) / math.sqrt(2)
    return float(2 * s2 * abs(amp) ** 2)


def coherent_series_factor(abs_alpha: float, rel_tail: float = 1e-14) -> float:
    """``exp(-x) sum_n x^(n+1) / (n! sqrt((n+5/2)(n+1/2)))`` with ``x = |alpha|^2``."""
    if abs_alpha == 0:
        return 0.0
    x = abs_alpha**2
    logx = math.log(x)
    terms = []
    n = 0
    while True:
        t = math.exp(-x + (n + 1) * logx - math.lgamma(n + 1)
                     - 0.5 * math.log((n + 2.5) * (n + 0.5)))
        terms.append(t)
        # past the Poisson peak the terms fall faster than geometrically with ratio x/(n+1)
        if n > x and t * (n + 1) / (n + 1 - x) <= rel_tail * math.fsum(terms):
            break
        n += 1
    return math.fsum(terms)


def coherent_cos2phi(abs_alpha: float, phase_angle: float) -> float:
    """``<alpha|cos 2phi|alpha>`` from the closed-form series."""
    return math.cos(2 * phase_angle) * coherent_series_factor(abs_alpha)


def coherent_comm_h(abs_alpha: float, phase_angle: float) -> float:
    """``<alpha| -i[cos 2phi, H] |alpha>`` from the closed-form series."""
    return 2 * math.sin(2 * phase_angle) * coherent_series_factor(abs_alpha)


def _minus_i_comm_h(op: np.ndarray, hamiltonian: np.ndarray) -> np.ndarray:
    return -1j * (op @ hamiltonian - hamiltonian @ op)


def coherent_matrix_expectations(cfg: TruncationConfig, abs_alpha: float,
                                 phase_angle: float) -> dict[str, float]:
    """Matrix-path expectations of the four classical-limit observables."""
    psi = coherent_state(cfg, abs_alpha, phase_angle).amplitudes
    h = build_quadratures(cfg).hamiltonian.entries
    c2 = build_cos2phi(cfg).entries
    ops = {
        "cos2phi": c2,
        "comm_cos2phi_H": _minus_i_comm_h(c2, h),
        "comm_cos_sq_H": _minus_i_comm_h(build_cos_sq(cfg).entries, h),
        "comm_sin_sq_H": _minus_i_comm_h(build_sin_sq(cfg).entries, h),
    }
    return {name: float(np.vdot(psi, m @ psi).real) for name, m in ops.items()}


@dataclass(frozen=True)
class ClassicalLimitRow:
    quantity: str
    abs_alpha: float
    series: float
    matrix: float
    classical: float

    @property
    def deviation(self) -> float:
        return abs(self.series - self.classical)


def classical_limit_report(abs_alphas, phase_angle: float,
                           cfg: TruncationConfig) -> list[ClassicalLimitRow]:
    """Coherent-state expectations against their classical phase functions.

    Raises
    ------
    TruncationInsufficient
        If some ``|alpha|`` does not fit in ``cfg``.
    """
    rows = []
    s2 = math.sin(2 * phase_angle)
    for a in abs_alphas:
        mat = coherent_matrix_expectations(cfg, a, phase_angle)
        factor = coherent_series_factor(a)
        series = {
            "cos2phi": math.cos(2 * phase_angle) * factor,
            "comm_cos2phi_H": 2 * s2 * factor,
            "comm_cos_sq_H": s2 * factor,
            "comm_sin_sq_H": -s2 * factor,
        }
        classical = {
            "cos2phi": math.cos(2 * phase_angle),
            "comm_cos2phi_H": 2 * s2,
            "comm_cos_sq_H": s2,
            "comm_sin_sq_H": -s2,
        }
        for name in series:
            rows.append(ClassicalLimitRow(name, float(a), series[name], mat[name], classical[name]))
    return rows
