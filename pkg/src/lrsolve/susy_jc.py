"""Time-dependent k-photon (supersymmetric) Jaynes-Cummings model.

The model conserves ``N'`` and closes on the two-state block
``(|m> (x) |e>, |m+k> (x) |g>)`` with eigenvalue ``lambda_m = (m+k)!/m!``.
Inside the block ``Q = (a†)^k sigma_-`` acts as ``sqrt(lambda_m) sigma_-``, so

    H = omega (m + k/2) - (delta/2) sigma_z + g Q + g* Q†,   delta = k omega - omega0

The invariant ``I = c Q + c* Q† + b sigma_z`` obeys

    c' = -i (c delta + 2 b g),    b' = i lambda_m (c* g - c g*)

which conserves ``lambda_m |c|^2 + b^2``.  On the unit sphere
``c = -sin(theta) e^{-i phi} / sqrt(lambda_m)`` and ``b = cos(theta)``.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .errors import IntegrationAccuracyError, InvalidArgument
from .evolution import PhaseDecomposition, SolutionState, cumulative_integral

SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |m,e> -> |m+k,g>
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class SusyJCConfig:
    k: int
    m_fock: int
    omega: Callable[[float], float]
    omega0: Callable[[float], float]
    g: Callable[[float], complex]

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InvalidArgument("k must be a positive integer")
        if int(self.m_fock) != self.m_fock or self.m_fock < 0:
            raise InvalidArgument("m_fock must be a non-negative integer")


def lambda_m(m_fock: int, k: int) -> float:
    """``(m+k)!/m!`` computed exactly, then converted to float."""
    if m_fock < 0 or k < 1:
        raise InvalidArgument("need m_fock >= 0 and k >= 1")
    value = math.prod(range(m_fock + 1, m_fock + k + 1))
    if value > sys.float_info.max:
        raise OverflowError(f"lambda_m = (m+k)!/m! overflows a float for m={m_fock}, k={k}")
    return float(value)


def sigma_block_normalization(k: int, m_fock: int) -> float:
    """Squared pairing amplitude ``<m| a^k (a†)^k |m>`` of the oscillator
    realization ``A- = a^k``; identical to :func:`lambda_m`."""
    return lambda_m(m_fock, k)


def delta(cfg: SusyJCConfig, t):
    return cfg.k * np.asarray(cfg.omega(t)) - np.asarray(cfg.omega0(t))


@dataclass(frozen=True)
class SubspaceBlock:
    lambda_m: float
    basis: tuple[str, str]
    Qblock: np.ndarray
    Qdagblock: np.ndarray
    sigmaz: np.ndarray
    Nblock: np.ndarray


def subspace_block(k: int, m_fock: int) -> SubspaceBlock:
    lam = lambda_m(m_fock, k)
    Q = math.sqrt(lam) * SIGMA_MINUS
    base = m_fock + k / 2
    return SubspaceBlock(
        lambda_m=lam,
        basis=(f"|{m_fock}>|e>", f"|{m_fock + k}>|g>"),
        Qblock=Q,
        Qdagblock=Q.conj().T,
        sigmaz=SIGMA_Z.copy(),
        Nblock=np.diag([base, base + 1]).astype(complex),
    )


def block_hamiltonian(cfg: SusyJCConfig, t: float) -> np.ndarray:
    blk = subspace_block(cfg.k, cfg.m_fock)
    w = float(cfg.omega(t))
    d = float(delta(cfg, t))
    g = complex(cfg.g(t))
    base = w * (cfg.m_fock + cfg.k / 2)
    return base * np.eye(2) - 0.5 * d * blk.sigmaz + g * blk.Qblock + np.conj(g) * blk.Qdagblock


def susy_auxiliary_rhs(c: complex, b: float, t: float, cfg: SusyJCConfig, lam: float | None = None):
    lam = lambda_m(cfg.m_fock, cfg.k) if lam is None else lam
    d = float(delta(cfg, t))
    g = complex(cfg.g(t))
    cdot = -1j * (c * d + 2 * b * g)
    bdot = (1j * lam * (np.conj(c) * g - c * np.conj(g))).real
    return cdot, bdot


def susy_invariant(theta: float, phi: float, lam: float) -> np.ndarray:
    Q = math.sqrt(lam) * SIGMA_MINUS
    return (-math.sin(theta) / math.sqrt(lam) * (np.exp(-1j * phi) * Q + np.exp(1j * phi) * Q.conj().T)
            + math.cos(theta) * SIGMA_Z)


def susy_V(theta: float, phi: float, lam: float) -> np.ndarray:
    Q = math.sqrt(lam) * SIGMA_MINUS
    beta = -0.5 * theta * np.exp(-1j * phi) / math.sqrt(lam)
    return expm(beta * Q - np.conj(beta) * Q.conj().T)


def beta_identities(theta: float, phi: float, lam: float, c: complex, b: float) -> float:
    """Largest violation of the two trigonometric conditions tying ``beta`` to ``(c, b)``."""
    beta = -0.5 * theta * np.exp(-1j * phi) / math.sqrt(lam)
    r = math.sqrt(4 * abs(beta) ** 2 * lam)
    if r == 0:
        return abs(b - 1.0)
    lhs_sin = math.sin(r)
    rhs_sin = (lam * (c * np.conj(beta) + np.conj(c) * beta) / r).real
    return max(abs(lhs_sin - rhs_sin), abs(math.cos(r) - b))


@dataclass(frozen=True)
class SusyAuxiliary:
    """Integrated ``(c, b)`` and the sphere angles.

    ``dyn_odd`` and ``geo_odd`` accumulate the ``sigma``-odd parts of the
    dynamical and geometric phases for ``sigma = +1``.
    """

    grid: np.ndarray
    c: np.ndarray
    b: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    phidot: np.ndarray
    lambda_m: float
    max_drift: float
    dyn_odd: np.ndarray
    geo_odd: np.ndarray


def _rk4_complex(f, grid, y0, substeps):
    y = np.empty((len(grid), len(y0)), dtype=complex)
    y[0] = cur = np.asarray(y0, dtype=complex)
    for i in range(len(grid) - 1):
        h = (grid[i + 1] - grid[i]) / substeps
        for s in range(substeps):
            t = grid[i] + s * h
            k1 = f(t, cur)
            k2 = f(t + h / 2, cur + h / 2 * k1)
            k3 = f(t + h / 2, cur + h / 2 * k2)
            k4 = f(t + h, cur + h * k3)
            cur = cur + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        y[i + 1] = cur
    return y


def aligned_start(cfg: SusyJCConfig, t: float = 0.0) -> tuple[complex, float]:
    """``(c, b)`` on the unit sphere with the invariant parallel to ``H(t)``'s traceless part."""
    lam = lambda_m(cfg.m_fock, cfg.k)
    g = complex(cfg.g(t))
    d = float(delta(cfg, t))
    norm = math.sqrt(lam * abs(g) ** 2 + 0.25 * d * d)
    if norm == 0:
        return 0j, 1.0
    return g / norm, -0.5 * d / norm


def _smoothstep(b):
    """C2 switch from 0 (b <= -1/2) to 1 (b >= 1/2) and its derivative."""
    u = np.clip(np.asarray(b, dtype=float) + 0.5, 0.0, 1.0)
    return u ** 3 * (10 - 15 * u + 6 * u * u), 30 * u * u * (1 - u) ** 2


def _odd_phases(grid, c, b, phi, g, d, lam):
    """Accumulated ``sigma``-odd phases for ``sigma = +1``.

    The geometric rate ``-phi' (1 - b)/2`` is regular at the north pole but
    peaks sharply when the trajectory grazes the south pole, where ``phi``
    spins quickly.  Writing ``phi'(1 - b) = 2 phi' - phi'(1 + b)`` and
    integrating the ``2 phi'`` piece by parts against a smooth partition of
    unity in ``b`` leaves only integrands that are regular on their support.
    """
    gc = (g * np.conj(c)).real
    dyn = cumulative_integral(lam * gc - 0.5 * d * b, grid)
    bdot = 2 * lam * (c * np.conj(g)).imag
    with np.errstate(divide="ignore", invalid="ignore"):
        # phi'(1 - b) and phi'(1 + b); c == 0 only on a pole where phi' := 0
        r_north = np.where(b > -1, (1 - b) * d + 2 * b * lam * gc / (1 + b), 0.0)
        r_south = np.where(b < 1, (1 + b) * d + 2 * b * lam * gc / (1 - b), 0.0)
    r_north = np.where(c == 0, 0.0, r_north)
    r_south = np.where(c == 0, 0.0, r_south)
    w, dw = _smoothstep(b)
    body = w * r_north - (1 - w) * r_south + 2 * dw * bdot * phi
    total = cumulative_integral(body, grid) + 2 * (1 - w) * phi - 2 * (1 - w[0]) * phi[0]
    return dyn, -0.5 * total


def solve_susy_auxiliary(cfg: SusyJCConfig, c0: complex | None, b0: float | None, grid,
                         substeps: int = 1, drift_tol: float = 1e-6) -> SusyAuxiliary:
    """RK4 integration of ``(c, b)``; ``None`` starts aligned with ``H(t0)``.

    Raises
    ------
    IntegrationAccuracyError
        ``lambda_m |c|^2 + b^2`` drifted from 1 by more than ``drift_tol``.
    """
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise InvalidArgument("grid must be strictly increasing with at least two points")
    if int(substeps) != substeps or substeps < 1:
        raise InvalidArgument("substeps must be a positive integer")
    lam = lambda_m(cfg.m_fock, cfg.k)
    if c0 is None or b0 is None:
        c0, b0 = aligned_start(cfg, grid[0])
    size = lam * abs(c0) ** 2 + b0 * b0
    if size <= 0:
        raise InvalidArgument("initial invariant vanishes")
    # overall scale of the invariant is unphysical; put it on the unit sphere
    scale = 1 / math.sqrt(size)
    c0, b0 = complex(c0) * scale, float(b0) * scale

    def f(t, y):
        return np.array(susy_auxiliary_rhs(y[0], y[1].real, t, cfg, lam))

    y = _rk4_complex(f, grid, [c0, b0], int(substeps))
    c = y[:, 0]
    b = y[:, 1].real
    sphere = lam * np.abs(c) ** 2 + b * b
    drift = float(np.abs(sphere - 1).max())
    if drift > drift_tol:
        raise IntegrationAccuracyError(f"conservation drift {drift:.2e} exceeds {drift_tol:.0e}")
    c = c / np.sqrt(sphere)
    b = b / np.sqrt(sphere)
    theta = np.arccos(np.clip(b, -1.0, 1.0))
    z = -c * math.sqrt(lam)  # = sin(theta) e^{-i phi}
    on_pole = np.abs(z) < 1e-12
    phi = np.unwrap(np.where(on_pole, 0.0, -np.angle(z)))
    gs = np.array([complex(cfg.g(t)) for t in grid])
    ds = np.asarray(delta(cfg, grid), dtype=float) * np.ones_like(grid)
    # phi' = delta + 2 b Re(g / c), from differentiating arg(c)
    with np.errstate(divide="ignore", invalid="ignore"):
        phidot = np.where(on_pole, 0.0, ds + 2 * b * (gs / np.where(on_pole, 1, c)).real)
    dyn_odd, geo_odd = _odd_phases(grid, c, b, phi, gs, ds, lam)
    return SusyAuxiliary(grid, c, b, theta, phi, phidot, lam, drift, dyn_odd, geo_odd)


def susy_phase_rates(cfg: SusyJCConfig, theta, phi, phidot, t, sigma: int):
    """``(phi_d', phi_g')`` for the ``sigma = +1`` or ``-1`` branch, angle form."""
    if sigma not in (1, -1):
        raise InvalidArgument("sigma must be +1 or -1")
    lam = lambda_m(cfg.m_fock, cfg.k)
    w = np.asarray(cfg.omega(t), dtype=float)
    g = np.asarray(cfg.g(t), dtype=complex)
    d = np.asarray(delta(cfg, t), dtype=float)
    coupling = 0.5 * math.sqrt(lam) * 2 * (g * np.exp(1j * np.asarray(phi))).real * np.sin(theta)
    dyn = (cfg.m_fock + cfg.k / 2) * w - sigma * (coupling + 0.5 * d * np.cos(theta))
    geo = -sigma * 0.5 * np.asarray(phidot) * (1 - np.cos(theta))
    return dyn, geo


def susy_solution(cfg: SusyJCConfig, sigma: int, grid, aux: SusyAuxiliary | None = None,
                  **solve_kwargs) -> SolutionState:
    """Particular solution ``exp(-i int (phi_d' + phi_g')) V(t) e_sigma`` in the block basis."""
    if sigma not in (1, -1):
        raise InvalidArgument("sigma must be +1 or -1")
    grid = np.asarray(grid, dtype=float)
    if aux is None:
        aux = solve_susy_auxiliary(cfg, None, None, grid, **solve_kwargs)
    elif len(aux.grid) != len(grid) or np.any(aux.grid != grid):
        raise InvalidArgument("auxiliary solution grid does not match")
    base = (cfg.m_fock + cfg.k / 2) * np.asarray(cfg.omega(grid), dtype=float) * np.ones_like(grid)
    ph = PhaseDecomposition(grid, cumulative_integral(base, grid) + sigma * aux.dyn_odd,
                            sigma * aux.geo_odd, np.zeros_like(grid))
    e = np.array([1, 0] if sigma == 1 else [0, 1], dtype=complex)
    psi = np.empty((len(grid), 2), dtype=complex)
    total = ph.total
    for i in range(len(grid)):
        psi[i] = np.exp(-1j * total[i]) * (susy_V(aux.theta[i], aux.phi[i], aux.lambda_m) @ e)
    return SolutionState(float(sigma), grid, psi, ph)


def sphere_angles(c: complex, b: float, lam: float) -> tuple[float, float]:
    """``(theta, phi)`` of a unit-sphere point; ``phi = 0`` on the poles."""
    z = -c * math.sqrt(lam)
    theta = math.acos(min(1.0, max(-1.0, b)))
    return theta, (0.0 if abs(z) < 1e-12 else -cmath.phase(z))


def _rk4_point(cfg, lam, c, b, t, h):
    def f(s, y):
        return np.array(susy_auxiliary_rhs(y[0], y[1].real, s, cfg, lam))

    y = np.array([c, b], dtype=complex)
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y[0], y[1].real


def susy_transformed_hamiltonian(cfg: SusyJCConfig, c: complex, b: float, t: float,
                                 fd_step: float = 1e-3) -> np.ndarray:
    """``V†HV - iV†V'`` in the block, with ``V'`` from central differences of RK4 neighbours."""
    lam = lambda_m(cfg.m_fock, cfg.k)

    def V_at(cc, bb):
        th, ph = sphere_angles(cc, bb, lam)
        return susy_V(th, ph, lam)

    Vp = V_at(*_rk4_point(cfg, lam, c, b, t, fd_step))
    Vm = V_at(*_rk4_point(cfg, lam, c, b, t, -fd_step))
    V = V_at(c, b)
    dV = (Vp - Vm) / (2 * fd_step)
    return V.conj().T @ block_hamiltonian(cfg, t) @ V - 1j * V.conj().T @ dV
