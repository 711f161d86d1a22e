"""Invariant-related unitary transformation, phases and exact solutions.

``V = exp(beta A - beta~ B)`` with ``beta = -(a/2) x e^{-ib}`` and
``beta~ = -(a/2) x e^{ib}`` rotates the invariant onto ``C`` and the
Hamiltonian onto ``h_V(t) C``.  A particular solution for the ``C``
eigenvalue ``lambda`` is::

    psi(t) = exp(-i (phi_d + phi_g + phi_c)) V(t) |lambda>

with dynamical, geometric and c-number phases accumulated along the
auxiliary trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.linalg import expm

from .algebra import AlgebraSpec, Representation
from .errors import InvalidArgument, TransformationError
from .hamiltonian import CoefficientSchedule, assemble
from .invariant import (
    AuxiliaryState,
    AuxiliaryTrajectory,
    InvariantConstants,
    complex_angle,
    invariant_matrix,
    kappa_constants,
    rk4_step,
)

IV_TOL = 1e-8


def unitary_V(rep: Representation, consts: InvariantConstants, state: AuxiliaryState) -> np.ndarray:
    a_c = complex_angle(rep.spec, state.a)
    beta = -0.5 * a_c * consts.x * np.exp(-1j * state.b)
    beta_t = -0.5 * a_c * consts.x * np.exp(1j * state.b)
    L = beta * rep.A - beta_t * rep.B
    V = expm(L)
    if rep.hermitian_paired() and np.abs(L + L.conj().T).max() < 1e-12 * max(1.0, np.abs(L).max()):
        p = rep.protected_dim
        dev = np.abs((V.conj().T @ V - np.eye(rep.dim))[:p, :p]).max()
        if dev > 1e-12 * max(1.0, np.abs(V).max() ** 2):
            raise TransformationError(f"V is not unitary (deviation {dev:.1e})")
    return V


def _inverse(V: np.ndarray) -> np.ndarray:
    Vh = V.conj().T
    if np.abs(Vh @ V - np.eye(len(V))).max() < 1e-10:
        return Vh
    return np.linalg.inv(V)


def transformed_invariant(rep: Representation, V: np.ndarray, I: np.ndarray, tol: float = IV_TOL) -> np.ndarray:
    """``V^-1 I V``, checked against ``C`` on the protected block.

    Raises
    ------
    TransformationError
        ``|I_V - C|_F > tol |C|_F`` on the protected block.
    """
    IV = _inverse(V) @ I @ V
    p = rep.protected_dim
    dev = np.linalg.norm((IV - rep.C)[:p, :p])
    ref = np.linalg.norm(rep.C[:p, :p])
    if dev > tol * max(ref, 1e-300):
        raise TransformationError(f"|I_V - C| = {dev:.3e} exceeds {tol:.0e} * |C|")
    return IV


def iv_deviation(rep: Representation, state: AuxiliaryState, y_scale: float = 1.0) -> float:
    """Relative deviation ``|V^-1 I V - C| / |C|`` on the protected block.

    ``y_scale`` multiplies the invariant's ``y`` constant; anything other than
    1 is a deliberately corrupted invariant.
    """
    c = kappa_constants(rep.spec)
    consts = InvariantConstants(c.kappa, c.x, c.y * y_scale, c.spec)
    I = invariant_matrix(rep, consts, state, herm_tol=np.inf)
    V = unitary_V(rep, c, state)
    p = rep.protected_dim
    return float(np.linalg.norm((_inverse(V) @ I @ V - rep.C)[:p, :p]) / np.linalg.norm(rep.C[:p, :p]))


def _hv_coefficient(spec: AlgebraSpec, w, th, ph, a, b, bdot):
    consts = kappa_constants(spec)
    a_c = complex_angle(spec, a)
    m = spec.m
    dyn = w * (np.cos(a_c) * np.cos(th) + consts.kappa / m * np.sin(a_c) * np.sin(th) * np.cos(b - ph))
    geo = bdot / m * (1 - np.cos(a_c))
    return np.real(dyn), np.real(geo)


def transformed_hamiltonian_coefficient(sched: CoefficientSchedule, traj: AuxiliaryTrajectory,
                                        spec: AlgebraSpec, t: float) -> float:
    """Scalar ``h_V(t)`` such that ``V†HV - iV†V' = h_V C`` (without ``c0``)."""
    i = traj.index_of(t)
    w, th, ph = sched.angles(traj.grid[i])
    dyn, geo = _hv_coefficient(spec, w, th, ph, traj.a[i], traj.b[i], traj.bdot[i])
    return float(dyn + geo)


def transformed_hamiltonian(rep: Representation, sched: CoefficientSchedule, state: AuxiliaryState,
                            t: float, fd_step: float = 1e-3, richardson: bool = False) -> np.ndarray:
    """``V†HV - iV^-1 V'`` with ``V'`` from central differences.

    The neighbouring states ``t +- h`` come from single RK4 steps of the
    auxiliary equations, so the finite-difference error dominates.  With
    ``richardson`` the ``h`` and ``h/2`` derivatives are extrapolated.
    """
    consts = kappa_constants(rep.spec)

    def vdot(h):
        Vp = unitary_V(rep, consts, rk4_step(sched, rep.spec, state, t, h))
        Vm = unitary_V(rep, consts, rk4_step(sched, rep.spec, state, t, -h))
        return (Vp - Vm) / (2 * h)

    dV = vdot(fd_step)
    if richardson:
        dV = (4 * vdot(fd_step / 2) - dV) / 3
    V = unitary_V(rep, consts, state)
    Vinv = _inverse(V)
    H = assemble(rep, sched, t) - float(sched.c0(t)) * np.eye(rep.dim)
    return Vinv @ H @ V - 1j * Vinv @ dV


def hv_offdiagonal(rep: Representation, HV: np.ndarray) -> float:
    """Norm of the part of ``HV`` that mixes distinct ``C`` eigenvalues, on the protected block."""
    vals, vecs = np.linalg.eigh(rep.C)
    M = vecs.conj().T @ HV @ vecs
    same = np.abs(vals[:, None] - vals[None, :]) < 1e-9
    mask = np.zeros_like(same)
    p = rep.protected_dim
    # eigh sorts ascending; map back to the leading basis block for truncated reps
    keep = np.argmax(np.abs(vecs), axis=0) < p
    mask[np.ix_(keep, keep)] = True
    return float(np.linalg.norm(np.where(mask & ~same, M, 0)))


@dataclass(frozen=True)
class PhaseDecomposition:
    grid: np.ndarray
    phi_d: np.ndarray
    phi_g: np.ndarray
    phi_c: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.phi_d + self.phi_g + self.phi_c


def cumulative_integral(values, grid) -> np.ndarray:
    """Cumulative composite Simpson integral starting at zero."""
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 3:
        out = np.zeros_like(values)
        out[1:] = np.cumsum(0.5 * (values[1:] + values[:-1]) * np.diff(grid))
        return out
    return cumulative_simpson(values, x=grid, initial=0.0)


def phase_rates(lam: float, sched: CoefficientSchedule, traj: AuxiliaryTrajectory):
    """Pointwise ``(phi_d', phi_g', phi_c')`` on the trajectory grid."""
    w, th, ph = (np.asarray(f(traj.grid), dtype=float) * np.ones_like(traj.grid)
                 for f in (sched.omega, sched.theta, sched.phi))
    dyn, geo = _hv_coefficient(traj.spec, w, th, ph, traj.a, traj.b, traj.bdot)
    c0 = np.asarray(sched.c0(traj.grid), dtype=float) * np.ones_like(traj.grid)
    return lam * dyn, lam * geo, c0


def phases(lam: float, sched: CoefficientSchedule, traj: AuxiliaryTrajectory) -> PhaseDecomposition:
    rd, rg, rc = phase_rates(lam, sched, traj)
    g = traj.grid
    return PhaseDecomposition(g, cumulative_integral(rd, g), cumulative_integral(rg, g),
                              cumulative_integral(rc, g))


def berry_limit(lam: float, spec: AlgebraSpec, a: float) -> float:
    """Cyclic geometric phase at fixed polar angle: ``(lambda/m) 2 pi (1 - cos a)``."""
    return lam / spec.m * 2 * np.pi * (1 - np.cos(a))


@dataclass(frozen=True)
class SolutionState:
    lam: float
    grid: np.ndarray
    psi: np.ndarray  # (len(grid), dim)
    phases: PhaseDecomposition

    def at(self, i: int) -> np.ndarray:
        return self.psi[i]


def solution_state(lam: float, eigvec, traj: AuxiliaryTrajectory, sched: CoefficientSchedule,
                   rep: Representation, phase: PhaseDecomposition | None = None) -> SolutionState:
    eigvec = np.asarray(eigvec, dtype=complex)
    if eigvec.shape != (rep.dim,):
        raise InvalidArgument("eigenvector dimension does not match the representation")
    if np.linalg.norm(rep.C @ eigvec - lam * eigvec) > 1e-10 * max(1.0, abs(lam)):
        raise InvalidArgument(f"vector is not a C eigenvector for lambda={lam}")
    if phase is None:
        phase = phases(lam, sched, traj)
    if len(phase.grid) != len(traj.grid) or np.any(phase.grid != traj.grid):
        raise InvalidArgument("phase grid does not match the trajectory grid")
    consts = kappa_constants(rep.spec)
    psi = np.empty((len(traj.grid), rep.dim), dtype=complex)
    total = phase.total
    for i in range(len(traj.grid)):
        V = unitary_V(rep, consts, traj.state(i))
        psi[i] = np.exp(-1j * total[i]) * (V @ eigvec)
    return SolutionState(lam, traj.grid, psi, phase)


def general_solution(coefficients, states: list[SolutionState]) -> np.ndarray:
    """Superpose particular solutions: ``sum_l c_l psi_l(t)``."""
    coefficients = np.asarray(coefficients, dtype=complex)
    if len(coefficients) != len(states) or not states:
        raise InvalidArgument("need one coefficient per particular solution")
    lams = [s.lam for s in states]
    if len(set(np.round(lams, 12))) != len(lams):
        raise InvalidArgument("duplicate lambda among particular solutions")
    grid = states[0].grid
    if any(len(s.grid) != len(grid) or np.any(s.grid != grid) for s in states):
        raise InvalidArgument("particular solutions live on different grids")
    if not np.isclose(np.linalg.norm(coefficients), 1.0, atol=1e-12):
        raise InvalidArgument("coefficients must be normalized")
    return np.einsum("l,ltd->td", coefficients, np.stack([s.psi for s in states]))
