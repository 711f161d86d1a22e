"""Solve-and-certify pipelines shared by the CLI and the test suites.

A pipeline integrates the auxiliary equations for a preset, builds the
particular solutions for the requested ``C`` eigenvalues and compares each
against the brute-force propagator of the preset's directly constructed
Hamiltonian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import susy_jc
from .catalog import ModelPreset, spin_model
from .errors import InvalidArgument
from .evolution import (
    SolutionState,
    berry_limit,
    iv_deviation,
    phases,
    solution_state,
    transformed_hamiltonian,
    hv_offdiagonal,
)
from .invariant import (
    AuxiliaryTrajectory,
    invariant_residual,
    kappa_constants,
    solve_auxiliary,
)
from .oracle import fidelity, fullspace_susy_embedding, phase_error, timeordered_propagator


@dataclass(frozen=True)
class OracleComparison:
    """Per-solution agreement with the propagator, sampled on the grid."""

    fidelity: np.ndarray  # (n_solutions, n_times)
    phase_error: np.ndarray
    order_estimate: float

    @property
    def worst_fidelity(self) -> float:
        return float(self.fidelity.min())

    @property
    def worst_phase(self) -> float:
        return float(self.phase_error.max())


@dataclass(frozen=True)
class PipelineResult:
    """Everything a scenario produces.

    For the Lie-algebraic presets ``a``/``b`` are the invariant angles; for
    the SUSY block they are the sphere angles ``theta``/``phi``.
    ``invariant_residual`` is ``|dI/dt + (1/i)[I, H]|`` relative to ``|H|``.
    """

    grid: np.ndarray
    a: np.ndarray
    b: np.ndarray
    states: list[SolutionState]
    invariant_residual: np.ndarray
    oracle: OracleComparison | None
    trajectory: object


def _compare(Hfun, states, grid, substeps, embed=None):
    prop = timeordered_propagator(Hfun, grid, substeps=substeps, estimate_order=True)
    fid = np.empty((len(states), len(grid)))
    ph = np.empty_like(fid)
    for s, st in enumerate(states):
        lift = (lambda v: v) if embed is None else (lambda v: embed @ v)
        psi0 = lift(st.psi[0])
        for i in range(len(grid)):
            ref = prop.U[i] @ psi0
            ex = lift(st.psi[i])
            fid[s, i] = fidelity(ref, ex)
            ph[s, i] = phase_error(ref, ex)
    return OracleComparison(fid, ph, prop.order_estimate)


def relative_invariant_residuals(preset: ModelPreset, traj: AuxiliaryTrajectory) -> np.ndarray:
    rep = preset.representation
    k = rep.interior_dim
    out = np.empty(len(traj.grid))
    for i, t in enumerate(traj.grid):
        H = preset.hamiltonian(t)
        H = H - float(preset.schedule.c0(t)) * np.eye(rep.dim)
        scale = max(np.linalg.norm(H[:k, :k]), 1e-300)
        out[i] = invariant_residual(rep, preset.schedule, traj, t) / scale
    return out


def solve_preset(preset: ModelPreset, grid, lambdas=None, a0=None, b0=None, substeps: int = 1,
                 tol: float = 1e-8, accuracy_tol: float | None = 1e-6) -> tuple[AuxiliaryTrajectory, list]:
    lambdas = preset.lambdas if lambdas is None else tuple(lambdas)
    traj = solve_auxiliary(preset.schedule, preset.representation.spec, grid, a0=a0, b0=b0,
                           substeps=substeps, tol=tol, accuracy_tol=accuracy_tol)
    states = [solution_state(lam, preset.eigenvector(lam), traj, preset.schedule, preset.representation)
              for lam in lambdas]
    return traj, states


def run_preset(preset: ModelPreset, grid, lambdas=None, a0=None, b0=None, substeps: int = 1,
               oracle_substeps: int | None = 4, accuracy_tol: float | None = 1e-6) -> PipelineResult:
    grid = np.asarray(grid, dtype=float)
    traj, states = solve_preset(preset, grid, lambdas, a0, b0, substeps, accuracy_tol=accuracy_tol)
    res = relative_invariant_residuals(preset, traj)
    oracle = None
    if oracle_substeps:
        oracle = _compare(preset.direct_hamiltonian, states, grid, oracle_substeps)
    return PipelineResult(grid, traj.a, traj.b, states, res, oracle, traj)


def susy_invariant_residuals(cfg: susy_jc.SusyJCConfig, aux: susy_jc.SusyAuxiliary) -> np.ndarray:
    blk = susy_jc.subspace_block(cfg.k, cfg.m_fock)
    out = np.empty(len(aux.grid))
    for i, t in enumerate(aux.grid):
        c, b = aux.c[i], aux.b[i]
        cdot, bdot = susy_jc.susy_auxiliary_rhs(c, b, t, cfg, aux.lambda_m)
        I = c * blk.Qblock + np.conj(c) * blk.Qdagblock + b * blk.sigmaz
        dI = cdot * blk.Qblock + np.conj(cdot) * blk.Qdagblock + bdot * blk.sigmaz
        H = susy_jc.block_hamiltonian(cfg, t)
        H0 = H - 0.5 * np.trace(H) * np.eye(2)
        out[i] = np.linalg.norm(dI - 1j * (I @ H - H @ I)) / max(np.linalg.norm(H0), 1e-300)
    return out


def run_susy(cfg: susy_jc.SusyJCConfig, grid, c0=None, b0=None, substeps: int = 1,
             oracle_substeps: int | None = 4, cutoff: int | None = None, sigmas=(1, -1)) -> PipelineResult:
    grid = np.asarray(grid, dtype=float)
    aux = susy_jc.solve_susy_auxiliary(cfg, c0, b0, grid, substeps=substeps)
    states = [susy_jc.susy_solution(cfg, s, grid, aux=aux) for s in sigmas]
    res = susy_invariant_residuals(cfg, aux)
    oracle = None
    if oracle_substeps:
        emb = fullspace_susy_embedding(cfg, cutoff or cfg.m_fock + cfg.k + 4)
        oracle = _compare(emb.H, states, grid, oracle_substeps, embed=emb.isometry)
    return PipelineResult(grid, aux.theta, aux.phi, states, res, oracle, aux)


# ---------------------------------------------------------------------------
# Contract checks at sampled times
# ---------------------------------------------------------------------------

def diagonalization_checks(preset: ModelPreset, traj: AuxiliaryTrajectory, times, fd_step: float = 1e-3):
    """``(max |V^-1 I V - C|/|C|, max off-diagonal of H_V)`` at the given grid times."""
    rep = preset.representation
    lie = preset.schedule.with_c0(lambda t: 0.0 * np.asarray(t, dtype=float))
    iv = 0.0
    off = 0.0
    for t in times:
        i = traj.index_of(t)
        state = traj.state(i)
        iv = max(iv, iv_deviation(rep, state))
        HV = transformed_hamiltonian(rep, lie, state, traj.grid[i], fd_step=fd_step)
        off = max(off, hv_offdiagonal(rep, HV))
    return iv, off


# ---------------------------------------------------------------------------
# Berry sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BerryPoint:
    period: float
    phi_g: float
    target: float
    error: float


def berry_point(period: float, theta: float, omega: float = 1.0, j: float = 0.5, lam: float | None = None,
                steps_per_unit: float = 10.0, min_steps: int = 256,
                accuracy_tol: float = 1e-5) -> BerryPoint:
    """Geometric phase after one slow revolution of the field azimuth.

    The field has constant strength ``omega`` and polar angle ``theta``;
    its azimuth winds by ``2 pi`` over ``period``.  The auxiliary equations
    start aligned with the field, so ``phi_g`` approaches the solid-angle
    value only as ``period`` grows.
    """
    if period <= 0:
        raise InvalidArgument("sweep period must be positive")
    lam = float(j) if lam is None else float(lam)
    nu = 2 * math.pi / period
    preset = spin_model(omega, theta, lambda t: nu * t, j=j, t_end=period)
    steps = max(min_steps, int(math.ceil(steps_per_unit * period * max(abs(omega), nu))))
    grid = np.linspace(0.0, period, steps + 1)
    traj = solve_auxiliary(preset.schedule, preset.representation.spec, grid, accuracy_tol=accuracy_tol)
    ph = phases(lam, preset.schedule, traj)
    target = berry_limit(lam, preset.representation.spec, theta)
    phi_g = float(ph.phi_g[-1])
    return BerryPoint(period, phi_g, float(target), abs(phi_g - float(target)))


def cone_solution_phase(theta: float, omega: float, period: float, lam: float = 0.5, steps: int = 2000):
    """``(phi_g, target)`` on the exactly conical trajectory of a rotating field.

    With ``theta`` fixed and the azimuth advancing at rate ``nu``, the
    invariant with ``b = phi`` and ``cot a = (omega cos theta - nu)/(omega sin theta)``
    keeps ``a`` constant, so the geometric phase equals the solid-angle
    expression for that ``a`` up to quadrature error.
    """
    nu = 2 * math.pi / period
    a_cone = math.atan2(omega * math.sin(theta), omega * math.cos(theta) - nu)
    preset = spin_model(omega, theta, lambda t: nu * np.asarray(t, dtype=float), t_end=period)
    grid = np.linspace(0.0, period, steps + 1)
    traj = solve_auxiliary(preset.schedule, preset.representation.spec, grid, a0=a_cone, b0=0.0)
    ph = phases(lam, preset.schedule, traj)
    return float(ph.phi_g[-1]), float(berry_limit(lam, preset.representation.spec, a_cone)), traj


def kappa_of(preset: ModelPreset):
    return kappa_constants(preset.representation.spec)
