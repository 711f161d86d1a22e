"""Brute-force references: time-ordered propagators and full Fock embeddings.

Nothing here uses the invariant machinery.  The propagator is a product of
midpoint step exponentials (second order), with the step exponential built
from an eigendecomposition rather than the Pade routine used for ``V``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import annihilation
from .errors import InvalidArgument


def _step_exponential(H: np.ndarray, dt: float) -> np.ndarray:
    """``exp(-i H dt)``."""
    if np.abs(H - H.conj().T).max() <= 1e-13 * max(1.0, np.abs(H).max()):
        vals, vecs = np.linalg.eigh(0.5 * (H + H.conj().T))
        return (vecs * np.exp(-1j * vals * dt)) @ vecs.conj().T
    vals, vecs = np.linalg.eig(H)
    return (vecs * np.exp(-1j * vals * dt)) @ np.linalg.inv(vecs)


@dataclass(frozen=True)
class PropagatorResult:
    grid: np.ndarray
    U: np.ndarray  # (len(grid), d, d)
    order_estimate: float

    @property
    def final(self) -> np.ndarray:
        return self.U[-1]


def _propagate(H, grid, substeps):
    d = H(grid[0]).shape[0]
    U = np.empty((len(grid), d, d), dtype=complex)
    cur = np.eye(d, dtype=complex)
    U[0] = cur
    for i in range(len(grid) - 1):
        h = (grid[i + 1] - grid[i]) / substeps
        for s in range(substeps):
            tm = grid[i] + (s + 0.5) * h
            cur = _step_exponential(H(tm), h) @ cur
        U[i + 1] = cur
    return U


def timeordered_propagator(H: Callable[[float], np.ndarray], grid, substeps: int = 1,
                           estimate_order: bool = True) -> PropagatorResult:
    """``U(t) = T exp(-i int H)`` sampled on ``grid``.

    ``order_estimate`` is ``log2`` of the ratio of successive differences
    between runs with ``substeps``, ``2 substeps`` and ``4 substeps`` at the
    final time (``nan`` when skipped or when ``H`` is static).
    """
    if int(substeps) != substeps or substeps < 1:
        raise InvalidArgument("substeps must be a positive integer")
    grid = np.asarray(grid, dtype=float)
    U = _propagate(H, grid, int(substeps))
    order = float("nan")
    if estimate_order:
        U2 = _propagate(H, grid, 2 * int(substeps))[-1]
        U4 = _propagate(H, grid, 4 * int(substeps))[-1]
        e1 = np.linalg.norm(U[-1] - U2)
        e2 = np.linalg.norm(U2 - U4)
        # below this the differences are accumulated rounding, not truncation error
        if e2 > 1e-12 * np.linalg.norm(U4):
            order = float(np.log2(e1 / e2))
    return PropagatorResult(grid, U, order)


def overlap(psi_ref, psi) -> complex:
    """``<psi_ref|psi>``."""
    return complex(np.vdot(psi_ref, psi))


def fidelity(psi1, psi2) -> float:
    psi1 = np.asarray(psi1)
    psi2 = np.asarray(psi2)
    if psi1.shape != psi2.shape:
        raise InvalidArgument(f"dimension mismatch {psi1.shape} vs {psi2.shape}")
    return float(min(1.0, abs(np.vdot(psi1, psi2))))


def phase_error(psi_ref, psi) -> float:
    """``|arg <psi_ref|psi>|``: zero only when the global phase agrees too."""
    return float(abs(np.angle(overlap(psi_ref, psi))))


def schrodinger_residual(psi, H: Callable[[float], np.ndarray], grid) -> float:
    """Max over interior grid points of ``|i dpsi/dt - H psi|`` (central differences)."""
    psi = np.asarray(psi)
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 3:
        raise InvalidArgument("need at least three grid points")
    worst = 0.0
    for i in range(1, len(grid) - 1):
        dpsi = (psi[i + 1] - psi[i - 1]) / (grid[i + 1] - grid[i - 1])
        worst = max(worst, float(np.linalg.norm(1j * dpsi - H(grid[i]) @ psi[i])))
    return worst


# ---------------------------------------------------------------------------
# Multiphoton Jaynes-Cummings model in the full (truncated) Fock space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SusyEmbedding:
    """Full-space Hamiltonian and the two-state block it leaves invariant.

    The product basis is ``|n> (x) |s>`` with ``n = 0..cutoff`` ascending and
    ``s`` = (excited, ground); index ``2n + s``.
    """

    H: Callable[[float], np.ndarray]
    projector: np.ndarray
    isometry: np.ndarray  # (dim, 2): columns |m, e>, |m+k, g>
    n_prime: np.ndarray
    cutoff: int


def fullspace_susy_embedding(cfg, cutoff: int) -> SusyEmbedding:
    if cutoff < cfg.m_fock + cfg.k + 4:
        raise InvalidArgument(f"cutoff {cutoff} < m + k + 4 = {cfg.m_fock + cfg.k + 4}")
    nf = cutoff + 1
    a = annihilation(nf)
    ad = a.conj().T
    num = ad @ a
    ak = np.linalg.matrix_power(a, cfg.k)
    adk = np.linalg.matrix_power(ad, cfg.k)
    sz = np.diag([1.0, -1.0]).astype(complex)
    sm = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e|
    sp = sm.T.copy()
    eye2 = np.eye(2)
    eyef = np.eye(nf)
    num_full = np.kron(num, eye2)
    sz_full = np.kron(eyef, sz)
    down = np.kron(adk, sm)
    up = np.kron(ak, sp)

    def H(t):
        w = float(cfg.omega(t))
        w0 = float(cfg.omega0(t))
        g = complex(cfg.g(t))
        return w * num_full + 0.5 * w0 * sz_full + g * down + np.conj(g) * up

    pe = np.diag([1.0, 0.0])
    pg = np.diag([0.0, 1.0])
    n_prime = np.kron(ak @ adk, pe) + np.kron(adk @ ak, pg)
    iso = np.zeros((2 * nf, 2), dtype=complex)
    iso[2 * cfg.m_fock, 0] = 1.0
    iso[2 * (cfg.m_fock + cfg.k) + 1, 1] = 1.0
    return SusyEmbedding(H, iso @ iso.conj().T, iso, n_prime, cutoff)
