"""Lewis-Riesenfeld invariant for the three-generator Hamiltonian family.

The invariant is parameterized by two angles ``(a, b)``::

    I(t) = y { sin(a)/2 e^{-ib} A + sin(a)/2 e^{ib} B } + cos(a) C

with ``kappa = sqrt(mn/2)`` (principal branch), ``x = 1/kappa`` and
``y = m/kappa``.  Requiring ``dI/dt + (1/i)[I, H] = 0`` gives the auxiliary
equations, which split into the explicit system::

    a' = -kappa omega sin(theta) sin(b - phi)
    b' =  m omega cos(theta) - kappa omega sin(theta) cot(a) cos(b - phi)

For SU(1,1)-type algebras (``mn < 0``) ``kappa`` is imaginary and a real
``a`` would make ``I`` non-Hermitian.  There the polar angle is continued to
``a = i alpha`` with real ``alpha``; every stored angle for such an algebra
is ``alpha``, and the equations become::

    alpha' = -|kappa| omega sin(theta) sin(b - phi)
    b'     =  m omega cos(theta) - |kappa| omega sin(theta) coth(alpha) cos(b - phi)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraSpec, Representation
from .errors import (
    ContinuationError,
    IntegrationAccuracyError,
    InvalidArgument,
    SingularityError,
)
from .hamiltonian import CoefficientSchedule, assemble

SINGULARITY_GUARD = 1e-8
_START_GUARD = 1e-6
# sin(theta) below this is treated as an exact pole of the Hamiltonian angles.
_POLE_EPS = 1e-14


@dataclass(frozen=True)
class InvariantConstants:
    kappa: complex
    x: complex
    y: complex
    spec: AlgebraSpec

    @property
    def hyperbolic(self) -> bool:
        return not self.spec.compact


def kappa_constants(spec: AlgebraSpec) -> InvariantConstants:
    mn = spec.m * spec.n
    if mn == 0:
        raise InvalidArgument("m*n must be non-zero")
    kappa = cmath.sqrt(mn / 2)
    return InvariantConstants(kappa=kappa, x=1 / kappa, y=spec.m / kappa, spec=spec)


@dataclass(frozen=True)
class AuxiliaryState:
    a: float
    b: float


def complex_angle(spec: AlgebraSpec, a):
    """The polar angle as it enters the algebra: ``a`` or ``i*alpha``."""
    return a if spec.compact else 1j * np.asarray(a)


def _make_rhs(sched: CoefficientSchedule, spec: AlgebraSpec):
    m = spec.m
    k = math.sqrt(abs(spec.m * spec.n) / 2)
    compact = spec.compact
    omega, theta, phi = sched.omega, sched.theta, sched.phi

    def rhs(t, a, b):
        w = float(omega(t))
        th = float(theta(t))
        d = b - float(phi(t))
        s_th = math.sin(th)
        adot = -k * w * s_th * math.sin(d)
        bdot = m * w * math.cos(th)
        if abs(s_th) > _POLE_EPS:
            s_a = math.sin(a) if compact else math.sinh(a)
            if abs(s_a) < SINGULARITY_GUARD:
                raise SingularityError(
                    f"invariant angle at a pole (|sin a| = {abs(s_a):.2e}) at t={t:.6g}", time=t
                )
            c_a = math.cos(a) if compact else math.cosh(a)
            bdot -= k * w * s_th * (c_a / s_a) * math.cos(d)
        return adot, bdot

    return rhs


def auxiliary_rhs(state: AuxiliaryState, t: float, sched: CoefficientSchedule, spec: AlgebraSpec):
    """``(a', b')`` for the invariant angles (``alpha'`` on the hyperbolic branch)."""
    return _make_rhs(sched, spec)(t, state.a, state.b)


def _eq23_lines(spec, a_c, b, adot_c, bdot, w, th, ph):
    consts = kappa_constants(spec)
    y, m, n = consts.y, spec.m, spec.n
    sa, ca = cmath.sin(a_c), cmath.cos(a_c)
    e = cmath.exp(-1j * b)
    line1 = y * e * (adot_c * ca - 1j * bdot * sa) - 1j * m * w * (
        cmath.exp(-1j * ph) * ca * math.sin(th) - y * e * sa * math.cos(th)
    )
    line2 = adot_c + 0.5 * n * y * w * math.sin(th) * math.sin(b - ph)
    return line1, line2


def eq_residual(spec: AlgebraSpec, a, b, adot, bdot, w, th, ph) -> float:
    """Largest modulus of the two complex auxiliary equations at one point."""
    unit = 1.0 if spec.compact else 1j
    l1, l2 = _eq23_lines(spec, complex_angle(spec, a), b, unit * adot, bdot, w, th, ph)
    return max(abs(l1), abs(l2))


def auxiliary_rates_linear_solve(state: AuxiliaryState, t: float, sched: CoefficientSchedule,
                                 spec: AlgebraSpec):
    """Independent route to ``(a', b')``: least squares on the real and
    imaginary parts of both auxiliary equations, which are linear in the rates.

    Returns ``(adot, bdot, residual)``; ``residual`` is the norm of the
    inconsistent part and vanishes when the equations are compatible.
    """
    w, th, ph = sched.angles(t)
    unit = 1.0 if spec.compact else 1j
    a_c = complex_angle(spec, state.a)
    base = np.array(_eq23_lines(spec, a_c, state.b, 0.0, 0.0, w, th, ph))
    col_a = np.array(_eq23_lines(spec, a_c, state.b, unit, 0.0, w, th, ph)) - base
    col_b = np.array(_eq23_lines(spec, a_c, state.b, 0.0, 1.0, w, th, ph)) - base
    M = np.column_stack([col_a, col_b])
    M_real = np.vstack([M.real, M.imag])
    rhs = -np.concatenate([base.real, base.imag])
    sol, *_ = np.linalg.lstsq(M_real, rhs, rcond=None)
    resid = float(np.linalg.norm(M_real @ sol - rhs))
    return float(sol[0]), float(sol[1]), resid


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuxiliaryTrajectory:
    """Sampled invariant angles and their rates on a time grid.

    ``error_estimate`` is the Richardson estimate of the global error from a
    half-step re-integration (``nan`` when it was skipped).
    """

    grid: np.ndarray
    a: np.ndarray
    b: np.ndarray
    adot: np.ndarray
    bdot: np.ndarray
    spec: AlgebraSpec
    max_residual: float
    error_estimate: float

    def state(self, i: int) -> AuxiliaryState:
        return AuxiliaryState(float(self.a[i]), float(self.b[i]))

    def index_of(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.grid - t)))
        if not math.isclose(self.grid[i], t, rel_tol=0, abs_tol=1e-12 * max(1.0, abs(t))):
            raise InvalidArgument(f"t={t} is not on the trajectory grid")
        return i


def adiabatic_start(sched: CoefficientSchedule, spec: AlgebraSpec, t: float | None = None) -> AuxiliaryState:
    """Initial angles that align the invariant with ``H(t_start)``."""
    t = sched.t_start if t is None else t
    _, th, ph = sched.angles(t)
    y = kappa_constants(spec).y
    if spec.compact:
        # y tan(a) = tan(theta)
        return AuxiliaryState(math.atan2(math.sin(th), y.real * math.cos(th)), ph)
    ratio = math.tan(th) / abs(y)
    if abs(ratio) >= 1:
        raise InvalidArgument(
            f"no Hermitian invariant aligned with H at t={t}: outside the elliptic regime"
        )
    return AuxiliaryState(math.atanh(ratio), ph)


def _rk4_path(rhs, grid, a0, b0, substeps):
    n = len(grid)
    a = np.empty(n)
    b = np.empty(n)
    a[0], b[0] = a0, b0
    ai, bi = a0, b0
    for i in range(n - 1):
        t0 = grid[i]
        h = (grid[i + 1] - t0) / substeps
        for s in range(substeps):
            t = t0 + s * h
            k1a, k1b = rhs(t, ai, bi)
            k2a, k2b = rhs(t + 0.5 * h, ai + 0.5 * h * k1a, bi + 0.5 * h * k1b)
            k3a, k3b = rhs(t + 0.5 * h, ai + 0.5 * h * k2a, bi + 0.5 * h * k2b)
            k4a, k4b = rhs(t + h, ai + h * k3a, bi + h * k3b)
            ai += h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
            bi += h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        a[i + 1], b[i + 1] = ai, bi
    return a, b


def rk4_step(sched: CoefficientSchedule, spec: AlgebraSpec, state: AuxiliaryState, t: float,
             h: float) -> AuxiliaryState:
    """One classical RK4 step of size ``h`` (may be negative)."""
    a, b = _rk4_path(_make_rhs(sched, spec), np.array([t, t + h]), state.a, state.b, 1)
    return AuxiliaryState(float(a[1]), float(b[1]))


def solve_auxiliary(
    sched: CoefficientSchedule,
    spec: AlgebraSpec,
    grid,
    a0: float | None = None,
    b0: float | None = None,
    substeps: int = 1,
    tol: float = 1e-8,
    accuracy_tol: float | None = 1e-6,
    richardson: bool = True,
) -> AuxiliaryTrajectory:
    """Integrate the auxiliary equations with fixed-step classical RK4.

    ``a0``/``b0`` default to :func:`adiabatic_start`.  The returned trajectory
    is certified: the auxiliary equations hold to ``tol`` at every grid point
    with the stored rates, and (when ``richardson``) the half-step error
    estimate is below ``accuracy_tol``.

    Raises
    ------
    SingularityError
        The polar angle reached a pole of the parameterization.
    IntegrationAccuracyError
        Certification failed; use a finer grid.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise InvalidArgument("grid must be strictly increasing with at least two points")
    sched.check_time(grid[0])
    sched.check_time(grid[-1])
    if a0 is None or b0 is None:
        start = adiabatic_start(sched, spec, grid[0])
        a0 = start.a if a0 is None else a0
        b0 = start.b if b0 is None else b0
    _, th0, _ = sched.angles(grid[0])
    s_a0 = math.sin(a0) if spec.compact else math.sinh(a0)
    if abs(s_a0) < _START_GUARD and abs(math.sin(th0)) > _POLE_EPS:
        raise SingularityError(f"initial angle a0={a0} too close to a pole", time=grid[0])

    rhs = _make_rhs(sched, spec)
    a, b = _rk4_path(rhs, grid, float(a0), float(b0), substeps)
    rates = np.array([rhs(t, ai, bi) for t, ai, bi in zip(grid, a, b)])
    adot, bdot = rates[:, 0], rates[:, 1]

    max_res = 0.0
    for t, ai, bi, ad, bd in zip(grid, a, b, adot, bdot):
        max_res = max(max_res, eq_residual(spec, ai, bi, ad, bd, *sched.angles(t)))
    if max_res > tol:
        raise IntegrationAccuracyError(
            f"auxiliary-equation residual {max_res:.2e} exceeds {tol:.0e}"
        )

    err = float("nan")
    if richardson:
        a2, b2 = _rk4_path(rhs, grid, float(a0), float(b0), 2 * substeps)
        # 4th order: the fine solution's error is ~ (coarse - fine)/15
        err = float(max(np.abs(a - a2).max(), np.abs(b - b2).max()) * 16 / 15)
        if accuracy_tol is not None and err > accuracy_tol:
            raise IntegrationAccuracyError(
                f"estimated integration error {err:.2e} exceeds {accuracy_tol:.0e}; "
                "refine the grid or raise substeps"
            )
    return AuxiliaryTrajectory(grid, a, b, adot, bdot, spec, max_res, err)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

def invariant_matrix(rep: Representation, consts: InvariantConstants, state: AuxiliaryState,
                     herm_tol: float = 1e-10) -> np.ndarray:
    a_c = complex_angle(rep.spec, state.a)
    half = 0.5 * consts.y * np.sin(a_c)
    I = half * np.exp(-1j * state.b) * rep.A + half * np.exp(1j * state.b) * rep.B + np.cos(a_c) * rep.C
    if rep.hermitian_paired() and np.abs(I - I.conj().T).max() > herm_tol * max(1.0, np.abs(I).max()):
        raise ContinuationError("invariant is not Hermitian; wrong branch for this algebra")
    return I


def invariant_derivative(rep: Representation, consts: InvariantConstants, a, b, adot, bdot) -> np.ndarray:
    """Analytic time derivative of the invariant matrix given the angle rates."""
    unit = 1.0 if rep.spec.compact else 1j
    a_c = complex_angle(rep.spec, a)
    ad = unit * adot
    y = consts.y
    dA = 0.5 * y * np.exp(-1j * b) * (np.cos(a_c) * ad - 1j * bdot * np.sin(a_c))
    dB = 0.5 * y * np.exp(1j * b) * (np.cos(a_c) * ad + 1j * bdot * np.sin(a_c))
    return dA * rep.A + dB * rep.B - np.sin(a_c) * ad * rep.C


def invariant_residual(rep: Representation, sched: CoefficientSchedule, traj: AuxiliaryTrajectory,
                       t: float) -> float:
    """Frobenius norm of ``dI/dt + (1/i)[I, H]`` on the interior block."""
    i = traj.index_of(t)
    consts = kappa_constants(rep.spec)
    I = invariant_matrix(rep, consts, traj.state(i))
    dI = invariant_derivative(rep, consts, traj.a[i], traj.b[i], traj.adot[i], traj.bdot[i])
    H = assemble(rep, sched, traj.grid[i])
    R = dI - 1j * (I @ H - H @ I)
    k = rep.interior_dim
    return float(np.linalg.norm(R[:k, :k]))


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(np.abs(vec) > 1e-12)
    if idx.size:
        vec = vec * np.exp(-1j * np.angle(vec[idx[0]]))
    return vec


def eigen_invariant(rep: Representation) -> list[tuple[float, np.ndarray]]:
    """Eigenpairs of ``C`` (the transformed invariant), ``lambda`` descending.

    Eigenvectors are phase-fixed so their first non-zero entry is real
    positive; ties keep basis order.
    """
    C = rep.C
    if np.abs(C - C.conj().T).max() < 1e-14:
        vals, vecs = np.linalg.eigh(C)
    else:
        vals, vecs = np.linalg.eig(C)
        if np.linalg.matrix_rank(vecs) < rep.dim or np.abs(vals.imag).max() > 1e-12:
            raise np.linalg.LinAlgError("C is defective or has complex spectrum")
        vals = vals.real
    order = sorted(range(len(vals)), key=lambda i: (-round(float(vals[i]), 12), i))
    return [(float(vals[i]), _fix_phase(vecs[:, i])) for i in order]
