"""Physical models expressed as (representation, schedule, c-number) presets.

Each preset also carries ``direct_hamiltonian``: the model's original
operator expression built from raw ladder operators or kets and projected
onto the preset's basis.  It shares no code with the generator matrices or
:func:`lrsolve.hamiltonian.assemble`, so agreement between the two is a real
check of the mapping.  Units have hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import (
    Representation,
    annihilation,
    schwinger_su2_rep,
    su11_one_mode_rep,
    su11_two_mode_rep,
    su2_spin_rep,
    two_level_rep,
    verify_closure,
)
from .errors import HyperbolicRegimeError, InvalidArgument, UnsupportedTermError
from .hamiltonian import (
    CoefficientSchedule,
    _angles_from_components,
    assemble,
    constant,
    parameterize_su2_coupled_oscillators,
    split_conserved,
)


@dataclass(frozen=True)
class ModelPreset:
    """A runnable model.

    ``lambdas`` lists the ``C`` eigenvalues whose particular solutions are
    trustworthy (all of them for exact representations, the lowest protected
    rungs for truncated ones).
    """

    name: str
    representation: Representation
    schedule: CoefficientSchedule
    note: str
    direct_hamiltonian: Callable[[float], np.ndarray]
    lambdas: tuple = field(default=())

    @property
    def c0(self):
        return self.schedule.c0

    def hamiltonian(self, t: float) -> np.ndarray:
        return assemble(self.representation, self.schedule, t)

    def eigenvector(self, lam: float) -> np.ndarray:
        diag = np.real(np.diag(self.representation.C))
        hits = np.flatnonzero(np.abs(diag - lam) < 1e-9)
        if len(hits) != 1 or np.count_nonzero(self.representation.C - np.diag(np.diag(self.representation.C))):
            raise InvalidArgument(f"lambda={lam} is not a simple eigenvalue of the diagonal C")
        e = np.zeros(self.representation.dim, dtype=complex)
        e[hits[0]] = 1.0
        return e


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    runnable: bool
    note: str
    example: Callable[[], object] | None = None


def _as_fn(value):
    return value if callable(value) else constant(value)


def _as_cfn(value):
    if callable(value):
        return value
    value = complex(value)
    return lambda t: value + 0 * np.asarray(t, dtype=float)


def _kets(dim, index):
    e = np.zeros(dim, dtype=complex)
    e[index] = 1.0
    return e


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def _schwinger_pair(total):
    """Raw two-mode ladder operators on Fock ``0..total`` and the isometry onto
    ``|total-i, i>``, ``i = 0..total``."""
    nf = total + 1
    a = annihilation(nf)
    eye = np.eye(nf)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    iso = np.stack([_kets(nf * nf, (total - i) * nf + i) for i in range(total + 1)], axis=1)
    return a1, a2, iso


def spin_model(c0_coeff, theta, phi, j=0.5, t_start: float = 0.0, t_end: float = 1.0) -> ModelPreset:
    """Spin in a field of strength ``c0_coeff`` along the direction ``(theta, phi)``."""
    rep = su2_spin_rep(j)
    omega, theta, phi = _as_fn(c0_coeff), _as_fn(theta), _as_fn(phi)
    sched = CoefficientSchedule(omega, theta, phi, t_start, t_end)
    total = rep.dim - 1
    a1, a2, iso = _schwinger_pair(total)
    jx = 0.5 * (a1.conj().T @ a2 + a2.conj().T @ a1)
    jy = -0.5j * (a1.conj().T @ a2 - a2.conj().T @ a1)
    jz = 0.5 * (a1.conj().T @ a1 - a2.conj().T @ a2)

    jx, jy, jz = (iso.conj().T @ op @ iso for op in (jx, jy, jz))

    def direct(t):
        w, th, ph = float(omega(t)), float(theta(t)), float(phi(t))
        return w * (np.sin(th) * np.cos(ph) * jx + np.sin(th) * np.sin(ph) * jy + np.cos(th) * jz)

    return ModelPreset("spin", rep, sched, "spin in a magnetic field, SU(2)", direct,
                       tuple(float(v) for v in np.real(np.diag(rep.C))))


def coupled_oscillators_su2(omega1, omega2, g, n1_plus_n2: int, t_start: float = 0.0,
                            t_end: float = 1.0) -> ModelPreset:
    """``w1 a1†a1 + w2 a2†a2 + g a1†a2 + g* a2†a1`` at fixed ``n1 + n2``."""
    omega1, omega2, g = _as_fn(omega1), _as_fn(omega2), _as_cfn(g)
    rep = schwinger_su2_rep(n1_plus_n2)
    sched = parameterize_su2_coupled_oscillators(omega1, omega2, g, t_start, t_end, n1_plus_n2=n1_plus_n2)
    a1, a2, iso = _schwinger_pair(int(n1_plus_n2))
    n1, n2 = a1.conj().T @ a1, a2.conj().T @ a2
    hop = a1.conj().T @ a2
    n1, n2, hop, hop_dag = (iso.conj().T @ op @ iso for op in (n1, n2, hop, hop.conj().T))

    def direct(t):
        gt = complex(g(t))
        return float(omega1(t)) * n1 + float(omega2(t)) * n2 + gt * hop + np.conj(gt) * hop_dag

    return ModelPreset("su2-oscillators", rep, sched, "beam-splitter coupled oscillators, SU(2)",
                       direct, tuple(float(v) for v in np.real(np.diag(rep.C))))


def coupled_oscillators_su11(omega1, omega2, g, n1_minus_n2: int = 0, cutoff: int = 40,
                             t_start: float = 0.0, t_end: float = 1.0, grid=None) -> ModelPreset:
    """``w1 a1†a1 + w2 a2†a2 + g a1 a2 + g* a1†a2†`` at fixed ``n1 - n2``.

    Raises
    ------
    HyperbolicRegimeError
        ``(w1 + w2)^2 <= 4|g|^2`` somewhere on the interval.
    """
    omega1, omega2, g = _as_fn(omega1), _as_fn(omega2), _as_cfn(g)
    rep = su11_two_mode_rep(n1_minus_n2, cutoff)
    lie, c0 = split_conserved("su11-coupled", omega1, omega2, g, 0.5 * n1_minus_n2, t_start, t_end, grid)
    sched = lie.with_c0(c0)
    diff = int(n1_minus_n2)
    off = max(0, -diff)
    nf = cutoff + abs(diff) + 1
    a = annihilation(nf)
    eye = np.eye(nf)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    iso = np.stack([_kets(nf * nf, (r + off + diff) * nf + (r + off)) for r in range(cutoff)], axis=1)
    # act on the isometry first: products stay (nf^2 x cutoff)
    a1_iso, a2_iso = a1 @ iso, a2 @ iso
    n1, n2 = a1_iso.conj().T @ a1_iso, a2_iso.conj().T @ a2_iso
    pair = iso.conj().T @ (a1 @ a2_iso)
    pair_dag = pair.conj().T

    def direct(t):
        gt = complex(g(t))
        return float(omega1(t)) * n1 + float(omega2(t)) * n2 + gt * pair + np.conj(gt) * pair_dag

    lams = tuple(float(v) for v in np.real(np.diag(rep.C))[: min(2, rep.protected_dim)])
    return ModelPreset("su11-oscillators", rep, sched,
                       "parametrically coupled oscillators (dipole-dipole without rotating wave), SU(1,1)",
                       direct, lams)


def general_harmonic_oscillator(X, Y, Z, cutoff: int = 40, F=0.0, t_start: float = 0.0,
                                t_end: float = 1.0, grid=None) -> ModelPreset:
    """``(X q^2 + Y (qp + pq) + Z p^2)/2`` on the even-parity ladder.

    With ``q = (a + a†)/sqrt(2)`` and ``p = i(a† - a)/sqrt(2)`` the coefficients
    are ``X + Z`` on ``K3`` and ``(X - Z)/2 + iY`` on ``K+``.

    Raises
    ------
    UnsupportedTermError
        A linear ``F q`` drive was requested.
    HyperbolicRegimeError
        ``XZ <= Y^2`` somewhere on the interval.
    """
    if callable(F) or F != 0:
        raise UnsupportedTermError("a linear F q term leaves the three-generator algebra")
    X, Y, Z = _as_fn(X), _as_fn(Y), _as_fn(Z)
    ts = np.linspace(t_start, t_end, 257) if grid is None else np.asarray(grid, dtype=float)
    disc = np.asarray(X(ts)) * np.asarray(Z(ts)) - np.asarray(Y(ts)) ** 2
    if np.any(disc <= 0) or np.any(np.asarray(X(ts)) + np.asarray(Z(ts)) <= 0):
        bad = ts[np.argmax(disc <= 0)]
        raise HyperbolicRegimeError(f"XZ <= Y^2 at t={bad:g}; only the elliptic regime is supported")
    rep = su11_one_mode_rep(cutoff)

    def diag(t):
        return np.asarray(X(t)) + np.asarray(Z(t))

    def raise_coeff(t):
        return 0.5 * (np.asarray(X(t)) - np.asarray(Z(t))) + 1j * np.asarray(Y(t))

    omega, theta, phi = _angles_from_components(diag, raise_coeff)
    sched = CoefficientSchedule(omega, theta, phi, t_start, t_end)
    nf = 2 * cutoff + 4
    a = annihilation(nf)
    ad = a.conj().T
    q = (a + ad) / np.sqrt(2)
    p = 1j * (ad - a) / np.sqrt(2)
    q2, p2, qp = q @ q, p @ p, q @ p + p @ q
    iso = np.stack([_kets(nf, 2 * r) for r in range(cutoff)], axis=1)
    q2, p2, qp = (iso.conj().T @ op @ iso for op in (q2, p2, qp))

    def direct(t):
        return 0.5 * (float(X(t)) * q2 + float(Y(t)) * qp + float(Z(t)) * p2)

    lams = tuple(float(v) for v in np.real(np.diag(rep.C))[: min(2, rep.protected_dim)])
    return ModelPreset("gho", rep, sched, "general quadratic oscillator, SU(1,1) one-mode", direct, lams)


def two_level_atom(omega0, g, t_start: float = 0.0, t_end: float = 1.0, grid=None) -> ModelPreset:
    """``omega0 (|1><1| - |2><2|)/2 + g |1><2| + g* |2><1|``."""
    omega0, g = _as_fn(omega0), _as_cfn(g)
    rep = two_level_rep()
    omega, theta, phi = _angles_from_components(omega0, g)
    ts = np.linspace(t_start, t_end, 257) if grid is None else np.asarray(grid, dtype=float)
    if np.any(np.asarray(omega(ts)) <= 0):
        raise InvalidArgument("omega0 and g vanish together; the field direction is undefined")
    sched = CoefficientSchedule(omega, theta, phi, t_start, t_end)
    k1, k2 = _kets(2, 0), _kets(2, 1)

    def direct(t):
        gt = complex(g(t))
        return (0.5 * float(omega0(t)) * (np.outer(k1, k1) - np.outer(k2, k2))
                + gt * np.outer(k1, k2) + np.conj(gt) * np.outer(k2, k1))

    return ModelPreset("two-level", rep, sched, "driven two-level atom, SU(2)", direct, (0.5, -0.5))


# ---------------------------------------------------------------------------
# Listing
# ---------------------------------------------------------------------------

def _examples():
    return {
        "spin": lambda: spin_model(1.0, np.pi / 3, lambda t: 0.2 * t, j=0.5, t_end=5.0),
        "su2-oscillators": lambda: coupled_oscillators_su2(
            1.0, lambda t: 0.6 + 0.1 * np.sin(t), lambda t: 0.3 * np.exp(0.2j * t), 2, t_end=5.0),
        "su11-oscillators": lambda: coupled_oscillators_su11(
            1.0, 0.8, lambda t: 0.1 + 0.05j * np.sin(t), 1, cutoff=40, t_end=5.0),
        "gho": lambda: general_harmonic_oscillator(
            lambda t: 1.2 + 0.1 * np.sin(t), 0.1, 0.8, cutoff=40, t_end=5.0),
        "two-level": lambda: two_level_atom(1.0, lambda t: 0.25 * np.exp(-0.3j * t), t_end=5.0),
    }


_EXCLUSIONS = (
    ("su11-heisenberg-semidirect",
     "SU(1,1) semidirect sum with the Heisenberg-Weyl algebra (squeezing plus linear drive); "
     "six generators, outside the three-generator method"),
    ("charged-particle-radial",
     "radial motion of a charge in a uniform magnetic field; the SU(1,1) realization acts on "
     "an unbounded function space and is documented only"),
    ("generalized-cavity",
     "two-level atom in a cavity with a generalized ladder algebra; only the oscillator "
     "realization (a†)^k is implemented, as susy-jc"),
    ("hydrogenlike-atom",
     "hydrogen-like atom ladder realization; non-oscillator ladder algebra"),
    ("two-photon-lasers",
     "coupled two-photon lasers; no explicit Hamiltonian is given"),
)


def list_models() -> list[CatalogEntry]:
    """Runnable presets (each with a small example) followed by documented exclusions."""
    entries = [CatalogEntry(name, True, factory().note, factory) for name, factory in _examples().items()]
    entries.append(CatalogEntry(
        "susy-jc", True,
        "k-photon supersymmetric Jaynes-Cummings model in a two-state block (see lrsolve.susy_jc)",
        None))
    entries += [CatalogEntry(name, False, note) for name, note in _EXCLUSIONS]
    return entries


def preset_closure(preset: ModelPreset):
    return verify_closure(preset.representation)
