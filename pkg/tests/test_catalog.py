import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from lrsolve.catalog import (
    coupled_oscillators_su2,
    coupled_oscillators_su11,
    general_harmonic_oscillator,
    list_models,
    preset_closure,
    spin_model,
    two_level_atom,
)
from lrsolve.errors import HyperbolicRegimeError, UnsupportedTermError
from lrsolve.scenarios import run_preset

RUNNABLE = {e.name: e for e in list_models() if e.runnable and e.example is not None}


def test_listing():
    entries = list_models()
    runnable = [e for e in entries if e.runnable]
    assert len(runnable) >= 5
    excluded = {e.name for e in entries if not e.runnable}
    assert {"su11-heisenberg-semidirect", "charged-particle-radial", "hydrogenlike-atom",
            "two-photon-lasers", "generalized-cavity"} <= excluded
    assert all(e.note for e in entries)


@pytest.mark.parametrize("name", sorted(RUNNABLE))
def test_presets_close_and_match_direct_construction(name):
    preset = RUNNABLE[name].example()
    assert preset_closure(preset).passed
    for t in np.linspace(preset.schedule.t_start, preset.schedule.t_end, 7):
        np.testing.assert_allclose(preset.hamiltonian(t), preset.direct_hamiltonian(t), atol=1e-12)


def test_spin_polar_field():
    p = spin_model(1.5, 0.0, 0.0, j=1)
    np.testing.assert_allclose(p.hamiltonian(0.3), 1.5 * p.representation.C, atol=1e-15)


def test_spin_static_tilted_eigenphases():
    p = spin_model(1.2, 0.9, 0.4, t_end=3.0)
    grid = np.linspace(0, 3, 301)
    res = run_preset(p, grid, oracle_substeps=None)
    for st_ in res.states:
        np.testing.assert_allclose(st_.phases.total, st_.lam * 1.2 * grid, atol=1e-10)


def test_su2_single_quantum_is_spin_half():
    p = coupled_oscillators_su2(1.0, 0.4, 0.3, 1)
    H = p.hamiltonian(0.0) - float(p.c0(0.0)) * np.eye(2)
    np.testing.assert_allclose(np.linalg.eigvalsh(H), [-0.5 * math.sqrt(0.36 + 0.36), 0.5 * math.sqrt(0.72)])


def test_su2_uncoupled_is_diagonal():
    p = coupled_oscillators_su2(1.3, 0.7, 0.0, 2)
    H = p.hamiltonian(0.2)
    assert np.count_nonzero(H - np.diag(np.diag(H))) == 0
    # |2,0>, |1,1>, |0,2>
    np.testing.assert_allclose(np.diag(H).real, [2.6, 2.0, 1.4])


def test_su11_uncoupled_phases_linear():
    p = coupled_oscillators_su11(1.0, 0.8, 0.0, 1, cutoff=20, t_end=2.0)
    res = run_preset(p, np.linspace(0, 2, 101), oracle_substeps=None)
    for st_ in res.states:
        total = st_.phases.total
        np.testing.assert_allclose(np.diff(total, 2), 0.0, atol=1e-10)


def test_su11_weak_static_coupling_and_cutoff_convergence():
    grid = np.linspace(0, 3, 151)
    finals = []
    for cutoff in (24, 28):
        p = coupled_oscillators_su11(1.0, 0.9, 0.05, 0, cutoff=cutoff, t_end=3.0)
        res = run_preset(p, grid, oracle_substeps=2)
        assert res.oracle.worst_fidelity > 1 - 1e-6
        finals.append(res.states[0].psi[-1][:10])
    assert abs(np.vdot(finals[0], finals[1])) > 1 - 1e-8


def test_su11_rejects_hyperbolic():
    with pytest.raises(HyperbolicRegimeError):
        coupled_oscillators_su11(0.5, 0.5, 0.6, 0)


def test_gho_coefficients():
    p = general_harmonic_oscillator(1.0, 0.0, 1.0, cutoff=12)
    rep = p.representation
    H = p.hamiltonian(0.0)
    np.testing.assert_allclose(H, 2 * rep.C, atol=1e-14)
    p = general_harmonic_oscillator(1.2, 0.0, 0.8, cutoff=12)
    H = p.hamiltonian(0.0)
    kplus = np.vdot(rep.A.ravel(), H.ravel()) / np.vdot(rep.A.ravel(), rep.A.ravel())
    k3 = np.vdot(rep.C.ravel(), H.ravel()) / np.vdot(rep.C.ravel(), rep.C.ravel())
    assert kplus == pytest.approx(0.2, abs=1e-12)
    assert k3.real == pytest.approx(2.0, abs=1e-12)


def test_gho_static_spectrum():
    X, Y, Z = 1.2, 0.1, 0.8
    p = general_harmonic_oscillator(X, Y, Z, cutoff=40, t_end=2.0)
    grid = np.linspace(0, 2, 201)
    res = run_preset(p, grid, oracle_substeps=None)
    w = math.sqrt(X * Z - Y ** 2)
    # even ladder: rungs 0 and 2
    for st_, n in zip(res.states, (0, 2)):
        np.testing.assert_allclose(st_.phases.total, w * (n + 0.5) * grid, atol=1e-8)


def test_gho_rejects_linear_drive_and_hyperbolic():
    with pytest.raises(UnsupportedTermError):
        general_harmonic_oscillator(1.0, 0.0, 1.0, F=0.1)
    with pytest.raises(HyperbolicRegimeError):
        general_harmonic_oscillator(1.0, 1.2, 1.0)


def test_two_level_rabi_and_precession():
    g = 0.3
    p = two_level_atom(0.0, g)
    # on resonance H = g sigma_x: complete transfer at g t = pi/2
    U = expm(-1j * p.hamiltonian(0.0) * math.pi / (2 * g))
    assert abs(U[1, 0]) == pytest.approx(1.0, abs=1e-12)
    p = two_level_atom(1.0, 0.0)
    np.testing.assert_allclose(p.hamiltonian(0.5), np.diag([0.5, -0.5]))


@settings(max_examples=8, deadline=None)
@given(w2=st.floats(0.3, 1.5), mod=st.floats(0.05, 0.4), arg=st.floats(-math.pi, math.pi))
def test_su2_oscillators_oracle_property(w2, mod, arg):
    # tiny couplings start the invariant on a pole, which is rejected by design
    g = mod * complex(math.cos(arg), math.sin(arg))
    p = coupled_oscillators_su2(1.0, lambda t: w2 + 0.1 * np.sin(t), lambda t: g * np.exp(0.3j * t), 2,
                                t_end=3.0)
    res = run_preset(p, np.linspace(0, 3, 301), oracle_substeps=2)
    assert res.oracle.worst_fidelity > 1 - 1e-6
    assert res.oracle.worst_phase < 1e-4
