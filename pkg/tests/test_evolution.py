import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from lrsolve.algebra import SU2, SU11, su2_spin_rep, su11_one_mode_rep
from lrsolve.errors import InvalidArgument, TransformationError
from lrsolve.evolution import (
    berry_limit,
    general_solution,
    hv_offdiagonal,
    iv_deviation,
    phases,
    solution_state,
    transformed_hamiltonian,
    transformed_hamiltonian_coefficient,
    transformed_invariant,
    unitary_V,
)
from lrsolve.hamiltonian import CoefficientSchedule, assemble, constant, linear_ramp, sinusoid
from lrsolve.invariant import AuxiliaryState, invariant_matrix, kappa_constants, solve_auxiliary
from lrsolve.oracle import fidelity, schrodinger_residual, timeordered_propagator

K2 = kappa_constants(SU2)


def const_sched(w, th, ph, t_end=1.0):
    return CoefficientSchedule(constant(w), constant(th), constant(ph), 0.0, t_end)


def smooth_sched(t_end=4.0):
    return CoefficientSchedule(sinusoid(1.0, 0.2, 3.0), linear_ramp(0.5, 1.2, 0.0, t_end),
                               sinusoid(0.0, 0.8, 5.0), 0.0, t_end)


def test_v_identity_at_pole():
    np.testing.assert_allclose(unitary_V(su2_spin_rep(1), K2, AuxiliaryState(0.0, 1.0)), np.eye(3))


def test_v_equatorial_rotation():
    rep = su2_spin_rep(0.5)
    V = unitary_V(rep, K2, AuxiliaryState(math.pi / 2, 0.0))
    np.testing.assert_allclose(V, expm(-math.pi / 4 * (rep.A - rep.B)), atol=1e-15)
    assert np.abs(V.conj().T @ V - np.eye(2)).max() < 1e-14


def test_v_hyperbolic_diagonalizes_invariant():
    rep = su11_one_mode_rep(40)
    state = AuxiliaryState(0.3, 0.4)
    assert iv_deviation(rep, state) < 1e-9


def test_transformed_invariant_pole_and_negative_control():
    rep = su2_spin_rep(1)
    state = AuxiliaryState(0.0, 0.2)
    np.testing.assert_array_equal(transformed_invariant(rep, unitary_V(rep, K2, state),
                                                        invariant_matrix(rep, K2, state)), rep.C)
    state = AuxiliaryState(1.1, -0.7)
    assert iv_deviation(rep, state) < 1e-10
    assert iv_deviation(rep, state, y_scale=1.1) > 1e-2
    corrupted = invariant_matrix(rep, K2.__class__(K2.kappa, K2.x, 1.1 * K2.y, SU2), state, herm_tol=np.inf)
    with pytest.raises(TransformationError):
        transformed_invariant(rep, unitary_V(rep, K2, state), corrupted)


def test_hv_coefficient_fixed_point():
    s = const_sched(1.7, 0.9, 0.3)
    tr = solve_auxiliary(s, SU2, np.linspace(0, 1, 11), a0=0.9, b0=0.3)
    assert transformed_hamiltonian_coefficient(s, tr, SU2, 0.5) == pytest.approx(1.7, abs=1e-14)


def test_hv_coefficient_polar():
    s = const_sched(1.3, 0.0, 0.0)
    tr = solve_auxiliary(s, SU2, np.linspace(0, 1, 11), a0=0.0, b0=0.0)
    assert transformed_hamiltonian_coefficient(s, tr, SU2, 0.3) == pytest.approx(1.3, abs=1e-15)


def test_hv_matches_coefficient_on_trajectory():
    rep = su2_spin_rep(1)
    s = smooth_sched()
    tr = solve_auxiliary(s, SU2, np.linspace(0, 4, 401))
    for i in (50, 200, 350):
        HV = transformed_hamiltonian(rep, s, tr.state(i), tr.grid[i])
        h = transformed_hamiltonian_coefficient(s, tr, SU2, tr.grid[i])
        assert np.linalg.norm(HV - h * rep.C) < 1e-6
        off1 = hv_offdiagonal(rep, HV)
        off2 = hv_offdiagonal(rep, transformed_hamiltonian(rep, s, tr.state(i), tr.grid[i], fd_step=5e-4))
        assert 3.5 < off1 / off2 < 4.5


def test_phases_start_at_zero_and_vanish_without_winding():
    s = const_sched(1.0, 0.6, 0.1, t_end=2.0)
    tr = solve_auxiliary(s, SU2, np.linspace(0, 2, 41), a0=0.6, b0=0.1)
    ph = phases(0.5, s, tr)
    assert ph.phi_d[0] == ph.phi_g[0] == ph.phi_c[0] == 0.0
    np.testing.assert_array_equal(ph.phi_g, 0.0)


@pytest.mark.parametrize("lam", [0.5, -0.5])
def test_static_spin_half_dynamical_phase(lam):
    s = const_sched(1.3, 0.7, 0.2, t_end=3.0)
    grid = np.linspace(0, 3, 61)
    tr = solve_auxiliary(s, SU2, grid, a0=0.7, b0=0.2)
    np.testing.assert_allclose(phases(lam, s, tr).phi_d, lam * 1.3 * grid, atol=1e-13)


def test_cone_trajectory_gives_solid_angle():
    # rotating field with the exactly conical invariant
    period, th, w = 10.0, 0.6, 1.0
    nu = 2 * math.pi / period
    a = math.atan2(w * math.sin(th), w * math.cos(th) - nu)
    s = CoefficientSchedule(constant(w), constant(th), lambda t: nu * np.asarray(t, dtype=float), 0.0, period)
    tr = solve_auxiliary(s, SU2, np.linspace(0, period, 2001), a0=a, b0=0.0)
    np.testing.assert_allclose(tr.a, a, atol=1e-12)
    assert phases(0.5, s, tr).phi_g[-1] == pytest.approx(berry_limit(0.5, SU2, a), abs=1e-9)


def test_berry_limit_values():
    assert berry_limit(0.5, SU2, 0.0) == 0.0
    assert berry_limit(0.5, SU2, math.pi / 2) == pytest.approx(math.pi)
    assert berry_limit(1.0, SU2, 1.0) == pytest.approx(2 * berry_limit(0.5, SU2, 1.0))


def test_solution_identity_start():
    rep = su2_spin_rep(0.5)
    s = const_sched(1.0, 0.0, 0.0)
    tr = solve_auxiliary(s, SU2, np.linspace(0, 1, 11), a0=0.0, b0=0.0)
    st_ = solution_state(0.5, [1, 0], tr, s, rep)
    np.testing.assert_array_equal(st_.psi[0], [1, 0])


def test_solution_static_matches_closed_form():
    rep = su2_spin_rep(0.5)
    s = const_sched(1.2, 0.8, -0.4, t_end=2.0)
    grid = np.linspace(0, 2, 101)
    tr = solve_auxiliary(s, SU2, grid)
    st_ = solution_state(0.5, [1, 0], tr, s, rep)
    H = assemble(rep, s, 0.0)
    for i in (25, 100):
        ref = expm(-1j * H * grid[i]) @ st_.psi[0]
        assert fidelity(ref, st_.psi[i]) > 1 - 1e-8
        assert abs(np.vdot(ref, st_.psi[i]) - 1) < 1e-8


def test_solution_schrodinger_residual():
    rep = su2_spin_rep(1)
    s = smooth_sched()
    grid = np.linspace(0, 4, 4001)
    tr = solve_auxiliary(s, SU2, grid)
    st_ = solution_state(1.0, [1, 0, 0], tr, s, rep)
    assert schrodinger_residual(st_.psi, lambda t: assemble(rep, s, t), grid) < 1e-5


def test_solution_rejects_non_eigenvector():
    rep = su2_spin_rep(0.5)
    s = const_sched(1.0, 0.5, 0.0)
    tr = solve_auxiliary(s, SU2, np.linspace(0, 1, 11))
    with pytest.raises(InvalidArgument):
        solution_state(0.5, [1, 1], tr, s, rep)


def test_general_solution():
    rep = su2_spin_rep(0.5)
    s = smooth_sched()
    grid = np.linspace(0, 4, 401)
    tr = solve_auxiliary(s, SU2, grid)
    up = solution_state(0.5, [1, 0], tr, s, rep)
    down = solution_state(-0.5, [0, 1], tr, s, rep)
    np.testing.assert_array_equal(general_solution([1], [up]), up.psi)
    c = np.array([1, 1j]) / math.sqrt(2)
    psi = general_solution(c, [up, down])
    prop = timeordered_propagator(lambda t: assemble(rep, s, t), grid, substeps=4, estimate_order=False)
    assert fidelity(prop.U[-1] @ psi[0], psi[-1]) > 1 - 1e-6
    overlaps = np.abs(np.einsum("td,td->t", up.psi.conj(), down.psi))
    assert overlaps.max() < 1e-8
    with pytest.raises(InvalidArgument):
        general_solution([1, 1], [up, down])
    with pytest.raises(InvalidArgument):
        general_solution([1, 0], [up, up])


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0.0, math.pi - 0.01), b=st.floats(-3, 3), twice_j=st.integers(1, 4))
def test_iv_equals_c_property(a, b, twice_j):
    assert iv_deviation(su2_spin_rep(twice_j / 2), AuxiliaryState(a, b)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(alpha=st.floats(0.0, 0.8), b=st.floats(-3, 3))
def test_iv_equals_c_hyperbolic_property(alpha, b):
    assert iv_deviation(su11_one_mode_rep(48), AuxiliaryState(alpha, b)) < 1e-9


@settings(max_examples=15, deadline=None)
@given(lam_scale=st.sampled_from([0.5, 1.0, 1.5]), th=st.floats(0.2, 1.4), w=st.floats(0.5, 2.0))
def test_phases_linear_in_lambda(lam_scale, th, w):
    s = CoefficientSchedule(constant(w), constant(th), lambda t: 0.3 * np.asarray(t, dtype=float), 0.0, 2.0)
    tr = solve_auxiliary(s, SU2, np.linspace(0, 2, 201))
    p1, p2 = phases(lam_scale, s, tr), phases(2 * lam_scale, s, tr)
    np.testing.assert_allclose(p2.phi_g, 2 * p1.phi_g, rtol=1e-14, atol=1e-15)
    np.testing.assert_allclose(p2.phi_d, 2 * p1.phi_d, rtol=1e-14, atol=1e-15)


def test_hyperbolic_berry_sign():
    # the solid angle formula continues to cos(i alpha) = cosh(alpha)
    assert berry_limit(0.25, SU11, 0.5j).real == pytest.approx(0.25 * 2 * math.pi * (1 - math.cosh(0.5)))
