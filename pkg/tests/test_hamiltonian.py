import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrsolve.algebra import schwinger_su2_rep, su2_spin_rep, su11_two_mode_rep
from lrsolve.errors import (
    DegenerateParameterization,
    DomainError,
    HyperbolicRegimeError,
    InvalidArgument,
)
from lrsolve.hamiltonian import (
    CoefficientSchedule,
    ScheduleBuilder,
    assemble,
    complex_function,
    constant,
    linear_ramp,
    parameterize_su2_coupled_oscillators,
    parameterize_su11_coupled_oscillators,
    sinusoid,
    split_conserved,
    tabulated,
)


def sched(omega, theta, phi, t_end=1.0, c0=None):
    s = CoefficientSchedule(constant(omega), constant(theta), constant(phi), 0.0, t_end)
    return s if c0 is None else s.with_c0(constant(c0))


def test_polar_schedule_gives_omega_c():
    rep = su2_spin_rep(1)
    H = assemble(rep, sched(1.3, 0.0, 0.7, c0=0.2), 0.5)
    np.testing.assert_allclose(H, 1.3 * rep.C + 0.2 * np.eye(3), atol=1e-15)


def test_equatorial_spin_half_is_jx():
    rep = su2_spin_rep(0.5)
    H = assemble(rep, sched(1.0, math.pi / 2, 0.0), 0.0)
    np.testing.assert_allclose(H, [[0, 0.5], [0.5, 0]], atol=1e-16)


def test_tilted_spin_half_spectrum():
    H = assemble(su2_spin_rep(0.5), sched(1.0, math.pi / 3, math.pi / 4), 0.2)
    assert np.abs(H - H.conj().T).max() < 1e-15
    np.testing.assert_allclose(np.linalg.eigvalsh(H), [-0.5, 0.5], atol=1e-15)


def test_assemble_rejects_out_of_range_time():
    with pytest.raises(DomainError):
        assemble(su2_spin_rep(0.5), sched(1.0, 0.3, 0.0), 2.0)


def test_su2_parameterization_real_coupling():
    s = parameterize_su2_coupled_oscillators(constant(2.0), constant(1.0), complex_function(constant(0.5)),
                                             0.0, 1.0)
    w, th, ph = s.angles(0.3)
    assert w == pytest.approx(math.sqrt(2), abs=1e-15)
    assert math.cos(th) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert ph == pytest.approx(0.0, abs=1e-15)


def test_su2_parameterization_zero_coupling_sets_phi_zero():
    s = parameterize_su2_coupled_oscillators(constant(2.0), constant(1.0), complex_function(constant(0.0)),
                                             0.0, 1.0)
    _, th, ph = s.angles(0.5)
    assert th == 0.0 and ph == 0.0


def test_su2_parameterization_imaginary_coupling():
    # g = w sin(theta) exp(-i phi) / 2 with g = i/2 gives exp(-i phi) = i
    s = parameterize_su2_coupled_oscillators(constant(1.0), constant(1.0),
                                             lambda t: 0.5j + 0 * np.asarray(t), 0.0, 1.0)
    w, th, ph = s.angles(0.0)
    assert w == pytest.approx(1.0) and th == pytest.approx(math.pi / 2)
    assert np.exp(-1j * ph) == pytest.approx(1j, abs=1e-15)


def test_su2_parameterization_degenerate():
    with pytest.raises(DegenerateParameterization):
        parameterize_su2_coupled_oscillators(constant(1.0), constant(1.0), complex_function(constant(0.0)),
                                             0.0, 1.0)


def test_su11_parameterization_rejects_hyperbolic():
    with pytest.raises(HyperbolicRegimeError):
        parameterize_su11_coupled_oscillators(constant(1.0), constant(0.5), complex_function(constant(0.8)),
                                              0.0, 1.0)


def test_split_conserved_su2_equal_frequencies():
    g = complex_function(constant(0.3))
    lie, c0 = split_conserved("su2-coupled", constant(1.0), constant(1.0), g, 1.0)
    assert float(c0(0.4)) == pytest.approx(2.0)
    rep = schwinger_su2_rep(2)
    H = assemble(rep, lie, 0.4)
    c_coeff = np.trace(H @ rep.C).real / np.trace(rep.C @ rep.C).real
    assert abs(c_coeff) < 1e-15


def test_split_conserved_su11_balanced():
    lie, c0 = split_conserved("su11-coupled", constant(1.0), constant(0.8), complex_function(constant(0.1)), 0.0)
    assert float(c0(0.0)) == pytest.approx(-0.9)


def test_split_conserved_rejects_bad_eigenvalue():
    with pytest.raises(InvalidArgument):
        split_conserved("su2-coupled", constant(1.0), constant(0.5), complex_function(constant(0.1)), 0.3)
    with pytest.raises(InvalidArgument):
        split_conserved("su3", constant(1.0), constant(0.5), complex_function(constant(0.1)), 0.5)


def test_split_conserved_zero_coupling_is_diagonal():
    lie, c0 = split_conserved("su2-coupled", constant(1.5), constant(0.5), complex_function(constant(0.0)), 1.0)
    rep = schwinger_su2_rep(2)
    H = assemble(rep, lie.with_c0(c0), 0.3)
    assert np.abs(H - np.diag(np.diag(H))).max() == 0.0


def test_builders():
    assert ScheduleBuilder.from_mapping(2.5).build(0, 1)(0.3) == 2.5
    ramp = ScheduleBuilder.from_mapping({"kind": "linear-ramp", "start": 1.0, "end": 3.0}).build(0.0, 2.0)
    assert float(ramp(1.0)) == pytest.approx(2.0)
    sw = ScheduleBuilder.from_mapping({"kind": "sinusoidal-sweep", "offset": 1, "amplitude": 0.5,
                                       "period": 4.0}).build(0, 1)
    assert float(sw(1.0)) == pytest.approx(1.5)
    tab = ScheduleBuilder.from_mapping({"kind": "tabulated", "times": [0, 1, 2, 3],
                                        "values": [0, 1, 4, 9]}).build(0, 3)
    assert float(tab(1.5)) == pytest.approx(2.25)
    with pytest.raises(InvalidArgument):
        ScheduleBuilder.from_mapping({"kind": "sawtooth"}).build(0, 1)
    with pytest.raises(InvalidArgument):
        ScheduleBuilder.from_mapping({"kind": "linear-ramp", "start": 1.0}).build(0, 1)


def test_tabulated_requires_increasing_times():
    with pytest.raises(InvalidArgument):
        tabulated([0, 2, 1], [0, 1, 2])


angles = st.floats(0.05, math.pi - 0.05)
phases = st.floats(-math.pi, math.pi)


@settings(max_examples=40, deadline=None)
@given(w=st.floats(0.1, 3.0), th=angles, ph=phases, c0=st.floats(-2, 2), twice_j=st.integers(1, 4))
def test_assemble_is_hermitian(w, th, ph, c0, twice_j):
    H = assemble(su2_spin_rep(twice_j / 2), sched(w, th, ph, c0=c0), 0.5)
    assert np.abs(H - H.conj().T).max() <= 1e-12 * max(1.0, np.abs(H).max())


@settings(max_examples=30, deadline=None)
@given(w1=st.floats(0.2, 2.0), w2=st.floats(0.2, 2.0), gr=st.floats(-1, 1), gi=st.floats(-1, 1),
       total=st.integers(1, 4))
def test_su2_parameterization_reproduces_oscillator_matrix(w1, w2, gr, gi, total):
    g = complex(gr, gi)
    if (w1 - w2) ** 2 + 4 * abs(g) ** 2 < 1e-6:
        return
    s = parameterize_su2_coupled_oscillators(constant(w1), constant(w2), lambda t: g + 0 * np.asarray(t),
                                             0.0, 1.0, n1_plus_n2=total)
    rep = schwinger_su2_rep(total)
    target = g * rep.A + np.conj(g) * rep.B + (w1 - w2) * rep.C + 0.5 * total * (w1 + w2) * np.eye(rep.dim)
    np.testing.assert_allclose(assemble(rep, s, 0.5), target, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(w1=st.floats(0.5, 2.0), w2=st.floats(0.5, 2.0), gr=st.floats(-0.2, 0.2), gi=st.floats(-0.2, 0.2),
       diff=st.integers(-2, 2))
def test_su11_split_recombines(w1, w2, gr, gi, diff):
    g = complex(gr, gi)
    lie, c0 = split_conserved("su11-coupled", constant(w1), constant(w2), lambda t: g + 0 * np.asarray(t),
                              0.5 * diff)
    rep = su11_two_mode_rep(diff, 10)
    H = assemble(rep, lie.with_c0(c0), 0.25)
    target = (np.conj(g) * rep.A + g * rep.B + (w1 + w2) * rep.C
              + (0.5 * diff * (w1 - w2) - 0.5 * (w1 + w2)) * np.eye(rep.dim))
    np.testing.assert_allclose(H, target, atol=1e-12)


def test_sinusoid_rejects_zero_period():
    with pytest.raises(InvalidArgument):
        sinusoid(0, 1, 0)


def test_linear_ramp_endpoints():
    f = linear_ramp(1.0, 2.0, 0.0, 4.0)
    assert float(f(0.0)) == 1.0 and float(f(4.0)) == 2.0
