import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrsolve.algebra import (
    SU2,
    SU11,
    AlgebraSpec,
    schwinger_su2_rep,
    su2_spin_rep,
    su11_one_mode_rep,
    su11_two_mode_rep,
    two_level_rep,
    verify_closure,
)
from lrsolve.errors import InvalidArgument


def comm(X, Y):
    return X @ Y - Y @ X


def test_spin_half_matrices():
    rep = su2_spin_rep(0.5)
    assert rep.spec == SU2
    np.testing.assert_array_equal(rep.C, np.diag([0.5, -0.5]))
    np.testing.assert_array_equal(rep.A, [[0, 1], [0, 0]])
    assert np.abs(comm(rep.A, rep.B) - 2 * rep.C).max() == 0.0
    assert not rep.truncated


def test_spin_one_spectrum():
    rep = su2_spin_rep(1)
    assert rep.dim == 3
    np.testing.assert_allclose(np.linalg.eigvalsh(rep.C), [-1, 0, 1], atol=1e-15)


@pytest.mark.parametrize("j", [0.3, -0.5, 1.25])
def test_spin_rejects_bad_j(j):
    with pytest.raises(InvalidArgument):
        su2_spin_rep(j)


def test_schwinger_one_quantum_matches_spin_half():
    rep = schwinger_su2_rep(1)
    ref = su2_spin_rep(0.5)
    np.testing.assert_allclose(np.linalg.eigvalsh(rep.C), np.linalg.eigvalsh(ref.C), atol=1e-15)
    assert np.abs(comm(rep.A, rep.B) - 2 * rep.C).max() < 1e-15
    assert rep.conserved == 0.5


def test_schwinger_two_quanta():
    rep = schwinger_su2_rep(2)
    assert rep.dim == 3
    np.testing.assert_allclose(np.sort(np.diag(rep.C).real), [-1, 0, 1], atol=1e-15)


def test_schwinger_vacuum_is_trivial():
    rep = schwinger_su2_rep(0)
    assert rep.dim == 1
    assert np.all(rep.A == 0) and np.all(rep.B == 0) and np.all(rep.C == 0)


def test_schwinger_rejects_negative():
    with pytest.raises(InvalidArgument):
        schwinger_su2_rep(-1)


def test_su11_two_mode_ladder():
    rep = su11_two_mode_rep(0, 6)
    c = np.diag(rep.C).real
    np.testing.assert_allclose(np.diff(c), 1.0)
    assert rep.spec == SU11 and rep.truncated and rep.interior_dim == 5
    report = verify_closure(rep, tol=1e-10)
    assert report.passed
    full = np.linalg.norm(comm(rep.A, rep.B) + 2 * rep.C)
    assert full > 0


def test_su11_one_mode_even_ladder():
    rep = su11_one_mode_rep(8)
    np.testing.assert_allclose(np.diag(rep.C).real[:4], [0.25, 1.25, 2.25, 3.25])
    k = rep.interior_dim
    assert np.abs((comm(rep.C, rep.A) - rep.A)[:k, :k]).max() < 1e-12
    assert verify_closure(rep).passed


@pytest.mark.parametrize("make", [lambda: su11_two_mode_rep(0, 3), lambda: su11_one_mode_rep(2)])
def test_su11_rejects_small_cutoff(make):
    with pytest.raises(InvalidArgument):
        make()


def test_two_level():
    rep = two_level_rep()
    spin = su2_spin_rep(0.5)
    assert np.abs(comm(rep.A, rep.B) - 2 * rep.C).max() == 0.0
    for X, Y in ((rep.A, spin.A), (rep.B, spin.B), (rep.C, spin.C)):
        np.testing.assert_array_equal(X, Y)
    np.testing.assert_array_equal(rep.C @ rep.C, np.eye(2) / 4)


def test_closure_detects_corruption():
    rep = su2_spin_rep(1.5)
    # sqrt(3) entries leave only rounding
    assert verify_closure(rep).max_residual < 1e-14
    bad = rep.replace(A=2 * rep.A)
    report = verify_closure(bad)
    assert not report.passed
    # [2A, B] - nC = nC
    np.testing.assert_allclose(report.residuals[0], np.linalg.norm(2 * rep.C), rtol=1e-12)


def test_degenerate_spec():
    with pytest.raises(InvalidArgument):
        AlgebraSpec("flat", 0.0, 2.0)


@pytest.mark.parametrize("rep", [
    su2_spin_rep(0.5), su2_spin_rep(2), schwinger_su2_rep(3), two_level_rep(),
    su11_two_mode_rep(1, 20), su11_one_mode_rep(20), su11_one_mode_rep(20, parity="odd"),
])
def test_shipped_reps_are_hermitian_paired_with_real_spectrum(rep):
    assert rep.hermitian_paired()
    assert verify_closure(rep).passed
    assert np.abs(np.linalg.eigvals(rep.C).imag).max() < 1e-14


@settings(max_examples=25, deadline=None)
@given(twice_j=st.integers(0, 12))
def test_spin_closure_property(twice_j):
    rep = su2_spin_rep(twice_j / 2)
    assert rep.dim == twice_j + 1
    assert verify_closure(rep).passed


@settings(max_examples=20, deadline=None)
@given(diff=st.integers(-5, 5), cutoff=st.integers(4, 40))
def test_su11_two_mode_closure_property(diff, cutoff):
    rep = su11_two_mode_rep(diff, cutoff)
    assert verify_closure(rep).passed
