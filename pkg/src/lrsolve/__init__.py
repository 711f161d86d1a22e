"""Exact solutions of time-dependent Lie-algebraic Hamiltonians.

The Hamiltonians are linear combinations of three generators ``A``, ``B``,
``C`` closing under ``[A, B] = nC``, ``[C, A] = mA``, ``[C, B] = -mB``.
A Hermitian invariant built from the same generators is diagonalized by a
unitary transformation; its eigenvectors, multiplied by a dynamical and a
geometric phase, are particular solutions of the Schrodinger equation.

Every solution can be checked against a brute-force time-ordered
propagator (:mod:`lrsolve.oracle`).
"""

from .algebra import (
    SU2,
    SU11,
    AlgebraSpec,
    Representation,
    schwinger_su2_rep,
    su2_spin_rep,
    su11_one_mode_rep,
    su11_two_mode_rep,
    two_level_rep,
    verify_closure,
)
from .catalog import ModelPreset, list_models
from .errors import (
    ContinuationError,
    DegenerateParameterization,
    DomainError,
    HyperbolicRegimeError,
    IntegrationAccuracyError,
    InvalidArgument,
    SingularityError,
    TransformationError,
    UnsupportedTermError,
)
from .evolution import PhaseDecomposition, SolutionState, phases, solution_state, unitary_V
from .hamiltonian import CoefficientSchedule, assemble
from .invariant import AuxiliaryTrajectory, invariant_matrix, kappa_constants, solve_auxiliary
from .oracle import timeordered_propagator
from .scenarios import run_preset, run_susy
from .susy_jc import SusyJCConfig, susy_solution

__version__ = "0.1.0"
