"""Three-generator Lie algebras and their finite matrix representations.

Every algebra here is fixed by two structure constants ``(m, n)``::

    [A, B] = n C,    [C, A] = m A,    [C, B] = -m B

SU(2) realizations use ``(m, n) = (1, 2)`` and SU(1,1) realizations use
``(1, -2)``.  Representations carry dense complex matrices.  Fock-space
realizations of SU(1,1) are necessarily truncated; for those the closure
relations only hold on the first ``interior_dim`` basis states.

Basis ordering is deterministic: Fock ladders ascend in quantum number, spin
bases descend in the eigenvalue of ``C``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidArgument

CLOSURE_TOL = 1e-12


@dataclass(frozen=True)
class AlgebraSpec:
    """Structure constants of a three-generator algebra."""

    name: str
    m: float
    n: float

    def __post_init__(self):
        if self.m == 0 or self.n == 0:
            raise InvalidArgument(
                f"degenerate algebra {self.name!r}: m={self.m}, n={self.n}"
            )

    @property
    def compact(self) -> bool:
        """True when mn > 0 (SU(2)-like); False for SU(1,1)-like algebras."""
        return self.m * self.n > 0


SU2 = AlgebraSpec("su2", 1.0, 2.0)
SU11 = AlgebraSpec("su11", 1.0, -2.0)


def _frozen(mat) -> np.ndarray:
    out = np.array(mat, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Representation:
    """Concrete matrices ``A, B, C`` for an :class:`AlgebraSpec`.

    Attributes
    ----------
    truncated:
        Whether the matrices are a cutoff of an infinite-dimensional
        representation.
    interior_dim:
        Leading block on which the commutation relations hold exactly.
    protected_dim:
        Leading block on which finite transformations (exponentials of the
        raising/lowering combination) agree with the untruncated algebra to
        machine precision for moderate squeezing.  Equals ``dim`` for exact
        representations.
    conserved:
        Eigenvalue of the conserved number-like generator on this subspace,
        when the representation lives in one (Schwinger and two-mode ladders).
    labels:
        Human-readable basis labels, in basis order.
    """

    spec: AlgebraSpec
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    truncated: bool = False
    interior_dim: int | None = None
    protected_dim: int | None = None
    conserved: float | None = None
    labels: tuple = field(default=())

    def __post_init__(self):
        for name in ("A", "B", "C"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        d = self.A.shape[0]
        if self.A.shape != (d, d) or self.B.shape != (d, d) or self.C.shape != (d, d):
            raise InvalidArgument("generator matrices must be square and equal-sized")
        if self.interior_dim is None:
            object.__setattr__(self, "interior_dim", d)
        if self.protected_dim is None:
            object.__setattr__(self, "protected_dim", self.interior_dim)
        if not self.truncated and self.interior_dim != d:
            raise InvalidArgument("untruncated representation must close on the whole space")
        if not 1 <= self.interior_dim <= d or not 1 <= self.protected_dim <= d:
            raise InvalidArgument("interior/protected dimension out of range")

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def norm_scale(self) -> float:
        return max(1.0, *(np.linalg.norm(M) for M in (self.A, self.B, self.C)))

    def hermitian_paired(self, tol: float = 1e-14) -> bool:
        """``B == A†`` and ``C == C†``."""
        return (
            np.abs(self.B - self.A.conj().T).max() <= tol
            and np.abs(self.C - self.C.conj().T).max() <= tol
        )

    def replace(self, **changes) -> "Representation":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class ClosureReport:
    """Commutator residual norms on the interior block.

    ``residuals`` holds the Frobenius norms of ``[A,B] - nC``,
    ``[C,A] - mA`` and ``[C,B] + mB``.  ``passed`` compares each against
    ``tol * scale`` where ``scale = max(1, |A|, |B|, |C|)``.
    """

    residuals: tuple[float, float, float]
    scale: float
    tol: float
    interior_dim: int
    passed: bool

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def annihilation(dim: int) -> np.ndarray:
    """Truncated bosonic lowering operator on Fock states ``0 .. dim-1``."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def _half_integer(j) -> Fraction:
    try:
        twice = Fraction(j) * 2
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"spin must be a half-integer, got {j!r}") from exc
    if twice.denominator != 1 or twice < 0:
        raise InvalidArgument(f"spin must be a non-negative half-integer, got {j!r}")
    return Fraction(j)


def su2_spin_rep(j) -> Representation:
    """Spin-``j`` matrices ``(J+, J-, J3)`` in the ``|j, m>`` basis, m descending."""
    jf = _half_integer(j)
    d = int(2 * jf) + 1
    jv = float(jf)
    ms = jv - np.arange(d)
    jp = np.zeros((d, d), dtype=complex)
    for i in range(1, d):
        jp[i - 1, i] = np.sqrt(jv * (jv + 1) - ms[i] * (ms[i] + 1))
    labels = tuple(f"|{jf},{Fraction(m).limit_denominator(2)}>" for m in ms)
    return Representation(SU2, jp, jp.T.copy(), np.diag(ms), labels=labels)


def schwinger_su2_rep(n1_plus_n2: int) -> Representation:
    """Two-mode Schwinger realization on the fixed total-quanta subspace.

    ``A = a1† a2``, ``B = a2† a1``, ``C = (a1†a1 - a2†a2)/2``; the basis is
    ``|n, 0>, |n-1, 1>, ..., |0, n>`` so ``C`` descends.  The conserved
    ``N = (a1†a1 + a2†a2)/2`` takes the value ``n/2`` here.
    """
    if int(n1_plus_n2) != n1_plus_n2 or n1_plus_n2 < 0:
        raise InvalidArgument(f"total quanta must be a non-negative integer, got {n1_plus_n2!r}")
    total = int(n1_plus_n2)
    d = total + 1
    n1 = total - np.arange(d)
    n2 = np.arange(d)
    A = np.zeros((d, d), dtype=complex)
    for i in range(1, d):
        # a1† a2 |n1, n2> = sqrt((n1+1) n2) |n1+1, n2-1>
        A[i - 1, i] = np.sqrt((n1[i] + 1) * n2[i])
    C = np.diag(0.5 * (n1 - n2))
    labels = tuple(f"|{p},{q}>" for p, q in zip(n1, n2))
    return Representation(SU2, A, A.T.copy(), C, conserved=0.5 * total, labels=labels)


def _check_cutoff(cutoff):
    if int(cutoff) != cutoff or cutoff < 4:
        raise InvalidArgument(f"cutoff must be an integer >= 4, got {cutoff!r}")
    return int(cutoff)


def su11_two_mode_rep(n1_minus_n2: int, cutoff: int) -> Representation:
    """Two-mode SU(1,1) ladder ``K+ = a1†a2†``, ``K- = a1 a2``,
    ``K3 = (a1 a1† + a2† a2)/2`` at fixed ``n1 - n2``, truncated to ``cutoff`` rungs."""
    cutoff = _check_cutoff(cutoff)
    if int(n1_minus_n2) != n1_minus_n2:
        raise InvalidArgument("n1 - n2 must be an integer")
    diff = int(n1_minus_n2)
    r = np.arange(cutoff)
    n2 = r + max(0, -diff)
    n1 = n2 + diff
    A = np.zeros((cutoff, cutoff), dtype=complex)
    for i in range(cutoff - 1):
        A[i + 1, i] = np.sqrt((n1[i] + 1) * (n2[i] + 1))
    C = np.diag(0.5 * (n1 + 1 + n2))
    labels = tuple(f"|{p},{q}>" for p, q in zip(n1, n2))
    return Representation(
        SU11, A, A.T.copy(), C,
        truncated=True, interior_dim=cutoff - 1, protected_dim=max(1, cutoff // 4),
        conserved=0.5 * diff, labels=labels,
    )


def su11_one_mode_rep(cutoff: int, parity: str = "even") -> Representation:
    """Single-mode SU(1,1): ``K+ = a†²/2``, ``K- = a²/2``, ``K3 = (a†a + 1/2)/2``
    on the even or odd Fock ladder, truncated to ``cutoff`` rungs."""
    cutoff = _check_cutoff(cutoff)
    if parity not in ("even", "odd"):
        raise InvalidArgument(f"parity must be 'even' or 'odd', got {parity!r}")
    n = 2 * np.arange(cutoff) + (parity == "odd")
    A = np.zeros((cutoff, cutoff), dtype=complex)
    for i in range(cutoff - 1):
        A[i + 1, i] = 0.5 * np.sqrt((n[i] + 1) * (n[i] + 2))
    C = np.diag(0.5 * (n + 0.5))
    return Representation(
        SU11, A, A.T.copy(), C,
        truncated=True, interior_dim=cutoff - 1, protected_dim=max(1, cutoff // 4),
        labels=tuple(f"|{k}>" for k in n),
    )


def two_level_rep() -> Representation:
    """Atomic transition operators ``|1><2|, |2><1|, (|1><1| - |2><2|)/2``."""
    A = np.array([[0, 1], [0, 0]], dtype=complex)
    C = np.diag([0.5, -0.5])
    return Representation(SU2, A, A.T.copy(), C, labels=("|1>", "|2>"))


def verify_closure(rep: Representation, tol: float = CLOSURE_TOL) -> ClosureReport:
    if tol <= 0:
        raise InvalidArgument("tol must be positive")
    A, B, C = rep.A, rep.B, rep.C
    m, n = rep.spec.m, rep.spec.n
    k = rep.interior_dim
    blocks = (
        A @ B - B @ A - n * C,
        C @ A - A @ C - m * A,
        C @ B - B @ C + m * B,
    )
    residuals = tuple(float(np.linalg.norm(R[:k, :k])) for R in blocks)
    scale = rep.norm_scale
    return ClosureReport(
        residuals=residuals,
        scale=scale,
        tol=tol,
        interior_dim=k,
        passed=all(r <= tol * scale for r in residuals),
    )
