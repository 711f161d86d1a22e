"""Coefficient schedules and Hamiltonian assembly.

A schedule supplies the overall frequency ``omega(t)``, the polar angle
``theta(t)`` in ``[0, pi]``, the azimuth ``phi(t)`` and an optional c-number
shift ``c0(t)``.  The Hamiltonian is::

    H(t) = omega { sin(theta)/2 e^{-i phi} A + sin(theta)/2 e^{i phi} B + cos(theta) C } + c0

Physical models are usually written with explicit frequencies and a complex
coupling ``g``; the ``parameterize_*`` and :func:`split_conserved` helpers
turn those into schedules.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .algebra import Representation
from .errors import (
    DegenerateParameterization,
    DomainError,
    HyperbolicRegimeError,
    InvalidArgument,
)

TimeFunction = Callable[[float], float]

# Slack for RK4 stages and finite-difference probes landing just outside the interval.
_DOMAIN_SLACK = 1e-9


def _zero(t):
    return 0.0 * np.asarray(t, dtype=float)


@dataclass(frozen=True)
class CoefficientSchedule:
    omega: TimeFunction
    theta: TimeFunction
    phi: TimeFunction
    t_start: float
    t_end: float
    c0: TimeFunction = field(default=_zero)

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise InvalidArgument("schedule needs t_end > t_start")

    def check_time(self, t: float) -> None:
        span = self.t_end - self.t_start
        if t < self.t_start - _DOMAIN_SLACK * span or t > self.t_end + _DOMAIN_SLACK * span:
            raise DomainError(f"t={t} outside [{self.t_start}, {self.t_end}]")

    def angles(self, t):
        """``(omega, theta, phi)`` at ``t`` as floats."""
        return float(self.omega(t)), float(self.theta(t)), float(self.phi(t))

    def with_c0(self, c0: TimeFunction) -> "CoefficientSchedule":
        return replace(self, c0=c0)


def assemble(rep: Representation, sched: CoefficientSchedule, t: float) -> np.ndarray:
    sched.check_time(t)
    w, th, ph = sched.angles(t)
    s = 0.5 * np.sin(th)
    H = w * (s * np.exp(-1j * ph) * rep.A + s * np.exp(1j * ph) * rep.B + np.cos(th) * rep.C)
    return H + float(sched.c0(t)) * np.eye(rep.dim)


# ---------------------------------------------------------------------------
# Scalar time-function builders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScheduleBuilder:
    """Declarative recipe for one real time function.

    ``kind`` is one of ``constant`` (``value``), ``linear-ramp``
    (``start``, ``end``; linear across the schedule interval),
    ``sinusoidal-sweep`` (``offset``, ``amplitude``, ``period``, optional
    ``phase``) or ``tabulated`` (``times``, ``values``; cubic spline).
    """

    kind: str
    params: dict

    KINDS = ("constant", "linear-ramp", "sinusoidal-sweep", "tabulated")

    @classmethod
    def from_mapping(cls, spec) -> "ScheduleBuilder":
        if isinstance(spec, (int, float)):
            return cls("constant", {"value": float(spec)})
        if not isinstance(spec, dict) or "kind" not in spec:
            raise InvalidArgument(f"schedule entry needs a 'kind': {spec!r}")
        params = {k: v for k, v in spec.items() if k != "kind"}
        return cls(spec["kind"], params)

    def build(self, t_start: float, t_end: float) -> TimeFunction:
        p = self.params
        try:
            if self.kind == "constant":
                return constant(p["value"])
            if self.kind == "linear-ramp":
                return linear_ramp(p["start"], p["end"], t_start, t_end)
            if self.kind == "sinusoidal-sweep":
                return sinusoid(p["offset"], p["amplitude"], p["period"], p.get("phase", 0.0))
            if self.kind == "tabulated":
                return tabulated(p["times"], p["values"])
        except KeyError as exc:
            raise InvalidArgument(f"{self.kind} schedule missing parameter {exc}") from None
        raise InvalidArgument(f"unknown schedule kind {self.kind!r}; expected one of {self.KINDS}")


def constant(value: float) -> TimeFunction:
    value = float(value)

    def f(t):
        if isinstance(t, float):
            return value
        return value + _zero(t)

    return f


def linear_ramp(start: float, end: float, t_start: float, t_end: float) -> TimeFunction:
    start, end = float(start), float(end)
    rate = (end - start) / (t_end - t_start)

    def f(t):
        return start + rate * (np.asarray(t, dtype=float) - t_start)

    return f


def sinusoid(offset: float, amplitude: float, period: float, phase: float = 0.0) -> TimeFunction:
    if period == 0:
        raise InvalidArgument("sinusoid period must be non-zero")
    nu = 2 * np.pi / float(period)
    offset, amplitude, phase = float(offset), float(amplitude), float(phase)

    def f(t):
        return offset + amplitude * np.sin(nu * np.asarray(t, dtype=float) + phase)

    return f


def tabulated(times, values) -> TimeFunction:
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or len(times) < 2:
        raise InvalidArgument("tabulated schedule needs matching 1-d times/values")
    if np.any(np.diff(times) <= 0):
        raise InvalidArgument("tabulated times must be strictly increasing")
    spline = CubicSpline(times, values)

    def f(t):
        return spline(t)

    f.derivative = spline.derivative()
    return f


def complex_function(re: TimeFunction, im: TimeFunction | None = None):
    if im is None:
        return lambda t: re(t) + 0j
    return lambda t: re(t) + 1j * im(t)


# ---------------------------------------------------------------------------
# Physical-model parameterizations
# ---------------------------------------------------------------------------

def _check_grid(t_start, t_end, grid):
    if grid is None:
        grid = np.linspace(t_start, t_end, 257)
    return np.asarray(grid, dtype=float)


def _angles_from_components(diag_coeff, raise_coeff):
    """Solve ``omega cos(theta) = diag``, ``omega sin(theta)/2 e^{-i phi} = raise``."""

    def omega(t):
        return np.sqrt(np.asarray(diag_coeff(t)) ** 2 + 4 * np.abs(raise_coeff(t)) ** 2)

    def theta(t):
        # arctan2 keeps small tilts accurate where arccos(d / omega) would not
        d = np.asarray(diag_coeff(t), dtype=float)
        return np.arctan2(2 * np.abs(raise_coeff(t)), d)

    def phi(t):
        r = np.asarray(raise_coeff(t))
        # e^{-i phi} = r/|r|; phi = 0 by convention where the coupling vanishes
        return np.where(np.abs(r) > 0, -np.angle(r), 0.0)

    return omega, theta, phi


def parameterize_su2_coupled_oscillators(
    omega1: TimeFunction,
    omega2: TimeFunction,
    g,
    t_start: float,
    t_end: float,
    n1_plus_n2: int | None = None,
    grid=None,
) -> CoefficientSchedule:
    """Angles for ``w1 a1†a1 + w2 a2†a2 + g a1†a2 + g* a2†a1``.

    The Lie part is ``g J+ + g* J- + (w1 - w2) J3``.  When ``n1_plus_n2`` is
    given the conserved-number shift ``(n1+n2)/2 (w1 + w2)`` is attached as
    ``c0``.
    """
    diag = lambda t: omega1(t) - omega2(t)  # noqa: E731
    omega, theta, phi = _angles_from_components(diag, g)
    if np.any(omega(_check_grid(t_start, t_end, grid)) <= 0):
        raise DegenerateParameterization("omega vanishes: w1 == w2 and g == 0 somewhere on the grid")
    sched = CoefficientSchedule(omega, theta, phi, t_start, t_end)
    if n1_plus_n2 is not None:
        if n1_plus_n2 < 0:
            raise InvalidArgument("n1 + n2 cannot be negative")
        nval = 0.5 * n1_plus_n2
        sched = sched.with_c0(lambda t: nval * (np.asarray(omega1(t)) + np.asarray(omega2(t))))
    return sched


def parameterize_su11_coupled_oscillators(
    omega1: TimeFunction,
    omega2: TimeFunction,
    g,
    t_start: float,
    t_end: float,
    grid=None,
) -> CoefficientSchedule:
    """Angles for the Lie part ``g K- + g* K+ + (w1 + w2) K3``; elliptic regime only."""
    diag = lambda t: omega1(t) + omega2(t)  # noqa: E731
    raise_coeff = lambda t: np.conj(g(t))  # noqa: E731
    ts = _check_grid(t_start, t_end, grid)
    gap = np.asarray(diag(ts)) ** 2 - 4 * np.abs(g(ts)) ** 2
    if np.any(gap <= 0):
        bad = ts[np.argmax(gap <= 0)]
        raise HyperbolicRegimeError(
            f"(w1 + w2)^2 <= 4|g|^2 at t={bad:g}; only the elliptic regime is supported"
        )
    omega, theta, phi = _angles_from_components(diag, raise_coeff)
    return CoefficientSchedule(omega, theta, phi, t_start, t_end)


def split_conserved(model: str, omega1, omega2, g, subspace_eigenvalue: float,
                    t_start: float = 0.0, t_end: float = 1.0, grid=None):
    """Separate the conserved-generator c-number from a coupled-oscillator model.

    Returns ``(lie_schedule, c0)`` where ``lie_schedule`` has ``c0 = 0``.  For
    ``su2-coupled`` the eigenvalue is ``(n1+n2)/2`` and
    ``c0 = (n1+n2)/2 (w1 + w2)``.  For ``su11-coupled`` it is ``(n1-n2)/2`` and
    ``c0 = (n1-n2)/2 (w1 - w2) - (w1 + w2)/2``.
    """
    twice = 2 * subspace_eigenvalue
    if abs(twice - round(twice)) > 1e-12:
        raise InvalidArgument(f"eigenvalue {subspace_eigenvalue} is not a half-integer")
    nval = float(subspace_eigenvalue)
    if model == "su2-coupled":
        if nval < 0:
            raise InvalidArgument("the total-number eigenvalue (n1+n2)/2 cannot be negative")
        lie = parameterize_su2_coupled_oscillators(omega1, omega2, g, t_start, t_end, grid=grid)

        def c0(t):
            return nval * (np.asarray(omega1(t)) + np.asarray(omega2(t)))

    elif model == "su11-coupled":
        lie = parameterize_su11_coupled_oscillators(omega1, omega2, g, t_start, t_end, grid=grid)

        def c0(t):
            w1, w2 = np.asarray(omega1(t)), np.asarray(omega2(t))
            return nval * (w1 - w2) - 0.5 * (w1 + w2)

    else:
        raise InvalidArgument(f"unknown model {model!r}; expected su2-coupled or su11-coupled")
    return lie, c0
