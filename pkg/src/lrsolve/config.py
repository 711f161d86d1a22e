"""Scenario configuration files.

Configs are TOML.  A minimal spin scenario::

    model = "spin"
    seed = 0

    [params]
    j = 0.5

    [schedule]
    omega = 1.0
    theta = {kind = "linear-ramp", start = 0.4, end = 1.1}
    phi = {kind = "sinusoidal-sweep", offset = 0.0, amplitude = 0.5, period = 6.0}

    [grid]
    t_start = 0.0
    t_end = 5.0
    steps = 500

Each schedule entry is a number (constant) or a table with a ``kind`` of
``constant``, ``linear-ramp``, ``sinusoidal-sweep`` or ``tabulated``.  The
complex coupling ``g`` is either such an entry (real) or a table with ``re``
and ``im`` entries.  Optional sections: ``[initial]`` (``a0``/``b0``, or
``c_re``/``c_im``/``b`` for ``susy-jc``), ``[solve]`` (``lambdas`` = ``"all"``
or a list, ``substeps``), ``[tolerances]``, ``[oracle]`` (``substeps``),
``[outputs]`` (file names).  The ``berry`` subcommand reads only a
``[berry]`` table; see :func:`load_berry_config`.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import catalog, susy_jc
from .errors import InvalidArgument
from .hamiltonian import ScheduleBuilder, complex_function

MODEL_SCHEDULES = {
    "spin": ("omega", "theta", "phi"),
    "su2-oscillators": ("omega1", "omega2", "g"),
    "su11-oscillators": ("omega1", "omega2", "g"),
    "gho": ("X", "Y", "Z"),
    "two-level": ("omega0", "g"),
    "susy-jc": ("omega", "omega0", "g"),
}

DEFAULT_TOLERANCES = {
    "invariant_residual": 1e-7,
    "fidelity": 1e-6,
    "phase": 1e-4,
    "iv": 1e-8,
    "hv_offdiagonal": 1e-5,
    "conservation": 1e-8,
    "berry": 1e-3,
}

DEFAULT_OUTPUTS = {
    "phases": "phases.csv",
    "states": "states.csv",
    "report": "report.txt",
    "berry": "berry.csv",
}

DEFAULT_BERRY = {
    "theta": 0.5235987755982988,
    "omega": 1.0,
    "j": 0.5,
    "periods": [125.66370614359172, 1256.6370614359173, 12566.370614359172],
    "steps_per_unit": 10.0,
}


class ConfigError(InvalidArgument):
    """The configuration file is unreadable or inconsistent."""


@dataclass(frozen=True)
class ScenarioConfig:
    model: str
    params: dict
    schedule: dict
    t_start: float
    t_end: float
    steps: int
    initial: dict = field(default_factory=dict)
    lambdas: object = "all"
    substeps: int = 1
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    oracle_substeps: int = 4
    outputs: dict = field(default_factory=lambda: dict(DEFAULT_OUTPUTS))
    seed: int = 0

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps + 1)


def _number(section, key, default=None, kind=float):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key!r} must be a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(f"{key!r} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def parse_config(data: dict) -> ScenarioConfig:
    model = data.get("model")
    if model not in MODEL_SCHEDULES:
        raise ConfigError(f"unknown model {model!r}; expected one of {sorted(MODEL_SCHEDULES)}")
    grid = data.get("grid", {})
    t_start = _number(grid, "t_start", 0.0)
    t_end = _number(grid, "t_end")
    steps = _number(grid, "steps", kind=int)
    if steps < 8:
        raise ConfigError("grid.steps must be at least 8")
    if not t_end > t_start:
        raise ConfigError("grid.t_end must exceed grid.t_start")
    schedule = data.get("schedule", {})
    missing = [k for k in MODEL_SCHEDULES[model] if k not in schedule]
    if missing:
        raise ConfigError(f"model {model!r} needs schedule entries {missing}")
    tolerances = dict(DEFAULT_TOLERANCES)
    for key, value in data.get("tolerances", {}).items():
        if key not in tolerances:
            raise ConfigError(f"unknown tolerance {key!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError(f"tolerance {key!r} must be a positive number")
        tolerances[key] = float(value)
    outputs = dict(DEFAULT_OUTPUTS)
    outputs.update({k: str(v) for k, v in data.get("outputs", {}).items()})
    solve = data.get("solve", {})
    lambdas = solve.get("lambdas", "all")
    if lambdas != "all" and not (isinstance(lambdas, list) and lambdas
                                 and all(isinstance(v, (int, float)) for v in lambdas)):
        raise ConfigError("solve.lambdas must be \"all\" or a non-empty list of numbers")
    substeps = _number(solve, "substeps", 1, kind=int)
    oracle_substeps = _number(data.get("oracle", {}), "substeps", 4, kind=int)
    if substeps < 1 or oracle_substeps < 1:
        raise ConfigError("substeps must be positive")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    return ScenarioConfig(
        model=model,
        params=dict(data.get("params", {})),
        schedule=dict(schedule),
        t_start=t_start,
        t_end=t_end,
        steps=steps,
        initial=dict(data.get("initial", {})),
        lambdas=lambdas,
        substeps=substeps,
        tolerances=tolerances,
        oracle_substeps=oracle_substeps,
        outputs=outputs,
        seed=seed,
    )


def load_config(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    return parse_config(data)


@dataclass(frozen=True)
class BerryConfig:
    theta: float
    omega: float
    j: float
    lam: float
    periods: tuple
    steps_per_unit: float
    tolerance: float
    output: str


def load_berry_config(path) -> BerryConfig:
    """The ``[berry]`` table (plus ``[tolerances] berry`` and ``[outputs] berry``)."""
    try:
        data = tomllib.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    section = dict(DEFAULT_BERRY)
    section.update(data.get("berry", {}))
    periods = section["periods"]
    if not isinstance(periods, list) or not periods or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0 for v in periods):
        raise ConfigError("berry.periods must be a non-empty list of positive numbers")
    j = _number(section, "j")
    tol = _number(data.get("tolerances", {}), "berry", DEFAULT_TOLERANCES["berry"])
    if tol <= 0:
        raise ConfigError("tolerance 'berry' must be positive")
    return BerryConfig(
        theta=_number(section, "theta"),
        omega=_number(section, "omega"),
        j=j,
        lam=_number(section, "lambda", j),
        periods=tuple(float(v) for v in periods),
        steps_per_unit=_number(section, "steps_per_unit"),
        tolerance=tol,
        output=str(data.get("outputs", {}).get("berry", DEFAULT_OUTPUTS["berry"])),
    )


def _real_function(entry, cfg: ScenarioConfig):
    try:
        return ScheduleBuilder.from_mapping(entry).build(cfg.t_start, cfg.t_end)
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from None


def _complex_function(entry, cfg: ScenarioConfig):
    if isinstance(entry, dict) and "kind" not in entry:
        unknown = set(entry) - {"re", "im"}
        if unknown or "re" not in entry:
            raise ConfigError("a complex schedule needs 're' and optionally 'im'")
        im = _real_function(entry["im"], cfg) if "im" in entry else None
        return complex_function(_real_function(entry["re"], cfg), im)
    return complex_function(_real_function(entry, cfg))


def build_model(cfg: ScenarioConfig):
    """The preset (or SUSY configuration) a scenario describes.

    Model-level domain errors (hyperbolic regime, unsupported terms) are
    reported as :class:`ConfigError`.
    """
    s = cfg.schedule
    p = cfg.params
    span = dict(t_start=cfg.t_start, t_end=cfg.t_end)
    try:
        if cfg.model == "spin":
            return catalog.spin_model(_real_function(s["omega"], cfg), _real_function(s["theta"], cfg),
                                      _real_function(s["phi"], cfg), j=p.get("j", 0.5), **span)
        if cfg.model == "su2-oscillators":
            return catalog.coupled_oscillators_su2(
                _real_function(s["omega1"], cfg), _real_function(s["omega2"], cfg),
                _complex_function(s["g"], cfg), _number(p, "n1_plus_n2", 1, kind=int), **span)
        if cfg.model == "su11-oscillators":
            return catalog.coupled_oscillators_su11(
                _real_function(s["omega1"], cfg), _real_function(s["omega2"], cfg),
                _complex_function(s["g"], cfg), _number(p, "n1_minus_n2", 0, kind=int),
                cutoff=_number(p, "cutoff", 40, kind=int), grid=cfg.grid, **span)
        if cfg.model == "gho":
            return catalog.general_harmonic_oscillator(
                _real_function(s["X"], cfg), _real_function(s["Y"], cfg), _real_function(s["Z"], cfg),
                cutoff=_number(p, "cutoff", 40, kind=int), F=p.get("F", 0.0), grid=cfg.grid, **span)
        if cfg.model == "two-level":
            return catalog.two_level_atom(_real_function(s["omega0"], cfg), _complex_function(s["g"], cfg),
                                          grid=cfg.grid, **span)
        if cfg.model == "susy-jc":
            return susy_jc.SusyJCConfig(
                _number(p, "k", 1, kind=int), _number(p, "m_fock", 0, kind=int),
                _real_function(s["omega"], cfg), _real_function(s["omega0"], cfg),
                _complex_function(s["g"], cfg))
    except ConfigError:
        raise
    except (InvalidArgument, ValueError) as exc:
        raise ConfigError(f"{cfg.model}: {exc}") from None
    raise ConfigError(f"unknown model {cfg.model!r}")


def selected_lambdas(cfg: ScenarioConfig, preset) -> tuple:
    if cfg.lambdas == "all":
        return preset.lambdas
    spectrum = np.real(np.diag(preset.representation.C))
    for lam in cfg.lambdas:
        if not np.any(np.abs(spectrum - lam) < 1e-9):
            raise ConfigError(f"lambda={lam} is not an eigenvalue of C for this model")
    return tuple(float(v) for v in cfg.lambdas)
