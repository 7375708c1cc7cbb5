"""Run-configuration files: TOML with one section per command, strictly validated.

Unknown sections or keys are rejected with their full path, so a typo in a
sweep config fails fast instead of silently burning compute.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .exceptions import ConfigError

CHERNOFF_BOUNDS = (
    "phase_gate",
    "random_error",
    "dephasing",
    "dephasing_small_eps",
    "classical_phase_gate",
)

SWEEP_VARS = {
    "phase_gate": ("epsilon", "theta"),
    "random_error": ("alpha", "width", "theta"),
    "dephasing": ("tau",),
    "dephasing_small_eps": ("tau",),
    "classical_phase_gate": ("theta", "epsilon"),
}


@dataclass
class SweepRange:
    start: float
    stop: float
    step: float

    def values(self) -> list[float]:
        if self.step <= 0:
            raise ConfigError(f"sweep step must be > 0, got {self.step}")
        if self.stop < self.start:
            raise ConfigError(f"empty sweep range [{self.start}, {self.stop}]")
        out = []
        k = 0
        while True:
            v = self.start + k * self.step
            if v > self.stop + 1e-12 * max(1.0, abs(self.stop)):
                break
            out.append(v)
            k += 1
        if not out:
            raise ConfigError(f"empty sweep range [{self.start}, {self.stop}]")
        return out


@dataclass
class ChernoffConfig:
    bound: str
    sweep_var: str
    sweep: SweepRange
    n_iterations: list[int] = field(default_factory=lambda: [1])
    epsilon: list[float] = field(default_factory=list)
    theta: float = 0.0
    width: float = 0.0
    alpha: float = 1.5707963267948966
    beta: float = 0.0
    quadrature_nodes: int = 64
    out: str | None = None


@dataclass
class CertifyConfig:
    model: str
    x_true: float
    half_width: float
    centers: list[float]
    n0: int = 300
    m: list[int] = field(default_factory=lambda: [1])
    utilities: list[str] = field(default_factory=lambda: ["MI"])
    criteria: list[str] = field(default_factory=lambda: ["MEAN"])
    trials: int = 100
    particles: int = 2000
    prior_low: float = 0.0
    prior_high: float = 1.0
    seed: int = 0
    omega: float = 0.0
    t: float = 5.0
    out: str | None = None


@dataclass
class ConvergenceConfig:
    model: str
    x_true: float
    n0_values: list[int]
    m: list[int] = field(default_factory=lambda: [1])
    utility: str = "MI"
    trials: int = 50
    particles: int = 2000
    prior_low: float = 0.0
    prior_high: float = 1.0
    seed: int = 0
    omega: float = 0.0
    t: float = 5.0
    fit_decades: float = 2.0
    out: str | None = None


def _require(table: dict, section: str, key: str) -> Any:
    if key not in table:
        raise ConfigError(f"[{section}] missing required key '{key}'")
    return table[key]


def _reject_unknown(table: dict, section: str, known: set[str]) -> None:
    unknown = set(table) - known
    if unknown:
        names = ", ".join(sorted(unknown))
        raise ConfigError(f"[{section}] unknown key(s): {names}")


def _typed(value: Any, types, section: str, key: str):
    if isinstance(value, bool) or not isinstance(value, types):
        raise ConfigError(f"[{section}] key '{key}' has wrong type {type(value).__name__}")
    return value


def _float(table: dict, section: str, key: str, default=None) -> float:
    if key not in table:
        if default is None:
            raise ConfigError(f"[{section}] missing required key '{key}'")
        return default
    return float(_typed(table[key], (int, float), section, key))


def _int(table: dict, section: str, key: str, default=None) -> int:
    if key not in table:
        if default is None:
            raise ConfigError(f"[{section}] missing required key '{key}'")
        return default
    return _typed(table[key], int, section, key)


def _str(table: dict, section: str, key: str, default=None) -> str:
    if key not in table:
        if default is None:
            raise ConfigError(f"[{section}] missing required key '{key}'")
        return default
    return _typed(table[key], str, section, key)


def _float_list(table: dict, section: str, key: str, default=None) -> list[float]:
    if key not in table:
        if default is None:
            raise ConfigError(f"[{section}] missing required key '{key}'")
        return default
    raw = _typed(table[key], list, section, key)
    return [float(_typed(v, (int, float), section, key)) for v in raw]


def _int_list(table: dict, section: str, key: str, default=None) -> list[int]:
    if key not in table:
        if default is None:
            raise ConfigError(f"[{section}] missing required key '{key}'")
        return default
    raw = _typed(table[key], list, section, key)
    return [_typed(v, int, section, key) for v in raw]


def _str_list(table: dict, section: str, key: str, default=None) -> list[str]:
    if key not in table:
        if default is None:
            raise ConfigError(f"[{section}] missing required key '{key}'")
        return default
    raw = _typed(table[key], list, section, key)
    return [_typed(v, str, section, key) for v in raw]


def load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _single_section(doc: dict, expected: str) -> dict:
    _reject_unknown(doc, "top level", {expected})
    if expected not in doc:
        raise ConfigError(f"missing [{expected}] section")
    table = doc[expected]
    if not isinstance(table, dict):
        raise ConfigError(f"[{expected}] must be a section")
    return table


def parse_chernoff(doc: dict) -> ChernoffConfig:
    sec = "chernoff"
    t = _single_section(doc, sec)
    known = {
        "bound", "sweep_var", "sweep_start", "sweep_stop", "sweep_step",
        "n_iterations", "epsilon", "theta", "width", "alpha", "beta",
        "quadrature_nodes", "out",
    }
    _reject_unknown(t, sec, known)
    bound = _str(t, sec, "bound")
    if bound not in CHERNOFF_BOUNDS:
        raise ConfigError(f"[{sec}] unknown bound {bound!r}; expected one of {CHERNOFF_BOUNDS}")
    sweep_var = _str(t, sec, "sweep_var")
    if sweep_var not in SWEEP_VARS[bound]:
        raise ConfigError(
            f"[{sec}] sweep_var {sweep_var!r} not valid for bound {bound!r}; "
            f"expected one of {SWEEP_VARS[bound]}"
        )
    cfg = ChernoffConfig(
        bound=bound,
        sweep_var=sweep_var,
        sweep=SweepRange(
            _float(t, sec, "sweep_start"),
            _float(t, sec, "sweep_stop"),
            _float(t, sec, "sweep_step"),
        ),
        n_iterations=_int_list(t, sec, "n_iterations", [1]),
        epsilon=_float_list(t, sec, "epsilon", []),
        theta=_float(t, sec, "theta", 0.0),
        width=_float(t, sec, "width", 0.0),
        alpha=_float(t, sec, "alpha", 1.5707963267948966),
        beta=_float(t, sec, "beta", 0.0),
        quadrature_nodes=_int(t, sec, "quadrature_nodes", 64),
        out=_str(t, sec, "out", "") or None,
    )
    if any(n < 1 for n in cfg.n_iterations):
        raise ConfigError(f"[{sec}] n_iterations must be >= 1")
    needs_eps = bound in ("dephasing", "dephasing_small_eps") or (
        bound in ("phase_gate", "classical_phase_gate") and sweep_var != "epsilon"
    )
    if needs_eps and not cfg.epsilon:
        raise ConfigError(f"[{sec}] bound {bound!r} requires a non-empty 'epsilon' list")
    cfg.sweep.values()  # validate range now
    return cfg


def parse_certify(doc: dict) -> CertifyConfig:
    sec = "certify"
    t = _single_section(doc, sec)
    known = {
        "model", "x_true", "half_width", "centers", "center_start", "center_stop",
        "center_step", "n0", "m", "utilities", "criteria", "trials", "particles",
        "prior_low", "prior_high", "seed", "omega", "t", "out",
    }
    _reject_unknown(t, sec, known)
    model = _str(t, sec, "model")
    if model not in ("phase_gate", "dephasing"):
        raise ConfigError(f"[{sec}] unknown model {model!r}")
    if "centers" in t:
        centers = _float_list(t, sec, "centers")
    else:
        centers = SweepRange(
            _float(t, sec, "center_start"),
            _float(t, sec, "center_stop"),
            _float(t, sec, "center_step"),
        ).values()
    if not centers:
        raise ConfigError(f"[{sec}] empty spec-center sweep")
    cfg = CertifyConfig(
        model=model,
        x_true=_float(t, sec, "x_true"),
        half_width=_float(t, sec, "half_width"),
        centers=centers,
        n0=_int(t, sec, "n0", 300),
        m=_int_list(t, sec, "m", [1]),
        utilities=_str_list(t, sec, "utilities", ["MI"]),
        criteria=_str_list(t, sec, "criteria", ["MEAN"]),
        trials=_int(t, sec, "trials", 100),
        particles=_int(t, sec, "particles", 2000),
        prior_low=_float(t, sec, "prior_low"),
        prior_high=_float(t, sec, "prior_high"),
        seed=_int(t, sec, "seed", 0),
        omega=_float(t, sec, "omega", 0.0),
        t=_float(t, sec, "t", 5.0),
        out=_str(t, sec, "out", "") or None,
    )
    if cfg.trials < 1:
        raise ConfigError(f"[{sec}] trials must be >= 1, got {cfg.trials}")
    if cfg.half_width <= 0:
        raise ConfigError(f"[{sec}] half_width must be > 0")
    for u in cfg.utilities:
        if u not in ("MI", "VAR"):
            raise ConfigError(f"[{sec}] unknown utility {u!r}")
    for c in cfg.criteria:
        if c not in ("MEAN", "HPD"):
            raise ConfigError(f"[{sec}] unknown criterion {c!r}")
    for m in cfg.m:
        if m < 1 or cfg.n0 % m:
            raise ConfigError(f"[{sec}] n0={cfg.n0} must be a positive multiple of m={m}")
    return cfg


def parse_convergence(doc: dict) -> ConvergenceConfig:
    sec = "convergence"
    t = _single_section(doc, sec)
    known = {
        "model", "x_true", "n0_values", "m", "utility", "trials", "particles",
        "prior_low", "prior_high", "seed", "omega", "t", "fit_decades", "out",
    }
    _reject_unknown(t, sec, known)
    model = _str(t, sec, "model")
    if model not in ("phase_gate", "dephasing"):
        raise ConfigError(f"[{sec}] unknown model {model!r}")
    cfg = ConvergenceConfig(
        model=model,
        x_true=_float(t, sec, "x_true"),
        n0_values=_int_list(t, sec, "n0_values"),
        m=_int_list(t, sec, "m", [1]),
        utility=_str(t, sec, "utility", "MI"),
        trials=_int(t, sec, "trials", 50),
        particles=_int(t, sec, "particles", 2000),
        prior_low=_float(t, sec, "prior_low"),
        prior_high=_float(t, sec, "prior_high"),
        seed=_int(t, sec, "seed", 0),
        omega=_float(t, sec, "omega", 0.0),
        t=_float(t, sec, "t", 5.0),
        fit_decades=_float(t, sec, "fit_decades", 2.0),
        out=_str(t, sec, "out", "") or None,
    )
    if not cfg.n0_values or any(n < 1 for n in cfg.n0_values):
        raise ConfigError(f"[{sec}] n0_values must be a non-empty list of positive ints")
    if cfg.utility not in ("MI", "VAR"):
        raise ConfigError(f"[{sec}] unknown utility {cfg.utility!r}")
    if cfg.trials < 1:
        raise ConfigError(f"[{sec}] trials must be >= 1")
    if any(m < 1 for m in cfg.m):
        raise ConfigError(f"[{sec}] m values must be >= 1")
    return cfg
