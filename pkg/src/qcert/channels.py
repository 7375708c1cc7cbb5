"""Parametric single-qubit channels: phase gate, dephasing, error-averaged outputs.

The phase gate is the unitary rotation ``R_n(theta) = exp(-i theta/2 n.sigma)``;
the dephasing channel evolves a qubit under ``H = (omega/2) sigma_z`` while the
coherences decay as ``exp(-gamma t)``.  A faulty gate angle may carry either a
fixed offset or a random offset drawn uniformly from ``[0, w]``, in which case
the channel output is the corresponding mixture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import InvalidParameterError
from .qstate import (
    ATOL_PROB,
    IDENTITY,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    bloch_to_density,
    density_to_bloch,
    pure_state_bloch,
    validate_density_matrix,
)

E_Z = np.array([0.0, 0.0, 1.0])


def _unit_axis(axis: np.ndarray) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if abs(norm - 1.0) > ATOL_PROB:
        raise InvalidParameterError(f"rotation axis has norm {norm}, expected 1")
    return axis / norm


def reduce_angle(theta: float) -> float:
    """Reduce an angle to the reporting interval (-pi, pi]."""
    t = np.remainder(theta, 2 * np.pi)
    if t > np.pi:
        t -= 2 * np.pi
    return float(t)


@dataclass(frozen=True)
class PhaseGateParams:
    """Rotation by ``theta`` about a unit axis (default z)."""

    theta: float
    axis: np.ndarray = field(default_factory=lambda: E_Z.copy())

    def __post_init__(self):
        object.__setattr__(self, "axis", _unit_axis(self.axis))


@dataclass(frozen=True)
class DephasingParams:
    """Precession at rate ``omega`` with coherence decay rate ``gamma`` over time ``t``."""

    omega: float
    gamma: float
    t: float

    def __post_init__(self):
        if self.gamma < 0:
            raise InvalidParameterError(f"gamma must be >= 0, got {self.gamma}")
        if self.t < 0:
            raise InvalidParameterError(f"t must be >= 0, got {self.t}")


@dataclass(frozen=True)
class ErrorDistribution:
    """Angle-error model: a fixed offset or a uniform draw from ``[0, width]``."""

    kind: str  # "deterministic" | "uniform"
    offset: float = 0.0
    width: float = 0.0
    quadrature_nodes: int = 64

    def __post_init__(self):
        if self.kind not in ("deterministic", "uniform"):
            raise InvalidParameterError(f"unknown error distribution kind {self.kind!r}")
        if self.width < 0:
            raise InvalidParameterError(f"width must be >= 0, got {self.width}")
        if self.quadrature_nodes < 1:
            raise InvalidParameterError("quadrature_nodes must be >= 1")


def rotation_unitary(axis: np.ndarray, theta: float) -> np.ndarray:
    """``R_n(theta) = cos(theta/2) I - i sin(theta/2) (n.sigma)``."""
    axis = _unit_axis(axis)
    n_dot_sigma = axis[0] * SIGMA_X + axis[1] * SIGMA_Y + axis[2] * SIGMA_Z
    return np.cos(theta / 2) * IDENTITY - 1j * np.sin(theta / 2) * n_dot_sigma


def apply_phase_gate(params: PhaseGateParams, rho: np.ndarray) -> np.ndarray:
    """Conjugate ``rho`` by the rotation unitary."""
    rho = validate_density_matrix(rho)
    u = rotation_unitary(params.axis, params.theta)
    return u @ rho @ u.conj().T


def apply_dephasing(params: DephasingParams, alpha: float, beta: float) -> np.ndarray:
    """Output state for a pure input parametrized by angles (alpha, beta).

    The diagonal is ``(cos^2(alpha/2), sin^2(alpha/2))``; the off-diagonal
    coherence is ``(sin alpha)/2 * exp(-gamma t -+ i (omega t + beta))``.
    """
    decay = np.exp(-params.gamma * params.t)
    phase = params.omega * params.t + beta
    coh = 0.5 * np.sin(alpha) * decay
    return np.array(
        [
            [np.cos(alpha / 2) ** 2, coh * np.exp(-1j * phase)],
            [coh * np.exp(1j * phase), np.sin(alpha / 2) ** 2],
        ]
    )


def apply_dephasing_state(params: DephasingParams, rho: np.ndarray) -> np.ndarray:
    """Dephasing action on an arbitrary (possibly mixed) state.

    Linear extension of :func:`apply_dephasing` over the Bloch decomposition:
    the transverse Bloch components rotate by ``omega t`` and shrink by
    ``exp(-gamma t)``; the z component is unchanged.
    """
    r = density_to_bloch(rho)
    decay = np.exp(-params.gamma * params.t)
    c, s = np.cos(params.omega * params.t), np.sin(params.omega * params.t)
    out = np.array(
        [decay * (c * r[0] - s * r[1]), decay * (s * r[0] + c * r[1]), r[2]]
    )
    return bloch_to_density(out)


def iterate_channel(
    channel: Callable[..., np.ndarray], params, rho: np.ndarray, n: int
) -> np.ndarray:
    """Apply ``channel(params, rho)`` ``n`` times (``n >= 1``)."""
    if n < 1:
        raise InvalidParameterError(f"iteration count must be >= 1, got {n}")
    out = rho
    for _ in range(n):
        out = channel(params, out)
    return out


def averaged_output(
    params: PhaseGateParams,
    dist: ErrorDistribution,
    rho: np.ndarray,
    n: int = 1,
    fresh_noise_per_iteration: bool = False,
) -> np.ndarray:
    """Channel output averaged over the angle-error distribution.

    For a uniform error the integral over ``[0, width]`` is evaluated by
    Gauss-Legendre quadrature with ``dist.quadrature_nodes`` nodes.  By
    default one error realization applies coherently to all ``n`` iterations
    (gate angle ``n (theta + eps)``); with ``fresh_noise_per_iteration`` the
    average of a single application is instead composed ``n`` times.
    """
    if n < 1:
        raise InvalidParameterError(f"iteration count must be >= 1, got {n}")
    rho = validate_density_matrix(rho)
    if dist.kind == "deterministic":
        shifted = PhaseGateParams(n * (params.theta + dist.offset), params.axis)
        return apply_phase_gate(shifted, rho)
    if dist.width == 0.0:
        shifted = PhaseGateParams(n * params.theta, params.axis)
        return apply_phase_gate(shifted, rho)

    def single_average(state: np.ndarray, n_coherent: int) -> np.ndarray:
        nodes, weights = np.polynomial.legendre.leggauss(dist.quadrature_nodes)
        eps = 0.5 * dist.width * (nodes + 1.0)
        out = np.zeros((2, 2), dtype=complex)
        for e, w in zip(eps, weights):
            gate = PhaseGateParams(n_coherent * (params.theta + e), params.axis)
            out += w * apply_phase_gate(gate, state)
        return out / 2.0  # weights sum to 2 on [-1, 1]

    if fresh_noise_per_iteration:
        out = rho
        for _ in range(n):
            out = single_average(out, 1)
        return out
    return single_average(rho, n)


# ---------------------------------------------------------------------------
# Output maps: (alpha, beta, n_iterations) -> density matrix, for input-state
# optimization where the two channels must share the pure-state parametrization.
# ---------------------------------------------------------------------------

OutputMap = Callable[[float, float, int], np.ndarray]


def phase_gate_output_map(params: PhaseGateParams) -> OutputMap:
    def output(alpha: float, beta: float, n: int) -> np.ndarray:
        rho = bloch_to_density(pure_state_bloch(alpha, beta))
        return apply_phase_gate(PhaseGateParams(n * params.theta, params.axis), rho)

    return output


def dephasing_output_map(params: DephasingParams) -> OutputMap:
    def output(alpha: float, beta: float, n: int) -> np.ndarray:
        stretched = DephasingParams(params.omega, params.gamma, n * params.t)
        return apply_dephasing(stretched, alpha, beta)

    return output


def averaged_output_map(params: PhaseGateParams, dist: ErrorDistribution) -> OutputMap:
    def output(alpha: float, beta: float, n: int) -> np.ndarray:
        rho = bloch_to_density(pure_state_bloch(alpha, beta))
        return averaged_output(params, dist, rho, n)

    return output
