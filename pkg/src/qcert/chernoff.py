"""Quantum and classical Chernoff bounds for channel discrimination.

The quantum bound is ``xi = -log inf_s tr(rho^(1-s) tau^s)`` with the infimum
over ``s in [0, 1]``; it is the asymptotic decay exponent of the minimal
error probability when discriminating many copies of two states.  For the
two-outcome classical case the trace functional reduces to

    f(s) = x^(1-s) y^s + (1-x)^(1-s) (1-y)^s

whose minimizer has a closed form.  Both the dephasing channel and the
fixed-basis phase-gate experiment reduce to this classical form with the
appropriate (x, y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import OutputMap
from .exceptions import InvalidParameterError, ResourceLimitError
from .goldensection import golden_section_min
from .qstate import clamped_eigh, validate_density_matrix

# Squared-overlap floor below which two pure states count as orthogonal
# (one-shot distinguishable, infinite bound).
ORTHOGONALITY_TOL = 1e-15


@dataclass(frozen=True)
class ChernoffResult:
    """Bound value ``xi`` (nats per copy), minimizing ``s``, optional per-iteration rate."""

    xi: float
    s_min: float
    infinite: bool = False
    n_iterations: int | None = None

    @property
    def per_iteration(self) -> float | None:
        if self.n_iterations is None:
            return None
        return self.xi / self.n_iterations


@dataclass(frozen=True)
class PriorPair:
    """Strictly positive prior probabilities summing to one."""

    pi0: float
    pi1: float

    def __post_init__(self):
        if self.pi0 <= 0 or self.pi1 <= 0:
            raise InvalidParameterError("priors must be strictly positive")
        if abs(self.pi0 + self.pi1 - 1.0) > 1e-12:
            raise InvalidParameterError(f"priors sum to {self.pi0 + self.pi1}, expected 1")


EQUAL_PRIORS = PriorPair(0.5, 0.5)


def _powers(vals: np.ndarray, exponent: float) -> np.ndarray:
    # 0^p := 0 for all p >= 0 (including p = 0): the continuity convention for
    # the trace functional at the endpoints of [0, 1].
    return np.where(vals > 0.0, np.power(vals, exponent, where=vals > 0.0), 0.0)


def quantum_chernoff_bound(
    rho: np.ndarray, tau: np.ndarray, n_iterations: int | None = None
) -> ChernoffResult:
    """Spectral evaluation of ``-log inf_s tr(rho^(1-s) tau^s)``.

    Pure-pure pairs short-circuit: the trace functional is then constant in
    ``s`` and equals the squared overlap; orthogonal pure states yield an
    infinite bound, reported via the ``infinite`` flag rather than an overflow.
    """
    rho = validate_density_matrix(rho)
    tau = validate_density_matrix(tau)
    rho_vals, rho_vecs = clamped_eigh(rho)
    tau_vals, tau_vecs = clamped_eigh(tau)
    overlap = np.abs(rho_vecs.conj().T @ tau_vecs) ** 2  # overlap[i, j] = |<u_i|v_j>|^2

    rho_pure = np.isclose(rho_vals.max(), 1.0, atol=1e-12)
    tau_pure = np.isclose(tau_vals.max(), 1.0, atol=1e-12)
    if rho_pure and tau_pure:
        i, j = int(np.argmax(rho_vals)), int(np.argmax(tau_vals))
        sq_overlap = float(overlap[i, j])
        if sq_overlap < ORTHOGONALITY_TOL:
            return ChernoffResult(math.inf, 0.5, infinite=True, n_iterations=n_iterations)
        xi = -math.log(sq_overlap)
        if abs(xi) < 1e-12:
            xi = 0.0
        return ChernoffResult(xi, 0.5, n_iterations=n_iterations)

    def trace_functional(s: float) -> float:
        return float(_powers(rho_vals, 1.0 - s) @ overlap @ _powers(tau_vals, s))

    s_min, q_min = golden_section_min(trace_functional, 0.0, 1.0, tol=1e-12)
    xi = -math.log(q_min)
    if abs(xi) < 1e-12:
        xi = 0.0
    return ChernoffResult(xi, s_min, n_iterations=n_iterations)


def minimal_error_probability(
    rho: np.ndarray,
    tau: np.ndarray,
    n_copies: int,
    priors: PriorPair = EQUAL_PRIORS,
) -> float:
    """Helstrom error probability for N copies, ``0.5 (1 - ||pi1 tau^xN - pi0 rho^xN||_1)``.

    The trace norm is the sum of singular values of the 2^N-dimensional
    difference operator; ``n_copies`` is capped at 12.
    """
    if n_copies < 1:
        raise InvalidParameterError(f"n_copies must be >= 1, got {n_copies}")
    if n_copies > 12:
        raise ResourceLimitError(
            f"n_copies={n_copies} exceeds the cap of 12 (2^N-dimensional trace norm)"
        )
    rho = validate_density_matrix(rho)
    tau = validate_density_matrix(tau)
    rho_n = np.array([[1.0 + 0j]])
    tau_n = np.array([[1.0 + 0j]])
    for _ in range(n_copies):
        rho_n = np.kron(rho_n, rho)
        tau_n = np.kron(tau_n, tau)
    diff = priors.pi1 * tau_n - priors.pi0 * rho_n
    trace_norm = np.linalg.svd(diff, compute_uv=False).sum()
    return float(min(max(0.5 * (1.0 - trace_norm), 0.0), 0.5))


def _classical_smin(x: float, y: float) -> float:
    """Argmin of f(s) on [0, 1] for interior 0 < y < x < 1.

    Derived from f'(s) = 0.  (The corresponding printed closed form in the
    source material returns 1 - argmin of f; the dual golden-section check in
    the test suite pins this orientation.)
    """
    log_ratio = math.log(x) - math.log(y)
    log_ratio_c = math.log(1.0 - y) - math.log(1.0 - x)
    num = math.log(((1.0 - x) * log_ratio_c) / (x * log_ratio))
    den = math.log((y * (1.0 - x)) / (x * (1.0 - y)))
    return min(max(num / den, 0.0), 1.0)


def classical_trace_functional(s: float, x: float, y: float) -> float:
    """``f(s) = x^(1-s) y^s + (1-x)^(1-s) (1-y)^s`` with ``0^p := 0``.

    Convex on [0, 1] with ``f(0) = f(1) = 1`` for interior x, y; its log-min
    is the classical Chernoff bound.
    """

    def pw(base: float, expo: float) -> float:
        return 0.0 if base <= 0.0 else base**expo

    return pw(x, 1.0 - s) * pw(y, s) + pw(1.0 - x, 1.0 - s) * pw(1.0 - y, s)


def classical_chernoff(
    x: float, y: float, n_iterations: int | None = None
) -> ChernoffResult:
    """Chernoff bound between the two-outcome distributions (x, 1-x) and (y, 1-y)."""
    if not (0.0 <= x <= 1.0) or not (0.0 <= y <= 1.0):
        raise InvalidParameterError(f"x={x}, y={y} must lie in [0, 1]")
    if x == y:
        return ChernoffResult(0.0, 0.5, n_iterations=n_iterations)
    # Boundary cases: one distribution is deterministic.
    if (x == 1.0 and y == 0.0) or (x == 0.0 and y == 1.0):
        return ChernoffResult(math.inf, 0.5, infinite=True, n_iterations=n_iterations)
    if x == 1.0:
        return ChernoffResult(-math.log(y), 1.0, n_iterations=n_iterations)
    if x == 0.0:
        return ChernoffResult(-math.log(1.0 - y), 1.0, n_iterations=n_iterations)
    if y == 1.0:
        return ChernoffResult(-math.log(x), 0.0, n_iterations=n_iterations)
    if y == 0.0:
        return ChernoffResult(-math.log(1.0 - x), 0.0, n_iterations=n_iterations)
    if abs(x - y) <= 1e-13:
        # Below fp resolution of the log ratios in the closed form; the bound
        # is quadratic in the gap and numerically indistinguishable from 0.
        mid = 0.5 * (x + y)
        return ChernoffResult(
            (x - y) ** 2 / (8.0 * mid * (1.0 - mid)), 0.5, n_iterations=n_iterations
        )

    if x >= y:
        s_min = _classical_smin(x, y)
    else:
        # f_{x,y}(s) = f_{y,x}(1-s), so the minimizer maps through 1 - s.
        s_min = 1.0 - _classical_smin(y, x)
    xi = -math.log(classical_trace_functional(s_min, x, y))
    if abs(xi) < 1e-12:
        xi = 0.0
    return ChernoffResult(xi, s_min, n_iterations=n_iterations)


def classical_chernoff_phase_gate(
    theta: float, eps: float, n_iterations: int
) -> ChernoffResult:
    """Fixed-basis phase-gate experiment: x = cos^2(N theta / 2), y with theta + eps."""
    if n_iterations < 1:
        raise InvalidParameterError(f"n_iterations must be >= 1, got {n_iterations}")
    x = math.cos(n_iterations * theta / 2.0) ** 2
    y = math.cos(n_iterations * (theta + eps) / 2.0) ** 2
    return classical_chernoff(x, y, n_iterations=n_iterations)


def dephasing_qcb(tau: float, eps: float, n_iterations: int = 1) -> ChernoffResult:
    """Analytic quantum Chernoff bound for the dephasing channel.

    For N iterations the dimensionless time is ``N tau``; the bound reduces
    to the classical form with ``x = (1 + e^(-N tau (1+eps)))/2`` and
    ``y = (1 + e^(-N tau))/2``.
    """
    if tau <= 0:
        raise InvalidParameterError(f"tau must be > 0, got {tau}")
    if n_iterations < 1:
        raise InvalidParameterError(f"n_iterations must be >= 1, got {n_iterations}")
    t_eff = n_iterations * tau
    x = 0.5 * (1.0 + math.exp(-t_eff * (1.0 + eps)))
    y = 0.5 * (1.0 + math.exp(-t_eff))
    return classical_chernoff(x, y, n_iterations=n_iterations)


def dephasing_qcb_small_eps(tau: float, eps: float, n_iterations: int = 1) -> float:
    """Leading small-eps expansion of the per-iteration dephasing bound.

    ``xi/N = N tau^2 eps^2 / (8 (e^(2 N tau) - 1))``; strictly decreasing in N
    at fixed (tau, eps), i.e. iterating the dephasing channel never helps.
    """
    if tau <= 0:
        raise InvalidParameterError(f"tau must be > 0, got {tau}")
    if n_iterations < 1:
        raise InvalidParameterError(f"n_iterations must be >= 1, got {n_iterations}")
    n = n_iterations
    return n * tau**2 * eps**2 / (8.0 * (math.exp(2.0 * n * tau) - 1.0))


def optimize_input_state(
    ideal: OutputMap,
    faulty: OutputMap,
    n_iterations: int = 1,
    grid_shape: tuple[int, int] = (61, 61),
    refine_tol: float = 1e-6,
) -> tuple[float, float, ChernoffResult]:
    """Maximize the output-state bound over pure inputs parametrized by (alpha, beta).

    A full grid scan over ``[0, pi] x [0, 2 pi)`` guards against local maxima;
    coordinate descent with step halving then refines the best grid point to
    ``refine_tol``.  Returns ``(alpha, beta, bound at the optimum)``.
    """

    def objective(alpha: float, beta: float) -> ChernoffResult:
        return quantum_chernoff_bound(
            faulty(alpha, beta, n_iterations),
            ideal(alpha, beta, n_iterations),
            n_iterations=n_iterations,
        )

    alphas = np.linspace(0.0, np.pi, grid_shape[0])
    betas = np.linspace(0.0, 2 * np.pi, grid_shape[1], endpoint=False)
    best = (alphas[0], betas[0], objective(alphas[0], betas[0]))
    for a in alphas:
        for b in betas:
            res = objective(a, b)
            if res.xi > best[2].xi:
                best = (a, b, res)

    alpha, beta, result = best
    step_a = alphas[1] - alphas[0] if len(alphas) > 1 else 0.1
    step_b = betas[1] - betas[0] if len(betas) > 1 else 0.1
    while max(step_a, step_b) > refine_tol:
        improved = False
        for da, db in ((step_a, 0.0), (-step_a, 0.0), (0.0, step_b), (0.0, -step_b)):
            a = min(max(alpha + da, 0.0), np.pi)
            b = (beta + db) % (2 * np.pi)
            res = objective(a, b)
            if res.xi > result.xi:
                alpha, beta, result = a, b, res
                improved = True
        if not improved:
            step_a *= 0.5
            step_b *= 0.5
    return alpha, beta, result
