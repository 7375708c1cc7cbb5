"""Likelihood models mapping (parameter, action sequence, outcomes) to Born probabilities.

Both channels studied here keep the protocol's states on the Bloch equator:
the input is |+>, measurement collapse lands on a sigma_x/sigma_y eigenstate
(all equatorial), the phase gate rotates about z and dephasing shrinks the
transverse components.  A state is therefore carried as a single complex
coherence ``c = rx + i ry``, and one channel application multiplies ``c`` by a
per-parameter factor.  That makes per-particle likelihood evaluation a chain
of elementwise array operations, which is what the adaptive-design scoring
loop needs to stay fast.

Outcome convention: 0 is the '+' projector of an action's POVM, 1 the '-'.
Branches enumerate outcome assignments in binary order with the first
measurement as the most significant digit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import Action, ActionSequence
from .exceptions import InvalidParameterError


class LikelihoodModel:
    """Base: one scalar channel parameter, equatorial dynamics.

    Subclasses define :meth:`step_factors`, the complex multiplier applied to
    the coherence by a single channel application, per parameter value.
    """

    #: coherence of the fixed input state |+>
    initial_coherence: complex = 1.0 + 0.0j

    def step_factors(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class PhaseGateModel(LikelihoodModel):
    """Rotation about z by an unknown angle theta (the inferred parameter)."""

    initial_coherence: complex = 1.0 + 0.0j

    def step_factors(self, xs: np.ndarray) -> np.ndarray:
        return np.exp(1j * np.asarray(xs, dtype=float))


@dataclass(frozen=True)
class DephasingModel(LikelihoodModel):
    """Dephasing with unknown decay rate gamma; omega and t are fixed and known.

    One channel application evolves for time ``t``; consecutive applications
    compose to evolution for the accumulated time, so iterating k times
    matches running the device for ``k t``.
    """

    omega: float = 0.0
    t: float = 5.0
    initial_coherence: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.t <= 0:
            raise InvalidParameterError(f"evolution time must be > 0, got {self.t}")

    def step_factors(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        return np.exp(-xs * self.t) * np.exp(1j * self.omega * self.t)


def _outcome_probability(action: Action, coherence) -> np.ndarray:
    """Probability of outcome 0 ('+') for a measurement action."""
    if action is Action.MEASURE_X:
        p = 0.5 * (1.0 + np.real(coherence))
    else:
        p = 0.5 * (1.0 + np.imag(coherence))
    return np.clip(p, 0.0, 1.0)


def branch_likelihoods(
    model: LikelihoodModel, xs: np.ndarray, seq: ActionSequence
) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    """Likelihood of every outcome branch of ``seq``, per parameter value.

    Returns ``(L, outcomes)`` where ``L`` has shape ``(n_branches, len(xs))``
    and ``outcomes[k]`` is the outcome tuple of branch ``k``.  Rows of ``L``
    sum to 1 over branches for every parameter value.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    factors = model.step_factors(xs)
    # (coherence, accumulated likelihood, outcome tuple); coherence may be a
    # scalar right after a collapse and re-broadcasts on the next application.
    branches = [(model.initial_coherence, np.ones_like(xs), ())]
    for action in seq:
        grown = [(c * factors, lik, outs) for c, lik, outs in branches]
        if not action.is_measurement:
            branches = grown
            continue
        branches = []
        for c, lik, outs in grown:
            p_plus = _outcome_probability(action, c)
            branches.append((action.collapse_coherence, lik * p_plus, outs + (0,)))
            branches.append((-action.collapse_coherence, lik * (1.0 - p_plus), outs + (1,)))
    likelihoods = np.stack([lik for _, lik, _ in branches])
    outcomes = [outs for _, _, outs in branches]
    return likelihoods, outcomes


def outcome_likelihood(
    model: LikelihoodModel,
    xs: np.ndarray,
    seq: ActionSequence,
    outcomes: tuple[int, ...],
) -> np.ndarray:
    """Likelihood of one recorded outcome tuple, per parameter value.

    ``outcomes`` carries one 0/1 entry per measurement action in ``seq``;
    identity actions consume no entry.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    n_meas = sum(1 for a in seq if a.is_measurement)
    if len(outcomes) != n_meas:
        raise InvalidParameterError(
            f"sequence has {n_meas} measurements but {len(outcomes)} outcomes given"
        )
    factors = model.step_factors(xs)
    coherence = model.initial_coherence
    likelihood = np.ones_like(xs)
    pos = 0
    for action in seq:
        coherence = coherence * factors
        if not action.is_measurement:
            continue
        p_plus = _outcome_probability(action, coherence)
        if outcomes[pos] == 0:
            likelihood = likelihood * p_plus
            coherence = action.collapse_coherence
        else:
            likelihood = likelihood * (1.0 - p_plus)
            coherence = -action.collapse_coherence
        pos += 1
    return likelihood


def simulate_outcomes(
    model: LikelihoodModel,
    x_true: float,
    seq: ActionSequence,
    rng: np.random.Generator,
) -> tuple[int, ...]:
    """Run the true device through a batch, sampling one outcome per measurement.

    The state is carried across the batch (no reset between actions) and the
    caller resets to the input state at each batch boundary by calling this
    afresh.
    """
    factor = complex(model.step_factors(np.array([x_true]))[0])
    coherence = model.initial_coherence
    outcomes: list[int] = []
    for action in seq:
        coherence = coherence * factor
        if not action.is_measurement:
            continue
        p_plus = float(_outcome_probability(action, coherence))
        if rng.random() < p_plus:
            outcomes.append(0)
            coherence = action.collapse_coherence
        else:
            outcomes.append(1)
            coherence = -action.collapse_coherence
    return tuple(outcomes)
