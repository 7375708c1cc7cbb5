"""Sequential Monte Carlo particle filter over one scalar channel parameter.

The posterior is carried as weighted point masses ``{(w_i, x_i)}``.  A batch
of measurement outcomes reweights multiplicatively via the Born-rule
likelihood; when the effective sample size drops below half the particle
count, Liu-West resampling redraws locations while preserving the posterior
mean and variance in expectation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .actions import ActionSequence
from .exceptions import ImpoverishmentError, InvalidParameterError
from .models import LikelihoodModel, outcome_likelihood

# Shrinkage coefficient of the Liu-West kernel; kernel covariance is
# (1 - a^2) times the posterior variance.
LIU_WEST_A = 0.98
# Resampling triggers when ESS falls below this fraction of the particle count.
ESS_THRESHOLD_RATIO = 0.5
# Total-likelihood floor under which a Bayes update is declared impoverished.
LIKELIHOOD_FLOOR = 1e-300

WEIGHT_SUM_ATOL = 1e-10


@dataclass
class ParticleFilter:
    """Weighted particle approximation of the posterior over one parameter."""

    locations: np.ndarray
    weights: np.ndarray
    support: tuple[float, float]
    rng: np.random.Generator

    def __post_init__(self):
        self.locations = np.asarray(self.locations, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.locations.shape != self.weights.shape or self.locations.size < 2:
            raise InvalidParameterError("locations and weights must share a length >= 2")
        if self.weights.min() < 0:
            raise InvalidParameterError("weights must be non-negative")
        if abs(self.weights.sum() - 1.0) > WEIGHT_SUM_ATOL:
            raise InvalidParameterError(f"weights sum to {self.weights.sum()}, expected 1")

    @property
    def n_particles(self) -> int:
        return self.locations.size


def init_uniform(
    support: tuple[float, float], n_particles: int, seed
) -> ParticleFilter:
    """Fresh filter: locations i.i.d. uniform on the support, equal weights.

    ``seed`` may be an integer, a ``SeedSequence`` or a ``Generator``; equal
    seeds give bitwise-identical filters.
    """
    lo, hi = support
    if not hi > lo:
        raise InvalidParameterError(f"degenerate support [{lo}, {hi}]")
    if n_particles < 2:
        raise InvalidParameterError(f"need at least 2 particles, got {n_particles}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    locations = rng.uniform(lo, hi, n_particles)
    weights = np.full(n_particles, 1.0 / n_particles)
    return ParticleFilter(locations, weights, (lo, hi), rng)


def sequence_likelihood(
    model: LikelihoodModel,
    x: float,
    seq: ActionSequence,
    outcomes: tuple[int, ...],
) -> float:
    """Probability of the recorded outcome tuple given parameter value ``x``.

    Interleaved form: starting from the input state, each action applies the
    channel once and then (for measurement actions) collapses on the observed
    outcome; identity actions consume no outcome.
    """
    return float(outcome_likelihood(model, np.array([x]), seq, outcomes)[0])


def effective_sample_size(f: ParticleFilter) -> float:
    """``1 / sum(w_i^2)``, between 1 (degenerate) and n (uniform)."""
    return float(1.0 / np.sum(f.weights**2))


def posterior_mean(f: ParticleFilter) -> float:
    return float(f.weights @ f.locations)


def posterior_variance(f: ParticleFilter) -> float:
    mu = f.weights @ f.locations
    return float(max(f.weights @ (f.locations - mu) ** 2, 0.0))


def resample(f: ParticleFilter, a: float = LIU_WEST_A) -> ParticleFilter:
    """Liu-West resampling: equal-weight redraw preserving mean and variance.

    New locations are ``a x_j + (1 - a) mu`` plus Gaussian noise of variance
    ``(1 - a^2) Var``, with ``j`` drawn proportionally to the weights; the
    result is clipped to the prior support.  A zero-variance filter returns
    equal-weight copies of its single location.
    """
    n = f.n_particles
    mu = posterior_mean(f)
    var = posterior_variance(f)
    if var <= 0.0:
        locations = np.full(n, mu)
    else:
        picked = f.locations[f.rng.choice(n, size=n, p=f.weights)]
        noise = f.rng.normal(0.0, np.sqrt((1.0 - a**2) * var), size=n)
        locations = a * picked + (1.0 - a) * mu + noise
        locations = np.clip(locations, f.support[0], f.support[1])
    weights = np.full(n, 1.0 / n)
    return ParticleFilter(locations, weights, f.support, f.rng)


def batch_update(
    f: ParticleFilter,
    model: LikelihoodModel,
    seq: ActionSequence,
    outcomes: tuple[int, ...],
    ess_threshold_ratio: float = ESS_THRESHOLD_RATIO,
) -> ParticleFilter:
    """Bayes reweighting by the batch likelihood, resampling on impoverishment.

    Weights become ``w_i L(x_i) / sum_j w_j L(x_j)``; locations are unchanged
    unless the post-update effective sample size drops below
    ``ess_threshold_ratio * n``, in which case the filter is resampled.
    Raises :class:`ImpoverishmentError` when the total likelihood underflows.
    """
    likelihood = outcome_likelihood(model, f.locations, seq, outcomes)
    raw = f.weights * likelihood
    total = raw.sum()
    if not total > LIKELIHOOD_FLOOR:
        raise ImpoverishmentError(f"total batch likelihood {total} underflowed")
    updated = replace(f, weights=raw / total)
    if effective_sample_size(updated) < ess_threshold_ratio * f.n_particles:
        return resample(updated)
    return updated


def hpd_region(f: ParticleFilter, credibility: float = 0.95) -> np.ndarray:
    """Indices of the highest-posterior-density region at the given credibility.

    Particles are ordered by decreasing weight (ties broken by ascending
    location); the smallest prefix whose cumulative weight reaches the
    credibility level is returned.
    """
    if not 0.0 < credibility < 1.0:
        raise InvalidParameterError(f"credibility must be in (0, 1), got {credibility}")
    # lexsort uses the last key as primary
    order = np.lexsort((f.locations, -f.weights))
    cumulative = np.cumsum(f.weights[order])
    cutoff = int(np.searchsorted(cumulative, credibility, side="left"))
    return order[: cutoff + 1]
