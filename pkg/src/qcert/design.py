"""Non-greedy Bayesian experimental design over m-step action sequences.

Candidate batches are all ``|action set|^m`` sequences; each is scored by the
expected utility over its outcome branches, either the mutual information
(expected KL divergence of the branch posterior from the m-steps-back prior)
or the negative expected posterior variance.  Scoring never mutates the live
filter; the best sequence is the argmax with lexicographic tie-breaking in
enumeration order.

:class:`SequenceScorer` is the batch engine used by the certification loop:
branch likelihoods depend on particle locations only, so their matrices are
cached between resamplings and a scoring round reduces to a few matrix-vector
products.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .actions import DEFAULT_ACTION_SET, Action, ActionSequence
from .exceptions import InvalidParameterError, UndefinedDivergenceError
from .models import LikelihoodModel, branch_likelihoods
from .smc import ParticleFilter

MAX_RECOMMENDED_LENGTH = 4
# MI below this floor is indistinguishable from zero at double precision and
# snaps to 0.0, keeping lexicographic tie-breaking exact for delta priors.
MI_ATOL = 1e-12


class UtilityKind(enum.Enum):
    MI = "MI"
    VAR = "VAR"


@dataclass(frozen=True)
class OutcomeBranch:
    """One outcome assignment of a sequence with its marginal probability."""

    index: int
    outcomes: tuple[int, ...]
    probability: float


def enumerate_sequences(
    action_set: tuple[Action, ...] = DEFAULT_ACTION_SET, m: int = 1
) -> list[ActionSequence]:
    """All ``|action_set|^m`` sequences in lexicographic order of the given set."""
    if m < 1:
        raise InvalidParameterError(f"sequence length must be >= 1, got {m}")
    if m > MAX_RECOMMENDED_LENGTH:
        warnings.warn(
            f"sequence length {m} > {MAX_RECOMMENDED_LENGTH}: branch count grows "
            f"as (|set| l)^m and scoring will be slow",
            ResourceWarning,
            stacklevel=2,
        )
    return list(itertools.product(action_set, repeat=m))


def branch_probabilities(
    f: ParticleFilter, model: LikelihoodModel, seq: ActionSequence
) -> list[OutcomeBranch]:
    """Marginal probability of every outcome branch under the filter's prior."""
    likelihoods, outcomes = branch_likelihoods(model, f.locations, seq)
    probs = likelihoods @ f.weights
    return [
        OutcomeBranch(k, outs, float(p))
        for k, (outs, p) in enumerate(zip(outcomes, probs))
    ]


def information_gain(f_before: ParticleFilter, f_after: ParticleFilter) -> float:
    """KL divergence of the updated weights from the prior weights.

    Both filters must share particle locations (no resampling in between);
    the divergence is ``sum_i w'_i log(w'_i / w_i)`` with ``0 log 0 = 0``.
    """
    if f_before.locations is not f_after.locations and not np.array_equal(
        f_before.locations, f_after.locations
    ):
        raise InvalidParameterError("filters do not share particle locations")
    w, wp = f_before.weights, f_after.weights
    bad = (wp > 0) & (w == 0)
    if bad.any():
        raise UndefinedDivergenceError(
            "posterior weight on particles with zero prior weight"
        )
    mask = wp > 0
    ig = float(np.sum(wp[mask] * np.log(wp[mask] / w[mask])))
    return max(ig, 0.0) if ig > -1e-12 else ig


def _mi_from_matrix(weights: np.ndarray, likelihoods: np.ndarray) -> float:
    # MI = sum_k sum_i w_i L_ik log(L_ik / p_k), grouped as G@w - p log p
    probs = likelihoods @ weights
    g = np.where(likelihoods > 0, likelihoods * np.log(likelihoods, where=likelihoods > 0), 0.0)
    s1 = g @ weights
    terms = np.where(probs > 0, s1 - probs * np.log(probs, where=probs > 0), 0.0)
    total = terms.sum()
    return float(total) if total > MI_ATOL else 0.0


def mutual_information_utility(
    f: ParticleFilter, model: LikelihoodModel, seq: ActionSequence
) -> float:
    """Expected information gain of the batch, in nats (non-negative).

    Branch posteriors are hypothetical weight updates on the shared particle
    support; the filter itself is left untouched.
    """
    likelihoods, _ = branch_likelihoods(model, f.locations, seq)
    return _mi_from_matrix(f.weights, likelihoods)


def variance_utility(
    f: ParticleFilter, model: LikelihoodModel, seq: ActionSequence
) -> float:
    """Negative expected posterior variance over outcome branches (higher is better)."""
    likelihoods, _ = branch_likelihoods(model, f.locations, seq)
    return _var_utility_from_matrix(f.weights, f.locations, likelihoods)


def _var_utility_from_matrix(
    weights: np.ndarray, locations: np.ndarray, likelihoods: np.ndarray
) -> float:
    probs = likelihoods @ weights
    first = likelihoods @ (weights * locations)
    second = likelihoods @ (weights * locations**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        mean = np.where(probs > 0, first / probs, 0.0)
        var = np.where(probs > 0, second / probs - mean**2, 0.0)
    return float(-np.sum(probs * np.maximum(var, 0.0)))


def select_best(
    f: ParticleFilter,
    model: LikelihoodModel,
    sequences: list[ActionSequence],
    utility: UtilityKind,
) -> ActionSequence:
    """Argmax of the utility; ties resolve to the earliest sequence in the list."""
    if not sequences:
        raise InvalidParameterError("no sequences to select from")
    score = (
        mutual_information_utility if utility is UtilityKind.MI else variance_utility
    )
    best_seq, best_value = sequences[0], score(f, model, sequences[0])
    for seq in sequences[1:]:
        value = score(f, model, seq)
        if value > best_value:
            best_seq, best_value = seq, value
    return best_seq


class SequenceScorer:
    """Scores every m-sequence against a filter, caching what locations allow.

    Branch likelihood rows depend on particle locations but not weights, so
    the stacked likelihood matrix (and its ``L log L`` companion needed for
    the mutual information) is rebuilt only when the filter has been
    resampled.  One scoring round is then two or three matrix-vector products.
    """

    def __init__(
        self,
        model: LikelihoodModel,
        m: int,
        action_set: tuple[Action, ...] = DEFAULT_ACTION_SET,
    ):
        self.model = model
        self.m = m
        self.action_set = action_set
        self.sequences = enumerate_sequences(action_set, m)
        self._locations: np.ndarray | None = None
        self._like: np.ndarray | None = None
        self._like_loglike: np.ndarray | None = None
        self._slices: list[slice] = []

    def _rebuild(self, locations: np.ndarray) -> None:
        """Fill the stacked branch-likelihood matrix by a prefix-sharing trie walk.

        Depth-first descent in action-set order visits sequences in exactly
        the enumeration (lexicographic) order, and within a sequence emits
        outcome branches in the binary order used by ``branch_likelihoods``.
        """
        from .models import _outcome_probability

        factors = self.model.step_factors(locations)
        n_rows = sum(2 ** sum(a.is_measurement for a in seq) for seq in self.sequences)
        like = np.empty((n_rows, locations.size))
        slices: list[slice] = []
        row = 0

        def descend(depth: int, branches) -> None:
            nonlocal row
            if depth == self.m:
                start = row
                for _, lik in branches:
                    like[row] = lik
                    row += 1
                slices.append(slice(start, row))
                return
            grown = [(c * factors, lik) for c, lik in branches]
            for action in self.action_set:
                if action.is_measurement:
                    split = []
                    for c, lik in grown:
                        p_plus = _outcome_probability(action, c)
                        split.append((action.collapse_coherence, lik * p_plus))
                        split.append((-action.collapse_coherence, lik * (1.0 - p_plus)))
                    descend(depth + 1, split)
                else:
                    descend(depth + 1, grown)

        descend(0, [(self.model.initial_coherence, np.ones(locations.size))])
        self._like = like
        self._like_loglike = None  # rebuilt on demand; only MI scoring needs it
        self._slices = slices
        self._locations = locations

    def utilities(self, f: ParticleFilter, utility: UtilityKind) -> np.ndarray:
        """Utility of every sequence, in enumeration order."""
        if self._locations is not f.locations:
            self._rebuild(f.locations)
        like = self._like
        probs = like @ f.weights
        if utility is UtilityKind.MI:
            if self._like_loglike is None:
                # like * log(like) with 0 log 0 = 0; the additive floor is
                # invisible for any reachable likelihood but keeps the log
                # branch-free (a masked log falls off the SIMD path)
                self._like_loglike = like * np.log(like + 1e-300)
            s1 = self._like_loglike @ f.weights
            terms = np.where(probs > 0, s1 - probs * np.log(probs, where=probs > 0), 0.0)
            per_branch = terms
        else:
            first = like @ (f.weights * f.locations)
            second = like @ (f.weights * f.locations**2)
            with np.errstate(divide="ignore", invalid="ignore"):
                mean = np.where(probs > 0, first / probs, 0.0)
                var = np.where(probs > 0, second / probs - mean**2, 0.0)
            per_branch = -probs * np.maximum(var, 0.0)
        values = np.array([per_branch[sl].sum() for sl in self._slices])
        if utility is UtilityKind.MI:
            values[values <= MI_ATOL] = 0.0
        return values

    def select(self, f: ParticleFilter, utility: UtilityKind) -> ActionSequence:
        values = self.utilities(f, utility)
        return self.sequences[int(np.argmax(values))]
