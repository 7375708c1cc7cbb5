"""End-to-end certification: adaptive design rounds, then an accept/reject decision.

A trial runs ``N = N0 / m`` rounds against a simulated true device.  Each
round selects the best m-action batch by expected utility, runs the device
through it (the state carries across the batch and resets at the boundary),
and Bayes-updates the filter with the observed outcomes.  The final posterior
is judged against the producer's spec interval by the MEAN criterion (posterior
mean inside the interval) or the HPD criterion (95% credible region mostly
inside or mostly outside, else inconclusive).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .actions import ActionSequence
from .design import SequenceScorer, UtilityKind
from .exceptions import ImpoverishmentError, InvalidParameterError
from .models import DephasingModel, LikelihoodModel, PhaseGateModel, simulate_outcomes
from .smc import (
    ParticleFilter,
    batch_update,
    hpd_region,
    init_uniform,
    posterior_mean,
    posterior_variance,
)


class Decision(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Spec:
    """Producer-declared interval ``center ± half_width`` for the true parameter."""

    center: float
    half_width: float

    def __post_init__(self):
        if self.half_width <= 0:
            raise InvalidParameterError(f"half_width must be > 0, got {self.half_width}")

    @property
    def lo(self) -> float:
        return self.center - self.half_width

    @property
    def hi(self) -> float:
        return self.center + self.half_width

    def contains(self, x: float) -> bool:
        # closed on both ends; fixes the tie rule for boundary experiments
        return self.lo <= x <= self.hi


MODEL_KINDS = ("phase_gate", "dephasing")


@dataclass(frozen=True)
class CertificationConfig:
    """Everything one trial needs; fully determined together with a seed."""

    model: str
    x_true: float
    spec: Spec
    prior_support: tuple[float, float]
    n_particles: int = 2000
    n_actions: int = 300  # N0: total action budget
    batch_length: int = 1  # m
    utility: UtilityKind = UtilityKind.MI
    criterion: str = "MEAN"  # MEAN | HPD
    hpd_credibility: float = 0.95
    hpd_threshold: float = 0.95
    hpd_measure: str = "weight"  # weight | length (sensitivity check only)
    dephasing_omega: float = 0.0
    dephasing_t: float = 5.0

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise InvalidParameterError(f"unknown model {self.model!r}")
        if self.batch_length < 1:
            raise InvalidParameterError("batch_length must be >= 1")
        if self.n_actions < self.batch_length or self.n_actions % self.batch_length:
            raise InvalidParameterError(
                f"N0={self.n_actions} must be a positive multiple of m={self.batch_length}"
            )
        if self.criterion not in ("MEAN", "HPD"):
            raise InvalidParameterError(f"unknown criterion {self.criterion!r}")
        if self.hpd_measure not in ("weight", "length"):
            raise InvalidParameterError(f"unknown hpd_measure {self.hpd_measure!r}")
        lo, hi = self.prior_support
        if not (self.spec.lo <= hi and self.spec.hi >= lo):
            raise InvalidParameterError("spec interval does not intersect the prior support")

    @property
    def n_rounds(self) -> int:
        return self.n_actions // self.batch_length

    def build_model(self) -> LikelihoodModel:
        if self.model == "phase_gate":
            return PhaseGateModel()
        return DephasingModel(omega=self.dephasing_omega, t=self.dephasing_t)


@dataclass(frozen=True)
class TrialRecord:
    decision: Decision
    posterior_mean: float
    posterior_variance: float
    sequences: tuple[ActionSequence, ...]
    in_spec: bool
    success: bool
    aborted: bool = False
    mean_history: tuple[float, ...] = field(default=(), repr=False)
    variance_history: tuple[float, ...] = field(default=(), repr=False)


def decide_mean(f: ParticleFilter, spec: Spec) -> Decision:
    """Accept iff the posterior mean lies in the closed spec interval."""
    return Decision.ACCEPT if spec.contains(posterior_mean(f)) else Decision.REJECT


def decide_hpd(
    f: ParticleFilter,
    spec: Spec,
    credibility: float = 0.95,
    threshold: float = 0.95,
    measure: str = "weight",
) -> Decision:
    """Accept/reject when the HPD region lies mostly inside/outside the spec.

    The region's overlap with the spec is measured in posterior weight of its
    particles (the region itself is defined by cumulative weight); a
    length-measure variant on the region's location hull is available for
    sensitivity checks.
    """
    region = hpd_region(f, credibility)
    if measure == "weight":
        total = f.weights[region].sum()
        inside = f.weights[region][
            (f.locations[region] >= spec.lo) & (f.locations[region] <= spec.hi)
        ].sum()
        frac_in = inside / total if total > 0 else 0.0
    else:
        lo, hi = f.locations[region].min(), f.locations[region].max()
        if hi > lo:
            frac_in = max(0.0, min(hi, spec.hi) - max(lo, spec.lo)) / (hi - lo)
        else:
            frac_in = 1.0 if spec.contains(lo) else 0.0
    if frac_in >= threshold:
        return Decision.ACCEPT
    if 1.0 - frac_in >= threshold:
        return Decision.REJECT
    return Decision.INCONCLUSIVE


def _decide(f: ParticleFilter, cfg: CertificationConfig) -> Decision:
    if cfg.criterion == "MEAN":
        return decide_mean(f, cfg.spec)
    return decide_hpd(
        f, cfg.spec, cfg.hpd_credibility, cfg.hpd_threshold, cfg.hpd_measure
    )


def run_trial(
    cfg: CertificationConfig,
    seed,
    scorer: SequenceScorer | None = None,
    record_history: bool = False,
) -> TrialRecord:
    """One full certification trial with its own RNG streams.

    ``seed`` may be an int or a ``numpy.random.SeedSequence``; it is split
    into independent filter and device streams, so a (config, seed) pair
    fixes the trial bitwise.  An impoverished filter aborts the trial, which
    counts as an unsuccessful, inconclusive test.
    """
    seed_seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    filter_seed, device_seed = seed_seq.spawn(2)
    device_rng = np.random.default_rng(device_seed)
    f = init_uniform(cfg.prior_support, cfg.n_particles, np.random.default_rng(filter_seed))
    model = cfg.build_model()
    if scorer is None:
        scorer = SequenceScorer(model, cfg.batch_length)
    in_spec = cfg.spec.contains(cfg.x_true)

    chosen: list[ActionSequence] = []
    means: list[float] = []
    variances: list[float] = []
    aborted = False
    for _ in range(cfg.n_rounds):
        seq = scorer.select(f, cfg.utility)
        chosen.append(seq)
        outcomes = simulate_outcomes(model, cfg.x_true, seq, device_rng)
        try:
            f = batch_update(f, model, seq, outcomes)
        except ImpoverishmentError:
            aborted = True
            break
        if record_history:
            means.append(posterior_mean(f))
            variances.append(posterior_variance(f))

    if aborted:
        decision = Decision.INCONCLUSIVE
        success = False
    else:
        decision = _decide(f, cfg)
        success = (decision is Decision.ACCEPT and in_spec) or (
            decision is Decision.REJECT and not in_spec
        )
    return TrialRecord(
        decision=decision,
        posterior_mean=posterior_mean(f),
        posterior_variance=posterior_variance(f),
        sequences=tuple(chosen),
        in_spec=in_spec,
        success=success,
        aborted=aborted,
        mean_history=tuple(means),
        variance_history=tuple(variances),
    )


def trial_seeds(master_seed, n_trials: int) -> list[np.random.SeedSequence]:
    """Independent child seeds, derived from the master seed by trial index."""
    seq = (
        master_seed
        if isinstance(master_seed, np.random.SeedSequence)
        else np.random.SeedSequence(master_seed)
    )
    return seq.spawn(n_trials)


def _trial_worker(args) -> TrialRecord:
    cfg, seed, record_history = args
    return run_trial(cfg, seed, record_history=record_history)


def run_trials(
    cfg: CertificationConfig,
    n_trials: int,
    master_seed,
    record_history: bool = False,
    max_workers: int = 1,
) -> list[TrialRecord]:
    """Independent trials with per-trial RNG streams.

    Results come back in trial order whatever the worker count, so the
    estimate depends only on (config, master seed, n_trials).
    """
    if n_trials < 1:
        raise InvalidParameterError(f"n_trials must be >= 1, got {n_trials}")
    seeds = trial_seeds(master_seed, n_trials)
    if max_workers and max_workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        tasks = [(cfg, seed, record_history) for seed in seeds]
        chunk = max(1, n_trials // (4 * max_workers))
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(_trial_worker, tasks, chunksize=chunk))
    scorer = SequenceScorer(cfg.build_model(), cfg.batch_length)
    return [
        run_trial(cfg, seed, scorer=scorer, record_history=record_history)
        for seed in seeds
    ]


def success_probability(
    cfg: CertificationConfig, n_trials: int, master_seed: int
) -> tuple[float, float]:
    """Monte-Carlo success estimate and its binomial standard error."""
    records = run_trials(cfg, n_trials, master_seed)
    p = sum(r.success for r in records) / n_trials
    std_err = float(np.sqrt(p * (1.0 - p) / n_trials))
    return p, std_err
