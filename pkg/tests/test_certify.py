from unittest import mock

import numpy as np
import pytest

from qcert.actions import Action
from qcert.certify import (
    CertificationConfig,
    Decision,
    Spec,
    TrialRecord,
    decide_hpd,
    decide_mean,
    run_trial,
    run_trials,
    success_probability,
    trial_seeds,
)
from qcert.design import UtilityKind
from qcert.exceptions import ImpoverishmentError, InvalidParameterError
from qcert.smc import ParticleFilter, init_uniform

X, Y, I = Action.MEASURE_X, Action.MEASURE_Y, Action.IDENTITY


def make_filter(locations, weights, support=(-np.pi, np.pi)):
    return ParticleFilter(
        np.asarray(locations, dtype=float),
        np.asarray(weights, dtype=float),
        support,
        np.random.default_rng(0),
    )


def phase_cfg(**overrides):
    defaults = dict(
        model="phase_gate",
        x_true=np.pi / 10,
        spec=Spec(np.pi / 10, np.pi / 18),
        prior_support=(-np.pi, np.pi),
        n_particles=400,
        n_actions=60,
        batch_length=1,
        utility=UtilityKind.MI,
        criterion="MEAN",
    )
    defaults.update(overrides)
    return CertificationConfig(**defaults)


class TestSpec:
    def test_closed_interval(self):
        spec = Spec(0.5, 0.1)
        assert spec.contains(0.6) and spec.contains(0.4) and spec.contains(0.5)
        assert not spec.contains(0.6000001)

    def test_positive_half_width_required(self):
        with pytest.raises(InvalidParameterError):
            Spec(0.5, 0.0)


class TestDecideMean:
    def test_center_accepts(self):
        f = make_filter([0.5, 0.5], [0.5, 0.5], support=(0, 1))
        assert decide_mean(f, Spec(0.5, 0.1)) is Decision.ACCEPT

    def test_far_mean_rejects(self):
        f = make_filter([0.7, 0.7], [0.5, 0.5], support=(0, 1))
        assert decide_mean(f, Spec(0.5, 0.1)) is Decision.REJECT

    def test_boundary_accepts(self):
        f = make_filter([0.6, 0.6], [0.5, 0.5], support=(0, 1))
        assert decide_mean(f, Spec(0.5, 0.1)) is Decision.ACCEPT

    def test_matches_spec_membership_on_random_filters(self, rng):
        for _ in range(200):
            locs = rng.uniform(0, 1, 50)
            w = rng.dirichlet(np.ones(50))
            f = make_filter(locs, w, support=(0, 1))
            spec = Spec(rng.uniform(0.2, 0.8), rng.uniform(0.01, 0.2))
            expected = Decision.ACCEPT if spec.contains(float(w @ locs)) else Decision.REJECT
            assert decide_mean(f, spec) is expected


class TestDecideHpd:
    def test_all_inside_accepts(self):
        f = make_filter(np.linspace(0.45, 0.55, 40), np.full(40, 1 / 40), support=(0, 1))
        assert decide_hpd(f, Spec(0.5, 0.1)) is Decision.ACCEPT

    def test_all_outside_rejects(self):
        f = make_filter(np.linspace(0.8, 0.9, 40), np.full(40, 1 / 40), support=(0, 1))
        assert decide_hpd(f, Spec(0.5, 0.1)) is Decision.REJECT

    def test_straddling_posterior_is_inconclusive(self):
        f = make_filter(np.linspace(0.55, 0.65, 40), np.full(40, 1 / 40), support=(0, 1))
        assert decide_hpd(f, Spec(0.5, 0.1)) is Decision.INCONCLUSIVE

    def test_never_accepts_and_rejects(self, rng):
        for _ in range(300):
            locs = rng.uniform(0, 1, 60)
            w = rng.dirichlet(np.full(60, 0.3))
            f = make_filter(locs, w, support=(0, 1))
            spec = Spec(rng.uniform(0.2, 0.8), rng.uniform(0.02, 0.2))
            inside = (f.locations >= spec.lo) & (f.locations <= spec.hi)
            frac = f.weights[inside].sum()
            decision = decide_hpd(f, spec)
            if decision is Decision.ACCEPT:
                assert frac > 0.5
            elif decision is Decision.REJECT:
                assert frac < 0.5

    def test_length_measure_variant(self):
        # half the weight sits on the spec edge, half spreads far outside: by
        # region weight the test is inconclusive, by hull length it rejects
        locs = np.concatenate([np.full(50, 0.54), np.linspace(0.6, 2.0, 50)])
        w = np.full(100, 0.01)
        f = make_filter(locs, w, support=(0.0, 2.5))
        spec = Spec(0.5, 0.05)
        assert decide_hpd(f, spec, measure="weight") is Decision.INCONCLUSIVE
        assert decide_hpd(f, spec, measure="length") is Decision.REJECT
        f2 = make_filter(np.linspace(0.48, 0.52, 100), w, support=(0.0, 2.5))
        assert decide_hpd(f2, spec, measure="length") is Decision.ACCEPT


class TestConfigValidation:
    def test_budget_must_divide(self):
        with pytest.raises(InvalidParameterError):
            phase_cfg(n_actions=10, batch_length=3)

    def test_spec_must_intersect_prior(self):
        with pytest.raises(InvalidParameterError):
            phase_cfg(spec=Spec(10.0, 0.1))

    def test_unknown_model(self):
        with pytest.raises(InvalidParameterError):
            phase_cfg(model="amplitude_damping")

    def test_round_count(self):
        assert phase_cfg(n_actions=60, batch_length=4).n_rounds == 15


class TestRunTrial:
    def test_in_spec_device_accepted(self):
        cfg = phase_cfg(n_actions=150, n_particles=1000)
        accepts = sum(
            run_trial(cfg, seed).decision is Decision.ACCEPT for seed in range(8)
        )
        assert accepts >= 7

    def test_far_out_of_spec_device_rejected(self):
        cfg = phase_cfg(spec=Spec(np.pi / 2, np.pi / 18), n_actions=150, n_particles=1000)
        rejects = sum(
            run_trial(cfg, seed).decision is Decision.REJECT for seed in range(8)
        )
        assert rejects >= 7

    def test_success_flag_definition(self):
        cfg = phase_cfg(n_actions=100)
        for seed in range(10):
            rec = run_trial(cfg, seed)
            expected = (rec.decision is Decision.ACCEPT and rec.in_spec) or (
                rec.decision is Decision.REJECT and not rec.in_spec
            )
            assert rec.success == expected

    def test_sequence_log_length(self):
        cfg = phase_cfg(n_actions=60, batch_length=4)
        rec = run_trial(cfg, 3)
        assert len(rec.sequences) == 15
        assert all(len(seq) == 4 for seq in rec.sequences)

    def test_replay_is_bitwise_deterministic(self):
        cfg = phase_cfg(n_actions=80, batch_length=2)
        a = run_trial(cfg, 11, record_history=True)
        b = run_trial(cfg, 11, record_history=True)
        assert a == b

    def test_aborted_trial_counts_as_failure(self):
        cfg = phase_cfg()
        with mock.patch(
            "qcert.certify.batch_update", side_effect=ImpoverishmentError("forced")
        ):
            rec = run_trial(cfg, 5)
        assert rec.aborted
        assert rec.decision is Decision.INCONCLUSIVE
        assert not rec.success

    def test_history_recording(self):
        cfg = phase_cfg(n_actions=30)
        rec = run_trial(cfg, 2, record_history=True)
        assert len(rec.mean_history) == 30
        assert len(rec.variance_history) == 30
        assert rec.variance_history[-1] < rec.variance_history[0]


class TestPhaseGateStructure:
    def test_non_greedy_batches_are_identity_padded(self):
        # after the initial oscillations the best length-4 batch is three
        # identities plus one measurement
        cfg = phase_cfg(n_actions=200, batch_length=4, n_particles=1000)
        rec = run_trial(cfg, 17)
        late = rec.sequences[10:]
        well_formed = sum(
            1 for seq in late if sum(a is I for a in seq) == 3
        )
        assert well_formed / len(late) >= 0.9

    def test_greedy_never_selects_identity(self):
        cfg = phase_cfg(n_actions=100, batch_length=1, n_particles=500)
        rec = run_trial(cfg, 19)
        assert all(seq[0] is not I for seq in rec.sequences)


class TestDephasingProtocol:
    def test_never_selects_identity(self):
        for m in (2, 3):
            cfg = CertificationConfig(
                model="dephasing",
                x_true=0.1,
                spec=Spec(0.1, 0.03),
                prior_support=(0.0, 1.0),
                n_particles=500,
                n_actions=60,
                batch_length=m,
                utility=UtilityKind.MI,
                criterion="MEAN",
                dephasing_t=5.0,
            )
            rec = run_trial(cfg, 23)
            assert all(I not in seq for seq in rec.sequences)

    def test_dephasing_trial_converges(self):
        cfg = CertificationConfig(
            model="dephasing",
            x_true=0.1,
            spec=Spec(0.1, 0.03),
            prior_support=(0.0, 1.0),
            n_particles=1000,
            n_actions=150,
            batch_length=1,
            utility=UtilityKind.MI,
            criterion="MEAN",
            dephasing_t=5.0,
        )
        rec = run_trial(cfg, 29)
        assert abs(rec.posterior_mean - 0.1) < 0.05
        assert rec.decision is Decision.ACCEPT


class TestTrialAggregation:
    def test_success_probability_estimate_and_se(self):
        cfg = phase_cfg(n_actions=100, n_particles=500)
        p, se = success_probability(cfg, 20, master_seed=31)
        records = run_trials(cfg, 20, master_seed=31)
        expected = sum(r.success for r in records) / 20
        assert p == expected
        assert se == pytest.approx(np.sqrt(p * (1 - p) / 20))

    def test_zero_trials_rejected(self):
        with pytest.raises(InvalidParameterError):
            run_trials(phase_cfg(), 0, master_seed=1)

    def test_run_trials_deterministic(self):
        cfg = phase_cfg(n_actions=40, n_particles=300)
        assert run_trials(cfg, 5, 37) == run_trials(cfg, 5, 37)

    def test_trial_seeds_are_independent_children(self):
        seeds = trial_seeds(123, 4)
        assert len({s.spawn_key for s in seeds}) == 4

    def test_parallel_matches_serial(self):
        cfg = phase_cfg(n_actions=30, n_particles=200)
        serial = run_trials(cfg, 4, 41, max_workers=1)
        parallel = run_trials(cfg, 4, 41, max_workers=2)
        assert serial == parallel


def test_trial_record_invariant_inconclusive_is_failure():
    rec = TrialRecord(
        decision=Decision.INCONCLUSIVE,
        posterior_mean=0.0,
        posterior_variance=1.0,
        sequences=(),
        in_spec=True,
        success=False,
    )
    assert not rec.success
