"""Functional certification of single-qubit channels.

Chernoff-bound analysis of ideal-vs-faulty channel discrimination, and
adaptive Bayesian certification (particle filter + non-greedy experimental
design + accept/reject decision criteria) against a producer's spec interval.
"""

__version__ = "0.1.0"

from .actions import Action, ActionSequence, DEFAULT_ACTION_SET
from .certify import (
    CertificationConfig,
    Decision,
    Spec,
    TrialRecord,
    decide_hpd,
    decide_mean,
    run_trial,
    run_trials,
    success_probability,
)
from .channels import (
    DephasingParams,
    ErrorDistribution,
    PhaseGateParams,
    apply_dephasing,
    apply_dephasing_state,
    apply_phase_gate,
    averaged_output,
    iterate_channel,
    rotation_unitary,
)
from .chernoff import (
    ChernoffResult,
    PriorPair,
    classical_chernoff,
    classical_chernoff_phase_gate,
    dephasing_qcb,
    dephasing_qcb_small_eps,
    minimal_error_probability,
    optimize_input_state,
    quantum_chernoff_bound,
)
from .design import (
    OutcomeBranch,
    UtilityKind,
    branch_probabilities,
    enumerate_sequences,
    information_gain,
    mutual_information_utility,
    select_best,
    variance_utility,
)
from .models import DephasingModel, PhaseGateModel
from .qstate import (
    PovmElement,
    bloch_to_density,
    born_probability,
    density_to_bloch,
    measurement_update,
)
from .smc import (
    ParticleFilter,
    batch_update,
    effective_sample_size,
    hpd_region,
    init_uniform,
    posterior_mean,
    posterior_variance,
    resample,
    sequence_likelihood,
)
