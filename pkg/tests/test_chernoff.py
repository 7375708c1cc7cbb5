import math

import numpy as np
import pytest

from qcert.channels import (
    DephasingParams,
    ErrorDistribution,
    PhaseGateParams,
    apply_dephasing,
    averaged_output_map,
    dephasing_output_map,
    phase_gate_output_map,
)
from qcert.chernoff import (
    ChernoffResult,
    PriorPair,
    classical_chernoff,
    classical_chernoff_phase_gate,
    classical_trace_functional,
    dephasing_qcb,
    dephasing_qcb_small_eps,
    minimal_error_probability,
    optimize_input_state,
    quantum_chernoff_bound,
)
from qcert.exceptions import InvalidParameterError, ResourceLimitError
from qcert.qstate import bloch_to_density, pure_state_bloch

from conftest import random_density_matrix
from oracles import binomial_error_probability, classical_smin_golden

KET0 = bloch_to_density(np.array([0.0, 0.0, 1.0]))
KET1 = bloch_to_density(np.array([0.0, 0.0, -1.0]))
PLUS = bloch_to_density(np.array([1.0, 0.0, 0.0]))


def dephasing_pair(tau, eps):
    """Equatorial dephasing outputs of Eq.-(6) form for rates gamma, gamma(1+eps)."""
    ideal = apply_dephasing(DephasingParams(0.0, 1.0, tau), np.pi / 2, 0.0)
    faulty = apply_dephasing(DephasingParams(0.0, 1.0 + eps, tau), np.pi / 2, 0.0)
    return faulty, ideal


class TestQuantumChernoffBound:
    def test_identical_states_give_zero(self, rng):
        rho = random_density_matrix(rng)
        res = quantum_chernoff_bound(rho, rho)
        assert res.xi == 0.0
        assert not res.infinite

    def test_orthogonal_pure_states_flagged_infinite(self):
        res = quantum_chernoff_bound(KET0, KET1)
        assert res.infinite
        assert res.xi == math.inf

    def test_pure_pair_equals_log_overlap(self):
        theta = 0.4
        rotated = bloch_to_density(np.array([np.cos(theta), np.sin(theta), 0.0]))
        res = quantum_chernoff_bound(PLUS, rotated)
        assert res.xi == pytest.approx(-np.log(np.cos(theta / 2) ** 2), abs=1e-12)

    def test_matches_analytic_dephasing_bound(self):
        faulty, ideal = dephasing_pair(1.0, 0.2)
        numeric = quantum_chernoff_bound(faulty, ideal)
        analytic = dephasing_qcb(1.0, 0.2, 1)
        assert numeric.xi == pytest.approx(analytic.xi, abs=1e-10)

    def test_symmetry(self, rng):
        for _ in range(50):
            rho, tau = random_density_matrix(rng), random_density_matrix(rng)
            a = quantum_chernoff_bound(rho, tau)
            b = quantum_chernoff_bound(tau, rho)
            assert a.xi == pytest.approx(b.xi, abs=1e-10)

    def test_nonnegative_with_s_in_unit_interval(self, rng):
        for _ in range(200):
            res = quantum_chernoff_bound(
                random_density_matrix(rng), random_density_matrix(rng)
            )
            assert res.xi >= 0.0
            assert 0.0 <= res.s_min <= 1.0

    def test_joint_convexity_on_phase_gate_pair(self, rng):
        # mixture bound never exceeds the best pure component's bound
        ideal = phase_gate_output_map(PhaseGateParams(np.pi / 10))
        faulty = phase_gate_output_map(PhaseGateParams(np.pi / 10 + 0.2))
        for _ in range(100):
            k = int(rng.integers(2, 5))
            weights = rng.dirichlet(np.ones(k))
            angles = [(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi)) for _ in range(k)]
            mix_ideal = sum(w * ideal(a, b, 1) for w, (a, b) in zip(weights, angles))
            mix_faulty = sum(w * faulty(a, b, 1) for w, (a, b) in zip(weights, angles))
            mixture_xi = quantum_chernoff_bound(mix_faulty, mix_ideal).xi
            component_xi = max(
                quantum_chernoff_bound(faulty(a, b, 1), ideal(a, b, 1)).xi
                for a, b in angles
            )
            assert mixture_xi <= component_xi + 1e-9


class TestMinimalErrorProbability:
    def test_identical_states_give_half(self, rng):
        rho = random_density_matrix(rng)
        assert minimal_error_probability(rho, rho, 3) == pytest.approx(0.5, abs=1e-12)

    def test_orthogonal_pure_states_give_zero(self):
        assert minimal_error_probability(KET0, KET1, 1) == pytest.approx(0.0, abs=1e-12)

    def test_matches_binomial_oracle_for_commuting_pair(self):
        faulty, ideal = dephasing_pair(1.0, 0.3)
        x = 0.5 * (1.0 + np.exp(-1.3))
        y = 0.5 * (1.0 + np.exp(-1.0))
        for n in range(1, 7):
            expected = binomial_error_probability(x, y, n)
            assert minimal_error_probability(ideal, faulty, n) == pytest.approx(
                expected, abs=1e-12
            )

    def test_rate_decreases_monotonically_toward_bound(self):
        # Direct evaluation: -(1/N) log P_eN stays above xi (Chernoff upper
        # bound shifts it by log(2)/N) and approaches it monotonically from
        # above as N grows.
        faulty, ideal = dephasing_pair(1.0, 0.3)
        xi = quantum_chernoff_bound(faulty, ideal).xi
        rates = [
            -np.log(minimal_error_probability(ideal, faulty, n)) / n
            for n in range(1, 9)
        ]
        assert all(r > xi for r in rates)
        assert all(r2 < r1 for r1, r2 in zip(rates, rates[1:]))

    def test_unequal_priors(self):
        faulty, ideal = dephasing_pair(1.0, 0.3)
        x = 0.5 * (1.0 + np.exp(-1.3))
        y = 0.5 * (1.0 + np.exp(-1.0))
        p = minimal_error_probability(ideal, faulty, 2, PriorPair(0.3, 0.7))
        assert p == pytest.approx(binomial_error_probability(x, y, 2, 0.3, 0.7), abs=1e-12)

    def test_copy_cap(self):
        with pytest.raises(ResourceLimitError):
            minimal_error_probability(KET0, KET1, 13)
        with pytest.raises(InvalidParameterError):
            minimal_error_probability(KET0, KET1, 0)


class TestClassicalChernoff:
    def test_equal_probabilities_give_zero(self):
        assert classical_chernoff(0.37, 0.37).xi == 0.0

    def test_closed_form_matches_golden_section(self, rng):
        for _ in range(200):
            x, y = rng.uniform(0.0, 1.0, 2)
            res = classical_chernoff(x, y)
            if res.infinite or x == y:
                continue
            assert res.s_min == pytest.approx(classical_smin_golden(x, y), abs=1e-8)

    def test_example_pair_dual_route(self):
        res = classical_chernoff(0.8, 0.6)
        s_oracle = classical_smin_golden(0.8, 0.6)
        assert res.s_min == pytest.approx(s_oracle, abs=1e-8)
        assert res.xi == pytest.approx(
            -np.log(classical_trace_functional(s_oracle, 0.8, 0.6)), abs=1e-12
        )

    def test_f_is_convex_with_unit_endpoints(self, rng):
        grid = np.linspace(0.0, 1.0, 21)
        for _ in range(1000):
            x, y = rng.uniform(0.01, 0.99, 2)
            vals = np.array([classical_trace_functional(s, x, y) for s in grid])
            assert vals[0] == pytest.approx(1.0, abs=1e-12)
            assert vals[-1] == pytest.approx(1.0, abs=1e-12)
            second_diff = vals[:-2] - 2 * vals[1:-1] + vals[2:]
            assert second_diff.min() > -1e-12

    def test_boundary_cases(self):
        assert classical_chernoff(1.0, 0.0).infinite
        assert classical_chernoff(0.0, 1.0).infinite
        assert classical_chernoff(1.0, 0.25).xi == pytest.approx(-np.log(0.25))
        assert classical_chernoff(0.25, 1.0).xi == pytest.approx(-np.log(0.25))
        assert classical_chernoff(0.0, 0.75).xi == pytest.approx(-np.log(0.25))
        assert classical_chernoff(0.6, 0.0).xi == pytest.approx(-np.log(0.4))

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidParameterError):
            classical_chernoff(1.2, 0.5)


class TestClassicalPhaseGate:
    def test_small_eps_law(self):
        # Away from the degenerate angles, xi ~ N^2 eps^2 / 8
        eps = 1e-3
        for n in (1, 2, 3):
            res = classical_chernoff_phase_gate(0.7, eps, n)
            assert res.xi == pytest.approx(n**2 * eps**2 / 8, rel=0.01)

    def test_zero_at_indistinguishable_angles(self):
        eps = 0.2
        for n in (1, 2, 3):
            for ell in (0, 1, 2):
                theta_star = -eps / 2 + np.pi * ell / n
                res = classical_chernoff_phase_gate(theta_star, eps, n)
                assert res.xi <= 1e-12

    def test_specific_zero_location(self):
        # eps=0.2, N=2, ell=1: zero at theta = -0.1 + pi/2
        res = classical_chernoff_phase_gate(-0.1 + np.pi / 2, 0.2, 2)
        assert res.xi <= 1e-12

    def test_small_theta_iteration_ordering(self):
        values = {
            n: classical_chernoff_phase_gate(0.05, 0.2, n).per_iteration
            for n in (1, 2, 3)
        }
        assert values[3] > values[2] > values[1]

    def test_per_iteration_field(self):
        res = classical_chernoff_phase_gate(0.3, 0.1, 3)
        assert res.per_iteration == pytest.approx(res.xi / 3)
        with pytest.raises(InvalidParameterError):
            classical_chernoff_phase_gate(0.3, 0.1, 0)


class TestDephasingBound:
    def test_zero_error_gives_zero(self):
        assert dephasing_qcb(1.0, 0.0).xi == 0.0

    def test_increases_with_eps_pointwise(self):
        taus = np.linspace(0.1, 3.0, 30)
        for tau in taus:
            values = [dephasing_qcb(tau, e).per_iteration for e in (0.1, 0.2, 0.3)]
            assert values[0] < values[1] < values[2]

    def test_cross_oracle_grid(self):
        for tau in np.linspace(0.1, 3.0, 20):
            for eps in np.linspace(0.05, 0.5, 20):
                analytic = dephasing_qcb(tau, eps, 1)
                faulty, ideal = dephasing_pair(tau, eps)
                numeric = quantum_chernoff_bound(faulty, ideal)
                assert abs(analytic.xi - numeric.xi) <= 1e-10

    def test_invalid_tau(self):
        with pytest.raises(InvalidParameterError):
            dephasing_qcb(0.0, 0.1)

    def test_small_eps_expansion(self):
        assert dephasing_qcb_small_eps(0.7, 0.0) == 0.0
        full = dephasing_qcb(1.0, 1e-3, 1).per_iteration
        approx = dephasing_qcb_small_eps(1.0, 1e-3, 1)
        assert abs(approx - full) / full < 1e-2

    def test_expansion_decreases_with_iterations(self):
        values = [dephasing_qcb_small_eps(0.5, 0.01, n) for n in (1, 2, 3)]
        assert values[0] > values[1] > values[2]


class TestOptimizeInputState:
    def test_identical_channels_give_zero_at_first_grid_point(self):
        out = phase_gate_output_map(PhaseGateParams(0.3))
        alpha, beta, res = optimize_input_state(out, out, 1, grid_shape=(13, 13))
        assert res.xi == 0.0
        assert alpha == 0.0 and beta == 0.0

    def test_phase_gate_optimum_on_equator(self):
        ideal = phase_gate_output_map(PhaseGateParams(np.pi / 10))
        faulty = phase_gate_output_map(PhaseGateParams(np.pi / 10 + 0.2))
        alpha, _, res = optimize_input_state(ideal, faulty, 2, grid_shape=(31, 31))
        assert alpha == pytest.approx(np.pi / 2, abs=1e-3)
        assert res.xi == pytest.approx(-np.log(np.cos(0.2) ** 2), abs=1e-9)

    def test_dephasing_optimum_on_equator(self):
        ideal = dephasing_output_map(DephasingParams(0.7, 0.4, 1.5))
        faulty = dephasing_output_map(DephasingParams(0.7, 0.4 * 1.3, 1.5))
        alpha, _, res = optimize_input_state(ideal, faulty, 1, grid_shape=(31, 31))
        assert alpha == pytest.approx(np.pi / 2, abs=1e-3)
        assert res.xi == pytest.approx(dephasing_qcb(0.6, 0.3, 1).xi, abs=1e-9)

    def test_averaged_channel_accepted(self):
        dist = ErrorDistribution("uniform", width=0.2, quadrature_nodes=32)
        ideal = phase_gate_output_map(PhaseGateParams(np.pi))
        faulty = averaged_output_map(PhaseGateParams(np.pi), dist)
        _, _, res = optimize_input_state(ideal, faulty, 1, grid_shape=(7, 7))
        assert res.xi > 0


class TestResultTypes:
    def test_chernoff_result_per_iteration_none_without_count(self):
        res = ChernoffResult(0.5, 0.4)
        assert res.per_iteration is None

    def test_prior_validation(self):
        with pytest.raises(InvalidParameterError):
            PriorPair(0.0, 1.0)
        with pytest.raises(InvalidParameterError):
            PriorPair(0.6, 0.6)
