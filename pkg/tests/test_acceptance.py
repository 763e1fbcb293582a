# Tests for disk post-selection: weights, fidelity, rate and root finding
import math

import numpy as np
import pytest

from core.acceptance import (
    box_probability,
    check_rotational_symmetry,
    component_weights,
    conditional_result,
    converged_radial_weights,
    disk_component_weights,
    origin_fidelity,
    p_delta,
    radial_component_weights,
    rate_constrained_fidelity,
    window_convergence,
)
from core.conditioning import LosslessDensity, PadConfig, TestEnsemble
from core.errors import DegenerateAcceptanceError, SymmetryViolationError, UnreachableRateError
from tests.oracles import polar_disk_weights

DELTA_GRID = np.linspace(0.15, 3.0, 20)
NEAR_ORIGIN_GRID = np.linspace(0.01, 0.3, 10)


def off_centre_density(n, x, y):
    return np.exp(-(x - 0.5) ** 2 - y ** 2) / math.pi


def zero_density(n, x, y):
    return np.zeros(np.broadcast(x, y).shape)


# =============================================================================
# Rotational symmetry and quadrature
# =============================================================================
class TestQuadrature:
    @pytest.mark.parametrize("p", range(0, 7))
    @pytest.mark.parametrize("w", range(0, 4))
    def test_balanced_regime_is_rotationally_symmetric(self, p, w):
        ens = TestEnsemble(p=p, w=w)
        density = LosslessDensity.for_config(PadConfig(p=p))
        assert check_rotational_symmetry(ens.labels, density, rtol=1e-10) < 1e-10

    def test_circle_on_a_density_node_is_not_asymmetry(self):
        """|a_1⟩ alone vanishes on the unit circle; that circle must not fail the check."""
        density = LosslessDensity.for_config(PadConfig(p=1))
        assert check_rotational_symmetry((1,), density, radii=(0.5, 1.0, 2.0)) < 1e-10

    def test_symmetry_check_flags_off_centre_density(self):
        with pytest.raises(SymmetryViolationError) as excinfo:
            check_rotational_symmetry((0, 1), off_centre_density)
        assert excinfo.value.spread > excinfo.value.tolerance

    @pytest.mark.parametrize("delta", [0.1, 1.0, 3.0])
    def test_order_doubling_is_converged(self, delta):
        labels = TestEnsemble(p=1).labels
        density = LosslessDensity.for_config(PadConfig(p=1))
        base = radial_component_weights(labels, density, delta, 64)
        doubled = radial_component_weights(labels, density, delta, 128)
        assert abs(doubled.sum() - base.sum()) < 1e-9 * doubled.sum()

    def test_radial_weights_match_polar_oracle(self):
        labels = TestEnsemble(p=2).labels
        density = LosslessDensity.for_config(PadConfig(p=2))
        radial = converged_radial_weights(labels, density, 1.2)
        np.testing.assert_allclose(radial, polar_disk_weights(density, labels, 1.2), rtol=1e-6, atol=1e-12)

    def test_disk_fallback_agrees_with_radial_path(self):
        labels = TestEnsemble(p=1).labels
        density = LosslessDensity.for_config(PadConfig(p=1))
        radial = converged_radial_weights(labels, density, 1.0)
        disk = disk_component_weights(labels, density, 1.0)
        np.testing.assert_allclose(disk, radial, rtol=2e-2, atol=1e-6)

    def test_asymmetric_density_uses_disk_fallback(self):
        ens = TestEnsemble(p=1, w=0)
        weights = component_weights(ens, PadConfig(p=1, delta=1.0), density=off_centre_density)
        expected = polar_disk_weights(off_centre_density, ens.labels, 1.0)[0]
        assert weights[1] == pytest.approx(expected, rel=2e-2)

    def test_zero_radius_has_no_weight(self):
        labels = (0, 1)
        density = LosslessDensity.for_config(PadConfig())
        assert not radial_component_weights(labels, density, 0.0, 64).any()
        assert not disk_component_weights(labels, density, 0.0).any()


# =============================================================================
# Completeness and the conditional result
# =============================================================================
class TestConditionalResult:
    def test_total_probability_over_box(self):
        assert box_probability(TestEnsemble(p=1, w=2), PadConfig(p=1)) == pytest.approx(1.0, abs=1e-6)

    def test_everything_accepted_at_large_radius(self):
        assert p_delta(TestEnsemble(p=1, w=2), PadConfig(p=1, delta=15.0)) == pytest.approx(1.0, abs=1e-6)

    def test_weights_sum_to_acceptance(self):
        ens, cfg = TestEnsemble(p=2), PadConfig(p=2, delta=0.8)
        result = conditional_result(ens, cfg)
        assert sum(result.weights.values()) == pytest.approx(result.p_delta, rel=1e-14)
        assert result.fidelity == pytest.approx(result.weights[2] / result.p_delta)
        assert result.rate == pytest.approx(result.p_delta / result.p_ideal)
        assert result.p_ideal == pytest.approx(1 / 5)
        assert result.delta == 0.8

    @pytest.mark.parametrize("w", [0, 2])
    def test_weights_match_polar_oracle(self, w):
        ens, cfg = TestEnsemble(p=1, w=w), PadConfig(p=1, delta=0.5)
        weights = component_weights(ens, cfg)
        oracle = polar_disk_weights(LosslessDensity.for_config(cfg), ens.labels, 0.5) * ens.weight
        np.testing.assert_allclose([weights[n] for n in ens.labels], oracle, rtol=1e-6, atol=1e-15)

    @pytest.mark.parametrize("p", range(0, 5))
    def test_acceptance_grows_with_radius(self, p):
        ens, cfg = TestEnsemble(p=p, w=2), PadConfig(p=p)
        results = [conditional_result(ens, cfg.with_delta(delta)) for delta in DELTA_GRID]
        accepted = [r.p_delta for r in results]
        assert all(after > before for before, after in zip(accepted, accepted[1:]))
        assert all(0.0 < r.fidelity <= 1.0 for r in results)

    @pytest.mark.parametrize("p", range(0, 5))
    def test_fidelity_falls_before_first_minimum(self, p):
        ens, cfg = TestEnsemble(p=p, w=2), PadConfig(p=p)
        fidelities = [conditional_result(ens, cfg.with_delta(delta)).fidelity for delta in NEAR_ORIGIN_GRID]
        assert all(after <= before + 1e-12 for before, after in zip(fidelities, fidelities[1:]))
        assert fidelities[-1] < fidelities[0]

    def test_fidelity_turns_past_first_minimum(self):
        """F(Δ) for p=1, w=2 bottoms out near Δ = 1.35 and rises again.

        Reference values from the polar midpoint sums in tests/oracles.py,
        which agree with the radial quadrature to the digits shown.
        """
        ens, cfg = TestEnsemble(p=1, w=2), PadConfig(p=1)
        fidelity = {delta: conditional_result(ens, cfg.with_delta(delta)).fidelity for delta in (1.2, 1.35, 1.65, 2.2)}
        assert fidelity[1.2] == pytest.approx(0.2175, abs=5e-4)
        assert fidelity[1.35] == pytest.approx(0.2048, abs=5e-4)
        assert fidelity[1.65] == pytest.approx(0.2365, abs=5e-4)
        assert fidelity[2.2] == pytest.approx(0.2886, abs=5e-4)
        assert fidelity[1.35] < fidelity[1.2] < fidelity[1.65] < fidelity[2.2]

    @pytest.mark.parametrize("p", range(0, 5))
    def test_small_radius_projects_onto_target(self, p):
        assert conditional_result(TestEnsemble(p=p), PadConfig(p=p, delta=1e-3)).fidelity > 0.9999

    @pytest.mark.parametrize("p", range(0, 7))
    @pytest.mark.parametrize("w", range(0, 4))
    def test_zero_radius_is_origin_limit(self, p, w):
        ens, cfg = TestEnsemble(p=p, w=w), PadConfig(p=p, delta=0.0)
        result = conditional_result(ens, cfg)
        assert result.fidelity == pytest.approx(1.0, abs=1e-10)
        assert result.p_delta == 0.0
        assert result.rate == 0.0
        assert origin_fidelity(ens, cfg) == result.fidelity

    def test_rejects_mismatched_target(self):
        with pytest.raises(ValueError):
            conditional_result(TestEnsemble(p=2), PadConfig(p=1))

    def test_lossy_config_needs_a_density(self):
        with pytest.raises(ValueError):
            conditional_result(TestEnsemble(p=1), PadConfig(p=1, eta=0.9))

    def test_rejects_window_beyond_truncation(self):
        with pytest.raises(ValueError):
            conditional_result(TestEnsemble(p=12, w=2), PadConfig(p=12))

    def test_degenerate_acceptance(self):
        with pytest.raises(DegenerateAcceptanceError):
            conditional_result(TestEnsemble(p=1), PadConfig(p=1), density=zero_density)
        with pytest.raises(DegenerateAcceptanceError):
            origin_fidelity(TestEnsemble(p=1), PadConfig(p=1), density=zero_density)


# =============================================================================
# Rate-constrained fidelity and window convergence
# =============================================================================
class TestRootFinding:
    @pytest.mark.parametrize("p,rate", [(0, 0.1), (1, 0.05), (2, 0.2), (4, 0.4)])
    def test_rate_is_met(self, p, rate):
        ens, cfg = TestEnsemble(p=p), PadConfig(p=p)
        delta, fidelity = rate_constrained_fidelity(ens, cfg, rate)
        assert 0.0 < delta < 15.0
        result = conditional_result(ens, cfg.with_delta(delta))
        assert result.rate == pytest.approx(rate, rel=1e-6)
        assert fidelity == result.fidelity

    def test_larger_rate_costs_fidelity(self):
        ens, cfg = TestEnsemble(p=2), PadConfig(p=2)
        fidelities = [rate_constrained_fidelity(ens, cfg, rate)[1] for rate in (0.05, 0.1, 0.2, 0.4)]
        assert all(after < before for before, after in zip(fidelities, fidelities[1:]))

    def test_unreachable_rate(self):
        with pytest.raises(UnreachableRateError):
            rate_constrained_fidelity(TestEnsemble(p=1), PadConfig(p=1), 10.0)

    def test_rejects_non_positive_rate(self):
        with pytest.raises(ValueError):
            rate_constrained_fidelity(TestEnsemble(p=1), PadConfig(p=1), 0.0)

    @pytest.mark.parametrize("p", [1, 2, 4])
    def test_window_convergence_is_monotone(self, p):
        changes = window_convergence(p, PadConfig(p=p, delta=0.1), 4)
        assert len(changes) == 4
        assert all(after < before for before, after in zip(changes, changes[1:]))

    def test_window_convergence_regression_values(self):
        """p=2 at Δ=0.1: the window stops mattering past w = 1.

        Frozen from the first run of this implementation.
        """
        changes = window_convergence(2, PadConfig(p=2, delta=0.1), 4)
        assert all(change < 1e-2 for change in changes[1:])
        np.testing.assert_allclose(changes, [0.02457, 1.12e-4, 4.0e-7, 1.2e-9], rtol=5e-2)

    def test_window_convergence_matches_direct_fidelities(self):
        cfg = PadConfig(p=2, delta=0.1)
        narrow = conditional_result(TestEnsemble(p=2, w=0), cfg).fidelity
        wide = conditional_result(TestEnsemble(p=2, w=1), cfg).fidelity
        assert window_convergence(2, cfg, 1) == [abs(wide - narrow)]

    def test_window_convergence_budget(self):
        with pytest.raises(ValueError):
            window_convergence(12, PadConfig(p=12), 1)
        with pytest.raises(ValueError):
            window_convergence(1, PadConfig(p=1), 0)
