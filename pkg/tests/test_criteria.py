"""Steering criteria, aggregation, monogamy, and collective scans."""

import math

import numpy as np
import pytest

from steerkit import gaussian, qubits
from steerkit.core import CriterionId, SitePartition, SteeringValue, partition
from steerkit.criteria import (
    CvScanConfig,
    QubitScanConfig,
    collective_scan,
    cv3_genuine_report,
    genuine_tripartite_aggregate,
    ghz3_genuine_report,
    monogamy_check,
    pure_state_tripartite_scan,
    spin_three_obs,
    spin_two_obs,
)
from steerkit.gaussian import HomodynePlan, cv_ghz, steering_product_cv, vacuum
from steerkit.qubits import DetectionModel, PauliString, depolarize_global, ghz


def canonical_value(criterion, group, target, value, bound=1.0):
    return SteeringValue.of(criterion, SitePartition(frozenset(group), target), value, bound)


class TestCoreTypes:
    def test_partition_rejects_target_in_group(self):
        with pytest.raises(ValueError):
            SitePartition(frozenset({1, 2}), 2)

    def test_partition_rejects_empty_group(self):
        with pytest.raises(ValueError):
            SitePartition(frozenset(), 1)

    def test_partition_rejects_nonpositive_sites(self):
        with pytest.raises(ValueError):
            SitePartition(frozenset({0, 1}), 2)

    def test_partition_helper(self):
        part = partition([3, 2], 1)
        assert part.steering_group == frozenset({2, 3})
        assert part.target_site == 1
        assert part.sites == frozenset({1, 2, 3})

    def test_steering_value_verdict_must_match(self):
        part = SitePartition(frozenset({1, 2}), 3)
        with pytest.raises(ValueError):
            SteeringValue(CriterionId.SPIN_SUM_2OBS, part, 0.5, 1.0, verdict=False)

    def test_steering_value_rejects_odd_bound(self):
        part = SitePartition(frozenset({1, 2}), 3)
        with pytest.raises(ValueError):
            SteeringValue.of(CriterionId.SPIN_SUM_2OBS, part, 0.5, 3.0)

    def test_steering_value_rejects_negative_value(self):
        part = SitePartition(frozenset({1, 2}), 3)
        with pytest.raises(ValueError):
            SteeringValue.of(CriterionId.SPIN_SUM_2OBS, part, -0.5, 1.0)

    def test_boundary_value_is_not_a_violation(self):
        value = canonical_value(CriterionId.CV_PRODUCT, {2, 3}, 1, 1.0)
        assert not value.verdict

    def test_to_dict_round_trip_fields(self):
        value = canonical_value(CriterionId.SPIN_SUM_3OBS, {1, 2}, 3, 1.5, bound=2.0)
        data = value.to_dict()
        assert data["criterion"] == "spin-sum-3obs"
        assert data["group"] == [1, 2]
        assert data["target"] == 3
        assert data["bound"] == 2.0
        assert data["verdict"] is True


class TestSpinTwoObs:
    def _predictors(self):
        return qubits.ghz_predictor(3, "x"), qubits.ghz_predictor(3, "y")

    def test_ghz_is_zero(self):
        px, py = self._predictors()
        value = spin_two_obs(ghz(3), partition([1, 2], 3), px, py)
        assert value.value == pytest.approx(0.0, abs=1e-12)
        assert value.verdict
        assert value.bound == 1.0

    def test_half_depolarized_closed_form(self):
        px, py = self._predictors()
        state = depolarize_global(ghz(3), 0.5)
        value = spin_two_obs(state, partition([1, 2], 3), px, py)
        assert value.value == pytest.approx(2.0, abs=1e-12)
        assert not value.verdict

    def test_maximally_mixed_is_four(self):
        px, py = self._predictors()
        state = depolarize_global(ghz(3), 0.0)
        value = spin_two_obs(state, partition([1, 2], 3), px, py)
        assert value.value == pytest.approx(4.0, abs=1e-12)

    def test_noise_flip_at_three_quarters(self):
        # 4(1-p) < 1 exactly when p > 3/4
        px, py = self._predictors()
        below = spin_two_obs(depolarize_global(ghz(3), 0.74), partition([1, 2], 3), px, py)
        above = spin_two_obs(depolarize_global(ghz(3), 0.76), partition([1, 2], 3), px, py)
        assert not below.verdict
        assert above.verdict

    def test_rejects_predictor_outside_group(self):
        px, py = self._predictors()
        bad = PauliString.from_sites(3, {2: "Y", 3: "Y"})
        with pytest.raises(ValueError):
            spin_two_obs(ghz(3), partition([1, 2], 3), bad, py)

    def test_detection_loss_closed_form(self):
        px, py = self._predictors()
        value = spin_two_obs(ghz(3), partition([1, 2], 3), px, py, DetectionModel(0.5))
        assert value.value == pytest.approx(1.0, abs=1e-12)
        assert not value.verdict


class TestSpinThreeObs:
    def _pieces(self):
        return (
            partition([1, 2], 3),
            qubits.ghz_predictor(3, "x"),
            qubits.ghz_predictor(3, "y"),
            qubits.ghz_z_predictor(3),
        )

    def test_ghz_is_zero(self):
        part, px, py, pz = self._pieces()
        value = spin_three_obs(ghz(3), part, px, py, pz)
        assert value.value == pytest.approx(0.0, abs=1e-12)
        assert value.verdict
        assert value.bound == 2.0

    def test_half_efficiency_closed_form(self):
        part, px, py, pz = self._pieces()
        value = spin_three_obs(ghz(3), part, px, py, pz, DetectionModel(0.5))
        assert value.value == pytest.approx(1.5, abs=1e-12)
        assert value.verdict

    def test_one_third_efficiency_sits_on_bound(self):
        part, px, py, pz = self._pieces()
        value = spin_three_obs(ghz(3), part, px, py, pz, DetectionModel(1.0 / 3.0))
        assert value.value == pytest.approx(2.0, abs=1e-12)
        assert not value.verdict


class TestGenuineAggregate:
    def test_all_zero_is_genuine(self):
        values = [
            canonical_value(CriterionId.SPIN_SUM_2OBS, {2, 3}, 1, 0.0),
            canonical_value(CriterionId.SPIN_SUM_2OBS, {1, 3}, 2, 0.0),
            canonical_value(CriterionId.SPIN_SUM_2OBS, {1, 2}, 3, 0.0),
        ]
        report = genuine_tripartite_aggregate(values)
        assert report.sum == 0.0
        assert report.genuine

    def test_point_four_each_is_not_genuine(self):
        values = [
            canonical_value(CriterionId.CV_FIXED_COMBO, {2, 3}, 1, 0.4),
            canonical_value(CriterionId.CV_FIXED_COMBO, {1, 3}, 2, 0.4),
            canonical_value(CriterionId.CV_FIXED_COMBO, {1, 2}, 3, 0.4),
        ]
        report = genuine_tripartite_aggregate(values)
        assert report.sum == pytest.approx(1.2)
        assert not report.genuine

    def test_cv_ghz_unit_squeezing(self):
        report = cv3_genuine_report(cv_ghz(1.0))
        assert report.sum == pytest.approx(3.0 * math.sqrt(6.0) * math.exp(-2.0), abs=1e-10)
        assert report.sum == pytest.approx(0.9944, abs=5e-4)
        assert report.genuine

    def test_rejects_mixed_families(self):
        values = [
            canonical_value(CriterionId.CV_FIXED_COMBO, {2, 3}, 1, 0.4),
            canonical_value(CriterionId.SPIN_SUM_2OBS, {1, 3}, 2, 0.4),
            canonical_value(CriterionId.CV_FIXED_COMBO, {1, 2}, 3, 0.4),
        ]
        with pytest.raises(ValueError):
            genuine_tripartite_aggregate(values)

    def test_rejects_repeated_targets(self):
        values = [
            canonical_value(CriterionId.CV_FIXED_COMBO, {2, 3}, 1, 0.4),
            canonical_value(CriterionId.CV_FIXED_COMBO, {2, 3}, 1, 0.4),
            canonical_value(CriterionId.CV_FIXED_COMBO, {1, 2}, 3, 0.4),
        ]
        with pytest.raises(ValueError):
            genuine_tripartite_aggregate(values)

    def test_rejects_three_obs_bound(self):
        values = [
            canonical_value(CriterionId.SPIN_SUM_3OBS, {2, 3}, 1, 0.4, bound=2.0),
            canonical_value(CriterionId.SPIN_SUM_3OBS, {1, 3}, 2, 0.4, bound=2.0),
            canonical_value(CriterionId.SPIN_SUM_3OBS, {1, 2}, 3, 0.4, bound=2.0),
        ]
        with pytest.raises(ValueError):
            genuine_tripartite_aggregate(values)

    def test_permutation_invariant(self):
        values = [
            canonical_value(CriterionId.CV_FIXED_COMBO, {2, 3}, 1, 0.1),
            canonical_value(CriterionId.CV_FIXED_COMBO, {1, 3}, 2, 0.2),
            canonical_value(CriterionId.CV_FIXED_COMBO, {1, 2}, 3, 0.3),
        ]
        a = genuine_tripartite_aggregate(values)
        b = genuine_tripartite_aggregate(values[::-1])
        assert a.sum == b.sum
        assert a.values == b.values

    def test_qubit_ghz_report_with_noise(self):
        report = ghz3_genuine_report(depolarize_global(ghz(3), 0.95))
        assert report.sum == pytest.approx(0.6, abs=1e-10)
        assert report.genuine


class TestMonogamy:
    def test_boundary_product(self):
        a = canonical_value(CriterionId.CV_PRODUCT, {2}, 1, 0.5)
        c = canonical_value(CriterionId.CV_PRODUCT, {3}, 1, 2.0)
        result = monogamy_check(a, c)
        assert result.product == pytest.approx(1.0)
        assert result.satisfied

    def test_rejects_overlapping_groups(self):
        a = canonical_value(CriterionId.CV_PRODUCT, {2, 3}, 1, 0.5)
        c = canonical_value(CriterionId.CV_PRODUCT, {3, 4}, 1, 2.0)
        with pytest.raises(ValueError):
            monogamy_check(a, c)

    def test_rejects_different_targets(self):
        a = canonical_value(CriterionId.CV_PRODUCT, {2}, 1, 0.5)
        c = canonical_value(CriterionId.CV_PRODUCT, {1}, 3, 2.0)
        with pytest.raises(ValueError):
            monogamy_check(a, c)

    def test_rejects_three_observable_criterion(self):
        a = canonical_value(CriterionId.SPIN_SUM_3OBS, {2}, 1, 0.5, bound=2.0)
        c = canonical_value(CriterionId.SPIN_SUM_3OBS, {3}, 1, 2.0, bound=2.0)
        with pytest.raises(ValueError):
            monogamy_check(a, c)

    def test_eavesdropper_partitions_at_half_tap(self):
        state = gaussian.eavesdrop_scenario(1.5, 0.5)
        a = steering_product_cv(state, 1, HomodynePlan.x_on(2, 3), HomodynePlan.p_on(2, 3))
        e = steering_product_cv(state, 1, HomodynePlan.x_on(4, 5), HomodynePlan.p_on(4, 5))
        result = monogamy_check(a, e)
        assert result.satisfied
        assert result.product >= 1.0 - 1e-9


class TestCollectiveScan:
    def test_qubit_ghz3(self):
        report = collective_scan(ghz(3), 3, {1, 2})
        assert report.full_group.value == pytest.approx(0.0, abs=1e-12)
        assert len(report.subsets) == 2
        for value in report.subsets:
            assert value.value >= 1.0 - 1e-9
        assert report.collective

    def test_cv_ghz(self):
        report = collective_scan(cv_ghz(1.0), 1, {2, 3})
        assert report.full_group.verdict
        for value in report.subsets:
            assert value.value >= 1.0 - 1e-9
        assert report.collective

    def test_product_state_is_not_collective(self):
        plus = np.ones(2, dtype=complex) / math.sqrt(2.0)
        state = qubits.PureState(np.kron(np.kron(plus, plus), plus))
        report = collective_scan(state, 3, {1, 2})
        assert report.full_group.value >= 1.0 - 1e-9
        assert not report.collective

    def test_cv_vacuum_is_not_collective(self):
        report = collective_scan(vacuum(3), 1, {2, 3})
        assert not report.full_group.verdict
        assert not report.collective

    def test_rejects_target_inside_group(self):
        with pytest.raises(ValueError):
            collective_scan(ghz(3), 1, {1, 2})

    def test_rejects_mismatched_config(self):
        with pytest.raises(ValueError):
            collective_scan(ghz(3), 3, {1, 2}, CvScanConfig())
        with pytest.raises(ValueError):
            collective_scan(cv_ghz(1.0), 1, {2, 3}, QubitScanConfig())

    def test_cv_angle_budget_guard(self):
        config = CvScanConfig(n_angles=36, max_combinations=10)
        with pytest.raises(ValueError):
            collective_scan(cv_ghz(1.0), 1, {2, 3}, config)

    def test_four_party_ghz_subsets_cannot_steer(self):
        report = collective_scan(ghz(4), 4, {1, 2, 3})
        assert report.full_group.value == pytest.approx(0.0, abs=1e-12)
        assert len(report.subsets) == 6
        for value in report.subsets:
            assert value.value >= 1.0 - 1e-9
        assert report.collective


class TestTripartiteScan:
    def test_ghz_qubit_genuine_under_purity(self):
        report = pure_state_tripartite_scan(ghz(3))
        assert report.purity_asserted
        assert report.genuine_under_purity
        assert all(v.verdict for v in report.per_site)

    def test_cv_ghz_genuine_under_purity(self):
        report = pure_state_tripartite_scan(cv_ghz(1.0))
        assert report.genuine_under_purity
        for value in report.per_site:
            assert value.value == pytest.approx(math.sqrt(6.0) * math.exp(-2.0), abs=1e-10)

    def test_vacuum_is_not_genuine(self):
        report = pure_state_tripartite_scan(vacuum(3))
        assert not report.genuine_under_purity

    def test_rejects_wrong_size(self):
        with pytest.raises(ValueError):
            pure_state_tripartite_scan(ghz(4))
        with pytest.raises(ValueError):
            pure_state_tripartite_scan(vacuum(4))
