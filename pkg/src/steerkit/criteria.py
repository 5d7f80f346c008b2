"""Steering criteria, verdict aggregation, monogamy, and subset scans."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Sequence, Union

from . import gaussian, qubits
from .core import (
    TWO_OBSERVABLE_CRITERIA,
    CriterionId,
    SitePartition,
    SteeringValue,
)
from .gaussian import GaussianState, HomodynePlan
from .qubits import DetectionModel, PauliString

MONOGAMY_TOLERANCE = 1e-9
COLLECTIVE_BOUNDARY_TOLERANCE = 1e-9

_PRODUCT_FAMILY = frozenset({CriterionId.CV_PRODUCT, CriterionId.CV_FIXED_COMBO})
_SUM_FAMILY = frozenset({CriterionId.SPIN_SUM_2OBS})

AnyState = Union[qubits.PureState, qubits.DensityMatrix, GaussianState]


@dataclass(frozen=True)
class GenuineSteeringReport:
    """Per-target steering values for a tripartite state and their sum.

    Genuine tripartite steering is certified when the three values sum to
    less than 1; the convexity argument behind the bound requires all three
    values to come from the same criterion family.
    """

    values: tuple[SteeringValue, SteeringValue, SteeringValue]
    sum: float
    genuine: bool
    method_notes: str

    def __post_init__(self) -> None:
        if len(self.values) != 3:
            raise ValueError("need exactly three per-target values")
        total = math.fsum(v.value for v in self.values)
        if abs(self.sum - total) > 1e-12:
            raise ValueError("sum does not match the per-target values")
        if self.genuine != (self.sum < 1.0):
            raise ValueError("genuine flag must equal (sum < 1)")

    def to_dict(self) -> dict:
        return {
            "record": "genuine-steering",
            "criteria": sorted({v.criterion_id.value for v in self.values}),
            "sum": self.sum,
            "bound": 1.0,
            "genuine": self.genuine,
            "method_notes": self.method_notes,
        }


@dataclass(frozen=True)
class CollectiveSteeringReport:
    """Best criterion value for the full group and for every proper subset.

    Collective steering holds when the full group steers while no proper
    subset reaches a value below 1.  Subset values are compared with a
    1e-9 guard so that constructions sitting exactly on the boundary
    (where rounding can land a hair under 1) still count as not steering.
    """

    full_group: SteeringValue
    subsets: tuple[SteeringValue, ...]
    collective: bool

    def __post_init__(self) -> None:
        expected = self.full_group.verdict and all(
            v.value >= 1.0 - COLLECTIVE_BOUNDARY_TOLERANCE for v in self.subsets
        )
        if self.collective != expected:
            raise ValueError(
                "collective flag must equal (full-group verdict and no subset below 1)"
            )


@dataclass(frozen=True)
class MonogamyResult:
    """Product of two steering values aimed at the same target."""

    product: float
    satisfied: bool


@dataclass(frozen=True)
class TripartiteScanReport:
    """Steering of each site by the other two, assuming a pure state."""

    per_site: tuple[SteeringValue, SteeringValue, SteeringValue]
    genuine_under_purity: bool
    purity_asserted: bool


def spin_two_obs(
    state: qubits.State,
    partition: SitePartition,
    predictor_x: PauliString,
    predictor_y: PauliString,
    model: DetectionModel | None = None,
) -> SteeringValue:
    """Two-observable spin criterion:
    Var(sigma_x - P_x) + Var(sigma_y - P_y) < 1 confirms steering of the target.
    """
    n = qubits.state_qubits(state)
    qubits.check_partition(partition, n)
    target_x = PauliString.single(n, partition.target_site, "X")
    target_y = PauliString.single(n, partition.target_site, "Y")
    value = 0.0
    for target, predictor in ((target_x, predictor_x), (target_y, predictor_y)):
        _require_group_support(predictor, partition)
        if model is None:
            value += qubits.variance_of_difference(state, target, predictor)
        else:
            value += qubits.inference_variance_with_loss(
                state, partition, target, predictor, model
            )
    return SteeringValue.of(CriterionId.SPIN_SUM_2OBS, partition, value, 1.0)


def spin_three_obs(
    state: qubits.State,
    partition: SitePartition,
    predictor_x: PauliString,
    predictor_y: PauliString,
    predictor_z: PauliString,
    model: DetectionModel | None = None,
) -> SteeringValue:
    """Three-observable spin criterion with bound 2; robust to detection
    inefficiency down to 1/3 under the marginal-mean no-click policy.
    """
    n = qubits.state_qubits(state)
    qubits.check_partition(partition, n)
    predictors = {"X": predictor_x, "Y": predictor_y, "Z": predictor_z}
    value = 0.0
    for label, predictor in predictors.items():
        _require_group_support(predictor, partition)
        target = PauliString.single(n, partition.target_site, label)
        if model is None:
            value += qubits.variance_of_difference(state, target, predictor)
        else:
            value += qubits.inference_variance_with_loss(
                state, partition, target, predictor, model
            )
    return SteeringValue.of(CriterionId.SPIN_SUM_3OBS, partition, value, 2.0)


def _require_group_support(predictor: PauliString, partition: SitePartition) -> None:
    extra = set(predictor.support) - set(partition.steering_group)
    if extra:
        raise ValueError(
            f"predictor acts outside the steering group at sites {sorted(extra)}"
        )


def genuine_tripartite_aggregate(
    values: Sequence[SteeringValue],
) -> GenuineSteeringReport:
    """Combine three per-target steering values into a genuine-steering report.

    All values must share a criterion family (all products of uncertainties,
    or all sums of variances) and the bound 1; mixing families would break
    the convexity argument behind the sum bound.
    """
    values = tuple(values)
    if len(values) != 3:
        raise ValueError(f"need exactly three per-target values, got {len(values)}")
    targets = [v.partition.target_site for v in values]
    if len(set(targets)) != 3:
        raise ValueError(f"targets must be three distinct sites, got {targets}")
    ids = {v.criterion_id for v in values}
    if any(v.bound != 1.0 for v in values):
        raise ValueError("aggregation requires criteria with bound 1")
    if not (ids <= _PRODUCT_FAMILY or ids <= _SUM_FAMILY):
        raise ValueError(
            "criterion family mismatch: values must be all products or all sums, "
            f"got {sorted(i.value for i in ids)}"
        )
    family = "product" if ids <= _PRODUCT_FAMILY else "sum"
    ordered = tuple(sorted(values, key=lambda v: v.partition.target_site))
    total = math.fsum(v.value for v in ordered)
    notes = f"family={family}; criteria={sorted(i.value for i in ids)}"
    return GenuineSteeringReport(ordered, total, total < 1.0, notes)


def monogamy_check(s_ba: SteeringValue, s_bc: SteeringValue) -> MonogamyResult:
    """Check the product bound for two disjoint groups steering one target.

    For two-observable criteria the product of the two values cannot drop
    below 1; a violation signals an implementation bug, not physics.
    """
    for value in (s_ba, s_bc):
        if value.criterion_id not in TWO_OBSERVABLE_CRITERIA:
            raise ValueError(
                f"monogamy applies to two-observable criteria, got {value.criterion_id.value}"
            )
    if s_ba.partition.target_site != s_bc.partition.target_site:
        raise ValueError("both values must aim at the same target")
    if s_ba.partition.steering_group & s_bc.partition.steering_group:
        raise ValueError("steering groups must be disjoint")
    product_value = s_ba.value * s_bc.value
    return MonogamyResult(product_value, product_value >= 1.0 - MONOGAMY_TOLERANCE)


@dataclass(frozen=True)
class QubitScanConfig:
    """Finite menu of per-site Pauli settings for subset evaluation."""

    settings_menu: tuple[str, ...] = ("X", "Y", "Z")

    def __post_init__(self) -> None:
        menu = tuple(str(s).upper() for s in self.settings_menu)
        if not menu or any(s not in ("X", "Y", "Z") for s in menu):
            raise ValueError("settings menu must be a non-empty subset of X, Y, Z")
        object.__setattr__(self, "settings_menu", menu)


@dataclass(frozen=True)
class CvScanConfig:
    """Homodyne-angle grid per measured mode; gains are always optimal."""

    n_angles: int = 36
    max_combinations: int = 200_000

    def __post_init__(self) -> None:
        if self.n_angles < 1:
            raise ValueError("need at least one angle")


ScanConfig = Union[QubitScanConfig, CvScanConfig]


def _best_spin_two_obs(
    state: qubits.State, group: frozenset[int], target_site: int, config: QubitScanConfig
) -> SteeringValue:
    """Best two-observable spin value over the settings menu, each inference
    variance minimized independently."""
    n = qubits.state_qubits(state)
    partition = SitePartition(group, target_site)
    target_x = PauliString.single(n, target_site, "X")
    target_y = PauliString.single(n, target_site, "Y")
    sites = sorted(group)
    best_x = best_y = math.inf
    for assignment in product(config.settings_menu, repeat=len(sites)):
        settings = dict(zip(sites, assignment))
        best_x = min(
            best_x, qubits.optimal_inference_variance(state, partition, target_x, settings)
        )
        best_y = min(
            best_y, qubits.optimal_inference_variance(state, partition, target_y, settings)
        )
    return SteeringValue.of(
        CriterionId.SPIN_SUM_2OBS, partition, best_x + best_y, 1.0
    )


def _best_cv_product(
    state: GaussianState, group: frozenset[int], target_mode: int, config: CvScanConfig
) -> SteeringValue:
    """Best product value over the homodyne-angle grid, with optimal gains."""
    modes = sorted(group)
    n_combinations = config.n_angles ** len(modes)
    if n_combinations > config.max_combinations:
        raise ValueError(
            f"angle menu has {n_combinations} combinations; coarsen the grid "
            f"or raise max_combinations"
        )
    angles = [k * math.pi / config.n_angles for k in range(config.n_angles)]
    target_x = gaussian.x_quadrature(state.n_modes, target_mode)
    target_p = gaussian.p_quadrature(state.n_modes, target_mode)
    best_x = best_p = math.inf
    for assignment in product(angles, repeat=len(modes)):
        plan = HomodynePlan.of(dict(zip(modes, assignment)))
        best_x = min(best_x, gaussian.optimal_conditional_variance(state, target_x, plan))
        best_p = min(best_p, gaussian.optimal_conditional_variance(state, target_p, plan))
    value = math.sqrt(best_x) * math.sqrt(best_p)
    return SteeringValue.of(
        CriterionId.CV_PRODUCT, SitePartition(group, target_mode), value, 1.0
    )


def _best_value(
    state: AnyState, group: frozenset[int], target_site: int, config: ScanConfig
) -> SteeringValue:
    if isinstance(state, GaussianState):
        return _best_cv_product(state, group, target_site, config)
    return _best_spin_two_obs(state, group, target_site, config)


def _default_config(state: AnyState, config: ScanConfig | None) -> ScanConfig:
    if config is None:
        return CvScanConfig() if isinstance(state, GaussianState) else QubitScanConfig()
    expected = CvScanConfig if isinstance(state, GaussianState) else QubitScanConfig
    if not isinstance(config, expected):
        raise ValueError(
            f"config type {type(config).__name__} does not match the state backend"
        )
    return config


def collective_scan(
    state: AnyState,
    target_site: int,
    full_group: Iterable[int],
    config: ScanConfig | None = None,
) -> CollectiveSteeringReport:
    """Evaluate the best steering value for the full group and for every
    nonempty proper subset; collective steering holds when only the full
    group succeeds.

    Subsets are evaluated with the best settings in the configured menu, so
    a subset failure means no strategy in the menu steers the target.
    """
    group = frozenset(int(s) for s in full_group)
    if not group:
        raise ValueError("full group must be non-empty")
    if target_site in group:
        raise ValueError("target site must not belong to the full group")
    config = _default_config(state, config)
    full_value = _best_value(state, group, target_site, config)
    subsets = []
    for size in range(1, len(group)):
        for subset in combinations(sorted(group), size):
            subsets.append(_best_value(state, frozenset(subset), target_site, config))
    collective = full_value.verdict and all(
        v.value >= 1.0 - COLLECTIVE_BOUNDARY_TOLERANCE for v in subsets
    )
    return CollectiveSteeringReport(full_value, tuple(subsets), collective)


def pure_state_tripartite_scan(
    state: AnyState, config: ScanConfig | None = None
) -> TripartiteScanReport:
    """For each site of a tripartite state, evaluate steering by the other two.

    For pure states, steering of every site by its complement certifies
    genuine tripartite steering; purity is asserted by the caller and only
    recorded here.
    """
    if isinstance(state, GaussianState):
        if state.n_modes != 3:
            raise ValueError(f"need exactly 3 modes, got {state.n_modes}")
        values = []
        for target in (1, 2, 3):
            k, m = sorted({1, 2, 3} - {target})
            values.append(gaussian.fixed_combo_steering(state, target, k, m))
    else:
        if qubits.state_qubits(state) != 3:
            raise ValueError(f"need exactly 3 qubits, got {qubits.state_qubits(state)}")
        config = _default_config(state, config)
        values = [
            _best_spin_two_obs(state, frozenset({1, 2, 3} - {target}), target, config)
            for target in (1, 2, 3)
        ]
    per_site = tuple(values)
    return TripartiteScanReport(per_site, all(v.verdict for v in per_site), True)


def ghz3_genuine_report(
    state: qubits.State, model: DetectionModel | None = None
) -> GenuineSteeringReport:
    """Fixed-predictor per-target values for a 3-qubit GHZ-form state."""
    if qubits.state_qubits(state) != 3:
        raise ValueError("fixed GHZ predictors are defined for 3 qubits here")
    values = []
    for target in (1, 2, 3):
        others = frozenset({1, 2, 3} - {target})
        values.append(
            spin_two_obs(
                state,
                SitePartition(others, target),
                qubits.ghz_predictor_for_target(3, target, "x"),
                qubits.ghz_predictor_for_target(3, target, "y"),
                model,
            )
        )
    return genuine_tripartite_aggregate(values)


def cv3_genuine_report(state: GaussianState) -> GenuineSteeringReport:
    """Fixed-combination per-target values for a 3-mode state."""
    if state.n_modes != 3:
        raise ValueError(f"need exactly 3 modes, got {state.n_modes}")
    values = []
    for target in (1, 2, 3):
        k, m = sorted({1, 2, 3} - {target})
        values.append(gaussian.fixed_combo_steering(state, target, k, m))
    return genuine_tripartite_aggregate(values)
