"""Shared value types used by both the qubit and Gaussian backends."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable


class CriterionId(enum.Enum):
    """Identifies which steering inequality produced a value."""

    CV_PRODUCT = "cv-product"
    SPIN_SUM_2OBS = "spin-sum-2obs"
    SPIN_SUM_3OBS = "spin-sum-3obs"
    CV_FIXED_COMBO = "cv-fixed-combo"


# Criteria built from two observables per site.  The three-observable spin
# sum is excluded: its bound is 2 and the monogamy product argument does not
# apply to it.
TWO_OBSERVABLE_CRITERIA = frozenset(
    {CriterionId.CV_PRODUCT, CriterionId.SPIN_SUM_2OBS, CriterionId.CV_FIXED_COMBO}
)


@dataclass(frozen=True)
class SitePartition:
    """A steering group A and the single target site B it tries to steer.

    Sites are 1-based.  For Gaussian states "site" means "mode".
    """

    steering_group: frozenset[int]
    target_site: int

    def __post_init__(self) -> None:
        group = frozenset(int(s) for s in self.steering_group)
        object.__setattr__(self, "steering_group", group)
        object.__setattr__(self, "target_site", int(self.target_site))
        if not group:
            raise ValueError("steering group must be non-empty")
        if min(group) < 1 or self.target_site < 1:
            raise ValueError("sites are 1-based positive integers")
        if self.target_site in group:
            raise ValueError("target site must not belong to the steering group")

    @property
    def sites(self) -> frozenset[int]:
        return self.steering_group | {self.target_site}


def partition(steering_group: Iterable[int], target_site: int) -> SitePartition:
    """Convenience constructor accepting any iterable of sites."""
    return SitePartition(frozenset(steering_group), target_site)


@dataclass(frozen=True)
class SteeringValue:
    """One evaluated steering criterion.

    The verdict is strict: value == bound is not a violation.
    """

    criterion_id: CriterionId
    partition: SitePartition
    value: float
    bound: float
    verdict: bool

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "bound", float(self.bound))
        if not isinstance(self.criterion_id, CriterionId):
            raise ValueError("criterion_id must be a CriterionId")
        if self.bound not in (1.0, 2.0):
            raise ValueError(f"bound must be 1 or 2, got {self.bound}")
        if not (self.value >= 0.0 and math.isfinite(self.value)):
            raise ValueError(f"value must be finite and non-negative, got {self.value}")
        if self.verdict != (self.value < self.bound):
            raise ValueError("verdict must equal (value < bound)")

    @classmethod
    def of(
        cls,
        criterion_id: CriterionId,
        partition: SitePartition,
        value: float,
        bound: float = 1.0,
    ) -> "SteeringValue":
        value = float(value)
        bound = float(bound)
        return cls(criterion_id, partition, value, bound, value < bound)

    def to_dict(self) -> dict:
        """Flat JSON-ready representation."""
        return {
            "record": "steering-value",
            "criterion": self.criterion_id.value,
            "target": self.partition.target_site,
            "group": sorted(self.partition.steering_group),
            "value": self.value,
            "bound": self.bound,
            "verdict": self.verdict,
        }
