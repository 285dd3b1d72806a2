"""Time-varying transmission/removal rates as exponential two-node splines.

Both rates are piecewise curves over the window [T1, T4] with interior
nodes T2 <= T3: constant before T2, then blending exponentially from one
node level to the next while interpolating the levels exactly at T2, T3
and T4. Beta is monotone nonincreasing, gamma nondecreasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta
from math import exp

import numpy as np

from ._backend import kernels
from .errors import DomainError, LengthError, ThetaValidationError

DEFAULT_LAMBDA = 0.4  # 1/day transition exponent; fixed, not fitted


@dataclass(frozen=True)
class ThetaSet:
    """The eight fitted parameters plus the (fixed) transition exponent.

    Node dates t2 <= t3 and the three levels of each rate at T2, T3, T4.
    """

    t2: date
    t3: date
    beta_t2: float
    beta_t3: float
    beta_t4: float
    gamma_t2: float
    gamma_t3: float
    gamma_t4: float
    lam: float = DEFAULT_LAMBDA

    def beta_levels(self):
        return (self.beta_t2, self.beta_t3, self.beta_t4)

    def gamma_levels(self):
        return (self.gamma_t2, self.gamma_t3, self.gamma_t4)

    def to_dict(self) -> dict:
        return {
            "t2": self.t2.isoformat(),
            "t3": self.t3.isoformat(),
            "beta_t2": self.beta_t2,
            "beta_t3": self.beta_t3,
            "beta_t4": self.beta_t4,
            "gamma_t2": self.gamma_t2,
            "gamma_t3": self.gamma_t3,
            "gamma_t4": self.gamma_t4,
            "lambda": self.lam,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ThetaSet":
        return cls(
            t2=date.fromisoformat(d["t2"]),
            t3=date.fromisoformat(d["t3"]),
            beta_t2=d["beta_t2"],
            beta_t3=d["beta_t3"],
            beta_t4=d["beta_t4"],
            gamma_t2=d["gamma_t2"],
            gamma_t3=d["gamma_t3"],
            gamma_t4=d["gamma_t4"],
            lam=d.get("lambda", DEFAULT_LAMBDA),
        )


@dataclass(frozen=True)
class RateSeries:
    """Per-day rate values; index 0 corresponds to origin_date."""

    origin_date: date
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return len(self.values)

    def date_at(self, index: int) -> date:
        return self.origin_date + timedelta(days=index)

    def index_of(self, day: date) -> int:
        idx = (day - self.origin_date).days
        if not 0 <= idx < len(self.values):
            raise DomainError(f"{day} outside series span")
        return idx

    def value_at(self, day: date) -> float:
        return float(self.values[self.index_of(day)])


def eval_segment(start_level: float, target_level: float, seg_len: int,
                 lam: float, offset: float) -> float:
    """One point of the exponential blend from start_level to target_level.

    value(offset) = target + (start - target) * (e^(-lam*offset) - e^(-lam*L))
                                               / (1 - e^(-lam*L))
    so the segment starts exactly at start_level, decays toward the target
    at rate lam, and hits target_level exactly at offset = seg_len.
    """
    if lam <= 0:
        raise DomainError("lam must be > 0")
    if seg_len == 0:
        if start_level != target_level:
            raise DomainError("zero-length segment with distinct levels")
        return start_level
    if seg_len < 1:
        raise DomainError("seg_len must be >= 1")
    if not 0 <= offset <= seg_len:
        raise DomainError(f"offset {offset} outside [0, {seg_len}]")
    if offset == 0:
        return start_level
    if offset == seg_len:
        return target_level
    ef = exp(-lam * seg_len)
    dec = exp(-lam * offset)
    return target_level + (start_level - target_level) * (dec - ef) / (1.0 - ef)


def validate_theta(theta: ThetaSet, t1: date, t4: date) -> list[str]:
    """All constraint violations of theta for the window [t1, t4]; [] if ok."""
    v = []
    if theta.t2 < t1 + timedelta(days=1):
        v.append("T2 must follow T1 by >= 1 day")
    if theta.t3 < theta.t2:
        v.append("T3 must not precede T2")
    if t4 < theta.t3 + timedelta(days=1):
        v.append("T4 must follow T3 by >= 1 day")
    if not theta.beta_t2 >= theta.beta_t3 >= theta.beta_t4 >= 0:
        v.append("beta not nonincreasing (require beta_t2 >= beta_t3 >= beta_t4 >= 0)")
    if not 0 < theta.gamma_t2 <= theta.gamma_t3 <= theta.gamma_t4:
        v.append("gamma not nondecreasing (require 0 < gamma_t2 <= gamma_t3 <= gamma_t4)")
    if not theta.lam > 0:
        v.append("lambda must be > 0")
    if theta.t2 == theta.t3:
        # coincident nodes collapse the middle segment; its level must match
        if theta.beta_t3 != theta.beta_t2:
            v.append("coincident nodes require beta_t3 == beta_t2")
        if theta.gamma_t3 != theta.gamma_t2:
            v.append("coincident nodes require gamma_t3 == gamma_t2")
    return v


def build_rate_curves(theta: ThetaSet, t1: date, t4: date) -> tuple[RateSeries, RateSeries]:
    """Realize theta as dense per-day (beta, gamma) series over [t1, t4]."""
    violations = validate_theta(theta, t1, t4)
    if violations:
        raise ThetaValidationError(violations)
    n_points = (t4 - t1).days + 1
    k2 = (theta.t2 - t1).days
    k3 = (theta.t3 - t1).days
    beta = kernels.rate_curve(n_points, k2, k3, theta.beta_t2, theta.beta_t3,
                              theta.beta_t4, theta.lam)
    gamma = kernels.rate_curve(n_points, k2, k3, theta.gamma_t2, theta.gamma_t3,
                               theta.gamma_t4, theta.lam)
    return RateSeries(t1, beta), RateSeries(t1, gamma)


def reproduction_number(beta: RateSeries, gamma: RateSeries) -> RateSeries:
    """Pointwise beta(t)/gamma(t)."""
    if beta.origin_date != gamma.origin_date:
        raise LengthError("beta and gamma series have different origins")
    if len(beta) != len(gamma):
        raise LengthError("beta and gamma series have different lengths")
    if np.any(gamma.values <= 0):
        raise DomainError("gamma must be > 0 everywhere for R0")
    return RateSeries(beta.origin_date, beta.values / gamma.values)
