"""Scenario projection: extend fitted rate curves past T4 and re-simulate.

Coefficient conventions (asymmetric on purpose, mirroring how measures are
described):

  on [T4, T5]   beta blends to beta(T4) / coef1   (coef1 > 1 strengthens)
                gamma blends to gamma(T4) * coef2 (coef2 > 1 strengthens)
  on [T5, H]    beta blends to beta(T5) * coef11  (coef11 > 1 relaxes)
                gamma blends to gamma(T5) / coef22(coef22 > 1 relaxes)

All four blends use the same exponential segment form (and the same
lambda) as the fitted splines; the post-T5 targets are assigned at the
horizon date.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .errors import DomainError, LengthError
from .fitting import FittedModel, ObservationSet
from .rates import RateSeries, build_rate_curves, eval_segment, reproduction_number
from .seir import (
    DEFAULT_SIGMA,
    EpidemicConstants,
    Trajectory,
    initial_state,
    simulate,
)

COEFFICIENT_CONVENTION = {
    "coef1": "beta on [T4, T5]: target beta(T4)/coef1; > 1 strengthens measures (beta shrinks)",
    "coef2": "gamma on [T4, T5]: target gamma(T4)*coef2; > 1 strengthens measures (gamma grows)",
    "coef11": "beta after T5: target beta(T5)*coef11 at the horizon; > 1 relaxes measures (beta grows)",
    "coef22": "gamma after T5: target gamma(T5)/coef22 at the horizon; > 1 relaxes measures (gamma shrinks)",
}


@dataclass(frozen=True)
class ScenarioSpec:
    """T5 offset, horizon and the four what-if coefficients."""

    t5_offset_days: int = 15
    horizon_days: int = 60
    coef1: float = 1.0
    coef2: float = 1.0
    coef11: float = 1.0
    coef22: float = 1.0

    def __post_init__(self):
        if self.t5_offset_days <= 0:
            raise DomainError("t5_offset_days must be > 0")
        if self.horizon_days <= self.t5_offset_days:
            raise DomainError("horizon_days must exceed t5_offset_days")
        for name in ("coef1", "coef2", "coef11", "coef22"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be > 0")

    def to_dict(self) -> dict:
        return {
            "t5_offset_days": self.t5_offset_days,
            "horizon_days": self.horizon_days,
            "coef1": self.coef1,
            "coef2": self.coef2,
            "coef11": self.coef11,
            "coef22": self.coef22,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSpec":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


@dataclass(frozen=True)
class Projection:
    """Extended rates and trajectory over [T1, horizon]."""

    beta_ext: RateSeries
    gamma_ext: RateSeries
    trajectory: Trajectory
    r0_series: RateSeries
    peak_date: date       # of I(t) on [T4, horizon]
    peak_value: float
    value_at_horizon: float
    t4: date
    t5: date
    spec: ScenarioSpec

    @property
    def horizon_date(self) -> date:
        return self.t4 + timedelta(days=self.spec.horizon_days)

    def to_dict(self) -> dict:
        traj = self.trajectory
        n = len(traj)
        return {
            "dates": [traj.date_at(k).isoformat() for k in range(n)],
            "beta": [float(v) for v in self.beta_ext.values],
            "gamma": [float(v) for v in self.gamma_ext.values],
            "s": [float(v) for v in traj.s],
            "e": [float(v) for v in traj.e],
            "i": [float(v) for v in traj.i],
            "r": [float(v) for v in traj.r],
            "r0": [float(v) for v in self.r0_series.values],
            "t4": self.t4.isoformat(),
            "t5": self.t5.isoformat(),
            "horizon": self.horizon_date.isoformat(),
            "peak_date": self.peak_date.isoformat(),
            "peak_value": self.peak_value,
            "value_at_horizon": self.value_at_horizon,
            "scenario": self.spec.to_dict(),
        }


def _extend_one(fitted: np.ndarray, t5_offset: int, horizon: int,
                target_t5: float, target_h_factor: float, lam: float) -> np.ndarray:
    """Append the two scenario segments to one fitted per-day curve."""
    d_last = len(fitted) - 1
    out = np.empty(d_last + horizon + 1, dtype=np.float64)
    out[:d_last + 1] = fitted
    start = float(fitted[d_last])
    for off in range(1, t5_offset + 1):
        out[d_last + off] = eval_segment(start, target_t5, t5_offset, lam, off)
    at_t5 = float(out[d_last + t5_offset])
    seg2 = horizon - t5_offset
    target_h = at_t5 * target_h_factor
    for off in range(1, seg2 + 1):
        out[d_last + t5_offset + off] = eval_segment(at_t5, target_h, seg2, lam, off)
    return out


def extend_rates(model: FittedModel, spec: ScenarioSpec) -> tuple[RateSeries, RateSeries]:
    """Extend the fitted beta/gamma curves through the scenario horizon.

    The [T1, T4] prefix is the fitted curve verbatim; the extensions blend
    to the coefficient-defined targets at T5 and at the horizon.
    """
    theta = model.theta
    beta_fit, gamma_fit = build_rate_curves(theta, model.t1, model.t4)
    b_t4 = float(beta_fit.values[-1])
    g_t4 = float(gamma_fit.values[-1])
    beta_ext = _extend_one(beta_fit.values, spec.t5_offset_days, spec.horizon_days,
                           b_t4 / spec.coef1, spec.coef11, theta.lam)
    gamma_ext = _extend_one(gamma_fit.values, spec.t5_offset_days, spec.horizon_days,
                            g_t4 * spec.coef2, 1.0 / spec.coef22, theta.lam)
    return RateSeries(model.t1, beta_ext), RateSeries(model.t1, gamma_ext)


def project(model: FittedModel, obs: ObservationSet, spec: ScenarioSpec,
            sigma: float = DEFAULT_SIGMA) -> Projection:
    """Re-simulate from T1 with the extended curves.

    One continuous simulation: the state at T4 is the model's own, not
    re-initialized from the data, so the [T1, T4] part of the trajectory is
    identical to the fitted model's.
    """
    if (model.t1, model.t4) != (obs.t1, obs.t4):
        raise LengthError("model window does not match observation window")
    beta_ext, gamma_ext = extend_rates(model, spec)
    constants = EpidemicConstants(population_n=obs.population_n, sigma=sigma)
    init = initial_state(constants, model.i0, 0.0)
    n_days = obs.n_days + spec.horizon_days
    traj = simulate(init, beta_ext, gamma_ext, constants, n_days)
    t5 = model.t4 + timedelta(days=spec.t5_offset_days)
    peak_date, peak_value = find_peak(traj, model.t4)
    return Projection(
        beta_ext=beta_ext,
        gamma_ext=gamma_ext,
        trajectory=traj,
        r0_series=reproduction_number(beta_ext, gamma_ext),
        peak_date=peak_date,
        peak_value=peak_value,
        value_at_horizon=float(traj.i[-1]),
        t4=model.t4,
        t5=t5,
        spec=spec,
    )


def find_peak(trajectory: Trajectory, from_date: date) -> tuple[date, float]:
    """Earliest date attaining the maximum of I(t) on [from_date, end]."""
    start = trajectory.index_of(from_date)
    tail = trajectory.i[start:]
    if len(tail) == 0:
        raise DomainError("empty peak range")
    idx = start + int(np.argmax(tail))
    return trajectory.date_at(idx), float(trajectory.i[idx])
