"""Discrete daily SEIR stepper and trajectory simulator.

The recursion (all four updates computed from the day-n state):

    S_{n+1} = S_n - beta_n * S_n * I_n / N
    E_{n+1} = E_n + beta_n * S_n * I_n / N - sigma * E_n
    I_{n+1} = I_n + sigma * E_n - gamma_n * I_n
    R_{n+1} = R_n + gamma_n * I_n

The four flow terms cancel algebraically, so S+E+I+R stays at N up to
floating round-off. No clamping: a step that would drive a compartment
below -1e-9*N is recorded in the trajectory diagnostics and simulation
continues.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from ._backend import kernels
from .errors import DomainError, LengthError
from .rates import RateSeries

DEFAULT_SIGMA = 1 / 5.2  # latent rate; reciprocal mean incubation period


@dataclass(frozen=True)
class EpidemicConstants:
    population_n: float
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        if self.sigma <= 0:
            raise DomainError("sigma must be > 0")
        if self.population_n <= 0:
            raise DomainError("population_n must be > 0")


@dataclass(frozen=True)
class CompartmentState:
    """One day's susceptible/exposed/infectious/removed person-counts."""

    s: float
    e: float
    i: float
    r: float

    @property
    def total(self) -> float:
        return self.s + self.e + self.i + self.r


@dataclass(frozen=True)
class StepDiagnostic:
    """A step drove `compartment` below -1e-9*N on `day`."""

    day: int
    compartment: str
    value: float


@dataclass(frozen=True)
class Trajectory:
    """Dense per-day solution; index 0 corresponds to origin_date."""

    origin_date: date
    s: np.ndarray = field(repr=False)
    e: np.ndarray = field(repr=False)
    i: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    diagnostics: tuple[StepDiagnostic, ...] = ()

    def __len__(self) -> int:
        return len(self.s)

    def state_at(self, index: int) -> CompartmentState:
        return CompartmentState(float(self.s[index]), float(self.e[index]),
                                float(self.i[index]), float(self.r[index]))

    def date_at(self, index: int) -> date:
        return self.origin_date + timedelta(days=index)

    def index_of(self, day: date) -> int:
        idx = (day - self.origin_date).days
        if not 0 <= idx < len(self):
            raise DomainError(f"{day} outside trajectory span")
        return idx

    @property
    def states(self) -> list[CompartmentState]:
        return [self.state_at(k) for k in range(len(self))]


def initial_state(constants: EpidemicConstants, i0: float, r0: float) -> CompartmentState:
    """Day-0 state: S = N - I0 - R0, E = 0."""
    if i0 < 0 or r0 < 0:
        raise DomainError("i0 and r0 must be >= 0")
    if i0 + r0 > constants.population_n:
        raise DomainError("i0 + r0 exceeds the population")
    return CompartmentState(constants.population_n - i0 - r0, 0.0, i0, r0)


def step(state: CompartmentState, beta_n: float, gamma_n: float,
         constants: EpidemicConstants) -> CompartmentState:
    """One Euler day-step, all updates from the input state simultaneously."""
    if beta_n < 0 or gamma_n < 0:
        raise DomainError("beta_n and gamma_n must be >= 0")
    flow = beta_n * state.s * state.i / constants.population_n
    sig_e = constants.sigma * state.e
    gam_i = gamma_n * state.i
    return CompartmentState(
        state.s - flow,
        state.e + flow - sig_e,
        state.i + sig_e - gam_i,
        state.r + gam_i,
    )


def simulate(init: CompartmentState, beta_series, gamma_series,
             constants: EpidemicConstants, n_days: int,
             origin_date: date | None = None) -> Trajectory:
    """Iterate the day-step n_days times.

    beta_series/gamma_series may be RateSeries or plain per-day arrays and
    must cover at least n_days entries (entry k drives the step from day k
    to day k+1).
    """
    if n_days < 0:
        raise DomainError("n_days must be >= 0")
    beta, origin_b = _series_values(beta_series)
    gamma, origin_g = _series_values(gamma_series)
    if origin_b is not None and origin_g is not None and origin_b != origin_g:
        raise LengthError("beta and gamma series have different origins")
    origin = origin_date or origin_b or origin_g or date(2020, 1, 1)
    if len(beta) < n_days or len(gamma) < n_days:
        raise LengthError(
            f"rate series cover {min(len(beta), len(gamma))} days, need {n_days}")
    s, e, i, r, warns = kernels.simulate(
        init.s, init.e, init.i, init.r,
        np.ascontiguousarray(beta, dtype=np.float64),
        np.ascontiguousarray(gamma, dtype=np.float64),
        constants.sigma, constants.population_n, n_days)
    diags = tuple(StepDiagnostic(day, comp, val) for day, comp, val in warns)
    return Trajectory(origin, s, e, i, r, diags)


def _series_values(series):
    if isinstance(series, RateSeries):
        return series.values, series.origin_date
    return np.asarray(series, dtype=np.float64), None
