"""Least-squares calibration of the spline-rate SEIR model.

The search is two-stage: an exhaustive grid over integer-day node pairs
(T2, T3), and within each pair a bounded derivative-free simplex search
over the six rate levels, run from several random starts plus one
data-driven heuristic start. Monotonicity of the levels is enforced by
construction: the search variables are a base level plus nonnegative
increments, clipped to the configured bounds.

Everything is deterministic for a fixed seed: each node-pair cell draws
its starts from a generator seeded by (seed, k2, k3), so results do not
depend on evaluation order.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from datetime import date, timedelta
from math import sqrt

import numpy as np

from ._backend import kernels
from .errors import DomainError, FitError, LengthError, ThetaValidationError
from .rates import DEFAULT_LAMBDA, ThetaSet, build_rate_curves, validate_theta
from .seir import DEFAULT_SIGMA, EpidemicConstants, initial_state, simulate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObservationSet:
    """Observed series for one country over [t1, t4], scale already applied.

    idata: daily new infected counts; rcum: cumulative removed
    (recovered + deaths) rebased so rcum[0] corresponds to t1.
    """

    country: str
    t1: date
    t4: date
    idata: np.ndarray = field(repr=False)
    rcum: np.ndarray = field(repr=False)
    population_n: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "idata",
                           np.ascontiguousarray(self.idata, dtype=np.float64))
        object.__setattr__(self, "rcum",
                           np.ascontiguousarray(self.rcum, dtype=np.float64))
        n = (self.t4 - self.t1).days + 1
        if n < 2:
            raise DomainError("t4 must be after t1")
        if len(self.idata) != n or len(self.rcum) != n:
            raise LengthError(
                f"series must cover [{self.t1}, {self.t4}] densely "
                f"({n} days; got {len(self.idata)} and {len(self.rcum)})")
        if np.any(self.idata < 0):
            raise DomainError("idata entries must be >= 0")
        if np.any(np.diff(self.rcum) < 0):
            raise DomainError("rcum must be nondecreasing")
        if self.population_n <= 0:
            raise DomainError("population_n must be > 0")
        if self.scale <= 0:
            raise DomainError("scale must be > 0")

    @property
    def n_days(self) -> int:
        return (self.t4 - self.t1).days

    def to_dict(self) -> dict:
        return {
            "country": self.country,
            "t1": self.t1.isoformat(),
            "t4": self.t4.isoformat(),
            "idata": [float(v) for v in self.idata],
            "rcum": [float(v) for v in self.rcum],
            "population_n": self.population_n,
            "scale": self.scale,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ObservationSet":
        return cls(
            country=d["country"],
            t1=date.fromisoformat(d["t1"]),
            t4=date.fromisoformat(d["t4"]),
            idata=np.asarray(d["idata"], dtype=np.float64),
            rcum=np.asarray(d["rcum"], dtype=np.float64),
            population_n=d["population_n"],
            scale=d.get("scale", 1.0),
        )

    def fingerprint(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class FitConfig:
    top_k: int = 3
    w1: object = 1.0  # constant or per-day sequence of nonnegative weights
    w2: object = 1.0
    beta_bounds: tuple = (0.01, 2.0)
    gamma_bounds: tuple = (0.01, 1.0)
    node_grid_step: int = 1
    multistart: int = 8
    max_fevals: int = 300  # simplex budget per start
    polish_fevals: int = 800  # extra budget for the leading cells
    polish_cells: int = 12
    seed: int = 0
    lam: float = DEFAULT_LAMBDA
    sigma: float = DEFAULT_SIGMA
    # restricted searches (used by miniature/brute-force instances):
    level_lattice: int = 0  # >0: enumerate an evenly spaced K-point level lattice
    t2_candidates: tuple = ()  # explicit node dates; empty = full grid
    t3_candidates: tuple = ()

    def __post_init__(self):
        bmin, bmax = self.beta_bounds
        gmin, gmax = self.gamma_bounds
        if not (0 < bmin < bmax and 0 < gmin < gmax):
            raise DomainError("rate bounds must be positive and ordered")
        if self.top_k < 1:
            raise DomainError("top_k must be >= 1")
        if self.node_grid_step < 1:
            raise DomainError("node_grid_step must be >= 1")

    def to_dict(self) -> dict:
        d = {
            "top_k": self.top_k,
            "w1": self.w1 if np.isscalar(self.w1) else [float(v) for v in self.w1],
            "w2": self.w2 if np.isscalar(self.w2) else [float(v) for v in self.w2],
            "beta_bounds": list(self.beta_bounds),
            "gamma_bounds": list(self.gamma_bounds),
            "node_grid_step": self.node_grid_step,
            "multistart": self.multistart,
            "max_fevals": self.max_fevals,
            "polish_fevals": self.polish_fevals,
            "polish_cells": self.polish_cells,
            "seed": self.seed,
            "lambda": self.lam,
            "sigma": self.sigma,
            "level_lattice": self.level_lattice,
            "t2_candidates": [t.isoformat() for t in self.t2_candidates],
            "t3_candidates": [t.isoformat() for t in self.t3_candidates],
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FitConfig":
        kw = {}
        for key in ("top_k", "w1", "w2", "node_grid_step", "multistart",
                    "max_fevals", "polish_fevals", "polish_cells", "seed",
                    "sigma", "level_lattice"):
            if key in d:
                kw[key] = d[key]
        if "lambda" in d:
            kw["lam"] = d["lambda"]
        if "beta_bounds" in d:
            kw["beta_bounds"] = tuple(d["beta_bounds"])
        if "gamma_bounds" in d:
            kw["gamma_bounds"] = tuple(d["gamma_bounds"])
        for key in ("t2_candidates", "t3_candidates"):
            if key in d:
                kw[key] = tuple(date.fromisoformat(s) for s in d[key])
        return cls(**kw)


@dataclass(frozen=True)
class FittedModel:
    theta: ThetaSet
    fval: float
    rank: int
    rmse_infected: float
    rmse_removed: float
    peak_date: date
    peak_value: float
    t1: date  # fit window and day-0 state, kept so the model curve can be
    t4: date  # rebuilt from the model alone
    i0: float

    def to_dict(self) -> dict:
        return {
            "theta": self.theta.to_dict(),
            "fval": self.fval,
            "rank": self.rank,
            "rmse_infected": self.rmse_infected,
            "rmse_removed": self.rmse_removed,
            "peak_date": self.peak_date.isoformat(),
            "peak_value": self.peak_value,
            "t1": self.t1.isoformat(),
            "t4": self.t4.isoformat(),
            "i0": self.i0,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FittedModel":
        return cls(
            theta=ThetaSet.from_dict(d["theta"]),
            fval=d["fval"],
            rank=d["rank"],
            rmse_infected=d["rmse_infected"],
            rmse_removed=d["rmse_removed"],
            peak_date=date.fromisoformat(d["peak_date"]),
            peak_value=d["peak_value"],
            t1=date.fromisoformat(d["t1"]),
            t4=date.fromisoformat(d["t4"]),
            i0=d["i0"],
        )


@dataclass(frozen=True)
class FitReport:
    models: tuple
    fmax: float
    evaluated_count: int
    config: FitConfig
    observation_fingerprint: str

    def to_dict(self) -> dict:
        return {
            "models": [m.to_dict() for m in self.models],
            "fmax": self.fmax,
            "evaluated_count": self.evaluated_count,
            "config": self.config.to_dict(),
            "observation_fingerprint": self.observation_fingerprint,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitReport":
        return cls(
            models=tuple(FittedModel.from_dict(m) for m in d["models"]),
            fmax=d["fmax"],
            evaluated_count=d["evaluated_count"],
            config=FitConfig.from_dict(d["config"]),
            observation_fingerprint=d["observation_fingerprint"],
        )


def resolve_weights(w, n: int) -> np.ndarray:
    """Constant-or-sequence weight spec -> dense per-day array."""
    if np.isscalar(w):
        arr = np.full(n, float(w))
    else:
        arr = np.ascontiguousarray(w, dtype=np.float64)
        if len(arr) != n:
            raise LengthError(f"weight series has {len(arr)} entries, need {n}")
    if np.any(arr < 0):
        raise DomainError("weights must be >= 0")
    return arr


def objective(theta: ThetaSet, obs: ObservationSet, config: FitConfig) -> float:
    """F(theta) = sum w1*(I - idata)^2 + sum w2*(R - rcum)^2 over [t1, t4]."""
    violations = validate_theta(theta, obs.t1, obs.t4)
    if violations:
        raise ThetaValidationError(violations)
    n = obs.n_days + 1
    w1 = resolve_weights(config.w1, n)
    w2 = resolve_weights(config.w2, n)
    k2 = (theta.t2 - obs.t1).days
    k3 = (theta.t3 - obs.t1).days
    return kernels.sse_objective(
        k2, k3, theta.beta_t2, theta.beta_t3, theta.beta_t4,
        theta.gamma_t2, theta.gamma_t3, theta.gamma_t4,
        theta.lam, config.sigma, obs.population_n,
        float(obs.idata[0]), 0.0, obs.idata, obs.rcum, w1, w2)


def model_trajectory(theta: ThetaSet, obs: ObservationSet, sigma: float = DEFAULT_SIGMA):
    """Simulate theta over the observation window from the data's I(0)."""
    beta, gamma = build_rate_curves(theta, obs.t1, obs.t4)
    constants = EpidemicConstants(population_n=obs.population_n, sigma=sigma)
    init = initial_state(constants, float(obs.idata[0]), 0.0)
    return simulate(init, beta, gamma, constants, obs.n_days)


def fitted_trajectory(model: FittedModel, population_n: float,
                      sigma: float = DEFAULT_SIGMA):
    """The model's own curve over its window (uses the stored I(0))."""
    beta, gamma = build_rate_curves(model.theta, model.t1, model.t4)
    constants = EpidemicConstants(population_n=population_n, sigma=sigma)
    init = initial_state(constants, model.i0, 0.0)
    return simulate(init, beta, gamma, constants, (model.t4 - model.t1).days)


def residuals(model: FittedModel, obs: ObservationSet,
              sigma: float = DEFAULT_SIGMA) -> tuple[np.ndarray, np.ndarray]:
    """Per-day (I - idata, R - rcum) of the model curve against obs."""
    if (model.t1, model.t4) != (obs.t1, obs.t4):
        raise LengthError("model window does not match observation window")
    traj = fitted_trajectory(model, obs.population_n, sigma)
    return traj.i - obs.idata, traj.r - obs.rcum


# ---------------------------------------------------------------------------
# Derivative-free simplex search (Nelder-Mead with box clipping).
#
# Implemented in-package instead of scipy.optimize: the per-call wrapper
# overhead there dominates the compiled kernel at the millions of
# evaluations a fit performs, and a single code path keeps reports
# identical across kernel backends. Deterministic: stable ordering, no
# randomness.
# ---------------------------------------------------------------------------

def _nelder_mead(fun, x0, lower, upper, maxfev, xatol=1e-4, frtol=1e-8):
    rho, chi, psi, sigma = 1.0, 2.0, 0.5, 0.5
    n = len(x0)

    def clipped(x):
        return np.minimum(np.maximum(x, lower), upper)

    sim = np.empty((n + 1, n))
    sim[0] = clipped(np.asarray(x0, dtype=np.float64))
    steps = 0.05 * (upper - lower)
    for j in range(n):
        x = sim[0].copy()
        if x[j] + steps[j] <= upper[j]:
            x[j] += steps[j]
        else:
            x[j] -= steps[j]
        sim[j + 1] = x
    fsim = np.array([fun(sim[k]) for k in range(n + 1)])
    nfev = n + 1

    while nfev < maxfev:
        order = np.argsort(fsim, kind="stable")
        sim = sim[order]
        fsim = fsim[order]
        if (np.max(np.abs(sim[1:] - sim[0])) <= xatol
                and fsim[-1] - fsim[0] <= frtol * (abs(fsim[0]) + 1e-12)):
            break
        xbar = sim[:-1].mean(axis=0)
        xr = clipped(xbar + rho * (xbar - sim[-1]))
        fr = fun(xr)
        nfev += 1
        if fr < fsim[0]:
            if nfev < maxfev:
                xe = clipped(xbar + rho * chi * (xbar - sim[-1]))
                fe = fun(xe)
                nfev += 1
                if fe < fr:
                    sim[-1], fsim[-1] = xe, fe
                else:
                    sim[-1], fsim[-1] = xr, fr
            else:
                sim[-1], fsim[-1] = xr, fr
        elif fr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fr
        else:
            shrink = False
            if fr < fsim[-1]:
                xc = clipped(xbar + psi * rho * (xbar - sim[-1]))
                fc = fun(xc)
                nfev += 1
                if fc <= fr:
                    sim[-1], fsim[-1] = xc, fc
                else:
                    shrink = True
            else:
                xcc = clipped(xbar - psi * (xbar - sim[-1]))
                fcc = fun(xcc)
                nfev += 1
                if fcc < fsim[-1]:
                    sim[-1], fsim[-1] = xcc, fcc
                else:
                    shrink = True
            if shrink:
                for j in range(1, n + 1):
                    sim[j] = clipped(sim[0] + sigma * (sim[j] - sim[0]))
                    fsim[j] = fun(sim[j])
                nfev += n

    best = int(np.argmin(fsim))
    return sim[best], float(fsim[best])


# ---------------------------------------------------------------------------
# Per-cell search over the six levels.
# ---------------------------------------------------------------------------

class _Tally:
    """Counts objective evaluations and tracks the largest value seen."""

    __slots__ = ("count", "fmax")

    def __init__(self):
        self.count = 0
        self.fmax = -np.inf

    def note(self, f):
        self.count += 1
        if f > self.fmax:
            self.fmax = f


def _heuristic_levels(obs: ObservationSet, k2: int, k3: int, config: FitConfig):
    """Data-driven starting levels for one node pair.

    gamma from the removed-to-infected-days ratio; beta from the early/late
    exponential growth rate via the linearized relation
    (r + sigma)(r + gamma) = beta * sigma.
    """
    bmin, bmax = config.beta_bounds
    gmin, gmax = config.gamma_bounds
    sig = config.sigma
    idata = obs.idata
    total_i = float(np.sum(idata))
    gh = float(np.clip((obs.rcum[-1] - obs.rcum[0]) / max(total_i, 1e-9), gmin, gmax))
    logi = np.log(np.maximum(idata, 1.0))
    d_last = len(idata) - 1

    def growth(a, b):
        xs = np.arange(a, b + 1, dtype=np.float64)
        return float(np.polyfit(xs, logi[a:b + 1], 1)[0])

    def beta_from(r):
        return float(np.clip((r + sig) * (r + gh) / sig, bmin, bmax))

    b2 = beta_from(growth(0, k2))
    b4 = min(beta_from(growth(k3, d_last)), b2)
    b3 = sqrt(b2 * b4)
    g2 = float(np.clip(0.7 * gh, gmin, gmax))
    g3 = float(np.clip(gh, g2, gmax))
    g4 = float(np.clip(1.3 * gh, g3, gmax))
    return (b2, b3, b4), (g2, g3, g4)


def _search_cell_simplex(cell_objective, k2, k3, obs, config, tally):
    """Multistart simplex search over the levels of one (k2, k3) cell.

    Returns (fval, levels) with levels = (b2, b3, b4, g2, g3, g4); ties on
    fval resolve to the lexicographically smaller levels tuple.
    """
    bmin, bmax = config.beta_bounds
    gmin, gmax = config.gamma_bounds
    coincident = k2 == k3
    (hb2, hb3, hb4), (hg2, hg3, hg4) = _heuristic_levels(obs, k2, k3, config)

    if coincident:
        # T2 == T3: the middle level equals the pre-node constant, so only
        # four parameters remain: (b4, b_rise, g2, g_rise).
        lower = np.array([bmin, 0.0, gmin, 0.0])
        upper = np.array([bmax, bmax - bmin, gmax, gmax - gmin])

        def to_levels(x):
            b2 = min(x[0] + x[1], bmax)
            g4 = min(x[2] + x[3], gmax)
            return (b2, b2, x[0], x[2], x[2], g4)

        heuristic = np.array([hb4, hb2 - hb4, hg2, hg4 - hg2])

        def draw(rng):
            return np.array([
                rng.uniform(bmin, bmax),
                rng.uniform(0.0, (bmax - bmin) / 2),
                rng.uniform(gmin, gmax),
                rng.uniform(0.0, (gmax - gmin) / 2),
            ])
    else:
        lower = np.array([bmin, 0.0, 0.0, gmin, 0.0, 0.0])
        upper = np.array([bmax, bmax - bmin, bmax - bmin,
                          gmax, gmax - gmin, gmax - gmin])

        def to_levels(x):
            b3 = min(x[0] + x[1], bmax)
            b2 = min(b3 + x[2], bmax)
            g3 = min(x[3] + x[4], gmax)
            g4 = min(g3 + x[5], gmax)
            return (b2, b3, x[0], x[3], g3, g4)

        heuristic = np.array([hb4, hb3 - hb4, hb2 - hb3, hg2, hg3 - hg2, hg4 - hg3])

        def draw(rng):
            return np.array([
                rng.uniform(bmin, bmax),
                rng.uniform(0.0, (bmax - bmin) / 2),
                rng.uniform(0.0, (bmax - bmin) / 2),
                rng.uniform(gmin, gmax),
                rng.uniform(0.0, (gmax - gmin) / 2),
                rng.uniform(0.0, (gmax - gmin) / 2),
            ])

    def fun(x):
        f = cell_objective(to_levels(x))
        tally.note(f)
        return f

    rng = np.random.default_rng((config.seed, k2, k3))
    starts = [heuristic] + [draw(rng) for _ in range(config.multistart)]
    best = None
    for x0 in starts:
        x, f = _nelder_mead(fun, x0, lower, upper, config.max_fevals)
        key = (f, to_levels(x))
        if best is None or key < best:
            best = key
    return best[0], best[1], (lower, upper, to_levels, fun)


def _search_cell_lattice(cell_objective, k2, k3, config, tally):
    """Exhaustive enumeration over an evenly spaced level lattice.

    Candidates are visited in ascending lexicographic order of
    (b2, b3, b4, g2, g3, g4); only strictly better values replace the
    incumbent, which implements the lexicographic tie-break.
    """
    bmin, bmax = config.beta_bounds
    gmin, gmax = config.gamma_bounds
    k = config.level_lattice
    bvals = np.linspace(bmin, bmax, k)
    gvals = np.linspace(gmin, gmax, k)
    coincident = k2 == k3
    best_f = np.inf
    best_levels = None
    for b2 in bvals:
        for b3 in (b for b in bvals if b <= b2) if not coincident else (b2,):
            for b4 in (b for b in bvals if b <= b3):
                for g2 in gvals:
                    for g3 in (g for g in gvals if g >= g2) if not coincident else (g2,):
                        for g4 in (g for g in gvals if g >= g3):
                            levels = (float(b2), float(b3), float(b4),
                                      float(g2), float(g3), float(g4))
                            f = cell_objective(levels)
                            tally.note(f)
                            if f < best_f:
                                best_f = f
                                best_levels = levels
    return best_f, best_levels


def _node_offsets(obs: ObservationSet, config: FitConfig):
    """Admissible (k2, k3) day-offset pairs, in ascending order."""
    d_last = obs.n_days
    if config.t2_candidates:
        k2s = sorted((t - obs.t1).days for t in config.t2_candidates)
    else:
        k2s = list(range(1, d_last, config.node_grid_step))
    if config.t3_candidates:
        k3s = sorted((t - obs.t1).days for t in config.t3_candidates)
    else:
        k3s = list(range(1, d_last, config.node_grid_step))
    pairs = [(k2, k3) for k2 in k2s for k3 in k3s
             if 1 <= k2 <= k3 <= d_last - 1]
    return pairs


def fit(obs: ObservationSet, config: FitConfig = FitConfig()) -> FitReport:
    """Calibrate theta against obs; returns the top-k near-optimal models.

    Models are distinct in (T2, T3) -- within one node pair only the best
    level set is kept -- and sorted ascending by objective value with
    deterministic tie-breaking (earlier T2, then T3, then lexicographically
    smaller levels).
    """
    if obs.n_days < 7:
        raise FitError(f"window of {obs.n_days} days is too short (need >= 7)")
    pairs = _node_offsets(obs, config)
    if not pairs:
        raise FitError("no admissible (T2, T3) node pairs for this window")

    n = obs.n_days + 1
    w1 = resolve_weights(config.w1, n)
    w2 = resolve_weights(config.w2, n)
    i0 = float(obs.idata[0])
    tally = _Tally()

    def make_cell_objective(k2, k3):
        def cell_objective(levels):
            b2, b3, b4, g2, g3, g4 = levels
            return kernels.sse_objective(
                k2, k3, b2, b3, b4, g2, g3, g4,
                config.lam, config.sigma, obs.population_n,
                i0, 0.0, obs.idata, obs.rcum, w1, w2)
        return cell_objective

    cells = []  # (fval, k2, k3, levels, polish_handle)
    for k2, k3 in pairs:
        cell_objective = make_cell_objective(k2, k3)
        if config.level_lattice:
            f, levels = _search_cell_lattice(cell_objective, k2, k3, config, tally)
            handle = None
        else:
            f, levels, handle = _search_cell_simplex(
                cell_objective, k2, k3, obs, config, tally)
        cells.append((f, k2, k3, levels, handle))

    cells.sort(key=lambda c: (c[0], c[1], c[2], c[3]))

    if not config.level_lattice and config.polish_fevals > 0:
        n_polish = min(config.polish_cells, len(cells))
        polished = []
        for f, k2, k3, levels, handle in cells[:n_polish]:
            lower, upper, to_levels, fun = handle
            x0 = _levels_to_x(levels, k2 == k3)
            x, f_new = _nelder_mead(fun, x0, lower, upper,
                                    config.polish_fevals, xatol=1e-6)
            key_new = (f_new, to_levels(x))
            if key_new < (f, levels):
                f, levels = key_new
            polished.append((f, k2, k3, levels, None))
        cells = polished + cells[n_polish:]
        cells.sort(key=lambda c: (c[0], c[1], c[2], c[3]))

    models = []
    for rank, (f, k2, k3, levels, _) in enumerate(cells[:config.top_k], start=1):
        theta = ThetaSet(
            t2=obs.t1 + timedelta(days=k2),
            t3=obs.t1 + timedelta(days=k3),
            beta_t2=float(levels[0]), beta_t3=float(levels[1]),
            beta_t4=float(levels[2]), gamma_t2=float(levels[3]),
            gamma_t3=float(levels[4]), gamma_t4=float(levels[5]),
            lam=config.lam)
        traj = model_trajectory(theta, obs, config.sigma)
        res_i = traj.i - obs.idata
        res_r = traj.r - obs.rcum
        peak_idx = int(np.argmax(traj.i))
        models.append(FittedModel(
            theta=theta,
            fval=float(f),
            rank=rank,
            rmse_infected=float(sqrt(np.mean(res_i ** 2))),
            rmse_removed=float(sqrt(np.mean(res_r ** 2))),
            peak_date=obs.t1 + timedelta(days=peak_idx),
            peak_value=float(traj.i[peak_idx]),
            t1=obs.t1,
            t4=obs.t4,
            i0=i0,
        ))

    return FitReport(
        models=tuple(models),
        fmax=float(tally.fmax),
        evaluated_count=tally.count,
        config=config,
        observation_fingerprint=obs.fingerprint(),
    )


def _levels_to_x(levels, coincident: bool) -> np.ndarray:
    b2, b3, b4, g2, g3, g4 = levels
    if coincident:
        return np.array([b4, b2 - b4, g2, g4 - g2])
    return np.array([b4, b3 - b4, b2 - b3, g2, g3 - g2, g4 - g3])
