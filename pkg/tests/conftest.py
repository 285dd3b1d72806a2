"""Shared fixtures: synthetic observation sets and a miniature data dir."""

from datetime import date, timedelta
from math import exp
from pathlib import Path

import numpy as np
import pytest

from seirspline.fitting import FitConfig, ObservationSet
from seirspline.rates import ThetaSet, build_rate_curves
from seirspline.seir import EpidemicConstants, initial_state, simulate

REPO_ROOT = Path(__file__).resolve().parents[1]
REPO_DATA_DIR = REPO_ROOT / "data"


def make_synthetic_obs(theta: ThetaSet, t1: date, t4: date, population: float,
                       i0: float, country: str = "Synthia") -> ObservationSet:
    """Zero-noise observations generated by the model itself."""
    beta, gamma = build_rate_curves(theta, t1, t4)
    constants = EpidemicConstants(population_n=population)
    traj = simulate(initial_state(constants, i0, 0.0), beta, gamma,
                    constants, (t4 - t1).days)
    return ObservationSet(country=country, t1=t1, t4=t4,
                          idata=traj.i, rcum=traj.r, population_n=population)


@pytest.fixture(scope="session")
def theta_star() -> ThetaSet:
    return ThetaSet(t2=date(2020, 3, 11), t3=date(2020, 3, 26),
                    beta_t2=0.75, beta_t3=0.32, beta_t4=0.13,
                    gamma_t2=0.06, gamma_t3=0.11, gamma_t4=0.20)


@pytest.fixture(scope="session")
def synthetic_obs(theta_star) -> ObservationSet:
    return make_synthetic_obs(theta_star, date(2020, 3, 1), date(2020, 4, 12),
                              population=1e6, i0=150.0)


@pytest.fixture()
def fast_config() -> FitConfig:
    """Reduced search budget for unit tests."""
    return FitConfig(multistart=2, max_fevals=120, polish_fevals=300,
                     polish_cells=4, node_grid_step=2)


def write_fixture_csvs(root, countries, start: date, n_days: int):
    """Synthesize the three wide-format CSVs under root.

    `countries` maps name -> (confirmed, recovered, deaths) cumulative
    arrays of length n_days.
    """
    header = "Province/State,Country/Region,Lat,Long," + ",".join(
        f"{d.month}/{d.day}/{d.year % 100}"
        for d in (start + timedelta(days=k) for k in range(n_days)))
    kinds = {"confirmed": 0, "recovered": 1, "deaths": 2}
    for kind, pos in kinds.items():
        lines = [header]
        for name, series in countries.items():
            vals = ",".join(str(int(v)) for v in series[pos])
            lines.append(f",{name},0.0,0.0,{vals}")
        (root / f"time_series_covid19_{kind}_global.csv").write_text(
            "\n".join(lines) + "\n")


def oracle_objective(k2, k3, levels, obs, lam=0.4, sigma=1 / 5.2):
    """Independent objective evaluator: own blend formula, own Euler loop."""
    b2, b3, b4, g2, g3, g4 = levels
    n_last = len(obs.idata) - 1

    def rate_at(d, v2, v3, v4):
        if d <= k2:
            return v2
        if d <= k3:
            ef = exp(-lam * (k3 - k2))
            return v3 + (v2 - v3) * (exp(-lam * (d - k2)) - ef) / (1 - ef)
        ef = exp(-lam * (n_last - k3))
        return v4 + (v3 - v4) * (exp(-lam * (d - k3)) - ef) / (1 - ef)

    n_pop = obs.population_n
    s, e, i, r = n_pop - obs.idata[0], 0.0, float(obs.idata[0]), 0.0
    acc = 0.0
    for d in range(n_last + 1):
        acc += (i - obs.idata[d]) ** 2 + (r - obs.rcum[d]) ** 2
        if d == n_last:
            break
        bn = rate_at(d, b2, b3, b4)
        gn = rate_at(d, g2, g3, g4)
        flow = bn * s * i / n_pop
        sig_e = sigma * e
        gam_i = gn * i
        s = s - flow
        e = e + flow - sig_e
        i = i + sig_e - gam_i
        r = r + gam_i
    return acc


def brute_force_lattice_winner(obs, t2s, t3s, bvals, gvals):
    """Exhaustive enumeration over (node pair) x (monotone level lattice).

    Scans candidates in the fit's documented tie-break order and keeps
    strictly better objective values; returns (f, k2, k3, levels).
    """
    best = None
    for td2 in t2s:
        for td3 in t3s:
            k2, k3 = (td2 - obs.t1).days, (td3 - obs.t1).days
            if not 1 <= k2 <= k3 <= obs.n_days - 1:
                continue
            coincident = k2 == k3
            for b2 in bvals:
                for b3 in ([b2] if coincident else bvals[bvals <= b2]):
                    for b4 in bvals[bvals <= b3]:
                        for g2 in gvals:
                            for g3 in ([g2] if coincident else gvals[gvals >= g2]):
                                for g4 in gvals[gvals >= g3]:
                                    levels = (float(b2), float(b3), float(b4),
                                              float(g2), float(g3), float(g4))
                                    f = oracle_objective(k2, k3, levels, obs)
                                    key = (f, k2, k3, levels)
                                    if best is None or key < best:
                                        best = key
    return best


@pytest.fixture()
def fixture_data_dir(tmp_path):
    """Small on-disk data directory with one synthetic country."""
    rng = np.random.default_rng(99)
    start = date(2020, 3, 1)
    n = 40
    daily = np.concatenate([rng.integers(1, 8, 20), rng.integers(4, 16, n - 20)])
    confirmed = np.concatenate([[0], np.cumsum(daily)])[:n]
    recovered = (confirmed * 0.15).astype(int)
    deaths = (confirmed * 0.03).astype(int)
    write_fixture_csvs(tmp_path, {"Testland": (confirmed, recovered, deaths)},
                       start, n)
    (tmp_path / "populations.json").write_text('{"Testland": 500000}\n')
    return tmp_path
