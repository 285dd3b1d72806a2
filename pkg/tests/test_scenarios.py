"""Scenario extension: identity, endpoint targets, monotone response."""

from datetime import date, timedelta

import numpy as np
import pytest

from seirspline.errors import DomainError
from seirspline.fitting import FitConfig, fit, fitted_trajectory
from seirspline.scenarios import ScenarioSpec, extend_rates, find_peak, project
from seirspline.seir import Trajectory


@pytest.fixture(scope="module")
def fitted(synthetic_obs):
    cfg = FitConfig(multistart=2, max_fevals=120, polish_fevals=300,
                    polish_cells=3, node_grid_step=3, top_k=1)
    report = fit(synthetic_obs, cfg)
    return report.models[0]


class TestScenarioSpec:
    def test_defaults_valid(self):
        spec = ScenarioSpec()
        assert spec.horizon_days == 60

    @pytest.mark.parametrize("kw", [
        {"t5_offset_days": 0},
        {"t5_offset_days": 60, "horizon_days": 60},
        {"coef1": 0.0},
        {"coef22": -1.0},
    ])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            ScenarioSpec(**kw)

    def test_dict_round_trip(self):
        spec = ScenarioSpec(t5_offset_days=5, coef11=1.4)
        assert ScenarioSpec.from_dict(spec.to_dict()) == spec


class TestExtendRates:
    def test_identity_scenario_constant(self, fitted):
        spec = ScenarioSpec(t5_offset_days=15, horizon_days=60)
        beta, gamma = extend_rates(fitted, spec)
        d_last = (fitted.t4 - fitted.t1).days
        assert np.all(beta.values[d_last:] == beta.values[d_last])
        assert np.all(gamma.values[d_last:] == gamma.values[d_last])

    def test_t5_target_exact(self, fitted):
        spec = ScenarioSpec(t5_offset_days=10, horizon_days=40, coef1=2.0)
        beta, _ = extend_rates(fitted, spec)
        d_last = (fitted.t4 - fitted.t1).days
        b_t4 = beta.values[d_last]
        assert beta.values[d_last + 10] == b_t4 / 2.0
        seg = beta.values[d_last:d_last + 11]
        assert np.all(np.diff(seg) <= 0)

    def test_post_t5_relaxation_target(self, fitted):
        spec = ScenarioSpec(t5_offset_days=15, horizon_days=60, coef11=1.4)
        beta, _ = extend_rates(fitted, spec)
        d_last = (fitted.t4 - fitted.t1).days
        b_t4 = beta.values[d_last]
        assert np.all(beta.values[d_last:d_last + 16] == b_t4)  # coef1 = 1
        assert beta.values[-1] == pytest.approx(1.4 * beta.values[d_last + 15],
                                                rel=1e-12)

    def test_gamma_targets(self, fitted):
        spec = ScenarioSpec(t5_offset_days=5, horizon_days=30,
                            coef2=1.5, coef22=2.0)
        _, gamma = extend_rates(fitted, spec)
        d_last = (fitted.t4 - fitted.t1).days
        g_t4 = gamma.values[d_last]
        g_t5 = gamma.values[d_last + 5]
        assert g_t5 == pytest.approx(1.5 * g_t4, rel=1e-12)
        assert gamma.values[-1] == pytest.approx(g_t5 / 2.0, rel=1e-12)

    def test_past_immutability(self, fitted):
        from seirspline.rates import build_rate_curves
        base_beta, base_gamma = build_rate_curves(fitted.theta, fitted.t1, fitted.t4)
        rng = np.random.default_rng(6)
        d_last = (fitted.t4 - fitted.t1).days
        for _ in range(20):
            spec = ScenarioSpec(
                t5_offset_days=int(rng.integers(1, 30)),
                horizon_days=int(rng.integers(31, 90)),
                coef1=float(rng.uniform(0.3, 3)), coef2=float(rng.uniform(0.3, 3)),
                coef11=float(rng.uniform(0.3, 3)), coef22=float(rng.uniform(0.3, 3)))
            beta, gamma = extend_rates(fitted, spec)
            assert np.array_equal(beta.values[:d_last + 1], base_beta.values)
            assert np.array_equal(gamma.values[:d_last + 1], base_gamma.values)

    def test_monotone_response_in_coefficients(self, fitted):
        base = dict(t5_offset_days=10, horizon_days=40)

        def curves(**kw):
            spec = ScenarioSpec(**{**base, **kw})
            beta, gamma = extend_rates(fitted, spec)
            return beta.values, gamma.values

        b_lo, _ = curves(coef1=1.0)
        b_hi, _ = curves(coef1=1.8)
        assert np.all(b_hi <= b_lo + 1e-15)  # stronger measures, smaller beta

        b_lo, _ = curves(coef11=1.0)
        b_hi, _ = curves(coef11=1.6)
        assert np.all(b_hi >= b_lo - 1e-15)

        _, g_lo = curves(coef2=1.0)
        _, g_hi = curves(coef2=1.7)
        assert np.all(g_hi >= g_lo - 1e-15)

        _, g_lo = curves(coef22=1.0)
        _, g_hi = curves(coef22=1.7)
        assert np.all(g_hi <= g_lo + 1e-15)


class TestProject:
    def test_past_trajectory_bit_identical(self, fitted, synthetic_obs):
        spec = ScenarioSpec(t5_offset_days=7, horizon_days=30,
                            coef1=1.7, coef2=0.6, coef11=1.3, coef22=0.8)
        proj = project(fitted, synthetic_obs, spec)
        base = fitted_trajectory(fitted, synthetic_obs.population_n)
        d_last = (fitted.t4 - fitted.t1).days
        assert np.array_equal(proj.trajectory.i[:d_last + 1], base.i)
        assert np.array_equal(proj.trajectory.s[:d_last + 1], base.s)

    def test_r0_consistency(self, fitted, synthetic_obs):
        from seirspline.rates import build_rate_curves, reproduction_number
        spec = ScenarioSpec()
        proj = project(fitted, synthetic_obs, spec)
        beta, gamma = build_rate_curves(fitted.theta, fitted.t1, fitted.t4)
        base_r0 = reproduction_number(beta, gamma)
        d_last = (fitted.t4 - fitted.t1).days
        assert np.array_equal(proj.r0_series.values[:d_last + 1], base_r0.values)

    def test_fields(self, fitted, synthetic_obs):
        spec = ScenarioSpec(t5_offset_days=15, horizon_days=60)
        proj = project(fitted, synthetic_obs, spec)
        assert proj.t5 == fitted.t4 + timedelta(days=15)
        assert proj.horizon_date == fitted.t4 + timedelta(days=60)
        assert len(proj.trajectory) == synthetic_obs.n_days + 60 + 1
        assert proj.value_at_horizon == float(proj.trajectory.i[-1])
        d = proj.to_dict()
        assert len(d["dates"]) == len(d["i"]) == len(d["r0"])

    def test_horizon_ordering_in_coef11(self, fitted, synthetic_obs):
        values = []
        for coef11 in (1.0, 1.4, 1.8):
            spec = ScenarioSpec(t5_offset_days=15, horizon_days=60, coef11=coef11)
            values.append(project(fitted, synthetic_obs, spec).value_at_horizon)
        assert values[0] < values[1] < values[2]

    def test_window_mismatch(self, fitted, synthetic_obs):
        from seirspline.fitting import ObservationSet
        other = ObservationSet("X", synthetic_obs.t1,
                               synthetic_obs.t4 + timedelta(days=1),
                               np.ones(synthetic_obs.n_days + 2),
                               np.zeros(synthetic_obs.n_days + 2), 1e6)
        with pytest.raises(Exception):
            project(fitted, other, ScenarioSpec())


class TestFindPeak:
    def _traj(self, i_values):
        n = len(i_values)
        i = np.asarray(i_values, dtype=float)
        zeros = np.zeros(n)
        return Trajectory(date(2020, 3, 1), 1000 - i, zeros, i, zeros)

    def test_monotone_decreasing(self):
        traj = self._traj([9, 7, 5, 3])
        assert find_peak(traj, date(2020, 3, 1)) == (date(2020, 3, 1), 9.0)

    def test_tie_earliest(self):
        traj = self._traj([1, 3, 3, 2])
        assert find_peak(traj, date(2020, 3, 1)) == (date(2020, 3, 2), 3.0)

    def test_from_date_restricts(self):
        traj = self._traj([9, 1, 5, 3])
        assert find_peak(traj, date(2020, 3, 2)) == (date(2020, 3, 3), 5.0)

    def test_out_of_span(self):
        traj = self._traj([1, 2])
        with pytest.raises(DomainError):
            find_peak(traj, date(2020, 3, 9))
