"""CLI subcommands: exit codes, outputs, determinism."""

import json

import pytest

from seirspline.cli import EXIT_DATA, EXIT_FIT, EXIT_OK, EXIT_USAGE, main

FAST_CONFIG = {"multistart": 2, "max_fevals": 100, "polish_fevals": 200,
               "polish_cells": 3, "node_grid_step": 2}


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "fit-config.json"
    path.write_text(json.dumps(FAST_CONFIG))
    return path


def run_fit(fixture_data_dir, tmp_path, config_file, out="models.json", extra=()):
    out_path = tmp_path / out
    code = main([
        "fit", "--country", "Testland",
        "--start", "2020-03-05", "--end", "2020-03-25",
        "--data-dir", str(fixture_data_dir),
        "--config", str(config_file),
        "--top", "2", "--seed", "1",
        "--out", str(out_path), *extra,
    ])
    return code, out_path


class TestFit:
    def test_happy_path(self, fixture_data_dir, tmp_path, config_file, capsys):
        code, out_path = run_fit(fixture_data_dir, tmp_path, config_file)
        assert code == EXIT_OK
        doc = json.loads(out_path.read_text())
        assert doc["schema_version"] == "1"
        assert len(doc["models"]["models"]) == 2
        assert doc["population_n"] == 500000.0
        printed = capsys.readouterr().out
        assert "Fmax" in printed and "model 1" in printed

    def test_byte_identical_reruns(self, fixture_data_dir, tmp_path, config_file):
        _, a = run_fit(fixture_data_dir, tmp_path, config_file, out="a.json")
        _, b = run_fit(fixture_data_dir, tmp_path, config_file, out="b.json")
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_country_exit_code(self, fixture_data_dir, tmp_path, capsys):
        code = main(["--json-errors", "fit", "--country", "Atlantis",
                     "--start", "2020-03-05", "--end", "2020-03-25",
                     "--data-dir", str(fixture_data_dir),
                     "--out", str(tmp_path / "x.json")])
        assert code == EXIT_DATA
        err = json.loads(capsys.readouterr().err)
        assert err["code"] == "data_error"

    def test_bad_date_usage_error(self, fixture_data_dir, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["fit", "--country", "Testland", "--start", "05-03-2020",
                  "--end", "2020-03-25", "--data-dir", str(fixture_data_dir)])
        assert exc.value.code == EXIT_USAGE

    def test_short_window_fit_failure(self, fixture_data_dir, tmp_path):
        code = main(["fit", "--country", "Testland",
                     "--start", "2020-03-05", "--end", "2020-03-08",
                     "--data-dir", str(fixture_data_dir),
                     "--out", str(tmp_path / "x.json")])
        assert code == EXIT_FIT

    def test_explicit_timestamp(self, fixture_data_dir, tmp_path, config_file):
        code, out_path = run_fit(fixture_data_dir, tmp_path, config_file,
                                 extra=("--timestamp", "2020-05-01T00:00:00+00:00"))
        assert code == EXIT_OK
        assert json.loads(out_path.read_text())["created_at"] == \
            "2020-05-01T00:00:00+00:00"


class TestProject:
    @pytest.fixture()
    def models_file(self, fixture_data_dir, tmp_path, config_file):
        _, out_path = run_fit(fixture_data_dir, tmp_path, config_file)
        return out_path

    def test_identity_scenario_csv(self, models_file, tmp_path, capsys):
        csv_path = tmp_path / "proj.csv"
        code = main(["project", "--models", str(models_file),
                     "--t5", "10", "--horizon", "30",
                     "--out", str(csv_path)])
        assert code == EXIT_OK
        lines = csv_path.read_text().strip().split("\n")
        assert lines[0] == "date,beta,gamma,S,E,I,R,R0"
        rows = [line.split(",") for line in lines[1:]]
        t4_idx = next(k for k, r in enumerate(rows) if r[0] == "2020-03-25")
        betas = {r[1] for r in rows[t4_idx:]}
        assert len(betas) == 1  # identity scenario: frozen rates
        assert rows[-1][0] == "2020-04-24"  # horizon = T4 + 30

    def test_t5_boundary_date(self, models_file, tmp_path):
        csv_path = tmp_path / "proj2.csv"
        summary_path = tmp_path / "summary.json"
        code = main(["project", "--models", str(models_file),
                     "--t5", "25", "--horizon", "40", "--coef1", "2.0",
                     "--out", str(csv_path), "--summary-out", str(summary_path)])
        assert code == EXIT_OK
        summary = json.loads(summary_path.read_text())
        assert summary["t5"] == "2020-04-19"  # T4 2020-03-25 + 25 days
        rows = [line.split(",") for line in
                csv_path.read_text().strip().split("\n")[1:]]
        beta = {r[0]: float(r[1]) for r in rows}
        assert beta["2020-04-19"] == pytest.approx(beta["2020-03-25"] / 2.0,
                                                   rel=1e-12)

    def test_horizon_ordering_across_runs(self, models_file, tmp_path):
        vals = {}
        for coef11 in ("1.4", "1.8"):
            summary = tmp_path / f"s{coef11}.json"
            code = main(["project", "--models", str(models_file),
                         "--coef11", coef11, "--out", str(tmp_path / "p.csv"),
                         "--summary-out", str(summary)])
            assert code == EXIT_OK
            vals[coef11] = json.loads(summary.read_text())["value_at_horizon"]
        assert vals["1.8"] > vals["1.4"]

    def test_nonpositive_coefficient_rejected(self, models_file, tmp_path):
        code = main(["project", "--models", str(models_file),
                     "--coef1", "0", "--out", str(tmp_path / "p.csv")])
        assert code == EXIT_USAGE

    def test_unknown_rank(self, models_file, tmp_path):
        code = main(["project", "--models", str(models_file), "--rank", "9",
                     "--out", str(tmp_path / "p.csv")])
        assert code == EXIT_DATA

    def test_missing_models_file(self, tmp_path):
        code = main(["project", "--models", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "p.csv")])
        assert code == EXIT_DATA


class TestCountries:
    def test_list(self, fixture_data_dir, capsys):
        assert main(["countries", "--data-dir", str(fixture_data_dir)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "Testland"
