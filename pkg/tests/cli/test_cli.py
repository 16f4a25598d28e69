"""
End-to-end tests for the ``mr`` command line.
"""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from matchregula import __version__
from matchregula.cli import cli
from matchregula.core import Dataset, save_dataset


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def dataset_file(tmp_path):
    def _write(name, X, y, z):
        path = tmp_path / name
        save_dataset(Dataset(X=X, y=y, z=z), path)
        return path

    return _write


class TestMatchCommand:
    """Test mr match"""

    def test_exact_pairs(self, runner, tmp_path, exact_pairs_dataset):
        """Test exact twins give zero total cost"""
        path = tmp_path / "exact.csv"
        save_dataset(exact_pairs_dataset, path)
        out = tmp_path / "out"
        result = runner.invoke(cli, ["--out", str(out), "match", str(path)])
        assert result.exit_code == 0, result.output
        summary = json.loads((out / "matching_summary.json").read_text())
        assert summary["total_cost"] == 0.0
        assert summary["n_treated"] == 3
        assert len((out / "matching.csv").read_text().splitlines()) == 4

    def test_more_treated_than_controls(self, runner, tmp_path, dataset_file):
        """Test N1 > N0 with pairs exits 1"""
        path = dataset_file("lopsided.csv", [0.0, 1.0, 2.0, 3.0], [0.0] * 4, [1, 1, 1, 0])
        result = runner.invoke(cli, ["--out", str(tmp_path), "match", str(path)])
        assert result.exit_code == 1
        assert "more treated than control" in result.output

    def test_replacement_is_reproducible(self, runner, tmp_path, dataset_file):
        """Test the same seed gives byte-identical output"""
        X = [0.0, 0.0, 1.0, 1.0, -1.0]
        path = dataset_file("ties.csv", X, [0.0] * 5, [1, 1, 0, 0, 0])
        contents = []
        for run in ("a", "b"):
            out = tmp_path / run
            result = runner.invoke(
                cli, ["--seed", "7", "--out", str(out), "match", str(path), "--scheme", "replacement"]
            )
            assert result.exit_code == 0, result.output
            contents.append((out / "matching.csv").read_bytes())
        assert contents[0] == contents[1]

    def test_malformed_dataset(self, runner, tmp_path):
        """Test a parse error exits 1 with the location"""
        path = tmp_path / "bad.csv"
        path.write_text("x1,y,z\n0,1,1\n1,2,3\n")
        result = runner.invoke(cli, ["--out", str(tmp_path), "match", str(path)])
        assert result.exit_code == 1
        assert "row 2" in result.output


class TestTestCommand:
    """Test mr test"""

    def test_constant_outcome(self, runner, tmp_path, dataset_file):
        """Test a constant outcome reports p = 1"""
        rng = np.random.default_rng(0)
        path = dataset_file("flat.csv", rng.normal(size=20), [2.0] * 20, [1] * 8 + [0] * 12)
        result = runner.invoke(cli, ["--out", str(tmp_path), "test", str(path)])
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "test_report.json").read_text())
        assert report["p_value"] == 1.0
        assert report["B"] == 1000
        assert report["reject"] is False
        assert report["version"] == __version__

    def test_exhaustive_limit(self, runner, tmp_path, dataset_file):
        """Test exhaustive mode with more than 20 pairs exits 1"""
        rng = np.random.default_rng(1)
        path = dataset_file("wide.csv", rng.normal(size=50), rng.normal(size=50), [1] * 21 + [0] * 29)
        result = runner.invoke(cli, ["--out", str(tmp_path), "test", str(path), "--exhaustive"])
        assert result.exit_code == 1
        assert "sampled" in result.output

    def test_degenerate_design(self, runner, tmp_path, dataset_file):
        """Test N1 > N0 answers p = 1 and exits 0"""
        path = dataset_file("lopsided.csv", [0.0, 1.0, 2.0], [0.0, 1.0, 2.0], [1, 1, 0])
        result = runner.invoke(cli, ["--out", str(tmp_path), "test", str(path)])
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "test_report.json").read_text())
        assert report["p_value"] == 1.0
        assert report["degenerate"] is True

    def test_regression_report(self, runner, tmp_path, dataset_file):
        """Test the regression statistic writes the matched baseline fit report"""
        rng = np.random.default_rng(4)
        X = rng.normal(size=(30, 2))
        path = dataset_file("reg.csv", X, X[:, 0] + rng.normal(size=30), [1] * 10 + [0] * 20)
        result = runner.invoke(
            cli, ["--out", str(tmp_path), "test", str(path), "--statistic", "reg", "-B", "50"]
        )
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "test_report.json").read_text())
        fit = report["regression"]
        assert fit["spec_id"] == "baseline"
        assert fit["n_used"] == 20
        assert [row["name"] for row in fit["coefficients"]] == ["z", "intercept", "x1", "x2"]
        assert fit["tau_hat"] == pytest.approx(report["tau_obs"], rel=1e-8)
        assert 0.0 < fit["p"] <= 1.0

    def test_dm_has_no_regression_report(self, runner, tmp_path, dataset_file):
        """Test the difference-of-means statistic skips the fit report"""
        rng = np.random.default_rng(5)
        path = dataset_file("dm.csv", rng.normal(size=30), rng.normal(size=30), [1] * 10 + [0] * 20)
        result = runner.invoke(cli, ["--out", str(tmp_path), "test", str(path), "-B", "50"])
        assert result.exit_code == 0, result.output
        assert "regression" not in json.loads((tmp_path / "test_report.json").read_text())

    def test_seeded_draws(self, runner, tmp_path, dataset_file):
        """Test the global seed fixes the sampled p-value"""
        rng = np.random.default_rng(2)
        path = dataset_file("data.csv", rng.normal(size=30), rng.normal(size=30), [1] * 10 + [0] * 20)
        pvalues = []
        for run in ("a", "b"):
            out = tmp_path / run
            result = runner.invoke(cli, ["--seed", "3", "--out", str(out), "test", str(path), "-B", "200"])
            assert result.exit_code == 0, result.output
            pvalues.append(json.loads((out / "test_report.json").read_text())["p_value"])
        assert pvalues[0] == pvalues[1]


class TestSimulateCommand:
    """Test mr simulate"""

    def _config(self, tmp_path, **overrides):
        data = {
            "name": "tiny",
            "dgp": {"variant": "example4"},
            "sample_sizes": [60],
            "replications": 2,
            "permutations": 20,
        }
        data.update(overrides)
        path = tmp_path / "tiny.json"
        path.write_text(json.dumps(data))
        return path

    def test_dry_run_writes_nothing(self, runner, tmp_path):
        """Test --dry-run prints the resolved config only"""
        path = self._config(tmp_path)
        out = tmp_path / "out"
        result = runner.invoke(cli, ["--quiet", "--out", str(out), "simulate", str(path), "--dry-run"])
        assert result.exit_code == 0, result.output
        document = json.loads(result.output)
        assert document["config"]["sample_sizes"] == [60]
        assert document["config"]["outputs"]["report"] == str(out / "tiny_report.json")
        assert not out.exists()

    def test_malformed_json(self, runner, tmp_path):
        """Test a syntax error exits 1 with its line"""
        path = tmp_path / "broken.json"
        path.write_text('{\n  "dgp": {"variant": "example4"},\n  "sample_sizes": [60,]\n}')
        result = runner.invoke(cli, ["simulate", str(path)])
        assert result.exit_code == 1
        assert "line 3" in result.output

    def test_unknown_key(self, runner, tmp_path):
        """Test schema violations exit 1"""
        path = self._config(tmp_path, replicates=5)
        result = runner.invoke(cli, ["simulate", str(path)])
        assert result.exit_code == 1
        assert "replicates" in result.output

    def test_run_writes_artifacts(self, runner, tmp_path):
        """Test a small run writes the report and plot data"""
        path = self._config(tmp_path)
        out = tmp_path / "out"
        result = runner.invoke(cli, ["--quiet", "--threads", "1", "--out", str(out), "simulate", str(path)])
        assert result.exit_code == 0, result.output
        report = json.loads((out / "tiny_report.json").read_text())
        assert report["summaries"][0]["replications"] == 2
        assert (out / "tiny_plot.csv").exists()


class TestReproduceCommand:
    """Test mr reproduce"""

    def test_unknown_id(self, runner):
        """Test an unknown id exits 1 listing the known ones"""
        result = runner.invoke(cli, ["reproduce", "fig9"])
        assert result.exit_code == 1
        assert "fig1" in result.output

    def test_list(self, runner):
        """Test --list shows the reproduction ids"""
        result = runner.invoke(cli, ["reproduce", "--list"])
        assert result.exit_code == 0
        assert "thm3" in result.output

    def test_fig1_dry_run(self, runner, tmp_path):
        """Test the desk-scale bias figure resolves to four sample sizes"""
        result = runner.invoke(cli, ["--quiet", "--out", str(tmp_path), "reproduce", "fig1", "--dry-run"])
        assert result.exit_code == 0, result.output
        document = json.loads(result.output)
        assert document["config"]["sample_sizes"] == [200, 400, 800, 1600]
        assert list(tmp_path.iterdir()) == []

    def test_seed_override(self, runner):
        """Test the global seed reaches every run"""
        result = runner.invoke(cli, ["--quiet", "--seed", "9", "reproduce", "thm1", "--dry-run"])
        assert result.exit_code == 0, result.output
        assert [d["config"]["seed"] for d in json.loads(result.output)] == [9, 9]


def test_version(runner):
    """Test --version prints the package version"""
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert __version__ in result.output


if __name__ == "__main__":
    pytest.main([__file__])
