import json
import os
import subprocess

import numpy as np
import pytest

CLI = os.environ.get("L0EM_CLI", "l0em")


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)


def write_matrix(path, x, prefix="x"):
    header = ",".join(f"{prefix}{j + 1}" for j in range(x.shape[1]))
    np.savetxt(path, x, delimiter=",", header=header, comments="", fmt="%.17g")


@pytest.fixture
def table4_instance(tmp_path):
    rng = np.random.default_rng(11)
    x = rng.standard_normal((100, 1000))
    y = 2 * x[:, 0] - 3 * x[:, 1] + 4 * x[:, 4] + rng.standard_normal(100)
    write_matrix(tmp_path / "x.csv", x)
    write_matrix(tmp_path / "y.csv", y[:, None], prefix="y")
    return tmp_path


def test_fit_bic_recovers_support(table4_instance):
    d = table4_instance
    res = run("fit", "--design", d / "x.csv", "--response", d / "y.csv", "--ic", "bic", "-o", d / "fit.json")
    assert res.returncode == 0, res.stderr
    out = json.loads((d / "fit.json").read_text())
    assert set(out) >= {"config", "seed", "results", "failures", "version"}
    assert out["results"]["support"] == [0, 1, 4]
    assert sorted(out["results"]["coefficients"]) == ["x1", "x2", "x5"]
    assert out["results"]["stationarity_residual_max"] <= out["results"]["stationarity_bound"]


def test_fit_is_reproducible(table4_instance):
    d = table4_instance
    a = run("fit", "--design", d / "x.csv", "--response", d / "y.csv", "--lambda", 3)
    b = run("fit", "--design", d / "x.csv", "--response", d / "y.csv", "--lambda", 3)
    ja, jb = json.loads(a.stdout), json.loads(b.stdout)
    ja.pop("timestamp"), jb.pop("timestamp")
    assert ja == jb


def test_zero_response(tmp_path):
    rng = np.random.default_rng(1)
    write_matrix(tmp_path / "x.csv", rng.standard_normal((20, 5)))
    write_matrix(tmp_path / "y.csv", np.zeros((20, 1)), prefix="y")
    res = run("fit", "--design", tmp_path / "x.csv", "--response", tmp_path / "y.csv", "--lambda", 1)
    assert res.returncode == 0
    assert json.loads(res.stdout)["results"]["coefficients"] == {}


def test_length_mismatch_and_malformed_csv(tmp_path):
    write_matrix(tmp_path / "x.csv", np.ones((5, 2)))
    write_matrix(tmp_path / "y.csv", np.ones((4, 1)), prefix="y")
    res = run("fit", "--design", tmp_path / "x.csv", "--response", tmp_path / "y.csv", "--lambda", 1)
    assert res.returncode == 1
    (tmp_path / "bad.csv").write_text("a,b\n1,2\n3,oops\n")
    res = run("fit", "--design", tmp_path / "bad.csv", "--response-col", "a", "--lambda", 1)
    assert res.returncode == 1
    assert "line 3" in res.stderr


def test_non_convergence_exit_code(table4_instance):
    d = table4_instance
    res = run("fit", "--design", d / "x.csv", "--response", d / "y.csv", "--lambda", 0.5, "--max-iter", 1,
              "--tol", 1e-12)
    assert res.returncode == 2


def test_response_column_and_standardize(tmp_path):
    rng = np.random.default_rng(3)
    x = rng.standard_normal((80, 6)) * 5 + 2
    y = 1.5 * x[:, 2] + 7 + 0.1 * rng.standard_normal(80)
    write_matrix(tmp_path / "d.csv", np.column_stack([x, y]))
    res = run("fit", "--design", tmp_path / "d.csv", "--response-col", "x7", "--ic", "bic", "--standardize")
    assert res.returncode == 0, res.stderr
    orig = json.loads(res.stdout)["results"]["original_scale"]
    assert list(orig["coefficients"]) == ["x3"]
    assert orig["coefficients"]["x3"] == pytest.approx(1.5, abs=0.02)
    assert orig["intercept"] == pytest.approx(7, abs=0.3)


def test_path_and_cv(tmp_path):
    rng = np.random.default_rng(4)
    x = rng.standard_normal((60, 15))
    y = 2 * x[:, 0] - 3 * x[:, 1] + 4 * x[:, 4] + rng.standard_normal(60)
    write_matrix(tmp_path / "x.csv", x)
    write_matrix(tmp_path / "y.csv", y[:, None], prefix="y")
    res = run("path", "--design", tmp_path / "x.csv", "--response", tmp_path / "y.csv", "--grid-count", 20)
    assert res.returncode == 0, res.stderr
    lines = res.stdout.strip().splitlines()
    assert lines[0].startswith("lambda,nonzeros,objective")
    assert len(lines) == 21
    assert lines[-1].split(",")[1] == "0"
    res = run("cv", "--design", tmp_path / "x.csv", "--response", tmp_path / "y.csv", "--grid-count", 20,
              "--seed", 5)
    assert res.returncode == 0, res.stderr
    out = json.loads(res.stdout)
    sel = out["results"]["selection"]
    assert sel["lambda_final"] == max(sel["lambda_mse"], sel["lambda_ss"])
    assert out["results"]["refit_full_data"] is True
    assert out["seed"] == 5


def test_graph_with_truth(tmp_path):
    m, n = 12, 300
    cov = 0.6 ** np.abs(np.subtract.outer(np.arange(m), np.arange(m)))
    x = np.random.default_rng(5).multivariate_normal(np.zeros(m), cov, size=n)
    truth = (np.abs(np.subtract.outer(np.arange(m), np.arange(m))) == 1).astype(float)
    write_matrix(tmp_path / "x.csv", x, prefix="g")
    write_matrix(tmp_path / "t.csv", truth, prefix="g")
    res = run("graph", "--data", tmp_path / "x.csv", "--ic", "bic", "--truth", tmp_path / "t.csv",
              "--edges", tmp_path / "edges.csv")
    assert res.returncode == 0, res.stderr
    out = json.loads(res.stdout)
    assert out["results"]["metrics"]["auc"] > 0.95
    assert out["config"]["positive_only"] is False
    edges = (tmp_path / "edges.csv").read_text().splitlines()
    assert edges[0] == "node_i,node_j,weight"
    assert len(edges) - 1 == out["results"]["edges"]
    res = run("graph", "--data", tmp_path / "x.csv", "--positive-only", "--auc-mode", "path",
              "--truth", tmp_path / "t.csv")
    assert res.returncode == 0, res.stderr


def test_graph_single_column(tmp_path):
    write_matrix(tmp_path / "x.csv", np.ones((10, 1)))
    assert run("graph", "--data", tmp_path / "x.csv").returncode == 1


def test_sim_table_smoke(tmp_path):
    res = run("sim-table", "--table", 4, "--replicates", 1, "--out-dir", tmp_path, "-o", tmp_path / "t4.json")
    assert res.returncode == 0, res.stderr
    agg = (tmp_path / "table4.csv").read_text().splitlines()
    assert agg[0].startswith("r,AIC_SF")
    assert len(agg) == 4
    assert (tmp_path / "table4_replicates.csv").exists()
    out = json.loads((tmp_path / "t4.json").read_text())
    assert out["results"]["succeeded"] == out["results"]["attempted"]


def test_bad_table_id(tmp_path):
    assert run("sim-table", "--table", 9, "--out-dir", tmp_path).returncode == 1
