"""Python smoke tests for the flexp2 extension module and the CLI binary."""

import os
import subprocess

import numpy as np
import pytest

flexp2 = pytest.importorskip("flexp2")


def make_spec(sigma=0.0, seed=1):
    spec = flexp2.SynthSpec()
    spec.n = 10
    spec.m = 8
    spec.K = 4
    spec.rank = 2
    spec.sigma = sigma
    spec.seed = seed
    return spec


def test_ragged_tensor_from_numpy():
    slices = [np.ones((3, 4)), np.full((3, 5), 2.0)]
    t = flexp2.RaggedTensor(slices)
    flexp2.validate(t)
    assert t.n == 3
    assert t.slice_widths == [4, 5]
    assert t.total_norm == pytest.approx(np.sqrt(12 + 60))
    assert len(t) == 2


def test_validate_rejects_bad_shapes():
    with pytest.raises(flexp2.Error):
        flexp2.validate(flexp2.RaggedTensor([np.ones((3, 4)), np.ones((2, 4))]))


def test_khatri_rao_formula():
    x = np.array([[1.0], [2.0]])
    y = np.array([[3.0], [4.0]])
    np.testing.assert_array_equal(
        flexp2.khatri_rao(x, y), np.array([[3.0], [4.0], [6.0], [8.0]])
    )


def test_procrustes_orthonormal():
    rng = np.random.default_rng(0)
    p = flexp2.procrustes(rng.standard_normal((5, 2)))
    np.testing.assert_allclose(p.T @ p, np.eye(2), atol=1e-10)


def test_nnls_is_nonnegative():
    gram = np.eye(2)
    cross = np.array([[-1.0, 2.0]])
    x = flexp2.nnls(gram, cross, np.zeros((1, 2)), 20)
    np.testing.assert_allclose(x, [[0.0, 2.0]])


def test_flexible_solver_recovers_noiseless_data():
    spec = make_spec(sigma=0.0, seed=3)
    tensor, truth = flexp2.gen_dataset(spec)

    config = flexp2.SolverConfig()
    config.rank = spec.rank

    best = None
    best_fit = np.inf
    for i in range(3):
        init = flexp2.initial_factors(tensor, spec.rank, 100 + i)
        factors, report = flexp2.run_flexible(tensor, config, init)
        fit = flexp2.relative_fit(tensor, factors)
        if fit < best_fit:
            best, best_fit = factors, fit

    assert best_fit < 1e-2
    assert best.A.min() >= 0.0
    assert best.C.min() >= 0.0
    assert all(b.min() >= 0.0 for b in best.B)
    assert flexp2.relative_B_error(best, truth) < 0.2


def test_classic_solver_runs():
    spec = make_spec(sigma=1e-3, seed=5)
    tensor, _ = flexp2.gen_dataset(spec)
    config = flexp2.SolverConfig()
    config.rank = spec.rank
    config.max_iter = 30
    factors, report = flexp2.run_classic(tensor, config, flexp2.initial_factors(tensor, 2, 7))
    assert report.iterations <= 30
    assert report.coupling_residuals == [0.0] * spec.K


def test_p2rt_round_trip(tmp_path):
    spec = make_spec(sigma=1e-4, seed=11)
    tensor, _ = flexp2.gen_dataset(spec)
    path = str(tmp_path / "data.p2rt")
    flexp2.save_p2rt(tensor, path)
    back = flexp2.load_p2rt(path)
    for a, b in zip(tensor.slices, back.slices):
        np.testing.assert_array_equal(a, b)


@pytest.fixture
def cli():
    path = os.environ.get("FLEXP2_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("FLEXP2_CLI not set")
    return path


def run_cli(cli, *args, cwd):
    return subprocess.run([cli, *args], cwd=cwd, capture_output=True, text=True)


def test_cli_simulate_and_decompose(cli, tmp_path):
    sim = run_cli(
        cli, "simulate", "--n", "8", "--m", "6", "--slices", "3", "--rank", "2",
        "--sigma", "1e-3", "--seed", "42", "--out", "data.p2rt", cwd=tmp_path,
    )
    assert sim.returncode == 0, sim.stderr
    assert "seed 42" in sim.stdout

    again = run_cli(cli, "simulate", "--out", "data.p2rt", cwd=tmp_path)
    assert again.returncode == 2  # refuses to overwrite

    dec = run_cli(
        cli, "decompose", "data.p2rt", "--rank", "2", "--max-iter", "30",
        "--inits", "2", "--out-dir", "out", cwd=tmp_path,
    )
    assert dec.returncode == 0, dec.stderr
    for name in ("A.csv", "C.csv", "Bstar.csv", "B_1.csv", "P_3.csv", "report.csv", "run.json"):
        assert (tmp_path / "out" / name).exists()

    wide = run_cli(cli, "decompose", "data.p2rt", "--rank", "7", "--out-dir", "wide", cwd=tmp_path)
    assert wide.returncode == 2  # rank exceeds every slice width


def test_cli_benchmark_row_count(cli, tmp_path):
    bench = run_cli(
        cli, "benchmark", "--sigmas", "1e-3", "--replicates", "2", "--inits", "2",
        "--n", "8", "--m", "6", "--slices", "3", "--rank", "2", "--max-iter", "25",
        "--out", "bench.csv", cwd=tmp_path,
    )
    assert bench.returncode == 0, bench.stderr
    lines = (tmp_path / "bench.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 4  # header + 2 replicates x 2 solvers
    assert (tmp_path / "bench_summary.csv").exists()
