import json
import os
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from ttnc import bench
from ttnc.errors import CapacityError, MalformedInputError
from ttnc.mps import ghz_mps, mcz_mpo, pauli_exp_mpo, random_mps
from ttnc.utils.fitting import linear_fit, log2_fit, loglog_slope
from ttnc.utils.serialize import dump_mpo, dump_mps, load_mpo, load_mps, mps_from_dict


def comment_fields(table, prefix):
    return [c.split(",") for c in table.comments if c.startswith(prefix + ",")]


def test_fits_recover_exact_lines():
    fit = linear_fit([1, 2, 3, 4], [3, 5, 7, 9])
    assert_allclose([fit.slope, fit.intercept, fit.r2], [2, 1, 1], atol=1e-12)
    flat = linear_fit([1, 2, 3], [0.5, 0.5, 0.5])
    assert flat.r2 == 1.0
    assert_allclose(log2_fit([2, 4, 8, 16], [3, 5, 7, 9]).slope, 2.0)
    assert_allclose(loglog_slope([100, 10000], [0.1, 0.01]).slope, -0.5)
    with pytest.raises(ValueError):
        linear_fit([1, 1], [2, 3])


def test_config_validation():
    config = bench.BenchConfig(n_range=[8, 4, 4], seed=1, workers=1)
    assert config.n_range == [4, 8]
    assert "workers" not in json.loads(config.config_json())
    with pytest.raises(ValidationError):
        bench.BenchConfig(n_range=[4], seed=1, samples_per_n=0, workers=1)
    with pytest.raises(ValidationError):
        bench.BenchConfig(n_range=[4], seed=1, chis=[3], workers=1)
    with pytest.raises(ValidationError):
        bench.BenchConfig(n_range=[4], seed=1, topologies=["ring"], workers=1)


def test_task_seed_is_stable_and_distinct():
    assert bench.task_seed(7, 4, 2, 0) == bench.task_seed(7, 4, 2, 0)
    assert bench.task_seed(7, 4, 2, 0) != bench.task_seed(7, 4, 2, 1)


def test_fidelity_benchmark_exact_mode():
    config = bench.BenchConfig(n_range=[4, 6], chis=[2], max_bond=None, samples_per_n=3, seed=11, workers=1)
    table = bench.bench_fidelity(config)
    assert table.header[:4] == ["n", "chi", "seed", "fidelity"]
    assert len(table.rows) == 6
    assert all(row[3] > 1 - 1e-9 for row in table.rows)
    fits = comment_fields(table, "fit")
    assert fits[0] == ["fit", "chi", "slope", "intercept", "r2"]
    assert len(fits) == 2


def test_fidelity_benchmark_is_deterministic():
    config = bench.BenchConfig(n_range=[5, 7], chis=[2], samples_per_n=2, seed=3, workers=1)
    first = bench.render_csv(bench.bench_fidelity(config), config.config_json(), "t")
    second = bench.render_csv(bench.bench_fidelity(config), config.config_json(), "t")
    assert first == second
    lines = first.splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1] == "# generated: t"
    assert lines[2] == "n,chi,seed,fidelity,discarded_weight,fidelity_estimate"


def test_fidelity_benchmark_capacity():
    config = bench.BenchConfig(n_range=[21], seed=1, workers=1)
    with pytest.raises(CapacityError):
        bench.bench_fidelity(config)


def test_depth_benchmark_rows():
    config = bench.BenchConfig(
        n_range=[4, 6], chis=[2], samples_per_n=1, seed=5, modes=["exact", "approx"], workers=1
    )
    table = bench.bench_depth(config)
    assert len(table.rows) == 2 * 2 * 3
    for n, chi, topology, mode, two_depth, total_depth, swaps, max_gate, predicted, _ in table.rows:
        assert two_depth <= total_depth
        assert max_gate <= predicted
        if topology == "all_to_all":
            assert swaps == 0
    assert len(comment_fields(table, "fit")) == 1 + 3 * 2


def test_write_csv(tmp_path):
    table = bench.BenchTable(["a", "b"], [(1, 0.5)], ["note"])
    path = bench.write_csv(table, "{}", tmp_path / "out" / "t.csv")
    lines = path.read_text().splitlines()
    assert lines[2:] == ["a,b", "1,0.5", "# note"]


def test_build_operator():
    assert bench.build_operator("mcz", 3).n == 3
    assert bench.build_operator("pauli-exp", 2, pauli="XY").n == 2
    with pytest.raises(MalformedInputError):
        bench.build_operator("toffoli", 3)
    with pytest.raises(MalformedInputError):
        bench.build_operator("pauli-exp", 3, pauli="XY")
    with pytest.raises(CapacityError):
        bench.build_operator("mcz", 9)


def test_verify_overlap_table():
    table = bench.verify_overlap(mcz_mpo(3), pairs=20, seed=0)
    assert len(table.rows) == 20
    assert max(row[4] for row in table.rows) < 1e-9


def test_shot_noise_scales_as_inverse_square_root():
    table = bench.verify_shots(mcz_mpo(3), [100, 1000, 10000], repeats=200, seed=8)
    assert len(table.rows) == 600
    (fit,) = [c for c in table.comments if c.startswith("fit,slope,")]
    slope = float(fit.split(",")[2])
    assert abs(slope + 0.5) < 0.1


def test_verify_noise_table():
    table = bench.verify_noise(pauli_exp_mpo("XZ", 0.3), [0.0, 0.5, 1.0], seed=1)
    metrics = [row[1] for row in table.rows]
    assert_allclose(metrics, [1.0, 0.5, 0.0], atol=1e-9)


def test_mps_and_mpo_files_round_trip(tmp_path):
    m = random_mps(5, 4, seed=2)
    dump_mps(m, tmp_path / "m.json")
    back = load_mps(tmp_path / "m.json")
    assert back.bond_dims == m.bond_dims
    for a, b in zip(m.arrays(), back.arrays()):
        assert np.array_equal(a, b)
    dump_mpo(mcz_mpo(3), tmp_path / "u.json")
    assert load_mpo(tmp_path / "u.json").bond_dims == [1, 2, 2, 1]


def test_malformed_mps_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    with pytest.raises(MalformedInputError):
        load_mps(bad)
    with pytest.raises(MalformedInputError):
        load_mps(tmp_path / "missing.json")
    with pytest.raises(MalformedInputError):
        mps_from_dict({"n": 2, "sites": [{"shape": [1, 2, 2], "re": [0.0] * 4}]})
    with pytest.raises(MalformedInputError):
        mps_from_dict({"n": 1, "sites": [{"shape": [1, 2, 1], "re": [1.0, 0.0, 0.5]}]})
    good = {"n": 2, "bond_dims": [1, 1, 1], "sites": [{"shape": [1, 2, 1], "re": [1.0, 0.0]}] * 2}
    assert mps_from_dict(good).n == 2
    with pytest.raises(MalformedInputError):
        mps_from_dict(dict(good, bond_dims=[1, 2, 1]))
    with pytest.raises(MalformedInputError):
        mps_from_dict({"n": 2, "sites": [{"shape": [1, 2, 2], "re": [0.0] * 4}, {"shape": [3, 2, 1], "re": [0.0] * 6}]})


@pytest.mark.slow
def test_bond_two_fidelity_decays_linearly_up_to_twenty_qubits():
    config = bench.BenchConfig(
        n_range=list(range(6, 21, 2)), chis=[2], max_bond=2, samples_per_n=30, seed=2024, workers=1
    )
    table = bench.bench_fidelity(config)
    means = {int(n): float(v) for _, n, _, v in comment_fields(table, "mean")[1:]}
    assert means[6] > means[12] > means[20]
    # complex Gaussian tensors: about 0.71 at twenty qubits
    assert means[20] >= 0.6
    (fit,) = comment_fields(table, "fit")[1:]
    assert float(fit[2]) < 0
    assert float(fit[4]) >= 0.8


@pytest.mark.slow
def test_depth_grows_logarithmically_on_every_topology():
    config = bench.BenchConfig(n_range=[8, 16, 32, 64], chis=[2], samples_per_n=2, seed=9, workers=1)
    table = bench.bench_depth(config)
    fits = {row[2]: float(row[6]) for row in comment_fields(table, "fit")[1:]}
    assert set(fits) == {"all_to_all", "square_grid", "heavy_hex"}
    for topology, r2 in fits.items():
        assert r2 >= 0.9, topology
    mean_depth = {
        topology: np.mean([row[4] for row in table.rows if row[2] == topology]) for topology in fits
    }
    assert mean_depth["all_to_all"] <= mean_depth["square_grid"] <= mean_depth["heavy_hex"]


def test_ghz_file_round_trip(tmp_path):
    dump_mps(ghz_mps(4), tmp_path / "ghz.json")
    assert load_mps(tmp_path / "ghz.json").max_bond == 2
