import json
import os
import sys
import subprocess
from pathlib import Path

import numpy as np
import pytest
from typer.testing import CliRunner

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from ttnc.circuit import deserialize, simulate
from ttnc.commands import app
from ttnc.mps import Mps, fidelity, ghz_mps, product_mps, random_mps, to_statevector
from ttnc.utils.serialize import dump_mps

runner = CliRunner()


def invoke(tmp_path, *args):
    return runner.invoke(app, ["--log-path", str(tmp_path / "ttnc.log"), *args])


def test_cli_compile_via_script(tmp_path):
    repo_root = Path(__file__).resolve().parents[1]
    dump_mps(ghz_mps(8), tmp_path / "ghz.json")
    env = os.environ.copy()
    env["TTNC_LOG_PATH"] = str(tmp_path / "app.log")
    env["PYTHONPATH"] = str(repo_root)

    code = f"""
import runpy, sys
sys.argv = ['cli.py', 'compile', 'ghz.json', '-o', 'ghz_circuit.json', '--max-bond', '2']
runpy.run_path({str(repo_root / 'cli.py')!r}, run_name='__main__')
"""

    done = subprocess.run(
        [sys.executable, "-c", code], cwd=tmp_path, env=env, check=True, capture_output=True, text=True
    )

    report = json.loads(done.stdout.strip().splitlines()[-1])
    assert report["n"] == 8
    assert report["layers"] == 3
    assert report["fidelity"] > 1 - 1e-9
    assert report["discarded_weight"] < 1e-12

    circuit = deserialize((tmp_path / "ghz_circuit.json").read_text())
    assert abs(fidelity(simulate(circuit), to_statevector(ghz_mps(8))) - report["fidelity"]) < 1e-12
    assert (tmp_path / "app.log").exists()


def test_compile_pads_odd_bond_dimensions(tmp_path):
    m = random_mps(5, 4, seed=1)
    arrays = m.arrays()
    # widen bond 1 from 2 to 3 with zeros
    arrays[0] = np.pad(arrays[0], ((0, 0), (0, 0), (0, 1)))
    arrays[1] = np.pad(arrays[1], ((0, 1), (0, 0), (0, 0)))
    padded = Mps.from_arrays(arrays)
    dump_mps(padded, tmp_path / "in.json")
    result = invoke(tmp_path, "compile", str(tmp_path / "in.json"), "-o", str(tmp_path / "out.json"))
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["fidelity"] > 1 - 1e-9


def test_compile_product_state_has_depth_one(tmp_path):
    dump_mps(product_mps([0, 1, 0, 1]), tmp_path / "p.json")
    result = invoke(tmp_path, "compile", str(tmp_path / "p.json"), "-o", str(tmp_path / "c.json"))
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["depth"] == 1
    assert report["gates"]["max_arity"] == 1


def test_compile_staircase_and_qasm(tmp_path):
    dump_mps(random_mps(6, 2, seed=3), tmp_path / "m.json")
    result = invoke(
        tmp_path, "compile", str(tmp_path / "m.json"), "-o", str(tmp_path / "c.qasm"),
        "--method", "staircase", "--format", "qasm2", "--topology", "heavy_hex",
    )
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["multi_qubit_depth"] == 5
    assert "transpile" in report
    text = (tmp_path / "c.qasm").read_text()
    assert text.startswith("OPENQASM 2.0;")


def test_compile_rejects_malformed_input(tmp_path):
    (tmp_path / "bad.json").write_text('{"n": 3, "sites": []}')
    result = invoke(tmp_path, "compile", str(tmp_path / "bad.json"), "-o", str(tmp_path / "c.json"))
    assert result.exit_code == 2
    dump_mps(ghz_mps(3), tmp_path / "ghz.json")
    result = invoke(tmp_path, "compile", str(tmp_path / "ghz.json"), "-o", str(tmp_path / "c.json"), "--method", "zigzag")
    assert result.exit_code == 2
    result = invoke(tmp_path, "compile", str(tmp_path / "ghz.json"), "-o", str(tmp_path / "c.json"), "--max-bond", "3")
    assert result.exit_code == 2


def test_compile_rejects_unnormalised_input(tmp_path):
    m = ghz_mps(3)
    doubled = Mps.from_arrays([2 * m.arrays()[0]] + m.arrays()[1:])
    dump_mps(doubled, tmp_path / "d.json")
    result = invoke(tmp_path, "compile", str(tmp_path / "d.json"), "-o", str(tmp_path / "c.json"))
    assert result.exit_code == 2


def test_capacity_errors_exit_with_three(tmp_path):
    result = invoke(tmp_path, "verify", "overlap", "--n", "9", "--seed", "1", "--output", str(tmp_path / "o.csv"))
    assert result.exit_code == 3
    result = invoke(
        tmp_path, "bench-fidelity", "--n-range", "21", "--seed", "1", "--workers", "1",
        "--output-dir", str(tmp_path),
    )
    assert result.exit_code == 3


def test_verify_commands_write_csv(tmp_path):
    result = invoke(
        tmp_path, "verify", "overlap", "--operator", "mcz", "--n", "3", "--pairs", "10",
        "--seed", "4", "--output", str(tmp_path / "overlap.csv"),
    )
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "overlap.csv").read_text().splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[2] == "case,n,exact,verifier,abs_err"
    assert len([line for line in lines if not line.startswith("#")]) == 11

    result = invoke(
        tmp_path, "verify", "noise", "--n", "3", "--deltas", "0,0.5,1", "--seed", "2",
        "--output", str(tmp_path / "noise.csv"),
    )
    assert result.exit_code == 0, result.output
    result = invoke(tmp_path, "verify", "overlap", "--operator", "toffoli", "--seed", "1",
                    "--output", str(tmp_path / "x.csv"))
    assert result.exit_code == 2


def test_bench_output_is_reproducible(tmp_path):
    bodies = []
    for name in ("a.csv", "b.csv"):
        result = invoke(
            tmp_path, "bench-fidelity", "--n-range", "4:6:2", "--samples-per-n", "2",
            "--seed", "42", "--workers", "1", "--output-dir", str(tmp_path), "--output", name,
        )
        assert result.exit_code == 0, result.output
        lines = (tmp_path / name).read_text().splitlines()
        bodies.append([line for line in lines if not line.startswith("# generated:")])
    assert bodies[0] == bodies[1]


@pytest.mark.slow
def test_bench_depth_command(tmp_path):
    result = invoke(
        tmp_path, "bench-depth", "--n-range", "6,8", "--samples-per-n", "1", "--seed", "1",
        "--workers", "2", "--output-dir", str(tmp_path),
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "depth.csv").exists()
