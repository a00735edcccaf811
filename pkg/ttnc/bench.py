"""Benchmark and demo harness behind the ``bench-*`` and ``verify`` commands.

Every experiment produces a :class:`BenchTable`; :func:`write_csv` renders
it with the run configuration embedded as a ``# config:`` comment so that a
CSV file is self-describing. Rows are sorted before writing, which makes the
body independent of worker scheduling.
"""
from __future__ import annotations

import json
import logging
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Literal, Sequence

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ttnc.circuit import gate_stats, simulate
from ttnc.config import default_workers
from ttnc.coupling import CouplingKind, coupling_graph
from ttnc.errors import CapacityError, MalformedInputError
from ttnc.mps import (
    Mpo,
    Statevector,
    fidelity,
    identity_mpo,
    mcz_mpo,
    mpo_to_dense,
    pauli_exp_mpo,
    random_mps,
    to_statevector,
)
from ttnc.tensor_core import is_power_of_two
from ttnc.transpiler import transpile
from ttnc.ttn import estimate_fidelity, predict_max_gate_qubits, renormalize, ttn_to_circuit
from ttnc.utils.fitting import linear_fit, log2_fit, loglog_slope
from ttnc.verifier import (
    build_verifier,
    direct_overlap,
    noise_sweep,
    output_distribution,
    overlap_exact,
    overlap_sampled,
)

logger = logging.getLogger(__name__)

MAX_FIDELITY_QUBITS = 20
MAX_VERIFIER_QUBITS = 8
OPERATORS = ("mcz", "pauli-exp", "identity")


class BenchConfig(BaseModel):
    """Parameters of a benchmark run; its JSON dump heads every CSV."""

    n_range: list[int]
    chis: list[int] = [2]
    max_bond: int | None = 2
    samples_per_n: int = 30
    seed: int
    topologies: list[CouplingKind] = list(CouplingKind)
    modes: list[Literal["exact", "approx"]] = ["approx"]
    output_dir: Path = Path("results")
    workers: int = Field(default_factory=default_workers, exclude=True)

    @field_validator("n_range")
    @classmethod
    def _check_n(cls, value: list[int]) -> list[int]:
        if not value or min(value) < 2:
            raise ValueError("n_range must be non-empty with every n >= 2")
        return sorted(set(value))

    @field_validator("chis")
    @classmethod
    def _check_chis(cls, value: list[int]) -> list[int]:
        if not value or not all(is_power_of_two(c) for c in value):
            raise ValueError("chis must be a non-empty list of powers of two")
        return sorted(set(value))

    @field_validator("max_bond")
    @classmethod
    def _check_max_bond(cls, value: int | None) -> int | None:
        if value is not None and not is_power_of_two(value):
            raise ValueError("max_bond must be a power of two")
        return value

    @field_validator("samples_per_n", "workers")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("topologies", "modes")
    @classmethod
    def _check_non_empty(cls, value: list) -> list:
        if not value:
            raise ValueError("must not be empty")
        return list(dict.fromkeys(value))

    def config_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True)


@dataclass
class BenchTable:
    header: list[str]
    rows: list[tuple] = field(default_factory=list)
    comments: list[str] = field(default_factory=list)


def task_seed(seed: int, *key: int) -> int:
    """Independent per-task seed derived from the run seed and the task key."""
    return int(np.random.SeedSequence([seed, *key]).generate_state(1)[0])


def _format(value: object) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, CouplingKind):
        return value.value
    return str(value)


def render_csv(table: BenchTable, config_json: str, timestamp: str | None = None) -> str:
    stamp = timestamp or datetime.now().isoformat(timespec="seconds")
    lines = [f"# config: {config_json}", f"# generated: {stamp}", ",".join(table.header)]
    lines += [",".join(_format(v) for v in row) for row in table.rows]
    lines += [f"# {c}" for c in table.comments]
    return "\n".join(lines) + "\n"


def write_csv(table: BenchTable, config_json: str, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_csv(table, config_json), encoding="utf-8")
    logger.info("wrote %d rows to %s", len(table.rows), path)
    return path


def run_tasks(func: Callable, tasks: Sequence[tuple], workers: int) -> list:
    """Map ``func`` over ``tasks`` inline or on a process pool; order preserved."""
    if workers <= 1 or len(tasks) <= 1:
        return [func(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, *zip(*tasks)))


# ---------------------------------------------------------------------------
# fidelity benchmark
# ---------------------------------------------------------------------------

def fidelity_task(n: int, chi: int, seed: int, max_bond: int | None) -> tuple:
    m = random_mps(n, chi, seed)
    ttn = renormalize(m, max_bond)
    prepared = simulate(ttn_to_circuit(ttn))
    return (n, chi, seed, fidelity(prepared, to_statevector(m)),
            ttn.total_discarded_weight, estimate_fidelity(ttn))


def bench_fidelity(config: BenchConfig) -> BenchTable:
    too_large = [n for n in config.n_range if n > MAX_FIDELITY_QUBITS]
    if too_large:
        raise CapacityError(
            f"fidelity benchmarks simulate the full state; n={too_large} exceeds {MAX_FIDELITY_QUBITS}"
        )
    tasks = [
        (n, chi, task_seed(config.seed, n, chi, s), config.max_bond)
        for n in config.n_range
        for chi in config.chis
        for s in range(config.samples_per_n)
    ]
    logger.info("fidelity benchmark: %d tasks on %d workers", len(tasks), config.workers)
    rows = sorted(run_tasks(fidelity_task, tasks, config.workers))
    table = BenchTable(["n", "chi", "seed", "fidelity", "discarded_weight", "fidelity_estimate"], rows)

    series: dict[tuple[int, int], list[float]] = defaultdict(list)
    for n, chi, _, fid, _, _ in rows:
        series[(n, chi)].append(fid)
    table.comments.append("mean,n,chi,mean_fidelity")
    for (n, chi), values in sorted(series.items()):
        table.comments.append(f"mean,{n},{chi},{_format(np.mean(values))}")
    table.comments.append("fit,chi,slope,intercept,r2")
    for chi in config.chis:
        ns = [n for n in config.n_range if (n, chi) in series]
        if len(ns) < 2:
            continue
        fit = linear_fit(ns, [np.mean(series[(n, chi)]) for n in ns])
        table.comments.append(
            f"fit,{chi},{_format(fit.slope)},{_format(fit.intercept)},{_format(fit.r2)}"
        )
    return table


# ---------------------------------------------------------------------------
# depth benchmark
# ---------------------------------------------------------------------------

def depth_task(
    n: int, chi: int, seed: int, mode: str, max_bond: int | None, topologies: Sequence[str]
) -> list[tuple]:
    m = random_mps(n, chi, seed)
    ttn = renormalize(m, None if mode == "exact" else max_bond)
    circuit = ttn_to_circuit(ttn)
    max_gate = gate_stats(circuit)["max_arity"]
    predicted = predict_max_gate_qubits(n, chi).max_gate_qubits if chi >= 2 else 1
    rows = []
    for topology in topologies:
        _, report = transpile(circuit, coupling_graph(topology, n))
        rows.append((
            n, chi, str(CouplingKind(topology).value), mode, report.two_qubit_depth,
            report.total_depth, report.swap_count, max_gate, predicted, seed,
        ))
    return rows


def bench_depth(config: BenchConfig) -> BenchTable:
    topologies = [t.value for t in config.topologies]
    tasks = [
        (n, chi, task_seed(config.seed, n, chi, s), mode, config.max_bond, topologies)
        for n in config.n_range
        for chi in config.chis
        for mode in config.modes
        for s in range(config.samples_per_n)
    ]
    logger.info("depth benchmark: %d tasks on %d workers", len(tasks), config.workers)
    rows = sorted(r for batch in run_tasks(depth_task, tasks, config.workers) for r in batch)
    table = BenchTable(
        ["n", "chi", "topology", "mode", "two_qubit_depth", "total_depth", "swap_count",
         "max_gate_qubits", "predicted_max_gate_qubits", "seed"],
        rows,
    )
    series: dict[tuple, dict[int, list[int]]] = defaultdict(lambda: defaultdict(list))
    for n, chi, topology, mode, two_depth, *_ in rows:
        series[(chi, topology, mode)][n].append(two_depth)
    table.comments.append("fit,chi,topology,mode,a,b,r2")
    for (chi, topology, mode), by_n in sorted(series.items()):
        ns = sorted(by_n)
        if len(ns) < 2:
            continue
        fit = log2_fit(ns, [np.mean(by_n[n]) for n in ns])
        table.comments.append(
            f"fit,{chi},{topology},{mode},{_format(fit.slope)},{_format(fit.intercept)},{_format(fit.r2)}"
        )
    return table


# ---------------------------------------------------------------------------
# verifier demos
# ---------------------------------------------------------------------------

def build_operator(name: str, n: int, theta: float = 0.3, pauli: str | None = None) -> Mpo:
    """Operator by CLI name: ``mcz``, ``pauli-exp`` or ``identity``."""
    if n > MAX_VERIFIER_QUBITS:
        raise CapacityError(f"verifier circuits act on 2n qubits; n={n} exceeds {MAX_VERIFIER_QUBITS}")
    if name == "mcz":
        return mcz_mpo(n)
    if name == "pauli-exp":
        label = pauli or "Z" * n
        if len(label) != n:
            raise MalformedInputError(f"Pauli string {label!r} does not have length {n}")
        return pauli_exp_mpo(label, theta)
    if name == "identity":
        return identity_mpo(n)
    raise MalformedInputError(f"unknown operator {name!r}; expected one of {OPERATORS}")


def verify_overlap(u: Mpo, pairs: int, seed: int, max_bond: int | None = None) -> BenchTable:
    v = build_verifier(u, max_bond)
    table = BenchTable(["case", "n", "exact", "verifier", "abs_err"])
    for case in range(pairs):
        rng = np.random.default_rng(task_seed(seed, case))
        psi = Statevector.random(u.n, rng)
        phi = Statevector.random(u.n, rng)
        exact = direct_overlap(u, psi, phi)
        measured = overlap_exact(v, psi, phi)
        table.rows.append((case, u.n, exact, measured, abs(exact - measured)))
    worst = max((r[4] for r in table.rows), default=0.0)
    table.comments.append(f"max_abs_err,{_format(worst)}")
    return table


def shots_state_pair(u: Mpo, seed: int) -> tuple[Statevector, Statevector]:
    """psi random, phi an equal mix of U psi and a random state."""
    rng = np.random.default_rng(task_seed(seed, 0))
    psi = Statevector.random(u.n, rng)
    eta = Statevector.random(u.n, rng).amplitudes
    phi = np.sqrt(0.5) * (mpo_to_dense(u) @ psi.amplitudes) + np.sqrt(0.5) * eta
    return psi, Statevector(phi / np.linalg.norm(phi))


def verify_shots(u: Mpo, shots_grid: Iterable[int], repeats: int, seed: int) -> BenchTable:
    shots_grid = sorted(set(int(s) for s in shots_grid))
    if not shots_grid or shots_grid[0] < 1:
        raise MalformedInputError("shot counts must be positive")
    v = build_verifier(u)
    psi, phi = shots_state_pair(u, seed)
    probs = output_distribution(v, psi, phi)
    exact = overlap_exact(v, psi, phi)
    table = BenchTable(["shots", "seed", "estimate", "exact"])
    rmse = []
    for shots in shots_grid:
        errors = []
        for r in range(repeats):
            run_seed = task_seed(seed, shots, r)
            estimate = overlap_sampled(v, psi, phi, shots, run_seed, probs=probs)
            errors.append(estimate - exact)
            table.rows.append((shots, run_seed, estimate, exact))
        rmse.append(float(np.sqrt(np.mean(np.square(errors)))))
    table.comments.append("rmse,shots,value")
    table.comments += [f"rmse,{s},{_format(e)}" for s, e in zip(shots_grid, rmse)]
    if len(shots_grid) >= 2 and all(e > 0 for e in rmse):
        fit = loglog_slope(shots_grid, rmse)
        table.comments.append(f"fit,slope,{_format(fit.slope)},intercept,{_format(fit.intercept)},r2,{_format(fit.r2)}")
    return table


def verify_noise(u: Mpo, deltas: Iterable[float], seed: int, orthogonalize: bool = True) -> BenchTable:
    rng = np.random.default_rng(task_seed(seed, 1))
    psi = Statevector.random(u.n, rng)
    rows = noise_sweep(u, psi, deltas, seed, orthogonalize=orthogonalize)
    return BenchTable(["delta", "metric", "expected"], [(r.delta, r.metric, r.expected) for r in rows])
