# ttnc/commands/compile.py
"""Команда ``compile``: MPS из JSON-файла в схему подготовки состояния."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

import typer

from ttnc.bench import MAX_FIDELITY_QUBITS
from ttnc.circuit import depth, gate_stats, serialize, simulate
from ttnc.commands.common import exit_on_error, parse_max_bond
from ttnc.coupling import CouplingKind, coupling_graph
from ttnc.errors import MalformedInputError
from ttnc.mps import fidelity, pad_bonds_pow2, require_normalized, to_statevector
from ttnc.transpiler import transpile
from ttnc.ttn import estimate_fidelity, renormalize, staircase_circuit, ttn_to_circuit
from ttnc.utils.serialize import load_mps

logger = logging.getLogger(__name__)


def compile_command(
    input_path: Path = typer.Argument(..., metavar="INPUT", help="MPS в формате JSON"),
    output: Path = typer.Option(..., "--output", "-o", help="Куда записать схему"),
    max_bond: Optional[str] = typer.Option(
        None, "--max-bond", help="Степень двойки или 'none' (точная компиляция)"
    ),
    method: str = typer.Option("ttn", "--method", help="ttn (логарифмическая глубина) или staircase"),
    fmt: str = typer.Option("json", "--format", help="json или qasm2"),
    topology: CouplingKind = typer.Option(
        CouplingKind.ALL_TO_ALL, "--topology", help="Топология для транспиляции при --format qasm2"
    ),
):
    """
    Компилирует MPS в схему подготовки состояния.
    Печатает отчёт одним JSON-объектом: точность (для n ≤ 20),
    число вентилей, глубину и отброшенный вес.
    """
    with exit_on_error():
        bond = parse_max_bond(max_bond)
        if method not in ("ttn", "staircase"):
            raise MalformedInputError(f"unknown method {method!r}")
        if fmt not in ("json", "qasm2"):
            raise MalformedInputError(f"unknown format {fmt!r}")
        mps = pad_bonds_pow2(load_mps(input_path))
        require_normalized(mps)

        report: dict = {"n": mps.n, "method": method, "bond_dims": mps.bond_dims}
        if method == "ttn":
            ttn = renormalize(mps, bond)
            circuit = ttn_to_circuit(ttn)
            report["layers"] = len(ttn.layers)
            report["discarded_weight"] = ttn.total_discarded_weight
            report["fidelity_estimate"] = estimate_fidelity(ttn)
        else:
            circuit = staircase_circuit(mps)
            report["discarded_weight"] = 0.0
        report["gates"] = gate_stats(circuit)
        report["depth"] = depth(circuit)
        report["multi_qubit_depth"] = depth(circuit, count_single_qubit=False)
        if mps.n <= MAX_FIDELITY_QUBITS:
            report["fidelity"] = fidelity(simulate(circuit), to_statevector(mps))

        if fmt == "qasm2":
            circuit, transpiled = transpile(circuit, coupling_graph(topology, mps.n))
            report["transpile"] = transpiled.model_dump()
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(serialize(circuit, fmt), encoding="utf-8")
        logger.info("compiled %s -> %s (%d gates)", input_path, output, len(circuit))
    typer.echo(json.dumps(report))


def register(app: typer.Typer) -> None:
    app.command("compile")(compile_command)
