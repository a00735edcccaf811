# ttnc/commands/verify.py
"""Команды ``verify overlap|shots|noise`` для схем-верификаторов MPO."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

import typer

from ttnc import bench
from ttnc.commands.common import exit_on_error, parse_float_list, parse_int_list

router = typer.Typer(help="Схемы-верификаторы |<φ|U|ψ>|² для MPO")

OPERATOR = typer.Option("mcz", "--operator", help="mcz, pauli-exp или identity")
N = typer.Option(3, "--n", help="Число кубитов оператора (не больше 8)")
SEED = typer.Option(..., "--seed", help="Зерно генератора")
THETA = typer.Option(0.3, "--theta", help="Угол для pauli-exp")
PAULI = typer.Option(None, "--pauli", help="Строка Паули для pauli-exp, по умолчанию Z…Z")


def _write(table: bench.BenchTable, params: dict, output: Path) -> None:
    path = bench.write_csv(table, json.dumps(params, sort_keys=True), output)
    typer.secho(f"Записано строк: {len(table.rows)} -> {path}", fg=typer.colors.GREEN)


@router.command("overlap")
def overlap_command(
    operator: str = OPERATOR,
    n: int = N,
    pairs: int = typer.Option(200, "--pairs", help="Число случайных пар (ψ, φ)"),
    seed: int = SEED,
    theta: float = THETA,
    pauli: Optional[str] = PAULI,
    output: Path = typer.Option(Path("results/overlap.csv"), "--output"),
):
    """Сравнивает выход верификатора с прямым вычислением |<φ|U|ψ>|²."""
    params = {"command": "overlap", "operator": operator, "n": n, "pairs": pairs,
              "seed": seed, "theta": theta, "pauli": pauli}
    with exit_on_error():
        u = bench.build_operator(operator, n, theta, pauli)
        _write(bench.verify_overlap(u, pairs, seed), params, output)


@router.command("shots")
def shots_command(
    operator: str = OPERATOR,
    n: int = N,
    shots: str = typer.Option("100,1000,10000", "--shots", help="Сетка числа измерений"),
    repeats: int = typer.Option(200, "--repeats", help="Повторов на каждое число измерений"),
    seed: int = SEED,
    theta: float = THETA,
    pauli: Optional[str] = PAULI,
    output: Path = typer.Option(Path("results/shots.csv"), "--output"),
):
    """Ошибка оценки по конечному числу измерений и наклон в log-log масштабе."""
    grid = parse_int_list(shots)
    params = {"command": "shots", "operator": operator, "n": n, "shots": grid,
              "repeats": repeats, "seed": seed, "theta": theta, "pauli": pauli}
    with exit_on_error():
        u = bench.build_operator(operator, n, theta, pauli)
        _write(bench.verify_shots(u, grid, repeats, seed), params, output)


@router.command("noise")
def noise_command(
    operator: str = OPERATOR,
    n: int = typer.Option(4, "--n", help="Число кубитов оператора (не больше 8)"),
    deltas: str = typer.Option(
        "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", "--deltas", help="Уровни шума δ"
    ),
    seed: int = SEED,
    orthogonalize: bool = typer.Option(
        True, "--orthogonalize/--no-orthogonalize", help="Ортогонализовать шум к Uψ"
    ),
    theta: float = THETA,
    pauli: Optional[str] = PAULI,
    output: Path = typer.Option(Path("results/noise.csv"), "--output"),
):
    """Метрика верификатора при подмешивании шума к Uψ."""
    levels = parse_float_list(deltas)
    params = {"command": "noise", "operator": operator, "n": n, "deltas": levels,
              "seed": seed, "orthogonalize": orthogonalize, "theta": theta, "pauli": pauli}
    with exit_on_error():
        u = bench.build_operator(operator, n, theta, pauli)
        _write(bench.verify_noise(u, levels, seed, orthogonalize), params, output)
