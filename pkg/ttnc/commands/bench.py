# ttnc/commands/bench.py
"""Команды ``bench-fidelity`` и ``bench-depth``: ансамбли случайных MPS."""
from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from ttnc import bench
from ttnc.commands.common import exit_on_error, parse_int_list, parse_max_bond
from ttnc.config import default_workers


def _config(
    n_range: str,
    chis: str,
    max_bond: Optional[str],
    samples: int,
    seed: int,
    topologies: str,
    modes: str,
    output_dir: Path,
    workers: Optional[int],
) -> bench.BenchConfig:
    return bench.BenchConfig(
        n_range=parse_int_list(n_range),
        chis=parse_int_list(chis),
        max_bond=parse_max_bond(max_bond),
        samples_per_n=samples,
        seed=seed,
        topologies=[t.strip() for t in topologies.split(",") if t.strip()],
        modes=[m.strip() for m in modes.split(",") if m.strip()],
        output_dir=output_dir,
        workers=workers or default_workers(),
    )


N_RANGE = typer.Option(..., "--n-range", help="Список '8,10,12' или диапазон '6:20:2'")
CHIS = typer.Option("2", "--chis", help="Связности χ через запятую")
MAX_BOND = typer.Option("2", "--max-bond", help="Усечение: степень двойки или 'none'")
SAMPLES = typer.Option(30, "--samples-per-n", help="Число случайных MPS на пару (n, χ)")
SEED = typer.Option(..., "--seed", help="Зерно генератора (обязательно)")
OUTPUT_DIR = typer.Option(Path("results"), "--output-dir", help="Каталог для CSV")
WORKERS = typer.Option(None, "--workers", help="Число процессов (по умолчанию TTNC_WORKERS)")


def bench_fidelity_command(
    n_range: str = N_RANGE,
    chis: str = CHIS,
    max_bond: Optional[str] = MAX_BOND,
    samples_per_n: int = SAMPLES,
    seed: int = SEED,
    output_dir: Path = OUTPUT_DIR,
    workers: Optional[int] = WORKERS,
    output: str = typer.Option("fidelity.csv", "--output", help="Имя файла в каталоге результатов"),
):
    """
    Точность приближённой подготовки состояния в зависимости от n.
    Пишет строки n,chi,seed,fidelity,... и линейную аппроксимацию для каждого χ.
    """
    with exit_on_error():
        config = _config(n_range, chis, max_bond, samples_per_n, seed,
                         "all_to_all", "approx", output_dir, workers)
        table = bench.bench_fidelity(config)
        path = bench.write_csv(table, config.config_json(), config.output_dir / output)
    typer.secho(f"Записано строк: {len(table.rows)} -> {path}", fg=typer.colors.GREEN)


def bench_depth_command(
    n_range: str = N_RANGE,
    chis: str = CHIS,
    max_bond: Optional[str] = MAX_BOND,
    samples_per_n: int = SAMPLES,
    seed: int = SEED,
    topologies: str = typer.Option(
        "all_to_all,square_grid,heavy_hex", "--topologies", help="Топологии через запятую"
    ),
    modes: str = typer.Option("approx", "--modes", help="exact и/или approx через запятую"),
    output_dir: Path = OUTPUT_DIR,
    workers: Optional[int] = WORKERS,
    output: str = typer.Option("depth.csv", "--output", help="Имя файла в каталоге результатов"),
):
    """
    Глубина транспилированных схем для разных топологий.
    Пишет строки с двухкубитной и полной глубиной, числом SWAP и
    логарифмическую аппроксимацию a·log2(n)+b для каждой серии.
    """
    with exit_on_error():
        config = _config(n_range, chis, max_bond, samples_per_n, seed,
                         topologies, modes, output_dir, workers)
        table = bench.bench_depth(config)
        path = bench.write_csv(table, config.config_json(), config.output_dir / output)
    typer.secho(f"Записано строк: {len(table.rows)} -> {path}", fg=typer.colors.GREEN)


def register(app: typer.Typer) -> None:
    app.command("bench-fidelity")(bench_fidelity_command)
    app.command("bench-depth")(bench_depth_command)
