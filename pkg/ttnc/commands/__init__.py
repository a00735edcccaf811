# ttnc/commands/__init__.py
"""Typer application assembled from the command modules."""
from typing import Optional

import typer

from ttnc.commands import bench, verify
from ttnc.commands import compile as compile_cmd
from ttnc.config import setup_logging

app = typer.Typer(name="ttnc", no_args_is_help=True, add_completion=False)


@app.callback()
def main(
    log_path: Optional[str] = typer.Option(None, "--log-path", help="Файл журнала (TTNC_LOG_PATH)"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Подробный журнал (DEBUG)"),
):
    """
    Компилятор MPS в схемы подготовки состояния логарифмической глубины.
    Журнал пишется в файл TTNC_LOG_PATH, результаты выводятся в stdout и CSV.
    """
    setup_logging(log_path, "DEBUG" if verbose else None)


compile_cmd.register(app)
bench.register(app)
app.add_typer(verify.router, name="verify")
