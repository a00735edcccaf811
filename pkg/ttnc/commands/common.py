# ttnc/commands/common.py
"""Общие помощники командного слоя: разбор списков и коды выхода."""
from __future__ import annotations

import logging
from contextlib import contextmanager
from typing import Iterator

import typer
from pydantic import ValidationError

from ttnc.errors import CapacityError, TtncError
from ttnc.tensor_core import is_power_of_two

logger = logging.getLogger(__name__)


@contextmanager
def exit_on_error() -> Iterator[None]:
    """Translate library errors into exit codes 2 (input) and 3 (capacity)."""
    try:
        yield
    except CapacityError as exc:
        logger.warning("capacity exceeded: %s", exc)
        typer.secho(f"Превышен лимит: {exc}", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=CapacityError.exit_code)
    except (TtncError, ValidationError) as exc:
        logger.warning("rejected input: %s", exc)
        typer.secho(f"Некорректные входные данные: {exc}", fg=typer.colors.RED, err=True)
        raise typer.Exit(code=2)


def parse_int_list(text: str) -> list[int]:
    """``"8,10,12"`` or an inclusive range ``"8:20"`` / ``"8:20:2"``."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step < 1:
                raise ValueError("step must be positive")
            return list(range(start, stop + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise typer.BadParameter(f"cannot parse integer list {text!r}: {exc}") from exc


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise typer.BadParameter(f"cannot parse number list {text!r}") from exc


def parse_max_bond(text: str | None) -> int | None:
    if text is None or text.strip().lower() in ("", "none"):
        return None
    try:
        value = int(text)
    except ValueError as exc:
        raise typer.BadParameter(f"max bond must be an integer or 'none', got {text!r}") from exc
    if not is_power_of_two(value):
        raise typer.BadParameter(f"max bond must be a power of two, got {value}")
    return value
