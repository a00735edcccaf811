# ttnc/utils/serialize.py
"""JSON codecs for MPS and MPO files.

Both use the same layout::

    {"n": 4, "bond_dims": [1, 2, 2, 2, 1],
     "sites": [{"shape": [1, 2, 2], "re": [...], "im": [...]}, ...]}

with each site flattened in row-major order. MPO sites have shape
``(left, in, out, right)``.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List

import numpy as np

from ttnc.errors import MalformedInputError, TtncError
from ttnc.mps import Mpo, Mps


def serialize_site(data: np.ndarray) -> Dict[str, object]:
    """Return a JSON serialisable representation of one site tensor."""
    flat = np.asarray(data).reshape(-1)
    return {
        "shape": list(data.shape),
        "re": flat.real.tolist(),
        "im": flat.imag.tolist(),
    }


def serialize_mps(m: Mps) -> Dict[str, object]:
    return {
        "n": m.n,
        "bond_dims": m.bond_dims,
        "sites": [serialize_site(a) for a in m.arrays()],
    }


def serialize_mpo(u: Mpo) -> Dict[str, object]:
    return {
        "n": u.n,
        "bond_dims": u.bond_dims,
        "sites": [serialize_site(a) for a in u.arrays()],
    }


def _parse_sites(payload: object, rank: int) -> List[np.ndarray]:
    if not isinstance(payload, dict) or "sites" not in payload or "n" not in payload:
        raise MalformedInputError("expected an object with 'n' and 'sites'")
    sites = payload["sites"]
    if not isinstance(sites, list) or len(sites) != payload["n"]:
        raise MalformedInputError(f"'n' is {payload['n']} but {len(sites)} sites were given")
    arrays = []
    for i, site in enumerate(sites):
        try:
            shape = [int(d) for d in site["shape"]]
            re = np.asarray(site["re"], dtype=float)
            im = np.asarray(site.get("im", np.zeros_like(re)), dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"site {i}: {exc}") from exc
        if len(shape) != rank:
            raise MalformedInputError(f"site {i}: expected rank {rank}, got shape {shape}")
        if re.size != int(np.prod(shape)) or im.size != re.size:
            raise MalformedInputError(f"site {i}: data length does not match shape {shape}")
        arrays.append((re + 1j * im).reshape(shape))
    return arrays


def _checked(build, payload: object, arrays: List[np.ndarray]):
    try:
        result = build(arrays)
    except TtncError as exc:
        raise MalformedInputError(str(exc)) from exc
    declared = payload.get("bond_dims")
    if declared is not None and list(declared) != result.bond_dims:
        raise MalformedInputError(f"bond_dims {declared} do not match the site shapes {result.bond_dims}")
    return result


def mps_from_dict(payload: object) -> Mps:
    return _checked(Mps.from_arrays, payload, _parse_sites(payload, 3))


def mpo_from_dict(payload: object) -> Mpo:
    return _checked(Mpo.from_arrays, payload, _parse_sites(payload, 4))


def _read_json(path: str | Path) -> object:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise MalformedInputError(f"{path}: {exc.strerror}") from exc


def load_mps(path: str | Path) -> Mps:
    return mps_from_dict(_read_json(path))


def load_mpo(path: str | Path) -> Mpo:
    return mpo_from_dict(_read_json(path))


def dump_mps(m: Mps, path: str | Path) -> None:
    Path(path).write_text(json.dumps(serialize_mps(m)) + "\n", encoding="utf-8")


def dump_mpo(u: Mpo, path: str | Path) -> None:
    Path(path).write_text(json.dumps(serialize_mpo(u)) + "\n", encoding="utf-8")
