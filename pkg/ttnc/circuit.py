"""Gate-level IR: dense k-qubit gates on an n-qubit register.

The first qubit listed on a gate is the most significant bit of the gate
matrix index, matching the statevector convention of :mod:`ttnc.mps`.
"""
from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ttnc.config import MAX_SIM_QUBITS
from ttnc.errors import (
    CapacityError,
    DimensionMismatchError,
    MalformedInputError,
    NotUnitaryError,
)
from ttnc.mps import Statevector, as_statevector

logger = logging.getLogger(__name__)

MAX_GATE_QUBITS = 16
UNITARY_ATOL = 1e-10
QASM_GATES = {"x", "h", "sx", "rz", "rx", "cx", "cz", "swap", "U"}
SELF_INVERSE = {"x", "h", "cx", "cz", "swap"}


def _float(value: float) -> str:
    return format(float(value), ".17g")


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def u_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    """OpenQASM ``U(theta, phi, lambda)``."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]]
    )


FIXED_MATRICES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "sx": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]),
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}
PARAM_MATRICES = {"rz": rz_matrix, "rx": rx_matrix, "U": u_matrix}


@dataclass(frozen=True, eq=False)
class Gate:
    qubits: tuple[int, ...]
    unitary: np.ndarray
    name: str | None = None
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        qubits = tuple(int(q) for q in self.qubits)
        if not qubits or len(set(qubits)) != len(qubits) or min(qubits) < 0:
            raise ValueError(f"gate qubits must be distinct non-negative indices, got {qubits}")
        k = len(qubits)
        if k > MAX_GATE_QUBITS:
            raise CapacityError(
                f"{k}-qubit gate exceeds the {MAX_GATE_QUBITS}-qubit limit; use a smaller max_bond"
            )
        u = np.array(self.unitary, dtype=complex)
        if u.shape != (2**k, 2**k):
            raise DimensionMismatchError(f"{k}-qubit gate needs a {2**k}x{2**k} matrix, got {u.shape}")
        error = np.max(np.abs(u.conj().T @ u - np.eye(2**k)))
        if error > UNITARY_ATOL:
            raise NotUnitaryError(f"gate on {qubits} is not unitary (error {error:.3e})")
        u.setflags(write=False)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def dagger(self) -> "Gate":
        name, params = None, ()
        if self.name in SELF_INVERSE:
            name = self.name
        elif self.name in ("rz", "rx"):
            name, params = self.name, (-self.params[0],)
        elif self.name == "U":
            theta, phi, lam = self.params
            name, params = "U", (-theta, -lam, -phi)
        return Gate(self.qubits, self.unitary.conj().T, name, params)

    def remap(self, mapping: dict[int, int] | Sequence[int]) -> "Gate":
        return Gate(tuple(mapping[q] for q in self.qubits), self.unitary, self.name, self.params)


def standard_gate(name: str, qubits: Sequence[int], params: Sequence[float] = ()) -> Gate:
    """Named basis gate, e.g. ``standard_gate("cx", (0, 1))``."""
    if name in FIXED_MATRICES:
        return Gate(tuple(qubits), FIXED_MATRICES[name], name)
    if name in PARAM_MATRICES:
        return Gate(tuple(qubits), PARAM_MATRICES[name](*params), name, tuple(params))
    raise MalformedInputError(f"unknown gate name {name!r}")


@dataclass(frozen=True, eq=False)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        gates = tuple(self.gates)
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        for gate in gates:
            if max(gate.qubits) >= self.n_qubits:
                raise DimensionMismatchError(
                    f"gate on {gate.qubits} outside a {self.n_qubits}-qubit register"
                )
        object.__setattr__(self, "gates", gates)

    def __len__(self) -> int:
        return len(self.gates)

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.n_qubits, self.gates + tuple(gates))


def _apply(state: np.ndarray, gate: Gate) -> np.ndarray:
    k = gate.arity
    u = gate.unitary.reshape((2,) * (2 * k))
    out = np.tensordot(u, state, axes=(list(range(k, 2 * k)), list(gate.qubits)))
    return np.moveaxis(out, list(range(k)), list(gate.qubits))


def simulate(c: Circuit, state: "Statevector | np.ndarray | None" = None) -> Statevector:
    """Apply the gates in order; starts from |0...0> when ``state`` is None."""
    if c.n_qubits > MAX_SIM_QUBITS:
        raise CapacityError(f"{c.n_qubits} qubits exceed the simulation limit of {MAX_SIM_QUBITS}")
    psi = Statevector.zero(c.n_qubits) if state is None else as_statevector(state)
    if psi.n_qubits != c.n_qubits:
        raise DimensionMismatchError(
            f"{psi.n_qubits}-qubit state given to a {c.n_qubits}-qubit circuit"
        )
    tensor = psi.amplitudes.reshape((2,) * c.n_qubits)
    for gate in c.gates:
        tensor = _apply(tensor, gate)
    return Statevector(tensor.reshape(-1))


def circuit_unitary(c: Circuit, max_qubits: int = 12) -> np.ndarray:
    """Dense 2^n x 2^n matrix of the whole circuit."""
    if c.n_qubits > max_qubits:
        raise CapacityError(f"dense unitary of {c.n_qubits} qubits exceeds {max_qubits}")
    dim = 2**c.n_qubits
    # trailing axis indexes the input basis state
    tensor = np.eye(dim, dtype=complex).reshape((2,) * c.n_qubits + (dim,))
    for gate in c.gates:
        tensor = _apply(tensor, gate)
    return tensor.reshape(dim, dim)


def invert(c: Circuit) -> Circuit:
    return Circuit(c.n_qubits, tuple(g.dagger() for g in reversed(c.gates)))


def depth(c: Circuit, count_single_qubit: bool = True) -> int:
    """ASAP layering depth; 1-qubit gates are transparent when not counted."""
    level = [0] * c.n_qubits
    for gate in c.gates:
        if gate.arity == 1 and not count_single_qubit:
            continue
        layer = max(level[q] for q in gate.qubits) + 1
        for q in gate.qubits:
            level[q] = layer
    return max(level, default=0)


def gate_stats(c: Circuit) -> dict:
    by_arity = Counter(g.arity for g in c.gates)
    return {
        "gates": len(c.gates),
        "by_arity": {str(k): by_arity[k] for k in sorted(by_arity)},
        "max_arity": max(by_arity, default=0),
        "two_qubit": by_arity.get(2, 0),
        "multi_qubit": sum(v for k, v in by_arity.items() if k >= 2),
    }


def _gate_to_dict(gate: Gate) -> dict:
    entry = {
        "qubits": list(gate.qubits),
        "re": gate.unitary.real.tolist(),
        "im": gate.unitary.imag.tolist(),
    }
    if gate.name:
        entry["name"] = gate.name
    if gate.params:
        entry["params"] = list(gate.params)
    return entry


def _to_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{c.n_qubits}];"]
    for gate in c.gates:
        if gate.arity > 2 or gate.name not in QASM_GATES:
            raise MalformedInputError(
                f"gate on {gate.qubits} has no basis name; transpile before exporting qasm2"
            )
        args = ",".join(f"q[{q}]" for q in gate.qubits)
        if gate.params:
            params = ",".join(_float(p) for p in gate.params)
            lines.append(f"{gate.name}({params}) {args};")
        else:
            lines.append(f"{gate.name} {args};")
    return "\n".join(lines) + "\n"


def serialize(c: Circuit, fmt: str = "json") -> str:
    if fmt == "json":
        payload = {"n_qubits": c.n_qubits, "gates": [_gate_to_dict(g) for g in c.gates]}
        return json.dumps(payload) + "\n"
    if fmt == "qasm2":
        return _to_qasm(c)
    raise MalformedInputError(f"unknown circuit format {fmt!r}")


def deserialize(text: str) -> Circuit:
    """Inverse of ``serialize(c, "json")``."""
    try:
        payload = json.loads(text)
        gates = []
        for entry in payload["gates"]:
            unitary = np.array(entry["re"], dtype=float) + 1j * np.array(entry["im"], dtype=float)
            gates.append(
                Gate(tuple(entry["qubits"]), unitary, entry.get("name"), tuple(entry.get("params", ())))
            )
        return Circuit(int(payload["n_qubits"]), tuple(gates))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise MalformedInputError(f"invalid circuit JSON: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, MalformedInputError):
            raise
        raise MalformedInputError(f"invalid circuit JSON: {exc}") from exc
