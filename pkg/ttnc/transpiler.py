"""Lowering to CX + single-qubit gates and routing onto coupling graphs.

Multi-qubit gates are synthesised by recursive quantum Shannon
decomposition: a cosine-sine split gives a multiplexed Ry on the top qubit
between two block-diagonal multiplexors, each block-diagonal multiplexor is
demultiplexed into two smaller unitaries around a multiplexed Rz, and every
multiplexed rotation becomes a CX ladder.
"""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from pydantic import BaseModel
from scipy.linalg import cossin, schur

from ttnc.circuit import (
    FIXED_MATRICES,
    Circuit,
    Gate,
    circuit_unitary,
    depth,
    ry_matrix,
    rz_matrix,
    simulate,
    standard_gate,
)
from ttnc.coupling import CouplingGraph, CouplingKind, bisection_layout
from ttnc.errors import CapacityError, DimensionMismatchError, MalformedInputError

logger = logging.getLogger(__name__)

MAX_DECOMPOSE_QUBITS = 8
BASIS_ATOL = 1e-12
IDENTITY_ATOL = 1e-12


class TranspileReport(BaseModel):
    two_qubit_count: int = 0
    total_depth: int = 0
    two_qubit_depth: int = 0
    swap_count: int = 0
    initial_layout: list[int] = []
    final_layout: list[int] = []


class RoutingResult(BaseModel):
    model_config = {"arbitrary_types_allowed": True}

    circuit: Circuit
    swap_count: int
    initial_layout: list[int]
    final_layout: list[int]


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------

def _basis_name(u: np.ndarray) -> str | None:
    for name in ("cx", "cz", "swap"):
        if np.allclose(u, FIXED_MATRICES[name], atol=BASIS_ATOL):
            return name
    return None


def _multiplexed_rotation(
    axis: str, target: int, controls: Sequence[int], angles: np.ndarray
) -> list[Gate]:
    """Rotation on ``target`` whose angle is selected by the control bits."""
    rotation = ry_matrix if axis == "y" else rz_matrix
    if not controls:
        return [Gate((target,), rotation(float(angles[0])))]
    half = len(angles) // 2
    alpha, beta = angles[:half], angles[half:]
    first = _multiplexed_rotation(axis, target, controls[1:], (alpha + beta) / 2)
    second = _multiplexed_rotation(axis, target, controls[1:], (alpha - beta) / 2)
    cx = standard_gate("cx", (controls[0], target))
    return first + [cx] + second + [cx]


def _demultiplex(a0: np.ndarray, a1: np.ndarray, qubits: tuple[int, ...]) -> list[Gate]:
    """blockdiag(a0, a1) with the block selected by qubits[0]."""
    t, v = schur(a0 @ a1.conj().T, output="complex")
    d = np.exp(0.5j * np.angle(np.diag(t)))
    w = np.diag(d) @ v.conj().T @ a1
    gates = _shannon(w, qubits[1:])
    gates += _multiplexed_rotation("z", qubits[0], qubits[1:], -2 * np.angle(d))
    gates += _shannon(v, qubits[1:])
    return gates


def _shannon(u: np.ndarray, qubits: tuple[int, ...]) -> list[Gate]:
    k = len(qubits)
    if k == 1:
        return [Gate(qubits, u)]
    if k == 2:
        name = _basis_name(u)
        if name:
            return [standard_gate(name, qubits)]
    h = u.shape[0] // 2
    left, cs, right = cossin(u, p=h, q=h)
    theta = np.arctan2(np.diag(cs[h:, :h]), np.diag(cs[:h, :h]))
    gates = _demultiplex(right[:h, :h], right[h:, h:], qubits)
    gates += _multiplexed_rotation("y", qubits[0], qubits[1:], 2 * theta)
    gates += _demultiplex(left[:h, :h], left[h:, h:], qubits)
    return gates


def fuse_single_qubit(gates: Sequence[Gate]) -> list[Gate]:
    """Merge runs of 1-qubit gates on the same qubit; drop identities."""
    pending: dict[int, np.ndarray] = {}
    out: list[Gate] = []

    def flush(q: int) -> None:
        u = pending.pop(q, None)
        if u is None:
            return
        phase = np.trace(u) / 2
        if abs(abs(phase) - 1) < IDENTITY_ATOL and np.allclose(u, phase * np.eye(2), atol=IDENTITY_ATOL):
            return
        out.append(Gate((q,), u))

    for gate in gates:
        if gate.arity == 1:
            (q,) = gate.qubits
            pending[q] = gate.unitary @ pending.get(q, np.eye(2, dtype=complex))
            continue
        for q in gate.qubits:
            flush(q)
        out.append(gate)
    for q in sorted(pending):
        flush(q)
    return out


def decompose_gate(g: Gate) -> list[Gate]:
    """Exact CX + 1-qubit realisation of a gate with at most 8 qubits."""
    if not 1 <= g.arity <= MAX_DECOMPOSE_QUBITS:
        raise CapacityError(f"cannot decompose a {g.arity}-qubit gate (limit {MAX_DECOMPOSE_QUBITS})")
    if g.arity == 1 or (g.arity == 2 and g.name in ("cx", "cz", "swap")):
        return [g]
    gates = fuse_single_qubit(_shannon(np.array(g.unitary), g.qubits))
    logger.debug("decomposed %d-qubit gate into %d gates", g.arity, len(gates))
    return gates


# ---------------------------------------------------------------------------
# single-qubit basis rewriting
# ---------------------------------------------------------------------------

def euler_zyz(u: np.ndarray) -> tuple[float, float, float]:
    """(theta, phi, lam) with u = e^{ia} Rz(phi) Ry(theta) Rz(lam)."""
    v = u / np.sqrt(np.linalg.det(u))
    theta = 2 * np.arctan2(abs(v[1, 0]), abs(v[0, 0]))
    a, b = np.angle(v[1, 1]), np.angle(v[1, 0])
    return float(theta), float(a + b), float(a - b)


def as_u_gate(g: Gate) -> Gate:
    return Gate(g.qubits, g.unitary, "U", euler_zyz(g.unitary))


def _lower_single(g: Gate, kind: CouplingKind) -> list[Gate]:
    theta, phi, lam = euler_zyz(g.unitary)
    (q,) = g.qubits
    if kind is CouplingKind.HEAVY_HEX:
        return [
            standard_gate("rz", (q,), (lam,)),
            standard_gate("sx", (q,)),
            standard_gate("rz", (q,), (theta + np.pi,)),
            standard_gate("sx", (q,)),
            standard_gate("rz", (q,), (phi + np.pi,)),
        ]
    return [
        standard_gate("rz", (q,), (lam - np.pi / 2,)),
        standard_gate("rx", (q,), (theta,)),
        standard_gate("rz", (q,), (phi + np.pi / 2,)),
    ]


def lower_to_basis(c: Circuit, kind: str | CouplingKind) -> Circuit:
    """Rewrite into the native set of the architecture.

    all_to_all -> {rz, rx, cx}, square_grid -> {rz, rx, cz},
    heavy_hex -> {rz, sx, cx}. Two-qubit gate counts are unchanged.
    """
    kind = CouplingKind(kind)
    entangler = "cz" if kind is CouplingKind.SQUARE_GRID else "cx"
    gates: list[Gate] = []
    for gate in c.gates:
        if gate.arity == 1:
            gates += _lower_single(gate, kind)
        elif gate.name == entangler:
            gates.append(gate)
        elif gate.name in ("cx", "cz"):
            a, b = gate.qubits
            h = _lower_single(standard_gate("h", (b,)), kind)
            gates += h + [standard_gate(entangler, (a, b))] + h
        else:
            raise MalformedInputError(f"cannot lower {gate.arity}-qubit gate {gate.name!r}")
    return Circuit(c.n_qubits, tuple(gates))


# ---------------------------------------------------------------------------
# routing
# ---------------------------------------------------------------------------

def _cancel_swap_pairs(gates: Sequence[Gate]) -> list[Gate]:
    """Drop back-to-back swaps on the same pair with nothing in between."""
    kept: list[Gate | None] = []
    last: dict[int, list[int]] = {}
    for gate in gates:
        if gate.name == "swap":
            a, b = gate.qubits
            ia, ib = last.get(a, []), last.get(b, [])
            if ia and ib and ia[-1] == ib[-1]:
                prev = kept[ia[-1]]
                if prev is not None and prev.name == "swap" and set(prev.qubits) == {a, b}:
                    kept[ia[-1]] = None
                    ia.pop()
                    ib.pop()
                    continue
        for q in gate.qubits:
            last.setdefault(q, []).append(len(kept))
        kept.append(gate)
    return [g for g in kept if g is not None]


def route(
    c: Circuit, graph: CouplingGraph, initial_layout: Sequence[int] | None = None
) -> RoutingResult:
    """Meet-in-the-middle SWAP routing that restores the layout after each gate.

    For a non-adjacent two-qubit gate both operands step alternately along a
    shortest path toward each other, always to the neighbour with the
    smallest index. After the gate the swaps are undone in reverse order, so
    every gate sees ``initial_layout``; undo swaps that meet the next gate's
    outbound swaps cancel.
    """
    if c.n_qubits > graph.n_physical:
        raise CapacityError(f"{c.n_qubits} logical qubits exceed {graph.n_physical} physical")
    if not graph.is_connected():
        raise MalformedInputError("coupling graph is not connected")
    layout = list(initial_layout) if initial_layout is not None else list(range(c.n_qubits))
    if len(layout) != c.n_qubits or len(set(layout)) != len(layout):
        raise DimensionMismatchError(f"invalid initial layout {layout}")
    if any(not 0 <= p < graph.n_physical for p in layout):
        raise DimensionMismatchError(f"layout {layout} leaves the coupling graph")
    start = list(layout)
    dist = graph.distances
    gates: list[Gate] = []
    for gate in c.gates:
        if gate.arity == 1:
            gates.append(gate.remap(layout))
            continue
        if gate.arity != 2:
            raise DimensionMismatchError(f"route expects 1- and 2-qubit gates, got arity {gate.arity}")
        occupant = {p: q for q, p in enumerate(layout)}
        path: list[tuple[int, int]] = []
        mover, other = gate.qubits
        while dist[layout[mover]][layout[other]] > 1:
            pa, pb = layout[mover], layout[other]
            step = min(x for x in graph.graph.neighbors(pa) if dist[x][pb] == dist[pa][pb] - 1)
            path.append((pa, step))
            moved = occupant.pop(step, None)
            occupant[step] = mover
            layout[mover] = step
            if moved is not None:
                occupant[pa] = moved
                layout[moved] = pa
            else:
                occupant.pop(pa, None)
            mover, other = other, mover
        gates += [standard_gate("swap", pair) for pair in path]
        gates.append(gate.remap(layout))
        gates += [standard_gate("swap", pair) for pair in reversed(path)]
        layout = list(start)
    gates = _cancel_swap_pairs(gates)
    swaps = sum(1 for g in gates if g.name == "swap")
    logger.debug("routed %d gates on %s with %d swaps", len(c.gates), graph.kind.value, swaps)
    return RoutingResult(
        circuit=Circuit(graph.n_physical, tuple(gates)),
        swap_count=swaps,
        initial_layout=start,
        final_layout=list(layout),
    )


def _expand_swaps(gates: Sequence[Gate]) -> list[Gate]:
    out = []
    for gate in gates:
        if gate.name == "swap":
            a, b = gate.qubits
            out += [
                standard_gate("cx", (a, b)),
                standard_gate("cx", (b, a)),
                standard_gate("cx", (a, b)),
            ]
        else:
            out.append(gate)
    return out


def transpile(
    c: Circuit, graph: CouplingGraph, lower: bool = True
) -> tuple[Circuit, TranspileReport]:
    """Decompose, place by bisection, route, expand SWAPs to CX and optionally lower."""
    logical: list[Gate] = []
    for gate in c.gates:
        logical += decompose_gate(gate)
    routed = route(Circuit(c.n_qubits, tuple(logical)), graph, bisection_layout(graph, c.n_qubits))
    gates = fuse_single_qubit(_expand_swaps(routed.circuit.gates))
    out = Circuit(graph.n_physical, tuple(as_u_gate(g) if g.arity == 1 else g for g in gates))
    if lower:
        out = lower_to_basis(out, graph.kind)
    report = TranspileReport(
        two_qubit_count=sum(1 for g in out.gates if g.arity == 2),
        total_depth=depth(out, count_single_qubit=True),
        two_qubit_depth=depth(out, count_single_qubit=False),
        swap_count=routed.swap_count,
        initial_layout=routed.initial_layout,
        final_layout=routed.final_layout,
    )
    logger.info(
        "transpiled %d-qubit circuit for %s: %d two-qubit gates, depth %d",
        c.n_qubits, graph.kind.value, report.two_qubit_count, report.two_qubit_depth,
    )
    return out, report


# ---------------------------------------------------------------------------
# equivalence checking
# ---------------------------------------------------------------------------

def _physical_index(bits: int, n_logical: int, layout: Sequence[int], n_physical: int) -> int:
    index = 0
    for q in range(n_logical):
        if (bits >> (n_logical - 1 - q)) & 1:
            index |= 1 << (n_physical - 1 - layout[q])
    return index


def equivalence_error(
    original: Circuit,
    routed: Circuit,
    initial_layout: Sequence[int] | None = None,
    final_layout: Sequence[int] | None = None,
) -> float:
    """Operator-norm distance between two circuits up to global phase.

    Logical basis inputs are placed through ``initial_layout`` and the
    expected outputs are read through ``final_layout``; unused physical
    qubits start in |0>.
    """
    n, m = original.n_qubits, routed.n_qubits
    initial = list(initial_layout) if initial_layout is not None else list(range(n))
    final = list(final_layout) if final_layout is not None else list(initial)
    expected_logical = circuit_unitary(original)
    actual = np.zeros((2**m, 2**n), dtype=complex)
    expected = np.zeros((2**m, 2**n), dtype=complex)
    out_index = [_physical_index(x, n, final, m) for x in range(2**n)]
    for x in range(2**n):
        basis = np.zeros(2**m, dtype=complex)
        basis[_physical_index(x, n, initial, m)] = 1.0
        actual[:, x] = simulate(routed, basis).amplitudes
        expected[out_index, x] = expected_logical[:, x]
    overlap = np.trace(expected.conj().T @ actual)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(actual - phase * expected, ord=2))
