import os
import sys

import networkx as nx
import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from ttnc.circuit import Circuit, Gate, circuit_unitary, rz_matrix, ry_matrix, serialize, standard_gate
from ttnc.coupling import (
    CouplingGraph,
    CouplingKind,
    all_to_all,
    bisection_layout,
    coupling_graph,
    heavy_hex,
    square_grid,
)
from ttnc.errors import CapacityError, MalformedInputError
from ttnc.mps import ghz_mps, product_mps, random_mps
from ttnc.transpiler import (
    decompose_gate,
    equivalence_error,
    euler_zyz,
    fuse_single_qubit,
    lower_to_basis,
    route,
    transpile,
)
from ttnc.ttn import renormalize, ttn_to_circuit

BASIS = {
    CouplingKind.ALL_TO_ALL: {"rz", "rx", "cx"},
    CouplingKind.SQUARE_GRID: {"rz", "rx", "cz"},
    CouplingKind.HEAVY_HEX: {"rz", "sx", "cx"},
}


def random_unitary(rng, dim):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def phase_distance(a, b):
    overlap = np.trace(b.conj().T @ a)
    phase = overlap / abs(overlap)
    return np.linalg.norm(a - phase * b, ord=2)


def random_circuit(rng, n, n_gates):
    gates = []
    for _ in range(n_gates):
        k = int(rng.integers(1, min(3, n) + 1))
        qubits = tuple(int(q) for q in rng.choice(n, size=k, replace=False))
        gates.append(Gate(qubits, random_unitary(rng, 2**k)))
    return Circuit(n, tuple(gates))


@pytest.fixture
def rng():
    return np.random.default_rng(77)


def test_single_qubit_and_basis_gates_pass_through():
    h = standard_gate("h", (0,))
    assert decompose_gate(h) == [h]
    cx = standard_gate("cx", (1, 0))
    assert decompose_gate(cx) == [cx]


@pytest.mark.parametrize("k", [2, 3, 4])
def test_shannon_decomposition_is_exact(rng, k):
    u = random_unitary(rng, 2**k)
    gates = decompose_gate(Gate(tuple(range(k)), u))
    assert all(g.arity <= 2 for g in gates)
    assert all(g.name == "cx" for g in gates if g.arity == 2)
    assert phase_distance(circuit_unitary(Circuit(k, tuple(gates))), u) < 1e-8


def test_decomposition_respects_qubit_order(rng):
    u = random_unitary(rng, 8)
    gate = Gate((3, 0, 2), u)
    lowered = Circuit(4, tuple(decompose_gate(gate)))
    assert phase_distance(circuit_unitary(lowered), circuit_unitary(Circuit(4, (gate,)))) < 1e-8


def test_decompose_limit():
    with pytest.raises(CapacityError):
        decompose_gate(Gate(tuple(range(9)), np.eye(2**9)))


def test_fuse_drops_identities():
    gates = [standard_gate("h", (0,)), standard_gate("h", (0,)), standard_gate("x", (1,))]
    fused = fuse_single_qubit(gates)
    assert len(fused) == 1
    assert fused[0].qubits == (1,)


def test_euler_angles_reconstruct(rng):
    for _ in range(20):
        u = random_unitary(rng, 2)
        theta, phi, lam = euler_zyz(u)
        rebuilt = rz_matrix(phi) @ ry_matrix(theta) @ rz_matrix(lam)
        assert phase_distance(rebuilt, u) < 1e-10
    for u in (np.eye(2), standard_gate("x", (0,)).unitary, rz_matrix(0.4)):
        theta, phi, lam = euler_zyz(u)
        assert phase_distance(rz_matrix(phi) @ ry_matrix(theta) @ rz_matrix(lam), u) < 1e-10


@pytest.mark.parametrize("kind", list(CouplingKind))
def test_lowering_uses_the_native_set(rng, kind):
    logical = Circuit(3, tuple(g for gate in random_circuit(rng, 3, 4).gates for g in decompose_gate(gate)))
    lowered = lower_to_basis(logical, kind)
    assert {g.name for g in lowered.gates} <= BASIS[kind]
    assert sum(g.arity == 2 for g in lowered.gates) == sum(g.arity == 2 for g in logical.gates)
    assert phase_distance(circuit_unitary(lowered), circuit_unitary(logical)) < 1e-8


def test_route_on_all_to_all_needs_no_swaps(rng):
    logical = Circuit(4, tuple(g for gate in random_circuit(rng, 4, 5).gates for g in decompose_gate(gate)))
    result = route(logical, all_to_all(4))
    assert result.swap_count == 0
    assert result.final_layout == [0, 1, 2, 3]


def test_route_inserts_swaps_on_a_grid():
    grid = square_grid(4)
    assert not grid.has_edge(0, 3)
    result = route(Circuit(4, (standard_gate("cx", (0, 3)),)), grid)
    assert result.swap_count >= 1
    for gate in result.circuit.gates:
        assert grid.has_edge(*gate.qubits)
    assert equivalence_error(
        Circuit(4, (standard_gate("cx", (0, 3)),)), result.circuit, result.initial_layout, result.final_layout
    ) < 1e-10


def test_route_restores_layout_and_cancels_swaps():
    grid = square_grid(4)
    logical = Circuit(4, (standard_gate("cx", (0, 3)), standard_gate("cx", (0, 3))))
    result = route(logical, grid, [0, 1, 2, 3])
    assert result.swap_count == 2
    assert result.final_layout == result.initial_layout
    assert equivalence_error(logical, result.circuit, result.initial_layout, result.final_layout) < 1e-10


def test_route_meets_in_the_middle():
    grid = square_grid(9)
    result = route(Circuit(9, (standard_gate("cx", (0, 8)),)), grid)
    # distance 4: three alternating steps out, three back
    assert result.swap_count == 6
    assert result.final_layout == list(range(9))


def test_bisection_layout_keeps_pairs_adjacent():
    for n in (4, 16, 64):
        graph = square_grid(n)
        layout = bisection_layout(graph, n)
        assert sorted(layout) == list(range(n))
        for i in range(0, n, 2):
            assert graph.has_edge(layout[i], layout[i + 1])
    for kind in CouplingKind:
        for n in (5, 12, 30):
            assert sorted(bisection_layout(coupling_graph(kind, n), n)) == list(range(n))
    assert bisection_layout(all_to_all(6), 6) == list(range(6))
    with pytest.raises(CapacityError):
        bisection_layout(square_grid(4), 5)


def test_bisection_shortens_tree_routing():
    m = random_mps(16, 2, seed=4)
    logical = ttn_to_circuit(renormalize(m, max_bond=2))
    decomposed = Circuit(16, tuple(g for gate in logical.gates for g in decompose_gate(gate)))
    graph = square_grid(16)
    placed = route(decomposed, graph, bisection_layout(graph, 16))
    naive = route(decomposed, graph)
    assert placed.swap_count <= naive.swap_count
    out, report = transpile(logical, graph)
    assert report.initial_layout == bisection_layout(graph, 16)


def test_route_rejects_bad_graphs():
    graph = nx.Graph()
    graph.add_edges_from([(0, 1), (2, 3)])
    with pytest.raises(MalformedInputError):
        route(Circuit(4, (standard_gate("cx", (0, 3)),)), CouplingGraph(CouplingKind.SQUARE_GRID, graph))
    with pytest.raises(CapacityError):
        route(Circuit(5, ()), all_to_all(4))


@pytest.mark.parametrize("kind", list(CouplingKind))
def test_transpile_is_sound(rng, kind):
    logical = random_circuit(rng, 5, 6)
    graph = coupling_graph(kind, 5)
    out, report = transpile(logical, graph)
    assert {g.name for g in out.gates} <= BASIS[kind]
    for gate in out.gates:
        if gate.arity == 2:
            assert graph.has_edge(*gate.qubits)
    assert report.two_qubit_count == sum(g.arity == 2 for g in out.gates)
    assert equivalence_error(logical, out, report.initial_layout, report.final_layout) < 1e-8
    serialize(out, "qasm2")


def test_transpile_heavy_hex_tree_circuit():
    m = random_mps(6, 2, seed=6)
    logical = ttn_to_circuit(renormalize(m))
    out, report = transpile(logical, heavy_hex(6))
    assert report.two_qubit_depth >= 1
    assert equivalence_error(logical, out, report.initial_layout, report.final_layout) < 1e-8


def test_transpile_product_circuit_has_no_entanglers():
    logical = ttn_to_circuit(renormalize(product_mps([0, 1, [1, 1]])))
    out, report = transpile(logical, all_to_all(3))
    assert report.two_qubit_count == 0
    assert report.swap_count == 0


def test_transpile_ghz_all_to_all():
    logical = ttn_to_circuit(renormalize(ghz_mps(8)))
    out, report = transpile(logical, all_to_all(8), lower=False)
    assert report.swap_count == 0
    assert report.two_qubit_depth >= 3
    assert equivalence_error(logical, out, report.initial_layout, report.final_layout) < 1e-8


def test_coupling_graphs():
    for n in (4, 7, 12, 20, 30):
        for kind, cap in ((CouplingKind.SQUARE_GRID, 4), (CouplingKind.HEAVY_HEX, 3)):
            graph = coupling_graph(kind, n)
            assert graph.n_physical >= n
            assert graph.is_connected()
            assert graph.max_degree() <= cap
            assert nx.is_connected(graph.graph.subgraph(range(n)))
    assert all_to_all(5).has_edge(0, 4)
    assert square_grid(9).n_physical == 9
    with pytest.raises(MalformedInputError):
        coupling_graph("ring", 4)


@pytest.mark.slow
def test_transpile_soundness_ensemble(rng):
    kinds = list(CouplingKind)
    for i in range(100):
        n = int(rng.integers(2, 9))
        logical = random_circuit(rng, n, 4)
        out, report = transpile(logical, coupling_graph(kinds[i % 3], n))
        assert equivalence_error(logical, out, report.initial_layout, report.final_layout) < 1e-8
