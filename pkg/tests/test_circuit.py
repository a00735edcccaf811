import itertools
import json
import os
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from ttnc.circuit import (
    Circuit,
    Gate,
    circuit_unitary,
    depth,
    deserialize,
    gate_stats,
    invert,
    serialize,
    simulate,
    standard_gate,
)
from ttnc.errors import CapacityError, DimensionMismatchError, MalformedInputError, NotUnitaryError
from ttnc.mps import Statevector, fidelity


def random_unitary(rng, dim):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def embed(u, qubits, n):
    """Full 2^n matrix of ``u`` acting on ``qubits`` (first qubit = MSB)."""
    k = len(qubits)
    full = np.zeros((2**n, 2**n), dtype=complex)
    for col in range(2**n):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub_in = sum(bits[q] << (k - 1 - j) for j, q in enumerate(qubits))
        for sub_out in range(2**k):
            out_bits = list(bits)
            for j, q in enumerate(qubits):
                out_bits[q] = (sub_out >> (k - 1 - j)) & 1
            row = sum(b << (n - 1 - q) for q, b in enumerate(out_bits))
            full[row, col] += u[sub_out, sub_in]
    return full


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def random_circuit(rng):
    gates = []
    for qubits in [(2, 0), (1,), (3, 1, 0), (0, 3)]:
        gates.append(Gate(qubits, random_unitary(rng, 2 ** len(qubits))))
    return Circuit(4, tuple(gates))


def test_empty_circuit_leaves_state_unchanged(rng):
    state = Statevector.random(3, rng)
    out = simulate(Circuit(3), state)
    assert_allclose(out.amplitudes, state.amplitudes)
    assert simulate(Circuit(2)).amplitudes[0] == 1


def test_x_on_first_qubit_flips_the_most_significant_bit():
    out = simulate(Circuit(2, (standard_gate("x", (0,)),)))
    assert_allclose(out.amplitudes, [0, 0, 1, 0])


def test_simulation_matches_dense_embedding(random_circuit, rng):
    expected = np.eye(16, dtype=complex)
    for gate in random_circuit.gates:
        expected = embed(gate.unitary, gate.qubits, 4) @ expected
    assert_allclose(circuit_unitary(random_circuit), expected, atol=1e-12)
    state = Statevector.random(4, rng)
    assert_allclose(simulate(random_circuit, state).amplitudes, expected @ state.amplitudes, atol=1e-12)


def test_invert_round_trip(random_circuit, rng):
    state = Statevector.random(4, rng)
    back = simulate(invert(random_circuit), simulate(random_circuit, state))
    assert fidelity(back, state) > 1 - 1e-12
    assert len(invert(Circuit(3))) == 0


def test_dagger_keeps_basis_names():
    h = standard_gate("h", (0,))
    assert h.dagger().name == "h"
    assert_allclose(h.dagger().unitary, h.unitary)
    rz = standard_gate("rz", (1,), (0.4,))
    assert rz.dagger().name == "rz"
    assert rz.dagger().params == (-0.4,)
    assert_allclose(rz.dagger().unitary, standard_gate("rz", (1,), (-0.4,)).unitary)
    u = standard_gate("U", (0,), (0.3, 1.2, -0.7))
    assert_allclose(u.dagger().unitary, standard_gate("U", (0,), u.dagger().params).unitary, atol=1e-12)


def test_depth():
    assert depth(Circuit(3)) == 0
    h = [standard_gate("h", (q,)) for q in range(4)]
    assert depth(Circuit(4, tuple(h))) == 1
    chain = tuple(standard_gate("cx", (q, q + 1)) for q in range(4))
    assert depth(Circuit(5, chain)) == 4
    mixed = Circuit(2, (standard_gate("h", (0,)), standard_gate("cx", (0, 1)), standard_gate("h", (1,))))
    assert depth(mixed) == 3
    assert depth(mixed, count_single_qubit=False) == 1


def test_gate_stats():
    c = Circuit(3, (standard_gate("h", (0,)), standard_gate("cx", (0, 1)), Gate((0, 1, 2), np.eye(8))))
    stats = gate_stats(c)
    assert stats["gates"] == 3
    assert stats["by_arity"] == {"1": 1, "2": 1, "3": 1}
    assert stats["max_arity"] == 3
    assert stats["two_qubit"] == 1
    assert stats["multi_qubit"] == 2


def test_gate_validation():
    with pytest.raises(NotUnitaryError):
        Gate((0,), np.array([[1, 1], [0, 1]]))
    with pytest.raises(DimensionMismatchError):
        Gate((0, 1), np.eye(2))
    with pytest.raises(ValueError):
        Gate((0, 0), np.eye(4))
    with pytest.raises(CapacityError):
        Gate(tuple(range(17)), np.eye(2))
    with pytest.raises(DimensionMismatchError):
        Circuit(2, (standard_gate("cx", (1, 2)),))
    with pytest.raises(MalformedInputError):
        standard_gate("toffoli", (0, 1, 2))


def test_json_round_trip_is_exact(random_circuit):
    named = random_circuit.extend([standard_gate("rz", (2,), (0.1234567890123,)), standard_gate("cz", (0, 1))])
    back = deserialize(serialize(named, "json"))
    assert back.n_qubits == named.n_qubits
    for a, b in zip(named.gates, back.gates):
        assert a.qubits == b.qubits
        assert a.name == b.name
        assert a.params == b.params
        assert np.array_equal(a.unitary, b.unitary)
    assert json.loads(serialize(Circuit(2), "json")) == {"n_qubits": 2, "gates": []}


def test_deserialize_rejects_garbage():
    with pytest.raises(MalformedInputError):
        deserialize("{not json")
    with pytest.raises(MalformedInputError):
        deserialize(json.dumps({"gates": []}))


def test_qasm_export():
    c = Circuit(2, (standard_gate("rz", (0,), (0.1,)), standard_gate("cx", (0, 1)), standard_gate("sx", (1,))))
    text = serialize(c, "qasm2")
    lines = text.strip().splitlines()
    assert lines[:3] == ["OPENQASM 2.0;", 'include "qelib1.inc";', "qreg q[2];"]
    assert lines[3] == "rz(0.10000000000000001) q[0];"
    assert lines[4] == "cx q[0],q[1];"
    assert lines[5] == "sx q[1];"


def test_qasm_rejects_unnamed_gates(rng):
    c = Circuit(2, (Gate((0, 1), random_unitary(rng, 4)),))
    with pytest.raises(MalformedInputError):
        serialize(c, "qasm2")
    with pytest.raises(MalformedInputError):
        serialize(c, "yaml")


def test_standard_gate_matrices_are_consistent():
    sx = standard_gate("sx", (0,)).unitary
    assert_allclose(sx @ sx, standard_gate("x", (0,)).unitary, atol=1e-12)
    for theta, phi, lam in itertools.product((0.0, 0.7), (0.0, -1.1), (0.0, 2.3)):
        u = standard_gate("U", (0,), (theta, phi, lam)).unitary
        assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
