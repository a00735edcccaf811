"""MPS to tree tensor network renormalisation and circuit synthesis.

Each round pairs neighbouring sites of the current chain, merges them and
splits the physical (child) legs from the virtual legs with a power-of-two
SVD. The child-side factor is an isometry and becomes a tree node; the rest
becomes a site of the next, half as long, chain. After ceil(log2 N) rounds a
single scalar root remains.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ttnc.circuit import Circuit, Gate
from ttnc.errors import DimensionMismatchError
from ttnc.mps import (
    Mps,
    Statevector,
    canonicalize,
    left_qr,
    require_normalized,
    right_lq,
)
from ttnc.tensor_core import (
    RANK_CUTOFF,
    Tensor,
    complete_isometry,
    contract,
    frobenius_norm,
    is_power_of_two,
    log2_int,
    permute_reshape,
    truncated_svd,
    unitary_completion,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TtnNode:
    """Isometry from ``parent`` to the two child legs (data shape dA, dB, k)."""

    tensor: Tensor
    children: tuple[str, str]
    parent: str
    qubits: tuple[int, ...]

    @property
    def parent_dim(self) -> int:
        return self.tensor.dim(self.parent)

    @property
    def gate_qubits(self) -> int:
        return sum(log2_int(self.tensor.dim(c)) for c in self.children)


@dataclass(frozen=True, eq=False)
class Ttn:
    n_qubits: int
    layers: tuple[tuple[TtnNode, ...], ...]
    root: Tensor
    leaf_map: dict[str, int]
    discarded_weights: tuple[float, ...] = ()

    @property
    def total_discarded_weight(self) -> float:
        return 1.0 - float(np.prod([1.0 - w for w in self.discarded_weights]))

    @property
    def nodes(self) -> list[TtnNode]:
        return [node for layer in self.layers for node in layer]

    @property
    def max_gate_qubits(self) -> int:
        return max((node.gate_qubits for node in self.nodes), default=1)


@dataclass(frozen=True)
class GateSizeBound:
    chi: int
    max_gate_qubits: int
    saturation_n: int


@dataclass
class _ChainSite:
    data: np.ndarray
    label: str
    qubits: tuple[int, ...]


def _right_canonical(chain: list[_ChainSite]) -> None:
    for i in range(len(chain) - 1, 0, -1):
        chain[i].data, l = right_lq(chain[i].data)
        chain[i - 1].data = np.tensordot(chain[i - 1].data, l, axes=(2, 0))


def renormalize(m: Mps, max_bond: int | None = None) -> Ttn:
    """Build a binary TTN by ceil(log2 N) merge-and-split rounds.

    Pairs are (0,1), (2,3), ... left to right; an odd trailing site is
    promoted to the next round unchanged. Every merge happens at the
    orthogonality centre, so each recorded discarded weight is the exact
    infidelity factor of that truncation.
    """
    require_normalized(m)
    if max_bond is not None and not is_power_of_two(max_bond):
        raise ValueError(f"max_bond must be a power of two, got {max_bond}")
    chain = [_ChainSite(np.array(a), f"p{i}", (i,)) for i, a in enumerate(m.arrays())]
    layers: list[tuple[TtnNode, ...]] = []
    weights: list[float] = []
    round_no = 0
    while len(chain) > 1:
        _right_canonical(chain)
        nodes, next_chain = [], []
        carry = None
        for i in range(0, len(chain) - 1, 2):
            site, other = chain[i], chain[i + 1]
            data = site.data if carry is None else np.tensordot(carry, site.data, axes=(1, 0))
            theta = np.einsum("lar,rbs->labs", data, other.data)
            parent = f"t{round_no}.{i // 2}"
            svd = truncated_svd(
                Tensor(theta, ("l", site.label, other.label, "r")),
                [site.label, other.label],
                max_bond,
                bond=parent,
            )
            weights.append(svd.discarded_weight)
            qubits = site.qubits + other.qubits
            nodes.append(TtnNode(svd.u, (site.label, other.label), parent, qubits))
            carried = np.transpose(svd.s[:, None, None] * svd.vh.data, (1, 0, 2))
            q, carry = left_qr(carried)
            next_chain.append(_ChainSite(q, parent, qubits))
        if len(chain) % 2:
            odd = chain[-1]
            next_chain.append(
                _ChainSite(np.tensordot(carry, odd.data, axes=(1, 0)), odd.label, odd.qubits)
            )
        else:
            next_chain[-1].data = np.tensordot(next_chain[-1].data, carry, axes=(2, 0))
        layers.append(tuple(nodes))
        logger.debug(
            "round %d: %d merges, parent dims %s",
            round_no, len(nodes), [n.parent_dim for n in nodes],
        )
        chain = next_chain
        round_no += 1

    top = chain[0]
    root = Tensor(top.data.reshape(-1), (top.label,))
    total = float(sum(weights))
    logger.info(
        "renormalised %d sites into %d layers, discarded weight %.3e", m.n, len(layers), total
    )
    return Ttn(
        n_qubits=m.n,
        layers=tuple(layers),
        root=root,
        leaf_map={f"p{i}": i for i in range(m.n)},
        discarded_weights=tuple(weights),
    )


def estimate_fidelity(t: Ttn) -> float:
    """Product of the retained weights of every merge."""
    return 1.0 - t.total_discarded_weight


def ttn_statevector(t: Ttn) -> Statevector:
    """Contract the tree top-down into a dense state (renormalised)."""
    state = t.root
    for layer in reversed(t.layers):
        for node in layer:
            state = contract(state, node.tensor, [(node.parent, node.parent)])
    sites = [f"p{i}" for i in range(t.n_qubits)]
    return Statevector(permute_reshape(state.scale(1 / frobenius_norm(state)), sites, [sites]).data)


def _factorize(vec: np.ndarray, qubits: tuple[int, ...]) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Split a state on ``qubits`` at every product cut (smallest cut first)."""
    n = len(qubits)
    for cut in range(1, n):
        mat = vec.reshape(2**cut, 2 ** (n - cut))
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        if s.size > 1 and s[1] > RANK_CUTOFF * s[0]:
            continue
        left = u[:, 0]
        right = s[0] * vh[0]
        return _factorize(left, qubits[:cut]) + _factorize(right / np.linalg.norm(right), qubits[cut:])
    return [(qubits, vec)]


def _preparation_gates(vec: np.ndarray, qubits: tuple[int, ...]) -> list[Gate]:
    gates = []
    for sub_qubits, sub_vec in _factorize(vec / np.linalg.norm(vec), qubits):
        unitary = unitary_completion(sub_vec.reshape(-1, 1))
        gates.append(Gate(sub_qubits, unitary, None))
    return gates


def ttn_to_circuit(t: Ttn) -> Circuit:
    """Embed the tree into gates, root first, one gate layer per tree layer.

    A node acts on the concatenated registers of its children; its parent
    register is the last log2(k) of those qubits, so the isometry fills the
    first k columns of the gate.
    """
    registers: dict[str, tuple[int, ...]] = {leg: (q,) for leg, q in t.leaf_map.items()}
    for layer in t.layers:
        for node in layer:
            qubits = registers[node.children[0]] + registers[node.children[1]]
            k = node.parent_dim
            if not is_power_of_two(k):
                raise DimensionMismatchError(f"node {node.parent} has parent dimension {k}")
            width = log2_int(k)
            registers[node.parent] = qubits[len(qubits) - width:] if width else ()

    gates: list[Gate] = []
    (root_leg,) = t.root.legs
    if t.root.data.size > 1:
        gates += _preparation_gates(t.root.data, registers[root_leg])
    for layer in reversed(t.layers):
        for node in layer:
            qubits = registers[node.children[0]] + registers[node.children[1]]
            if not qubits:
                continue
            mat = permute_reshape(
                node.tensor, node.children + (node.parent,), [list(node.children), [node.parent]]
            )
            if mat.dim(node.parent) == 1:
                gates += _preparation_gates(mat.data[:, 0], qubits)
            else:
                gates.append(Gate(qubits, complete_isometry(mat).data))
    circuit = Circuit(t.n_qubits, tuple(gates))
    logger.debug("ttn circuit: %d gates on %d qubits", len(gates), t.n_qubits)
    return circuit


def staircase_circuit(m: Mps) -> Circuit:
    """Linear-depth sequential preparation, one gate per site (N-1 gates).

    Gate i reads the bond register of site i on qubits i.. and writes the
    physical qubit i followed by the next bond register; the last two sites
    share one gate.
    """
    require_normalized(m)
    n = m.n
    arrays = canonicalize(m, 0).arrays()
    if n == 1:
        return Circuit(1, tuple(_preparation_gates(arrays[0].reshape(-1), (0,))))
    # fold the last site into its neighbour so the final gate emits both qubits
    tail = np.tensordot(arrays[-2], arrays[-1], axes=(2, 0))
    arrays = arrays[:-2] + [tail.reshape(tail.shape[0], 2, 2)]
    gates: list[Gate] = []
    for i, a in enumerate(arrays):
        dl, _, dr = a.shape
        na = math.ceil(math.log2(dl)) if dl > 1 else 0
        nb = math.ceil(math.log2(dr)) if dr > 1 else 0
        g = max(na, 1 + nb)
        natural = tuple(range(i, i + g))
        iso = np.zeros((2**g, dl), dtype=complex)
        for p in range(2):
            for r in range(dr):
                iso[(p * 2**nb + r) * 2 ** (g - 1 - nb), :] = a[:, p, r]
        if na == 0:
            gates += _preparation_gates(iso[:, 0], natural)
            continue
        # put the input bond register on the least significant qubits
        order = list(range(na, g)) + list(range(na))
        iso = iso.reshape((2,) * g + (dl,)).transpose(order + [g]).reshape(2**g, dl)
        gates.append(Gate(tuple(natural[j] for j in order), unitary_completion(iso)))
    return Circuit(n, tuple(gates))


def shape_only_gate_sizes(n: int, chi: int) -> list[list[int]]:
    """Gate qubit counts per round for an N-site chain of uniform bond chi."""
    chain = [[1 if i == 0 else chi, 2, chi if i < n - 1 else 1] for i in range(n)]
    rounds = []
    while len(chain) > 1:
        sizes, next_chain = [], []
        for i in range(0, len(chain), 2):
            if i + 1 == len(chain):
                next_chain.append(chain[i])
                break
            (dl, pa, _), (_, pb, dr) = chain[i], chain[i + 1]
            sizes.append(log2_int(pa * pb))
            next_chain.append([dl, min(pa * pb, dl * dr), dr])
        rounds.append(sizes)
        chain = next_chain
    return rounds


def saturation_threshold(chi: int) -> int:
    """Smallest N with ceil(log2 N) >= 4 + log2(log2 chi)."""
    layers = math.ceil(4 + math.log2(math.log2(chi)) - 1e-12)
    return 2 ** (layers - 1) + 1


def predict_max_gate_qubits(n: int, chi: int) -> GateSizeBound:
    if chi < 2 or not is_power_of_two(chi):
        raise ValueError(f"chi must be a power of two >= 2, got {chi}")
    if n < 2:
        raise ValueError("n must be >= 2")
    saturation_n = saturation_threshold(chi)
    if math.ceil(math.log2(n)) >= 4 + math.log2(math.log2(chi)):
        size = 4 * log2_int(chi)
    else:
        size = max(max(r) for r in shape_only_gate_sizes(n, chi) if r)
    return GateSizeBound(chi=chi, max_gate_qubits=size, saturation_n=saturation_n)
