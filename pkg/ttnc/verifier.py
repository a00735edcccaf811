"""Verifier circuits for matrix product operators.

The vectorised MPO vec(U)/||U||_F is prepared by the tree circuit; its
inverse V_U maps the interleaved register |phi>|conj psi> to an all-zeros
amplitude whose square is |<phi|U|psi>|^2 / ||U||_F^2.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ttnc.circuit import Circuit, invert, simulate
from ttnc.errors import DimensionMismatchError, MalformedInputError
from ttnc.mps import (
    Mpo,
    Statevector,
    as_statevector,
    mpo_to_dense,
    pad_bonds_pow2,
    vectorize_mpo,
)
from ttnc.ttn import renormalize, ttn_to_circuit

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VerifierCircuit:
    circuit: Circuit
    norm_const: float
    register_map: dict[str, tuple[int, ...]]
    n: int
    discarded_weight: float = 0.0


@dataclass(frozen=True)
class NoiseSweepRow:
    delta: float
    metric: float
    expected: float


def build_verifier(u: Mpo, max_bond: int | None = None) -> VerifierCircuit:
    vec, scale = vectorize_mpo(u)
    ttn = renormalize(pad_bonds_pow2(vec), max_bond)
    circuit = invert(ttn_to_circuit(ttn))
    logger.info(
        "verifier for %d-site operator: %d gates, norm constant %.6g",
        u.n, len(circuit), scale**2,
    )
    return VerifierCircuit(
        circuit=circuit,
        norm_const=scale**2,
        register_map={
            "phi": tuple(range(0, 2 * u.n, 2)),
            "psi": tuple(range(1, 2 * u.n, 2)),
        },
        n=u.n,
        discarded_weight=ttn.total_discarded_weight,
    )


def interleave(psi: Statevector | np.ndarray, phi: Statevector | np.ndarray) -> Statevector:
    """phi on the even qubits, conj(psi) on the odd qubits."""
    a, b = as_statevector(psi), as_statevector(phi)
    if a.n_qubits != b.n_qubits:
        raise DimensionMismatchError(f"psi has {a.n_qubits} qubits, phi has {b.n_qubits}")
    n = a.n_qubits
    joint = np.outer(b.amplitudes, a.amplitudes.conj()).reshape((2,) * (2 * n))
    order = [axis for pair in zip(range(n), range(n, 2 * n)) for axis in pair]
    return Statevector(joint.transpose(order).reshape(-1))


def output_distribution(v: VerifierCircuit, psi, phi) -> np.ndarray:
    state = interleave(psi, phi)
    if state.n_qubits != 2 * v.n:
        raise DimensionMismatchError(f"verifier expects {v.n}-qubit states, got {state.n_qubits // 2}")
    return np.abs(simulate(v.circuit, state).amplitudes) ** 2


def overlap_exact(v: VerifierCircuit, psi, phi) -> float:
    return float(v.norm_const * output_distribution(v, psi, phi)[0])


def sample_zero_fraction(probs: np.ndarray, shots: int, rng: np.random.Generator) -> float:
    """Fraction of ``shots`` basis samples that land on the all-zeros outcome."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    counts = rng.multinomial(shots, probs / probs.sum())
    return counts[0] / shots


def overlap_sampled(
    v: VerifierCircuit, psi, phi, shots: int, seed: int, probs: np.ndarray | None = None
) -> float:
    if probs is None:
        probs = output_distribution(v, psi, phi)
    rng = np.random.default_rng(seed)
    return float(v.norm_const * sample_zero_fraction(probs, shots, rng))


def direct_overlap(u: Mpo, psi, phi) -> float:
    """Dense oracle |<phi|U|psi>|^2."""
    a, b = as_statevector(psi), as_statevector(phi)
    return float(abs(np.vdot(b.amplitudes, mpo_to_dense(u) @ a.amplitudes)) ** 2)


def noise_sweep(
    u: Mpo,
    psi,
    deltas: Iterable[float],
    seed: int,
    orthogonalize: bool = True,
    verifier: VerifierCircuit | None = None,
) -> list[NoiseSweepRow]:
    """Metric for phi = sqrt(1-d) U psi + sqrt(d) eta over a grid of d.

    One Haar-random eta is drawn per sweep. With ``orthogonalize`` it is
    projected off U psi, phi stays normalised and the expected metric is
    1 - d; otherwise phi is renormalised and the dense oracle gives the
    expected column.
    """
    deltas = [float(d) for d in deltas]
    if any(not 0.0 <= d <= 1.0 for d in deltas):
        raise MalformedInputError(f"noise levels must lie in [0, 1], got {deltas}")
    v = verifier or build_verifier(u)
    psi = as_statevector(psi)
    target = mpo_to_dense(u) @ psi.amplitudes
    target = target / np.linalg.norm(target)
    rng = np.random.default_rng(seed)
    eta = Statevector.random(psi.n_qubits, rng).amplitudes
    if orthogonalize:
        eta = eta - target * np.vdot(target, eta)
        eta = eta / np.linalg.norm(eta)
    rows = []
    for delta in deltas:
        phi = np.sqrt(1 - delta) * target + np.sqrt(delta) * eta
        if orthogonalize:
            expected = 1.0 - delta
        else:
            phi = phi / np.linalg.norm(phi)
            expected = direct_overlap(u, psi, phi)
        rows.append(NoiseSweepRow(delta, overlap_exact(v, psi, phi), expected))
    logger.debug("noise sweep over %d levels done", len(rows))
    return rows
