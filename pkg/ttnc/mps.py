"""Matrix product states and operators.

Conventions used across the package:

* MPS site ``i`` has legs ``(v{i}, p{i}, v{i+1})``; neighbouring sites share
  the bond label, so :func:`ttnc.tensor_core.contract` chains them directly.
* MPO site ``i`` has legs ``(w{i}, i{i}, o{i}, w{i+1})`` and stores
  ``W[l, in, out, r] = <out|op|in>``.
* Qubit 0 (site 0) is the most significant bit of a statevector index.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ttnc.config import MAX_SIM_QUBITS
from ttnc.errors import (
    CapacityError,
    DimensionMismatchError,
    MalformedInputError,
    UnnormalizedError,
)
from ttnc.tensor_core import (
    RANK_CUTOFF,
    Tensor,
    contract,
    frobenius_norm,
    next_power_of_two,
    permute_reshape,
    split_leg,
)

logger = logging.getLogger(__name__)

NORM_ATOL = 1e-10
# dense operator oracles stop here (4**n entries)
MAX_DENSE_MPO_QUBITS = 12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PROJ_ONE = np.diag([0.0, 1.0]).astype(complex)


def site_legs(i: int) -> tuple[str, str, str]:
    return (f"v{i}", f"p{i}", f"v{i + 1}")


def mpo_site_legs(i: int) -> tuple[str, str, str, str]:
    return (f"w{i}", f"i{i}", f"o{i}", f"w{i + 1}")


@dataclass(frozen=True, eq=False)
class Statevector:
    """Dense amplitudes, qubit 0 = most significant index bit."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0 or amps.size & (amps.size - 1):
            raise DimensionMismatchError(f"statevector length {amps.size} is not a power of two")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        amps = np.zeros(2**n_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(amps)

    @classmethod
    def random(cls, n_qubits: int, rng: np.random.Generator) -> "Statevector":
        """Haar-random pure state."""
        amps = rng.standard_normal(2**n_qubits) + 1j * rng.standard_normal(2**n_qubits)
        return cls(amps / np.linalg.norm(amps))


def as_statevector(value: "Statevector | np.ndarray | Sequence[complex]") -> Statevector:
    return value if isinstance(value, Statevector) else Statevector(np.asarray(value))


@dataclass(frozen=True, eq=False)
class Mps:
    sites: tuple[Tensor, ...]
    ortho_center: int | None = None

    def __post_init__(self) -> None:
        sites = tuple(self.sites)
        if not sites:
            raise DimensionMismatchError("an MPS needs at least one site")
        for i, site in enumerate(sites):
            if site.legs != site_legs(i):
                raise DimensionMismatchError(f"site {i} has legs {site.legs}, expected {site_legs(i)}")
            if site.shape[1] != 2:
                raise DimensionMismatchError(f"site {i} physical dimension {site.shape[1]} != 2")
        if sites[0].shape[0] != 1 or sites[-1].shape[2] != 1:
            raise DimensionMismatchError("boundary bonds must have dimension 1")
        for i in range(len(sites) - 1):
            if sites[i].shape[2] != sites[i + 1].shape[0]:
                raise DimensionMismatchError(
                    f"bond {i + 1}: {sites[i].shape[2]} != {sites[i + 1].shape[0]}"
                )
        if self.ortho_center is not None and not 0 <= self.ortho_center < len(sites):
            raise ValueError(f"orthogonality centre {self.ortho_center} out of range")
        object.__setattr__(self, "sites", sites)

    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray], ortho_center: int | None = None) -> "Mps":
        return cls(tuple(Tensor(a, site_legs(i)) for i, a in enumerate(arrays)), ortho_center)

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def bond_dims(self) -> list[int]:
        return [self.sites[0].shape[0]] + [s.shape[2] for s in self.sites]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims)

    def arrays(self) -> list[np.ndarray]:
        return [s.data for s in self.sites]


@dataclass(frozen=True, eq=False)
class Mpo:
    sites: tuple[Tensor, ...]

    def __post_init__(self) -> None:
        sites = tuple(self.sites)
        if not sites:
            raise DimensionMismatchError("an MPO needs at least one site")
        for i, site in enumerate(sites):
            if site.legs != mpo_site_legs(i):
                raise DimensionMismatchError(f"site {i} has legs {site.legs}, expected {mpo_site_legs(i)}")
            if site.shape[1] != 2 or site.shape[2] != 2:
                raise DimensionMismatchError(f"site {i} in/out dimensions must be 2, got {site.shape}")
        if sites[0].shape[0] != 1 or sites[-1].shape[3] != 1:
            raise DimensionMismatchError("boundary bonds must have dimension 1")
        for i in range(len(sites) - 1):
            if sites[i].shape[3] != sites[i + 1].shape[0]:
                raise DimensionMismatchError(
                    f"bond {i + 1}: {sites[i].shape[3]} != {sites[i + 1].shape[0]}"
                )
        object.__setattr__(self, "sites", sites)

    @classmethod
    def from_arrays(cls, arrays: Sequence[np.ndarray]) -> "Mpo":
        return cls(tuple(Tensor(a, mpo_site_legs(i)) for i, a in enumerate(arrays)))

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def bond_dims(self) -> list[int]:
        return [self.sites[0].shape[0]] + [s.shape[3] for s in self.sites]

    def arrays(self) -> list[np.ndarray]:
        return [s.data for s in self.sites]


# ---------------------------------------------------------------------------
# gauge and norm
# ---------------------------------------------------------------------------

def left_qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dl, d, dr = a.shape
    q, r = np.linalg.qr(a.reshape(dl * d, dr))
    return q.reshape(dl, d, -1), r


def right_lq(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    dl, d, dr = a.shape
    q, r = np.linalg.qr(a.reshape(dl, d * dr).conj().T)
    return q.conj().T.reshape(-1, d, dr), r.conj().T


def canonicalize(m: Mps, center: int) -> Mps:
    """Mixed canonical form with the orthogonality centre at ``center``.

    Sites left of the centre become left-isometries (QR sweep), sites to the
    right become right-isometries (LQ sweep). Bond dimensions can only shrink.
    """
    if not 0 <= center < m.n:
        raise ValueError(f"centre {center} out of range for {m.n} sites")
    arrays = [np.array(a) for a in m.arrays()]
    for i in range(center):
        arrays[i], r = left_qr(arrays[i])
        arrays[i + 1] = np.tensordot(r, arrays[i + 1], axes=(1, 0))
    for i in range(m.n - 1, center, -1):
        arrays[i], l = right_lq(arrays[i])
        arrays[i - 1] = np.tensordot(arrays[i - 1], l, axes=(2, 0))
    return Mps.from_arrays(arrays, ortho_center=center)


def inner(a: Mps, b: Mps) -> complex:
    """<a|b> by transfer-matrix contraction."""
    if a.n != b.n:
        raise DimensionMismatchError(f"MPS lengths differ: {a.n} vs {b.n}")
    env = np.ones((1, 1), dtype=complex)
    for sa, sb in zip(a.arrays(), b.arrays()):
        env = np.einsum("ab,aic,bid->cd", env, sa.conj(), sb)
    return complex(env[0, 0])


def norm(m: Mps) -> float:
    return float(np.sqrt(max(inner(m, m).real, 0.0)))


def normalize(m: Mps) -> Mps:
    value = norm(m)
    if value == 0:
        raise UnnormalizedError("cannot normalise the zero state")
    arrays = m.arrays()
    target = m.ortho_center if m.ortho_center is not None else 0
    arrays = [a / value if i == target else a for i, a in enumerate(arrays)]
    return Mps.from_arrays(arrays, ortho_center=m.ortho_center)


def require_normalized(m: Mps, atol: float = 1e-8) -> None:
    value = norm(m)
    if abs(value - 1.0) > atol:
        raise UnnormalizedError(f"MPS norm is {value:.12g}, expected 1")


def is_left_isometry(a: np.ndarray, atol: float = NORM_ATOL) -> bool:
    dl, d, dr = a.shape
    mat = a.reshape(dl * d, dr)
    return bool(np.allclose(mat.conj().T @ mat, np.eye(dr), atol=atol))


def is_right_isometry(a: np.ndarray, atol: float = NORM_ATOL) -> bool:
    dl, d, dr = a.shape
    mat = a.reshape(dl, d * dr)
    return bool(np.allclose(mat @ mat.conj().T, np.eye(dl), atol=atol))


def pad_bonds_pow2(m: Mps) -> Mps:
    """Zero-pad every bond up to the next power of two.

    The state is unchanged but padded sites are no longer isometries, so the
    orthogonality centre is dropped whenever anything was padded.
    """
    dims = m.bond_dims
    target = [next_power_of_two(d) for d in dims]
    if target == dims:
        return m
    arrays = []
    for i, a in enumerate(m.arrays()):
        pad = ((0, target[i] - dims[i]), (0, 0), (0, target[i + 1] - dims[i + 1]))
        arrays.append(np.pad(a, pad))
    logger.debug("padded bonds %s -> %s", dims, target)
    return Mps.from_arrays(arrays, ortho_center=None)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def random_mps(n: int, chi: int, seed: int | np.random.SeedSequence) -> Mps:
    """Complex Gaussian MPS, canonical at the last site and normalised.

    Bond ``i`` has dimension ``min(chi, 2**i, 2**(n-i))``.
    """
    if n < 2:
        raise ValueError("random_mps needs n >= 2")
    if chi < 1:
        raise ValueError("chi must be >= 1")
    rng = np.random.default_rng(seed)
    bonds = [min(chi, 2**i, 2 ** (n - i)) for i in range(n + 1)]
    arrays = []
    for i in range(n):
        shape = (bonds[i], 2, bonds[i + 1])
        arrays.append((rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2))
    return normalize(canonicalize(Mps.from_arrays(arrays), n - 1))


def _split(mat: np.ndarray, max_bond: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """mat = left @ right with left isometric; zero singular values dropped."""
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(s > RANK_CUTOFF * s[0])) if s.size and s[0] > 0 else 0
    keep = max(rank, 1)
    if max_bond is not None:
        keep = min(keep, max_bond)
    return u[:, :keep], s[:keep, None] * vh[:keep]


def mps_from_statevector(sv: "Statevector | np.ndarray", max_bond: int | None = None) -> Mps:
    """Sequential SVD decomposition; left-canonical with the centre at the end."""
    amps = as_statevector(sv).amplitudes
    n = amps.size.bit_length() - 1
    if n < 1:
        raise DimensionMismatchError("need at least one qubit")
    arrays = []
    rest = amps.reshape(1, -1)
    for i in range(n - 1):
        dl = rest.shape[0]
        left, rest = _split(rest.reshape(dl * 2, -1), max_bond)
        arrays.append(left.reshape(dl, 2, -1))
    arrays.append(rest.reshape(rest.shape[0], 2, 1))
    return Mps.from_arrays(arrays, ortho_center=n - 1)


def ghz_mps(n: int) -> Mps:
    """(|0...0> + |1...1>)/sqrt(2) with bond dimension 2."""
    if n < 2:
        raise ValueError("ghz_mps needs n >= 2")
    first = np.zeros((1, 2, 2), dtype=complex)
    first[0, 0, 0] = first[0, 1, 1] = 1 / np.sqrt(2)
    middle = np.zeros((2, 2, 2), dtype=complex)
    middle[0, 0, 0] = middle[1, 1, 1] = 1.0
    last = np.zeros((2, 2, 1), dtype=complex)
    last[0, 0, 0] = last[1, 1, 0] = 1.0
    return Mps.from_arrays([first] + [middle] * (n - 2) + [last])


def product_mps(states: Sequence["int | Sequence[complex]"]) -> Mps:
    """Bond-dimension-1 MPS; each entry is a bit or a single-qubit vector."""
    arrays = []
    for state in states:
        if isinstance(state, (int, np.integer)):
            vec = np.zeros(2, dtype=complex)
            vec[int(state)] = 1.0
        else:
            vec = np.asarray(state, dtype=complex)
            vec = vec / np.linalg.norm(vec)
        arrays.append(vec.reshape(1, 2, 1))
    return Mps.from_arrays(arrays, ortho_center=0)


def to_statevector(m: Mps) -> Statevector:
    if m.n > MAX_SIM_QUBITS:
        raise CapacityError(f"{m.n} qubits exceed the statevector limit of {MAX_SIM_QUBITS}")
    psi = np.ones((1, 1), dtype=complex)
    for a in m.arrays():
        dl, d, dr = a.shape
        psi = (psi @ a.reshape(dl, d * dr)).reshape(-1, dr)
    return Statevector(psi.reshape(-1))


def fidelity(a: "Statevector | np.ndarray", b: "Statevector | np.ndarray") -> float:
    """|<a|b>|^2."""
    va, vb = as_statevector(a).amplitudes, as_statevector(b).amplitudes
    if va.size != vb.size:
        raise DimensionMismatchError(f"statevector sizes differ: {va.size} vs {vb.size}")
    return float(abs(np.vdot(va, vb)) ** 2)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def _mpo_entry(op: np.ndarray) -> np.ndarray:
    # W[..., in, out, ...] = <out|op|in>
    return np.asarray(op, dtype=complex).T


def identity_mpo(n: int) -> Mpo:
    site = _mpo_entry(np.eye(2)).reshape(1, 2, 2, 1)
    return Mpo.from_arrays([site] * n)


def mcz_mpo(n: int) -> Mpo:
    """Multi-controlled Z, I - 2|1..1><1..1|, with bond dimension 2."""
    if n < 2:
        raise ValueError("mcz_mpo needs n >= 2")
    eye, proj = _mpo_entry(np.eye(2)), _mpo_entry(PROJ_ONE)
    first = np.zeros((1, 2, 2, 2), dtype=complex)
    first[0, :, :, 0], first[0, :, :, 1] = eye, proj
    middle = np.zeros((2, 2, 2, 2), dtype=complex)
    middle[0, :, :, 0], middle[1, :, :, 1] = eye, proj
    last = np.zeros((2, 2, 2, 1), dtype=complex)
    last[0, :, :, 0], last[1, :, :, 0] = eye, -2 * proj
    return Mpo.from_arrays([first] + [middle] * (n - 2) + [last])


def pauli_exp_mpo(pauli: str, theta: float) -> Mpo:
    """exp(-i theta P) = cos(theta) I - i sin(theta) P for a Pauli string P."""
    label = pauli.upper()
    if not label or any(ch not in PAULI for ch in label):
        raise MalformedInputError(f"invalid Pauli string {pauli!r}")
    if set(label) == {"I"}:
        raise MalformedInputError("all-identity Pauli string only contributes a global phase")
    ops = [PAULI[ch] for ch in label]
    c, s = np.cos(theta), np.sin(theta)
    if len(ops) == 1:
        return Mpo.from_arrays([_mpo_entry(c * np.eye(2) - 1j * s * ops[0]).reshape(1, 2, 2, 1)])
    eye = _mpo_entry(np.eye(2))
    first = np.zeros((1, 2, 2, 2), dtype=complex)
    first[0, :, :, 0], first[0, :, :, 1] = eye, _mpo_entry(ops[0])
    arrays = [first]
    for op in ops[1:-1]:
        middle = np.zeros((2, 2, 2, 2), dtype=complex)
        middle[0, :, :, 0], middle[1, :, :, 1] = eye, _mpo_entry(op)
        arrays.append(middle)
    last = np.zeros((2, 2, 2, 1), dtype=complex)
    last[0, :, :, 0], last[1, :, :, 0] = c * eye, -1j * s * _mpo_entry(ops[-1])
    arrays.append(last)
    return Mpo.from_arrays(arrays)


def pauli_matrix(pauli: str) -> np.ndarray:
    """Dense Kronecker product of a Pauli string, first letter most significant."""
    out = np.ones((1, 1), dtype=complex)
    for ch in pauli.upper():
        out = np.kron(out, PAULI[ch])
    return out


def mpo_to_dense(u: Mpo) -> np.ndarray:
    """Matrix M with M[out, in] = <out|U|in>."""
    if u.n > MAX_DENSE_MPO_QUBITS:
        raise CapacityError(f"dense form of a {u.n}-site MPO exceeds {MAX_DENSE_MPO_QUBITS} qubits")
    acc = np.ones((1, 1, 1), dtype=complex)
    for w in u.arrays():
        x, y, _ = acc.shape
        acc = np.einsum("xyl,lior->xoyir", acc, w).reshape(x * 2, y * 2, w.shape[3])
    return acc[:, :, 0]


def apply_mpo(u: Mpo, sv: "Statevector | np.ndarray") -> Statevector:
    psi = as_statevector(sv)
    if psi.n_qubits != u.n:
        raise DimensionMismatchError(f"{u.n}-site operator applied to {psi.n_qubits} qubits")
    return Statevector(mpo_to_dense(u) @ psi.amplitudes)


def vectorize_mpo(u: Mpo) -> tuple[Mps, float]:
    """Reinterpret an N-site MPO as a normalised 2N-site MPS.

    Site ``2i`` carries ``out_i`` and site ``2i+1`` carries ``in_i``, so the
    amplitude at the interleaved index (o0, i0, o1, i1, ...) is
    ``<o|U|i> / ||U||_F``. Returns the MPS and the Frobenius norm.
    """
    arrays = []
    carry = Tensor(np.ones((1, 1), dtype=complex), ("a", "l"))
    for w in u.arrays():
        merged = contract(carry, Tensor(w, ("l", "i", "o", "r")), [("l", "l")])
        da, dr = merged.dim("a"), merged.dim("r")
        mat = permute_reshape(merged, ["a", "o", "i", "r"], [["a", "o"], ["i", "r"]])
        left, rest = _split(mat.data)
        arrays.append(left.reshape(da, 2, -1))
        k = left.shape[1]
        rest = split_leg(Tensor(rest, ("a", "i+r")), "i+r", ["i", "r"], [2, dr])
        left, tail = _split(permute_reshape(rest, ["a", "i", "r"], [["a", "i"], ["r"]]).data)
        arrays.append(left.reshape(k, 2, -1))
        carry = Tensor(tail, ("a", "l"))
    scale = frobenius_norm(carry)
    if scale == 0:
        raise UnnormalizedError("cannot vectorise the zero operator")
    arrays[-1] = np.tensordot(arrays[-1], carry.data / scale, axes=(2, 0))
    logger.debug("vectorised %d-site MPO: bonds %s, norm %.6g", u.n, [a.shape[0] for a in arrays], scale)
    return Mps.from_arrays(arrays, ortho_center=len(arrays) - 1), scale
