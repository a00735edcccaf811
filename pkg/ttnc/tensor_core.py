"""Dense complex tensors with labelled legs.

Every other module works on :class:`Tensor` values: contraction over
named legs, permutation/reshape, SVD truncated to a power of two, and the
orthonormal completion that turns an isometry into a unitary gate.

Data is stored row-major (numpy C order) and frozen after construction.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ttnc.errors import (
    DimensionMismatchError,
    NotIsometricError,
    UnknownLegError,
)

logger = logging.getLogger(__name__)

# singular values at or below RANK_CUTOFF * s_max count as zero
RANK_CUTOFF = 1e-12
ISOMETRY_ATOL = 1e-10
MERGE_SEP = "+"


def is_power_of_two(value: int) -> bool:
    return isinstance(value, (int, np.integer)) and value >= 1 and (value & (value - 1)) == 0


def next_power_of_two(value: int) -> int:
    """Smallest power of two that is >= ``value`` (1 for value <= 1)."""
    if value <= 1:
        return 1
    return 1 << (int(value) - 1).bit_length()


def log2_int(value: int) -> int:
    """Exact base-2 logarithm of a power of two."""
    if not is_power_of_two(value):
        raise ValueError(f"{value} is not a power of two")
    return int(value).bit_length() - 1


@dataclass(frozen=True, eq=False)
class Tensor:
    """Complex array with one unique string label per dimension."""

    data: np.ndarray
    legs: tuple[str, ...]

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=complex)
        legs = tuple(self.legs)
        if data.ndim != len(legs):
            raise DimensionMismatchError(
                f"tensor of rank {data.ndim} given {len(legs)} leg labels"
            )
        if len(set(legs)) != len(legs):
            raise ValueError(f"leg labels must be unique, got {legs}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "legs", legs)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    def axis(self, leg: str) -> int:
        try:
            return self.legs.index(leg)
        except ValueError:
            raise UnknownLegError(f"unknown leg {leg!r}; tensor has {self.legs}") from None

    def dim(self, leg: str) -> int:
        return self.data.shape[self.axis(leg)]

    def scale(self, alpha: complex) -> "Tensor":
        return Tensor(alpha * self.data, self.legs)

    def transpose(self, order: Sequence[str]) -> "Tensor":
        order = tuple(order)
        if sorted(order) != sorted(self.legs) or len(order) != len(self.legs):
            raise ValueError(f"{order} is not a permutation of {self.legs}")
        axes = [self.axis(leg) for leg in order]
        return Tensor(np.transpose(self.data, axes), order)

    def matrix(self, row_legs: Sequence[str]) -> np.ndarray:
        """Return the data as a (rows, cols) matrix, rows = ``row_legs``."""
        col_legs = [leg for leg in self.legs if leg not in row_legs]
        ordered = self.transpose(list(row_legs) + col_legs)
        rows = int(np.prod([self.dim(leg) for leg in row_legs], dtype=np.int64))
        return ordered.data.reshape(rows, -1)


@dataclass(frozen=True, eq=False)
class SvdResult:
    """u · diag(s) · vh over a shared bond leg; see :func:`truncated_svd`."""

    u: Tensor
    s: np.ndarray
    vh: Tensor
    discarded_weight: float

    @property
    def kept(self) -> int:
        return int(self.s.size)


def contract(a: Tensor, b: Tensor, pairs: Iterable[tuple[str, str]]) -> Tensor:
    """Sum over the paired legs; free legs of ``a`` come first, then ``b``'s."""
    pairs = list(pairs)
    axes_a, axes_b = [], []
    for leg_a, leg_b in pairs:
        ia, ib = a.axis(leg_a), b.axis(leg_b)
        if a.data.shape[ia] != b.data.shape[ib]:
            raise DimensionMismatchError(
                f"cannot contract {leg_a!r} (dim {a.data.shape[ia]}) "
                f"with {leg_b!r} (dim {b.data.shape[ib]})"
            )
        axes_a.append(ia)
        axes_b.append(ib)
    paired_a = {leg for leg, _ in pairs}
    paired_b = {leg for _, leg in pairs}
    legs = [leg for leg in a.legs if leg not in paired_a]
    legs += [leg for leg in b.legs if leg not in paired_b]
    data = np.tensordot(a.data, b.data, axes=(axes_a, axes_b))
    return Tensor(data, tuple(legs))


def merged_label(group: Sequence[str]) -> str:
    return MERGE_SEP.join(group)


def permute_reshape(
    t: Tensor, new_leg_order: Sequence[str], merge_groups: Sequence[Sequence[str]]
) -> Tensor:
    """Permute to ``new_leg_order`` then fuse each contiguous group into one leg.

    A fused leg is labelled by joining its members with ``+``; singleton
    groups keep their label.
    """
    permuted = t.transpose(new_leg_order)
    order = list(permuted.legs)
    shape, labels, pos = [], [], 0
    for group in merge_groups:
        group = list(group)
        if not group or order[pos:pos + len(group)] != group:
            raise ValueError(
                f"merge group {group} is not contiguous in leg order {order}"
            )
        shape.append(int(np.prod([permuted.dim(leg) for leg in group], dtype=np.int64)))
        labels.append(merged_label(group))
        pos += len(group)
    if pos != len(order):
        raise ValueError(f"merge groups {list(merge_groups)} do not cover legs {order}")
    return Tensor(permuted.data.reshape(shape), tuple(labels))


def split_leg(t: Tensor, leg: str, new_legs: Sequence[str], dims: Sequence[int]) -> Tensor:
    """Inverse of a merge: replace ``leg`` by ``new_legs`` of sizes ``dims``."""
    axis = t.axis(leg)
    if int(np.prod(dims, dtype=np.int64)) != t.data.shape[axis] or len(dims) != len(new_legs):
        raise DimensionMismatchError(f"cannot split {leg!r} of dim {t.data.shape[axis]} into {list(dims)}")
    shape = t.shape[:axis] + tuple(dims) + t.shape[axis + 1:]
    legs = t.legs[:axis] + tuple(new_legs) + t.legs[axis + 1:]
    return Tensor(t.data.reshape(shape), legs)


def unitary_completion(v: np.ndarray, atol: float = ISOMETRY_ATOL) -> np.ndarray:
    """Extend the orthonormal columns of ``v`` (m x c) to an m x m unitary.

    Canonical basis vectors are orthogonalised against the current basis in
    index order and skipped when their residual is below 1/(2 sqrt m); the
    residual budget guarantees the scan always fills all m columns.
    """
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2:
        raise ValueError("unitary_completion expects a matrix")
    m, c = v.shape
    if c > m:
        raise NotIsometricError(f"{m}x{c} matrix cannot have orthonormal columns")
    gram_error = np.max(np.abs(v.conj().T @ v - np.eye(c))) if c else 0.0
    if gram_error > atol:
        raise NotIsometricError(f"columns are not orthonormal (error {gram_error:.3e})")

    basis = np.zeros((m, m), dtype=complex)
    basis[:, :c] = v
    filled = c
    threshold = 0.5 / np.sqrt(m)
    for j in range(m):
        if filled == m:
            break
        w = np.zeros(m, dtype=complex)
        w[j] = 1.0
        q = basis[:, :filled]
        # two passes of classical Gram-Schmidt
        for _ in range(2):
            w = w - q @ (q.conj().T @ w)
        norm = np.linalg.norm(w)
        if norm < threshold:
            continue
        basis[:, filled] = w / norm
        filled += 1
    return basis


def complete_isometry(v: Tensor) -> Tensor:
    """Tensor wrapper around :func:`unitary_completion` for a rank-2 tensor."""
    if len(v.legs) != 2:
        raise ValueError(f"complete_isometry expects a matrix-shaped tensor, got legs {v.legs}")
    return Tensor(unitary_completion(v.data), v.legs)


def _extend_columns(q: np.ndarray, width: int) -> np.ndarray:
    """Pad orthonormal columns to ``width``: completion first, zeros beyond m."""
    m, c = q.shape
    if width <= c:
        return q[:, :width]
    full = unitary_completion(q, atol=1e-8)
    if width <= m:
        return full[:, :width]
    return np.hstack([full, np.zeros((m, width - m), dtype=complex)])


def truncated_svd(
    t: Tensor,
    row_legs: Sequence[str],
    max_keep: int | None = None,
    bond: str = "bond",
) -> SvdResult:
    """SVD across (row_legs | remaining legs) keeping a power-of-two width.

    The kept width is ``min(max_keep, 2**ceil(log2 r))`` with ``r`` the
    numerical rank. Singular values below the rank cutoff are stored as
    zeros. ``u`` carries legs ``row_legs + [bond]``, ``vh`` carries
    ``[bond] + column legs``.
    """
    row_legs = list(row_legs)
    if not row_legs or len(row_legs) >= len(t.legs):
        raise ValueError("row_legs must be a non-empty proper subset of the tensor legs")
    if max_keep is not None and not is_power_of_two(max_keep):
        raise ValueError(f"max_keep must be a power of two, got {max_keep}")
    for leg in row_legs:
        t.axis(leg)
    col_legs = [leg for leg in t.legs if leg not in row_legs]
    row_dims = [t.dim(leg) for leg in row_legs]
    col_dims = [t.dim(leg) for leg in col_legs]

    mat = t.matrix(row_legs)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    total = float(np.sum(s**2))
    rank = int(np.sum(s > RANK_CUTOFF * s[0])) if s.size and s[0] > 0 else 0
    target = next_power_of_two(max(rank, 1))
    keep = target if max_keep is None else min(max_keep, target)

    discarded = float(np.sum(s[keep:rank] ** 2)) / total if total > 0 and rank > keep else 0.0
    kept_s = np.zeros(keep)
    upto = min(keep, rank)
    kept_s[:upto] = s[:upto]
    u_k = _extend_columns(u, keep)
    vh_k = _extend_columns(vh.conj().T, keep).conj().T
    if discarded > 0:
        logger.debug("svd %s: rank %d kept %d discarded %.3e", tuple(mat.shape), rank, keep, discarded)

    u_t = Tensor(u_k.reshape(row_dims + [keep]), tuple(row_legs) + (bond,))
    vh_t = Tensor(vh_k.reshape([keep] + col_dims), (bond,) + tuple(col_legs))
    return SvdResult(u=u_t, s=kept_s, vh=vh_t, discarded_weight=discarded)


def frobenius_norm(t: Tensor) -> float:
    return float(np.linalg.norm(t.data))
