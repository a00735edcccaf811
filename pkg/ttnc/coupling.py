"""Hardware coupling graphs: all-to-all, square grid and heavy-hex patches.

Physical qubits are labelled 0..n_physical-1 so that every prefix
{0, ..., n-1} induces a connected subgraph. Restricted patches carry planar
coordinates in the "pos" node attribute, used by the bisection layout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import networkx as nx

from ttnc.errors import CapacityError, MalformedInputError


class CouplingKind(str, Enum):
    ALL_TO_ALL = "all_to_all"
    SQUARE_GRID = "square_grid"
    HEAVY_HEX = "heavy_hex"


@dataclass(frozen=True, eq=False)
class CouplingGraph:
    kind: CouplingKind
    graph: nx.Graph

    @property
    def n_physical(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {tuple(sorted(e)) for e in self.graph.edges}

    def is_connected(self) -> bool:
        return self.n_physical > 0 and nx.is_connected(self.graph)

    def has_edge(self, a: int, b: int) -> bool:
        return self.kind is CouplingKind.ALL_TO_ALL or self.graph.has_edge(a, b)

    @cached_property
    def distances(self) -> dict[int, dict[int, int]]:
        return dict(nx.all_pairs_shortest_path_length(self.graph))

    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree), default=0)


def _bfs_relabel(graph: nx.Graph) -> nx.Graph:
    """Integer labels in BFS order from the smallest node, neighbours sorted."""
    start = min(graph.nodes)
    order = [start]
    seen = {start}
    for node in order:
        for nb in sorted(graph.neighbors(node)):
            if nb not in seen:
                seen.add(nb)
                order.append(nb)
    return nx.relabel_nodes(graph, {node: i for i, node in enumerate(order)})


def all_to_all(n: int) -> CouplingGraph:
    return CouplingGraph(CouplingKind.ALL_TO_ALL, nx.complete_graph(n))


def square_grid(n: int) -> CouplingGraph:
    """Smallest near-square grid with at least n nodes, row-major labels."""
    cols = max(1, math.ceil(math.sqrt(n)))
    rows = max(1, math.ceil(n / cols))
    grid = nx.grid_2d_graph(rows, cols)
    nx.set_node_attributes(grid, {(r, c): (float(c), float(r)) for r, c in grid.nodes}, "pos")
    graph = nx.relabel_nodes(grid, {(r, c): r * cols + c for r, c in grid.nodes})
    return CouplingGraph(CouplingKind.SQUARE_GRID, graph)


def _heavy_hex_patch(size: int) -> nx.Graph:
    hexes = nx.hexagonal_lattice_graph(size, size)
    hexes = nx.relabel_nodes(hexes, {node: i for i, node in enumerate(sorted(hexes.nodes))})
    patch = nx.Graph()
    pos = dict(hexes.nodes(data="pos"))
    patch.add_nodes_from((node, {"pos": p}) for node, p in pos.items())
    next_label = hexes.number_of_nodes()
    for a, b in sorted(tuple(sorted(e)) for e in hexes.edges):
        (xa, ya), (xb, yb) = pos[a], pos[b]
        patch.add_node(next_label, pos=((xa + xb) / 2, (ya + yb) / 2))
        patch.add_edge(a, next_label)
        patch.add_edge(next_label, b)
        next_label += 1
    return patch


def heavy_hex(n: int) -> CouplingGraph:
    """Heavy-hex patch: a hexagonal lattice with one extra qubit on every edge."""
    size = 1
    patch = _heavy_hex_patch(size)
    while patch.number_of_nodes() < n:
        size += 1
        patch = _heavy_hex_patch(size)
    return CouplingGraph(CouplingKind.HEAVY_HEX, _bfs_relabel(patch))


BUILDERS = {
    CouplingKind.ALL_TO_ALL: all_to_all,
    CouplingKind.SQUARE_GRID: square_grid,
    CouplingKind.HEAVY_HEX: heavy_hex,
}


def coupling_graph(kind: str | CouplingKind, n: int) -> CouplingGraph:
    try:
        key = CouplingKind(kind)
    except ValueError:
        raise MalformedInputError(
            f"unknown topology {kind!r}; expected one of {[k.value for k in CouplingKind]}"
        ) from None
    return BUILDERS[key](n)


def bisection_layout(graph: CouplingGraph, n: int) -> list[int]:
    """Place logical qubits 0..n-1 by recursive coordinate bisection.

    The logical index range is halved together with the physical region
    {0, ..., n-1}, which is split across its wider extent. Contiguous index
    blocks, the subtrees of a chain-ordered tree, land on compact patches.
    All-to-all graphs get the identity layout.
    """
    if n > graph.n_physical:
        raise CapacityError(f"{n} logical qubits exceed {graph.n_physical} physical")
    pos = nx.get_node_attributes(graph.graph, "pos")
    if graph.kind is CouplingKind.ALL_TO_ALL or n < 2 or len(pos) < graph.n_physical:
        return list(range(n))
    layout = [0] * n

    def place(lo: int, hi: int, region: list[int]) -> None:
        if hi - lo == 1:
            layout[lo] = region[0]
            return
        xs = [pos[p][0] for p in region]
        ys = [pos[p][1] for p in region]
        axis = 0 if max(xs) - min(xs) >= max(ys) - min(ys) else 1
        ordered = sorted(region, key=lambda p: (round(pos[p][axis], 9), round(pos[p][1 - axis], 9), p))
        mid = (lo + hi) // 2
        place(lo, mid, ordered[: mid - lo])
        place(mid, hi, ordered[mid - lo :])

    place(0, n, list(range(n)))
    return layout
