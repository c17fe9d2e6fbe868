"""Node-colored directed graphs: loading, validation, and group statistics.

Nodes carry a binary color (red = protected group, blue = the rest) and are
identified by dense integer ids ``0..n-1``.  Adjacency is stored CSR-style so
transition matrices can be assembled without re-scanning edge lists.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GraphError


@dataclass(frozen=True)
class ColoredGraph:
    """Immutable directed graph with a red/blue color per node.

    The out-neighbors of node ``i`` are ``indices[indptr[i]:indptr[i+1]]``.
    Nodes without out-edges are sinks; they are kept and handled by the
    transition-model layer.  Both color groups are always nonempty.
    """

    indptr: np.ndarray
    indices: np.ndarray
    red: np.ndarray

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.red):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.red.shape[0]

    @property
    def n_edges(self) -> int:
        return self.indices.shape[0]

    @property
    def n_red(self) -> int:
        return int(self.red.sum())

    @property
    def n_blue(self) -> int:
        return self.n - self.n_red

    @property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def out_red(self) -> np.ndarray:
        """Per-node count of red out-neighbors."""
        is_red_target = self.red[self.indices].astype(np.int64)
        return np.add.reduceat(
            np.concatenate([is_red_target, [0]]), self.indptr[:-1]
        ) * (self.out_degree > 0)

    @property
    def out_blue(self) -> np.ndarray:
        return self.out_degree - self.out_red

    @property
    def sinks(self) -> np.ndarray:
        return self.out_degree == 0

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def red_nodes(self) -> np.ndarray:
        return np.nonzero(self.red)[0]

    def blue_nodes(self) -> np.ndarray:
        return np.nonzero(~self.red)[0]

    def edges(self) -> np.ndarray:
        """All edges as an (m, 2) array of (src, dst), grouped by source."""
        src = np.repeat(np.arange(self.n), self.out_degree)
        return np.column_stack([src, self.indices])


def from_edges(n: int, edges, red) -> ColoredGraph:
    """Build a validated graph from an edge list and a red mask.

    Rejects out-of-range endpoints, duplicate edges, and single-color
    graphs.  Self-loops are allowed.
    """
    red = np.asarray(red, dtype=bool).copy()
    if red.shape != (n,):
        raise GraphError(f"color mask must have length {n}")
    n_red = int(red.sum())
    if n_red == 0 or n_red == n:
        raise GraphError("both color groups must be nonempty")

    edge_arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if edge_arr.size and (edge_arr.min() < 0 or edge_arr.max() >= n):
        raise GraphError("edge endpoint out of range")

    order = np.lexsort((edge_arr[:, 1], edge_arr[:, 0]))
    edge_arr = edge_arr[order]
    if edge_arr.shape[0] > 1:
        dup = np.all(edge_arr[1:] == edge_arr[:-1], axis=1)
        if dup.any():
            i, j = edge_arr[1:][dup][0]
            raise GraphError(f"duplicate edge ({i}, {j})")

    counts = np.bincount(edge_arr[:, 0], minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return ColoredGraph(indptr=indptr, indices=edge_arr[:, 1].copy(), red=red)


def _parse_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def load_graph(edge_path, color_path) -> ColoredGraph:
    """Load a graph from TSV edge and color files.

    Edge file: ``src<TAB>dst`` per line, ``#`` starts a comment line.
    Color file: ``node<TAB>color`` with color 1 = red, 0 = blue.  Every
    node referenced by an edge must be colored; nodes that appear only in
    the color file become isolated sinks.  Node ids must form the dense
    range ``0..n-1``.
    """
    colors: dict[int, int] = {}
    for lineno, line in _parse_lines(color_path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphError(f"{color_path}:{lineno}: expected node<TAB>color")
        try:
            node, color = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"{color_path}:{lineno}: non-integer token") from None
        if color not in (0, 1):
            raise GraphError(f"{color_path}:{lineno}: color must be 0 or 1")
        if node in colors:
            raise GraphError(f"{color_path}:{lineno}: node {node} colored twice")
        colors[node] = color

    if not colors:
        raise GraphError(f"{color_path}: no colored nodes")
    n = max(colors) + 1
    if len(colors) != n:
        missing = next(i for i in range(n) if i not in colors)
        raise GraphError(f"{color_path}: node ids not dense, {missing} missing")

    edges = []
    for lineno, line in _parse_lines(edge_path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise GraphError(f"{edge_path}:{lineno}: expected src<TAB>dst")
        try:
            src, dst = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"{edge_path}:{lineno}: non-integer token") from None
        for endpoint in (src, dst):
            if endpoint not in colors:
                raise GraphError(
                    f"{edge_path}:{lineno}: node {endpoint} has no color"
                )
        edges.append((src, dst))

    red = np.zeros(n, dtype=bool)
    for node, color in colors.items():
        red[node] = bool(color)
    return from_edges(n, edges, red)


def save_graph(g: ColoredGraph, edge_path, color_path) -> None:
    """Write a graph back to TSV files; inverse of :func:`load_graph`."""
    with open(edge_path, "w", encoding="utf-8") as fh:
        for src, dst in g.edges():
            fh.write(f"{src}\t{dst}\n")
    with open(color_path, "w", encoding="utf-8") as fh:
        for node in range(g.n):
            fh.write(f"{node}\t{int(g.red[node])}\n")


@dataclass(frozen=True)
class GroupStats:
    """Group sizes and cross-edge ratios.

    ``cross_red`` is the fraction of red-sourced edges that point to blue,
    normalized by the blue share of nodes, so 1.0 means red sources pick
    targets as if color-blind; below 1 is homophily, above 1 heterophily.
    ``None`` when the group has no out-edges.
    """

    r: float
    b: float
    cross_red: float | None
    cross_blue: float | None


def group_stats(g: ColoredGraph) -> GroupStats:
    r = g.n_red / g.n
    b = 1.0 - r
    out_red = g.out_red
    out_blue = g.out_blue
    red_src_edges = int(g.out_degree[g.red].sum())
    blue_src_edges = g.n_edges - red_src_edges

    cross_red = None
    if red_src_edges > 0:
        frac = out_blue[g.red].sum() / red_src_edges
        cross_red = float(frac / b)
    cross_blue = None
    if blue_src_edges > 0:
        frac = out_red[~g.red].sum() / blue_src_edges
        cross_blue = float(frac / r)
    return GroupStats(r=float(r), b=float(b), cross_red=cross_red, cross_blue=cross_blue)


def write_summary_csv(g: ColoredGraph, path) -> None:
    """Single-row CSV summary: n, edges, group shares, cross-edge ratios."""
    stats = group_stats(g)

    def fmt(v):
        return "" if v is None else f"{v:.17g}"

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "edges", "r", "b", "cross_R", "cross_B"])
        writer.writerow(
            [g.n, g.n_edges, fmt(stats.r), fmt(stats.b), fmt(stats.cross_red), fmt(stats.cross_blue)]
        )
