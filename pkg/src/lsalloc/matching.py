"""Bipartite combinatorial kernels: max-weight matching and edge coloring.

Used by the LP pricing step, the color-coding solver and the allocation
extension.  Internal module, no file formats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._hungarian import max_weight_pairs

NEG_INF = float("-inf")


@dataclass(frozen=True)
class WeightedBipartiteGraph:
    """Complete bipartite graph; absent edges carry the -inf sentinel."""

    left_size: int
    right_size: int
    weights: np.ndarray

    def __init__(self, left_size, right_size, weights):
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (left_size, right_size):
            raise ValueError(
                f"weights shape {w.shape} does not match {(left_size, right_size)}"
            )
        w = np.ascontiguousarray(w)
        w.setflags(write=False)
        object.__setattr__(self, "left_size", left_size)
        object.__setattr__(self, "right_size", right_size)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class BipartiteMultigraph:
    left_size: int
    right_size: int
    edges: tuple

    def __init__(self, left_size, right_size, edges):
        edges = tuple((int(u), int(v)) for u, v in edges)
        for u, v in edges:
            if not (0 <= u < left_size and 0 <= v < right_size):
                raise ValueError(f"edge ({u}, {v}) out of range")
        object.__setattr__(self, "left_size", left_size)
        object.__setattr__(self, "right_size", right_size)
        object.__setattr__(self, "edges", edges)

    @property
    def max_degree(self) -> int:
        if not self.edges:
            return 0
        dl = np.zeros(self.left_size, dtype=np.int64)
        dr = np.zeros(self.right_size, dtype=np.int64)
        for u, v in self.edges:
            dl[u] += 1
            dr[v] += 1
        return int(max(dl.max(initial=0), dr.max(initial=0)))


def max_weight_matching(g: WeightedBipartiteGraph):
    """Maximum-weight matching; edges of non-positive weight are never used.

    Returns (pairs, weight); weight is an int when all finite weights are
    integral.  Deterministic for fixed input.
    """
    pairs, total = max_weight_pairs(g.weights)
    finite = g.weights[np.isfinite(g.weights)]
    if finite.size == 0 or np.all(finite == np.round(finite)):
        total = int(round(total))
    return frozenset(pairs), total


def edge_color(g: BipartiteMultigraph, num_colors: int, backend=None):
    """Proper edge coloring with num_colors >= max degree, 0-based colors.

    Color classes are matchings; when every right vertex has degree exactly
    num_colors, every color appears at every right vertex, and for regular
    graphs each class is a perfect matching.
    """
    delta = g.max_degree
    if num_colors < delta:
        raise ValueError(f"num_colors={num_colors} below max degree {delta}")
    if not g.edges:
        return []
    colors = _kernels.color_edges(
        g.left_size, g.right_size, g.edges, num_colors, backend=backend
    )
    return [int(c) for c in colors]
