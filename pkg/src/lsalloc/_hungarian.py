"""Dense max-weight bipartite matching via the assignment algorithm.

Potentials + shortest augmenting paths on a zero-padded square matrix,
O(s^3).  Additions and subtractions only, so integer inputs are handled
exactly (floats work too, which the LP pricing relies on).
"""

from __future__ import annotations

import numpy as np

_INF = float("inf")


def _min_cost_square(a: np.ndarray) -> list[int]:
    """Minimum-cost perfect assignment on square matrix a; returns p with
    p[j] = 1-based row matched to 1-based column j."""
    s = a.shape[0]
    u = [0.0] * (s + 1)
    v = [0.0] * (s + 1)
    p = [0] * (s + 1)
    way = [0] * (s + 1)
    for i in range(1, s + 1):
        p[0] = i
        j0 = 0
        minv = [_INF] * (s + 1)
        used = [False] * (s + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = _INF
            j1 = 0
            for j in range(1, s + 1):
                if not used[j]:
                    cur = a[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(s + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    return p


def max_weight_pairs(weights) -> tuple[list[tuple[int, int]], float]:
    """Maximum-weight (not necessarily perfect) matching on a dense L x R
    weight matrix.  Non-positive weights are floored to zero for the
    assignment and stripped from the result, so all-negative inputs yield
    the empty matching with weight 0."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 2:
        raise ValueError("weight matrix must be 2-dimensional")
    left, right = w.shape
    s = max(left, right)
    padded = np.zeros((s, s), dtype=np.float64)
    padded[:left, :right] = np.maximum(w, 0.0)
    p = _min_cost_square(-padded)
    pairs = []
    total = 0.0
    for j in range(1, s + 1):
        i = p[j]
        if 1 <= i <= left and j <= right and w[i - 1, j - 1] > 0:
            pairs.append((i - 1, j - 1))
            total += w[i - 1, j - 1]
    pairs.sort()
    return pairs, total
