"""Backend dispatch for the search kernels.

The compiled extension (lsalloc._speedups) is preferred; lsalloc._pure is
the drop-in fallback.  Set LSALLOC_PURE=1 to force the fallback, or pass
backend="pure"/"compiled" explicitly (benchmarks do).  The shared
precomputation here (candidate orders, admissible suffix bounds) keeps the
two backends byte-for-byte equivalent in results.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pure
from ._hungarian import max_weight_pairs

try:
    from . import _speedups as _compiled
except ImportError:  # extension not built
    _compiled = None

if os.environ.get("LSALLOC_PURE") == "1":
    _default = _pure
    BACKEND = "pure"
elif _compiled is not None:
    _default = _compiled
    BACKEND = "compiled"
else:
    _default = _pure
    BACKEND = "pure"

HAVE_COMPILED = _compiled is not None

# bitmask state limits the kernel search to small orders; plenty at desk scale
MAX_SEARCH_ORDER = 62

NOTION_CODES = {
    "EF": 0,
    "EF1": 1,
    "EFX": 2,
    "PROP": 3,
    "PROP1": 4,
    "PROPX": 5,
    "EQ": 6,
    "EQ1": 7,
    "EQX": 8,
}


def _backend(name):
    if name is None:
        return _default
    if name == "pure":
        return _pure
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def _check_order(n):
    if n > MAX_SEARCH_ORDER:
        raise ValueError(f"search kernels support n <= {MAX_SEARCH_ORDER}, got {n}")


def _writable_values(values):
    v = np.ascontiguousarray(values, dtype=np.int64)
    if not v.flags.writeable:  # Instance tensors are frozen; kernels need buffers
        v = v.copy()
    return v


def _agent_suffix(v):
    n = v.shape[0]
    ncells = n * n
    suf = np.zeros((ncells + 1, n), dtype=np.int64)
    for c in range(ncells - 1, -1, -1):
        j, k = divmod(c, n)
        suf[c] = suf[c + 1] + v[:, j, k]
    return suf


def exact_search(values, objective, complete, prune=True, backend=None):
    """Optimal grid for one objective/kind pair.

    objective: "umax" (utility sum) or "emax" (minimum utility);
    complete: fill every cell vs. allow empties.  Returns (value, grid).
    Candidates are tried in decreasing-value order (ties to the smaller
    index) so the first leaf is the greedy solution; bounds are admissible,
    so the reported optimum is exact and the witness deterministic.
    """
    v = _writable_values(values)
    n = v.shape[0]
    _check_order(n)
    ncells = n * n
    obj = 0 if objective == "umax" else 1

    cand = np.zeros((ncells, max(n, 1)), dtype=np.int16)
    cand_cnt = np.zeros(ncells, dtype=np.int16)
    cellmax = np.zeros(ncells, dtype=np.int64)
    for c in range(ncells):
        j, k = divmod(c, n)
        col = v[:, j, k]
        order = sorted(range(n), key=lambda i: (-col[i], i))
        if not complete:
            # zero-valued assignments never beat leaving the cell empty
            order = [i for i in order if col[i] > 0]
        cand_cnt[c] = len(order)
        for t, i in enumerate(order):
            cand[c, t] = i
        cellmax[c] = col[order[0]] if order else 0

    # within-row suffix of cell maxima, plus per-row matching bounds for the
    # rows below: both admissible for either objective kind
    sb = np.zeros(ncells, dtype=np.int64)
    for j in range(n):
        acc = 0
        for k in range(n - 1, -1, -1):
            acc += int(cellmax[j * n + k])
            sb[j * n + k] = acc
    row_suffix = np.zeros(n + 1, dtype=np.int64)
    for j in range(n - 1, -1, -1):
        _, wt = max_weight_pairs(v[:, j, :])
        row_suffix[j] = row_suffix[j + 1] + int(round(wt))

    suf = _agent_suffix(v)
    impl = _backend(backend)
    value, grid = impl.exact_search(
        v, cand, cand_cnt, obj, bool(complete), bool(prune), sb, row_suffix, suf
    )
    return value, np.asarray(grid, dtype=np.int16)


def fair_search(values, notion, weak=False, symmetry=False, prune=True, backend=None):
    """Search complete grids for one satisfying the fairness notion.

    Returns the witness grid or None.  symmetry=True is only sound for
    identical valuations (agents interchangeable); callers decide.
    """
    v = _writable_values(values)
    n = v.shape[0]
    _check_order(n)
    code = NOTION_CODES[notion]
    suf = _agent_suffix(v)
    totals = np.ascontiguousarray(v.sum(axis=(1, 2)), dtype=np.int64)
    impl = _backend(backend)
    grid = impl.fair_search(v, code, bool(weak), bool(symmetry), bool(prune), suf, totals)
    if grid is None:
        return None
    return np.asarray(grid, dtype=np.int16)


def color_edges(n_left, n_right, edges, num_colors, backend=None):
    """Proper edge coloring of a bipartite multigraph with num_colors colors.

    edges: iterable of (left, right) pairs, parallel edges allowed.
    Requires num_colors >= max degree.  Returns int32 colors, 0-based.
    """
    eu = np.ascontiguousarray([e[0] for e in edges], dtype=np.int32)
    ev = np.ascontiguousarray([e[1] for e in edges], dtype=np.int32)
    impl = _backend(backend)
    return impl.color_edges(int(n_left), int(n_right), eu, ev, int(num_colors))
