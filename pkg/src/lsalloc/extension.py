"""Extending a partial allocation to a complete one.

Works whenever (number of items touched) + (number of rounds touched) <= n:
greedy-fill the touched block, then two edge-coloring phases hand out the
remaining rounds and items (the constructive argument behind Ryser's
rectangle extension).  Value-free; welfare can only grow since the result
is a superset.
"""

from __future__ import annotations

import numpy as np

from .instance import EMPTY, Allocation, Instance, is_feasible
from .matching import BipartiteMultigraph, edge_color


class ExtensionPreconditionError(ValueError):
    def __init__(self, items, rounds, n):
        super().__init__(
            f"occupied items {sorted(items)} plus occupied rounds {sorted(rounds)} "
            f"exceed n={n}; extension requires |items| + |rounds| <= n"
        )
        self.items = frozenset(items)
        self.rounds = frozenset(rounds)


def extend_allocation(alloc: Allocation) -> Allocation:
    """Complete extension of `alloc`; raises ExtensionPreconditionError when
    the touched items/rounds are too many."""
    n = alloc.n
    grid = alloc.grid.astype(np.int16).copy()

    items = sorted({j for j in range(n) if (grid[j] != EMPTY).any()})
    rounds = sorted({k for k in range(n) if (grid[:, k] != EMPTY).any()})
    m, r = len(items), len(rounds)
    if m + r > n:
        raise ExtensionPreconditionError(items, rounds, n)

    # phase 1: greedy fill of the touched block, smallest feasible agent
    for j in items:
        for k in rounds:
            if grid[j, k] != EMPTY:
                continue
            blocked = set(int(a) for a in grid[j] if a != EMPTY)
            blocked |= set(int(a) for a in grid[:, k] if a != EMPTY)
            assert len(blocked) <= m + r - 2 < n
            for i in range(n):
                if i not in blocked:
                    grid[j, k] = i
                    break

    # phase 2: give every touched item its missing rounds.  Graph on
    # agents x touched items, edge = agent missing from that item row;
    # right degrees are exactly n - r, so each color class covers all items.
    free_rounds = [k for k in range(n) if k not in rounds]
    if items and free_rounds:
        edges = []
        for qi, j in enumerate(items):
            present = set(int(a) for a in grid[j] if a != EMPTY)
            missing = [p for p in range(n) if p not in present]
            assert len(missing) == n - r
            edges.extend((p, qi) for p in missing)
        g1 = BipartiteMultigraph(n, len(items), edges)
        colors = edge_color(g1, n - r)
        for (p, qi), c in zip(edges, colors):
            k = free_rounds[c]
            assert grid[items[qi], k] == EMPTY
            grid[items[qi], k] = p

    # phase 3: hand out the untouched items.  Graph on agents x rounds,
    # edge = agent missing from that round column; it is (n - m)-regular,
    # so every color class is a perfect matching.
    free_items = [j for j in range(n) if j not in items]
    if free_items:
        edges = []
        for k in range(n):
            present = set(int(a) for a in grid[:, k] if a != EMPTY)
            missing = [p for p in range(n) if p not in present]
            assert len(missing) == n - m
            edges.extend((p, k) for p in missing)
        g2 = BipartiteMultigraph(n, n, edges)
        colors = edge_color(g2, n - m)
        for (p, k), c in zip(edges, colors):
            j = free_items[c]
            assert grid[j, k] == EMPTY
            grid[j, k] = p

    out = Allocation(grid)
    assert out.is_complete and is_feasible(out) and out.contains(alloc)
    return out


def extend(inst: Instance, alloc: Allocation) -> Allocation:
    if inst.n != alloc.n:
        raise ValueError(f"instance order {inst.n} != allocation order {alloc.n}")
    return extend_allocation(alloc)


def rectangularize(alloc: Allocation):
    """Relabel items and rounds so the occupied ones come first, in order.

    Returns (allocation, item_perm, round_perm) with perm[old] = new; apply
    the inverse mapping (or permute the value tensor the same way) to move
    results back.
    """
    n = alloc.n
    grid = alloc.grid
    occupied_items = [j for j in range(n) if (grid[j] != EMPTY).any()]
    occupied_rounds = [k for k in range(n) if (grid[:, k] != EMPTY).any()]
    item_order = occupied_items + [j for j in range(n) if j not in occupied_items]
    round_order = occupied_rounds + [k for k in range(n) if k not in occupied_rounds]
    item_perm = [0] * n
    round_perm = [0] * n
    for new, old in enumerate(item_order):
        item_perm[old] = new
    for new, old in enumerate(round_order):
        round_perm[old] = new
    out = np.full((n, n), EMPTY, dtype=np.int16)
    for a, j, k in alloc.triples():
        out[item_perm[j], round_perm[k]] = a
    return Allocation(out), tuple(item_perm), tuple(round_perm)
