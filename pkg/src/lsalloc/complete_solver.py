"""Approximation for the complete problem: round the LP, keep the best of
four blocks, extend to a full square.

The four blocks partition the rounded allocation's cells (the odd case
pivots on an empty cell, which carries no welfare), so the best block keeps
at least a quarter of the rounded welfare, and each block touches few
enough items/rounds to be extendable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config_lp import FractionalSolution, solve_configuration_lp
from .extension import extend_allocation
from .instance import Allocation, Instance, utilitarian_welfare
from .rounding import round_derandomized, round_randomized


@dataclass(frozen=True)
class CompleteApproxResult:
    allocation: Allocation
    welfare: int
    lp_bound: float
    partial_welfare: int
    block_chosen: int | None  # 1..4, or None when rounding was already complete
    seed: int | None


def _blocks(alloc: Allocation):
    """Four extendable blocks covering all assigned cells.

    Even n: the four quadrants.  Odd n: relabel so some empty cell sits at
    the centre (a transposition suffices), then split around the centre; the
    centre cell itself belongs to no block.
    """
    n = alloc.n
    triples = list(alloc.triples())
    if n % 2 == 0:
        c = n // 2
        sel = [
            lambda j, k: j < c and k < c,
            lambda j, k: j < c and k >= c,
            lambda j, k: j >= c and k < c,
            lambda j, k: j >= c and k >= c,
        ]
        return [[t for t in triples if s(t[1], t[2])] for s in sel]
    # odd: lexicographically smallest empty cell becomes the pivot
    pivot = None
    for j in range(n):
        for k in range(n):
            if alloc.grid[j, k] == -1:
                pivot = (j, k)
                break
        if pivot:
            break
    assert pivot is not None, "odd-n blocking requires an incomplete allocation"
    mid = (n - 1) // 2
    pj, pk = pivot

    def perm_j(j):
        return mid if j == pj else (pj if j == mid else j)

    def perm_k(k):
        return mid if k == pk else (pk if k == mid else k)

    sel = [
        lambda j, k: j < mid and k <= mid,
        lambda j, k: j <= mid and k > mid,
        lambda j, k: j >= mid and k < mid,
        lambda j, k: j > mid and k >= mid,
    ]
    return [[t for t in triples if s(perm_j(t[1]), perm_k(t[2]))] for s in sel]


def best_block(inst: Instance, alloc: Allocation):
    """(block index 1..4, triples) of the max-welfare block, first on ties."""
    blocks = _blocks(alloc)
    welfares = [
        sum(int(inst.values[i, j, k]) for i, j, k in blk) for blk in blocks
    ]
    idx = max(range(4), key=lambda t: (welfares[t], -t))
    total = sum(welfares)
    partial = utilitarian_welfare(inst, alloc)
    assert total == partial, "blocks must cover every assigned cell exactly once"
    assert 4 * welfares[idx] >= partial
    return idx + 1, blocks[idx]


def solve_complete_approx(
    inst: Instance,
    seed: int | None = None,
    derandomize: bool = True,
    sol: FractionalSolution | None = None,
    lp_bound: float | None = None,
) -> CompleteApproxResult:
    """Complete allocation with welfare >= 1/4 of the rounded partial welfare
    (and >= (1-1/e)/4 of the LP bound under derandomized rounding)."""
    if sol is None:
        sol, _ = solve_configuration_lp(inst)
    if lp_bound is None:
        lp_bound = sol.objective
    if derandomize:
        outcome = round_derandomized(inst, sol)
    else:
        outcome = round_randomized(inst, sol, seed if seed is not None else 0)
    partial = outcome.allocation

    if partial.is_complete:
        return CompleteApproxResult(
            allocation=partial,
            welfare=outcome.welfare,
            lp_bound=float(lp_bound),
            partial_welfare=outcome.welfare,
            block_chosen=None,
            seed=outcome.seed,
        )

    block_idx, triples = best_block(inst, partial)
    block_alloc = Allocation.from_triples(inst.n, triples)
    complete = extend_allocation(block_alloc)
    welfare = utilitarian_welfare(inst, complete)
    assert 4 * welfare >= outcome.welfare
    return CompleteApproxResult(
        allocation=complete,
        welfare=welfare,
        lp_bound=float(lp_bound),
        partial_welfare=outcome.welfare,
        block_chosen=block_idx,
        seed=outcome.seed,
    )
