"""Fixed-parameter solvers for the utility-sum objective.

solve_exact_enumeration: branch-and-bound over grids, exact for any
objective/kind pair, parameterized by the order (enumeration limits guard
against blowup).

solve_fpt_value: parameterized by the optimum value.  Colors cells so the
unknown optimal positive cells become rainbow, groups colors into classes,
takes each agent's best in-class matching and assigns agents to classes by
one more matching.  Coloring uses Monte Carlo trials (enough repetitions to
push the per-level failure probability below a telescoping delta schedule),
or full enumeration of colorings when the positive-cell count makes that
cheap, in which case the answer is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._hungarian import max_weight_pairs
from .extension import extend_allocation
from .instance import Allocation, Instance, is_feasible, utilitarian_welfare

DEFAULT_EXACT_LIMIT = {"partial": 4, "complete": 5}
DETERMINISTIC_COLORING_BUDGET = 100_000
WORK_BUDGET = 2_000_000  # (coloring, grouping) pairs before bailing to enumeration


class OracleLimitError(ValueError):
    pass


def _check_mode(objective, mode):
    if objective not in ("umax", "emax"):
        raise ValueError(f"unknown objective {objective!r}")
    if mode not in ("partial", "complete"):
        raise ValueError(f"unknown mode {mode!r}")


def solve_exact_enumeration(
    inst: Instance,
    objective: str = "umax",
    mode: str = "partial",
    limit: int | None = None,
    prune: bool = True,
    backend=None,
):
    """Exact optimum via pruned backtracking; returns (Allocation, value)."""
    _check_mode(objective, mode)
    if limit is None:
        limit = DEFAULT_EXACT_LIMIT[mode]
    if inst.n > limit:
        raise OracleLimitError(
            f"exact enumeration limited to n <= {limit} for {mode} mode (got {inst.n})"
        )
    value, grid = _kernels.exact_search(
        inst.values, objective, complete=(mode == "complete"), prune=prune, backend=backend
    )
    return Allocation(grid), value


def _partitions_into_blocks(s: int, t: int):
    """All partitions of [s] into exactly t unlabeled nonempty blocks, as
    assignment vectors in restricted growth form.  Grouping colors into
    classes is label-invariant (the agent-class matching ignores class
    names), so this enumerates exactly the distinct groupings."""
    assign = [0] * s

    def rec(idx: int, used: int):
        if s - idx < t - used:
            return
        if idx == s:
            if used == t:
                yield tuple(assign)
            return
        for b in range(min(used + 1, t)):
            assign[idx] = b
            if b == used:
                yield from rec(idx + 1, used + 1)
            else:
                yield from rec(idx + 1, used)

    yield from rec(0, 0)


@dataclass(frozen=True)
class ColorScheme:
    """A coloring of the valued cells into s colors plus a grouping of the
    colors into t classes; composed, they split the cells into at most t
    groups, one candidate sub-board per agent."""

    chi: tuple  # color per colored cell, values in [0, s)
    psi: tuple  # class per color, values in [0, t)
    s: int
    t: int

    def __post_init__(self):
        if not (1 <= self.t <= self.s):
            raise ValueError("need 1 <= t <= s")
        if len(self.psi) != self.s:
            raise ValueError("psi must assign a class to every color")
        if any(not 0 <= c < self.s for c in self.chi):
            raise ValueError("cell color out of range")
        if any(not 0 <= g < self.t for g in self.psi):
            raise ValueError("color class out of range")

    def cell_classes(self):
        return tuple(self.psi[c] for c in self.chi)


@dataclass(frozen=True)
class FptResult:
    allocation: Allocation
    value: int
    mode: str
    delta: float
    deterministic: bool  # every level used exhaustive colorings
    levels: int  # largest cell-budget level explored
    used_enumeration: bool  # fell back to the order-parameterized solver


def _candidate_value(values, pos_cells, scheme: ColorScheme, n):
    """Best feasible allocation consistent with one color scheme: per agent
    and class, a max-weight matching over that class's cells, then a
    max-weight agent-to-class assignment."""
    t = scheme.t
    class_cells = [[] for _ in range(t)]
    for cell, cls in zip(pos_cells, scheme.cell_classes()):
        class_cells[cls].append(cell)

    best_q = [[None] * t for _ in range(n)]
    score = np.zeros((n, t))
    for ell in range(t):
        cells = class_cells[ell]
        if not cells:
            continue
        items = sorted({j for j, _ in cells})
        rounds = sorted({k for _, k in cells})
        item_idx = {j: a for a, j in enumerate(items)}
        round_idx = {k: a for a, k in enumerate(rounds)}
        for i in range(n):
            w = np.zeros((len(items), len(rounds)))
            for j, k in cells:
                val = values[i, j, k]
                if val > 0:
                    w[item_idx[j], round_idx[k]] = val
            pairs, total = max_weight_pairs(w)
            if total > 0:
                best_q[i][ell] = [(items[a], rounds[b]) for a, b in pairs]
                score[i, ell] = total

    pairs, total = max_weight_pairs(score)
    triples = []
    for i, ell in pairs:
        for j, k in best_q[i][ell]:
            if values[i, j, k] > 0:
                triples.append((i, j, k))
    return int(round(total)), triples


def solve_fpt_value(
    inst: Instance,
    mode: str = "partial",
    delta: float = 0.05,
    seed: int = 0,
    det_budget: int = DETERMINISTIC_COLORING_BUDGET,
    work_budget: int = WORK_BUDGET,
    exact_limit: int | None = None,
) -> FptResult:
    """Optimum (with probability >= 1 - delta) parameterized by its value.

    Sound unconditionally: every candidate comes from a feasible allocation,
    so the reported value never exceeds the true optimum.  When the best
    value reaches n/2 the order-parameterized enumeration takes over.
    """
    _check_mode("umax", mode)
    n = inst.n
    values = inst.values
    pos_cells = [
        (j, k)
        for j in range(n)
        for k in range(n)
        if (values[:, j, k] > 0).any()
    ]
    p = len(pos_cells)

    best_val = 0
    best_triples: list = []
    deterministic = True
    work = 0
    s = 0
    while True:
        s += 1
        if s <= p:
            for t in range(1, s + 1):
                groupings = list(_partitions_into_blocks(s, t))
                # exhaustive colorings when cheap, Monte Carlo otherwise
                if s == 1:
                    colorings = [tuple([0] * p)]
                elif s <= 4 and s**p <= det_budget:
                    colorings = list(_all_colorings(p, s))
                else:
                    deterministic = False
                    delta_pair = delta / (s * (s + 1))
                    reps = math.ceil(math.exp(s) * math.log(1.0 / delta_pair))
                    rng = np.random.default_rng([seed, s, t])
                    colorings = [
                        tuple(rng.integers(0, s, size=p)) for _ in range(reps)
                    ]
                work += len(colorings) * len(groupings)
                if work > work_budget:
                    alloc, value = solve_exact_enumeration(
                        inst, "umax", mode, limit=exact_limit
                    )
                    return FptResult(alloc, value, mode, delta, True, s, True)
                for coloring in colorings:
                    for grouping in groupings:
                        scheme = ColorScheme(chi=coloring, psi=grouping, s=s, t=t)
                        val, triples = _candidate_value(values, pos_cells, scheme, n)
                        if val > best_val:
                            cand = Allocation.from_triples(n, triples)
                            assert is_feasible(cand)
                            best_val = val
                            best_triples = triples
        if 2 * best_val >= n:
            alloc, value = solve_exact_enumeration(inst, "umax", mode, limit=exact_limit)
            return FptResult(alloc, value, mode, delta, True, s, True)
        if s > best_val:
            break

    alloc = Allocation.from_triples(n, best_triples)
    if mode == "complete":
        alloc = extend_allocation(alloc)
    value = utilitarian_welfare(inst, alloc)
    return FptResult(alloc, value, mode, delta, deterministic, s, False)


def _all_colorings(p: int, s: int):
    coloring = [0] * p

    def rec(idx):
        if idx == p:
            yield tuple(coloring)
            return
        for c in range(s):
            coloring[idx] = c
            yield from rec(idx + 1)

    yield from rec(0)
