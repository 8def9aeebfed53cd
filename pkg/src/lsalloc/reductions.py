"""Hardness-construction instance generators with witness mappings.

Four families: completing a partial Latin square (binary values), a
4-occurrence 3SAT gadget (variable/transfer/clause agents), an embedding of
max-min fair allocation (diagonal items plus padding agents), and an
identical-valuation 3-partition gadget.  The generators are exact
materializations of the constructions; the witness maps turn certificates
of the source problems into allocations and back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .extension import extend_allocation
from .instance import Allocation, Instance, is_feasible


class DegenerateConstructionError(ValueError):
    """The construction's cell formulas collide for these parameters."""


# ---------------------------------------------------------------------------
# partial Latin square completion


def from_partial_latin_square(P: Allocation) -> Instance:
    """Binary instance whose complete optimum reaches n^2 exactly when P
    completes: a cell owned by another agent in P is worth 0, anything
    else (own cell or empty) is worth 1."""
    if not is_feasible(P):
        raise ValueError("input partial square is infeasible")
    n = P.n
    values = np.ones((n, n, n), dtype=np.int64)
    for a, j, k in P.triples():
        values[:, j, k] = 0
        values[a, j, k] = 1
    return Instance(values)


# ---------------------------------------------------------------------------
# 4-occurrence 3SAT


@dataclass(frozen=True)
class Formula3SAT:
    """Clauses of three signed 1-based variable indices; every literal
    (positive and negative of each variable) occurs exactly twice."""

    num_vars: int
    clauses: tuple

    def __init__(self, num_vars, clauses):
        clauses = tuple(tuple(int(x) for x in clause) for clause in clauses)
        counts: dict = {}
        for clause in clauses:
            if len(clause) != 3:
                raise ValueError("clauses must have exactly three literals")
            for lit in clause:
                var = abs(lit)
                if lit == 0 or var > num_vars:
                    raise ValueError(f"literal {lit} out of range")
                counts[lit] = counts.get(lit, 0) + 1
        for var in range(1, num_vars + 1):
            for lit in (var, -var):
                if counts.get(lit, 0) != 2:
                    raise ValueError(
                        f"literal {lit} occurs {counts.get(lit, 0)} times, expected 2"
                    )
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "clauses", clauses)

    def satisfies(self, truth) -> bool:
        return all(
            any((lit > 0) == bool(truth[abs(lit) - 1]) for lit in clause)
            for clause in self.clauses
        )


class SatGadgetLayout:
    """Index bookkeeping for the 3SAT gadget (all arguments 1-based like the
    formula, returned indices 0-based)."""

    def __init__(self, formula: Formula3SAT, variant: str = "partial"):
        if variant not in ("partial", "complete"):
            raise ValueError(f"unknown variant {variant!r}")
        self.formula = formula
        self.variant = variant
        self.num_vars = formula.num_vars
        self.num_clauses = len(formula.clauses)
        self.base_n = 5 * self.num_vars + self.num_clauses
        self.n = self.base_n * (2 if variant == "complete" else 1)
        # occurrence list per literal, in clause order
        self.occ: dict = {}
        for p, clause in enumerate(formula.clauses, start=1):
            for pos, lit in enumerate(clause):
                self.occ.setdefault(lit, []).append((p, pos))

    def variable_agent(self, k: int) -> int:
        return k - 1

    def transfer_agent(self, k: int, v: int) -> int:
        return self.num_vars + 4 * (k - 1) + (v - 1)

    def clause_agent(self, p: int) -> int:
        return 5 * self.num_vars + (p - 1)

    def dummy_agent(self, d: int) -> int:
        return self.base_n + (d - 1)

    def block_cells(self, k: int):
        """The 2x2 block of variable k: TL, TR, BL, BR (0-based cells)."""
        r = 2 * k - 2
        return (r, r), (r, r + 1), (r + 1, r), (r + 1, r + 1)

    def transfer_block_cell(self, k: int, v: int):
        tl, tr, bl, br = self.block_cells(k)
        return {1: tl, 2: tr, 3: br, 4: bl}[v]

    def bottom_cell(self, k: int, v: int):
        """Bottom cell of transfer agent t_k^v, determined by which clause
        holds the matching occurrence of the literal."""
        sign = 1 if v in (1, 3) else -1
        rank = 0 if v in (1, 2) else 1
        p = self.occ[sign * k][rank][0]
        col = (2 * k - 2) if v in (1, 4) else (2 * k - 1)
        return (2 * self.num_vars + p - 1, col)

    def top_cell(self, k: int, v: int):
        if k == 1:
            return {1: (1, 2), 2: (1, 3), 3: (0, 2), 4: (0, 3)}[v]
        return (0, 4 * k - 5 + v)

    def clause_top_cell(self, p: int):
        return (0, 4 * self.num_vars + p - 1)

    def clause_bottom_cells(self, p: int):
        """Per literal position, the transfer bottom cell in clause p's row."""
        cells = []
        for pos, lit in enumerate(self.formula.clauses[p - 1]):
            k = abs(lit)
            rank = self.occ[lit].index((p, pos))
            v = (1 if lit > 0 else 2) + 2 * rank
            cells.append(self.bottom_cell(k, v))
        return cells


def from_3sat(formula: Formula3SAT, variant: str = "partial") -> Instance:
    layout = SatGadgetLayout(formula, variant)
    n = layout.n
    values = np.zeros((n, n, n), dtype=np.int64)

    for k in range(1, layout.num_vars + 1):
        xa = layout.variable_agent(k)
        for cell in layout.block_cells(k):
            values[xa][cell] = 1
        for v in range(1, 5):
            ta = layout.transfer_agent(k, v)
            values[ta][layout.transfer_block_cell(k, v)] = 1
            values[ta][layout.bottom_cell(k, v)] = 1
            values[ta][layout.top_cell(k, v)] = 1
    for p in range(1, layout.num_clauses + 1):
        ca = layout.clause_agent(p)
        values[ca][layout.clause_top_cell(p)] = 1
        for cell in layout.clause_bottom_cells(p):
            values[ca][cell] = 1
    if variant == "complete":
        for d in range(1, layout.base_n + 1):
            values[layout.dummy_agent(d), 0, :] = 1
            values[layout.dummy_agent(d), 1, :] = 1
    return Instance(values)


def assignment_to_allocation(
    formula: Formula3SAT, truth, variant: str = "partial"
) -> Allocation:
    """Allocation giving every agent two valued cells, from a satisfying
    assignment: all top cells go to their owners; a true variable takes its
    anti-diagonal block cells (freeing the bottoms of its positive-literal
    transfer agents), a false one its diagonal; each clause takes the free
    bottom of its lowest-positioned true literal.

    The complete variant returns the full extension of that allocation on
    the doubled board: every dummy agent then holds the first two items once
    each (both worth 1 to it), so the minimum utility stays at least 2."""
    if len(truth) != formula.num_vars:
        raise ValueError("truth assignment length mismatch")
    if not formula.satisfies(truth):
        raise ValueError("assignment does not satisfy the formula")
    layout = SatGadgetLayout(formula, variant)
    triples = []

    for k in range(1, layout.num_vars + 1):
        for v in range(1, 5):
            triples.append((layout.transfer_agent(k, v),) + layout.top_cell(k, v))
    for p in range(1, layout.num_clauses + 1):
        triples.append((layout.clause_agent(p),) + layout.clause_top_cell(p))

    for k in range(1, layout.num_vars + 1):
        xa = layout.variable_agent(k)
        tl, tr, bl, br = layout.block_cells(k)
        if truth[k - 1]:
            triples.append((xa,) + tr)
            triples.append((xa,) + bl)
            triples.append((layout.transfer_agent(k, 1),) + tl)
            triples.append((layout.transfer_agent(k, 3),) + br)
            for v in (2, 4):
                triples.append((layout.transfer_agent(k, v),) + layout.bottom_cell(k, v))
        else:
            triples.append((xa,) + tl)
            triples.append((xa,) + br)
            triples.append((layout.transfer_agent(k, 2),) + tr)
            triples.append((layout.transfer_agent(k, 4),) + bl)
            for v in (1, 3):
                triples.append((layout.transfer_agent(k, v),) + layout.bottom_cell(k, v))

    for p, clause in enumerate(formula.clauses, start=1):
        cells = layout.clause_bottom_cells(p)
        for pos, lit in enumerate(clause):
            if (lit > 0) == bool(truth[abs(lit) - 1]):
                triples.append((layout.clause_agent(p),) + cells[pos])
                break

    alloc = Allocation.from_triples(layout.n, triples)
    assert is_feasible(alloc)
    if variant == "complete":
        alloc = extend_allocation(alloc)
    return alloc


# ---------------------------------------------------------------------------
# max-min fair allocation


@dataclass(frozen=True)
class MaxMinInstance:
    """Additive utilities, num_agents x num_items, with at least as many
    items as agents."""

    utilities: np.ndarray

    def __init__(self, utilities):
        u = np.asarray(utilities, dtype=np.int64)
        if u.ndim != 2:
            raise ValueError("utilities must be a 2-d array")
        if (u < 0).any():
            raise ValueError("utilities must be non-negative")
        if u.shape[1] < u.shape[0]:
            raise ValueError("need at least as many items as agents")
        u = np.ascontiguousarray(u)
        u.setflags(write=False)
        object.__setattr__(self, "utilities", u)

    @property
    def num_agents(self) -> int:
        return self.utilities.shape[0]

    @property
    def num_items(self) -> int:
        return self.utilities.shape[1]

    @property
    def floor_value(self) -> int:
        """h: the smallest whole-item-set value over agents."""
        return int(self.utilities.sum(axis=1).min())


def from_maxmin(mm: MaxMinInstance) -> Instance:
    """Order-2m embedding: original agents value item j only in round j
    (diagonal); padding agents value every cell at h, so a complete
    allocation never bottlenecks on them and the minimum-utility optimum
    equals the max-min optimum."""
    m = mm.num_items
    n = 2 * m
    h = mm.floor_value
    values = np.zeros((n, n, n), dtype=np.int64)
    for i in range(mm.num_agents):
        for j in range(m):
            values[i, j, j] = mm.utilities[i, j]
    values[mm.num_agents :, :, :] = h
    return Instance(values)


def partition_to_allocation(mm: MaxMinInstance, partition) -> Allocation:
    """Complete allocation placing item j on diagonal cell (j, j) for its
    owner, then extending; its minimum utility is min_i u_i(X_i)."""
    parts = [set(int(j) for j in part) for part in partition]
    if len(parts) != mm.num_agents:
        raise ValueError("partition must have one part per agent")
    seen: set = set()
    for part in parts:
        if seen & part:
            raise ValueError("partition parts overlap")
        seen |= part
    if seen != set(range(mm.num_items)):
        raise ValueError("partition must cover every item exactly once")
    triples = [(i, j, j) for i, part in enumerate(parts) for j in part]
    return extend_allocation(Allocation.from_triples(2 * mm.num_items, triples))


def allocation_to_partition(mm: MaxMinInstance, alloc: Allocation):
    """Partition read off the diagonal; items held by padding agents (or
    unassigned) default to agent 0, which can only raise utilities."""
    if alloc.n != 2 * mm.num_items:
        raise ValueError("allocation order does not match the embedding")
    parts = [set() for _ in range(mm.num_agents)]
    for j in range(mm.num_items):
        owner = int(alloc.grid[j, j])
        if 0 <= owner < mm.num_agents:
            parts[owner].add(j)
        else:
            parts[0].add(j)
    return parts


# ---------------------------------------------------------------------------
# 3-partition


@dataclass(frozen=True)
class ThreePartitionInstance:
    m: int
    sizes: tuple
    target: int

    def __init__(self, m, sizes, target):
        sizes = tuple(int(a) for a in sizes)
        if len(sizes) != 3 * m:
            raise ValueError(f"expected {3 * m} sizes, got {len(sizes)}")
        for a in sizes:
            if not (target / 4 < a < target / 2):
                raise ValueError(f"size {a} outside (T/4, T/2) for T={target}")
        if sum(sizes) != m * target:
            raise ValueError("sizes must sum to m * T")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "target", target)


def from_3partition(tp: ThreePartitionInstance) -> Instance:
    """Identical valuations of order 6m: item j is worth a_j in round j
    (j <= 3m), and two filler items (3m-1 and 3m, 1-based) are worth T in
    their leading 2m+1 and 3m-1 rounds.  Overlapping cells keep the
    diagonal case (first case listed wins)."""
    m = tp.m
    n = 6 * m
    base = np.zeros((n, n), dtype=np.int64)
    for j in range(3 * m):
        base[j, j] = tp.sizes[j]
    r1 = 3 * m - 2
    for k in range(2 * m + 1):
        if base[r1, k] == 0:
            base[r1, k] = tp.target
    r2 = 3 * m - 1
    for k in range(3 * m - 1):
        if base[r2, k] == 0:
            base[r2, k] = tp.target
    values = np.broadcast_to(base, (n, n, n)).copy()
    return Instance(values)


def partition_to_fair_allocation(tp: ThreePartitionInstance, parts) -> Allocation:
    """Witness allocation for a valid 3-partition: part i's items go to agent
    i on the diagonal, filler rows hand one T-cell to each remaining agent,
    then extend.  Every agent ends with utility exactly T, which makes the
    allocation envy-free, equitable and proportional (and their
    up-to-any-good relaxations).

    The filler rows overlap the diagonal when m < 3, where the construction
    is not well-formed; this raises DegenerateConstructionError."""
    m = tp.m
    n = 6 * m
    part_sets = [set(int(j) for j in part) for part in parts]
    if len(part_sets) != m:
        raise ValueError(f"expected {m} parts")
    seen: set = set()
    for part in part_sets:
        if len(part) != 3:
            raise ValueError("each part must contain exactly three items")
        if sum(tp.sizes[j] for j in part) != tp.target:
            raise ValueError("part sizes must sum to T")
        seen |= part
    if seen != set(range(3 * m)) or sum(len(p) for p in part_sets) != 3 * m:
        raise ValueError("parts must partition the items")

    triples = [(i, j, j) for i, part in enumerate(part_sets) for j in part]
    r1 = 3 * m - 2
    for k in range(2 * m + 1):
        triples.append((m + k, r1, k))
    r2 = 3 * m - 1
    for k in range(3 * m - 1):
        triples.append((3 * m + 1 + k, r2, k))
    try:
        alloc = Allocation.from_triples(n, triples)
    except ValueError as exc:
        raise DegenerateConstructionError(
            f"filler rows collide with the diagonal for m={m}; "
            "the witness construction needs m >= 3"
        ) from exc
    return extend_allocation(alloc)
