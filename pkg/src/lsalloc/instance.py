"""Core data model: instances, allocations, welfare, fairness and efficiency.

An instance assigns every (agent, item, round) triple a non-negative integer
value.  An allocation is an item x round grid whose entries are agent indices
(or empty); it is feasible when no agent repeats within an item row or a
round column.  Complete allocations are exactly the Latin squares on the
agent symbols.

Indices are 0-based internally.  JSON files use 1-based agent symbols with 0
marking an empty cell, see `Allocation.to_json`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

EMPTY = -1

FAIRNESS_NOTIONS = ("EF", "EF1", "EFX", "PROP", "PROP1", "PROPX", "EQ", "EQ1", "EQX")
EFFICIENCY_NOTIONS = ("non_wasteful", "pareto_optimal")

DEFAULT_PARETO_LIMIT = 3


def _as_value_tensor(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    if arr.ndim != 3 or len(set(arr.shape)) != 1:
        raise ValueError(f"value tensor must be n x n x n, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError("order must be at least 1")
    if (arr < 0).any():
        raise ValueError("values must be non-negative integers")
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Instance:
    """Order-n problem data: values[agent][item][round], non-negative ints."""

    values: np.ndarray

    def __init__(self, values):
        object.__setattr__(self, "values", _as_value_tensor(values))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def value(self, agent: int, item: int, round_: int) -> int:
        return int(self.values[agent, item, round_])

    def agent_totals(self) -> np.ndarray:
        """v_i(all cells) for every agent."""
        return self.values.sum(axis=(1, 2))

    def is_binary(self) -> bool:
        return bool((self.values <= 1).all())

    def is_identical(self) -> bool:
        return bool((self.values == self.values[0]).all())

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "values": self.values.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        data = json.loads(text)
        inst = cls(data["values"])
        if inst.n != int(data["n"]):
            raise ValueError("declared n does not match value tensor shape")
        return inst


@dataclass(frozen=True)
class Allocation:
    """Item x round grid of agent indices; EMPTY (-1) marks unassigned cells."""

    grid: np.ndarray

    def __init__(self, grid):
        arr = np.asarray(grid, dtype=np.int16)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"grid must be square, got shape {arr.shape}")
        n = arr.shape[0]
        if ((arr < EMPTY) | (arr >= n)).any():
            raise ValueError("grid entries must be agent indices in [0, n) or EMPTY")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "grid", arr)

    @property
    def n(self) -> int:
        return self.grid.shape[0]

    @classmethod
    def empty(cls, n: int) -> "Allocation":
        return cls(np.full((n, n), EMPTY, dtype=np.int16))

    @classmethod
    def from_triples(cls, n: int, triples: Iterable[tuple[int, int, int]]) -> "Allocation":
        """Build from (agent, item, round) triples; rejects double-assigned cells."""
        grid = np.full((n, n), EMPTY, dtype=np.int16)
        for agent, item, round_ in triples:
            if grid[item, round_] != EMPTY:
                raise ValueError(f"cell ({item}, {round_}) assigned twice")
            grid[item, round_] = agent
        return cls(grid)

    def triples(self) -> Iterator[tuple[int, int, int]]:
        """(agent, item, round) for every assigned cell, row-major."""
        n = self.n
        for j in range(n):
            for k in range(n):
                a = int(self.grid[j, k])
                if a != EMPTY:
                    yield (a, j, k)

    def bundles(self) -> list[list[tuple[int, int]]]:
        """Per-agent list of (item, round) cells."""
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for a, j, k in self.triples():
            out[a].append((j, k))
        return out

    @property
    def num_assigned(self) -> int:
        return int((self.grid != EMPTY).sum())

    @property
    def is_complete(self) -> bool:
        return bool((self.grid != EMPTY).all())

    def contains(self, other: "Allocation") -> bool:
        """True if every assignment of `other` appears unchanged here."""
        mask = other.grid != EMPTY
        return bool((self.grid[mask] == other.grid[mask]).all())

    def to_json(self) -> str:
        # external format: 1-based agents, 0 = empty
        return json.dumps({"n": self.n, "grid": (self.grid + 1).tolist()})

    @classmethod
    def from_json(cls, text: str) -> "Allocation":
        data = json.loads(text)
        grid = np.asarray(data["grid"], dtype=np.int16) - 1
        alloc = cls(grid)
        if alloc.n != int(data["n"]):
            raise ValueError("declared n does not match grid shape")
        return alloc


def is_bundle(cells: Iterable[tuple[int, int]]) -> bool:
    """A bundle is a matching between items and rounds: no two of its cells
    share an item or a round."""
    items = set()
    rounds = set()
    for j, k in cells:
        if j in items or k in rounds:
            return False
        items.add(j)
        rounds.add(k)
    return True


def is_feasible(alloc: Allocation) -> bool:
    """Check the three Latin constraints.

    (i) an agent holds an item in at most one round, (ii) an agent holds at
    most one item per round, (iii) a cell holds at most one agent.  (iii) is
    structural in the grid representation.
    """
    grid = alloc.grid
    n = alloc.n
    for a in range(n):
        hits = grid == a
        if (hits.sum(axis=1) > 1).any():  # item row repeated
            return False
        if (hits.sum(axis=0) > 1).any():  # round column repeated
            return False
    return True


def _check_pair(inst: Instance, alloc: Allocation) -> None:
    if inst.n != alloc.n:
        raise ValueError(f"instance order {inst.n} != allocation order {alloc.n}")


def agent_utilities(inst: Instance, alloc: Allocation) -> np.ndarray:
    """u_i = sum of agent i's values over its assigned cells (0 if none)."""
    _check_pair(inst, alloc)
    n = inst.n
    utils = np.zeros(n, dtype=np.int64)
    for a, j, k in alloc.triples():
        utils[a] += inst.values[a, j, k]
    return utils


def utilitarian_welfare(inst: Instance, alloc: Allocation) -> int:
    return int(agent_utilities(inst, alloc).sum())


def egalitarian_welfare(inst: Instance, alloc: Allocation) -> int:
    return int(agent_utilities(inst, alloc).min())


def bundle_value(inst: Instance, agent: int, cells: Iterable[tuple[int, int]]) -> int:
    return int(sum(inst.values[agent, j, k] for j, k in cells))


def fairness_check(inst: Instance, alloc: Allocation, notion: str, weak: bool = False) -> bool:
    """Evaluate one fairness notion literally on a feasible allocation.

    `weak` switches EFX/EQX/PROPX to the variants restricted to positively
    valued goods; it has no effect on the other notions.  Conditions whose
    min/max ranges over an empty candidate set are vacuously satisfied for
    that agent pair.

    The PROP family is compared in exact integer arithmetic
    (n*u_i >= total_i - n*threshold).
    """
    if notion not in FAIRNESS_NOTIONS:
        raise ValueError(f"unknown fairness notion {notion!r}")
    _check_pair(inst, alloc)
    n = inst.n
    v = inst.values
    bundles = alloc.bundles()
    utils = agent_utilities(inst, alloc)

    if notion == "EF":
        return all(
            utils[i] >= bundle_value(inst, i, bundles[o])
            for i in range(n)
            for o in range(n)
        )

    if notion in ("EF1", "EFX"):
        for i in range(n):
            for o in range(n):
                if not bundles[o]:
                    continue
                other = bundle_value(inst, i, bundles[o])
                if notion == "EF1":
                    theta = max(v[i, j, k] for j, k in bundles[o])
                else:
                    cand = [
                        v[i, j, k]
                        for j, k in bundles[o]
                        if not weak or v[o, j, k] > 0
                    ]
                    if not cand:
                        continue
                    theta = min(cand)
                if utils[i] < other - theta:
                    return False
        return True

    if notion in ("PROP", "PROP1", "PROPX"):
        totals = inst.agent_totals()
        owned = [set(b) for b in bundles]
        for i in range(n):
            if notion == "PROP":
                theta = 0
            elif notion == "PROP1":
                cand = [
                    v[i, j, k]
                    for j in range(n)
                    for k in range(n)
                    if (j, k) not in owned[i]
                ]
                if not cand:
                    continue
                theta = max(cand)
            elif weak:
                cand = [v[i, j, k] for j, k in bundles[i] if v[i, j, k] > 0]
                if not cand:
                    continue
                theta = min(cand)
            else:
                cand = [
                    v[i, j, k]
                    for j in range(n)
                    for k in range(n)
                    if (j, k) not in owned[i]
                ]
                if not cand:
                    continue
                theta = min(cand)
            if n * utils[i] < totals[i] - n * theta:
                return False
        return True

    if notion == "EQ":
        return bool((utils == utils[0]).all())

    # EQ1 / EQX
    for o in range(n):
        if not bundles[o]:
            continue
        if notion == "EQ1":
            theta = max(v[o, j, k] for j, k in bundles[o])
        else:
            cand = [v[o, j, k] for j, k in bundles[o] if not weak or v[o, j, k] > 0]
            if not cand:
                continue
            theta = min(cand)
        bound = utils[o] - theta
        if (utils < bound).any():
            return False
    return True


def _dominating_exists(inst: Instance, targets: np.ndarray, complete: bool) -> bool:
    """Search for a feasible allocation of the given kind whose utility vector
    dominates `targets` (all >=, at least one strict).  Backtracking over
    cells with per-agent potential pruning."""
    n = inst.n
    v = inst.values
    ncells = n * n
    cells = [(c // n, c % n) for c in range(ncells)]

    # potential[i][c]: most agent i can still gain from cells c.. onward
    pot = np.zeros((ncells + 1, n), dtype=np.int64)
    for c in range(ncells - 1, -1, -1):
        j, k = cells[c]
        pot[c] = pot[c + 1] + v[:, j, k]

    row_used = [0] * n
    col_used = [0] * n
    utils = np.zeros(n, dtype=np.int64)

    def rec(c: int) -> bool:
        if ((utils + pot[c]) < targets).any():
            return False
        if c == ncells:
            return bool((utils >= targets).all() and (utils > targets).any())
        j, k = cells[c]
        used = row_used[j] | col_used[k]
        for i in range(n):
            if used >> i & 1:
                continue
            if not complete and v[i, j, k] == 0:
                continue  # zero assignments never help domination
            bit = 1 << i
            row_used[j] |= bit
            col_used[k] |= bit
            utils[i] += v[i, j, k]
            if rec(c + 1):
                return True
            utils[i] -= v[i, j, k]
            row_used[j] &= ~bit
            col_used[k] &= ~bit
        if not complete:
            return rec(c + 1)
        return False

    return rec(0)


def efficiency_check(
    inst: Instance,
    alloc: Allocation,
    notion: str,
    mode: str | None = None,
    limit: int = DEFAULT_PARETO_LIMIT,
) -> bool:
    """non_wasteful: every positively valued cell goes to someone who values
    it positively.  pareto_optimal: no feasible allocation of the same kind
    (partial/complete, or forced via `mode`) dominates; enumerative, so only
    allowed for n <= limit."""
    if notion not in EFFICIENCY_NOTIONS:
        raise ValueError(f"unknown efficiency notion {notion!r}")
    _check_pair(inst, alloc)
    n = inst.n
    v = inst.values

    if notion == "non_wasteful":
        for j in range(n):
            for k in range(n):
                if (v[:, j, k] > 0).any():
                    a = int(alloc.grid[j, k])
                    if a == EMPTY or v[a, j, k] == 0:
                        return False
        return True

    if n > limit:
        raise ValueError(
            f"pareto_optimal is enumerative and limited to n <= {limit} (got n={n})"
        )
    if mode is None:
        mode = "complete" if alloc.is_complete else "partial"
    if mode not in ("partial", "complete"):
        raise ValueError(f"unknown mode {mode!r}")
    targets = agent_utilities(inst, alloc)
    return not _dominating_exists(inst, targets, complete=(mode == "complete"))


def uniform_random_instance(n: int, vmax: int, rng: np.random.Generator) -> Instance:
    """Random instance with values uniform in {0..vmax}."""
    return Instance(rng.integers(0, vmax + 1, size=(n, n, n)))
