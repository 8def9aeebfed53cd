"""Rounding the configuration LP into a partial allocation.

Each agent independently samples one bundle from its LP weights; every
contested cell goes to the sampling agent of maximum value (ties to the
smaller index).  The derandomized variant walks agents in index order and
fixes, for each, the support bundle maximizing the exactly-computed
conditional expected welfare, which never drops below the expectation and
hence stays above (1 - 1/e) times the LP objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config_lp import FractionalSolution, marginals
from .instance import Allocation, Instance, agent_utilities, is_bundle

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    x = (x + _GAMMA) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def agent_uniform(seed: int, agent: int) -> float:
    """One uniform draw from agent's stream; streams are split off the master
    seed with splitmix64, so they are independent and reproducible."""
    stream = _splitmix64((seed & _MASK64) ^ ((agent + 1) * _GAMMA & _MASK64))
    word = _splitmix64(stream)
    return (word >> 11) / float(1 << 53)


@dataclass(frozen=True)
class RoundingOutcome:
    allocation: Allocation
    welfare: int
    seed: int | None  # None for the derandomized variant


def _support(sol: FractionalSolution, epsilon: float):
    """Per-agent support bundles and weights; weights must sum to 1 and
    every bundle must be an item-round matching."""
    n = sol.n
    bundles = [[] for _ in range(n)]
    weights = [[] for _ in range(n)]
    for agent, cells, weight in sol.columns:
        if not is_bundle(cells):
            raise ValueError(f"agent {agent} column {sorted(cells)} is not a matching")
        bundles[agent].append(cells)
        weights[agent].append(weight)
    for i in range(n):
        total = sum(weights[i])
        if abs(total - 1.0) > epsilon:
            raise ValueError(
                f"agent {i} bundle weights sum to {total}, expected 1"
            )
    return bundles, weights


def contention_resolve(inst: Instance, chosen: list) -> Allocation:
    """Award each claimed cell to the claiming agent of maximum value,
    ties to the smallest agent index."""
    n = inst.n
    grid = np.full((n, n), -1, dtype=np.int16)
    for j in range(n):
        for k in range(n):
            winner = -1
            best = -1
            for i in range(n):
                if (j, k) in chosen[i]:
                    val = int(inst.values[i, j, k])
                    if val > best:
                        best = val
                        winner = i
            if winner >= 0:
                grid[j, k] = winner
    return Allocation(grid)


def round_randomized(
    inst: Instance, sol: FractionalSolution, seed: int, epsilon: float = 1e-6
) -> RoundingOutcome:
    """Sample one bundle per agent from the LP weights, resolve contention."""
    bundles, weights = _support(sol, epsilon)
    n = inst.n
    chosen = []
    for i in range(n):
        u = agent_uniform(seed, i) * sum(weights[i])
        acc = 0.0
        pick = bundles[i][-1]
        for cells, w in zip(bundles[i], weights[i]):
            acc += w
            if u < acc:
                pick = cells
                break
        chosen.append(pick)
    alloc = contention_resolve(inst, chosen)
    return RoundingOutcome(alloc, int(agent_utilities(inst, alloc).sum()), seed)


def _cell_priority(values: np.ndarray):
    """Per-cell agent order: decreasing value, smaller index first."""
    n = values.shape[0]
    flat = values.reshape(n, n * n)
    # stable sort on -value keeps equal-value agents in index order
    return np.argsort(-flat, axis=0, kind="stable")


def expected_welfare(inst: Instance, select_prob: np.ndarray) -> float:
    """Expected rounded welfare when agent i claims cell (j,k) independently
    with probability select_prob[i,j,k] and contention goes to the highest
    value (ties to the smaller index):
    sum over cells of sum_l v_l p_l prod_{t<l} (1 - p_t) in priority order."""
    n = inst.n
    order = _cell_priority(inst.values)
    flatv = inst.values.reshape(n, n * n).astype(np.float64)
    flatp = select_prob.reshape(n, n * n)
    vo = np.take_along_axis(flatv, order, axis=0)
    po = np.take_along_axis(flatp, order, axis=0)
    shifted = np.vstack([np.ones((1, n * n)), np.cumprod(1.0 - po, axis=0)[:-1]])
    return float((vo * po * shifted).sum())


def conditional_expectation(
    inst: Instance,
    fixed: dict,
    sol: FractionalSolution,
    candidate: tuple | None = None,
) -> float:
    """Expected welfare with `fixed` agents pinned to their bundles (selection
    probability 0/1) and the rest at their LP marginals.  `candidate` pins
    one more (agent, bundle) pair for the evaluation."""
    n = inst.n
    select = marginals(sol, n)
    pinned = dict(fixed)
    if candidate is not None:
        pinned[candidate[0]] = candidate[1]
    for agent, cells in pinned.items():
        select[agent] = 0.0
        for j, k in cells:
            select[agent, j, k] = 1.0
    return expected_welfare(inst, select)


def round_derandomized(
    inst: Instance, sol: FractionalSolution, epsilon: float = 1e-6
) -> RoundingOutcome:
    """Fix agents in index order to the support bundle maximizing the exact
    conditional expectation; ties keep the earliest support column."""
    bundles, weights = _support(sol, epsilon)
    n = inst.n
    select = marginals(sol, n)
    fixed: list = [None] * n
    for i in range(n):
        best_val = None
        best_cells = None
        for cells in bundles[i]:
            trial = select.copy()
            trial[i] = 0.0
            for j, k in cells:
                trial[i, j, k] = 1.0
            val = expected_welfare(inst, trial)
            if best_val is None or val > best_val + 1e-12:
                best_val = val
                best_cells = cells
        fixed[i] = best_cells
        select[i] = 0.0
        for j, k in best_cells:
            select[i, j, k] = 1.0
    alloc = contention_resolve(inst, fixed)
    return RoundingOutcome(alloc, int(agent_utilities(inst, alloc).sum()), None)
