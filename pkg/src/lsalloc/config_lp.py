"""Configuration LP for the partial utility-sum problem, solved to optimality
by column generation.

Variables y_{iS} weight whole per-agent bundles S (item-round matchings),
with sum_S y_{iS} = 1 per agent and per-cell packing constraints.  The
restricted master is solved by a small dense revised simplex; pricing an
agent's best bundle against the duals is a max-weight matching, which is an
exact separation oracle, so termination at non-positive reduced costs
certifies the true LP optimum.  The optimum upper-bounds the integral
partial optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._hungarian import max_weight_pairs
from .instance import Instance

EPSILON = 1e-9

_RATIO_EPS = 1e-11


class LpIterationLimit(RuntimeError):
    """Pricing-round cap exceeded; carries the best master objective so far."""

    def __init__(self, message, best_bound):
        super().__init__(message)
        self.best_bound = best_bound


class ConfigColumn(NamedTuple):
    agent: int
    cells: frozenset  # of (item, round) pairs; a matching
    weight: float


@dataclass(frozen=True)
class FractionalSolution:
    n: int
    columns: tuple
    objective: float
    pricing_rounds: int = 0

    def agent_columns(self, agent: int):
        return [c for c in self.columns if c.agent == agent]


@dataclass(frozen=True)
class DualPrices:
    agent_prices: np.ndarray  # one per agent
    cell_prices: np.ndarray  # (n, n), non-negative


def _simplex_max(A, c, b, basis):
    """maximize c x s.t. A x = b, x >= 0 starting from feasible basis.

    Dantzig entering rule with lowest-index ties; after a long degenerate
    streak switches to Bland's rule, which cannot cycle.  Returns
    (x, duals, basis).
    """
    m, ncols = A.shape
    basis = list(basis)
    bland = False
    degenerate_streak = 0
    max_pivots = 200 * (m + ncols) + 1000

    for _ in range(max_pivots):
        B = A[:, basis]
        xb = np.linalg.solve(B, b)
        duals = np.linalg.solve(B.T, c[basis])
        reduced = c - duals @ A
        reduced[basis] = 0.0

        if bland:
            improving = np.flatnonzero(reduced > EPSILON)
            if improving.size == 0:
                break
            enter = int(improving[0])
        else:
            enter = int(np.argmax(reduced))
            if reduced[enter] <= EPSILON:
                break

        d = np.linalg.solve(B, A[:, enter])
        pos = d > _RATIO_EPS
        if not pos.any():
            raise RuntimeError("master LP unbounded; inconsistent input")
        ratios = np.full(m, np.inf)
        ratios[pos] = xb[pos] / d[pos]
        theta = ratios.min()
        cand = np.flatnonzero(ratios <= theta + _RATIO_EPS)
        leave = int(min(cand, key=lambda r: basis[r]))

        if theta <= _RATIO_EPS:
            degenerate_streak += 1
            if degenerate_streak > 60:
                bland = True
        else:
            degenerate_streak = 0
        basis[leave] = enter
    else:
        raise RuntimeError("simplex pivot cap exceeded")

    x = np.zeros(ncols)
    B = A[:, basis]
    xb = np.linalg.solve(B, b)
    duals = np.linalg.solve(B.T, c[basis])
    x[basis] = xb
    return x, duals, basis


def price(inst: Instance, agent: int, duals: DualPrices):
    """Best bundle for one agent against cell prices q and its price p.

    Maximizes the bundle value net of cell prices via max-weight matching;
    returns (cells, reduced_cost), reduced cost net of the agent price.
    """
    w = inst.values[agent].astype(np.float64) - duals.cell_prices
    pairs, total = max_weight_pairs(w)
    return frozenset(pairs), float(total) - float(duals.agent_prices[agent])


def solve_configuration_lp(
    inst: Instance,
    epsilon: float = EPSILON,
    max_rounds: int | None = None,
    time_limit: float | None = None,
):
    """Column generation to LP optimality; returns (FractionalSolution, DualPrices).

    The restricted master always contains each agent's empty bundle, so it is
    feasible from the first iteration (y_{i,empty} = 1).
    """
    import time as _time

    n = inst.n
    nrows = n + n * n
    if max_rounds is None:
        max_rounds = 10 * n**3
    start = _time.perf_counter()
    b = np.ones(nrows)

    def make_col(agent, cells):
        col = np.zeros(nrows)
        col[agent] = 1.0
        for j, k in cells:
            col[n + j * n + k] = 1.0
        return col

    # columns: per-agent empty bundles, then cell slacks, then priced bundles
    col_cells = [(i, frozenset()) for i in range(n)]
    cols = [make_col(i, frozenset()) for i in range(n)]
    obj = [0.0] * n
    for r in range(n * n):
        slack = np.zeros(nrows)
        slack[n + r] = 1.0
        cols.append(slack)
        obj.append(0.0)
    num_config = n  # leading columns that are configurations, not slacks
    seen = set(col_cells)
    basis = list(range(nrows))

    x = duals_vec = None
    rounds = 0
    while True:
        rounds += 1
        A = np.column_stack(cols)
        c = np.asarray(obj)
        x, duals_vec, basis = _simplex_max(A, c, b, basis)
        duals = DualPrices(
            agent_prices=duals_vec[:n].copy(),
            cell_prices=np.maximum(duals_vec[n:].reshape(n, n), 0.0),
        )

        if rounds > max_rounds:
            raise LpIterationLimit(
                f"column generation exceeded {max_rounds} pricing rounds",
                best_bound=float(c @ x),
            )
        if time_limit is not None and _time.perf_counter() - start > time_limit:
            raise LpIterationLimit(
                f"column generation exceeded the {time_limit}s time limit",
                best_bound=float(c @ x),
            )

        new_cols = []
        for i in range(n):
            cells, rc = price(inst, i, duals)
            if rc > epsilon and (i, cells) not in seen:
                new_cols.append((i, cells))
        if not new_cols:
            break
        for i, cells in new_cols:
            seen.add((i, cells))
            col_cells.insert(num_config, (i, cells))
            cols.insert(num_config, make_col(i, cells))
            obj.insert(num_config, float(sum(inst.values[i, j, k] for j, k in cells)))
            # keep basis indices aligned with the inserted column
            basis = [idx + 1 if idx >= num_config else idx for idx in basis]
            num_config += 1

    objective = float(np.asarray(obj) @ x)
    columns = []
    for t in range(num_config):
        weight = float(x[t])
        if weight > 1e-12:
            agent, cells = col_cells[t]
            columns.append(ConfigColumn(agent, cells, weight))
    sol = FractionalSolution(
        n=n, columns=tuple(columns), objective=objective, pricing_rounds=rounds
    )
    return sol, duals


def marginals(sol: FractionalSolution, n: int) -> np.ndarray:
    """x*_{ijk} = total weight of agent i's bundles containing cell (j, k)."""
    x = np.zeros((n, n, n))
    for agent, cells, weight in sol.columns:
        for j, k in cells:
            x[agent, j, k] += weight
    return x
