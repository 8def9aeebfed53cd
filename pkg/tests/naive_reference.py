"""Independent reference implementations used as test oracles.

Everything here recomputes results from first principles (full enumeration,
brute force) without touching the library's solver paths, so agreement is
meaningful.  Sizes are tiny by construction.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from lsalloc.instance import Allocation, Instance


def diagonal_pair_instance() -> Instance:
    """Order 2; each agent values its own diagonal cell only.  The partial
    optimum (value 2) beats every complete allocation (value 1)."""
    values = np.zeros((2, 2, 2), dtype=np.int64)
    values[0, 0, 0] = 1
    values[1, 1, 1] = 1
    return Instance(values)


def shared_diagonal_instance() -> Instance:
    """Order 2, identical valuations on the two diagonal cells; one agent in
    any complete allocation gets both, the other neither."""
    values = np.zeros((2, 2, 2), dtype=np.int64)
    values[:, 0, 0] = 1
    values[:, 1, 1] = 1
    return Instance(values)


# --------------------------------------------------------------------------
# exhaustive enumeration of all (n+1)^(n^2) grids


@functools.lru_cache(maxsize=4)
def _grid_table(n: int):
    cells = n * n
    reps = np.array(
        list(itertools.product(range(-1, n), repeat=cells)), dtype=np.int8
    )
    grids = reps.reshape(-1, n, n)
    feasible = np.ones(len(grids), dtype=bool)
    for a in range(n):
        hits = grids == a
        feasible &= (hits.sum(axis=2) <= 1).all(axis=1)
        feasible &= (hits.sum(axis=1) <= 1).all(axis=1)
    complete = (grids != -1).all(axis=(1, 2))
    return grids, feasible, complete


def naive_solve_all(values) -> dict:
    """The four exact optima by checking the definition on every grid."""
    v = np.asarray(values, dtype=np.int64)
    n = v.shape[0]
    grids, feasible, complete = _grid_table(n)
    utils = np.zeros((len(grids), n), dtype=np.int64)
    for a in range(n):
        utils[:, a] = ((grids == a) * v[a][None, :, :]).sum(axis=(1, 2))
    total = utils.sum(axis=1)
    minimum = utils.min(axis=1)
    both = feasible & complete
    return {
        ("umax", "partial"): int(total[feasible].max()),
        ("emax", "partial"): int(minimum[feasible].max()),
        ("umax", "complete"): int(total[both].max()),
        ("emax", "complete"): int(minimum[both].max()),
    }


def enumerate_complete_grids(n: int):
    grids, feasible, complete = _grid_table(n)
    return grids[feasible & complete]


# --------------------------------------------------------------------------
# matchings


def all_matchings(left: int, right: int):
    """Every (possibly empty) injective pairing left -> right."""
    out = [[]]
    for u in range(left):
        new = []
        for match in out:
            new.append(match)
            used = {r for _, r in match}
            for r in range(right):
                if r not in used:
                    new.append(match + [(u, r)])
        out = new
    return [frozenset(m) for m in out]


def brute_force_matching(weights):
    """Max-weight matching by trying every matching (empty included)."""
    w = np.asarray(weights, dtype=np.float64)
    left, right = w.shape
    best_weight = 0.0
    best = frozenset()
    for match in all_matchings(left, right):
        total = sum(w[u, r] for u, r in match)
        if np.isfinite(total) and total > best_weight:
            best_weight = total
            best = match
    return best_weight, best


# --------------------------------------------------------------------------
# LP by vertex enumeration (tiny orders only)


def lp_by_vertex_enumeration(values) -> float:
    """Optimum of the bundle-weight LP by checking every basic solution of
    the standard-form system (per-agent equalities, per-cell inequalities
    with slacks)."""
    v = np.asarray(values, dtype=np.int64)
    n = v.shape[0]
    configs = all_matchings(n, n)
    nvars = n * len(configs)
    nrows = n + n * n
    ncols = nvars + n * n
    A = np.zeros((nrows, ncols))
    c = np.zeros(ncols)
    for i in range(n):
        for t, cfg in enumerate(configs):
            col = i * len(configs) + t
            A[i, col] = 1.0
            for j, k in cfg:
                A[n + j * n + k, col] = 1.0
            c[col] = sum(v[i, j, k] for j, k in cfg)
    for r in range(n * n):
        A[n + r, nvars + r] = 1.0
    b = np.ones(nrows)

    best = 0.0
    for cols in itertools.combinations(range(ncols), nrows):
        B = A[:, cols]
        try:
            x = np.linalg.solve(B, b)
        except np.linalg.LinAlgError:
            continue
        if (x >= -1e-9).all():
            best = max(best, float(c[list(cols)] @ x))
    return best


# --------------------------------------------------------------------------
# rounding oracles


def independent_contention_welfare(values, bundles) -> int:
    """Welfare of awarding each claimed cell to the max-value claimant
    (ties to the smaller index); standalone re-statement."""
    v = np.asarray(values)
    n = v.shape[0]
    welfare = 0
    for j in range(n):
        for k in range(n):
            winner, best = -1, -1
            for i in range(n):
                if (j, k) in bundles[i] and v[i, j, k] > best:
                    best, winner = v[i, j, k], i
            if winner >= 0:
                welfare += int(v[winner, j, k])
    return welfare


def joint_expected_welfare(values, sol) -> float:
    """Exact expectation over the full joint support (product distribution)."""
    n = np.asarray(values).shape[0]
    supports = [[] for _ in range(n)]
    for col in sol.columns:
        supports[col.agent].append((col.cells, col.weight))
    total = 0.0
    for combo in itertools.product(*supports):
        prob = 1.0
        bundles = []
        for cells, weight in combo:
            prob *= weight
            bundles.append(cells)
        total += prob * independent_contention_welfare(values, bundles)
    return total


def per_cell_formula_expectation(values, select) -> float:
    """Plain-loop evaluation of the per-cell survival formula: walk agents in
    decreasing value (smaller index first on ties), each contributes
    v * p * prod(1 - p of earlier agents)."""
    v = np.asarray(values, dtype=np.int64)
    n = v.shape[0]
    total = 0.0
    for j in range(n):
        for k in range(n):
            order = sorted(range(n), key=lambda i: (-v[i, j, k], i))
            alive = 1.0
            for i in order:
                p = float(select[i, j, k])
                total += int(v[i, j, k]) * p * alive
                alive *= 1.0 - p
    return total


# --------------------------------------------------------------------------
# misc small oracles and generators


def brute_force_maxmin(utilities) -> int:
    u = np.asarray(utilities, dtype=np.int64)
    agents, items = u.shape
    best = -1
    for assign in itertools.product(range(agents), repeat=items):
        totals = [0] * agents
        for j, i in enumerate(assign):
            totals[i] += int(u[i, j])
        best = max(best, min(totals))
    return best


def naive_completion_exists(alloc: Allocation) -> bool:
    """Backtracking Latin-square completion, no pruning beyond feasibility."""
    n = alloc.n
    grid = alloc.grid.astype(np.int64).copy()
    holes = [(j, k) for j in range(n) for k in range(n) if grid[j, k] < 0]

    def rec(idx: int) -> bool:
        if idx == len(holes):
            return True
        j, k = holes[idx]
        for a in range(n):
            if a not in grid[j, :] and a not in grid[:, k]:
                grid[j, k] = a
                if rec(idx + 1):
                    return True
                grid[j, k] = -1
        return False

    return rec(0)


def random_feasible_allocation(n: int, rng, density: float = 0.6) -> Allocation:
    grid = np.full((n, n), -1, dtype=np.int16)
    for j in range(n):
        for k in range(n):
            if rng.random() > density:
                continue
            used = set(int(a) for a in grid[j] if a >= 0)
            used |= set(int(a) for a in grid[:, k] if a >= 0)
            avail = [i for i in range(n) if i not in used]
            if avail:
                grid[j, k] = int(rng.choice(avail))
    return Allocation(grid)


def random_latin_rectangle(n: int, m: int, r: int, rng) -> Allocation:
    """Fully-filled m x r rectangle on n symbols; never dead-ends while
    m + r <= n."""
    grid = np.full((n, n), -1, dtype=np.int16)
    for j in range(m):
        for k in range(r):
            used = set(int(a) for a in grid[j, :r] if a >= 0)
            used |= set(int(a) for a in grid[:m, k] if a >= 0)
            choices = [i for i in range(n) if i not in used]
            grid[j, k] = int(rng.choice(choices))
    return Allocation(grid)
