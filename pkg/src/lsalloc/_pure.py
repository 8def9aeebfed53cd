"""Pure-Python search kernels.

Mirrors lsalloc._speedups and is selected by lsalloc._kernels when the
compiled extension is unavailable.  Iteration orders are identical, so both
backends return the same values and the same witnesses.  All precomputed
arrays (candidate orders, suffix bounds) are built by the dispatcher.
"""

from __future__ import annotations

import numpy as np


def exact_search(v, cand, cand_cnt, objective, complete, prune, sb, row_suffix, agent_suffix):
    """Branch-and-bound over grids, row-major cells.

    objective: 0 = maximize utility sum, 1 = maximize minimum utility.
    Returns (best_value, grid) where grid is int16 (n, n) with -1 empty.
    """
    n = v.shape[0]
    ncells = n * n
    umax = objective == 0

    grid = np.full(ncells, -1, dtype=np.int16)
    row_used = [0] * n
    col_used = [0] * n
    utils = [0] * n

    best_val = -1
    best_grid = None
    if not complete:
        best_val = 0  # empty allocation is the initial incumbent
        best_grid = grid.copy()

    cur_sum = 0

    def bound(c):
        if umax:
            j, k = divmod(c, n)
            if k == 0:
                return cur_sum + row_suffix[j]
            return cur_sum + sb[c] + row_suffix[j + 1]
        m = None
        for i in range(n):
            t = utils[i] + agent_suffix[c, i]
            if m is None or t < m:
                m = t
        return m

    def rec(c):
        nonlocal cur_sum, best_val, best_grid
        if prune and bound(c) <= best_val:
            return
        if c == ncells:
            val = cur_sum if umax else min(utils)
            if val > best_val:
                best_val = val
                best_grid = grid.copy()
            return
        j, k = divmod(c, n)
        used = row_used[j] | col_used[k]
        for t in range(cand_cnt[c]):
            i = int(cand[c, t])
            if used >> i & 1:
                continue
            bit = 1 << i
            val = int(v[i, j, k])
            row_used[j] |= bit
            col_used[k] |= bit
            utils[i] += val
            cur_sum += val
            grid[c] = i
            rec(c + 1)
            grid[c] = -1
            cur_sum -= val
            utils[i] -= val
            row_used[j] &= ~bit
            col_used[k] &= ~bit
        if not complete:
            rec(c + 1)

    rec(0)
    return int(best_val), best_grid.reshape(n, n)


def _fair_leaf_ok(v, grid, utils, pair_vals, totals, notion, weak):
    """Evaluate a fairness notion on a complete grid.

    pair_vals[i][o] = value agent i assigns to agent o's bundle.  Bundles of
    a complete allocation are never empty; the empty-candidate branches only
    arise for the weak (positive-good) variants.
    """
    n = v.shape[0]
    ncells = n * n

    if notion == 0:  # EF
        for i in range(n):
            for o in range(n):
                if utils[i] < pair_vals[i][o]:
                    return False
        return True

    if notion in (1, 2):  # EF1 / EFX
        INF = float("inf")
        theta = [[(-1 if notion == 1 else INF)] * n for _ in range(n)]
        for c in range(ncells):
            a = int(grid[c])
            j, k = divmod(c, n)
            owner_positive = v[a, j, k] > 0
            for i in range(n):
                val = v[i, j, k]
                if notion == 1:
                    if val > theta[i][a]:
                        theta[i][a] = val
                else:
                    if weak and not owner_positive:
                        continue
                    if val < theta[i][a]:
                        theta[i][a] = val
        for i in range(n):
            for o in range(n):
                t = theta[i][o]
                if notion == 2 and t == float("inf"):
                    continue  # no candidate good: vacuous
                if utils[i] < pair_vals[i][o] - t:
                    return False
        return True

    if notion in (3, 4, 5):  # PROP / PROP1 / PROPX
        for i in range(n):
            if notion == 3:
                theta = 0
            elif notion == 4:
                theta = -1
                for c in range(ncells):
                    j, k = divmod(c, n)
                    if grid[c] != i and v[i, j, k] > theta:
                        theta = v[i, j, k]
                if theta < 0:
                    continue
            elif weak:
                theta = None
                for c in range(ncells):
                    j, k = divmod(c, n)
                    if grid[c] == i and v[i, j, k] > 0:
                        if theta is None or v[i, j, k] < theta:
                            theta = v[i, j, k]
                if theta is None:
                    continue
            else:
                theta = None
                for c in range(ncells):
                    j, k = divmod(c, n)
                    if grid[c] != i:
                        if theta is None or v[i, j, k] < theta:
                            theta = v[i, j, k]
                if theta is None:
                    continue
            if n * utils[i] < totals[i] - n * theta:
                return False
        return True

    if notion == 6:  # EQ
        return all(utils[i] == utils[0] for i in range(n))

    # EQ1 / EQX: threshold depends only on the owner's own bundle
    for o in range(n):
        theta = None
        for c in range(ncells):
            if grid[c] != o:
                continue
            j, k = divmod(c, n)
            val = v[o, j, k]
            if notion == 7:
                if theta is None or val > theta:
                    theta = val
            else:
                if weak and val <= 0:
                    continue
                if theta is None or val < theta:
                    theta = val
        if theta is None:
            continue
        bound = utils[o] - theta
        for i in range(n):
            if utils[i] < bound:
                return False
    return True


def fair_search(v, notion, weak, symmetry, prune, agent_suffix, totals):
    """Backtracking search for a complete allocation satisfying `notion`.

    symmetry=True restricts agent choices to (highest index used so far)+1,
    sound when all agents share one valuation.  Potential-based pruning is
    applied for the exact notions EF/PROP/EQ only.  Returns an (n, n) grid
    or None.
    """
    n = v.shape[0]
    ncells = n * n

    grid = np.full(ncells, -1, dtype=np.int16)
    row_used = [0] * n
    col_used = [0] * n
    utils = [0] * n
    pair_vals = [[0] * n for _ in range(n)]

    def dead(c):
        if notion == 0:
            for i in range(n):
                reach = utils[i] + agent_suffix[c, i]
                for o in range(n):
                    if reach < pair_vals[i][o]:
                        return True
            return False
        if notion == 3:
            for i in range(n):
                if n * (utils[i] + agent_suffix[c, i]) < totals[i]:
                    return True
            return False
        if notion == 6:
            hi = max(utils)
            for i in range(n):
                if utils[i] + agent_suffix[c, i] < hi:
                    return True
            return False
        return False

    def rec(c, max_used):
        if prune and dead(c):
            return None
        if c == ncells:
            if _fair_leaf_ok(v, grid, utils, pair_vals, totals, notion, weak):
                return grid.copy()
            return None
        j, k = divmod(c, n)
        used = row_used[j] | col_used[k]
        cap = min(n, max_used + 2) if symmetry else n
        for i in range(cap):
            if used >> i & 1:
                continue
            bit = 1 << i
            row_used[j] |= bit
            col_used[k] |= bit
            utils[i] += int(v[i, j, k])
            for t in range(n):
                pair_vals[t][i] += int(v[t, j, k])
            grid[c] = i
            res = rec(c + 1, max(max_used, i))
            if res is not None:
                return res
            grid[c] = -1
            for t in range(n):
                pair_vals[t][i] -= int(v[t, j, k])
            utils[i] -= int(v[i, j, k])
            row_used[j] &= ~bit
            col_used[k] &= ~bit
        return None

    res = rec(0, -1)
    return None if res is None else res.reshape(n, n)


def color_edges(n_left, n_right, eu, ev, num_colors):
    """Proper edge coloring of a bipartite multigraph by edge insertion.

    Each new edge either takes a color free at both endpoints or triggers a
    two-color alternating-path swap (the constructive step behind Koenig's
    theorem).  Requires num_colors >= max degree; the caller checks.
    """
    m = len(eu)
    C = num_colors
    full = (1 << C) - 1
    at_l = [[-1] * C for _ in range(n_left)]
    at_r = [[-1] * C for _ in range(n_right)]
    free_l = [full] * n_left
    free_r = [full] * n_right
    color = np.full(m, -1, dtype=np.int32)

    for e in range(m):
        u = int(eu[e])
        w = int(ev[e])
        common = free_l[u] & free_r[w]
        if common:
            c = (common & -common).bit_length() - 1
        else:
            fa = free_l[u]
            fb = free_r[w]
            if fa == 0 or fb == 0:
                raise ValueError("degree exceeds the number of colors")
            alpha = (fa & -fa).bit_length() - 1
            beta = (fb & -fb).bit_length() - 1
            # walk the alpha/beta alternating path starting at w; by parity
            # it never reaches u, so swapping frees alpha at w
            path = []
            cur = w
            on_right = True
            want = alpha
            while True:
                ee = at_r[cur][want] if on_right else at_l[cur][want]
                if ee == -1:
                    break
                path.append(ee)
                cur = int(eu[ee]) if on_right else int(ev[ee])
                on_right = not on_right
                want = beta if want == alpha else alpha
            for ee in path:
                cu, cw, cc = int(eu[ee]), int(ev[ee]), int(color[ee])
                at_l[cu][cc] = -1
                at_r[cw][cc] = -1
                free_l[cu] |= 1 << cc
                free_r[cw] |= 1 << cc
            for ee in path:
                cc = int(color[ee])
                nc = beta if cc == alpha else alpha
                color[ee] = nc
                cu, cw = int(eu[ee]), int(ev[ee])
                at_l[cu][nc] = ee
                at_r[cw][nc] = ee
                free_l[cu] &= ~(1 << nc)
                free_r[cw] &= ~(1 << nc)
            c = alpha
        color[e] = c
        at_l[u][c] = e
        at_r[w][c] = e
        free_l[u] &= ~(1 << c)
        free_r[w] &= ~(1 << c)
    return color
