# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled search kernels (see lsalloc._pure for the reference semantics).

Same iteration orders as the pure backend, so values and witnesses match
exactly; only the constant factor differs.
"""

import numpy as np

cdef long long LL_MAX = (<long long>1) << 62


cdef class _ExactCtx:
    cdef long long[:, :, ::1] v
    cdef short[:, ::1] cand
    cdef short[::1] cand_cnt
    cdef long long[::1] sb
    cdef long long[::1] row_suffix
    cdef long long[:, ::1] agent_suffix
    cdef short[::1] grid
    cdef short[::1] best_grid
    cdef unsigned long long[::1] row_used
    cdef unsigned long long[::1] col_used
    cdef long long[::1] utils
    cdef int n, ncells
    cdef bint umax, complete, prune, have_best
    cdef long long best_val, cur_sum

    cdef long long bound(self, int c):
        cdef long long m, t
        cdef int i, j
        if self.umax:
            j = c // self.n
            if c % self.n == 0:
                return self.cur_sum + self.row_suffix[j]
            return self.cur_sum + self.sb[c] + self.row_suffix[j + 1]
        m = LL_MAX
        for i in range(self.n):
            t = self.utils[i] + self.agent_suffix[c, i]
            if t < m:
                m = t
        return m

    cdef void rec(self, int c):
        cdef int i, t, j, k
        cdef long long val, leaf
        cdef unsigned long long used, bit
        if self.prune and self.bound(c) <= self.best_val:
            return
        if c == self.ncells:
            if self.umax:
                leaf = self.cur_sum
            else:
                leaf = LL_MAX
                for i in range(self.n):
                    if self.utils[i] < leaf:
                        leaf = self.utils[i]
            if leaf > self.best_val:
                self.best_val = leaf
                self.have_best = True
                for i in range(self.ncells):
                    self.best_grid[i] = self.grid[i]
            return
        j = c // self.n
        k = c % self.n
        used = self.row_used[j] | self.col_used[k]
        for t in range(self.cand_cnt[c]):
            i = self.cand[c, t]
            if (used >> i) & 1:
                continue
            bit = (<unsigned long long>1) << i
            val = self.v[i, j, k]
            self.row_used[j] |= bit
            self.col_used[k] |= bit
            self.utils[i] += val
            self.cur_sum += val
            self.grid[c] = i
            self.rec(c + 1)
            self.grid[c] = -1
            self.cur_sum -= val
            self.utils[i] -= val
            self.row_used[j] &= ~bit
            self.col_used[k] &= ~bit
        if not self.complete:
            self.rec(c + 1)


def exact_search(v, cand, cand_cnt, objective, complete, prune, sb, row_suffix, agent_suffix):
    cdef _ExactCtx ctx = _ExactCtx()
    cdef int n = v.shape[0]
    ctx.v = v
    ctx.cand = cand
    ctx.cand_cnt = cand_cnt
    ctx.sb = sb
    ctx.row_suffix = row_suffix
    ctx.agent_suffix = agent_suffix
    ctx.n = n
    ctx.ncells = n * n
    ctx.umax = objective == 0
    ctx.complete = complete
    ctx.prune = prune
    grid = np.full(n * n, -1, dtype=np.int16)
    best_grid = np.full(n * n, -1, dtype=np.int16)
    ctx.grid = grid
    ctx.best_grid = best_grid
    ctx.row_used = np.zeros(n, dtype=np.uint64)
    ctx.col_used = np.zeros(n, dtype=np.uint64)
    ctx.utils = np.zeros(n, dtype=np.int64)
    ctx.cur_sum = 0
    if complete:
        ctx.best_val = -1
        ctx.have_best = False
    else:
        ctx.best_val = 0
        ctx.have_best = True
    ctx.rec(0)
    return int(ctx.best_val), best_grid.reshape(n, n)


cdef class _FairCtx:
    cdef long long[:, :, ::1] v
    cdef long long[:, ::1] agent_suffix
    cdef long long[::1] totals
    cdef short[::1] grid
    cdef unsigned long long[::1] row_used
    cdef unsigned long long[::1] col_used
    cdef long long[::1] utils
    cdef long long[:, ::1] pair_vals
    cdef long long[:, ::1] theta
    cdef int n, ncells, notion
    cdef bint weak, symmetry, prune, found

    cdef bint dead(self, int c):
        cdef int i, o
        cdef long long reach, hi
        if self.notion == 0:
            for i in range(self.n):
                reach = self.utils[i] + self.agent_suffix[c, i]
                for o in range(self.n):
                    if reach < self.pair_vals[i, o]:
                        return True
            return False
        if self.notion == 3:
            for i in range(self.n):
                if self.n * (self.utils[i] + self.agent_suffix[c, i]) < self.totals[i]:
                    return True
            return False
        if self.notion == 6:
            hi = 0
            for i in range(self.n):
                if self.utils[i] > hi:
                    hi = self.utils[i]
            for i in range(self.n):
                if self.utils[i] + self.agent_suffix[c, i] < hi:
                    return True
            return False
        return False

    cdef bint leaf_ok(self):
        cdef int n = self.n
        cdef int ncells = self.ncells
        cdef int i, o, c, j, k, a
        cdef long long val, t, bound
        cdef bint has
        cdef int notion = self.notion

        if notion == 0:  # EF
            for i in range(n):
                for o in range(n):
                    if self.utils[i] < self.pair_vals[i, o]:
                        return False
            return True

        if notion == 1 or notion == 2:  # EF1 / EFX
            for i in range(n):
                for o in range(n):
                    self.theta[i, o] = -1 if notion == 1 else LL_MAX
            for c in range(ncells):
                a = self.grid[c]
                j = c // n
                k = c % n
                if notion == 2 and self.weak and self.v[a, j, k] <= 0:
                    continue
                for i in range(n):
                    val = self.v[i, j, k]
                    if notion == 1:
                        if val > self.theta[i, a]:
                            self.theta[i, a] = val
                    else:
                        if val < self.theta[i, a]:
                            self.theta[i, a] = val
            for i in range(n):
                for o in range(n):
                    t = self.theta[i, o]
                    if notion == 2 and t == LL_MAX:
                        continue
                    if self.utils[i] < self.pair_vals[i, o] - t:
                        return False
            return True

        if notion == 3 or notion == 4 or notion == 5:  # PROP family
            for i in range(n):
                if notion == 3:
                    t = 0
                    has = True
                elif notion == 4:
                    t = -1
                    has = False
                    for c in range(ncells):
                        j = c // n
                        k = c % n
                        if self.grid[c] != i and self.v[i, j, k] > t:
                            t = self.v[i, j, k]
                            has = True
                    has = t >= 0
                elif self.weak:
                    t = LL_MAX
                    has = False
                    for c in range(ncells):
                        j = c // n
                        k = c % n
                        if self.grid[c] == i and self.v[i, j, k] > 0:
                            has = True
                            if self.v[i, j, k] < t:
                                t = self.v[i, j, k]
                else:
                    t = LL_MAX
                    has = False
                    for c in range(ncells):
                        j = c // n
                        k = c % n
                        if self.grid[c] != i:
                            has = True
                            if self.v[i, j, k] < t:
                                t = self.v[i, j, k]
                if not has:
                    continue
                if n * self.utils[i] < self.totals[i] - n * t:
                    return False
            return True

        if notion == 6:  # EQ
            for i in range(n):
                if self.utils[i] != self.utils[0]:
                    return False
            return True

        # EQ1 / EQX
        for o in range(n):
            t = -1 if notion == 7 else LL_MAX
            has = False
            for c in range(ncells):
                if self.grid[c] != o:
                    continue
                j = c // n
                k = c % n
                val = self.v[o, j, k]
                if notion == 7:
                    has = True
                    if val > t:
                        t = val
                else:
                    if self.weak and val <= 0:
                        continue
                    has = True
                    if val < t:
                        t = val
            if not has:
                continue
            bound = self.utils[o] - t
            for i in range(n):
                if self.utils[i] < bound:
                    return False
        return True

    cdef bint rec(self, int c, int max_used):
        cdef int i, t, j, k, cap
        cdef long long val
        cdef unsigned long long used, bit
        if self.prune and self.dead(c):
            return False
        if c == self.ncells:
            return self.leaf_ok()
        j = c // self.n
        k = c % self.n
        used = self.row_used[j] | self.col_used[k]
        if self.symmetry:
            cap = max_used + 2
            if cap > self.n:
                cap = self.n
        else:
            cap = self.n
        for i in range(cap):
            if (used >> i) & 1:
                continue
            bit = (<unsigned long long>1) << i
            self.row_used[j] |= bit
            self.col_used[k] |= bit
            self.utils[i] += self.v[i, j, k]
            for t in range(self.n):
                self.pair_vals[t, i] += self.v[t, j, k]
            self.grid[c] = i
            if self.rec(c + 1, max_used if max_used >= i else i):
                return True
            self.grid[c] = -1
            for t in range(self.n):
                self.pair_vals[t, i] -= self.v[t, j, k]
            self.utils[i] -= self.v[i, j, k]
            self.row_used[j] &= ~bit
            self.col_used[k] &= ~bit
        return False


def fair_search(v, notion, weak, symmetry, prune, agent_suffix, totals):
    cdef _FairCtx ctx = _FairCtx()
    cdef int n = v.shape[0]
    ctx.v = v
    ctx.agent_suffix = agent_suffix
    ctx.totals = totals
    ctx.n = n
    ctx.ncells = n * n
    ctx.notion = notion
    ctx.weak = weak
    ctx.symmetry = symmetry
    ctx.prune = prune
    grid = np.full(n * n, -1, dtype=np.int16)
    ctx.grid = grid
    ctx.row_used = np.zeros(n, dtype=np.uint64)
    ctx.col_used = np.zeros(n, dtype=np.uint64)
    ctx.utils = np.zeros(n, dtype=np.int64)
    ctx.pair_vals = np.zeros((n, n), dtype=np.int64)
    ctx.theta = np.zeros((n, n), dtype=np.int64)
    if ctx.rec(0, -1):
        return grid.reshape(n, n).copy()
    return None


def color_edges(n_left, n_right, eu, ev, num_colors):
    cdef int[::1] eu_v = eu
    cdef int[::1] ev_v = ev
    cdef int m = eu_v.shape[0]
    cdef int C = num_colors
    at_l_arr = np.full(n_left * C, -1, dtype=np.int32)
    at_r_arr = np.full(n_right * C, -1, dtype=np.int32)
    color_arr = np.full(m, -1, dtype=np.int32)
    path_arr = np.empty(2 * (n_left + n_right) + 4, dtype=np.int32)
    cdef int[::1] at_l = at_l_arr
    cdef int[::1] at_r = at_r_arr
    cdef int[::1] color = color_arr
    cdef int[::1] path = path_arr
    cdef int e, u, w, c, alpha, beta, cur, want, ee, plen, idx, cc, nc, cu, cw
    cdef bint on_right

    for e in range(m):
        u = eu_v[e]
        w = ev_v[e]
        c = -1
        for cc in range(C):
            if at_l[u * C + cc] == -1 and at_r[w * C + cc] == -1:
                c = cc
                break
        if c == -1:
            alpha = -1
            beta = -1
            for cc in range(C):
                if alpha == -1 and at_l[u * C + cc] == -1:
                    alpha = cc
                if beta == -1 and at_r[w * C + cc] == -1:
                    beta = cc
            if alpha == -1 or beta == -1:
                raise ValueError("degree exceeds the number of colors")
            # alpha/beta alternating path from w; parity keeps it away from u
            plen = 0
            cur = w
            on_right = True
            want = alpha
            while True:
                if on_right:
                    ee = at_r[cur * C + want]
                else:
                    ee = at_l[cur * C + want]
                if ee == -1:
                    break
                path[plen] = ee
                plen += 1
                if on_right:
                    cur = eu_v[ee]
                else:
                    cur = ev_v[ee]
                on_right = not on_right
                want = beta if want == alpha else alpha
            for idx in range(plen):
                ee = path[idx]
                cu = eu_v[ee]
                cw = ev_v[ee]
                cc = color[ee]
                at_l[cu * C + cc] = -1
                at_r[cw * C + cc] = -1
            for idx in range(plen):
                ee = path[idx]
                cc = color[ee]
                nc = beta if cc == alpha else alpha
                color[ee] = nc
                cu = eu_v[ee]
                cw = ev_v[ee]
                at_l[cu * C + nc] = ee
                at_r[cw * C + nc] = ee
            c = alpha
        color[e] = c
        at_l[u * C + c] = e
        at_r[w * C + c] = e
    return color_arr
