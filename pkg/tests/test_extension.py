import numpy as np
import pytest

from lsalloc.extension import (
    ExtensionPreconditionError,
    extend,
    extend_allocation,
    rectangularize,
)
from lsalloc.instance import Allocation, Instance, is_feasible
from naive_reference import random_feasible_allocation, random_latin_rectangle


def test_empty_input_yields_latin_square():
    for n in (1, 2, 3, 7, 11):
        out = extend_allocation(Allocation.empty(n))
        assert out.is_complete
        assert is_feasible(out)


def test_forced_order2_completion():
    # only two order-2 Latin squares exist; fixing one cell forces the rest
    a = Allocation.from_triples(2, [(0, 0, 0)])
    out = extend_allocation(a)
    assert out.grid.tolist() == [[0, 1], [1, 0]]


def test_extend_checks_order():
    inst = Instance(np.zeros((3, 3, 3), dtype=np.int64))
    with pytest.raises(ValueError):
        extend(inst, Allocation.empty(2))


def test_random_rectangles_extend():
    rng = np.random.default_rng(123)
    for _ in range(150):
        n = int(rng.integers(2, 13))
        m = int(rng.integers(0, n + 1))
        r = int(rng.integers(0, n - m + 1))
        a = random_latin_rectangle(n, m, r, rng)
        assert is_feasible(a)
        out = extend_allocation(a)
        assert out.is_complete
        assert is_feasible(out)
        assert out.contains(a)


def test_rectangles_with_holes_extend():
    rng = np.random.default_rng(321)
    for _ in range(60):
        n = int(rng.integers(3, 10))
        m = int(rng.integers(1, n))
        r = int(rng.integers(1, n - m + 1))
        full = random_latin_rectangle(n, m, r, rng)
        grid = full.grid.copy()
        for j in range(m):
            for k in range(r):
                if rng.random() < 0.4:
                    grid[j, k] = -1
        a = Allocation(grid)
        out = extend_allocation(a)
        assert out.is_complete and is_feasible(out) and out.contains(a)


def test_precondition_error_reports_sets():
    # diagonal occupancy touches every item and round
    n = 4
    a = Allocation.from_triples(n, [(0, j, j) for j in range(n)][:3] + [(1, 3, 3)])
    with pytest.raises(ExtensionPreconditionError) as err:
        extend_allocation(a)
    assert err.value.items == frozenset(range(4))
    assert err.value.rounds == frozenset(range(4))


def test_scattered_allocation_within_budget_extends():
    # occupied items/rounds need not be the leading ones
    a = Allocation.from_triples(6, [(0, 4, 5), (1, 4, 1), (2, 2, 5)])
    out = extend_allocation(a)
    assert out.is_complete and is_feasible(out) and out.contains(a)


def test_rectangularize_identity():
    a = random_latin_rectangle(5, 2, 2, np.random.default_rng(9))
    rect, item_perm, round_perm = rectangularize(a)
    assert item_perm == tuple(range(5))
    assert round_perm == tuple(range(5))
    assert rect.grid.tolist() == a.grid.tolist()


def test_rectangularize_moves_occupied_first():
    a = Allocation.from_triples(3, [(0, 1, 0), (1, 2, 2)])
    rect, item_perm, round_perm = rectangularize(a)
    # occupied items {1,2} -> {0,1}; occupied rounds {0,2} -> {0,1}
    assert item_perm[1] == 0 and item_perm[2] == 1
    assert round_perm[0] == 0 and round_perm[2] == 1
    occupied = {(j, k) for j in range(3) for k in range(3) if rect.grid[j, k] >= 0}
    assert occupied <= {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_rectangularize_round_trip():
    rng = np.random.default_rng(17)
    for _ in range(20):
        a = random_feasible_allocation(5, rng, density=0.3)
        rect, item_perm, round_perm = rectangularize(a)
        back = np.full((5, 5), -1, dtype=np.int16)
        for agent, j, k in rect.triples():
            back[item_perm.index(j), round_perm.index(k)] = agent
        assert back.tolist() == a.grid.tolist()
