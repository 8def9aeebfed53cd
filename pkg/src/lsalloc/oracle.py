"""Ground-truth engines at small orders.

Exact optima (re-exported from the enumeration solver under a uniform
interface), exhaustive fairness-existence search over complete allocations,
and the matching-based check for positive minimum utility on binary
instances.
"""

from __future__ import annotations

from . import _kernels
from .fpt import OracleLimitError, solve_exact_enumeration
from .instance import FAIRNESS_NOTIONS, Allocation, Instance, fairness_check

DEFAULT_FAIR_LIMIT = 5


def exact_umax_emax(
    inst: Instance,
    objective: str = "umax",
    mode: str = "partial",
    limit: int | None = None,
    prune: bool = True,
    backend=None,
):
    """(Allocation, value) for the exact optimum; see solve_exact_enumeration."""
    return solve_exact_enumeration(inst, objective, mode, limit=limit, prune=prune, backend=backend)


def exists_fair_complete(
    inst: Instance,
    notion: str,
    weak: bool = False,
    limit: int = DEFAULT_FAIR_LIMIT,
    prune: bool = True,
    backend=None,
):
    """Search all complete allocations for one satisfying the notion.

    Returns (exists, witness-or-None).  Identical valuations make agents
    interchangeable, enabling symmetry breaking in the search.
    """
    if notion not in FAIRNESS_NOTIONS:
        raise ValueError(f"unknown fairness notion {notion!r}")
    if inst.n > limit:
        raise OracleLimitError(
            f"fairness search limited to n <= {limit} (got {inst.n})"
        )
    grid = _kernels.fair_search(
        inst.values,
        notion,
        weak=weak,
        symmetry=inst.is_identical(),
        prune=prune,
        backend=backend,
    )
    if grid is None:
        return False, None
    witness = Allocation(grid)
    assert witness.is_complete
    assert fairness_check(inst, witness, notion, weak=weak)
    return True, witness


def binary_partial_emax_positive(inst: Instance) -> bool:
    """For binary values: can every agent get one valued cell?  Equivalent to
    an agent-side perfect matching between agents and cells they value, i.e.
    to the partial minimum utility being at least 1."""
    if not inst.is_binary():
        raise ValueError("check requires binary values")
    n = inst.n
    # Kuhn's augmenting paths, agents on the left, cells on the right
    adj = [
        [(j, k) for j in range(n) for k in range(n) if inst.values[i, j, k] == 1]
        for i in range(n)
    ]
    match: dict = {}

    def try_agent(i, visited):
        for cell in adj[i]:
            if cell in visited:
                continue
            visited.add(cell)
            if cell not in match or try_agent(match[cell], visited):
                match[cell] = i
                return True
        return False

    for i in range(n):
        if not try_agent(i, set()):
            return False
    return True
