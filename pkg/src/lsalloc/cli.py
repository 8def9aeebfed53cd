"""Command-line front end.

Subcommands: lp, solve, exact, fair-exists, check, extend, generate,
witness, bench.  Instances and allocations travel as JSON (see the README
for the schemas); results go to stdout, diagnostics to stderr.  Exit codes:
0 success, 1 usage error, 2 solver error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import reductions
from .complete_solver import solve_complete_approx
from .config_lp import LpIterationLimit, solve_configuration_lp
from .extension import ExtensionPreconditionError, extend
from .fpt import OracleLimitError, solve_fpt_value
from .instance import (
    EFFICIENCY_NOTIONS,
    FAIRNESS_NOTIONS,
    Allocation,
    Instance,
    efficiency_check,
    fairness_check,
    is_feasible,
    uniform_random_instance,
)
from .oracle import exact_umax_emax, exists_fair_complete
from .reductions import DegenerateConstructionError
from .rounding import round_derandomized, round_randomized


class UsageError(ValueError):
    pass


_SOLVER_ERRORS = (
    OracleLimitError,
    LpIterationLimit,
    ExtensionPreconditionError,
    DegenerateConstructionError,
)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_instance(path: str) -> Instance:
    try:
        return Instance.from_json(_read_text(path))
    except (json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad instance file {path}: {exc}") from exc


def _load_allocation(path: str) -> Allocation:
    try:
        return Allocation.from_json(_read_text(path))
    except (json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad allocation file {path}: {exc}") from exc


def _alloc_payload(alloc: Allocation) -> dict:
    feasible = is_feasible(alloc)
    assert feasible, "refusing to emit an infeasible allocation"
    return json.loads(alloc.to_json())


def _round9(x: float) -> float:
    return float(f"{float(x):.9f}")


def _ratio(value: float, bound: float):
    return None if bound <= 0 else _round9(value / bound)


def _cmd_lp(args) -> dict:
    inst = _load_instance(args.instance)
    sol, _ = solve_configuration_lp(
        inst, epsilon=args.epsilon, time_limit=args.time_limit
    )
    return {
        "lp_bound": _round9(sol.objective),
        "columns": len(sol.columns),
        "iterations": sol.pricing_rounds,
    }


def _cmd_solve(args) -> dict:
    inst = _load_instance(args.instance)
    if args.algorithm == "exact":
        return _run_exact(inst, args.objective, args.mode, args.limit_n)
    if args.algorithm == "fpt":
        res = solve_fpt_value(inst, mode=args.mode, delta=args.delta, seed=args.seed or 0)
        return {
            "allocation": _alloc_payload(res.allocation),
            "value": res.value,
            "mode": res.mode,
            "delta": res.delta,
            "deterministic": res.deterministic,
        }

    derandomize = args.seed is None or args.derandomize
    sol, _ = solve_configuration_lp(
        inst, epsilon=args.epsilon, time_limit=args.time_limit
    )
    if args.algorithm == "partial-approx":
        if derandomize:
            outcome = round_derandomized(inst, sol)
        else:
            outcome = round_randomized(inst, sol, args.seed)
        payload = {
            "allocation": _alloc_payload(outcome.allocation),
            "welfare": outcome.welfare,
            "lp_bound": _round9(sol.objective),
            "ratio": _ratio(outcome.welfare, sol.objective),
        }
        if outcome.seed is not None:
            payload["seed"] = outcome.seed
        return payload

    res = solve_complete_approx(
        inst, seed=args.seed, derandomize=derandomize, sol=sol
    )
    payload = {
        "allocation": _alloc_payload(res.allocation),
        "welfare": res.welfare,
        "lp_bound": _round9(res.lp_bound),
        "ratio": _ratio(res.welfare, res.lp_bound),
        "block_chosen": res.block_chosen,
    }
    if res.seed is not None:
        payload["seed"] = res.seed
    return payload


def _run_exact(inst, objective, mode, limit) -> dict:
    alloc, value = exact_umax_emax(inst, objective, mode, limit=limit)
    return {
        "allocation": _alloc_payload(alloc),
        "value": value,
        "objective": objective,
        "mode": mode,
    }


def _cmd_exact(args) -> dict:
    return _run_exact(_load_instance(args.instance), args.objective, args.mode, args.limit_n)


def _cmd_fair_exists(args) -> dict:
    inst = _load_instance(args.instance)
    kwargs = {} if args.limit_n is None else {"limit": args.limit_n}
    exists, witness = exists_fair_complete(inst, args.notion, weak=args.weak, **kwargs)
    return {
        "notion": args.notion,
        "weak": args.weak,
        "exists": exists,
        "witness": _alloc_payload(witness) if witness is not None else None,
    }


def _cmd_check(args) -> dict:
    inst = _load_instance(args.instance)
    alloc = _load_allocation(args.allocation)
    if not is_feasible(alloc):
        raise UsageError("allocation is infeasible")
    if args.notion in FAIRNESS_NOTIONS:
        ok = fairness_check(inst, alloc, args.notion, weak=args.weak)
    elif args.notion in EFFICIENCY_NOTIONS:
        kwargs = {} if args.limit_n is None else {"limit": args.limit_n}
        ok = efficiency_check(inst, alloc, args.notion, **kwargs)
    else:
        raise UsageError(f"unknown notion {args.notion!r}")
    return {"notion": args.notion, "satisfied": ok}


def _cmd_extend(args) -> dict:
    inst = _load_instance(args.instance)
    alloc = _load_allocation(args.allocation)
    if not is_feasible(alloc):
        raise UsageError("allocation is infeasible")
    result = extend(inst, alloc)
    return _alloc_payload(result)


def _params(args) -> dict:
    try:
        data = json.loads(_read_text(args.params))
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad params file: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("params file must hold a JSON object")
    return data


def _build_family(family: str, params: dict):
    try:
        if family == "pls":
            return reductions.from_partial_latin_square(
                Allocation.from_json(json.dumps(params))
            )
        if family == "3sat":
            formula = reductions.Formula3SAT(params["num_vars"], params["clauses"])
            return reductions.from_3sat(formula, params.get("variant", "partial"))
        if family == "maxmin":
            return reductions.from_maxmin(reductions.MaxMinInstance(params["utilities"]))
        if family == "3partition":
            tp = reductions.ThreePartitionInstance(
                params["m"], params["sizes"], params["target"]
            )
            return reductions.from_3partition(tp)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DegenerateConstructionError):
            raise
        raise UsageError(f"bad {family} parameters: {exc}") from exc
    raise UsageError(f"unknown family {family!r}")


def _cmd_generate(args) -> dict:
    inst = _build_family(args.family, _params(args))
    return json.loads(inst.to_json())


def _cmd_witness(args) -> dict:
    params = _params(args)
    try:
        if args.family == "3sat":
            formula = reductions.Formula3SAT(params["num_vars"], params["clauses"])
            alloc = reductions.assignment_to_allocation(
                formula, params["truth"], params.get("variant", "partial")
            )
        elif args.family == "maxmin":
            mm = reductions.MaxMinInstance(params["utilities"])
            partition = [[j - 1 for j in part] for part in params["partition"]]
            alloc = reductions.partition_to_allocation(mm, partition)
        elif args.family == "3partition":
            tp = reductions.ThreePartitionInstance(
                params["m"], params["sizes"], params["target"]
            )
            parts = [[j - 1 for j in part] for part in params["parts"]]
            alloc = reductions.partition_to_fair_allocation(tp, parts)
        else:
            raise UsageError(f"family {args.family!r} has no witness map")
    except (KeyError, TypeError) as exc:
        raise UsageError(f"bad {args.family} witness parameters: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, _SOLVER_ERRORS):
            raise
        raise UsageError(f"bad {args.family} witness parameters: {exc}") from exc
    return _alloc_payload(alloc)


def _bench_instances(entry: dict):
    name = entry.get("name")
    if name == "diagonal-pair":
        values = np.zeros((2, 2, 2), dtype=np.int64)
        values[0, 0, 0] = 1
        values[1, 1, 1] = 1
        yield name, 2, 0, Instance(values)
    elif name == "shared-diagonal":
        values = np.zeros((2, 2, 2), dtype=np.int64)
        values[:, 0, 0] = 1
        values[:, 1, 1] = 1
        yield name, 2, 0, Instance(values)
    elif name == "uniform":
        n = int(entry["n"])
        vmax = int(entry.get("vmax", 9))
        for seed in entry.get("seeds", [0]):
            rng = np.random.default_rng(int(seed))
            yield name, n, int(seed), uniform_random_instance(n, vmax, rng)
    else:
        raise UsageError(f"unknown bench family {name!r}")


def _bench_oracle(inst, mode):
    try:
        _, value = exact_umax_emax(inst, "umax", mode)
        return value
    except OracleLimitError:
        return None


def _cmd_bench(args) -> str:
    config = _params(args)
    algorithms = config.get("algorithms", ["exact", "partial-approx", "complete-approx", "fpt"])
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["family", "n", "seed", "algorithm", "value", "lp_bound", "oracle_value", "ratio", "wall_ms"]
    )
    for entry in config.get("families", []):
        for family, n, seed, inst in _bench_instances(entry):
            for algorithm in algorithms:
                start = time.perf_counter()
                lp_bound = ""
                oracle_mode = "partial"
                if algorithm == "exact":
                    try:
                        _, value = exact_umax_emax(inst, "umax", "partial")
                    except OracleLimitError:
                        value = ""
                elif algorithm == "partial-approx":
                    sol, _ = solve_configuration_lp(inst)
                    value = round_derandomized(inst, sol).welfare
                    lp_bound = _round9(sol.objective)
                elif algorithm == "complete-approx":
                    res = solve_complete_approx(inst, seed=seed, derandomize=True)
                    value = res.welfare
                    lp_bound = _round9(res.lp_bound)
                    oracle_mode = "complete"
                elif algorithm == "fpt":
                    value = solve_fpt_value(inst, mode="partial", seed=seed).value
                else:
                    raise UsageError(f"unknown algorithm {algorithm!r}")
                wall_ms = "" if args.no_timing else int(1000 * (time.perf_counter() - start))
                oracle_value = _bench_oracle(inst, oracle_mode) if value != "" else None
                if oracle_value is None:
                    print(
                        f"note: oracle unavailable for {family} n={n}",
                        file=sys.stderr,
                    )
                    oracle_txt, ratio = "", ""
                elif oracle_value == 0:
                    oracle_txt, ratio = 0, 1.0 if value == 0 else ""
                else:
                    oracle_txt, ratio = oracle_value, _round9(value / oracle_value)
                writer.writerow(
                    [family, n, seed, algorithm, value, lp_bound, oracle_txt, ratio, wall_ms]
                )
    return out.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lsalloc",
        description="Solvers and checkers for allocation under a Latin square constraint",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="reserved; the current implementation is single-threaded",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_instance(p):
        p.add_argument("--instance", required=True, help="instance JSON path or -")

    p = sub.add_parser("lp", help="configuration LP bound")
    add_instance(p)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--time-limit", type=float, default=None, help="seconds, LP stage only")

    p = sub.add_parser("solve", help="run a solver")
    add_instance(p)
    p.add_argument(
        "--algorithm",
        required=True,
        choices=["partial-approx", "complete-approx", "fpt", "exact"],
    )
    p.add_argument("--objective", choices=["umax", "emax"], default="umax")
    p.add_argument("--mode", choices=["partial", "complete"], default="partial")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--derandomize", action="store_true")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--limit-n", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None)

    p = sub.add_parser("exact", help="exact optimum by enumeration")
    add_instance(p)
    p.add_argument("--objective", choices=["umax", "emax"], required=True)
    p.add_argument("--mode", choices=["partial", "complete"], required=True)
    p.add_argument("--limit-n", type=int, default=None)

    p = sub.add_parser("fair-exists", help="search complete allocations for a fairness notion")
    add_instance(p)
    p.add_argument("--notion", required=True, choices=list(FAIRNESS_NOTIONS))
    p.add_argument("--weak", action="store_true")
    p.add_argument("--limit-n", type=int, default=None)

    p = sub.add_parser("check", help="test a notion on a given allocation")
    add_instance(p)
    p.add_argument("--in", dest="allocation", required=True, help="allocation JSON path or -")
    p.add_argument(
        "--notion", required=True, choices=list(FAIRNESS_NOTIONS) + list(EFFICIENCY_NOTIONS)
    )
    p.add_argument("--weak", action="store_true")
    p.add_argument("--limit-n", type=int, default=None)

    p = sub.add_parser("extend", help="complete a partial allocation")
    add_instance(p)
    p.add_argument("--in", dest="allocation", required=True)

    p = sub.add_parser("generate", help="build a hardness-family instance")
    p.add_argument("--family", required=True, choices=["pls", "3sat", "maxmin", "3partition"])
    p.add_argument("--params", required=True, help="parameter JSON path or -")

    p = sub.add_parser("witness", help="map a certificate to an allocation")
    p.add_argument("--family", required=True, choices=["3sat", "maxmin", "3partition"])
    p.add_argument("--params", required=True)

    p = sub.add_parser("bench", help="CSV benchmark over instance families")
    p.add_argument("--config", dest="params", required=True, help="config JSON path or -")
    p.add_argument("--no-timing", action="store_true", help="omit wall_ms for byte-identical reruns")

    return parser


_HANDLERS = {
    "lp": _cmd_lp,
    "solve": _cmd_solve,
    "exact": _cmd_exact,
    "fair-exists": _cmd_fair_exists,
    "check": _cmd_check,
    "extend": _cmd_extend,
    "generate": _cmd_generate,
    "witness": _cmd_witness,
}


def _emit_error(message: str, kind: str) -> None:
    print(json.dumps({"error": message, "kind": kind}), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    try:
        if args.command == "bench":
            sys.stdout.write(_cmd_bench(args))
        else:
            payload = _HANDLERS[args.command](args)
            print(json.dumps(payload))
        return 0
    except UsageError as exc:
        _emit_error(str(exc), "usage")
        return 1
    except _SOLVER_ERRORS as exc:
        _emit_error(str(exc), "solver")
        return 2
    except (ValueError, RuntimeError) as exc:
        _emit_error(str(exc), "solver")
        return 2


if __name__ == "__main__":
    sys.exit(main())
