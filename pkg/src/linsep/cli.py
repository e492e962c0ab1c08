"""Command-line frontend: design schemes, verify solutions, tabulate bounds.

Subcommands:
    design  Build a coding solution for one instance and emit it as JSON.
    curve   Emit CSV sweeps of rate against capacity, demands, or servers.
    bound   Report lower bounds, the achieved rate, and the gap for one instance.
    cover   Compute a multi-level covering number with a verifiable certificate.
    verify  Re-check a solution file against a demand file.
    fuzz    Randomized end-to-end trials over a parameter grid, as JSON lines.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .bounds import (
    bound_report,
    covering_certificate,
    covering_search,
    entropy_lower_bound,
    gap_guarantee,
    verify_covering_certificate,
)
from .errors import ContractError, LinsepError
from .gf import FieldSpec, smallest_prime_above
from .matfq import MatrixFq, select_columns
from .model import (
    CodingSolution,
    DemandMatrix,
    ProblemInstance,
    TaskAssignment,
    load_solution,
    normalize_demand,
    parse_demand_text,
    random_full_rank_demand,
    solution_to_json,
    verify_solution,
)
from .scheme1 import partition_rate, partitioned_solution
from .scheme2 import build_scheme2, scheme2_rate
from .sim import Workload, fuzz, run
from .tradeoff import scheme_gamma, tradeoff_curve

__all__ = ["main", "build_parser"]


# --- small helpers ----------------------------------------------------------


def _emit(text: str, out: str | None) -> None:
    """Write ``text`` to ``out``, or to stdout when ``out`` is None or '-'."""
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_json(payload: dict[str, Any], out: str | None) -> None:
    _emit(json.dumps(payload, indent=2) + "\n", out)


def _write_csv(header: Sequence[str], rows: Sequence[Sequence[Any]], out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    _emit(buf.getvalue(), out)


def _fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _parse_int_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


# --- scheme selection -------------------------------------------------------


def _balanced_widths(total: int, parts: int) -> list[int]:
    """Split ``total`` columns into ``parts`` contiguous blocks, sizes within 1."""
    base, extra = divmod(total, parts)
    return [base + 1 if i < extra else base for i in range(parts)]


def _hybrid_formula_rate(
    num_tasks: int, num_demands: int, capacity: int, parts: int
) -> int | None:
    """Advertised rate of the column-split hybrid, or None when out of regime.

    Each block of width w is served by the dense-regime construction, which
    needs 2*capacity >= w; the block's demand count is at most min(demands, w).
    """
    widths = _balanced_widths(num_tasks, parts)
    if widths[-1] <= 0:
        return None
    total = 0
    for width in widths:
        if 2 * capacity < width:
            return None
        total += scheme2_rate(width, min(num_demands, width), min(capacity, width))
    return total


def _auto_choice(num_tasks: int, num_demands: int, capacity: int) -> tuple[str, int | None]:
    """Pick the scheme with the smallest advertised rate; ties keep scheme 1.

    Returns ("s1", None), ("s2", None), or ("hybrid", parts).
    """
    best_rate = partition_rate(num_tasks, num_demands, capacity)
    choice: tuple[str, int | None] = ("s1", None)
    if 2 * capacity >= num_tasks:
        s2 = scheme2_rate(num_tasks, num_demands, capacity)
        if s2 < best_rate:
            best_rate, choice = s2, ("s2", None)
    for parts in range(2, num_tasks + 1):
        rate = _hybrid_formula_rate(num_tasks, num_demands, capacity, parts)
        if rate is not None and rate < best_rate:
            best_rate, choice = rate, ("hybrid", parts)
    return choice


def hybrid_solution(demand: DemandMatrix, capacity: int, parts: int) -> CodingSolution:
    """Split columns into balanced blocks and run the dense-regime scheme on each.

    Rank-deficient blocks are reduced to a row basis before construction and the
    removed rows are recovered inside the stitched decoding matrix, so the output
    factors the original demand exactly.

    Raises:
        ContractError: if ``parts`` is not in ``[2, num_tasks]`` or a block falls
            outside the dense regime (``2 * capacity < width``).
    """
    k = demand.num_tasks
    spec = demand.spec
    if not 2 <= parts <= k:
        raise ContractError(f"hybrid split count {parts} not in [2, {k}]")
    sets: list[set[int]] = []
    encode_rows: list[np.ndarray] = []
    row_server: list[int] = []
    decode_blocks: list[np.ndarray] = []
    start = 0
    for width in _balanced_widths(k, parts):
        columns = list(range(start, start + width))
        start += width
        if not columns:
            continue
        sub = select_columns(demand.matrix, columns)
        if sub.is_zero():
            continue
        if 2 * capacity < width:
            raise ContractError(
                f"hybrid block of {width} columns needs capacity >= {-(-width // 2)}"
            )
        kept, recovery = normalize_demand(sub)
        block = build_scheme2(kept, min(capacity, width))
        offset = len(sets)
        for local in block.assignment.sets:
            sets.append({columns[i] for i in local})
        for r in range(block.encode.rows):
            row = np.zeros(k, dtype=np.int64)
            row[columns] = block.encode.row(r)
            encode_rows.append(row)
        row_server.extend(offset + s for s in block.row_server)
        decode_blocks.append((recovery @ block.decode).array)
    encode = MatrixFq._wrap(np.array(encode_rows, dtype=np.int64), spec)
    decode = MatrixFq._wrap(np.ascontiguousarray(np.hstack(decode_blocks)), spec)
    return CodingSolution(
        assignment=TaskAssignment.from_sets(sets, k),
        encode=encode,
        row_server=tuple(row_server),
        decode=decode,
    )


def _parse_scheme_flag(scheme: str, gamma_flag: int | None) -> tuple[str, int | None]:
    """Normalize --scheme/--gamma into (name, parameter)."""
    name, _, param = scheme.partition(":")
    parameter: int | None = None
    if param:
        try:
            parameter = int(param)
        except ValueError as exc:
            raise ContractError(f"bad scheme parameter in {scheme!r}") from exc
    if name == "gamma":
        if gamma_flag is not None:
            if parameter is not None and parameter != gamma_flag:
                raise ContractError("--gamma disagrees with the --scheme parameter")
            parameter = gamma_flag
        if parameter is None:
            raise ContractError("scheme 'gamma' needs --gamma or 'gamma:<g>'")
    elif name == "hybrid":
        if parameter is None:
            parameter = 2
    elif name in {"auto", "s1", "s2"}:
        if parameter is not None:
            raise ContractError(f"scheme {name!r} takes no parameter")
        if gamma_flag is not None and name != "auto":
            raise ContractError("--gamma only applies to --scheme gamma")
    else:
        raise ContractError(
            f"unknown scheme {scheme!r}; expected auto, s1, s2, gamma:<g>, or hybrid[:<t>]"
        )
    return name, parameter


# --- design -----------------------------------------------------------------


def _load_or_sample_demand(args: argparse.Namespace) -> tuple[ProblemInstance, DemandMatrix]:
    if args.capacity is None:
        raise ContractError("design needs -M")
    if args.demand is not None:
        raw = parse_demand_text(Path(args.demand).read_text())
        for flag, actual, label in (
            (args.num_tasks, raw.cols, "-K"),
            (args.num_demands, raw.rows, "-L"),
            (args.modulus, raw.spec.q, "-q"),
        ):
            if flag is not None and flag != actual:
                raise ContractError(f"{label} {flag} disagrees with the demand file's {actual}")
        demand = DemandMatrix(raw)
        inst = ProblemInstance(raw.cols, raw.rows, args.capacity, raw.spec)
        return inst, demand
    if args.num_tasks is None or args.num_demands is None:
        raise ContractError("design needs -K and -L when no --demand file is given")
    modulus = args.modulus if args.modulus is not None else smallest_prime_above(args.num_tasks)
    inst = ProblemInstance(args.num_tasks, args.num_demands, args.capacity, FieldSpec(modulus))
    rng = np.random.default_rng(args.seed)
    return inst, random_full_rank_demand(inst, rng)


def _build_solution(
    demand: DemandMatrix, inst: ProblemInstance, name: str, parameter: int | None
) -> tuple[CodingSolution, str, int | None]:
    if name == "auto":
        name, parameter = _auto_choice(inst.num_tasks, inst.num_demands, inst.capacity)
    if name == "s1":
        return partitioned_solution(demand, inst.capacity), name, None
    if name == "s2":
        return build_scheme2(demand, inst.capacity), name, None
    if name == "gamma":
        assert parameter is not None
        return scheme_gamma(demand, inst.capacity, parameter), name, parameter
    assert name == "hybrid" and parameter is not None
    return hybrid_solution(demand, inst.capacity, parameter), name, parameter


def cmd_design(args: argparse.Namespace) -> int:
    inst, demand = _load_or_sample_demand(args)
    name, parameter = _parse_scheme_flag(args.scheme, args.gamma)
    solution, name, parameter = _build_solution(demand, inst, name, parameter)
    report = verify_solution(inst, demand, solution)
    payload = solution_to_json(inst, solution)
    payload["scheme"] = name
    if name == "gamma":
        payload["gamma"] = parameter
    if name == "hybrid":
        payload["parts"] = parameter
    payload["verified"] = report.passed
    if report.issues:
        payload["issues"] = list(report.issues)
    _emit_json(payload, args.out)
    return 0 if report.passed else 1


# --- curve ------------------------------------------------------------------


def _entropy_header(moduli: Sequence[int]) -> list[str]:
    return [f"entropy_q{q}" for q in moduli]


def _entropy_cells(num_tasks: int, num_demands: int, capacity: int, moduli: Sequence[int]) -> list[str]:
    return [
        f"{float(entropy_lower_bound(num_tasks, num_demands, capacity, q)):.10g}"
        for q in moduli
    ]


def cmd_curve(args: argparse.Namespace) -> int:
    k = args.num_tasks
    if k is None:
        raise ContractError("curve needs -K")
    if args.mode == "R-vs-N":
        if args.num_demands is None or args.capacity is None:
            raise ContractError("curve R-vs-N needs -L and -M")
        header = ["group_size", "servers", "rate"]
        rows = [
            [point.group_size, point.servers, point.rate]
            for point in tradeoff_curve(k, args.num_demands, args.capacity)
        ]
        _write_csv(header, rows, args.out)
        return 0
    moduli = args.modulus if args.modulus is not None else [smallest_prime_above(k)]
    if args.mode == "R-vs-M":
        if args.num_demands is None:
            raise ContractError("curve R-vs-M needs -L")
        n_demands = args.num_demands
        header = ["M", "R_scheme1", "R_scheme2", *_entropy_header(moduli)]
        rows = []
        for capacity in range(1, k + 1):
            s2 = scheme2_rate(k, n_demands, capacity) if 2 * capacity >= k else ""
            rows.append(
                [
                    capacity,
                    partition_rate(k, n_demands, capacity),
                    s2,
                    *_entropy_cells(k, n_demands, capacity, moduli),
                ]
            )
        _write_csv(header, rows, args.out)
        return 0
    # R-vs-L
    if args.capacity is None:
        raise ContractError("curve R-vs-L needs -M")
    capacity = args.capacity
    header = ["L", "R_scheme1", "R_scheme2", *_entropy_header(moduli)]
    rows = []
    for n_demands in range(1, k + 1):
        s2 = scheme2_rate(k, n_demands, capacity) if 2 * capacity >= k else ""
        rows.append(
            [
                n_demands,
                partition_rate(k, n_demands, capacity),
                s2,
                *_entropy_cells(k, n_demands, capacity, moduli),
            ]
        )
    _write_csv(header, rows, args.out)
    return 0


# --- bound / cover ----------------------------------------------------------


def cmd_bound(args: argparse.Namespace) -> int:
    k, n_demands, capacity = args.num_tasks, args.num_demands, args.capacity
    if k is None or n_demands is None or capacity is None:
        raise ContractError("bound needs -K, -L, and -M")
    modulus = args.modulus if args.modulus is not None else smallest_prime_above(k)
    report = bound_report(
        k, n_demands, capacity, modulus, covering_budget_ms=args.budget_ms
    )
    payload: dict[str, Any] = {
        "K": k,
        "L": n_demands,
        "M": capacity,
        "q": modulus,
        "entropy_lower_bound": float(report.lower_entropy),
        "entropy_lower_bound_exact": _fraction_str(report.lower_entropy),
        "scheme1_rate": report.achievable_scheme1,
        "gap": float(report.gap),
        "gap_exact": _fraction_str(report.gap),
        "gap_guarantee": gap_guarantee(k, n_demands, capacity, modulus),
    }
    covering = report.lower_covering
    if isinstance(covering, int):
        payload["covering_number"] = covering
    else:
        payload["covering_number"] = None
        payload["covering_bracket"] = [covering.lower, covering.upper]
    _emit_json(payload, args.out)
    return 0


def cmd_cover(args: argparse.Namespace) -> int:
    search = covering_search(
        args.points, args.block_size, args.level, budget_ms=args.budget_ms
    )
    if not search.resolved:
        payload: dict[str, Any] = {
            "v": args.points,
            "k": args.block_size,
            "m": args.level,
            "omega": None,
            "lower": search.lower,
            "upper": search.upper,
        }
        _emit_json(payload, args.out)
        return 0
    certificate = covering_certificate(search)
    certificate["verified"] = verify_covering_certificate(certificate)
    _emit_json(certificate, args.out)
    return 0 if certificate["verified"] else 1


# --- verify / fuzz ----------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    inst, solution = load_solution(Path(args.solution).read_text())
    raw = parse_demand_text(Path(args.demand).read_text())
    demand = DemandMatrix(raw)
    report = verify_solution(inst, demand, solution)
    issues = list(report.issues)
    decoded_ok = False
    if report.passed:
        try:
            workload = Workload.generate(inst.field, inst.num_tasks, args.seed)
            decoded_ok = run(inst, demand, solution, workload).all_exact
            if not decoded_ok:
                issues.append("simulated decode differs from the demanded combinations")
        except LinsepError as exc:
            issues.append(f"simulation rejected the solution: {exc}")
    passed = report.passed and decoded_ok
    payload = {
        "verified": passed,
        "rate": report.rate,
        "servers": report.servers,
        "issues": issues,
    }
    _emit_json(payload, args.out)
    return 0 if passed else 1


def cmd_fuzz(args: argparse.Namespace) -> int:
    max_tasks = args.num_tasks
    if max_tasks is None:
        raise ContractError("fuzz needs -K (largest task count in the grid)")
    moduli = args.modulus if args.modulus is not None else [2, 3, 5]
    grid = [
        ProblemInstance(k, n_demands, capacity, FieldSpec(q))
        for k in range(1, max_tasks + 1)
        for n_demands in range(1, k + 1)
        for capacity in range(1, k + 1)
        for q in moduli
    ]
    report = fuzz(grid, trials=args.trials, seed=args.seed)
    _emit(report.to_jsonl(), args.out)
    failed = len(report.failures)
    print(
        f"fuzz: {len(report.records) - failed}/{len(report.records)} trials passed",
        file=sys.stderr,
    )
    return 0 if report.all_passed else 1


# --- parser -----------------------------------------------------------------


def _add_instance_flags(parser: argparse.ArgumentParser, *, list_modulus: bool = False) -> None:
    parser.add_argument("-K", dest="num_tasks", type=int, help="number of tasks")
    parser.add_argument("-L", dest="num_demands", type=int, help="number of demanded combinations")
    parser.add_argument("-M", dest="capacity", type=int, help="tasks per server")
    if list_modulus:
        parser.add_argument(
            "-q",
            dest="modulus",
            type=_parse_int_list,
            help="comma-separated prime moduli (default: smallest prime above K)",
        )
    else:
        parser.add_argument(
            "-q", dest="modulus", type=int, help="prime modulus (default: smallest prime above K)"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linsep",
        description="Design, verify, and bound coded schemes for distributed "
        "evaluation of linear combinations of task outputs over a prime field.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    design = sub.add_parser("design", help="build a coding solution and emit it as JSON")
    _add_instance_flags(design)
    design.add_argument(
        "--scheme",
        default="auto",
        help="auto, s1, s2, gamma:<g>, or hybrid[:<blocks>] (default: auto)",
    )
    design.add_argument("--gamma", type=int, help="designated-group size for --scheme gamma")
    design.add_argument("--demand", help="demand file ('q K L' header then L rows of K residues)")
    design.add_argument("--out", help="output path (default: stdout)")
    design.add_argument("--seed", type=int, default=0, help="seed for the sampled demand")
    design.set_defaults(handler=cmd_design)

    curve = sub.add_parser("curve", help="emit CSV rate sweeps")
    curve.add_argument("mode", choices=["R-vs-M", "R-vs-L", "R-vs-N"])
    _add_instance_flags(curve, list_modulus=True)
    curve.add_argument("--out", help="output path (default: stdout)")
    curve.set_defaults(handler=cmd_curve)

    bound = sub.add_parser("bound", help="lower bounds, achieved rate, and gap for one instance")
    _add_instance_flags(bound)
    bound.add_argument(
        "--budget-ms",
        dest="budget_ms",
        type=float,
        default=1000.0,
        help="time budget for the covering search (default: 1000)",
    )
    bound.add_argument("--out", help="output path (default: stdout)")
    bound.set_defaults(handler=cmd_bound)

    cover = sub.add_parser("cover", help="covering number with a verifiable certificate")
    cover.add_argument("-v", dest="points", type=int, required=True, help="number of points")
    cover.add_argument("-k", dest="block_size", type=int, required=True, help="block size cap")
    cover.add_argument("-m", dest="level", type=int, required=True, help="covering level")
    cover.add_argument(
        "--budget-ms",
        dest="budget_ms",
        type=float,
        default=60_000.0,
        help="time budget before reporting an unresolved bracket (default: 60000)",
    )
    cover.add_argument("--out", help="output path (default: stdout)")
    cover.set_defaults(handler=cmd_cover)

    verify = sub.add_parser("verify", help="re-check a solution file against a demand file")
    verify.add_argument("solution", help="solution JSON file")
    verify.add_argument("demand", help="demand text file")
    verify.add_argument("--seed", type=int, default=0, help="seed for the decode spot check")
    verify.add_argument("--out", help="output path (default: stdout)")
    verify.set_defaults(handler=cmd_verify)

    fuzz_cmd = sub.add_parser("fuzz", help="randomized end-to-end trials, JSON lines output")
    _add_instance_flags(fuzz_cmd, list_modulus=True)
    fuzz_cmd.add_argument("--trials", type=int, default=3, help="trials per grid point")
    fuzz_cmd.add_argument("--seed", type=int, default=0, help="base seed")
    fuzz_cmd.add_argument("--out", help="output path (default: stdout)")
    fuzz_cmd.set_defaults(handler=cmd_fuzz)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except LinsepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
