"""Shared domain types: problem instances, assignments, solutions, verification.

A problem instance has ``num_tasks`` subfunction outputs living on servers,
``num_demands`` requested linear combinations of them, and a per-server budget
``capacity`` on how many subfunctions one server may compute.  A solution is a
task assignment plus an exact factorization ``decode @ encode == demand`` in
which every encoding row is supported inside its server's assigned set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import ContractError
from .gf import FieldSpec
from .matfq import (
    MatrixFq,
    first_independent_columns,
    rank,
    solve_row_combination,
)


@dataclass(frozen=True)
class ProblemInstance:
    """Sizes of one distributed linear-computation problem."""

    num_tasks: int
    num_demands: int
    capacity: int
    field: FieldSpec

    def __post_init__(self) -> None:
        if not 1 <= self.num_demands <= self.num_tasks:
            raise ContractError(
                f"need 1 <= num_demands <= num_tasks, got {self.num_demands} and {self.num_tasks}"
            )
        if not 1 <= self.capacity <= self.num_tasks:
            raise ContractError(
                f"need 1 <= capacity <= num_tasks, got {self.capacity} and {self.num_tasks}"
            )


@dataclass(frozen=True)
class DemandMatrix:
    """A full-row-rank matrix of requested linear combinations."""

    matrix: MatrixFq

    def __post_init__(self) -> None:
        if rank(self.matrix) != self.matrix.rows:
            raise ContractError(
                "demand matrix must have full row rank; use normalize_demand first"
            )

    @property
    def num_demands(self) -> int:
        return self.matrix.rows

    @property
    def num_tasks(self) -> int:
        return self.matrix.cols

    @property
    def spec(self) -> FieldSpec:
        return self.matrix.spec


@dataclass(frozen=True)
class TaskAssignment:
    """Ordered per-server sets of task indices (0-based internally)."""

    sets: tuple[frozenset[int], ...]
    num_tasks: int

    def __post_init__(self) -> None:
        for i, s in enumerate(self.sets):
            if not s:
                raise ContractError(f"server {i} has an empty assignment")
            if any(not 0 <= j < self.num_tasks for j in s):
                raise ContractError(f"server {i} assignment out of range: {sorted(s)}")

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]], num_tasks: int) -> TaskAssignment:
        return cls(tuple(frozenset(s) for s in sets), num_tasks)

    @property
    def num_servers(self) -> int:
        return len(self.sets)

    def max_set_size(self) -> int:
        return max(len(s) for s in self.sets)

    def one_based(self) -> list[list[int]]:
        """Sorted 1-based index lists, for display and serialization."""
        return [sorted(j + 1 for j in s) for s in self.sets]


@dataclass(frozen=True)
class CodingSolution:
    """A task assignment plus the exact encode/decode pair it supports.

    ``encode`` has one row per transmission; ``row_server[r]`` names the server
    that sends row ``r``, and the row's support must sit inside that server's
    assigned set.  ``decode @ encode`` reproduces the demand matrix exactly.
    """

    assignment: TaskAssignment
    encode: MatrixFq
    row_server: tuple[int, ...]
    decode: MatrixFq

    def __post_init__(self) -> None:
        if len(self.row_server) != self.encode.rows:
            raise ContractError(
                f"{self.encode.rows} encoding rows but {len(self.row_server)} server tags"
            )
        if any(not 0 <= n < self.assignment.num_servers for n in self.row_server):
            raise ContractError(f"server tag out of range: {self.row_server}")

    @property
    def rate(self) -> int:
        return self.encode.rows

    @property
    def servers(self) -> int:
        return self.assignment.num_servers


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of every solution invariant, plus the achieved rate and servers."""

    factorization_ok: bool
    support_ok: bool
    sparsity_ok: bool
    accounting_ok: bool
    rate: int
    servers: int
    issues: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return (
            self.factorization_ok
            and self.support_ok
            and self.sparsity_ok
            and self.accounting_ok
        )


def verify_solution(
    inst: ProblemInstance, demand: DemandMatrix, sol: CodingSolution
) -> VerificationReport:
    """Check every invariant a coding solution must satisfy.

    Raises:
        ContractError: if matrix dimensions are inconsistent with ``inst``
            (shape errors are bugs in the caller, not verification failures).
    """
    k, n_demands = inst.num_tasks, inst.num_demands
    if demand.matrix.rows != n_demands or demand.matrix.cols != k:
        raise ContractError(
            f"demand is {demand.matrix.rows}x{demand.matrix.cols}, expected {n_demands}x{k}"
        )
    if demand.spec != inst.field or sol.encode.spec != inst.field:
        raise ContractError("field mismatch between instance, demand, and solution")
    if sol.encode.cols != k:
        raise ContractError(f"encoding width {sol.encode.cols} != num_tasks {k}")
    if sol.decode.rows != n_demands or sol.decode.cols != sol.encode.rows:
        raise ContractError(
            f"decoding matrix is {sol.decode.rows}x{sol.decode.cols}, "
            f"expected {n_demands}x{sol.encode.rows}"
        )
    if sol.assignment.num_tasks != k:
        raise ContractError("assignment indexes a different task count")

    issues: list[str] = []

    factorization_ok = (sol.decode @ sol.encode) == demand.matrix
    if not factorization_ok:
        issues.append("decode @ encode differs from the demand matrix")

    support_ok = True
    sparsity_ok = True
    for r in range(sol.encode.rows):
        support = set(np.nonzero(sol.encode.row(r))[0].tolist())
        assigned = sol.assignment.sets[sol.row_server[r]]
        if not support <= assigned:
            support_ok = False
            issues.append(
                f"row {r} touches tasks {sorted(support - assigned)} outside server "
                f"{sol.row_server[r]}'s assignment"
            )
        if len(support) > inst.capacity:
            sparsity_ok = False
            issues.append(f"row {r} uses {len(support)} tasks > capacity {inst.capacity}")

    accounting_ok = True
    if sol.assignment.max_set_size() > inst.capacity:
        accounting_ok = False
        issues.append(
            f"an assignment set exceeds capacity {inst.capacity}: "
            f"largest has {sol.assignment.max_set_size()} tasks"
        )
    row_counts = [0] * sol.servers
    for n in sol.row_server:
        row_counts[n] += 1
    if sum(row_counts) != sol.rate:
        accounting_ok = False
        issues.append("per-server row counts do not add up to the rate")

    return VerificationReport(
        factorization_ok=factorization_ok,
        support_ok=support_ok,
        sparsity_ok=sparsity_ok,
        accounting_ok=accounting_ok,
        rate=sol.rate,
        servers=sol.servers,
        issues=tuple(issues),
    )


def normalize_demand(raw: MatrixFq) -> tuple[DemandMatrix, MatrixFq]:
    """Drop linearly dependent rows, remembering how to rebuild them.

    Returns a full-row-rank demand made of the first maximal independent subset
    of ``raw``'s rows, plus a recovery matrix with ``recovery @ kept == raw``;
    dropped rows stay recoverable as combinations of the kept ones.

    Raises:
        ContractError: if ``raw`` is the zero matrix.
    """
    if raw.is_zero():
        raise ContractError("cannot normalize an all-zero demand matrix")
    r = rank(raw)
    kept_rows = first_independent_columns(raw.transpose(), r)
    kept = MatrixFq._wrap(raw.array[kept_rows].copy(), raw.spec)
    recovery = solve_row_combination(kept, raw)
    return DemandMatrix(kept), recovery


def random_full_rank_demand(
    inst: ProblemInstance, rng: np.random.Generator
) -> DemandMatrix:
    """Sample a uniformly random full-row-rank demand by rejection."""
    while True:
        m = MatrixFq.random(inst.field, inst.num_demands, inst.num_tasks, rng)
        if rank(m) == inst.num_demands:
            return DemandMatrix(m)


# --- on-disk formats -------------------------------------------------------
#
# Demand text: first line "q K L", then L whitespace-separated rows of K
# residues.  Solution JSON: {q, K, L, M, rate, servers, assignment, A, C} with
# 1-based indices in `assignment` and in each A entry's `server`.


def format_demand_text(m: MatrixFq) -> str:
    lines = [f"{m.spec.q} {m.cols} {m.rows}"]
    lines += [" ".join(str(x) for x in row) for row in m.to_lists()]
    return "\n".join(lines) + "\n"


def parse_demand_text(text: str) -> MatrixFq:
    """Parse the demand text format; the result may be rank-deficient."""
    tokens = text.split()
    if len(tokens) < 3:
        raise ContractError("demand text needs a 'q K L' header")
    q, k, n_demands = (int(t) for t in tokens[:3])
    values = [int(t) for t in tokens[3:]]
    if len(values) != k * n_demands:
        raise ContractError(
            f"demand text declares {n_demands}x{k} entries but carries {len(values)}"
        )
    spec = FieldSpec(q)
    return MatrixFq(np.array(values, dtype=np.int64).reshape(n_demands, k), spec)


def solution_to_json(inst: ProblemInstance, sol: CodingSolution) -> dict[str, Any]:
    return {
        "q": inst.field.q,
        "K": inst.num_tasks,
        "L": inst.num_demands,
        "M": inst.capacity,
        "rate": sol.rate,
        "servers": sol.servers,
        "assignment": sol.assignment.one_based(),
        "A": [
            {"server": sol.row_server[r] + 1, "coeffs": sol.encode.row(r).tolist()}
            for r in range(sol.encode.rows)
        ],
        "C": sol.decode.to_lists(),
    }


def solution_from_json(obj: dict[str, Any]) -> tuple[ProblemInstance, CodingSolution]:
    spec = FieldSpec(int(obj["q"]))
    inst = ProblemInstance(
        num_tasks=int(obj["K"]),
        num_demands=int(obj["L"]),
        capacity=int(obj["M"]),
        field=spec,
    )
    assignment = TaskAssignment.from_sets(
        ([j - 1 for j in s] for s in obj["assignment"]), inst.num_tasks
    )
    rows = [entry["coeffs"] for entry in obj["A"]]
    encode = (
        MatrixFq.from_rows(spec, rows)
        if rows
        else MatrixFq.zeros(spec, 0, inst.num_tasks)
    )
    row_server = tuple(int(entry["server"]) - 1 for entry in obj["A"])
    decode = MatrixFq.from_rows(spec, obj["C"])
    sol = CodingSolution(
        assignment=assignment, encode=encode, row_server=row_server, decode=decode
    )
    if sol.rate != int(obj["rate"]) or sol.servers != int(obj["servers"]):
        raise ContractError("solution file's rate/servers fields disagree with its matrices")
    return inst, sol


def dump_solution(inst: ProblemInstance, sol: CodingSolution) -> str:
    return json.dumps(solution_to_json(inst, sol), indent=2) + "\n"


def load_solution(text: str) -> tuple[ProblemInstance, CodingSolution]:
    return solution_from_json(json.loads(text))
