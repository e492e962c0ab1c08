"""Nullspace-driven code construction and its column-partition extension.

The core idea: give every server one (more generally, a small group of)
designated column(s) from an independent column set of the demand matrix,
plus the shared leftover columns.  Each server then owns enough nullspace
directions of its complementary columns to send combinations that the user
can invert.  Partitioning the columns into chunks of width
``num_demands + capacity - group_size`` extends this to wide instances at
rate ``num_demands`` per chunk, and shipping every task raw is the fallback
whenever the coded rate would not beat that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ContractError,
    InfeasibleAssignmentError,
    InsufficientRankError,
    WrongRegimeError,
)
from .matfq import (
    MatrixFq,
    first_independent_columns,
    invert,
    left_nullspace_basis,
    rank,
    select_columns,
    solve_row_combination,
    stack_rows,
)
from .model import CodingSolution, DemandMatrix, TaskAssignment


def partition_rate(num_tasks: int, num_demands: int, capacity: int, group_size: int = 1) -> int:
    """Rate of the column-partition construction: min(K, L*ceil(K/(L+M-g)))."""
    width = num_demands + capacity - group_size
    return min(num_tasks, num_demands * math.ceil(num_tasks / width))


def partition_servers(num_tasks: int, num_demands: int, capacity: int, group_size: int = 1) -> int:
    """Server count of the column-partition construction (uncoded fallback packs
    ``capacity`` tasks per server)."""
    width = num_demands + capacity - group_size
    if num_demands * math.ceil(num_tasks / width) >= num_tasks:
        return math.ceil(num_tasks / capacity)
    return math.ceil(num_demands / group_size) * math.ceil(num_tasks / width)


@dataclass(frozen=True)
class NullspaceMatrix:
    """Stacked left-nullspace bases of each server's complementary columns."""

    matrix: MatrixFq
    row_server: tuple[int, ...]


def _select_rows(m: MatrixFq, idx: Sequence[int]) -> MatrixFq:
    return MatrixFq._wrap(m.array[list(idx)].copy(), m.spec)


def nullspace_matrix(demand: DemandMatrix, assignment: TaskAssignment) -> NullspaceMatrix:
    """Stack, server by server, the canonical left-nullspace bases of the
    demand columns that server does NOT hold.

    A vector in that nullspace turns into a transmission supported only on the
    server's own columns.  A server holding everything contributes the full
    identity basis (no constraint to annihilate).
    """
    n_demands = demand.num_demands
    blocks: list[MatrixFq] = []
    tags: list[int] = []
    for n, held in enumerate(assignment.sets):
        missing = sorted(set(range(demand.num_tasks)) - held)
        if missing:
            basis = left_nullspace_basis(select_columns(demand.matrix, missing))
        else:
            basis = MatrixFq.identity(demand.spec, n_demands)
        if basis.rows:
            blocks.append(basis)
            tags.extend([n] * basis.rows)
    if not blocks:
        return NullspaceMatrix(MatrixFq.zeros(demand.spec, 0, n_demands), ())
    return NullspaceMatrix(stack_rows(blocks), tuple(tags))


def feasible(demand: DemandMatrix, assignment: TaskAssignment) -> bool:
    """True iff the stacked nullspace spans the whole demand-combination space,
    i.e. the assignment supports decoding at rate ``num_demands``."""
    return rank(nullspace_matrix(demand, assignment).matrix) == demand.num_demands


def assign_case1(demand: DemandMatrix, capacity: int) -> TaskAssignment:
    """One server per demand: its designated independent column plus the shared
    leftover columns.

    Requires ``num_tasks <= num_demands + capacity - 1`` so the sets fit the
    budget; each set has exactly ``num_tasks - num_demands + 1`` tasks.

    Raises:
        WrongRegimeError: outside that regime.
    """
    k, n_demands = demand.num_tasks, demand.num_demands
    if k > n_demands + capacity - 1:
        raise WrongRegimeError(
            f"single-block construction needs num_tasks <= num_demands + capacity - 1; "
            f"got {k} > {n_demands + capacity - 1}"
        )
    chosen = first_independent_columns(demand.matrix, n_demands)
    shared = set(range(k)) - set(chosen)
    return TaskAssignment.from_sets(({i} | shared for i in chosen), k)


def build_case1(demand: DemandMatrix, assignment: TaskAssignment) -> CodingSolution:
    """Encode with the first independent rows of the stacked nullspace.

    Picks the greedily-first ``num_demands`` independent rows, multiplies them
    into the demand to get the transmissions, and decodes with the inverse of
    the picked block.

    Raises:
        InfeasibleAssignmentError: if the stacked nullspace rank falls short
            (carries the rank achieved).
    """
    n_demands = demand.num_demands
    stacked = nullspace_matrix(demand, assignment)
    try:
        picked = first_independent_columns(stacked.matrix.transpose(), n_demands)
    except InsufficientRankError as exc:
        raise InfeasibleAssignmentError(
            f"stacked nullspace has rank {exc.rank} < {n_demands}; "
            "assignment cannot support full decoding",
            rank=exc.rank,
        ) from exc
    tilde = _select_rows(stacked.matrix, picked)
    return CodingSolution(
        assignment=assignment,
        encode=tilde @ demand.matrix,
        row_server=tuple(stacked.row_server[r] for r in picked),
        decode=invert(tilde),
    )


def uncoded_solution(demand: DemandMatrix, capacity: int) -> CodingSolution:
    """Ship every task output raw, packed ``capacity`` per server."""
    k = demand.num_tasks
    groups = [range(start, min(start + capacity, k)) for start in range(0, k, capacity)]
    return CodingSolution(
        assignment=TaskAssignment.from_sets(groups, k),
        encode=MatrixFq.identity(demand.spec, k),
        row_server=tuple(j // capacity for j in range(k)),
        decode=demand.matrix,
    )


@dataclass(frozen=True)
class _ChunkBuild:
    """One column chunk's contribution: local sets, encode rows, decode block."""

    sets: list[set[int]]
    encode_rows: list[np.ndarray]
    row_server: list[int]
    decode_block: np.ndarray  # num_demands x num_demands


def _build_chunk(
    demand: DemandMatrix, capacity: int, group_size: int, chunk: list[int]
) -> _ChunkBuild:
    spec = demand.spec
    q = spec.q
    n_demands = demand.num_demands
    kc = len(chunk)

    sub = select_columns(demand.matrix, chunk)
    rho = rank(sub)
    kept = _select_rows(sub, first_independent_columns(sub.transpose(), rho))
    recovery = solve_row_combination(kept, sub)  # num_demands x rho

    # Work with enough independent rows that every server set fits the budget:
    # a set is one group of designated columns plus the shared tail, so the
    # tail must shrink to at most capacity - group_size columns.
    n_work = max(rho, kc - capacity + group_size, 0)
    work = kept.array
    for j in range(kc):
        if work.shape[0] >= n_work:
            break
        unit = np.zeros((1, kc), dtype=np.int64)
        unit[0, j] = 1
        trial = np.vstack([work, unit])
        if rank(MatrixFq._wrap(trial, spec)) == work.shape[0] + 1:
            work = trial
    d_work = MatrixFq._wrap(np.ascontiguousarray(work), spec)
    if d_work.rows != n_work:
        raise ContractError(f"could not complete chunk to rank {n_work}")
    recovery_pad = np.hstack(
        [recovery.array, np.zeros((n_demands, n_work - rho), dtype=np.int64)]
    )

    chosen = first_independent_columns(d_work, n_work)
    chosen_set = set(chosen)
    tail = [j for j in range(kc) if j not in chosen_set]
    n_servers = math.ceil(n_demands / group_size)
    groups = [chosen[t * group_size : (t + 1) * group_size] for t in range(n_servers)]
    quota = [min(group_size, n_demands - t * group_size) for t in range(n_servers)]

    # Each server's rows: nullspace of the OTHER designated columns, which has
    # dimension exactly len(group) because those columns are independent.
    blocks: list[MatrixFq] = []
    for group in groups:
        if not group:
            continue
        others = [c for c in chosen if c not in set(group)]
        if others:
            basis = left_nullspace_basis(select_columns(d_work, others))
        else:
            basis = MatrixFq.identity(spec, n_work)
        if basis.rows < len(group):
            raise InfeasibleAssignmentError(
                f"server nullspace dimension {basis.rows} < group size {len(group)}",
                rank=basis.rows,
            )
        blocks.append(_select_rows(basis, range(len(group))))
    if blocks:
        tilde = stack_rows(blocks)
    else:
        tilde = MatrixFq.zeros(spec, 0, 0)
    if rank(tilde) != n_work:
        raise InfeasibleAssignmentError(
            f"stacked per-server rows have rank {rank(tilde)} < {n_work}",
            rank=rank(tilde),
        )
    encode_work = tilde @ d_work  # n_work x kc
    decode_coded = MatrixFq._wrap(recovery_pad, spec) @ invert(tilde)  # L x n_work

    k = demand.num_tasks
    chunk_arr = np.array(chunk, dtype=np.intp)
    sets: list[set[int]] = []
    encode_rows: list[np.ndarray] = []
    row_server: list[int] = []
    decode_cols: list[np.ndarray] = []
    cursor = 0
    for t, group in enumerate(groups):
        local = set(group) | set(tail)
        if not local:
            local = {0}
        sets.append({chunk[j] for j in local})
        anchor = chunk[min(local)]
        for _ in range(len(group)):
            row = np.zeros(k, dtype=np.int64)
            row[chunk_arr] = encode_work.row(cursor)
            encode_rows.append(row)
            row_server.append(t)
            decode_cols.append(decode_coded.array[:, cursor].copy())
            cursor += 1
        for _ in range(quota[t] - len(group)):
            # Filler transmission to meet the fixed per-chunk row count: the
            # anchor task shipped raw, ignored by the decoder.
            row = np.zeros(k, dtype=np.int64)
            row[anchor] = 1
            encode_rows.append(row)
            row_server.append(t)
            decode_cols.append(np.zeros(n_demands, dtype=np.int64))
    decode_block = np.column_stack(decode_cols) % q
    return _ChunkBuild(sets, encode_rows, row_server, decode_block)


def partitioned_solution(
    demand: DemandMatrix, capacity: int, group_size: int = 1
) -> CodingSolution:
    """Column-partition construction at a given designated-group size.

    Falls back to shipping raw outputs when the coded rate would not beat
    ``num_tasks``.  Otherwise each chunk of ``num_demands + capacity -
    group_size`` columns contributes exactly ``num_demands`` transmissions
    from ``ceil(num_demands / group_size)`` fresh servers, so the rate and
    server count follow the partition formulas exactly.
    """
    k, n_demands = demand.num_tasks, demand.num_demands
    if not 1 <= group_size <= n_demands:
        raise ContractError(
            f"group size must be in [1, num_demands], got {group_size}"
        )
    width = n_demands + capacity - group_size
    if n_demands * math.ceil(k / width) >= k:
        return uncoded_solution(demand, capacity)

    chunks = [list(range(start, min(start + width, k))) for start in range(0, k, width)]
    sets: list[set[int]] = []
    encode_rows: list[np.ndarray] = []
    row_server: list[int] = []
    decode_blocks: list[np.ndarray] = []
    for chunk in chunks:
        built = _build_chunk(demand, capacity, group_size, chunk)
        offset = len(sets)
        sets.extend(built.sets)
        encode_rows.extend(built.encode_rows)
        row_server.extend(offset + t for t in built.row_server)
        decode_blocks.append(built.decode_block)
    encode = MatrixFq._wrap(np.array(encode_rows, dtype=np.int64), demand.spec)
    decode = MatrixFq._wrap(np.ascontiguousarray(np.hstack(decode_blocks)), demand.spec)
    return CodingSolution(
        assignment=TaskAssignment.from_sets(sets, k),
        encode=encode,
        row_server=tuple(row_server),
        decode=decode,
    )


def scheme1(demand: DemandMatrix, capacity: int) -> CodingSolution:
    """The rate-min(K, L*ceil(K/(L+M-1))) construction (group size 1)."""
    return partitioned_solution(demand, capacity, group_size=1)
