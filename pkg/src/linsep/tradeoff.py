"""Trading transmissions against servers via per-server column groups.

Giving each server a group of ``group_size`` designated columns (instead of
one) shrinks the column chunks from ``num_demands + capacity - 1`` wide to
``num_demands + capacity - group_size``, which raises the rate but divides
the per-chunk server count by the group size.  Group size 1 recovers the
baseline construction; group size ``num_demands`` is fully disjoint
placement.  Two group sizes can also be mixed across a column split when the
block widths divide evenly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, WrongRegimeError
from .matfq import MatrixFq, first_independent_columns
from .model import CodingSolution, DemandMatrix, TaskAssignment
from .scheme1 import _build_chunk, partition_rate, partitioned_solution


@dataclass(frozen=True)
class TradeoffPoint:
    """Formula rate and server count at one group size."""

    group_size: int
    rate: int
    servers: int


def tradeoff_point(
    num_tasks: int, num_demands: int, capacity: int, group_size: int
) -> TradeoffPoint:
    """Evaluate the rate/server formulas at one group size."""
    if not 1 <= group_size <= num_demands:
        raise ContractError(f"group size must be in [1, num_demands], got {group_size}")
    width = num_demands + capacity - group_size
    return TradeoffPoint(
        group_size=group_size,
        rate=partition_rate(num_tasks, num_demands, capacity, group_size),
        servers=math.ceil(num_demands / group_size) * math.ceil(num_tasks / width),
    )


def tradeoff_curve(num_tasks: int, num_demands: int, capacity: int) -> list[TradeoffPoint]:
    """All group sizes from 1 to num_demands, in order."""
    return [
        tradeoff_point(num_tasks, num_demands, capacity, g)
        for g in range(1, num_demands + 1)
    ]


def assign_gamma(demand: DemandMatrix, capacity: int, group_size: int) -> TaskAssignment:
    """Single-chunk assignment: groups of consecutive designated columns plus
    the shared leftovers.

    Requires ``num_tasks <= num_demands + capacity - group_size`` so every
    set fits the budget.

    Raises:
        WrongRegimeError: outside that regime.
    """
    k, n_demands = demand.num_tasks, demand.num_demands
    if not 1 <= group_size <= n_demands:
        raise ContractError(f"group size must be in [1, num_demands], got {group_size}")
    if k > n_demands + capacity - group_size:
        raise WrongRegimeError(
            f"single-block groups need num_tasks <= num_demands + capacity - group_size; "
            f"got {k} > {n_demands + capacity - group_size}"
        )
    chosen = first_independent_columns(demand.matrix, n_demands)
    shared = set(range(k)) - set(chosen)
    n_servers = math.ceil(n_demands / group_size)
    return TaskAssignment.from_sets(
        (
            set(chosen[t * group_size : (t + 1) * group_size]) | shared
            for t in range(n_servers)
        ),
        k,
    )


def scheme_gamma(demand: DemandMatrix, capacity: int, group_size: int) -> CodingSolution:
    """Column-partition construction at the given group size (uncoded fallback
    when the coded rate would not beat shipping everything raw)."""
    return partitioned_solution(demand, capacity, group_size)


def scheme_mixed(
    demand: DemandMatrix,
    capacity: int,
    group_size_left: int,
    group_size_right: int,
    split: int,
) -> CodingSolution:
    """Run one group size on the first ``split`` columns and another on the rest.

    Needs both group sizes to divide the demand count and each block width to
    divide its block, so both blocks tile into full-width chunks.

    Raises:
        ContractError: naming whichever divisibility condition fails.
    """
    k, n_demands = demand.num_tasks, demand.num_demands
    if not 0 <= split <= k:
        raise ContractError(f"split must be in [0, num_tasks], got {split}")
    plans: list[tuple[int, int, int]] = []  # (start, stop, group_size)
    for label, g, start, stop in (
        ("left", group_size_left, 0, split),
        ("right", group_size_right, split, k),
    ):
        if not 1 <= g <= n_demands:
            raise ContractError(f"{label} group size must be in [1, num_demands], got {g}")
        if n_demands % g:
            raise ContractError(
                f"{label} group size {g} does not divide the demand count {n_demands}"
            )
        width = n_demands + capacity - g
        if (stop - start) % width:
            raise ContractError(
                f"{label} block of {stop - start} columns is not a multiple of "
                f"its chunk width {width}"
            )
        plans.append((start, stop, g))

    sets: list[set[int]] = []
    encode_rows: list[np.ndarray] = []
    row_server: list[int] = []
    decode_blocks: list[np.ndarray] = []
    for start, stop, g in plans:
        width = n_demands + capacity - g
        for chunk_start in range(start, stop, width):
            chunk = list(range(chunk_start, chunk_start + width))
            built = _build_chunk(demand, capacity, g, chunk)
            offset = len(sets)
            sets.extend(built.sets)
            encode_rows.extend(built.encode_rows)
            row_server.extend(offset + t for t in built.row_server)
            decode_blocks.append(built.decode_block)
    if not encode_rows:
        raise ContractError("mixed construction produced no transmissions")
    return CodingSolution(
        assignment=TaskAssignment.from_sets(sets, k),
        encode=MatrixFq._wrap(np.array(encode_rows, dtype=np.int64), demand.spec),
        row_server=tuple(row_server),
        decode=MatrixFq._wrap(
            np.ascontiguousarray(np.hstack(decode_blocks)), demand.spec
        ),
    )


def mixed_rate(num_tasks: int, num_demands: int, capacity: int,
               group_size_left: int, group_size_right: int, split: int) -> int:
    """Rate of the mixed construction: demands per chunk, summed over blocks."""
    width_left = num_demands + capacity - group_size_left
    width_right = num_demands + capacity - group_size_right
    return num_demands * (split // width_left + (num_tasks - split) // width_right)
