"""Demand-agnostic construction for servers holding at least half the tasks.

When every server can compute all but a small slice of the tasks, partition
the task indices into contiguous slices of size ``num_tasks - capacity`` and
give each server everything EXCEPT one slice.  Appending one extra synthetic
demand row per group of demands then lets each server send a single
combination that avoids exactly its missing slice, dictated row-by-row by a
fixed full-rank target matrix.  The user decodes each demand from two
transmissions.  The assignment never looks at the demand entries, so it can
be fixed before demands arrive.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ContractError, WrongRegimeError
from .gf import FieldSpec
from .matfq import MatrixFq, invert
from .model import CodingSolution, DemandMatrix, TaskAssignment


def partition_tasks(num_tasks: int, capacity: int) -> tuple[tuple[int, ...], ...]:
    """Contiguous slices of size ``num_tasks - capacity``; the last slice
    absorbs the remainder (so it can be up to twice as long).

    Raises:
        WrongRegimeError: unless ``num_tasks / 2 <= capacity < num_tasks``.
    """
    slice_size = num_tasks - capacity
    if slice_size <= 0 or capacity < slice_size:
        raise WrongRegimeError(
            f"slice partition needs num_tasks/2 <= capacity < num_tasks; "
            f"got capacity {capacity} for {num_tasks} tasks"
        )
    count = num_tasks // slice_size
    parts = [
        tuple(range(t * slice_size, (t + 1) * slice_size)) for t in range(count - 1)
    ]
    parts.append(tuple(range((count - 1) * slice_size, num_tasks)))
    return tuple(parts)


def assign_scheme2(num_tasks: int, capacity: int) -> TaskAssignment:
    """One server per slice, assigned everything except that slice.

    Returns all ``floor(num_tasks / (num_tasks - capacity))`` complements;
    builders take a prefix.  Independent of any demand matrix by construction.
    """
    parts = partition_tasks(num_tasks, capacity)
    everything = set(range(num_tasks))
    return TaskAssignment.from_sets((everything - set(p) for p in parts), num_tasks)


def target_matrix(spec: FieldSpec, n: int) -> MatrixFq:
    """Default target: identity with the last column set to -1 above the
    diagonal.  Any full-rank matrix with an all-nonzero last column works;
    this one makes each demand decode as one transmission plus the last."""
    t = np.eye(n, dtype=np.int64)
    t[: n - 1, n - 1] = -1
    return MatrixFq(t, spec)


def augment_demand(
    demand: MatrixFq,
    parts: tuple[tuple[int, ...], ...],
    n_servers: int,
    target: MatrixFq | None = None,
) -> MatrixFq:
    """Append the synthetic row that makes each target row annihilate its slice.

    Row ``n`` of the target, applied to the result restricted to slice ``n``'s
    columns, must vanish — that is what lets server ``n`` (which misses slice
    ``n``) transmit that combination.  The synthetic row is solved slice by
    slice from that condition; slices beyond ``n_servers`` get zeros.

    Raises:
        WrongRegimeError: if the demand rows do not number ``n_servers - 1``
            or there are fewer slices than servers.
    """
    n_demands = demand.rows
    if n_demands != n_servers - 1 or n_servers > len(parts):
        raise WrongRegimeError(
            f"augmentation pairs {n_servers - 1} demand rows with slices and needs "
            f"{n_servers} <= {len(parts)} slices available"
        )
    spec = demand.spec
    q = spec.q
    if target is None:
        target = target_matrix(spec, n_servers)
    if target.rows != n_servers or target.cols != n_servers:
        raise ContractError(f"target must be {n_servers}x{n_servers}")
    if any(target.array[:, n_servers - 1] % q == 0):
        raise ContractError("target matrix needs an all-nonzero last column")
    extra = np.zeros(demand.cols, dtype=np.int64)
    for n in range(n_servers):
        cols = list(parts[n])
        head = target.array[n, :n_demands] @ demand.array[:, cols] % q
        scale = -spec.inv(int(target.array[n, n_servers - 1])) % q
        extra[cols] = head * scale % q
    return MatrixFq(np.vstack([demand.array, extra[None, :]]), spec)


def build_scheme2_small(
    demand: DemandMatrix, capacity: int, target: MatrixFq | None = None
) -> CodingSolution:
    """One extra transmission total: rate ``num_demands + 1`` on as many servers.

    Requires strictly fewer demands than slices.
    """
    return _build_block(demand.matrix, demand.num_tasks, capacity, target)


def _build_block(
    rows: MatrixFq, num_tasks: int, capacity: int, target: MatrixFq | None = None
) -> CodingSolution:
    parts = partition_tasks(num_tasks, capacity)
    n_servers = rows.rows + 1
    if n_servers > len(parts):
        raise WrongRegimeError(
            f"{rows.rows} demands need {n_servers} slices but only "
            f"{len(parts)} exist; split the demands into blocks"
        )
    spec = rows.spec
    if target is None:
        target = target_matrix(spec, n_servers)
    augmented = augment_demand(rows, parts, n_servers, target)
    everything = set(range(num_tasks))
    assignment = TaskAssignment.from_sets(
        (everything - set(parts[n]) for n in range(n_servers)), num_tasks
    )
    encode = target @ augmented
    decode = _select_first_rows(invert(target), rows.rows)
    return CodingSolution(
        assignment=assignment,
        encode=encode,
        row_server=tuple(range(n_servers)),
        decode=decode,
    )


def _select_first_rows(m: MatrixFq, count: int) -> MatrixFq:
    return MatrixFq._wrap(m.array[:count].copy(), m.spec)


def scheme2_rate(num_tasks: int, num_demands: int, capacity: int) -> int:
    """Rate formula: L + ceil(L / floor(M / (K - M))), or L when M = K."""
    if capacity == num_tasks:
        return num_demands
    slice_size = num_tasks - capacity
    if capacity < slice_size:
        raise WrongRegimeError(
            f"the large-capacity construction needs capacity >= num_tasks/2, "
            f"got {capacity} < {num_tasks}/2"
        )
    per_block = capacity // slice_size
    return num_demands + math.ceil(num_demands / per_block)


def scheme2_servers(num_tasks: int, num_demands: int, capacity: int) -> int:
    """Server count: L+1 when fewer demands than slices, else the slice count."""
    if capacity == num_tasks:
        return 1
    count = num_tasks // (num_tasks - capacity)
    return num_demands + 1 if num_demands < count else count


def build_scheme2(demand: DemandMatrix, capacity: int) -> CodingSolution:
    """Full construction: block the demands so each block fits the slice count.

    With ``count`` slices, each block of ``count - 1`` demand rows costs one
    extra transmission, giving rate ``L + ceil(L/(count-1))`` on ``count``
    servers.  With capacity = num_tasks this collapses to one server sending
    the demands directly.

    Raises:
        WrongRegimeError: if ``capacity < num_tasks / 2``.
    """
    k, n_demands = demand.num_tasks, demand.num_demands
    spec = demand.spec
    if capacity == k:
        return CodingSolution(
            assignment=TaskAssignment.from_sets([range(k)], k),
            encode=demand.matrix,
            row_server=(0,) * n_demands,
            decode=MatrixFq.identity(spec, n_demands),
        )
    parts = partition_tasks(k, capacity)
    count = len(parts)
    if n_demands < count:
        return build_scheme2_small(demand, capacity)

    per_block = count - 1
    starts = list(range(0, n_demands, per_block))
    assignment = assign_scheme2(k, capacity)
    encode_rows: list[np.ndarray] = []
    row_server: list[int] = []
    rate = n_demands + len(starts)
    decode = np.zeros((n_demands, rate), dtype=np.int64)
    col = 0
    for start in starts:
        block_rows = MatrixFq._wrap(
            demand.matrix.array[start : start + per_block].copy(), spec
        )
        block = _build_block(block_rows, k, capacity)
        encode_rows.extend(block.encode.array)
        row_server.extend(range(block.encode.rows))
        width = block.encode.rows
        decode[start : start + block_rows.rows, col : col + width] = block.decode.array
        col += width
    return CodingSolution(
        assignment=assignment,
        encode=MatrixFq._wrap(np.array(encode_rows, dtype=np.int64), spec),
        row_server=tuple(row_server),
        decode=MatrixFq._wrap(decode, spec),
    )
