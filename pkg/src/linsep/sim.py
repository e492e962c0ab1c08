"""End-to-end execution of coding solutions on synthetic workloads.

Matrix-level verification shows that the decode matrix reconstructs the
demand matrix.  This module closes the remaining gap to a running system: it
materializes datasets, treats the per-task subfunctions as opaque keyed
pseudorandom maps, has each server compute its messages from the outputs of
its own tasks only, and compares the user's decoded values against ground
truth.  A fuzz driver repeats that check across parameter grids and emits
machine-readable JSON-line records.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import ContractError, LinsepError, ProtocolViolationError
from .gf import FieldSpec
from .matfq import MatrixFq
from .model import (
    CodingSolution,
    DemandMatrix,
    ProblemInstance,
    random_full_rank_demand,
    verify_solution,
)
from .scheme1 import scheme1
from .scheme2 import build_scheme2
from .tradeoff import scheme_gamma

__all__ = [
    "FuzzRecord",
    "FuzzReport",
    "SimulationReport",
    "Transcript",
    "Workload",
    "fuzz",
    "run",
]

DEFAULT_DATASET_LEN = 4
DEFAULT_OUTPUT_LEN = 4


def _subfunction_outputs(
    spec: FieldSpec, seed: int, datasets: MatrixFq, output_len: int
) -> MatrixFq:
    """Keyed pseudorandom map from (task index, dataset) to an output vector.

    Stands in for arbitrary black-box subfunctions: deterministic given the
    seed and the dataset, but with no linear structure the coding layer could
    accidentally rely on.
    """
    key = seed.to_bytes(8, "big")
    rows = []
    for task in range(datasets.rows):
        payload = task.to_bytes(4, "big") + b"".join(
            int(value).to_bytes(8, "big") for value in datasets.array[task]
        )
        symbols = []
        for position in range(output_len):
            digest = hashlib.blake2b(
                payload + position.to_bytes(4, "big"), key=key, digest_size=8
            ).digest()
            symbols.append(int.from_bytes(digest, "big") % spec.q)
        rows.append(symbols)
    return MatrixFq.from_rows(spec, rows)


@dataclass(frozen=True)
class Workload:
    """Datasets and black-box subfunction outputs for one simulation.

    `datasets` holds one row per task; `outputs` holds the corresponding
    subfunction output vectors.  `generate` derives both from a seed;
    `from_outputs` accepts explicit output vectors for exhaustive or
    adversarial tests.
    """

    seed: int
    datasets: MatrixFq
    outputs: MatrixFq

    def __post_init__(self) -> None:
        if self.datasets.spec != self.outputs.spec:
            raise ContractError("datasets and outputs must share one field")
        if self.datasets.rows != self.outputs.rows:
            raise ContractError(
                f"{self.datasets.rows} datasets but {self.outputs.rows} output vectors"
            )

    @classmethod
    def generate(
        cls,
        spec: FieldSpec,
        num_tasks: int,
        seed: int,
        dataset_len: int = DEFAULT_DATASET_LEN,
        output_len: int = DEFAULT_OUTPUT_LEN,
    ) -> Workload:
        rng = np.random.default_rng(seed)
        datasets = MatrixFq.random(spec, num_tasks, dataset_len, rng)
        outputs = _subfunction_outputs(spec, seed, datasets, output_len)
        return cls(seed, datasets, outputs)

    @classmethod
    def from_outputs(cls, outputs: MatrixFq, seed: int = 0) -> Workload:
        datasets = MatrixFq.zeros(outputs.spec, outputs.rows, DEFAULT_DATASET_LEN)
        return cls(seed, datasets, outputs)

    @property
    def spec(self) -> FieldSpec:
        return self.outputs.spec

    @property
    def num_tasks(self) -> int:
        return self.outputs.rows

    @property
    def dataset_len(self) -> int:
        return self.datasets.cols

    @property
    def output_len(self) -> int:
        return self.outputs.cols


@dataclass(frozen=True)
class Transcript:
    """Messages actually sent, one row per transmission."""

    messages: MatrixFq
    row_server: tuple[int, ...]


@dataclass(frozen=True)
class SimulationReport:
    """Outcome of one end-to-end run."""

    transcript: Transcript
    decoded: MatrixFq
    truth: MatrixFq
    exact: tuple[bool, ...]
    symbols_sent: int

    @property
    def all_exact(self) -> bool:
        return all(self.exact)


def run(
    inst: ProblemInstance,
    demand: DemandMatrix,
    solution: CodingSolution,
    workload: Workload,
) -> SimulationReport:
    """Execute a solution on a workload and compare against ground truth.

    Every message is computed from the outputs of the sending server's
    assigned tasks only; a nonzero coefficient outside that set is a protocol
    violation, raised rather than silently zeroed.

    Args:
        inst: Problem dimensions and field.
        demand: The requested combinations (rows must match `inst`).
        solution: The scheme under test.
        workload: Datasets and subfunction outputs.

    Returns:
        A `SimulationReport`; `all_exact` is True whenever the solution
        passes matrix-level verification.

    Raises:
        ContractError: On any dimension or field mismatch.
        ProtocolViolationError: If a transmission uses an unassigned task.
    """
    if workload.spec != inst.field:
        raise ContractError("workload field does not match the instance")
    if workload.num_tasks != inst.num_tasks:
        raise ContractError(
            f"workload has {workload.num_tasks} tasks, instance has {inst.num_tasks}"
        )
    if demand.spec != inst.field or demand.num_tasks != inst.num_tasks:
        raise ContractError("demand matrix does not match the instance")
    encode = solution.encode
    if encode.spec != inst.field or encode.cols != inst.num_tasks:
        raise ContractError("solution does not match the instance")
    if solution.decode.rows != demand.num_demands:
        raise ContractError("decode matrix does not match the demand count")

    modulus = inst.field.q
    outputs = workload.outputs.array
    message_rows = np.zeros((encode.rows, workload.output_len), dtype=np.int64)
    for row in range(encode.rows):
        server = solution.row_server[row]
        assigned = solution.assignment.sets[server]
        for task in range(inst.num_tasks):
            coefficient = int(encode.array[row, task])
            if coefficient == 0:
                continue
            if task not in assigned:
                raise ProtocolViolationError(
                    f"transmission {row} from server {server} uses task {task}, "
                    f"which is outside its assignment"
                )
            message_rows[row] = (message_rows[row] + coefficient * outputs[task]) % modulus
    messages = MatrixFq(message_rows, inst.field)

    decoded = solution.decode @ messages
    truth = demand.matrix @ workload.outputs
    exact = tuple(
        bool(np.array_equal(decoded.array[row], truth.array[row]))
        for row in range(demand.num_demands)
    )
    transcript = Transcript(messages, tuple(solution.row_server))
    return SimulationReport(
        transcript, decoded, truth, exact, encode.rows * workload.output_len
    )


@dataclass(frozen=True)
class FuzzRecord:
    """One fuzz trial: which instance, which scheme, and whether it held up."""

    num_tasks: int
    num_demands: int
    capacity: int
    modulus: int
    scheme: str
    group_size: int | None
    rate: int | None
    passed: bool
    seed: int

    def to_json(self) -> dict:
        record: dict = {
            "K": self.num_tasks,
            "L": self.num_demands,
            "M": self.capacity,
            "q": self.modulus,
            "scheme": self.scheme,
        }
        if self.group_size is not None:
            record["gamma"] = self.group_size
        record["rate"] = self.rate
        record["pass"] = self.passed
        record["seed"] = self.seed
        return record


@dataclass(frozen=True)
class FuzzReport:
    """All fuzz trial records, in deterministic grid-then-trial order."""

    records: tuple[FuzzRecord, ...]

    @property
    def failures(self) -> tuple[FuzzRecord, ...]:
        return tuple(record for record in self.records if not record.passed)

    @property
    def all_passed(self) -> bool:
        return not self.failures

    def to_jsonl(self) -> str:
        return "".join(json.dumps(record.to_json()) + "\n" for record in self.records)


def _trial_seed(base_seed: int, inst: ProblemInstance, trial: int) -> int:
    payload = (
        f"{base_seed}:{inst.num_tasks}:{inst.num_demands}:"
        f"{inst.capacity}:{inst.field.q}:{trial}"
    ).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def _applicable_builders(
    inst: ProblemInstance,
) -> list[tuple[str, int | None, Callable[[DemandMatrix], CodingSolution]]]:
    builders: list[tuple[str, int | None, Callable[[DemandMatrix], CodingSolution]]] = [
        ("s1", None, lambda demand: scheme1(demand, inst.capacity))
    ]
    if 2 * inst.capacity >= inst.num_tasks:
        builders.append(("s2", None, lambda demand: build_scheme2(demand, inst.capacity)))
    for group_size in range(2, min(inst.num_demands, inst.capacity) + 1):
        builders.append(
            (
                "gamma",
                group_size,
                lambda demand, g=group_size: scheme_gamma(demand, inst.capacity, g),
            )
        )
    return builders


def fuzz(
    grid: Iterable[ProblemInstance],
    trials: int,
    seed: int,
    *,
    tamper: Callable[[CodingSolution, np.random.Generator], CodingSolution] | None = None,
) -> FuzzReport:
    """Build, verify, and execute every applicable scheme across a grid.

    For each instance and trial, samples a uniform full-rank demand matrix,
    builds the baseline scheme, the demand-agnostic scheme where its regime
    applies, and every grouped variant in regime, then requires both
    matrix-level verification and an exact end-to-end decode.  Construction
    errors are recorded as failures rather than raised.

    Args:
        grid: Problem instances to cover, reported in iteration order.
        trials: Independent demand/workload samples per instance.
        seed: Master seed; per-trial seeds are derived and recorded so any
            failure is reproducible in isolation.
        tamper: Optional hook applied to each built solution before checking
            (used by negative-control tests to confirm failures are caught).

    Returns:
        A `FuzzReport` with one record per (instance, trial, scheme).
    """
    records: list[FuzzRecord] = []
    for inst in grid:
        for trial in range(trials):
            trial_seed = _trial_seed(seed, inst, trial)
            rng = np.random.default_rng(trial_seed)
            demand = random_full_rank_demand(inst, rng)
            workload = Workload.generate(inst.field, inst.num_tasks, trial_seed)
            for scheme_name, group_size, build in _applicable_builders(inst):
                rate: int | None = None
                try:
                    solution = build(demand)
                    if tamper is not None:
                        solution = tamper(solution, rng)
                    rate = solution.rate
                    passed = (
                        verify_solution(inst, demand, solution).passed
                        and run(inst, demand, solution, workload).all_exact
                    )
                except LinsepError:
                    passed = False
                records.append(
                    FuzzRecord(
                        inst.num_tasks,
                        inst.num_demands,
                        inst.capacity,
                        inst.field.q,
                        scheme_name,
                        group_size,
                        rate,
                        passed,
                        trial_seed,
                    )
                )
    return FuzzReport(tuple(records))
