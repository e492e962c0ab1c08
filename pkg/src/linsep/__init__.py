"""Coded task assignment and transmission schemes for distributed linear computation.

Setting: K task outputs live on distributed servers, each server may hold at
most M tasks, and a user demands L linearly independent combinations of all K
outputs over a prime field.  Servers broadcast linear combinations of the
outputs they hold; the user decodes the demands from the broadcast symbols.
The package constructs assignments with their encode/decode matrices, verifies
them exactly, simulates the protocol end to end, trades transmissions against
server count, and evaluates lower bounds with machine-checkable certificates.
"""

from __future__ import annotations

from ._kernels import BACKEND
from .bounds import (
    BoundReport,
    CoveringDesign,
    CoveringSearch,
    bound_report,
    covering_certificate,
    covering_number,
    covering_search,
    entropy_lower_bound,
    gap_certificate,
    gap_guarantee,
    is_multilevel_covering,
    pair_covering_lower_bound,
    verify_covering_certificate,
)
from .errors import (
    ContractError,
    FieldMismatchError,
    InfeasibleAssignmentError,
    InsufficientRankError,
    LinsepError,
    NoSolutionError,
    ProtocolViolationError,
    SingularMatrixError,
    WrongRegimeError,
)
from .gf import FieldSpec, smallest_prime_above
from .matfq import MatrixFq
from .model import (
    CodingSolution,
    DemandMatrix,
    ProblemInstance,
    TaskAssignment,
    VerificationReport,
    dump_solution,
    format_demand_text,
    load_solution,
    normalize_demand,
    parse_demand_text,
    random_full_rank_demand,
    solution_from_json,
    solution_to_json,
    verify_solution,
)
from .scheme1 import (
    partition_rate,
    partition_servers,
    partitioned_solution,
    uncoded_solution,
)
from .scheme2 import build_scheme2, scheme2_rate, scheme2_servers
from .sim import (
    FuzzRecord,
    FuzzReport,
    SimulationReport,
    Transcript,
    Workload,
    fuzz,
    run,
)
from .tradeoff import (
    TradeoffPoint,
    assign_gamma,
    mixed_rate,
    scheme_gamma,
    scheme_mixed,
    tradeoff_curve,
    tradeoff_point,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundReport",
    "CodingSolution",
    "ContractError",
    "CoveringDesign",
    "CoveringSearch",
    "DemandMatrix",
    "FieldMismatchError",
    "FieldSpec",
    "FuzzRecord",
    "FuzzReport",
    "InfeasibleAssignmentError",
    "InsufficientRankError",
    "LinsepError",
    "MatrixFq",
    "NoSolutionError",
    "ProblemInstance",
    "ProtocolViolationError",
    "SimulationReport",
    "SingularMatrixError",
    "TaskAssignment",
    "TradeoffPoint",
    "Transcript",
    "VerificationReport",
    "WrongRegimeError",
    "Workload",
    "__version__",
    "assign_gamma",
    "bound_report",
    "build_scheme2",
    "covering_certificate",
    "covering_number",
    "covering_search",
    "dump_solution",
    "entropy_lower_bound",
    "format_demand_text",
    "fuzz",
    "gap_certificate",
    "gap_guarantee",
    "is_multilevel_covering",
    "load_solution",
    "mixed_rate",
    "normalize_demand",
    "pair_covering_lower_bound",
    "parse_demand_text",
    "partition_rate",
    "partition_servers",
    "partitioned_solution",
    "random_full_rank_demand",
    "run",
    "scheme2_rate",
    "scheme2_servers",
    "scheme_gamma",
    "scheme_mixed",
    "smallest_prime_above",
    "solution_from_json",
    "solution_to_json",
    "tradeoff_curve",
    "tradeoff_point",
    "uncoded_solution",
    "verify_covering_certificate",
    "verify_solution",
]
