"""Lower bounds on the communication rate, with exact certificates.

Two converse tools live here.  The entropy argument turns the number of
possible server supports into a rational lower bound on the rate of any
correct scheme; dividing the baseline construction's rate by it yields a
certified gap ratio.  The combinatorial argument counts blocks: any correct
assignment induces a multi-level covering design, so exact covering numbers
(found by canonical depth-first search on small instances) bound the rate
from below as well.

All bound values are exact rationals.  The only transcendental quantity, a
logarithm, is evaluated with interval arithmetic and rounded in the direction
that keeps the reported bound valid (never above the true bound).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

import mpmath
from mpmath.libmp import to_rational

from .errors import ContractError
from .scheme1 import partition_rate

__all__ = [
    "BoundReport",
    "CoveringDesign",
    "CoveringSearch",
    "bound_report",
    "covering_certificate",
    "covering_number",
    "covering_search",
    "entropy_lower_bound",
    "gap_certificate",
    "gap_guarantee",
    "is_multilevel_covering",
    "pair_covering_lower_bound",
    "verify_covering_certificate",
]

_LOG_DIGITS = 60
# Rational over-approximation of Euler's number, so that the "modulus large
# enough" test errs on the conservative side.
_EULER_UPPER = Fraction(271828182845904524, 10**17)
# Candidate-block enumeration cap: beyond this the exact search is hopeless
# and the result is reported as an open bracket instead.
_MAX_CANDIDATE_BLOCKS = 200_000


def _log_upper(value: int, base: int) -> Fraction:
    """Certified upper bound on log_base(value) as an exact rational.

    Interval arithmetic rounds outward, so the upper endpoint of the computed
    interval can never undershoot the true logarithm; converting that binary
    endpoint to a fraction is exact.  The interval width at the working
    precision is far below any tolerance used in this package.
    """
    if value <= 1:
        return Fraction(0)
    saved = mpmath.iv.dps
    mpmath.iv.dps = _LOG_DIGITS
    try:
        ratio = mpmath.iv.log(value) / mpmath.iv.log(base)
        numerator, denominator = to_rational(mpmath.make_mpf(ratio._mpi_[1])._mpf_)
    finally:
        mpmath.iv.dps = saved
    return Fraction(numerator, denominator)


def _validate_rate_parameters(num_tasks: int, num_demands: int, capacity: int, modulus: int) -> None:
    if num_tasks < 1:
        raise ContractError(f"need at least one task, got {num_tasks}")
    if not 1 <= num_demands <= num_tasks:
        raise ContractError(f"demand count {num_demands} must lie in [1, {num_tasks}]")
    if not 1 <= capacity <= num_tasks:
        raise ContractError(f"capacity {capacity} must lie in [1, {num_tasks}]")
    if modulus < 2:
        raise ContractError(f"the alphabet size must be at least 2, got {modulus}")


def entropy_lower_bound(num_tasks: int, num_demands: int, capacity: int, modulus: int) -> Fraction:
    """Rate lower bound from counting the possible server supports.

    Returns ``max(L, L*K / (L + M + log_q binom(K, M)))`` for ``K`` tasks,
    ``L`` demanded combinations, per-server capacity ``M`` and alphabet size
    ``q``, as an exact rational.  The logarithm is over-approximated, so the
    returned value is rounded down and remains a valid lower bound.

    Args:
        num_tasks: Number of input datasets (columns of the demand matrix).
        num_demands: Number of requested linear combinations (its rows).
        capacity: Maximum number of datasets a single server may touch.
        modulus: Alphabet size; any integer >= 2 (need not be prime).

    Returns:
        A `Fraction` lower bound on the rate of any correct scheme.
    """
    _validate_rate_parameters(num_tasks, num_demands, capacity, modulus)
    support_choices = math.comb(num_tasks, capacity)
    log_term = _log_upper(support_choices, modulus)
    counting = Fraction(num_demands * num_tasks) / (num_demands + capacity + log_term)
    return max(Fraction(num_demands), counting)


def gap_guarantee(num_tasks: int, num_demands: int, capacity: int, modulus: int) -> int | None:
    """Certified ceiling on the baseline-to-bound ratio, when one applies.

    Returns 2 when the chunk width divides the task count (with at least two
    demanded combinations), 3 when only the alphabet-size condition
    ``q >= e*K/M`` holds, and None when no ceiling is certified.  The single
    -demand divisible case is excluded from the factor-2 claim because the
    ratio there degrades to ``2 + log_q K``.
    """
    _validate_rate_parameters(num_tasks, num_demands, capacity, modulus)
    if Fraction(modulus) * capacity < _EULER_UPPER * num_tasks:
        return None
    width = num_demands + capacity - 1
    if num_demands >= 2 and num_tasks % width == 0:
        return 2
    return 3


def gap_certificate(num_tasks: int, num_demands: int, capacity: int, modulus: int) -> Fraction:
    """Exact ratio of the baseline construction's rate to the entropy bound.

    The ratio is always at least 1.  Whenever `gap_guarantee` certifies a
    ceiling, the computed ratio is checked against it; a violation would mean
    an internal arithmetic error and raises.
    """
    rate = partition_rate(num_tasks, num_demands, capacity)
    bound = entropy_lower_bound(num_tasks, num_demands, capacity, modulus)
    ratio = Fraction(rate) / bound
    ceiling = gap_guarantee(num_tasks, num_demands, capacity, modulus)
    if ceiling is not None and ratio > ceiling:
        raise ContractError(
            f"certified gap ceiling {ceiling} violated by ratio {ratio} at "
            f"K={num_tasks}, L={num_demands}, M={capacity}, q={modulus}"
        )
    return ratio


def pair_covering_lower_bound(num_tasks: int, capacity: int) -> Fraction:
    """Counting bound ``2K/(M+1)`` on two-level covering numbers.

    Valid for any block size ``M`` and point count ``K``; tight exactly when
    ``M+1`` divides ``K``.
    """
    if num_tasks < 1 or capacity < 1:
        raise ContractError("point count and block size must be positive")
    return Fraction(2 * num_tasks, capacity + 1)


@dataclass(frozen=True)
class CoveringDesign:
    """A multiset of blocks over the point set {0, ..., points-1}."""

    points: int
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.points < 1:
            raise ContractError(f"need at least one point, got {self.points}")
        if not self.blocks:
            raise ContractError("a covering design needs at least one block")
        for block in self.blocks:
            if not block:
                raise ContractError("blocks must be nonempty")
            if not all(0 <= point < self.points for point in block):
                raise ContractError(f"block {sorted(block)} leaves the point range [0, {self.points})")

    @classmethod
    def from_sets(cls, points: int, blocks: Iterable[Iterable[int]]) -> CoveringDesign:
        return cls(points, tuple(frozenset(block) for block in blocks))

    @property
    def size(self) -> int:
        """Number of blocks, counted with multiplicity."""
        return len(self.blocks)


def is_multilevel_covering(design: CoveringDesign, block_size: int, level: int) -> bool:
    """Check the multi-level covering property up to the given level.

    True iff for every ``m' <= level``, every ``m'``-subset of the points
    intersects at least ``m'`` blocks, counted with multiplicity.  All levels
    below `level` are checked too: the multi-level property is strictly
    stronger than the single top-level condition.

    Args:
        design: The candidate design.
        block_size: Declared maximum block size; exceeding it is a contract
            violation, not a False result.
        level: Highest subset size to check.

    Raises:
        ContractError: If a block exceeds `block_size` or `level` < 1.
    """
    if level < 1:
        raise ContractError(f"the covering level must be positive, got {level}")
    oversized = [sorted(block) for block in design.blocks if len(block) > block_size]
    if oversized:
        raise ContractError(f"block {oversized[0]} exceeds the declared block size {block_size}")
    for subset_size in range(1, min(level, design.points) + 1):
        for subset in combinations(range(design.points), subset_size):
            chosen = frozenset(subset)
            hits = sum(1 for block in design.blocks if not chosen.isdisjoint(block))
            if hits < subset_size:
                return False
    return True


@dataclass(frozen=True)
class CoveringSearch:
    """Outcome of an exact covering-number search.

    When `resolved` is true, `lower == upper` is the exact covering number
    and `witness` is an optimal design.  Otherwise the pair (`lower`,
    `upper`) is the best proven bracket and `witness` (when present) attains
    `upper`.
    """

    points: int
    block_size: int
    level: int
    lower: int
    upper: int | None
    witness: tuple[frozenset[int], ...] | None

    @property
    def resolved(self) -> bool:
        return self.upper is not None and self.lower == self.upper

    @property
    def value(self) -> int | None:
        """The exact covering number, or None if the search was cut short."""
        return self.upper if self.resolved else None


class _BudgetExhausted(Exception):
    """Internal signal: the search deadline passed mid-descent."""


def _covering_floor(points: int, effective_size: int, level: int) -> int:
    """Largest closed-form lower bound on the covering number."""
    capped_level = min(level, points)
    floor = max(1, -(-points // effective_size), capped_level)
    if capped_level >= 2:
        floor = max(floor, -(-2 * points // (effective_size + 1)))
    return floor


def _repeated_partition_design(points: int, effective_size: int, level: int) -> tuple[frozenset[int], ...]:
    """Always-feasible design: a padded partition repeated once per level."""
    base: list[frozenset[int]] = []
    for start in range(0, points, effective_size):
        chunk = set(range(start, min(points, start + effective_size)))
        filler = 0
        while len(chunk) < effective_size:
            chunk.add(filler)
            filler += 1
        base.append(frozenset(chunk))
    return tuple(base) * min(level, points)


def _tracked_subsets(points: int, level: int) -> tuple[list[int], list[int]]:
    """Bitmasks of every subset that the covering property constrains."""
    masks: list[int] = []
    needs: list[int] = []
    for subset_size in range(1, min(level, points) + 1):
        for subset in combinations(range(points), subset_size):
            masks.append(sum(1 << point for point in subset))
            needs.append(subset_size)
    return masks, needs


def _search_fixed_size(
    target_size: int,
    candidates: list[int],
    touched_by: list[list[int]],
    needs: list[int],
    points: int,
    effective_size: int,
    deadline: float | None,
) -> list[int] | None:
    """Find a feasible design of exactly `target_size` blocks, or prove none.

    Enumerates multisets in nondecreasing candidate order with the first
    block pinned to the lexicographically least one (point relabeling makes
    this lossless).  Returns candidate indices on success, None when the
    search space is exhausted.
    """
    counts = [0] * len(needs)
    unsatisfied = len(needs)
    uncovered = points
    chosen: list[int] = []

    def apply(index: int) -> None:
        nonlocal unsatisfied, uncovered
        for tracked in touched_by[index]:
            counts[tracked] += 1
            if counts[tracked] == needs[tracked]:
                unsatisfied -= 1
                if tracked < points:
                    uncovered -= 1
        chosen.append(index)

    def retract(index: int) -> None:
        nonlocal unsatisfied, uncovered
        for tracked in touched_by[index]:
            if counts[tracked] == needs[tracked]:
                unsatisfied += 1
                if tracked < points:
                    uncovered += 1
            counts[tracked] -= 1
        chosen.pop()

    def descend(min_index: int, remaining: int) -> bool:
        if deadline is not None and time.monotonic() > deadline:
            raise _BudgetExhausted
        if unsatisfied == 0:
            return True
        if remaining == 0:
            return False
        if uncovered > remaining * effective_size:
            return False
        for tracked, count in enumerate(counts):
            deficit = needs[tracked] - count
            if deficit > remaining:
                return False
        for index in range(min_index, len(candidates)):
            useful = any(counts[tracked] < needs[tracked] for tracked in touched_by[index])
            if not useful:
                continue
            apply(index)
            if descend(index, remaining - 1):
                return True
            retract(index)
        return False

    apply(0)
    if descend(0, target_size - 1):
        return list(chosen)
    return None


def covering_search(
    points: int,
    block_size: int,
    level: int,
    *,
    budget_ms: float | None = None,
    max_blocks: int | None = None,
) -> CoveringSearch:
    """Exact covering number by iterative deepening, with search limits.

    Starts at the best closed-form lower bound and increases the design size
    until a witness is found.  A time budget or block cap turns an
    undecided search into an open bracket rather than an error.  Intended
    envelope: around ten points with blocks of up to four or five points;
    larger instances immediately return their closed-form bracket.

    Args:
        points: Size of the ground set.
        block_size: Maximum block size.
        level: Highest subset size the covering property must satisfy.
        budget_ms: Optional wall-clock budget in milliseconds.
        max_blocks: Optional cap on the design size to consider.

    Returns:
        A `CoveringSearch`; `resolved` tells whether the value is exact.
    """
    if points < 1 or block_size < 1 or level < 1:
        raise ContractError("points, block size, and level must all be positive")
    effective_size = min(block_size, points)
    fallback = _repeated_partition_design(points, effective_size, level)
    floor = _covering_floor(points, effective_size, level)
    deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000.0

    if math.comb(points, effective_size) > _MAX_CANDIDATE_BLOCKS:
        return CoveringSearch(points, block_size, level, floor, len(fallback), fallback)

    candidates = [
        sum(1 << point for point in combo) for combo in combinations(range(points), effective_size)
    ]
    masks, needs = _tracked_subsets(points, level)
    touched_by = [
        [tracked for tracked, mask in enumerate(masks) if block & mask] for block in candidates
    ]

    size = floor
    while size <= len(fallback):
        if max_blocks is not None and size > max_blocks:
            return CoveringSearch(points, block_size, level, size, len(fallback), fallback)
        try:
            found = _search_fixed_size(
                size, candidates, touched_by, needs, points, effective_size, deadline
            )
        except _BudgetExhausted:
            return CoveringSearch(points, block_size, level, size, len(fallback), fallback)
        if found is not None:
            while len(found) < size:
                found.append(found[-1])
            witness = tuple(
                frozenset(point for point in range(points) if candidates[index] >> point & 1)
                for index in found
            )
            return CoveringSearch(points, block_size, level, size, size, witness)
        size += 1
    return CoveringSearch(points, block_size, level, len(fallback), len(fallback), fallback)


def covering_number(
    points: int,
    block_size: int,
    level: int,
    *,
    budget_ms: float | None = None,
    max_blocks: int | None = None,
) -> int | CoveringSearch:
    """The exact covering number, or the partial search if limits were hit."""
    result = covering_search(points, block_size, level, budget_ms=budget_ms, max_blocks=max_blocks)
    if result.resolved:
        return result.upper
    return result


def covering_certificate(search: CoveringSearch) -> dict:
    """JSON-ready certificate of a resolved covering-number search."""
    if not search.resolved or search.witness is None:
        raise ContractError("a certificate requires a resolved search with a witness design")
    blocks = sorted(sorted(point + 1 for point in block) for block in search.witness)
    return {
        "v": search.points,
        "k": search.block_size,
        "m": search.level,
        "omega": search.upper,
        "blocks": blocks,
    }


def verify_covering_certificate(payload: Mapping) -> bool:
    """Independently re-check a covering certificate.

    Returns True iff the payload is well formed, its block count matches the
    claimed size, and the (1-based) blocks satisfy the covering property for
    the claimed parameters.  Minimality is not re-proved here.
    """
    try:
        points = int(payload["v"])
        block_size = int(payload["k"])
        level = int(payload["m"])
        size = int(payload["omega"])
        raw_blocks = payload["blocks"]
    except (KeyError, TypeError, ValueError):
        return False
    if not isinstance(raw_blocks, (list, tuple)) or len(raw_blocks) != size:
        return False
    try:
        design = CoveringDesign.from_sets(
            points, ([int(point) - 1 for point in block] for block in raw_blocks)
        )
        return is_multilevel_covering(design, block_size, level)
    except (ContractError, TypeError, ValueError):
        return False


@dataclass(frozen=True)
class BoundReport:
    """Lower bounds and the achieved baseline rate for one instance."""

    lower_entropy: Fraction
    lower_covering: int | CoveringSearch
    achievable_scheme1: int
    gap: Fraction


def bound_report(
    num_tasks: int,
    num_demands: int,
    capacity: int,
    modulus: int,
    *,
    covering_budget_ms: float | None = 1000.0,
    max_blocks: int | None = None,
) -> BoundReport:
    """Bundle the entropy bound, covering bound, baseline rate, and gap."""
    entropy = entropy_lower_bound(num_tasks, num_demands, capacity, modulus)
    covering = covering_number(
        num_tasks, capacity, num_demands, budget_ms=covering_budget_ms, max_blocks=max_blocks
    )
    rate = partition_rate(num_tasks, num_demands, capacity)
    return BoundReport(entropy, covering, rate, gap_certificate(num_tasks, num_demands, capacity, modulus))
