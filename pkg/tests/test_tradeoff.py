"""Group-size family: rate versus server count, and the mixed construction."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linsep.errors import ContractError, WrongRegimeError
from linsep.gf import FieldSpec
from linsep.matfq import MatrixFq
from linsep.model import (
    DemandMatrix,
    ProblemInstance,
    random_full_rank_demand,
    verify_solution,
)
from linsep.scheme1 import assign_case1, scheme1
from linsep.tradeoff import (
    assign_gamma,
    mixed_rate,
    scheme_gamma,
    scheme_mixed,
    tradeoff_curve,
    tradeoff_point,
)

F7 = FieldSpec(7)
F463 = FieldSpec(463)


def test_point_formulas_cover_the_big_reference_curve():
    # 460 tasks, 12 demands, capacity 12: the classic rate-vs-servers staircase.
    expected = {1: (240, 240), 2: (126, 252), 3: (88, 264), 4: (69, 276), 6: (52, 312), 12: (39, 460)}
    for g, (servers, rate) in expected.items():
        point = tradeoff_point(460, 12, 12, g)
        assert (point.servers, point.rate) == (servers, rate)
    curve = tradeoff_curve(460, 12, 12)
    assert [(p.servers, p.rate) for p in curve if p.group_size in expected] == [
        expected[g] for g in sorted(expected)
    ]


def test_group_size_one_formulas_match_the_baseline():
    point = tradeoff_point(8, 2, 3, 1)
    assert point.rate == 4
    assert point.servers == 4


def test_curve_is_monotone_on_the_even_group_sizes():
    # Ceiling effects at group sizes that do not divide the demand count can
    # bump the server count (e.g. group size 5 here needs 75 servers, more
    # than group size 4's 69), so the staircase is read off the divisors.
    divisors = {1, 2, 3, 4, 6, 12}
    curve = [p for p in tradeoff_curve(460, 12, 12) if p.group_size in divisors]
    rates = [p.rate for p in curve]
    servers = [p.servers for p in curve]
    assert rates == sorted(rates)
    assert servers == sorted(servers, reverse=True)


def test_assign_gamma_groups_consecutive_designated_columns():
    rng = np.random.default_rng(9)
    inst = ProblemInstance(6, 4, 4, F7)
    demand = random_full_rank_demand(inst, rng)
    assignment = assign_gamma(demand, capacity=4, group_size=2)
    assert assignment.num_servers == 2
    chosen = sorted(set(range(6)) - (assignment.sets[0] & assignment.sets[1]))
    union = assignment.sets[0] | assignment.sets[1]
    assert union == set(range(6))
    assert all(len(s) <= 4 for s in assignment.sets)
    # Group size 1 degenerates to the one-column-per-server assignment.
    assert assign_gamma(demand, 5, 1) == assign_case1(demand, 5)


def test_assign_gamma_regime_guard():
    rng = np.random.default_rng(10)
    demand = random_full_rank_demand(ProblemInstance(8, 2, 3, F7), rng)
    with pytest.raises(WrongRegimeError):
        assign_gamma(demand, capacity=3, group_size=2)
    with pytest.raises(ContractError):
        assign_gamma(demand, capacity=3, group_size=5)


def test_disjoint_placement_matches_raw_shipping_rate():
    demand = DemandMatrix(MatrixFq.from_rows(F7, [[1] * 6, [0, 1, 2, 3, 4, 5]]))
    disjoint = scheme_gamma(demand, capacity=2, group_size=2)
    assert disjoint.rate == 6
    assert disjoint.servers == 3
    baseline = scheme1(demand, capacity=2)
    assert baseline.rate == 4
    inst = ProblemInstance(6, 2, 2, F7)
    assert verify_solution(inst, demand, disjoint).passed


def test_group_size_one_is_exactly_the_baseline_construction():
    rng = np.random.default_rng(12)
    inst = ProblemInstance(10, 3, 4, F7)
    demand = random_full_rank_demand(inst, rng)
    a = scheme_gamma(demand, 4, 1)
    b = scheme1(demand, 4)
    assert a.encode == b.encode
    assert a.decode == b.decode
    assert a.assignment == b.assignment
    assert a.row_server == b.row_server


@pytest.mark.parametrize("group_size,servers,rate", [(1, 240, 240), (2, 126, 252), (6, 52, 312), (12, 39, 460)])
def test_big_instance_constructions_achieve_their_points(group_size, servers, rate):
    rng = np.random.default_rng(group_size)
    inst = ProblemInstance(460, 12, 12, F463)
    demand = random_full_rank_demand(inst, rng)
    sol = scheme_gamma(demand, 12, group_size)
    assert sol.rate == rate
    assert verify_solution(inst, demand, sol).passed
    point = tradeoff_point(460, 12, 12, group_size)
    if sol.rate < 460:
        assert sol.servers == point.servers
    else:
        assert sol.servers == 39  # raw shipping packs capacity-many per server


def test_narrow_last_chunk_pads_to_the_formula_rate():
    # 25 tasks, 4 demands, capacity 4, groups of 2: chunk width 6 leaves a
    # final 1-column chunk whose rank cannot reach 4 — fillers make up the gap.
    rng = np.random.default_rng(33)
    inst = ProblemInstance(25, 4, 4, F7)
    demand = random_full_rank_demand(inst, rng)
    sol = scheme_gamma(demand, 4, 2)
    point = tradeoff_point(25, 4, 4, 2)
    assert sol.rate == point.rate == 20
    assert sol.servers == point.servers == 10
    assert verify_solution(inst, demand, sol).passed


def test_mixed_blocks_hit_the_time_shared_rate():
    rng = np.random.default_rng(90)
    inst = ProblemInstance(90, 12, 12, F101 := FieldSpec(101))
    demand = random_full_rank_demand(inst, rng)
    sol = scheme_mixed(demand, 12, group_size_left=1, group_size_right=2, split=46)
    assert sol.rate == mixed_rate(90, 12, 12, 1, 2, 46) == 48
    assert sol.servers == 36
    assert verify_solution(inst, demand, sol).passed


def test_mixed_with_degenerate_split_equals_the_pure_construction():
    # 56 columns are a multiple of both chunk widths (8 for group size 1,
    # 7 for group size 2), so both degenerate splits are well defined.
    rng = np.random.default_rng(92)
    inst = ProblemInstance(56, 4, 5, FieldSpec(97))
    demand = random_full_rank_demand(inst, rng)
    pure = scheme_gamma(demand, 5, 1)
    left_only = scheme_mixed(demand, 5, 1, 2, split=56)
    assert left_only.encode == pure.encode
    assert left_only.decode == pure.decode
    assert left_only.assignment == pure.assignment
    right_all = scheme_mixed(demand, 5, 2, 1, split=0)
    assert right_all.encode == pure.encode


def test_mixed_divisibility_errors_name_the_failing_block():
    rng = np.random.default_rng(13)
    inst = ProblemInstance(90, 12, 12, FieldSpec(101))
    demand = random_full_rank_demand(inst, rng)
    with pytest.raises(ContractError, match="left"):
        scheme_mixed(demand, 12, 1, 2, split=24)  # 23 does not divide 24
    with pytest.raises(ContractError, match="right"):
        scheme_mixed(demand, 12, 1, 2, split=46 + 23)  # right block 21, width 22
    with pytest.raises(ContractError, match="demand count"):
        scheme_mixed(demand, 12, 5, 2, split=0)


@given(st.integers(2, 30), st.data())
@settings(max_examples=60, deadline=None)
def test_formula_monotonicity_across_group_sizes(k: int, data):
    n_demands = data.draw(st.integers(1, k), label="num_demands")
    capacity = data.draw(st.integers(1, k), label="capacity")
    curve = tradeoff_curve(k, n_demands, capacity)
    coded = [p for p in curve if p.rate < k]
    # Larger groups never lower the rate (chunks only get narrower).
    for a, b in zip(coded, coded[1:]):
        assert a.rate <= b.rate
    # Where the divisibility conditions hold, both coordinates collapse to
    # the exact products rate*width = servers*group*width = L*K, and the
    # server count is non-increasing; ceilings can break this otherwise.
    exact = [
        p
        for p in coded
        if n_demands % p.group_size == 0 and k % (n_demands + capacity - p.group_size) == 0
    ]
    for p in exact:
        width = n_demands + capacity - p.group_size
        assert p.rate * width == n_demands * k
        assert p.servers * p.group_size * width == n_demands * k
    for a, b in zip(exact, exact[1:]):
        assert a.servers >= b.servers


@given(st.sampled_from([3, 101]), st.integers(2, 10), st.data())
@settings(max_examples=50, deadline=None)
def test_constructions_meet_their_points_on_random_instances(q, k, data):
    n_demands = data.draw(st.integers(1, k), label="num_demands")
    capacity = data.draw(st.integers(1, k), label="capacity")
    group_size = data.draw(st.integers(1, n_demands), label="group_size")
    seed = data.draw(st.integers(0, 2**32 - 1), label="seed")
    inst = ProblemInstance(k, n_demands, capacity, FieldSpec(q))
    demand = random_full_rank_demand(inst, np.random.default_rng(seed))
    sol = scheme_gamma(demand, capacity, group_size)
    point = tradeoff_point(k, n_demands, capacity, group_size)
    assert sol.rate == point.rate
    if point.rate < k:
        assert sol.servers == point.servers
    assert verify_solution(inst, demand, sol).passed
