"""End-to-end tests for the command-line interface."""

from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linsep.cli import hybrid_solution, main
from linsep.gf import FieldSpec
from linsep.matfq import MatrixFq
from linsep.model import (
    DemandMatrix,
    ProblemInstance,
    format_demand_text,
    random_full_rank_demand,
    verify_solution,
)

F101 = FieldSpec(101)

VANDERMONDE_4x3 = MatrixFq.from_rows(F101, [[1, 1, 1, 1], [1, 2, 3, 4], [1, 4, 9, 16]])


def run_cli(capsys, argv: list[str]) -> tuple[int, str]:
    code = main(argv)
    return code, capsys.readouterr().out


def parse_csv(text: str) -> tuple[list[str], list[list[str]]]:
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


# --- design -----------------------------------------------------------------


def test_design_reproduces_the_worked_three_demand_instance(tmp_path, capsys):
    demand_file = tmp_path / "demand.txt"
    demand_file.write_text(format_demand_text(VANDERMONDE_4x3))
    code, out = run_cli(
        capsys,
        ["design", "-K", "4", "-L", "3", "-M", "2", "--scheme", "s1", "--demand", str(demand_file)],
    )
    payload = json.loads(out)
    assert code == 0
    assert payload["rate"] == 3
    assert payload["assignment"] == [[1, 4], [2, 4], [3, 4]]
    assert payload["scheme"] == "s1"
    assert payload["verified"] is True


def test_design_scheme2_matches_the_worked_dense_instance(capsys):
    code, out = run_cli(capsys, ["design", "-K", "6", "-L", "2", "-M", "4", "--scheme", "s2"])
    payload = json.loads(out)
    assert code == 0
    assert payload["rate"] == 3
    assert {frozenset(s) for s in payload["assignment"]} == {
        frozenset({1, 2, 3, 4}),
        frozenset({1, 2, 5, 6}),
        frozenset({3, 4, 5, 6}),
    }


def test_design_auto_keeps_scheme1_when_nothing_beats_it(capsys):
    code, out = run_cli(capsys, ["design", "-K", "8", "-L", "2", "-M", "3", "--scheme", "auto"])
    payload = json.loads(out)
    assert code == 0
    assert payload["scheme"] == "s1"
    assert payload["rate"] == 4
    assert payload["q"] == 11  # default modulus: smallest prime above K


def test_design_auto_uses_a_hybrid_split_when_it_beats_scheme1(capsys):
    code, out = run_cli(capsys, ["design", "-K", "40", "-L", "3", "-M", "15", "--scheme", "auto"])
    payload = json.loads(out)
    assert code == 0
    assert payload["scheme"] == "hybrid"
    assert payload["parts"] == 2
    assert payload["rate"] == 8
    assert payload["verified"] is True


def test_design_gamma_scheme_builds_the_requested_group_size(capsys):
    code, out = run_cli(
        capsys, ["design", "-K", "6", "-L", "2", "-M", "2", "--scheme", "gamma", "--gamma", "2"]
    )
    payload = json.loads(out)
    assert code == 0
    assert payload["gamma"] == 2
    assert payload["rate"] == 6  # disjoint assignment ships every output raw
    assert payload["servers"] == 3


def test_design_round_trips_through_verify(tmp_path, capsys):
    demand_file = tmp_path / "demand.txt"
    demand_file.write_text(format_demand_text(VANDERMONDE_4x3))
    solution_file = tmp_path / "solution.json"
    code, _ = run_cli(
        capsys,
        [
            "design", "-K", "4", "-L", "3", "-M", "2",
            "--demand", str(demand_file), "--out", str(solution_file),
        ],
    )
    assert code == 0
    code, out = run_cli(capsys, ["verify", str(solution_file), str(demand_file)])
    payload = json.loads(out)
    assert code == 0
    assert payload["verified"] is True
    assert payload["issues"] == []


def test_verify_flags_a_corrupted_decoding_matrix(tmp_path, capsys):
    demand_file = tmp_path / "demand.txt"
    demand_file.write_text(format_demand_text(VANDERMONDE_4x3))
    solution_file = tmp_path / "solution.json"
    run_cli(capsys, ["design", "-M", "2", "--demand", str(demand_file), "--out", str(solution_file)])
    payload = json.loads(solution_file.read_text())
    payload["C"][0][0] = (payload["C"][0][0] + 1) % payload["q"]
    solution_file.write_text(json.dumps(payload))
    code, out = run_cli(capsys, ["verify", str(solution_file), str(demand_file)])
    assert code == 1
    assert json.loads(out)["verified"] is False


# --- usage errors -----------------------------------------------------------


def test_design_without_capacity_is_a_usage_error(capsys):
    assert main(["design", "-K", "4", "-L", "3"]) == 2


def test_design_flag_contradicting_the_demand_file_is_a_usage_error(tmp_path, capsys):
    demand_file = tmp_path / "demand.txt"
    demand_file.write_text(format_demand_text(VANDERMONDE_4x3))
    assert main(["design", "-K", "5", "-M", "2", "--demand", str(demand_file)]) == 2


def test_unknown_scheme_is_a_usage_error(capsys):
    assert main(["design", "-K", "4", "-L", "2", "-M", "2", "--scheme", "bogus"]) == 2


def test_gamma_flag_must_agree_with_the_scheme_parameter(capsys):
    argv = ["design", "-K", "6", "-L", "2", "-M", "3"]
    assert main([*argv, "--scheme", "gamma:2", "--gamma", "3"]) == 2
    assert main([*argv, "--scheme", "gamma"]) == 2  # no group size given
    assert main([*argv, "--scheme", "gamma:2"]) == 0


def test_out_of_regime_scheme2_request_is_a_usage_error(capsys):
    assert main(["design", "-K", "6", "-L", "2", "-M", "2", "--scheme", "s2"]) == 2


def test_unknown_subcommand_exits_with_the_usage_code(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["explode"])
    assert excinfo.value.code == 2


def test_missing_solution_file_is_a_usage_error(tmp_path, capsys):
    demand_file = tmp_path / "demand.txt"
    demand_file.write_text(format_demand_text(VANDERMONDE_4x3))
    assert main(["verify", str(tmp_path / "nope.json"), str(demand_file)]) == 2


# --- curve ------------------------------------------------------------------


def test_curve_lists_every_group_size_tradeoff(capsys):
    code, out = run_cli(capsys, ["curve", "R-vs-N", "-K", "460", "-L", "12", "-M", "12"])
    header, rows = parse_csv(out)
    assert code == 0
    assert header == ["group_size", "servers", "rate"]
    assert len(rows) == 12
    pairs = {(int(r[1]), int(r[2])) for r in rows}
    assert {(240, 240), (126, 252), (88, 264), (69, 276), (52, 312), (39, 460)} <= pairs


def test_curve_capacity_sweep_has_uncoded_and_centralized_endpoints(capsys):
    code, out = run_cli(capsys, ["curve", "R-vs-M", "-K", "30", "-L", "5", "-q", "31,211"])
    header, rows = parse_csv(out)
    assert code == 0
    assert header == ["M", "R_scheme1", "R_scheme2", "entropy_q31", "entropy_q211"]
    rates = [int(r[1]) for r in rows]
    assert rates[0] == 30 and rates[-1] == 5
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    # the dense-regime column appears exactly from M >= K/2 on
    assert [r[2] == "" for r in rows] == [2 * m < 30 for m in range(1, 31)]
    assert float(rows[-1][3]) == 5.0  # with M = K the bound is exactly L
    # a larger alphabet never weakens the entropy bound
    assert all(float(r[3]) <= float(r[4]) + 1e-12 for r in rows)


def test_curve_demand_sweep_covers_the_dense_regime(capsys):
    code, out = run_cli(capsys, ["curve", "R-vs-L", "-K", "12", "-M", "6", "-q", "13"])
    header, rows = parse_csv(out)
    assert code == 0
    assert header == ["L", "R_scheme1", "R_scheme2", "entropy_q13"]
    assert len(rows) == 12
    assert all(r[2] != "" for r in rows)
    assert int(rows[-1][1]) == 12  # L = K forces every output through


def test_curve_without_the_sweep_anchors_is_a_usage_error(capsys):
    assert main(["curve", "R-vs-N", "-K", "10", "-L", "2"]) == 2
    assert main(["curve", "R-vs-M", "-K", "10"]) == 2
    assert main(["curve", "R-vs-L", "-K", "10"]) == 2


# --- bound / cover ----------------------------------------------------------


def test_bound_reports_a_factor_two_certificate_on_divisible_instances(capsys):
    code, out = run_cli(capsys, ["bound", "-K", "12", "-L", "3", "-M", "4", "-q", "13"])
    payload = json.loads(out)
    assert code == 0
    assert payload["gap_guarantee"] == 2
    assert payload["gap"] <= 2.0
    assert payload["entropy_lower_bound"] <= payload["scheme1_rate"]
    assert payload["scheme1_rate"] == 6


def test_bound_resolves_small_covering_numbers(capsys):
    code, out = run_cli(capsys, ["bound", "-K", "8", "-L", "2", "-M", "3", "-q", "11"])
    payload = json.loads(out)
    assert code == 0
    assert payload["covering_number"] == 4
    assert payload["scheme1_rate"] == 4


def test_cover_certifies_the_pair_covering_number(capsys):
    code, out = run_cli(capsys, ["cover", "-v", "6", "-k", "2", "-m", "2"])
    payload = json.loads(out)
    assert code == 0
    assert payload["omega"] == 4
    assert payload["verified"] is True
    assert len(payload["blocks"]) == 4


def test_cover_with_no_budget_reports_an_honest_bracket(capsys):
    code, out = run_cli(capsys, ["cover", "-v", "8", "-k", "3", "-m", "2", "--budget-ms", "0"])
    payload = json.loads(out)
    assert code == 0
    assert payload["omega"] is None
    assert payload["lower"] <= 4 <= payload["upper"]


# --- fuzz -------------------------------------------------------------------


def test_fuzz_emits_one_parseable_record_per_trial(tmp_path, capsys):
    out_file = tmp_path / "fuzz.jsonl"
    code, _ = run_cli(
        capsys, ["fuzz", "-K", "3", "-q", "2,5", "--trials", "2", "--out", str(out_file)]
    )
    assert code == 0
    records = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert records
    for record in records:
        assert {"K", "L", "M", "q", "scheme", "rate", "pass", "seed"} <= record.keys()
        assert record["pass"] is True
        assert record["q"] in {2, 5}


# --- hybrid construction ----------------------------------------------------


def test_hybrid_solution_recovers_rank_deficient_blocks():
    spec = FieldSpec(5)
    demand = DemandMatrix(MatrixFq.from_rows(spec, [[1, 1, 0, 0], [2, 2, 0, 1]]))
    inst = ProblemInstance(4, 2, 2, spec)
    solution = hybrid_solution(demand, 2, 2)
    assert verify_solution(inst, demand, solution).passed


def test_hybrid_solution_skips_all_zero_blocks():
    spec = FieldSpec(5)
    demand = DemandMatrix(MatrixFq.from_rows(spec, [[0, 0, 1, 1], [0, 0, 1, 2]]))
    inst = ProblemInstance(4, 2, 2, spec)
    solution = hybrid_solution(demand, 2, 2)
    assert verify_solution(inst, demand, solution).passed
    assert solution.assignment.num_servers == 1


@given(st.data())
@settings(max_examples=25, deadline=None)
def test_hybrid_solutions_verify_on_random_dense_instances(data):
    num_tasks = data.draw(st.integers(4, 12), label="num_tasks")
    num_demands = data.draw(st.integers(1, num_tasks), label="num_demands")
    capacity = data.draw(st.integers((num_tasks + 1) // 2, num_tasks), label="capacity")
    parts = data.draw(st.integers(2, 4), label="parts")
    seed = data.draw(st.integers(0, 2**32 - 1), label="seed")
    inst = ProblemInstance(num_tasks, num_demands, capacity, FieldSpec(11))
    demand = random_full_rank_demand(inst, np.random.default_rng(seed))
    solution = hybrid_solution(demand, capacity, parts)
    assert verify_solution(inst, demand, solution).passed


# --- packaging --------------------------------------------------------------


def test_module_entry_point_runs_as_a_subprocess():
    result = subprocess.run(
        [sys.executable, "-m", "linsep.cli", "cover", "-v", "4", "-k", "2", "-m", "1"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["omega"] == 2
