import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from indexq.cli import EXIT_OK, EXIT_PROMISE, EXIT_USAGE, RunConfig, main
from indexq.fixtures import KLEIN
from indexq.groups import make_group, trivial_subgroup
from indexq.report import Instance, build_report, default_fixtures, format_probability, render_table


@pytest.fixture(scope="module")
def default_rows():
    return {r.problem: r for r in build_report()}


def test_default_report_matches_every_row(default_rows):
    assert len(default_rows) == 6
    assert all(r.matches for r in default_rows.values())
    assert all(r.queries_used == 1 for r in default_rows.values())


def test_report_cells(default_rows):
    assert default_rows["Index-q HSP: decision"].one_query_deterministic == "Yes"
    general = default_rows["Index-q HSP: identification (general)"]
    assert general.one_query_deterministic == "Yes for q∈{2,3}; otherwise no"
    assert "q=4: 1/2" in general.success_probability
    sk = default_rows["Abelian HSP / Shor-Kitaev (SK)"]
    assert sk.one_query_deterministic == "No"
    assert "q=2: 1/2" in sk.success_probability and "q=5: 4/5" in sk.success_probability


def _row(fx, problem):
    return next(r for r in build_report(fx) if r.problem == problem)


def test_perturbed_djh_fixture_flips_cell():
    fx = default_fixtures()
    fx.djh.append(("unbalanced", (0, 0, 0, 1), 2))
    row = _row(fx, "Deutsch-Jozsa-Hoyer (DJH)")
    assert row.one_query_deterministic == "No (decision)" and not row.matches


def test_perturbed_decision_fixture_flips_cell():
    fx = default_fixtures()
    inst, constant = fx.decision[0]
    fx.decision[0] = (inst, not constant)
    row = _row(fx, "Index-q HSP: decision")
    assert row.one_query_deterministic == "No" and not row.matches


def test_dropping_q4_makes_general_row_claim_yes():
    fx = default_fixtures()
    fx.general_q = (2, 3)
    row = _row(fx, "Index-q HSP: identification (general)")
    assert row.one_query_deterministic == "Yes" and not row.matches


def test_noncyclic_instance_among_cyclic_flips_structured_cell():
    fx = default_fixtures()
    fx.structured_cyclic.append(Instance(KLEIN, trivial_subgroup(KLEIN), (0, 1, 2, 3), 4))
    row = _row(fx, "Index-q HSP: identification (structured outputs)")
    assert row.one_query_deterministic == "No" and not row.matches


def test_sk_row_reacts_to_fixture():
    fx = default_fixtures()
    fx.sk_cyclic = [Instance(KLEIN, trivial_subgroup(KLEIN), (0, 1, 2, 3), 4)]
    row = _row(fx, "Abelian HSP / Shor-Kitaev (SK)")
    assert row.success_probability == "q=4: 0" and not row.matches
    G = make_group([3])
    fx.sk_cyclic = [Instance(G, trivial_subgroup(G), (0, 1, 2), 3)]
    assert _row(fx, "Abelian HSP / Shor-Kitaev (SK)").success_probability == "q=3: 2/3"


def test_render_table_marks_mismatch():
    fx = default_fixtures()
    fx.general_q = (2, 3)
    assert "MISMATCH" in render_table(build_report(fx))
    assert "MISMATCH" not in render_table(build_report())


@pytest.mark.parametrize("p, text", [(0.5, "1/2"), (0.8, "4/5"), (1.0, "1"), (0.0, "0"), (0.123456789012345, "0.123456789012")])
def test_probability_format(p, text):
    assert format_probability(p) == text


# --- CLI --------------------------------------------------------------------


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_decide_left_is_balanced(capsys):
    code, out, _ = run(capsys, "decide", "--function", "left")
    assert code == EXIT_OK and "balanced" in out


@pytest.mark.parametrize("unitary", ["group-qft", "cyclic-qft", "random"])
def test_decide_verdict_independent_of_unitary(capsys, unitary):
    code, out, _ = run(capsys, "decide", "--function", "f1", "--unitary", unitary, "--json")
    assert code == EXIT_OK and json.loads(out)["verdict"] == "constant"


def test_identify_xor(capsys):
    code, out, _ = run(capsys, "identify", "--function", "xor", "--json")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["recovered_subgroup"] == "1,1" and rec["queries"] == 1


def test_identify_constant_gives_whole_group(capsys):
    code, out, _ = run(capsys, "identify", "--function", "f0", "--json", "--exact")
    assert json.loads(out)["recovered_order"] == 4


def test_identify_z3_squared_with_labeling(capsys):
    code, out, _ = run(capsys, "identify", "--group", "Z3xZ3", "--subgroup", "1,1", "--labeling", "2,0,1", "--json")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["correct"] and rec["success_certain"]


def test_sk_reports_exact_success(capsys):
    code, out, _ = run(capsys, "sk", "--function", "xor", "--samples", "3", "--json")
    assert json.loads(out)["single_sample_success"] == "1/2"
    code, out, _ = run(capsys, "sk", "--group", "Z4", "--subgroup", "1", "--samples", "4", "--json")
    rec = json.loads(out)
    assert {s["character"] for s in rec["samples"]} == {"(0)"}
    code, out, _ = run(capsys, "sk", "--group", "Z2xZ2", "--q", "4", "--json")
    rec = json.loads(out)
    assert rec["single_sample_success"] == "0" and "note" in rec


def test_bv_commands(capsys):
    code, out, _ = run(capsys, "bv", "--secret", "101")
    assert code == EXIT_OK and "101" in out
    code, out, _ = run(capsys, "bv", "--secret", "000", "--json")
    assert json.loads(out)["recovered"] == "000"
    code, out, _ = run(capsys, "bv", "--n", "6", "--exhaustive")
    assert code == EXIT_OK and "64/64" in out


def test_labelings_command(capsys):
    code, out, _ = run(capsys, "labelings", "--q", "4", "--json")
    assert code == EXIT_OK and json.loads(out)["affine_count"] == 8
    code, out, _ = run(capsys, "labelings", "--group", "Z4", "--json")
    lines = [json.loads(l) for l in out.splitlines()]
    assert len(lines) == 25


def test_report_command_exits_zero(capsys, tmp_path):
    out_file = tmp_path / "report.jsonl"
    code, out, _ = run(capsys, "report", "--out", str(out_file))
    assert code == EXIT_OK and "MISMATCH" not in out
    records = [json.loads(l) for l in out_file.read_text(encoding="utf-8").splitlines()]
    assert len(records) == 6 and all(r["matches"] for r in records)


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["identify", "--group", "Q8"],
        ["identify", "--group", "Z2xZ2", "--labeling", "0,0"],
        ["identify", "--group", "Z4", "--character", "2"],
        ["decide"],
        ["bv", "--secret", "12"],
        ["labelings", "--q", "9"],
        ["labelings", "--group", "Z2xZ2"],
        ["identify", "--seed", "notanint", "--function", "xor"],
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and err


def test_help_exits_zero(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == EXIT_OK and "identify" in out


def test_promise_violation_exits_two(capsys):
    code, _, err = run(capsys, "decide", "--group", "Z4", "--subgroup", "2", "--q", "4", "--labeling", "0,1")
    assert code == EXIT_PROMISE and "promise" in err


def test_seeded_runs_are_bit_reproducible(capsys, tmp_path):
    outputs = []
    for i in range(2):
        path = tmp_path / f"run{i}.jsonl"
        main(["sk", "--group", "Z2xZ6", "--samples", "5", "--seed", "9", "--out", str(path)])
        main(["identify", "--group", "Z4", "--labeling", "0,1,3,2", "--seed", "3", "--out", str(tmp_path / f"id{i}.jsonl")])
        outputs.append((path.read_bytes(), (tmp_path / f"id{i}.jsonl").read_bytes()))
    capsys.readouterr()
    assert outputs[0] == outputs[1]


configs = st.builds(
    RunConfig,
    command=st.sampled_from(["decide", "identify", "sk", "bv", "labelings", "report"]),
    group=st.none() | st.sampled_from(["Z2xZ2", "Z4", "Z3xZ3"]),
    subgroup=st.none() | st.sampled_from(["1,1", "2", "1,0;0,1"]),
    q=st.none() | st.integers(1, 8),
    labeling=st.none() | st.sampled_from(["0,1", "2,0,1"]),
    character=st.integers(0, 7),
    unitary=st.sampled_from(["group-qft", "cyclic-qft", "random"]),
    seed=st.integers(0, 2**31),
    samples=st.integers(1, 50),
    exact=st.booleans(),
    out=st.none() | st.sampled_from(["/tmp/x.jsonl"]),
)


@given(configs)
def test_run_config_canonical_round_trip(cfg):
    text = cfg.canonical()
    assert RunConfig.from_canonical(text) == cfg
    assert RunConfig.from_canonical(text).canonical() == text
