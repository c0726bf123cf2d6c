"""End-to-end tests of the nilconj command line."""

import json

import pytest

from nilconj import CliConfig, main, resolve_group


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# =============================================================================
# nf
# =============================================================================

def test_nf_pushes_generators(capsys):
    code, out, _ = run_cli(capsys, "nf", "--group", "gm:1", "b1 a1")
    assert code == 0
    assert out.splitlines()[0] == "a1 b1 c1"
    assert "z = [1]" in out


def test_nf_identity(capsys):
    code, out, _ = run_cli(capsys, "nf", "--group", "gm:2", "")
    assert code == 0
    assert out.splitlines()[0] == "1"


def test_nf_witness_word(capsys):
    code, out, _ = run_cli(capsys, "nf", "--group", "gm:1", "b1 b2^2 a1^-2 b1^-2 a1^2 b1^2")
    assert out.splitlines()[0] == "b1 b2^2 c1^-4"


def test_nf_json_and_csv(capsys):
    _, out, _ = run_cli(capsys, "nf", "--group", "heisenberg", "a2 a1", "--format", "json")
    data = json.loads(out)
    assert data == {"normal_form": "a1 a2 c1^-1", "x": [1, 1], "z": [-1], "t": []}

    _, out, _ = run_cli(capsys, "nf", "--group", "heisenberg", "a2 a1", "--format", "csv")
    assert out.splitlines() == ["generator,exponent", "a1,1", "a2,1", "c1,-1"]


def test_nf_parse_error_names_token(capsys):
    code, out, err = run_cli(capsys, "nf", "--group", "gm:1", "a1 q7^2")
    assert code == 2
    assert "q7^2" in err
    assert out == ""


# =============================================================================
# conj and cl
# =============================================================================

def test_conj_witness(capsys):
    code, out, _ = run_cli(capsys, "conj", "--group", "gm:2", "b1 b2^2 a1^-2 b1^-2 a1^2 b1^2", "b1 b2^2")
    assert code == 0
    assert out.splitlines() == ["conjugate", "witness: a1^4 a2^8", "length: 12"]


def test_conj_not_conjugate(capsys):
    code, out, _ = run_cli(capsys, "conj", "--group", "gm:1", "c1", "")
    assert code == 1
    assert out.strip() == "not-conjugate"


def test_conj_equal_words(capsys):
    code, out, _ = run_cli(capsys, "conj", "--group", "gm:3", "a1 b2 c3", "a1 b2 c3")
    assert code == 0
    assert "witness: 1" in out and "length: 0" in out


def test_conj_json(capsys):
    code, out, _ = run_cli(capsys, "conj", "--group", "gm:1", "b1 b2 a1^-1 b1^-1 a1 b1", "b1 b2", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["conjugate"] is True
    assert data["a_exponents"] == [1, 0, 0]
    assert data["length"] == 1
    assert data["optimal"] and data["exact"]


def test_conj_dump_system(capsys):
    code, out, _ = run_cli(
        capsys, "conj", "--group", "gm:1", "b1 b2^2 a1^-2 b1^-2 a1^2 b1^2", "b1 b2^2", "--dump-system"
    )
    lines = out.splitlines()
    assert code == 0
    m_at = lines.index("# M")
    assert lines[m_at + 1: m_at + 3] == ["1,3", "1,0,0"]
    b_at = lines.index("# b")
    assert lines[b_at + 1: b_at + 3] == ["1,1", "4"]
    assert "# M'" in lines and "# Pmat" in lines
    assert lines[-1] == "length: 4"


def test_conj_budget_exceeded(capsys):
    code, out, err = run_cli(
        capsys, "conj", "--group", "gm:2", "b1 b2^2 a1^-2 b1^-2 a1^2 b1^2", "b1 b2^2", "--budget", "1"
    )
    assert code == 3
    assert out.startswith("conjugate")
    assert "budget" in err


def test_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("NILCONJ_BUDGET", "1")
    code, _, _ = run_cli(capsys, "cl", "--group", "gm:2", "b1 b2^2 a1^-2 b1^-2 a1^2 b1^2", "b1 b2^2")
    assert code == 3


def test_cl_heisenberg_file(capsys, assets_dir):
    code, out, _ = run_cli(capsys, "cl", "--group", str(assets_dir / "heisenberg.txt"), "a1 a2", "a1 a2 c1^3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "3"
    assert lines[1] == "minimizer: a1^-3"


def test_cl_torsion_warns_upper_bound(capsys, assets_dir):
    code, out, err = run_cli(capsys, "cl", "--group", str(assets_dir / "torsion.txt"), "a1 a3", "a3 a1")
    assert code == 0
    assert "upper bound" in err


def test_cl_not_conjugate(capsys):
    code, out, _ = run_cli(capsys, "cl", "--group", "gm:2", "a1", "b1")
    assert code == 1
    assert out.strip() == "not-conjugate"


# =============================================================================
# gm, selftest, survey
# =============================================================================

def test_gm_single_row(capsys):
    code, out, _ = run_cli(capsys, "gm", "--m", "2", "--n", "2..2")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "m,n,input_size,cl,predicted,minor_bound,wall_time_s"
    assert lines[1].startswith("2,2,14,12,12,")
    assert lines[-1] == "# slope=absent"


def test_gm_csv_and_json_agree(capsys):
    _, out_csv, _ = run_cli(capsys, "gm", "--m", "1", "--n", "4..8", "--format", "csv")
    _, out_json, _ = run_cli(capsys, "gm", "--m", "1", "--n", "4..8", "--format", "json")
    rows = [line.split(",") for line in out_csv.splitlines()[1:-1]]
    data = json.loads(out_json)
    assert [int(r[3]) for r in rows] == [r["cl"] for r in data["records"]] == [16, 25, 36, 49, 64]
    assert [int(r[5]) for r in rows] == [r["minor_bound"] for r in data["records"]]
    assert float(out_csv.splitlines()[-1].split("=")[1]) == pytest.approx(data["slope"], abs=1e-6)


def test_gm_m3_slope(capsys):
    code, out, _ = run_cli(capsys, "gm", "--m", "3", "--n", "4..16")
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 1 + 13 + 1
    assert abs(float(lines[-1].split("=")[1]) - 4) < 0.15


def test_gm_rejects_bad_range(capsys):
    code, _, _ = run_cli(capsys, "gm", "--m", "1", "--n", "9..3")
    assert code == 2


def test_selftest_passes_and_is_deterministic(capsys):
    code, first, _ = run_cli(capsys, "selftest", "--seed", "4")
    _, second, _ = run_cli(capsys, "selftest", "--seed", "4")
    assert code == 0
    assert first == second
    assert "all properties hold" in first


def test_selftest_negative_control(capsys):
    code, out, _ = run_cli(capsys, "selftest", "--inject", "antisymmetry")
    assert code == 1
    assert "FAIL presentation.antisymmetry" in out


def test_survey_json(capsys):
    code, out, _ = run_cli(capsys, "survey", "--group", "gm:2", "--samples", "5", "--size", "4", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["samples"] == 5
    assert data["max_cl"] <= 4


# =============================================================================
# Configuration and errors
# =============================================================================

def test_no_command_prints_help(capsys):
    code, out, _ = run_cli(capsys)
    assert code == 2
    assert "usage" in out.lower()


def test_missing_group_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["nf", "a1"])
    assert excinfo.value.code == 2


@pytest.mark.parametrize("group", ["gm:x", "gm:0", "no/such/file.txt"])
def test_bad_group_sources(capsys, group):
    code, _, err = run_cli(capsys, "nf", "--group", group, "a1")
    assert code == 2
    assert "[x]" in err


def test_invalid_presentation_file(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2 1 0\ngamma 1 2 1 1\ngamma 1 2 1 2\n", encoding="utf-8")
    code, _, err = run_cli(capsys, "nf", "--group", str(path), "a1")
    assert code == 2
    assert "antisymmetry" in err


def test_nonpositive_budget(capsys):
    code, _, _ = run_cli(capsys, "nf", "--group", "gm:1", "a1", "--budget", "0")
    assert code == 2


def test_config_validation():
    with pytest.raises(ValueError):
        CliConfig(group="gm:1", format="xml", budget=10, seed=0)
    assert CliConfig(group="gm:1", format="text", budget=10, seed=0).budget == 10
    assert resolve_group("heisenberg").k == 2


def test_directory_as_group_is_an_error(capsys, tmp_path):
    code, out, err = run_cli(capsys, "nf", "--group", str(tmp_path), "a1")
    assert code == 2
    assert out == ""
    assert "[x]" in err
