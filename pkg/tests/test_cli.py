import json
import re
import subprocess
import sys

import pytest

from isorank.cli import (
    EXIT_FAIL,
    EXIT_FIELD,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_REPEATED,
    EXIT_RESOURCE,
    EXIT_USAGE,
    main,
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out), out


def test_ranks_json(capsys):
    code, doc, _ = run_json(capsys, "ranks", "--g", "2..4")
    assert code == EXIT_OK
    assert doc["status"] == "pass"
    assert [v["closed_form"] for v in doc["data"]["values"]] == ["8", "48", "256"]
    assert len(doc["checks"]) == 15
    assert all(isinstance(c["actual"], str) for c in doc["checks"])


def test_ranks_single_and_usage(capsys):
    code, doc, _ = run_json(capsys, "ranks", "--g", "2..2")
    assert code == EXIT_OK and doc["data"]["values"] == [{"g": "2", "closed_form": "8"}]
    assert run(capsys, "ranks", "--g", "1..1")[0] == EXIT_USAGE
    assert run(capsys, "ranks", "--g", "5..3")[0] == EXIT_USAGE
    assert run(capsys, "ranks", "--g", "2..201")[0] == EXIT_USAGE
    assert run(capsys, "ranks", "--g", "x")[0] == EXIT_USAGE


def test_big_values_are_exact_strings(capsys):
    _, doc, _ = run_json(capsys, "ranks", "--g", "200..200")
    assert doc["data"]["values"][0]["closed_form"] == str(200 * 4**199)


def test_identity(capsys):
    code, doc, _ = run_json(capsys, "identity", "--max-g", "3")
    assert code == EXIT_OK
    pairs = [(c["name"], c["actual"]) for c in doc["checks"] if "subset" in c["name"]]
    assert pairs == [("g=1 subset pairs", "1"), ("g=2 subset pairs", "8"), ("g=3 subset pairs", "48")]
    variance = [c["actual"] for c in doc["checks"] if "variance" in c["name"]]
    assert variance == ["1/2", "1", "3/2"]
    assert run(capsys, "identity", "--max-g", "1")[0] == EXIT_OK
    assert run(capsys, "identity", "--max-g", "20")[0] == EXIT_USAGE


def test_sod(capsys):
    code, doc, _ = run_json(capsys, "sod", "--g", "2", "--k", "1", "--list")
    assert code == EXIT_OK
    assert doc["data"]["count"] == "6" and doc["data"]["rank"] == "7"
    assert doc["data"]["components"][0] == {"subset": [], "dim": "1", "rank": "2"}
    code, doc, _ = run_json(capsys, "sod", "--g", "3", "--k", "0")
    assert (doc["data"]["count"], doc["data"]["rank"]) == ("1", "1")
    assert run(capsys, "sod", "--g", "3", "--k", "3")[0] == EXIT_USAGE


def test_sod_skips_enumeration_when_large(capsys):
    code, doc, _ = run_json(capsys, "sod", "--g", "12", "--k", "11")
    assert code == EXIT_OK and doc["checks"] == []


def test_flips(capsys):
    code, doc, _ = run_json(capsys, "flips", "--g", "3", "--trace")
    assert code == EXIT_OK
    assert [(s["n_i"], s["delta"]) for s in doc["data"]["steps"]] == [("7", "21"), ("22", "22")]
    assert doc["data"]["final"] == "48"
    code, doc, _ = run_json(capsys, "flips", "--g", "2", "--poincare")
    assert doc["data"]["polynomials"][-1] == {"stage": "1", "poly": "1 + 6q + q^2", "value_at_1": "8"}
    code, doc, _ = run_json(capsys, "flips", "--g", "4")
    assert doc["data"]["final"] == "256"
    assert run(capsys, "flips", "--g", "1")[0] == EXIT_USAGE


def test_count(capsys):
    code, doc, _ = run_json(capsys, "count", "--p", "11", "--g", "2", "--params", "1,2,3,4,5", "--naive", "--compare")
    assert code == EXIT_OK
    assert doc["data"]["count"] == doc["data"]["naive_count"] == "144"
    assert doc["data"]["poly_at_p"] == "188" and doc["data"]["difference"] == "-44"


def test_count_error_codes(capsys):
    assert run(capsys, "count", "--p", "2", "--g", "2", "--params", "0,1,2,3,4")[0] == EXIT_FIELD
    assert run(capsys, "count", "--p", "15", "--g", "2", "--params", "0,1,2,3,4")[0] == EXIT_FIELD
    code, out, err = run(capsys, "count", "--p", "11", "--g", "2", "--params", "1,2,3,4,4")
    assert code == EXIT_REPEATED and "a_4 = a_5" in err
    assert run(capsys, "count", "--p", "11", "--g", "3", "--budget", "100")[0] == EXIT_RESOURCE
    assert run(capsys, "count", "--p", "11", "--g", "2", "--params", "1,2,3")[0] == EXIT_USAGE
    assert run(capsys, "count", "--g", "2")[0] == EXIT_USAGE
    code, doc, _ = run_json(capsys, "count", "--p", "2", "--g", "2", "--params", "0,1,2,3,4")
    assert code == EXIT_FIELD and doc["status"] == "error" and doc["error"] == "field"


def test_count_config_and_rule(capsys, tmp_path):
    cfg = tmp_path / "inst.json"
    cfg.write_text(json.dumps({"p": 11, "g": 2, "rule": "consecutive"}))
    code, doc, _ = run_json(capsys, "count", "--config", str(cfg))
    assert code == EXIT_OK and doc["data"]["count"] == "144"
    assert doc["parameters"]["params"] == ["1", "2", "3", "4", "5"]
    cfg.write_text(json.dumps({"p": 5, "g": 2, "params": [0, 1, 2, 3, 4]}))
    assert run_json(capsys, "count", "--config", str(cfg))[1]["data"]["count"] == "56"
    assert run(capsys, "count", "--config", str(tmp_path / "missing.json"))[0] == EXIT_INPUT


def test_count_verbose_streams_witnesses(capsys):
    code, out, err = run(capsys, "count", "--p", "5", "--g", "2", "--params", "0,1,2,3,4", "--verbose")
    lines = err.strip().splitlines()
    assert code == EXIT_OK and len(lines) == 56
    assert all(re.fullmatch(r"1( \d)*|0( \d)*", ln) for ln in lines)
    assert "count: 56" in out


def test_snc(capsys, tmp_path):
    five = tmp_path / "five_points.txt"
    five.write_text("# moment curve nodes\n" + "\n".join(map(str, range(1, 6))) + "\n")
    code, doc, _ = run_json(capsys, "snc", "--k", "2", "--params-file", str(five))
    assert code == EXIT_OK and doc["data"]["subsets_checked"] == str(5 + 10 + 10)
    eleven = tmp_path / "eleven_points.txt"
    eleven.write_text("\n".join(map(str, range(1, 12))))
    assert run(capsys, "snc", "--k", "5", "--params-file", str(eleven))[0] == EXIT_OK
    dup = tmp_path / "dup.txt"
    dup.write_text("1\n2\n1/2\n2\n")
    code, out, err = run(capsys, "snc", "--k", "2", "--params-file", str(dup))
    assert code == EXIT_REPEATED and "positions 2 and 4" in err
    bad = tmp_path / "bad.txt"
    bad.write_text("1\nabc\n")
    assert run(capsys, "snc", "--k", "2", "--params-file", str(bad))[0] == EXIT_USAGE
    assert run(capsys, "snc", "--k", "2", "--params-file", str(tmp_path / "nope"))[0] == EXIT_INPUT


def test_failed_check_exit_code(capsys, monkeypatch):
    import isorank.flip_engine as fe

    monkeypatch.setattr(fe, "l_g", lambda g: 0)
    code, doc, _ = run_json(capsys, "ranks", "--g", "2..2")
    assert code == EXIT_FAIL and doc["status"] == "fail"


def test_experiment(capsys):
    code, doc, _ = run_json(capsys, "experiment", "--g", "2", "--primes", "7,11,13")
    assert code == EXIT_OK
    assert [(r["p"], r["count"], r["difference"]) for r in doc["data"]["rows"]] == [
        ("7", "64", "-28"), ("11", "144", "-44"), ("13", "144", "-104")
    ]
    assert doc["data"]["all_differences_zero"] == "false"


@pytest.mark.parametrize(
    "argv",
    [
        ["ranks", "--g", "2..6"],
        ["flips", "--g", "4", "--trace", "--poincare"],
        ["count", "--p", "7", "--g", "2", "--naive", "--compare"],
        ["sod", "--g", "3", "--k", "2", "--list"],
    ],
)
def test_json_is_byte_identical_and_matches_text(capsys, argv):
    _, _, first = run_json(capsys, *argv)
    _, _, second = run_json(capsys, *argv)
    assert first == second
    doc = json.loads(first)
    _, text, _ = run(capsys, *argv)
    for c in doc["checks"]:
        assert f"{c['name']}" in text and f"actual={c['actual']}" in text
    for key, value in doc["data"].items():
        if isinstance(value, str):
            assert f"{key}: {value}" in text


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "isorank", "ranks", "--g", "2..3", "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "pass"
