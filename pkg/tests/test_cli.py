import csv
import io
import json

import pytest

from lamina.cli import EXIT_COMPUTATION, EXIT_CONFIG, EXIT_PASS, EXIT_VIOLATIONS, main
from lamina.config import ConfigError, load, validate


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


BASE = {"field": {"alpha": "0", "precision": 8},
        "representation": {"kind": "strubel_unipotent"},
        "words": ["AAB", "a", "Ab"],
        "commands": ["lengths"]}


# configuration --------------------------------------------------------------

def test_unknown_key_is_a_config_error(tmp_path):
    code, _, err = run("run", write(tmp_path, dict(BASE, colour="red")))
    assert code == EXIT_CONFIG and "colour" in err


def test_missing_seed_for_sampled_command(tmp_path):
    cfg = dict(BASE, commands=[{"name": "cr-axioms", "samples": 2}])
    code, _, err = run("run", write(tmp_path, cfg))
    assert code == EXIT_CONFIG and "seed" in err
    with pytest.raises(ConfigError):
        validate(cfg)


def test_bad_json_and_missing_file(tmp_path):
    assert run("run", write(tmp_path, "{not json"))[0] == EXIT_CONFIG
    assert run("run", str(tmp_path / "absent.json"))[0] == EXIT_CONFIG


def test_bad_field_value(tmp_path):
    cfg = dict(BASE, field={"alpha": "banana"})
    assert run("run", write(tmp_path, cfg))[0] == EXIT_CONFIG


def test_seed_override_satisfies_validation(tmp_path):
    cfg = dict(BASE, commands=[{"name": "barycenter-check", "samples": 2}])
    path = write(tmp_path, cfg)
    assert load(path, {"seed": 4}).seed == 4
    code, out, _ = run("run", path, "--seed", "4")
    assert code == EXIT_PASS
    assert json.loads(out)["config"]["seed"] == 4


# reproduce ------------------------------------------------------------------

def test_reproduce_all_alphas_pass():
    code, out, err = run("reproduce", "strubel", "--alpha=-1,0,1/4,1/2,3/4,1,2,sqrt(2)-1")
    assert code == EXIT_PASS, err
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 16
    assert all(r["match"] == "true" for r in rows)
    by = {(r["alpha"], r["word"]): r for r in rows}
    assert by[("0", "AAB")]["computed"] == "(-4,0)"
    assert by[("1/4", "AAB")]["computed"] == "(-3,0)"
    assert by[("1", "AAB")]["computed_decimal"] == "-2.0"


def test_reproduce_reports_planted_disagreement(tmp_path):
    exp = write(tmp_path, {"0": {"AAB": "-5"}}, "exp.json")
    code, out, err = run("reproduce", "strubel", "--alpha=0", "--expected", exp)
    assert code == EXIT_VIOLATIONS
    assert "diff:" in err and "expected" in err
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["match"] for r in rows] == ["false", "true"]


def test_reproduce_json_and_out_file(tmp_path):
    target = tmp_path / "t.json"
    code, out, _ = run("reproduce", "strubel", "--alpha=1/2", "--format", "json", "--out", str(target))
    assert code == EXIT_PASS and out == ""
    doc = json.loads(target.read_text())
    rows = doc["results"][0]["rows"]
    assert {r["word"] for r in rows} == {"AAB", "Ab"}
    assert all(set(r["computed"]) == {"a", "b", "decimal"} for r in rows)


# run ------------------------------------------------------------------------

def test_lengths_rows(tmp_path):
    code, out, _ = run("run", write(tmp_path, BASE))
    assert code == EXIT_PASS
    rows = {r["word"]: r for r in json.loads(out)["results"][0]["rows"]}
    aab = rows["AAB"]
    assert (aab["L"]["a"], aab["L"]["b"]) == ("8", "0")
    assert aab["agree"] is True and aab["shilov_regular"] is True
    assert rows["a"]["L"]["a"] == "0" and rows["a"]["shilov_regular"] is False


def test_csv_carries_exact_and_decimal(tmp_path):
    target = tmp_path / "out.csv"
    cfg = dict(BASE, output={"format": "csv"})
    code, _, _ = run("run", write(tmp_path, cfg), "--out", str(target))
    assert code == EXIT_PASS
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    aab = next(r for r in rows if r["word"] == "AAB")
    assert aab["L"] == "(8,0)" and aab["L_decimal"] == "8.0"
    assert aab["T_valuation"] == "(-4,0)" and aab["agree"] == "true"


def test_identical_seed_gives_identical_output(tmp_path):
    cfg = dict(BASE, seed=11, field={"alpha": "0", "precision": 6},
               commands=[{"name": "cr-axioms", "samples": 3, "domain_max_len": 3},
                         {"name": "barycenter-check", "samples": 2}])
    path = write(tmp_path, cfg)
    first, second = run("run", path), run("run", path)
    assert first[0] == EXIT_PASS, first[2]
    assert first[1] == second[1]


def test_computation_error_exit(tmp_path):
    cfg = {"field": {"alpha": "sqrt(2)-1", "precision": 8},
           "representation": {"kind": "strubel_unipotent"},
           "words": ["AAB"], "seed": 1,
           "commands": [{"name": "atom-scan", "candidates": ["AAB"], "depth": 2}]}
    code, _, err = run("run", write(tmp_path, cfg))
    assert code == EXIT_COMPUTATION and "computation error" in err
