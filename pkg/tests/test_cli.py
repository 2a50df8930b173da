import json
from pathlib import Path

import jsonschema
import pytest
from click.testing import CliRunner

from hopd.cli import InputError, main, parse_alg, parse_opd, table_schema

DATA = Path(__file__).resolve().parent.parent / "data"
GOLDENS = Path(__file__).parent / "goldens"


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


@pytest.mark.parametrize("name", ["ass", "com", "lie"])
def test_check_passes(name):
    res = run("check", "--operad", DATA / ("%s.opd" % name), "--max-arity", 4)
    assert res.exit_code == 0, res.output
    assert "FAIL" not in res.output


def test_check_corrupted_relation_gives_witness():
    res = run("check", "--operad", DATA / "ass-corrupted.opd", "--max-arity", 4)
    assert res.exit_code == 1
    assert "FAIL  relations hold in Ass: relation on line 4 evaluates to" in res.output
    assert "arity 4: declared 24, computed 0" in res.output


def test_check_malformed_file():
    res = run("check", "--operad", DATA / "malformed.opd")
    assert res.exit_code == 2
    assert "malformed.opd:3:34:" in res.output


@pytest.mark.parametrize("text,line,col", [
    ("generator m arity 2\n", 1, 1),                                   # missing header
    ("operad q\ngenerator m arity 1\n", 2, 19),                        # arity too small
    ("operad q\ngenerator m arity 2\nrelation n(1,2)\n", 3, 10),       # unknown generator
    ("operad q\ngenerator m arity 2\nrelation m(1,3)\n", 3, 10),       # leaves not 1..n
    ("operad q\ngenerator m arity 2\nrelation m(1,2) m(2,1)\n", 3, 17),  # missing sign
    ("operad q\nfrobnicate\n", 2, 1),                                   # unknown keyword
    ("operad q\ngenerator m arity 2 $\n", 2, 21),                       # stray character
])
def test_opd_errors_have_positions(text, line, col):
    with pytest.raises(InputError) as e:
        parse_opd(text, "x.opd")
    assert (e.value.line, e.value.col) == (line, col), str(e.value)


def test_alg_parsing():
    alg = parse_alg((DATA / "dual-numbers.alg").read_text())
    assert alg.basis == ["1", "x"] and alg.kind == "associative"
    assert alg.table == {(1, 1): {1: 1}, (1, 2): {2: 1}, (2, 1): {2: 1}}
    lie = parse_alg((DATA / "nonabelian-lie.alg").read_text())
    assert lie.table == {(1, 2): {2: 1}, (2, 1): {2: -1}}
    combo = parse_alg("basis a b\na * a = 2 a - 1/2 * b\n")
    assert combo.table[(1, 1)] == {1: 2, 2: -0.5}


@pytest.mark.parametrize("text,line", [
    ("a * a = a\n", 1),
    ("basis a\na * b = a\n", 2),
    ("basis a\na * a = a\na * a = 0\n", 3),
    ("kind lie\nbasis a b\n[a, a] = b\n", 1),
])
def test_alg_errors(text, line):
    with pytest.raises(InputError) as e:
        parse_alg(text, "x.alg")
    assert e.value.line == line


def test_oracle_rejects_non_associative():
    res = run("oracle", "--target", DATA / "nonassociative.alg")
    assert res.exit_code == 1
    assert "(x*x)*x = x but x*(x*x) = 0" in res.output


def test_oracle_rejects_non_jacobi():
    res = run("oracle", "--target", DATA / "non-jacobi.alg")
    assert res.exit_code == 1 and "jacobi" in res.output


@pytest.mark.parametrize("alg,golden,kmax", [
    ("dual-numbers", "hh_dual_numbers.txt", 3),
    ("ground-field", "hh_ground_field.txt", 3),
    ("nonabelian-lie", "ce_nonabelian.txt", 2),
])
def test_oracle_goldens(alg, golden, kmax):
    res = run("oracle", "--target", DATA / ("%s.alg" % alg), "--kmax", kmax)
    assert res.exit_code == 0
    assert res.output == (GOLDENS / golden).read_text()


def test_cohomology_kmax_zero_is_one_row():
    res = run("cohomology", "--model", "ass", "--target", DATA / "dual-numbers.alg", "--kmax", 0)
    assert res.exit_code == 0
    assert res.output.splitlines() == ["degree\tarity\tdim\tflag", "0\t1\t1\tEXACT"]


def test_cohomology_matches_oracle_low_degrees():
    res = run("cohomology", "--model", "ass", "--target", DATA / "dual-numbers.alg", "--kmax", 2)
    lines = (GOLDENS / "hh_dual_numbers.txt").read_text().splitlines()
    assert res.output.splitlines() == lines[:4]


def test_cohomology_json_round_trip():
    res = run("cohomology", "--model", "ass", "--target", DATA / "ground-field.alg", "--kmax", 1,
              "--format", "json")
    doc = json.loads(res.output)
    jsonschema.validate(doc, table_schema())
    assert json.dumps(doc, indent=2, sort_keys=True) + "\n" == res.output
    assert [r["flag"] for r in doc["rows"]] == ["EXACT", "EXACT"]


def test_schema_rejects_missing_flag():
    bad = {"command": "oracle", "model": "ass", "target": "t", "max_arity": None, "seed": 0,
           "rows": [{"degree": 0, "arity": 1, "dim": 0}]}
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad, table_schema())


def test_truncated_rows_are_flagged():
    res = run("cohomology", "--model", "ass", "--target", DATA / "dual-numbers.alg", "--kmax", 3,
              "--max-arity", 4)
    assert res.exit_code == 0
    assert res.output.splitlines()[4].endswith("TRUNCATED")


def test_lie_model_needs_lie_target():
    res = run("cohomology", "--model", "lie", "--target", DATA / "dual-numbers.alg", "--kmax", 1)
    assert res.exit_code == 1


def test_same_seed_same_output():
    args = ("check", "--operad", DATA / "ass.opd", "--max-arity", 3, "--seed", 7, "--format", "json")
    assert run(*args).output == run(*args).output
