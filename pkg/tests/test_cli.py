"""Command line surface: parsing, rendering, goldens, exit codes."""

import json
import os
from fractions import Fraction

import pytest
from hypothesis import given, settings

from ncommute.cli import (CliError, FieldSyntaxError, parse_field,
                          parse_generator_monomial,
                          parse_poly, read_field_file, render_field,
                          render_poly, run)
from ncommute.witt import PolyDiffOp, Polynomial, VectorField
from util import fields

DATA = os.path.join(os.path.dirname(__file__), "data")


ROUND_TRIP_CORPUS = [
    "0",
    "d1",
    "x1*x2*d3",
    "2*x3^2*d3 - x1*d1",
    "-x1^3*d2 + 2*d1",
    "1/2*x1*d1 - 3/4*d2",
    "one",
    "x2*one + x1*d2",
]


def test_round_trip_corpus():
    for text in ROUND_TRIP_CORPUS:
        op = parse_field(text, 3)
        again = parse_field(render_field(op), 3)
        assert again == op, text


@given(fields(2))
@settings(max_examples=60)
def test_round_trip_random_fields(X):
    op = X.as_diffop()
    assert parse_field(render_field(op), 2) == op


def test_parse_examples():
    op = parse_field("x1*x2*d3", 3)
    assert op == PolyDiffOp(3, {(0, 0, 1): Polynomial.monomial(3, (1, 1, 0))})
    two = parse_field("2*x3^2*d3 - x1*d1", 3)
    assert two.terms[(0, 0, 1)] == Polynomial.monomial(3, (0, 0, 2), 2)
    assert two.terms[(1, 0, 0)] == Polynomial.monomial(3, (1, 0, 0), -1)


def test_parse_rejects_out_of_range_index():
    with pytest.raises(FieldSyntaxError) as err:
        parse_field("x4*d1", 3)
    assert "x4" in str(err.value) or "index" in str(err.value)
    with pytest.raises(FieldSyntaxError):
        parse_field("x1*d3", 2)


def test_parse_reports_position():
    with pytest.raises(FieldSyntaxError) as err:
        parse_field("x1*d1 + % d2", 3)
    assert err.value.line == 1
    assert err.value.column == 9


def test_parse_poly():
    p = parse_poly("x1^2 - 3*x2 + 1/2", 2)
    assert p == Polynomial(2, {(2, 0): 1, (0, 1): -3,
                               (0, 0): Fraction(1, 2)})
    with pytest.raises(FieldSyntaxError):
        parse_poly("x1*d1", 2)
    assert parse_poly(render_poly(p), 2) == p


def test_parse_generator_monomial_shape():
    gens, dpart = parse_generator_monomial("h1,d1(h2);d2", 2)
    assert len(gens) == 2
    assert dpart == (0, 1)
    # omitting ';dspec' addresses the derivative-free slot
    _, bare = parse_generator_monomial("h1,h2", 2)
    assert bare == (0, 0)
    with pytest.raises(CliError):
        parse_generator_monomial("h3;d1", 2)
    with pytest.raises(CliError):
        parse_generator_monomial("h1,q2;d1", 2)


def test_field_file_headers_and_comments(tmp_path, capsys):
    path = tmp_path / "fields.txt"
    path.write_text("n=2\n# comment\n\nx1*d1\nd2\n")
    got = read_field_file(str(path), 2)
    assert len(got) == 2
    capsys.readouterr()
    read_field_file(str(path), 3)
    assert "overrides" in capsys.readouterr().err


def test_dpow_stats_golden(capsys):
    assert run(["dpow", "--n", "3", "--k", "10", "--stats", "--json"]) == 0
    line = capsys.readouterr().out.strip()
    assert line == ('{"n": 3, "k": 10, "pdeg": 1, "terms_total": 4062,'
                    ' "by_type": {"(2,7,1)": 489, "(3,5,2)": 3093,'
                    ' "(3,6,0,1)": 480}}')


def test_dpow_coeff_golden(capsys):
    assert run(["dpow", "--n", "2", "--k", "6", "--coeff",
                "h1,h2,d1(h1),d2(h1),d1(h2),d1d1(h1);d2"]) == 0
    assert capsys.readouterr().out.strip() == "1"


def test_dpow_render_zero(capsys):
    assert run(["dpow", "--n", "2", "--k", "7"]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_dpow_divfree_stats(capsys):
    assert run(["dpow", "--n", "2", "--k", "5", "--stats", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pdeg"] == 2
    assert run(["dpow", "--n", "2", "--k", "5", "--divfree",
                "--stats", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["divfree"] is True


NCOMM_GOLDENS = [
    ("ex1.txt", "0"),
    ("ex2.txt", "6*d2"),
    ("ex3.txt", "6*d3"),
    ("ex4.txt", "6*x2*d2 + 12*x3*d3"),
]


@pytest.mark.parametrize("name,expected", NCOMM_GOLDENS)
def test_ncomm_examples(name, expected, capsys):
    path = os.path.join(DATA, name)
    assert run(["ncomm", "--n", "3", "--k", "13", "--fields", path,
                "--method", "envelope"]) == 0
    assert capsys.readouterr().out.strip() == expected


def test_ncomm_escort_method_agrees(capsys):
    path = os.path.join(DATA, "ex2.txt")
    assert run(["ncomm", "--n", "3", "--k", "13", "--fields", path,
                "--method", "escort"]) == 0
    assert capsys.readouterr().out.strip() == "6*d2"


def test_ncomm_eleven_field_witness(capsys):
    path = os.path.join(DATA, "s11.txt")
    assert run(["ncomm", "--n", "3", "--k", "11", "--fields", path,
                "--method", "envelope"]) == 0
    assert capsys.readouterr().out.strip() == "80*d1d1"


def test_ncomm_json_reports_order(capsys):
    path = os.path.join(DATA, "ex2.txt")
    assert run(["ncomm", "--n", "3", "--k", "13", "--fields", path,
                "--method", "envelope", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"] == "6*d2"
    assert doc["pdeg"] == 1


def test_ncomm_field_count_mismatch(tmp_path, capsys):
    path = tmp_path / "two.txt"
    path.write_text("d1\nd2\n")
    assert run(["ncomm", "--n", "2", "--k", "3", "--fields", str(path),
                "--method", "brute"]) == 2
    assert "expected 3 fields" in capsys.readouterr().err


def test_ncomm_brute_cap(tmp_path, capsys):
    path = tmp_path / "ten.txt"
    path.write_text("\n".join(["d1"] * 10) + "\n")
    assert run(["ncomm", "--n", "2", "--k", "10", "--fields", str(path),
                "--method", "brute"]) == 2
    assert "capped" in capsys.readouterr().err


def test_bad_syntax_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("x1*d1\nx1 + + d2\n")
    assert run(["ncomm", "--n", "2", "--k", "2", "--fields", str(path),
                "--method", "brute"]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_missing_file_exits_2(capsys):
    assert run(["ncomm", "--n", "2", "--k", "2", "--fields",
                "/nonexistent/fields.txt", "--method", "brute"]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_verify_products_suite(capsys):
    assert run(["verify", "--suite", "products", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "7/7 passed" in out
    assert "FAIL" not in out


def test_verify_json(capsys):
    assert run(["verify", "--suite", "products", "--seed", "3",
                "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["suite"] == "products"
    assert all(c["status"] == "pass" for c in doc["checks"])


def test_verify_deterministic(capsys):
    run(["verify", "--suite", "products", "--seed", "11", "--json"])
    first = capsys.readouterr().out
    run(["verify", "--suite", "products", "--seed", "11", "--json"])
    second = capsys.readouterr().out
    a, b = json.loads(first), json.loads(second)
    a.pop("elapsed_seconds"), b.pop("elapsed_seconds")
    assert a == b


def test_bench_rows(capsys):
    assert run(["bench", "--n", "2", "--k-range", "1:2", "--trials", "1",
                "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert "k=1" in out and "k=2" in out and "equal" in out


def test_bench_cap_refusal(capsys):
    assert run(["bench", "--n", "2", "--k-range", "10:10", "--trials", "1",
                "--seed", "5"]) == 0
    assert "refused" in capsys.readouterr().out


def test_escort_231_command(tmp_path, capsys):
    path = tmp_path / "args.txt"
    path.write_text("x1*d1\nx1^2*d2\n")
    assert run(["escort", "--name", "231", "--args", str(path)]) == 0
    out = capsys.readouterr().out
    assert "form:" in out and "field:" in out


def test_usage_error_exit_code():
    assert run(["dpow", "--n", "2"]) == 2
    assert run(["nope"]) == 2
