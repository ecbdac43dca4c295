import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dpq.cli import ParseError, ProblemError, main, parse_expr, parse_problem, parse_problem_text
from dpq.cli.report import FINGERPRINT
from dpq.operators import HalfDensityOp
from golden_cases import CASES, FIXTURES, argv_for, golden_path, render
from helpers import HOVIK, MIXED, RINGS, HypoRng, hovik, rand_poly


# --- expressions --------------------------------------------------------------

def test_parse_examples():
    R, P, Q = hovik()
    assert parse_expr("tau*d(xi) + tau*xi*d(z)", R, "polyvector") == P
    assert parse_expr("tau*p[xi] + tau*xi*p[z]", R, "polyvector") == P
    assert parse_expr("1/2*d(xi)", R, "operator") == HalfDensityOp.d(R, "xi") * Fraction(1, 2)
    assert parse_expr("(z + 1)^2 - z^2", R, "function") == 2 * R.var("z") + 1


def test_operator_words_are_normal_ordered():
    R = HOVIK
    # ∂_τ∘τ = 1 - τ∂_τ for odd τ
    op = parse_expr("d(tau)*tau", R, "operator")
    assert op == HalfDensityOp(R.one()) - HalfDensityOp(R.var("tau")) @ HalfDensityOp.d(R, "tau")


def test_coordinate_named_d():
    R = MIXED
    d = R.var("d")
    assert parse_expr("d * d(d)", R, "operator") == HalfDensityOp(d) @ HalfDensityOp.d(R, "d")
    assert parse_expr("d^2 * p[d]", R, "polyvector") == d * d * R.momentum("d")


@pytest.mark.parametrize("text,mode,where", [
    ("xi^2", "function", (1, 1)),
    ("d(xi)", "function", (1, 1)),
    ("tau*(xi + ", "function", (1, 11)),
    ("w + 1", "polyvector", (1, 1)),
    ("xi +\n  2*q", "function", (2, 5)),
    ("1/0", "function", (1, 1)),
    ("p[xi]", "operator", (1, 1)),
])
def test_parse_errors_carry_position(text, mode, where):
    with pytest.raises(ParseError) as err:
        parse_expr(text, HOVIK, mode)
    assert (err.value.line, err.value.col) == where


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as err:
        parse_expr("tau*(xi + ", HOVIK, "function")
    assert "identifier" in err.value.expected


@settings(max_examples=100)
@given(st.data())
def test_serialize_parse_roundtrip(data):
    rng = HypoRng(data)
    R = rng.choice(RINGS)
    X = rand_poly(rng, R, max_weight=2, terms=4)
    assert parse_expr(X.to_str(), R, "polyvector") == X
    op = HalfDensityOp(X)
    assert parse_expr(op.to_str(), R, "operator") == op
    assert parse_expr(op.to_str(), R, "operator").to_str() == op.to_str()


# --- problem files ----------------------------------------------------------------

def test_parse_shipped_fixture():
    pf = parse_problem(FIXTURES / "hovik.dpq")
    assert [(c.name, c.degree) for c in pf.coords] == [("xi", -1), ("tau", -1), ("z", -2)]
    R, P, Q = hovik()
    s = pf.poisson()
    assert s.Pi[2].to_str() == (P * Q).to_str()
    pf = parse_problem(FIXTURES / "lie2.dpq")
    assert "linfty" in pf.sections
    sc = pf.structure_constants()
    assert sc.rank == 2 and sc.C_at((0, 1), 1) == 1


@pytest.mark.parametrize("text", [
    "",
    "# only a comment\n",
    "[manifold]\ncoord = x : 0\nbogus = 1\n",
    "[options]\nweight_cap = 3\n",
    "[nonsense]\n",
    "[manifold]\ncoord = x 0\n",
])
def test_bad_problem_files(text):
    with pytest.raises(ProblemError):
        parse_problem_text(text)


def test_macros_reject_cycles():
    text = "[manifold]\ncoord = x : 0\n[poisson]\ndefine A = B\ndefine B = A\nPi[2] = A\n"
    with pytest.raises((ProblemError, ParseError)):
        parse_problem_text(text).poisson()


# --- commands ------------------------------------------------------------------

def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exit_codes(capsys, tmp_path):
    hov = FIXTURES / "hovik.dpq"
    assert _run(capsys, "check", hov)[0] == 0
    code, out, _ = _run(capsys, "quantize", hov, "--machine")
    assert code == 1
    assert "cocycle\t1/4 * p[z]\n" in out
    code, out, _ = _run(capsys, "square", hov, "--op",
                        "tau*d(xi)*d(tau) + tau*xi*d(z)*d(tau) + 1/2*xi*d(z) + 1/2*d(xi)", "--machine")
    assert code == 0 and "square\t1/4 * d(z)\n" in out
    code, _, err = _run(capsys, "square", hov, "--op", "xi^2")
    assert code == 2 and "line 1" in err
    code, _, err = _run(capsys, "check", tmp_path / "missing.dpq")
    assert code == 2
    empty = tmp_path / "empty.dpq"
    empty.write_text("")
    assert _run(capsys, "check", empty)[0] == 2


def test_bounds_flags_are_reported(capsys):
    code, out, _ = _run(capsys, "quantize", FIXTURES / "hovik.dpq", "--weight-max", "6",
                        "--base-deg-max", "6", "--machine")
    assert code == 1
    assert "weight_max\t6\n" in out and "base_degree_max\t6\n" in out
    assert "solve_status\tOBSTRUCTED_WITHIN_BOUNDS\n" in out
    assert f"convention\t{FINGERPRINT}\n" in out


def test_text_and_machine_modes_agree(capsys):
    _, text, _ = _run(capsys, "check", FIXTURES / "lie2.dpq")
    _, machine, _ = _run(capsys, "check", FIXTURES / "lie2.dpq", "--machine")
    rows = [line.split("\t") for line in machine.splitlines()]
    for (k, v), line in zip(rows, text.splitlines()):
        assert line.split(" : ", 1)[0].strip() == k and line.split(" : ", 1)[1] == v


def test_symbol_and_adjoint_commands(capsys):
    hov = FIXTURES / "hovik.dpq"
    code, out, _ = _run(capsys, "symbol", hov, "--op", "1/4*d(z)", "--n", "1", "--machine")
    assert code == 0 and "1/4 * p[z]" in out
    code, out, _ = _run(capsys, "adjoint", hov, "--op", "d(xi)", "--machine")
    assert code == 0 and "-d(xi)" in out


# --- golden files --------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, text = render(name)
    assert text.encode("utf-8") == golden_path(name).read_bytes()
    assert render(name) == (code, text)


def test_golden_in_a_fresh_process():
    name = "hovik-quantize"
    proc = subprocess.run([sys.executable, "-m", "dpq", *argv_for(name)], capture_output=True)
    assert proc.returncode == 1
    assert proc.stdout == golden_path(name).read_bytes()
