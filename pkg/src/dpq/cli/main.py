"""Command dispatch for the `dpq` tool."""

from __future__ import annotations

import argparse
import os
import sys

from ..graded import GradedError, GradedPoly
from ..hbar import (HbarOp, derived_brackets, extended_symbol, hbar_compose,
                    is_bv_infinity, is_self_adjoint, t_index)
from ..linfty import (check_linfty, elw_quantize, fourier_quantize,
                      linear_poisson)
from ..operators import HalfDensityOp, adjoint, commutator, principal_symbol
from ..polyvector import mc_check, poisson_bracket
from ..quantizer import (initial_state, lift_step, modular_dg, obstruction,
                         q_quantize, quantize, ObstructionReport)
from .problem import ProblemError, ProblemFile, parse_problem
from .report import Report

COMMANDS = ("check", "bracket", "symbol", "adjoint", "square", "quantize", "obstruction",
            "modular-dg", "linfty-quantize", "elw-quantize", "derived-bracket")


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dpq", description="Shifted Poisson structures and BV quantization")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("problem")
        sp.add_argument("--weight-max", type=int)
        sp.add_argument("--base-deg-max", type=int)
        sp.add_argument("--hbar-max", type=int)
        sp.add_argument("--machine", action="store_true", help="tab-separated key/value output")
        return sp

    add("check", "Maurer-Cartan / D^2 = 0 checks")
    sp = add("bracket", "Poisson bracket of two polyvectors")
    sp.add_argument("--lhs", required=True)
    sp.add_argument("--rhs", required=True)
    sp = add("symbol", "principal symbol of an operator")
    sp.add_argument("--op", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp = add("adjoint", "formal adjoint of an operator")
    sp.add_argument("--op", required=True)
    sp = add("square", "composition square of an operator")
    sp.add_argument("--op", required=True)
    sp = add("quantize", "run the lifting loop")
    sp.add_argument("--k-max", type=int)
    sp = add("obstruction", "obstruction class at level k")
    sp.add_argument("--k", type=int, default=1)
    sp = add("modular-dg", "modular class in the dg-Poisson case")
    sp.add_argument("--op", help="Δ₂ (defaults to the symmetrized quantization of Π₂)")
    add("linfty-quantize", "Fourier quantization of the [linfty] data")
    add("elw-quantize", "Evens-Lu-Weinstein quantization of the [linfty] data")
    sp = add("derived-bracket", "derived brackets of an ℏ-operator")
    sp.add_argument("--op", help="ℏ-operator (defaults to the canonical one of the problem)")
    sp.add_argument("--args", required=True, help="comma-separated functions")
    return p


def _bounds(pf: ProblemFile, ns):
    return pf.bounds(weight_max=ns.weight_max, base_degree_max=ns.base_deg_max,
                     hbar_max=ns.hbar_max)


def _hbar(value, ring, hbar_max) -> HbarOp:
    if isinstance(value, HbarOp):
        return HbarOp(ring, value.coeffs, hbar_max)
    return HbarOp(ring, {0: value}, hbar_max)


def _op_arg(pf, ring, text):
    return pf.parse(text, ring, "operator")


def cmd_check(pf, ns, rep):
    bounds = _bounds(pf, ns)
    ok = True
    if "poisson" in pf.sections:
        s = pf.poisson(bounds)
        r = mc_check(s)
        rep.add("mc_check", r.status)
        for w, part in r.residual.items():
            rep.add(f"mc_residual[{w}]", part)
        ok &= r.passed
    if "linfty" in pf.sections:
        sc = pf.structure_constants(bounds)
        r = check_linfty(sc)
        rep.add("linfty_check", r.status)
        if not r.passed:
            rep.add("linfty_residual", r.residual)
        ok &= r.passed
        if r.passed:
            lp = linear_poisson(sc, pf.cocycle(sc) if pf.s else None)
            m = mc_check(lp)
            rep.add("linear_poisson_mc_check", m.status)
            for w, part in m.residual.items():
                rep.add(f"mc_residual[{w}]", part)
            ok &= m.passed
    rep.status = "PASS" if ok else "FAIL"


def cmd_bracket(pf, ns, rep):
    ring = pf.ring(_bounds(pf, ns))
    F = pf.parse(ns.lhs, ring, "polyvector")
    G = pf.parse(ns.rhs, ring, "polyvector")
    rep.add("bracket", poisson_bracket(F, G))
    rep.status = "OK"


def cmd_symbol(pf, ns, rep):
    ring = pf.ring(_bounds(pf, ns))
    A = _op_arg(pf, ring, ns.op)
    if isinstance(A, HbarOp):
        raise UsageError("symbol expects an operator without h")
    rep.add("order", A.order())
    rep.add("symbol", principal_symbol(A, ns.n))
    rep.status = "OK"


def cmd_adjoint(pf, ns, rep):
    ring = pf.ring(_bounds(pf, ns))
    A = _op_arg(pf, ring, ns.op)
    if isinstance(A, HbarOp):
        raise UsageError("adjoint expects an operator without h")
    adj = HalfDensityOp.zero(ring)
    for part in A.homogeneous_parts().values():
        adj = adj + adjoint(part)
    rep.add("adjoint", adj)
    rep.add("self_adjoint", adj == A)
    rep.add("anti_self_adjoint", adj == -A)
    rep.status = "OK"


def cmd_square(pf, ns, rep):
    b = _bounds(pf, ns)
    ring = pf.ring(b)
    A = _op_arg(pf, ring, ns.op)
    if isinstance(A, HbarOp):
        sq = hbar_compose(A, A)
    else:
        sq = A @ A
    rep.add("square", sq)
    rep.status = "OK"


def _report_obstruction(rep, r: ObstructionReport):
    rep.add("k", r.k)
    rep.add("cocycle", r.cocycle)
    rep.add("cocycle_check", r.cocycle_check)
    if r.solve is not None:
        rep.add("solve_status", r.solve.status)
        if r.solve.solved:
            rep.add("solution", r.solve.solution)
        rep.add("slice_dim", r.solve.slice_dim)
        rep.add("equations", r.solve.n_equations)
        rep.add("rank", r.solve.rank)


def _structure(pf, bounds):
    if "poisson" in pf.sections:
        return pf.poisson(bounds)
    if "linfty" in pf.sections:
        sc = pf.structure_constants(bounds)
        return linear_poisson(sc, pf.cocycle(sc) if pf.s else None)
    raise ProblemError(f"{pf.path}: needs a [poisson] or [linfty] section")


def cmd_quantize(pf, ns, rep):
    b = _bounds(pf, ns)
    k_max = ns.k_max if ns.k_max is not None else pf.k_max
    hbar_max = ns.hbar_max if ns.hbar_max is not None else pf.options.get("hbar_max", 2 * k_max + 4)
    b = pf.bounds(weight_max=ns.weight_max, base_degree_max=ns.base_deg_max, hbar_max=hbar_max)
    s = _structure(pf, b)
    res = quantize(s, k_max, b, hbar_max)
    rep.status = res.status
    rep.bounds = b
    rep.add("k_max", k_max)
    rep.add("levels", res.state.k)
    for k, status, X in res.state.history:
        rep.add(f"lift[{k}]", X)
    if res.report is not None:
        _report_obstruction(rep, res.report)
        rep.add("note", "obstruction is relative to the solve slice bounds")
    else:
        for n, op in res.Delta.coeffs.items():
            rep.add(f"delta[{n}]", op)
        if res.status == "QUANTIZED":
            rep.add("square_zero_up_to_h", hbar_max)


def cmd_obstruction(pf, ns, rep):
    b = _bounds(pf, ns)
    s = _structure(pf, b)
    state = initial_state(s, b, b.hbar_max)
    while state.k < ns.k:
        nxt = lift_step(state)
        if isinstance(nxt, ObstructionReport):
            raise UsageError(f"lifting stops at k={nxt.k}; level {ns.k} is not reached")
        state = nxt
    r = obstruction(state)
    _report_obstruction(rep, r)
    rep.status = "SOLVED" if r.status == "SOLVED" else ("OBSTRUCTED" if r.cocycle_check else "FAIL")


def cmd_modular_dg(pf, ns, rep):
    b = _bounds(pf, ns)
    s = pf.poisson(b)
    if ns.op:
        D2 = _op_arg(pf, s.ring, ns.op)
        if isinstance(D2, HbarOp):
            raise UsageError("--op must be an operator without h")
    else:
        D2 = q_quantize(s.Pi.get(2, s.ring.zero()), b.hbar_max)[2]
    r = modular_dg(s, D2, b)
    rep.add("delta2", D2)
    rep.add("X0", r.X0)
    rep.add("X1", r.X1)
    rep.add("dg_poisson", r.dg_poisson)
    rep.add("dg_residual", r.residual)
    rep.add("special_solve", r.status)
    if r.f is not None:
        rep.add("f", r.f)
        rep.add("delta", r.Delta)
    rep.status = r.status if r.status != "NOT_DG_POISSON" else "FAIL"


def cmd_linfty_quantize(pf, ns, rep):
    b = _bounds(pf, ns)
    sc = pf.structure_constants(b)
    r = check_linfty(sc)
    if not r.passed:
        raise UsageError(f"D^2 != 0: {r.residual}")
    D = fourier_quantize(sc, b.hbar_max)
    lp = linear_poisson(sc)
    bv = is_bv_infinity(D)
    for n, op in D.coeffs.items():
        rep.add(f"delta[{n}]", op)
    rep.add("Q", lp.Q)
    for n, p in lp.Pi.items():
        rep.add(f"Pi[{n}]", p)
    rep.add("symbol_matches", extended_symbol(D).at_one() == lp.total)
    rep.add("self_adjoint", is_self_adjoint(D))
    rep.add("bv_infinity", bv.verdict)
    ok = bv.passed and is_self_adjoint(D) and extended_symbol(D).at_one() == lp.total
    rep.status = "PASS" if ok else "FAIL"


def cmd_elw_quantize(pf, ns, rep):
    b = _bounds(pf, ns)
    sc = pf.structure_constants(b)
    res = elw_quantize(sc, pf.frames(sc), pf.cocycle(sc), b.hbar_max)
    D = res.Delta
    bv = is_bv_infinity(D)
    comm = commutator(res.conj, res.iota)
    for n, op in D.coeffs.items():
        rep.add(f"delta[{n}]", op)
    rep.add("iota_s", res.iota)
    rep.add("conjugated_differential", res.conj)
    rep.add("commutator", comm)
    rep.add("self_adjoint", is_self_adjoint(D))
    rep.add("bv_infinity", bv.verdict)
    rep.status = "PASS" if (bv.passed and not comm and is_self_adjoint(D)) else "FAIL"


def _canonical_delta(pf, b):
    if "linfty" in pf.sections and "poisson" not in pf.sections:
        sc = pf.structure_constants(b)
        if pf.s:
            return elw_quantize(sc, pf.frames(sc), pf.cocycle(sc), b.hbar_max).Delta
        return fourier_quantize(sc, b.hbar_max)
    return initial_state(pf.poisson(b), b, b.hbar_max).Delta


def cmd_derived_bracket(pf, ns, rep):
    b = _bounds(pf, ns)
    if ns.op:
        ring = pf.ring(b) if "manifold" in pf.sections else pf.structure_constants(b).dual_ring
        D = _hbar(_op_arg(pf, ring, ns.op), ring, b.hbar_max)
    else:
        D = _canonical_delta(pf, b)
    ring = D.ring
    fs = [pf.parse(t.strip(), ring, "function") for t in ns.args.split(",")]
    rep.add("arity", len(fs))
    rep.add("value", derived_brackets(D, *fs))
    rep.status = "OK"


HANDLERS = {
    "check": cmd_check, "bracket": cmd_bracket, "symbol": cmd_symbol,
    "adjoint": cmd_adjoint, "square": cmd_square, "quantize": cmd_quantize,
    "obstruction": cmd_obstruction, "modular-dg": cmd_modular_dg,
    "linfty-quantize": cmd_linfty_quantize, "elw-quantize": cmd_elw_quantize,
    "derived-bracket": cmd_derived_bracket,
}


def run(command: str, pf: ProblemFile, ns) -> Report:
    rep = Report(command, "OK", problem=os.path.basename(pf.path))
    HANDLERS[command](pf, ns, rep)
    if rep.bounds is None:
        rep.bounds = _bounds(pf, ns)
    return rep


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        pf = parse_problem(ns.problem)
        rep = run(ns.command, pf, ns)
    except (OSError, GradedError, UsageError) as e:
        print(f"dpq: error: {e}", file=sys.stderr)
        return 2
    out = rep.machine() if ns.machine else rep.text()
    sys.stdout.write(out)
    return rep.exit_code
