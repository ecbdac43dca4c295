"""
Quantization of (−1)-shifted derived Poisson structures by successive lifting.

The affine connection is the flat one of the global chart, so the PBW map
sends f·∂_{a1}⊙…⊙∂_{an} to ℏ^n times the normal-ordered word.  The general
recursion is kept (`pbw_recursive`) and compared against the collapsed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .graded import GradedError, GradedPoly, TruncationBounds
from .hbar import (FiltrationError, HbarOp, extended_symbol, hbar_compose,
                   t_index)
from .linalg import solve_columns
from .operators import HalfDensityOp, adjoint, commutator, lie_derivative, order
from .polyvector import (CoboundaryResult, PoissonStructure, components,
                         degree_slice, lichnerowicz, mc_check, poisson_bracket,
                         solve_coboundary)


class StateCorruption(GradedError):
    pass


class LiftFailure(GradedError):
    pass


class RejectedInput(GradedError):
    pass


# ---------------------------------------------------------------------------
# quantization maps

def pbw_quantize(X: GradedPoly, hbar_max: int | None = None) -> HbarOp:
    ring = X.ring
    return HbarOp(ring, {n: HalfDensityOp(p) for n, p in X.weight_parts().items()}, hbar_max)


def _full_adjoint(op: HalfDensityOp) -> HalfDensityOp:
    out = HalfDensityOp.zero(op.ring)
    for part in op.homogeneous_parts().values():
        out = out + adjoint(part)
    return out


def q_quantize(X: GradedPoly, hbar_max: int | None = None) -> HbarOp:
    """Q_ℏ(X) = Σ ℏ^n/2 (Δ_n + (−1)^n Δ_n⁺) with Δ = P_ℏ(X)."""
    P = pbw_quantize(X, hbar_max)
    half = Fraction(1, 2)
    out = {}
    for n, op in P.coeffs.items():
        adj = _full_adjoint(op)
        out[n] = (op + (adj if n % 2 == 0 else -adj)) * half
    return HbarOp(X.ring, out, P.hbar_max)


def flat_covariant(X: GradedPoly, Y: GradedPoly) -> GradedPoly:
    """∇_X Y = X(Y^b) p_b for weight-1 X, Y (flat coordinate connection)."""
    ring = X.ring
    out = ring.zero()
    for b, Yb in components(Y).items():
        out = out + poisson_bracket(X, Yb) * ring._gen(ring.n + b)
    return out


def _deg(p: GradedPoly) -> int:
    return p.degree() if p else 0


def pbw_recursive(factors: list, hbar_max: int | None = None) -> HbarOp:
    """P_ℏ(X_1⊙…⊙X_n) from the recursion

        P(X_1⊙…⊙X_n) = (ℏ/n) Σ_k ε_k (∇_{X_k} ∘ P(X^{k}) − P(∇_{X_k} X^{k}))

    evaluated literally; each X_i must be a homogeneous weight-1 polyvector.
    """
    if not factors:
        raise GradedError("need at least one factor")
    ring = factors[0].ring
    hm = ring.bounds.hbar_max if hbar_max is None else hbar_max
    return _pbw_rec([(Fraction(1), list(factors))], ring, hm)


def _pbw_rec(terms, ring, hm) -> HbarOp:
    """P_ℏ of Σ c·X_1⊙…⊙X_n (all terms with the same n)."""
    total = HbarOp(ring, {}, hm)
    for c, fs in terms:
        n = len(fs)
        if n == 0:
            total = total + HbarOp(ring, {0: ring.const(c)}, hm)
            continue
        acc = HbarOp(ring, {}, hm)
        degs = [_deg(f) for f in fs]
        for k in range(n):
            eps = -1 if (degs[k] * sum(degs[:k])) % 2 else 1
            rest = fs[:k] + fs[k + 1:]
            rdegs = degs[:k] + degs[k + 1:]
            nabla = HbarOp(ring, {0: HalfDensityOp(fs[k])}, hm)
            first = hbar_compose(nabla, _pbw_rec([(Fraction(1), rest)], ring, hm))
            # ∇_{X_k} acts as a derivation of degree |X_k| on the ⊙-product
            sub = []
            for l in range(len(rest)):
                s = -1 if (degs[k] * sum(rdegs[:l])) % 2 else 1
                new = flat_covariant(fs[k], rest[l])
                if new:
                    sub.append((Fraction(s), rest[:l] + [new] + rest[l + 1:]))
            second = _pbw_rec(sub, ring, hm) if sub else HbarOp(ring, {}, hm)
            acc = acc + (first - second) * eps
        total = total + acc.shift(1) * (c / n)
    return total


# ---------------------------------------------------------------------------
# lifting loop

@dataclass
class ObstructionReport:
    k: int
    cocycle: GradedPoly
    cocycle_check: bool
    solve: CoboundaryResult | None

    @property
    def status(self):
        if self.solve is None:
            return "NOT_A_COCYCLE"
        return self.solve.status


@dataclass
class QuantizationState:
    structure: PoissonStructure
    Delta: HbarOp
    k: int = 1
    history: list = field(default_factory=list)   # (k, status, correction)
    bounds: TruncationBounds | None = None

    def omega(self) -> HbarOp:
        return hbar_compose(self.Delta, self.Delta)


def initial_state(s: PoissonStructure, bounds: TruncationBounds | None = None,
                  hbar_max: int | None = None) -> QuantizationState:
    ring = s.ring
    hm = ring.bounds.hbar_max if hbar_max is None else hbar_max
    D = HbarOp(ring, {1: lie_derivative(s.Q)}, hm) + q_quantize(s.Pi_total, hm)
    return QuantizationState(s, D, 1, [], bounds or ring.bounds)


def check_invariants(state: QuantizationState):
    s = state.structure
    D = state.Delta
    sig = extended_symbol(D).at_one()
    if sig != s.total:
        raise StateCorruption(f"σ_ℏ(Δ)|ℏ=1 = {sig} differs from Q+Π")
    from .hbar import is_self_adjoint
    if not is_self_adjoint(D):
        raise StateCorruption("Δ is not self-adjoint")


def obstruction_cocycle(state: QuantizationState, omega: HbarOp | None = None) -> GradedPoly:
    k = state.k
    om = state.omega() if omega is None else omega
    if t_index(om) < 2 * k + 1:
        raise StateCorruption(f"t_index(Ω) = {t_index(om)} < {2 * k + 1}")
    return extended_symbol(om.shift(-(2 * k + 1))).at_one()


def obstruction(state: QuantizationState) -> ObstructionReport:
    S = obstruction_cocycle(state)
    check = not lichnerowicz(state.structure, S)
    if not check:
        return ObstructionReport(state.k, S, False, None)
    res = solve_coboundary(state.structure, S, state.bounds)
    return ObstructionReport(state.k, S, True, res)


def lift_step(state: QuantizationState):
    rep = obstruction(state)
    if not rep.cocycle_check or not rep.solve.solved:
        return rep
    k = state.k
    X = rep.solve.solution
    Phi = q_quantize(X, state.Delta.hbar_max)
    D = state.Delta - Phi.shift(2 * k)
    new = QuantizationState(state.structure, D, k + 1,
                            state.history + [(k, rep.status, X)], state.bounds)
    om = new.omega()
    if t_index(om) < 2 * k + 3:
        raise LiftFailure(f"after lifting, t_index(Ω) = {t_index(om)} < {2 * k + 3}")
    return new


@dataclass
class QuantizeResult:
    status: str                 # QUANTIZED | OBSTRUCTED | EXHAUSTED
    state: QuantizationState
    report: ObstructionReport | None = None

    @property
    def Delta(self):
        return self.state.Delta


def quantize(s: PoissonStructure, k_max: int = 4, bounds: TruncationBounds | None = None,
             hbar_max: int | None = None) -> QuantizeResult:
    if not mc_check(s).passed:
        raise RejectedInput("the structure fails the Maurer-Cartan equation")
    if hbar_max is None:
        hbar_max = 2 * k_max + 4
    state = initial_state(s, bounds, hbar_max)
    check_invariants(state)
    while True:
        if not state.omega():
            return QuantizeResult("QUANTIZED", state)
        if state.k > k_max:
            return QuantizeResult("EXHAUSTED", state)
        nxt = lift_step(state)
        if isinstance(nxt, ObstructionReport):
            return QuantizeResult("OBSTRUCTED", state, nxt)
        state = nxt
        check_invariants(state)


# ---------------------------------------------------------------------------
# dg-Poisson special case: Δ = ℏL_Q + ℏ²Δ₂

@dataclass
class ModularDG:
    X0: GradedPoly
    X1: GradedPoly
    dg_poisson: bool
    residual: GradedPoly          # {Q,Π₂} + ½{Q,Q}
    status: str                   # SOLVED | OBSTRUCTED_WITHIN_BOUNDS | NOT_DG_POISSON
    f: GradedPoly | None = None
    Delta: HbarOp | None = None
    slice_dim: int = 0


def modular_dg(s: PoissonStructure, Delta2: HalfDensityOp,
               bounds: TruncationBounds | None = None) -> ModularDG:
    ring = s.ring
    bounds = bounds or ring.bounds
    Pi2 = s.Pi.get(2, ring.zero())
    if set(s.Pi) - {2}:
        raise GradedError("modular_dg expects a structure with only Π₂")
    if order(Delta2) > 2 or Delta2.body.weight_part(2) != Pi2:
        raise GradedError("σ₂(Δ₂) must equal Π₂")
    if _full_adjoint(Delta2) != Delta2:
        raise GradedError("Δ₂ must be self-adjoint")
    LQ = lie_derivative(s.Q)
    comm = commutator(LQ, Delta2)
    X0 = comm.body.weight_part(0)
    sq = Delta2 @ Delta2
    if order(sq) > 1:
        raise GradedError("Δ₂² has order > 1; {Π₂,Π₂} ≠ 0")
    X1 = sq.body.weight_part(1)
    residual = poisson_bracket(s.Q, Pi2) + poisson_bracket(s.Q, s.Q).scale(Fraction(1, 2))
    dg = not residual and order(comm) <= 0
    if not dg:
        return ModularDG(X0, X1, False, residual, "NOT_DG_POISSON")
    # solve X0 + X1 = {Q+Π₂, f} over degree-1 functions f in the slice
    target = X0 + X1
    monos = [m for m in degree_slice(ring, 1, 0, bounds.base_degree_max)]
    total = s.Q + Pi2
    if not target:
        f = ring.zero()
    else:
        cols = [dict(poisson_bracket(total, GradedPoly(ring, {m: 1})).terms) for m in monos]
        res = solve_columns(cols, dict(target.terms))
        if res.solution is None:
            return ModularDG(X0, X1, True, residual, "OBSTRUCTED_WITHIN_BOUNDS",
                             slice_dim=len(monos))
        f = GradedPoly(ring, {m: c for m, c in zip(monos, res.solution) if c})
    D = HbarOp(ring, {1: LQ, 2: Delta2 - HalfDensityOp(f)})
    if hbar_compose(D, D):
        raise LiftFailure("special solution does not square to zero")
    return ModularDG(X0, X1, True, residual, "SOLVED", f, D, len(monos))
