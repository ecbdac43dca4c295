"""
Polyvector fields as polynomials in (x^a, p_a) and the degree-0 Poisson bracket.

Convention (fixed once, checked against the decomposable-product formula in
the tests):

    {F, G} = A(F, G) - (-1)^{|F||G|} A(G, F),
    A(F, G) = Σ_a (F ∂⃖/∂p_a)(∂⃗/∂x^a G)

so that {p_a, x^b} = δ_a^b, and {X, f} = X(f) for a vector field X.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .graded import GradedError, GradedPoly, Ring, TruncationBounds
from .linalg import solve_columns

PolyVector = GradedPoly

SIGN_CONVENTION = "pb:{p_a,x^b}=+1;rightP-leftX"


class NotACocycle(GradedError):
    def __init__(self, residual):
        super().__init__(f"not a cocycle; residual {residual}")
        self.residual = residual


class InvalidStructure(GradedError):
    pass


def _pairing(F: GradedPoly, G: GradedPoly) -> GradedPoly:
    ring = F.ring
    out = ring.zero()
    for a in range(ring.n):
        Fp = F.rpartial(ring.n + a)
        if not Fp:
            continue
        Gx = G.partial(a)
        if Gx:
            out = out + Fp * Gx
    return out


def poisson_bracket(F: GradedPoly, G: GradedPoly) -> GradedPoly:
    if F.ring != G.ring:
        from .graded import RingMismatch
        raise RingMismatch("bracket of polyvectors on different manifolds")
    out = F.ring.zero()
    for dF, Fh in F.homogeneous_parts().items():
        for dG, Gh in G.homogeneous_parts().items():
            s = -1 if (dF * dG) % 2 else 1
            out = out + _pairing(Fh, Gh) - _pairing(Gh, Fh).scale(s)
    return out


def vector_field(ring: Ring, components: dict) -> GradedPoly:
    """Σ X^a p_a from a map coordinate-name -> coefficient function."""
    out = ring.zero()
    for name, c in components.items():
        out = out + c * ring.momentum(name)
    return out


def components(X: GradedPoly) -> dict[int, GradedPoly]:
    """Coefficients X^a of a weight-1 polyvector X = Σ X^a p_a (coefficients on the left)."""
    ring = X.ring
    out: dict[int, dict] = {}
    for m, c in X.terms.items():
        w = m[ring.n:]
        if sum(w) != 1:
            raise GradedError("not a vector field (weight must be 1)")
        a = w.index(1)
        base = m[:ring.n] + (0,) * ring.n
        out.setdefault(a, {})[base] = c
    return {a: GradedPoly(ring, t) for a, t in out.items()}


@dataclass(frozen=True)
class PoissonStructure:
    """(Q, Π): Q weight 1 and degree +1; Π = Σ Π_n with Π_n of weight n ≥ 2, degree +1."""
    ring: Ring
    Q: GradedPoly
    Pi: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "Pi", {n: p for n, p in sorted(self.Pi.items()) if p})
        if self.Q and (self.Q.weights() != {1} or self.Q.degrees() != {1}):
            raise InvalidStructure("Q must be homogeneous of weight 1 and degree 1")
        for n, p in self.Pi.items():
            if n < 2:
                raise InvalidStructure(f"Pi[{n}]: tensor weights start at 2")
            if p.weights() != {n}:
                raise InvalidStructure(f"Pi[{n}] is not homogeneous of weight {n}")
            if p.degrees() != {1}:
                raise InvalidStructure(f"Pi[{n}] must have degree 1")

    @classmethod
    def from_total(cls, total: GradedPoly) -> "PoissonStructure":
        parts = total.weight_parts()
        if 0 in parts:
            raise InvalidStructure("weight-0 part must vanish")
        Q = parts.pop(1, total.ring.zero())
        return cls(total.ring, Q, parts)

    @property
    def Pi_total(self) -> GradedPoly:
        out = self.ring.zero()
        for p in self.Pi.values():
            out = out + p
        return out

    @property
    def total(self) -> GradedPoly:
        return self.Q + self.Pi_total


@dataclass
class McReport:
    passed: bool
    residual: dict   # weight -> nonzero residual part
    bounds: TruncationBounds

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"


def mc_check(s: PoissonStructure, bounds: TruncationBounds | None = None) -> McReport:
    """{Q,Π} + ½{Π,Π} + ½{Q,Q} = ½{Q+Π, Q+Π} must vanish."""
    ring = s.ring if bounds is None else s.ring.with_bounds(bounds)
    T = s.total
    if bounds is not None:
        T = GradedPoly(ring, T.terms)
    R = poisson_bracket(T, T).scale(Fraction(1, 2))
    return McReport(not R, R.weight_parts(), ring.bounds)


def lichnerowicz(s: PoissonStructure, X: GradedPoly) -> GradedPoly:
    return poisson_bracket(s.total, X)


# ---------------------------------------------------------------------------
# finite-slice coboundary solving

@dataclass
class CoboundaryResult:
    status: str                  # SOLVED | OBSTRUCTED_WITHIN_BOUNDS
    solution: GradedPoly | None
    slice_dim: int
    n_equations: int
    rank: int
    weight_max: int
    base_degree_max: int

    @property
    def solved(self):
        return self.status == "SOLVED"


def degree_slice(ring: Ring, degree: int, weight_max: int, base_degree_max: int) -> list[tuple]:
    """All monomials of the given degree with weight ≤ weight_max and
    even-base exponent ≤ base_degree_max."""
    n = ring.n
    ranges = []
    for i in range(2 * n):
        if ring.parities[i]:
            ranges.append(range(2))
        elif i < n:
            ranges.append(range(base_degree_max + 1))
        else:
            ranges.append(range(weight_max + 1))
    out = []

    def rec(i, mono, w, b, d):
        if i == 2 * n:
            if d == degree:
                out.append(tuple(mono))
            return
        for e in ranges[i]:
            if i >= n and w + e > weight_max:
                break
            if i < n and not ring.parities[i] and b + e > base_degree_max:
                break
            mono.append(e)
            rec(i + 1, mono, w + (e if i >= n else 0),
                b + (e if i < n and not ring.parities[i] else 0),
                d + e * ring.degrees[i])
            mono.pop()

    rec(0, [], 0, 0, 0)
    from .serialize import sort_key
    out.sort(key=lambda m: sort_key(ring, m))
    return out


def solve_coboundary(s: PoissonStructure, S: GradedPoly,
                     bounds: TruncationBounds | None = None) -> CoboundaryResult:
    """Find X of degree 1 in the bounded slice with d_Π X = S."""
    bounds = bounds or s.ring.bounds
    if S and S.degrees() != {2}:
        raise GradedError("the cocycle must have degree 2")
    resid = lichnerowicz(s, S)
    if resid:
        raise NotACocycle(resid)
    ring = s.ring
    monos = degree_slice(ring, 1, bounds.weight_max, bounds.base_degree_max)
    if not S:
        return CoboundaryResult("SOLVED", ring.zero(), len(monos), 0, 0,
                                bounds.weight_max, bounds.base_degree_max)
    # column images are computed in a ring wide enough that no term is lost
    tw = max((sum(m[ring.n:]) for m in s.total.terms), default=0)
    tb = max((sum(m[i] for i in ring.even_base) for m in s.total.terms), default=0)
    wide = ring.with_bounds(TruncationBounds(
        weight_max=max(bounds.weight_max, ring.bounds.weight_max) + tw,
        base_degree_max=max(bounds.base_degree_max, ring.bounds.base_degree_max) + tb,
        hbar_max=ring.bounds.hbar_max))
    T = GradedPoly(wide, s.total.terms)
    cols = []
    for m in monos:
        img = poisson_bracket(T, GradedPoly(wide, {m: 1}))
        cols.append(dict(img.terms))
    res = solve_columns(cols, dict(S.terms))
    if res.solution is None:
        return CoboundaryResult("OBSTRUCTED_WITHIN_BOUNDS", None, len(monos),
                                res.n_equations, res.rank,
                                bounds.weight_max, bounds.base_degree_max)
    X = GradedPoly(ring, {m: c for m, c in zip(monos, res.solution) if c})
    return CoboundaryResult("SOLVED", X, len(monos), res.n_equations, res.rank,
                            bounds.weight_max, bounds.base_degree_max)

