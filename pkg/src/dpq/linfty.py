"""
L∞-algebroids in coordinates, their linear shifted Poisson structures, and
the two canonical quantizations (Berezin-Fourier and Evens-Lu-Weinstein).

Coordinates: on ℒ[1] we use (x^a, η^i) with |η^i| = 1 - |e_i|; on the dual
ℒ^∨[-1] we use (x^a, ξ_i) with |ξ_i| = |e_i| - 1.  Only odd η are supported,
so Berezin integration over the fibre is purely algebraic.

Sign convention for the homological vector field (sums over increasing
multi-indices I):

    D = Σ ρ^a_I(x) η^I ∂/∂x^a  -  Σ C^j_I(x) η^I ∂/∂η^j

For a Lie algebra this is dη^k = -½ C^k_ij η^i η^j.  The linear Poisson
tensor is the image of D under η^i -> p_{ξ_i}, ∂/∂η^j -> ξ_j, ∂/∂x -> p_x.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations

from .graded import Coordinate, GradedError, GradedPoly, Ring, TruncationBounds
from .hbar import HbarOp, NegativeHbarPower
from .operators import HalfDensityOp, apply, compose, lie_derivative
from .polyvector import PoissonStructure, poisson_bracket


class UnsupportedFiber(GradedError):
    pass


class LinftyError(GradedError):
    pass


class CocycleError(GradedError):
    def __init__(self, residual):
        super().__init__(f"d_CE s = {residual} is not zero")
        self.residual = residual


class FrameError(GradedError):
    pass


def _perm_sign(idx):
    """Sign sorting idx (all entries odd symbols), or 0 on a repeat."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0
    s = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                s = -s
    return s


@dataclass(frozen=True)
class StructureConstants:
    """Coefficient data of an L∞-algebroid.

    rho[I][a] is the coefficient of η^I ∂/∂x^a (I increasing, length n-1 for ρ_n);
    C[I][j] the coefficient of η^I ∂/∂η^j.  Values are functions in `base_ring`.
    """
    base: tuple
    fiber: tuple                        # Coordinate(name, degree of e_i)
    rho: dict = field(default_factory=dict)
    C: dict = field(default_factory=dict)
    bounds: TruncationBounds = field(default_factory=TruncationBounds)
    eta_names: tuple | None = None
    xi_names: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "fiber", tuple(self.fiber))
        r = len(self.fiber)
        if self.eta_names is None:
            object.__setattr__(self, "eta_names", tuple(f"eta_{e.name}" for e in self.fiber))
        if self.xi_names is None:
            object.__setattr__(self, "xi_names", tuple(f"xi_{e.name}" for e in self.fiber))
        for e in self.fiber:
            if (1 - e.degree) % 2 == 0:
                raise UnsupportedFiber(
                    f"generator {e.name} of degree {e.degree} becomes even after the shift")
        object.__setattr__(self, "rho", self._normalize(self.rho, len(self.base), r))
        object.__setattr__(self, "C", self._normalize(self.C, r, r))
        self._check_degrees()

    def _normalize(self, table, n_targets, r):
        out: dict = {}
        for I, comps in table.items():
            I = tuple(I)
            if any(not 0 <= i < r for i in I):
                raise LinftyError(f"multi-index {I} out of range")
            s = _perm_sign(I)
            if not s:
                continue
            key = tuple(sorted(I))
            for t, c in comps.items():
                if not 0 <= t < n_targets:
                    raise LinftyError(f"target index {t} out of range")
                if not c:
                    continue
                if c.ring != self.base_ring:
                    c = GradedPoly(self.base_ring, c.terms)
                if not c.is_function():
                    raise LinftyError("structure functions must be functions of x")
                d = out.setdefault(key, {})
                d[t] = d.get(t, self.base_ring.zero()) + c.scale(s)
        return {I: {t: c for t, c in d.items() if c} for I, d in out.items()
                if any(d.values())}

    def _check_degrees(self):
        eta = [1 - e.degree for e in self.fiber]
        for I, comps in self.rho.items():
            for a, c in comps.items():
                want = 1 - sum(eta[i] for i in I) + self.base[a].degree
                if c.degrees() - {want}:
                    raise LinftyError(f"anchor coefficient rho[{I}][{a}] must have degree {want}")
        for I, comps in self.C.items():
            for j, c in comps.items():
                want = 1 - sum(eta[i] for i in I) + eta[j]
                if c.degrees() - {want}:
                    raise LinftyError(f"bracket coefficient C[{I}][{j}] must have degree {want}")

    # --- rings
    @property
    def rank(self):
        return len(self.fiber)

    @property
    def base_ring(self) -> Ring:
        return Ring(self.base, self.bounds)

    @property
    def shifted_ring(self) -> Ring:
        eta = [Coordinate(n, 1 - e.degree) for n, e in zip(self.eta_names, self.fiber)]
        return Ring(self.base + tuple(eta), self.bounds)

    @property
    def dual_ring(self) -> Ring:
        xi = [Coordinate(n, e.degree - 1) for n, e in zip(self.xi_names, self.fiber)]
        return Ring(self.base + tuple(xi), self.bounds)

    # --- antisymmetrized access
    def rho_at(self, I, a) -> GradedPoly:
        s = _perm_sign(I)
        if not s:
            return self.base_ring.zero()
        return self.rho.get(tuple(sorted(I)), {}).get(a, self.base_ring.zero()).scale(s)

    def C_at(self, I, j) -> GradedPoly:
        s = _perm_sign(I)
        if not s:
            return self.base_ring.zero()
        return self.C.get(tuple(sorted(I)), {}).get(j, self.base_ring.zero()).scale(s)

    def lift(self, f: GradedPoly, ring: Ring) -> GradedPoly:
        """A base function viewed in the shifted or dual ring."""
        return f.embed(ring, {i: i for i in range(len(self.base))})

    def is_lie_algebroid(self) -> bool:
        if any(c.degree != 0 for c in self.base):
            return False
        if any(e.degree != 0 for e in self.fiber):
            return False
        return all(len(I) == 1 for I in self.rho) and all(len(I) == 2 for I in self.C)


def _eta_monomial(ring: Ring, nb: int, I) -> GradedPoly:
    out = ring.one()
    for i in I:
        out = out * ring._gen(nb + i)
    return out


def ce_vector_field(sc: StructureConstants) -> GradedPoly:
    """D as a weight-1 polyvector on ℒ[1]."""
    ring = sc.shifted_ring
    nb = len(sc.base)
    N = ring.n
    D = ring.zero()
    for I, comps in sc.rho.items():
        eI = _eta_monomial(ring, nb, I)
        for a, c in comps.items():
            D = D + sc.lift(c, ring) * eI * ring._gen(N + a)
    for I, comps in sc.C.items():
        eI = _eta_monomial(ring, nb, I)
        for j, c in comps.items():
            D = D - sc.lift(c, ring) * eI * ring._gen(N + nb + j)
    return D


@dataclass
class LinftyReport:
    passed: bool
    residual: GradedPoly

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"


def check_linfty(sc: StructureConstants) -> LinftyReport:
    """D² = ½{D, D} must vanish."""
    D = ce_vector_field(sc)
    R = poisson_bracket(D, D).scale(Fraction(1, 2))
    return LinftyReport(not R, R)


def _dual_map(sc: StructureConstants) -> dict:
    """Symbol map from the doubled shifted ring to the doubled dual ring."""
    nb, r = len(sc.base), sc.rank
    N = nb + r
    m = {}
    for a in range(nb):
        m[a] = a
        m[N + a] = N + a
    for i in range(r):
        m[nb + i] = N + nb + i     # η^i  -> p_{ξ_i}
        m[N + nb + i] = nb + i     # p_{η^i} -> ξ_i
    return m


def to_dual(sc: StructureConstants, F: GradedPoly) -> GradedPoly:
    return F.embed(sc.dual_ring, _dual_map(sc))


def cocycle_form(sc: StructureConstants, s) -> GradedPoly:
    """Σ s_i η^i on ℒ[1] from a list of coefficient functions."""
    ring = sc.shifted_ring
    nb = len(sc.base)
    out = ring.zero()
    for i, si in enumerate(s):
        if si:
            out = out + sc.lift(GradedPoly(sc.base_ring, si.terms), ring) * ring._gen(nb + i)
    return out


def linear_poisson(sc: StructureConstants, cocycle=None) -> PoissonStructure:
    rep = check_linfty(sc)
    if not rep.passed:
        raise LinftyError(f"D² ≠ 0: {rep.residual}")
    T = to_dual(sc, ce_vector_field(sc))
    if cocycle is not None:
        T = T + to_dual(sc, cocycle_form(sc, cocycle))
    return PoissonStructure.from_total(T)


def n_degree(sc: StructureConstants, P: GradedPoly) -> set:
    """Fibre-linear degree on ℒ^∨[-1]: +1 per ξ, -1 per p_ξ."""
    ring = P.ring
    nb, r = len(sc.base), sc.rank
    N = ring.n
    return {sum(m[nb:nb + r]) - sum(m[N + nb:N + nb + r]) for m in P.terms}


# ---------------------------------------------------------------------------
# Fourier conjugation on operators

def _conjugate(sc: StructureConstants, op: HalfDensityOp, extra_power: int) -> dict:
    """Image of an operator on ℒ[1] under η^i -> ℏ∂_{ξ_i}, ∂_{η^j} -> ξ_j/ℏ.

    Returns power -> HalfDensityOp on the dual ring (before the negative-power check)."""
    dual = sc.dual_ring
    src = op.ring
    nb, r = len(sc.base), sc.rank
    N = src.n
    out: dict[int, HalfDensityOp] = {}
    for mono, c in op.body.terms.items():
        x_part = tuple(mono[:nb]) + (0,) * (2 * N - nb)
        term = HalfDensityOp(GradedPoly(dual, {x_part: c}))
        power = extra_power
        factors = []
        for i in range(r):
            if mono[nb + i]:
                factors.append(dual._gen(N + nb + i))   # ∂_{ξ_i}
                power += 1
        for a in range(nb):
            for _ in range(mono[N + a]):
                factors.append(dual._gen(N + a))
        for j in range(r):
            if mono[N + nb + j]:
                factors.append(dual._gen(nb + j))       # ξ_j
                power -= 1
        for f in factors:
            term = compose(term, HalfDensityOp(f))
        out[power] = out[power] + term if power in out else term
    return out


def _to_hbar(ring, coeffs: dict, hbar_max) -> HbarOp:
    for n, op in coeffs.items():
        if n < 0 and op:
            raise NegativeHbarPower(f"surviving ℏ^{n} term {op}")
    return HbarOp(ring, {n: op for n, op in coeffs.items() if n >= 0}, hbar_max)


def fourier_quantize(sc: StructureConstants, hbar_max: int | None = None) -> HbarOp:
    """Δ = 𝓕 ∘ L_{ℏD} ∘ 𝓕^{-1}."""
    L = lie_derivative(ce_vector_field(sc))
    return _to_hbar(sc.dual_ring, _conjugate(sc, L, 1), hbar_max)


# ---------------------------------------------------------------------------
# Berezin-Fourier transform on functions (used as an oracle)

def _berezin_ring(sc: StructureConstants) -> Ring:
    dual = sc.dual_ring
    eta = [Coordinate(n, 1 - e.degree) for n, e in zip(sc.eta_names, sc.fiber)]
    return Ring(dual.coords + tuple(eta), sc.bounds)


def fourier_transform(sc: StructureConstants, f: dict) -> dict:
    """𝓕(f) = ∫ Π_i (1 + ξ_i η^i/ℏ) f Dη for a Laurent series f = {power: function on ℒ[1]}.

    The Berezin integral takes the coefficient of η^1⋯η^r written rightmost."""
    big = _berezin_ring(sc)
    dual = sc.dual_ring
    nb, r = len(sc.base), sc.rank
    # shifted ring (x, η | p_x, p_η) -> big ring (x, ξ, η | ...)
    emb = {a: a for a in range(nb)}
    for i in range(r):
        emb[nb + i] = nb + r + i
    factors = [big._gen(nb + i) * big._gen(nb + r + i) for i in range(r)]
    out: dict[int, GradedPoly] = {}
    for q, g in f.items():
        G = g.embed(big, emb)
        for k in range(r + 1):
            for S in combinations(range(r), k):
                E = big.one()
                for i in S:
                    E = E * factors[i]
                prod = E * G
                res = {}
                for m, c in prod.terms.items():
                    if all(m[nb + r + i] == 1 for i in range(r)):
                        mm = m[:nb + r] + (0,) * (nb + r)
                        res[mm] = res.get(mm, 0) + c
                if res:
                    p = GradedPoly(dual, res)
                    out[q - k] = out[q - k] + p if q - k in out else p
    return {q: p for q, p in out.items() if p}


def inverse_fourier_transform(sc: StructureConstants, g: dict) -> dict:
    """Basis-wise inverse: 𝓕(x^α η^S) = κ ℏ^{-|S^c|} x^α ξ^{S^c}."""
    src = sc.shifted_ring
    nb, r = len(sc.base), sc.rank
    out: dict[int, GradedPoly] = {}
    for q, p in g.items():
        for m, c in p.terms.items():
            T = [i for i in range(r) if m[nb + i]]
            S = [i for i in range(r) if i not in T]
            mono = list(m[:nb]) + [1 if i in S else 0 for i in range(r)] + [0] * (nb + r)
            pre = GradedPoly(src, {tuple(mono): 1})
            img = fourier_transform(sc, {0: pre})
            if len(img) != 1:
                raise LinftyError("Fourier image of a basis element is not a monomial")
            (pw, val), = img.items()
            if len(val.terms) != 1 or m not in val.terms:
                raise LinftyError("Fourier image of a basis element is not a monomial")
            kappa = val.terms[m]
            term = pre.scale(c / kappa)
            k = q - pw
            out[k] = out[k] + term if k in out else term
    return {q: p for q, p in out.items() if p}


def laurent_apply(op: HalfDensityOp, f: dict, shift: int = 0) -> dict:
    out = {}
    for q, g in f.items():
        v = apply(op, g)
        if v:
            out[q + shift] = out[q + shift] + v if q + shift in out else v
    return {q: p for q, p in out.items() if p}


# ---------------------------------------------------------------------------
# Evens-Lu-Weinstein quantization

@dataclass(frozen=True)
class AlgebroidFrameData:
    """A-action on trivializing frames: ∇_{e_i}(top frame of Λ^top A) = theta_A[i]·frame,
    ∇_{e_i}(top frame of Λ^top T∨M) = theta_M[i]·frame."""
    theta_A: tuple
    theta_M: tuple

    @classmethod
    def canonical(cls, sc: StructureConstants) -> "AlgebroidFrameData":
        R = sc.base_ring
        r = sc.rank
        tA, tM = [], []
        for i in range(r):
            t = R.zero()
            for k in range(r):
                if k != i:
                    t = t + sc.C_at((i, k), k)
            tA.append(t)
            t = R.zero()
            for a in range(len(sc.base)):
                t = t + sc.rho_at((i,), a).partial(a)
            tM.append(t)
        return cls(tuple(tA), tuple(tM))

    def validate(self, sc: StructureConstants):
        can = AlgebroidFrameData.canonical(sc)
        R = sc.base_ring
        if len(self.theta_A) != sc.rank or len(self.theta_M) != sc.rank:
            raise FrameError("one action coefficient per fibre generator is required")
        for name, got, want in (("theta_A", self.theta_A, can.theta_A),
                                ("theta_M", self.theta_M, can.theta_M)):
            for i, (g, w) in enumerate(zip(got, want)):
                if GradedPoly(R, g.terms) != w:
                    raise FrameError(f"{name}[{i}] = {g} but the frame action is {w}")


def elw_differential(sc: StructureConstants, frames: AlgebroidFrameData) -> HalfDensityOp:
    """d_CE on sections of the ELW half-line: D + ½ Σ (θ^A_i + θ^M_i) η^i."""
    ring = sc.shifted_ring
    nb = len(sc.base)
    D = HalfDensityOp(ce_vector_field(sc))
    corr = ring.zero()
    for i in range(sc.rank):
        th = sc.lift(GradedPoly(sc.base_ring, (frames.theta_A[i] + frames.theta_M[i]).terms), ring)
        corr = corr + th * ring._gen(nb + i)
    return D + HalfDensityOp(corr.scale(Fraction(1, 2)))


def phi_conjugate(sc: StructureConstants, op: HalfDensityOp) -> HalfDensityOp:
    """Φ ∘ op ∘ Φ^{-1} under η^j -> ∂_{ξ_j}, ∂_{η^j} -> ξ_j."""
    out = HalfDensityOp.zero(sc.dual_ring)
    for p in _conjugate(sc, op, 0).values():
        out = out + p
    return out


def contraction_map(sc: StructureConstants, f: GradedPoly) -> GradedPoly:
    """Φ on functions: ω(η) ↦ ω(∂_ξ)(ξ_1⋯ξ_r), contraction into the top frame."""
    dual = sc.dual_ring
    nb, r = len(sc.base), sc.rank
    N = dual.n
    top = dual.one()
    for i in range(r):
        top = top * dual._gen(nb + i)
    out = dual.zero()
    for m, c in f.terms.items():
        x_part = tuple(m[:nb]) + (0,) * (2 * N - nb)
        g = top
        for i in reversed([i for i in range(r) if m[nb + i]]):
            g = g.partial(nb + i)
        out = out + GradedPoly(dual, {x_part: c}) * g
    return out


def contraction_inverse(sc: StructureConstants, g: GradedPoly) -> GradedPoly:
    src = sc.shifted_ring
    nb, r = len(sc.base), sc.rank
    out = src.zero()
    for m, c in g.terms.items():
        S = [i for i in range(r) if not m[nb + i]]
        mono = tuple(list(m[:nb]) + [1 if i in S else 0 for i in range(r)] + [0] * (nb + r))
        img = contraction_map(sc, GradedPoly(src, {mono: 1}))
        kappa = img.terms[m]
        out = out + GradedPoly(src, {mono: c / kappa})
    return out


@dataclass
class ELWResult:
    Delta: HbarOp
    iota: HalfDensityOp
    conj: HalfDensityOp


def elw_quantize(sc: StructureConstants, frames: AlgebroidFrameData | None, s,
                 hbar_max: int | None = None) -> ELWResult:
    """Δ = ℏ ι_s + ℏ² Φ ∘ d_CE^ELW ∘ Φ^{-1} for a Lie algebroid with 1-cocycle s."""
    if not sc.is_lie_algebroid():
        raise LinftyError("ELW quantization needs an ordinary Lie algebroid")
    rep = check_linfty(sc)
    if not rep.passed:
        raise LinftyError(f"D² ≠ 0: {rep.residual}")
    frames = frames or AlgebroidFrameData.canonical(sc)
    frames.validate(sc)
    s = list(s) + [sc.base_ring.zero()] * (sc.rank - len(s))
    form = cocycle_form(sc, s)
    ds = poisson_bracket(ce_vector_field(sc), form)
    if ds:
        raise CocycleError(ds)
    dual = sc.dual_ring
    nb = len(sc.base)
    iota = dual.zero()
    for i, si in enumerate(s):
        if si:
            iota = iota + sc.lift(GradedPoly(sc.base_ring, si.terms), dual) * dual._gen(dual.n + nb + i)
    iota = HalfDensityOp(iota)
    conj = phi_conjugate(sc, elw_differential(sc, frames))
    D = HbarOp(dual, {1: iota, 2: conj}, hbar_max)
    return ELWResult(D, iota, conj)


# ---------------------------------------------------------------------------

def cotangent_algebroid(base, pi: dict, bounds: TruncationBounds | None = None,
                        fiber_names=None) -> StructureConstants:
    """T∨M of a Poisson bivector π = Σ_{a<b} π^{ab} ∂_a∧∂_b (given as {(a, b): π^{ab}}).

    Anchor dx^a ↦ π^{ab}∂_b; bracket [dx^a, dx^b] = ∂_c π^{ab} dx^c."""
    base = tuple(base)
    bounds = bounds or TruncationBounds()
    if any(c.degree != 0 for c in base):
        raise LinftyError("cotangent algebroids need an ordinary (degree-0) base")
    R = Ring(base, bounds)
    n = len(base)
    full = {}
    for (a, b), v in pi.items():
        v = GradedPoly(R, v.terms)
        full[(a, b)] = full.get((a, b), R.zero()) + v
        full[(b, a)] = full.get((b, a), R.zero()) - v
    get = lambda a, b: full.get((a, b), R.zero())
    # Jacobi: π^{ad}∂_dπ^{bc} + cyclic = 0
    for a, b, c in combinations(range(n), 3):
        J = R.zero()
        for (i, j, k) in ((a, b, c), (b, c, a), (c, a, b)):
            for d in range(n):
                J = J + get(i, d) * get(j, k).partial(d)
        if J:
            raise LinftyError(f"bivector fails the Jacobi identity: {J}")
    names = fiber_names or [f"d{c.name}" for c in base]
    fiber = tuple(Coordinate(nm, 0) for nm in names)
    rho = {(a,): {b: get(a, b) for b in range(n) if get(a, b)} for a in range(n)}
    C = {}
    for a, b in combinations(range(n), 2):
        comps = {c: get(a, b).partial(c) for c in range(n) if get(a, b).partial(c)}
        if comps:
            C[(a, b)] = comps
    return StructureConstants(base, fiber, {k: v for k, v in rho.items() if v}, C, bounds)
