"""
ℏ-enhanced operators Σ ℏ^n Δ_n with order(Δ_n) ≤ n (or ≤ n - t).

ℏ is a formal degree-0 tag.  Series are truncated above hbar_max (taken from
the ring bounds unless given).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .graded import GradedError, GradedPoly, Ring
from .operators import (HalfDensityOp, NEG_INF, adjoint, commutator, compose,
                        order, principal_symbol)
from .polyvector import poisson_bracket

INF = float("inf")


class FiltrationError(GradedError):
    pass


class NegativeHbarPower(GradedError):
    pass


class HbarOp:
    __slots__ = ("ring", "coeffs", "hbar_max")

    def __init__(self, ring: Ring, coeffs: dict | None = None, hbar_max: int | None = None,
                 check: bool = False):
        self.ring = ring
        self.hbar_max = ring.bounds.hbar_max if hbar_max is None else hbar_max
        clean = {}
        for n, op in (coeffs or {}).items():
            if not isinstance(op, HalfDensityOp):
                op = HalfDensityOp(op if isinstance(op, GradedPoly) else ring.const(op))
            if n < 0:
                if op:
                    raise NegativeHbarPower(f"coefficient at ℏ^{n}")
                continue
            if n > self.hbar_max or not op:
                continue
            clean[n] = op
        self.coeffs: dict[int, HalfDensityOp] = dict(sorted(clean.items()))
        if check:
            for n, op in self.coeffs.items():
                if order(op) > n:
                    raise FiltrationError(f"order(Δ_{n}) = {order(op)} > {n}")

    # -- container protocol
    def __getitem__(self, n) -> HalfDensityOp:
        return self.coeffs.get(n, HalfDensityOp.zero(self.ring))

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, HbarOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __repr__(self):
        return f"HbarOp({self.to_str()})"

    def to_str(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"h^{n} * ({op})" for n, op in self.coeffs.items())

    def _new(self, coeffs, hbar_max=None):
        hm = self.hbar_max if hbar_max is None else hbar_max
        return HbarOp(self.ring, coeffs, hm)

    def __add__(self, other: "HbarOp"):
        out = dict(self.coeffs)
        for n, op in other.coeffs.items():
            out[n] = out[n] + op if n in out else op
        return self._new(out, min(self.hbar_max, other.hbar_max))

    def __neg__(self):
        return self._new({n: -op for n, op in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return self._new({n: op * c for n, op in self.coeffs.items()})

    __rmul__ = __mul__

    def __matmul__(self, other):
        return hbar_compose(self, other)

    def shift(self, k: int) -> "HbarOp":
        """Multiply by ℏ^k (k may be negative if no negative power results)."""
        return self._new({n + k: op for n, op in self.coeffs.items()})

    def degrees(self):
        out = set()
        for op in self.coeffs.values():
            out |= op.degrees()
        return out

    def degree(self):
        ds = self.degrees()
        if len(ds) > 1:
            raise GradedError(f"inhomogeneous ℏ-operator, degrees {sorted(ds)}")
        return ds.pop() if ds else 0

    def check_orders(self, t: int = 0):
        for n, op in self.coeffs.items():
            if order(op) > n - t:
                raise FiltrationError(f"order(Δ_{n}) = {order(op)} > {n - t}")
        return self


def hbar(ring: Ring, n: int, op, hbar_max=None) -> HbarOp:
    """ℏ^n·op as an HbarOp."""
    return HbarOp(ring, {n: op}, hbar_max)


def hbar_compose(A: HbarOp, B: HbarOp) -> HbarOp:
    hm = min(A.hbar_max, B.hbar_max)
    out: dict[int, HalfDensityOp] = {}
    for i, a in A.coeffs.items():
        for j, b in B.coeffs.items():
            if i + j > hm:
                continue
            c = compose(a, b)
            out[i + j] = out[i + j] + c if i + j in out else c
    return HbarOp(A.ring, out, hm)


def hbar_commutator(A: HbarOp, B: HbarOp) -> HbarOp:
    """[A, B]_ℏ = (1/ℏ)[A, B]; the ℏ^n coefficient is Σ_{i+j=n+1} [A_i, B_j]."""
    hm = min(A.hbar_max, B.hbar_max)
    out: dict[int, HalfDensityOp] = {}
    for i, a in A.coeffs.items():
        for j, b in B.coeffs.items():
            n = i + j - 1
            if n > hm:
                continue
            c = commutator(a, b)
            if n < 0:
                if c:
                    raise NegativeHbarPower("[Δ_0, Δ'_0] must vanish")
                continue
            out[n] = out[n] + c if n in out else c
    return HbarOp(A.ring, out, hm)


def t_index(D: HbarOp):
    if not D.coeffs:
        return INF
    return min(n - order(op) for n, op in D.coeffs.items())


@dataclass
class HbarSymbol:
    ring: Ring
    series: dict = field(default_factory=dict)   # n -> polyvector

    def __post_init__(self):
        self.series = {n: p for n, p in sorted(self.series.items()) if p}

    def __eq__(self, other):
        return isinstance(other, HbarSymbol) and self.series == other.series

    def __bool__(self):
        return bool(self.series)

    def __getitem__(self, n):
        return self.series.get(n, self.ring.zero())

    def at_one(self) -> GradedPoly:
        out = self.ring.zero()
        for p in self.series.values():
            out = out + p
        return out

    def __add__(self, other):
        out = dict(self.series)
        for n, p in other.series.items():
            out[n] = out[n] + p if n in out else p
        return HbarSymbol(self.ring, out)

    def __sub__(self, other):
        return self + HbarSymbol(other.ring, {n: -p for n, p in other.series.items()})

    def shift(self, k):
        return HbarSymbol(self.ring, {n + k: p for n, p in self.series.items()})

    def truncate(self, hbar_max):
        return HbarSymbol(self.ring, {n: p for n, p in self.series.items() if n <= hbar_max})


def embed_hbar(X: GradedPoly) -> HbarSymbol:
    """X ↦ X_ℏ = Σ ℏ^n X_n (weight-n parts)."""
    return HbarSymbol(X.ring, X.weight_parts())


def symbol_bracket(X: HbarSymbol, Y: HbarSymbol) -> HbarSymbol:
    """(1/ℏ){X, Y} extended ℏ-bilinearly."""
    out: dict[int, GradedPoly] = {}
    for i, x in X.series.items():
        for j, y in Y.series.items():
            b = poisson_bracket(x, y)
            if not b:
                continue
            n = i + j - 1
            if n < 0:
                raise NegativeHbarPower("bracket at ℏ^-1")
            out[n] = out[n] + b if n in out else b
    return HbarSymbol(X.ring, out)


def extended_symbol(D: HbarOp) -> HbarSymbol:
    return extended_symbol_t(D, 0)


def extended_symbol_t(D: HbarOp, t: int) -> HbarSymbol:
    """σ_ℏ^t(Δ) = ℏ^t σ_ℏ(ℏ^{-t}Δ): the ℏ^n coefficient is σ_{n-t}(Δ_n)."""
    if t_index(D) < t:
        raise FiltrationError(f"t_index {t_index(D)} < {t}")
    return HbarSymbol(D.ring, {n: principal_symbol(op, n - t) for n, op in D.coeffs.items()})


def is_self_adjoint(D: HbarOp) -> bool:
    for n, op in D.coeffs.items():
        adj = HalfDensityOp.zero(D.ring)
        for part in op.homogeneous_parts().values():
            adj = adj + adjoint(part)
        if adj != (op if n % 2 == 0 else -op):
            return False
    return True


@dataclass
class BVReport:
    passed: bool
    failures: list          # (clause, witness)
    hbar_max: int

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"

    @property
    def verdict(self):
        return f"{self.status} (up to order h^{self.hbar_max})"


def square(D: HbarOp) -> HbarOp:
    return hbar_compose(D, D)


def is_bv_infinity(D: HbarOp) -> BVReport:
    fails = []
    if D.coeffs and D.degrees() != {1}:
        fails.append(("degree", sorted(D.degrees())))
    if D[0]:
        fails.append(("vanishing at h=0", D[0]))
    try:
        sig = extended_symbol(D)
    except FiltrationError as e:
        fails.append(("filtration", str(e)))
        sig = None
    if sig is not None and not sig:
        fails.append(("nonzero symbol", "sigma_h = 0"))
    sq = square(D)
    if sq:
        fails.append(("square zero", sq))
    return BVReport(not fails, fails, D.hbar_max)


class DerivedBracketMismatch(GradedError):
    pass


def derived_brackets(D: HbarOp, *fs: GradedPoly) -> GradedPoly:
    """λ_n(f_1..f_n) = lim_{ℏ→0} [...[Δ, f_1]_ℏ, ..., f_n]_ℏ, cross-checked
    against the contraction {...{Π_n, f_1}, ..., f_n} with Π_n = σ_n(Δ_n)."""
    ring = D.ring
    cur = D
    for f in fs:
        if not f.is_function():
            raise GradedError("derived brackets take functions")
        cur = hbar_commutator(cur, HbarOp(ring, {0: HalfDensityOp(f)}, D.hbar_max))
    lam = cur[0]
    if order(lam) > 0:
        raise DerivedBracketMismatch("limit ℏ→0 is not a function")
    value = lam.body
    n = len(fs)
    if n <= D.hbar_max:
        oracle = principal_symbol(D[n], n)
        for f in fs:
            oracle = poisson_bracket(oracle, f)
        if oracle != value:
            raise DerivedBracketMismatch(f"literal {value} vs contraction {oracle}")
    return value
