"""
Differential operators on half-densities in a single global chart.

An operator is stored in normal form: coefficient functions to the left of
derivative words, written as a GradedPoly whose momentum symbols stand for
the partial derivatives.  A stored monomial c·x^α·∂^β means the composite
c·x^α ∘ ∂_{1}^{β_1} ∘ ... ∘ ∂_{n}^{β_n}.  The 1/k! normalisation of the
usual local formula is absorbed, so the weight-n part of an order-n
operator *is* its principal symbol.
"""

from __future__ import annotations

from fractions import Fraction

from .graded import GradedError, GradedPoly, Ring, RingMismatch, as_fraction
from .polyvector import components

NEG_INF = float("-inf")


class OrderError(GradedError):
    pass


class HalfDensity:
    """s(x)·√Dx in the active chart; only the coefficient is stored."""

    __slots__ = ("coefficient",)

    def __init__(self, coefficient: GradedPoly):
        if not coefficient.is_function():
            raise GradedError("half-density coefficients are functions")
        self.coefficient = coefficient

    def __eq__(self, other):
        return isinstance(other, HalfDensity) and self.coefficient == other.coefficient

    def __repr__(self):
        return f"HalfDensity({self.coefficient} √Dx)"


class HalfDensityOp:
    __slots__ = ("body",)

    def __init__(self, body: GradedPoly):
        self.body = body

    @property
    def ring(self) -> Ring:
        return self.body.ring

    @classmethod
    def zero(cls, ring):
        return cls(ring.zero())

    @classmethod
    def function(cls, f: GradedPoly):
        if not f.is_function():
            raise GradedError("expected a function")
        return cls(f)

    @classmethod
    def d(cls, ring, name):
        return cls(ring.momentum(name))

    def __bool__(self):
        return bool(self.body)

    def __eq__(self, other):
        if isinstance(other, HalfDensityOp):
            return self.body == other.body
        if isinstance(other, (int, Fraction)):
            return self.body == other
        return NotImplemented

    def __hash__(self):
        return hash(self.body)

    def __repr__(self):
        return f"HalfDensityOp({self.to_str()})"

    def to_str(self):
        return self.body.to_str("d({})")

    __str__ = to_str

    def _other(self, other):
        if isinstance(other, HalfDensityOp):
            return other
        if isinstance(other, GradedPoly):
            return HalfDensityOp(other)
        return HalfDensityOp(self.ring.const(other))

    def __add__(self, other):
        return HalfDensityOp(self.body + self._other(other).body)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfDensityOp(self.body - self._other(other).body)

    def __neg__(self):
        return HalfDensityOp(-self.body)

    def __mul__(self, c):
        if isinstance(c, (HalfDensityOp, GradedPoly)):
            raise TypeError("use @ or compose() for operator products")
        return HalfDensityOp(self.body.scale(c))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return compose(self, self._other(other))

    def degree(self):
        return self.body.degree()

    def degrees(self):
        return self.body.degrees()

    def homogeneous_parts(self):
        return {d: HalfDensityOp(p) for d, p in self.body.homogeneous_parts().items()}

    def order(self):
        return order(self)

    def with_ring(self, ring: Ring) -> "HalfDensityOp":
        return HalfDensityOp(GradedPoly(ring, self.body.terms))


def _check(A, B):
    if A.ring.coords != B.ring.coords:
        raise RingMismatch("operators on different manifolds")


def _split(ring: Ring, mono):
    """x-part monomial (momenta zeroed) and the derivative word as a list of symbol indices."""
    n = ring.n
    base = mono[:n] + (0,) * n
    word = []
    for a in range(n):
        word.extend([a] * mono[n + a])
    return base, word


def _d_apply(ring: Ring, a: int, B: GradedPoly) -> GradedPoly:
    """∂_a ∘ B in normal form: p_a·B + (∂_{x^a} B)."""
    return ring._gen(ring.n + a) * B + B.partial(a)


def compose(A: HalfDensityOp, B: HalfDensityOp) -> HalfDensityOp:
    _check(A, B)
    ring = A.ring
    Bb = B.body if B.ring == ring else GradedPoly(ring, B.body.terms)
    out = ring.zero()
    cache: dict[tuple, GradedPoly] = {(): Bb}
    for mono, c in A.body.terms.items():
        base, word = _split(ring, mono)
        key = tuple(word)
        if key not in cache:
            # word w = a1 a2 ... ak acts on B innermost-last: a1∘(a2∘(...∘B))
            cur = Bb
            for k in range(len(word) - 1, -1, -1):
                sub = tuple(word[k:])
                if sub in cache:
                    cur = cache[sub]
                else:
                    cur = _d_apply(ring, word[k], cur)
                    cache[sub] = cur
            cache[key] = cur
        out = out + GradedPoly(ring, {base: c}) * cache[key]
    return HalfDensityOp(out)


def commutator(A: HalfDensityOp, B: HalfDensityOp) -> HalfDensityOp:
    out = HalfDensityOp.zero(A.ring)
    for dA, Ah in A.homogeneous_parts().items():
        for dB, Bh in B.homogeneous_parts().items():
            s = -1 if (dA * dB) % 2 else 1
            out = out + compose(Ah, Bh) - compose(Bh, Ah) * s
    return out


def order(A: HalfDensityOp):
    w = A.body.max_weight()
    return NEG_INF if w is None else w


def adjoint(A: HalfDensityOp) -> HalfDensityOp:
    """Formal adjoint by integration by parts: ∂⁺ = -∂, f⁺ = f, (AB)⁺ = ±B⁺A⁺.

    For a term c·f∘W with W a derivative word of length k, W⁺ = (-1)^k W
    (reversing a graded-commuting word and reordering back cancel), so the
    term maps to c·(-1)^{k + |f||W|} W∘f.
    """
    ring = A.ring
    out = ring.zero()
    for mono, c in A.body.terms.items():
        base, word = _split(ring, mono)
        fdeg = ring.mono_degree(base)
        wdeg = ring.mono_degree(mono) - fdeg
        s = (-1) ** (len(word) + (fdeg * wdeg) % 2)
        W = GradedPoly(ring, {(0,) * ring.n + mono[ring.n:]: 1})
        f = GradedPoly(ring, {base: 1})
        out = out + compose(HalfDensityOp(W), HalfDensityOp(f)).body.scale(s * c)
    return HalfDensityOp(out)


def principal_symbol(A: HalfDensityOp, n: int) -> GradedPoly:
    if order(A) > n:
        raise OrderError(f"operator has order {order(A)} > {n}")
    return A.body.weight_part(n)


def lie_derivative(X: GradedPoly) -> HalfDensityOp:
    """L_X = X^a ∂_a + Σ_a (-1)^{|a|(|X|+1)} ½ ∂_a X^a."""
    ring = X.ring
    if X and X.weights() != {1}:
        raise GradedError("Lie derivative needs a weight-1 polyvector")
    out = X
    for dX, Xh in X.homogeneous_parts().items():
        for a, Xa in components(Xh).items():
            s = -1 if (ring.parities[a] * (dX + 1)) % 2 else 1
            out = out + Xa.partial(a).scale(Fraction(s, 2))
    return HalfDensityOp(out)


def apply(A: HalfDensityOp, s):
    """Apply A to a half-density (or to its coefficient function)."""
    wrap = isinstance(s, HalfDensity)
    f = s.coefficient if wrap else s
    if not f.is_function():
        raise GradedError("can only apply operators to functions / half-density coefficients")
    if f.ring.coords != A.ring.coords:
        raise RingMismatch("half-density on a different manifold")
    ring = A.ring
    f = GradedPoly(ring, f.terms)
    out = ring.zero()
    cache = {(): f}
    for mono, c in A.body.terms.items():
        base, word = _split(ring, mono)
        key = tuple(word)
        if key not in cache:
            cur = f
            for a in reversed(word):
                cur = cur.partial(a)
            cache[key] = cur
        out = out + GradedPoly(ring, {base: c}) * cache[key]
    return HalfDensity(out) if wrap else out


def conjugate_by_volume(A: HalfDensityOp, rho: GradedPoly) -> HalfDensityOp:
    """Δ_ρ f := ρ^{-1/2} Δ(f ρ^{1/2}), as an operator on functions."""
    if not rho.is_function():
        raise GradedError("volume factor must be a function")
    r = rho.sqrt_unit()
    return compose(compose(HalfDensityOp(r.invert_unit()), A), HalfDensityOp(r))


def scalar_op(ring: Ring, c) -> HalfDensityOp:
    return HalfDensityOp(ring.const(as_fraction(c)))
