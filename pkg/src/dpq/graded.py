"""
Graded-commutative polynomial algebra with exact rational coefficients.

A `Ring` is built from a list of ℤ-graded coordinates.  Every ring is
"doubled": next to each coordinate x^a it carries a momentum symbol p_a of
degree -|x^a|.  Functions are the polynomials with no momentum factor;
polyvectors (elements of Γ(ŜT_M)) and normal-ordered differential
operators use the momentum symbols as well.

Monomials are exponent tuples in canonical symbol order (coordinates in
declaration order, then momenta in the same order).  The Koszul sign of
any reordering is folded into the coefficient eagerly, so the stored
representation is a normal form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping


class GradedError(Exception):
    pass


class RingMismatch(GradedError):
    pass


class NotInvertible(GradedError):
    pass


class UnknownSymbol(GradedError):
    pass


@dataclass(frozen=True)
class TruncationBounds:
    """Finite precision for formal series.

    weight_max caps the total momentum exponent, base_degree_max the total
    exponent of even base coordinates, hbar_max the retained power of ℏ.
    """
    weight_max: int = 12
    base_degree_max: int = 12
    hbar_max: int = 12


@dataclass(frozen=True)
class Coordinate:
    name: str
    degree: int

    @property
    def parity(self) -> int:
        return self.degree % 2


def as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


@dataclass(frozen=True)
class Ring:
    coords: tuple[Coordinate, ...]
    bounds: TruncationBounds = field(default_factory=TruncationBounds)

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        names = [c.name for c in self.coords]
        if len(set(names)) != len(names):
            raise GradedError(f"duplicate coordinate names in {names}")

    # --- symbol tables -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.coords)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        base = [c.degree for c in self.coords]
        return tuple(base + [-d for d in base])

    @cached_property
    def parities(self) -> tuple[int, ...]:
        return tuple(d % 2 for d in self.degrees)

    @cached_property
    def odd_indices(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.parities) if p)

    @cached_property
    def even_base(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.parities[i] == 0)

    @cached_property
    def index(self) -> dict[str, int]:
        return {c.name: i for i, c in enumerate(self.coords)}

    def coord_index(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise UnknownSymbol(f"unknown coordinate {name!r}") from None

    def symbol_name(self, i: int, momentum_style: str = "p[{}]") -> str:
        if i < self.n:
            return self.coords[i].name
        return momentum_style.format(self.coords[i - self.n].name)

    # --- truncation ----------------------------------------------------

    def within(self, mono: tuple[int, ...]) -> bool:
        b = self.bounds
        if sum(mono[self.n:]) > b.weight_max:
            return False
        return sum(mono[i] for i in self.even_base) <= b.base_degree_max

    def with_bounds(self, bounds: TruncationBounds) -> "Ring":
        return Ring(self.coords, bounds)

    # --- monomial algebra ----------------------------------------------

    @cached_property
    def unit(self) -> tuple[int, ...]:
        return (0,) * (2 * self.n)

    def mono_degree(self, mono) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def mono_parity(self, mono) -> int:
        return sum(mono[i] for i in self.odd_indices) % 2

    def mono_mul(self, a, b):
        """Product of two monomials: (sign, monomial) or None if zero."""
        seen = 0
        flips = 0
        for i in reversed(self.odd_indices):
            if b[i]:
                if a[i]:
                    return None
                flips += seen
            if a[i]:
                seen += 1
        return (-1 if flips & 1 else 1), tuple(x + y for x, y in zip(a, b))

    # --- constructors --------------------------------------------------

    def poly(self, terms: Mapping | Iterable = ()) -> "GradedPoly":
        return GradedPoly(self, terms)

    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def const(self, c) -> "GradedPoly":
        return GradedPoly(self, {self.unit: as_fraction(c)})

    def one(self) -> "GradedPoly":
        return self.const(1)

    def _gen(self, i: int) -> "GradedPoly":
        mono = [0] * (2 * self.n)
        mono[i] = 1
        return GradedPoly(self, {tuple(mono): Fraction(1)})

    def var(self, name: str) -> "GradedPoly":
        return self._gen(self.coord_index(name))

    def momentum(self, name: str) -> "GradedPoly":
        return self._gen(self.n + self.coord_index(name))

    def gens(self) -> list["GradedPoly"]:
        return [self._gen(i) for i in range(self.n)]


def _check_ring(p: "GradedPoly", q: "GradedPoly"):
    if p.ring != q.ring:
        raise RingMismatch("operands live in different rings")


class GradedPoly:
    """Exact-rational polynomial in graded commuting/anticommuting symbols.

    Values are immutable; all operations return new polynomials.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping | Iterable = ()):
        self.ring = ring
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        odd = ring.odd_indices
        for mono, c in items:
            mono = tuple(mono)
            if any(mono[i] > 1 for i in odd):
                continue
            if not ring.within(mono):
                continue
            c = clean.get(mono, 0) + as_fraction(c)
            if c:
                clean[mono] = c
            else:
                clean.pop(mono, None)
        self.terms: dict[tuple[int, ...], Fraction] = clean
        self._hash = None

    # --- basic protocol ------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, GradedPoly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"GradedPoly({self.to_str()})"

    def __str__(self):
        return self.to_str()

    def to_str(self, momentum_style: str = "p[{}]") -> str:
        from .serialize import format_poly
        return format_poly(self, momentum_style)

    # --- linear structure ----------------------------------------------

    def _coerce(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            _check_ring(self, other)
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return GradedPoly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "GradedPoly":
        c = as_fraction(c)
        if not c:
            return self.ring.zero()
        return GradedPoly(self.ring, {m: c * v for m, v in self.terms.items()})

    # --- graded-commutative product ------------------------------------

    def __mul__(self, other):
        if not isinstance(other, GradedPoly):
            return self.scale(other)
        _check_ring(self, other)
        ring = self.ring
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                r = ring.mono_mul(ma, mb)
                if r is None:
                    continue
                s, m = r
                if not ring.within(m):
                    continue
                out[m] = out.get(m, 0) + s * ca * cb
        return GradedPoly(ring, out)

    def __rmul__(self, other):
        # scalars only: graded product with a scalar is commutative
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    # --- grading -------------------------------------------------------

    def degrees(self) -> set[int]:
        return {self.ring.mono_degree(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        """Degree of a homogeneous polynomial (0 for the zero polynomial)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise GradedError(f"inhomogeneous polynomial, degrees {sorted(ds)}")
        return ds.pop() if ds else 0

    def homogeneous_parts(self) -> dict[int, "GradedPoly"]:
        parts: dict[int, dict] = {}
        for m, c in self.terms.items():
            parts.setdefault(self.ring.mono_degree(m), {})[m] = c
        return {d: GradedPoly(self.ring, t) for d, t in parts.items()}

    def homogeneous_part(self, d: int) -> "GradedPoly":
        return GradedPoly(self.ring, {m: c for m, c in self.terms.items()
                                      if self.ring.mono_degree(m) == d})

    def mono_weight(self, m) -> int:
        return sum(m[self.ring.n:])

    def weights(self) -> set[int]:
        return {sum(m[self.ring.n:]) for m in self.terms}

    def weight_part(self, w: int) -> "GradedPoly":
        n = self.ring.n
        return GradedPoly(self.ring, {m: c for m, c in self.terms.items()
                                      if sum(m[n:]) == w})

    def weight_parts(self) -> dict[int, "GradedPoly"]:
        return {w: self.weight_part(w) for w in sorted(self.weights())}

    def max_weight(self):
        ws = self.weights()
        return max(ws) if ws else None

    def constant_term(self) -> Fraction:
        return self.terms.get(self.ring.unit, Fraction(0))

    def is_function(self) -> bool:
        return self.weights() <= {0}

    # --- derivatives ---------------------------------------------------

    def _symbol(self, a) -> int:
        if isinstance(a, int):
            return a
        if isinstance(a, Coordinate):
            a = a.name
        return self.ring.coord_index(a)

    def partial(self, a) -> "GradedPoly":
        """Left partial derivative by the symbol a (name or index)."""
        i = self._symbol(a)
        ring = self.ring
        odd_i = ring.parities[i]
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if not e:
                continue
            s = 1
            if odd_i:
                before = sum(m[j] for j in ring.odd_indices if j < i)
                s = -1 if before & 1 else 1
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = out.get(tuple(mm), 0) + s * e * c
        return GradedPoly(ring, out)

    def rpartial(self, a) -> "GradedPoly":
        """Right partial derivative by the symbol a (name or index)."""
        i = self._symbol(a)
        ring = self.ring
        odd_i = ring.parities[i]
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if not e:
                continue
            s = 1
            if odd_i:
                after = sum(m[j] for j in ring.odd_indices if j > i)
                s = -1 if after & 1 else 1
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = out.get(tuple(mm), 0) + s * e * c
        return GradedPoly(ring, out)

    def momentum_index(self, a) -> int:
        return self.ring.n + self._symbol(a)

    def partial_p(self, a) -> "GradedPoly":
        return self.partial(self.momentum_index(a))

    def rpartial_p(self, a) -> "GradedPoly":
        return self.rpartial(self.momentum_index(a))

    # --- inverses and roots ---------------------------------------------

    def _unit_series(self, coeff_of) -> "GradedPoly":
        c = self.constant_term()
        if not c:
            raise NotInvertible("constant term is zero")
        u = (self - c).scale(Fraction(1) / c)
        out = self.ring.zero()
        power = self.ring.one()
        k = 0
        while power:
            out = out + power.scale(coeff_of(k))
            power = power * u
            k += 1
        return out

    def invert_unit(self) -> "GradedPoly":
        """Inverse of a unit, exact up to the ring's truncation bounds."""
        c = self.constant_term()
        inv = self._unit_series(lambda k: (-1) ** k)
        return inv.scale(Fraction(1) / c) if c else inv

    def sqrt_unit(self) -> "GradedPoly":
        """Square root with positive constant term; the constant must be a rational square."""
        c = self.constant_term()
        if c <= 0:
            raise NotInvertible("square root needs a positive constant term")
        root = _rational_sqrt(c)
        if root is None:
            raise NotInvertible(f"constant term {c} is not a rational square")

        def binom_half(k):
            out = Fraction(1)
            for j in range(k):
                out *= (Fraction(1, 2) - j) / (j + 1)
            return out

        return self._unit_series(binom_half).scale(root)

    # --- transport between rings ---------------------------------------

    def embed(self, target: Ring, index_map: Mapping[int, int]) -> "GradedPoly":
        """Map symbols i -> index_map[i] of target, multiplying factors in source order."""
        gens = {}
        out = target.zero()
        for m, c in self.terms.items():
            t = target.const(c)
            for i, e in enumerate(m):
                if e:
                    j = index_map[i]
                    if j not in gens:
                        gens[j] = target._gen(j)
                    for _ in range(e):
                        t = t * gens[j]
            out = out + t
        return out


def _rational_sqrt(c: Fraction):
    from math import isqrt
    n, d = c.numerator, c.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def mul(p: GradedPoly, q: GradedPoly) -> GradedPoly:
    return p * q


def partial(a, p: GradedPoly) -> GradedPoly:
    return p.partial(a)


def invert_unit(p: GradedPoly) -> GradedPoly:
    return p.invert_unit()
