"""Shared fixtures and random generators for the test-suite.

Generators take an object with randint(a, b) and choice(seq), so the same
code drives hypothesis (through HypoRng) and seeded random.Random instances.
"""

from fractions import Fraction
from functools import lru_cache

from dpq.graded import Coordinate, GradedPoly, Ring, TruncationBounds
from dpq.hbar import HbarOp
from dpq.linfty import StructureConstants
from dpq.operators import HalfDensityOp, adjoint
from dpq.polyvector import PoissonStructure, degree_slice

WIDE = TruncationBounds(weight_max=10, base_degree_max=10, hbar_max=12)

HOVIK = Ring((Coordinate("xi", -1), Coordinate("tau", -1), Coordinate("z", -2)), WIDE)
MIXED = Ring((Coordinate("a", 0), Coordinate("b", 1), Coordinate("c", -1), Coordinate("d", 2)), WIDE)
RINGS = (HOVIK, MIXED)


class HypoRng:
    def __init__(self, data):
        import hypothesis.strategies as st
        self._data, self._st = data, st

    def randint(self, a, b):
        return self._data.draw(self._st.integers(a, b))

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]


def hovik():
    R = HOVIK
    xi, tau, z = R.gens()
    pxi, ptau, pz = (R.momentum(n) for n in ("xi", "tau", "z"))
    P = tau * pxi + tau * xi * pz
    return R, P, ptau


def hovik_structure(Q=False):
    R, P, Qv = hovik()
    return PoissonStructure(R, Qv if Q else R.zero(), {2: P * Qv})


@lru_cache(maxsize=None)
def _slice(ring, degree, max_weight, max_base):
    return tuple(degree_slice(ring, degree, max_weight, max_base))


def _coeff(rng):
    c = rng.randint(1, 3) * rng.choice((1, -1))
    return Fraction(c, rng.choice((1, 2)))


def rand_poly(rng, ring, degree=None, weight=None, max_weight=2, max_base=2, terms=3):
    """Random homogeneous polynomial (may be zero if the slice is empty)."""
    if degree is None:
        degree = rng.randint(-3, 3)
    monos = _slice(ring, degree, max_weight, max_base)
    if weight is not None:
        monos = tuple(m for m in monos if sum(m[ring.n:]) == weight)
    if not monos:
        return ring.zero()
    k = rng.randint(1, terms)
    return GradedPoly(ring, [(rng.choice(monos), _coeff(rng)) for _ in range(k)])


def rand_nonzero(rng, ring, **kw):
    for _ in range(50):
        p = rand_poly(rng, ring, **kw)
        if p:
            return p
    return ring.one() if kw.get("degree", 0) == 0 else rand_poly(rng, ring, **kw)


def rand_vector_field(rng, ring, degree=None, max_base=2):
    return rand_poly(rng, ring, degree=degree, weight=1, max_weight=1, max_base=max_base)


def rand_op(rng, ring, order=2, degree=None, terms=3):
    return HalfDensityOp(rand_poly(rng, ring, degree=degree, max_weight=order, terms=terms))


def full_adjoint(op):
    out = HalfDensityOp.zero(op.ring)
    for part in op.homogeneous_parts().values():
        out = out + adjoint(part)
    return out


def self_adjoint_part(op, n):
    """½(A + (−1)^n A⁺)."""
    adj = full_adjoint(op)
    return (op + (adj if n % 2 == 0 else -adj)) * Fraction(1, 2)


def rand_hbar(rng, ring, degree=None, t=0, top=3, self_adjoint=True, start=0):
    """Random ℏ-operator in ℏDO_t, coefficients at ℏ^start..ℏ^top."""
    if degree is None:
        degree = rng.randint(-2, 2)
    coeffs = {}
    for n in range(start, top + 1):
        if n - t < 0 or rng.randint(0, 3) == 0:
            continue
        A = rand_op(rng, ring, order=n - t, degree=degree, terms=2)
        if self_adjoint:
            A = self_adjoint_part(A, n)
        coeffs[n] = A
    return HbarOp(ring, coeffs)


def lie2(bounds=WIDE):
    B = Ring((), bounds)
    return StructureConstants((), (Coordinate("e1", 0), Coordinate("e2", 0)), {},
                              {(0, 1): {1: B.one()}}, bounds)


def affine_line(bounds=WIDE):
    """Action algebroid of aff(1) on the line: ρ(e1) = -x∂x, ρ(e2) = ∂x, [e1, e2] = e2."""
    X = Coordinate("x", 0)
    B = Ring((X,), bounds)
    x = B.var("x")
    return StructureConstants((X,), (Coordinate("e1", 0), Coordinate("e2", 0)),
                              {(0,): {0: -x}, (1,): {0: B.one()}},
                              {(0, 1): {1: B.one()}}, bounds)


def tangent(names, bounds=WIDE):
    base = tuple(Coordinate(n, 0) for n in names)
    B = Ring(base, bounds)
    fiber = tuple(Coordinate(f"e{n}", 0) for n in names)
    rho = {(i,): {i: B.one()} for i in range(len(names))}
    return StructureConstants(base, fiber, rho, {}, bounds)


def lie_algebra(rank, brackets, bounds=WIDE):
    """brackets: {(i, j): {k: c}} with i < j."""
    B = Ring((), bounds)
    fiber = tuple(Coordinate(f"e{i + 1}", 0) for i in range(rank))
    C = {I: {k: B.const(c) for k, c in d.items()} for I, d in brackets.items()}
    return StructureConstants((), fiber, {}, C, bounds)


SL2 = {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}     # basis (h, e, f)
SOLV3 = {(0, 1): {1: 1}, (0, 2): {2: 2}}                     # not unimodular
