from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from dpq.graded import Coordinate, Ring
from dpq.hbar import derived_brackets, extended_symbol, is_bv_infinity, is_self_adjoint
from dpq.linfty import (AlgebroidFrameData, CocycleError, FrameError, LinftyError, StructureConstants,
                        UnsupportedFiber, ce_vector_field, check_linfty, contraction_inverse,
                        contraction_map, cotangent_algebroid, elw_quantize, fourier_quantize,
                        fourier_transform, inverse_fourier_transform, laurent_apply, linear_poisson,
                        n_degree, phi_conjugate, to_dual)
from dpq.operators import HalfDensityOp, apply, commutator, lie_derivative
from dpq.polyvector import PoissonStructure, mc_check
from oracles import ce_oracle, sgn
from helpers import (SL2, SOLV3, WIDE, HypoRng, affine_line, lie2, lie_algebra, rand_op, rand_poly,
                     tangent)


# --- CE vector field and the L∞ check ----------------------------------------

def test_ce_vector_field_examples():
    assert not ce_vector_field(lie_algebra(2, {}))
    sc = lie2()
    R = sc.shifted_ring
    e1, e2 = R.gens()
    assert ce_vector_field(sc) == -(e1 * e2 * R.momentum("eta_e2"))
    assert check_linfty(sc).passed
    assert check_linfty(lie_algebra(3, {})).passed


def test_perturbed_constants_fail():
    base = (Coordinate("x", 0),)
    B = Ring(base, WIDE)
    x = B.var("x")
    sc = StructureConstants(base, (Coordinate("e1", 0), Coordinate("e2", 0)),
                            {(0,): {0: -x}, (1,): {0: B.one()}},
                            {(0, 1): {1: B.one(), 0: x}}, WIDE)
    rep = check_linfty(sc)
    assert rep.status == "FAIL" and rep.residual
    with pytest.raises(LinftyError):
        linear_poisson(sc)


def test_unsupported_fiber():
    with pytest.raises(UnsupportedFiber):
        StructureConstants((), (Coordinate("e", 1),), {}, {}, WIDE)


def test_degree_check_on_structure_functions():
    B = Ring((), WIDE)
    with pytest.raises(LinftyError):
        StructureConstants((), (Coordinate("e1", 0), Coordinate("e2", -2)), {}, {(0, 1): {0: B.one()}}, WIDE)


def test_cotangent_algebroid_examples():
    base = (Coordinate("x", 0), Coordinate("y", 0))
    B = Ring(base, WIDE)
    x, y = B.gens()
    zero = cotangent_algebroid(base, {}, WIDE)
    assert not zero.rho and not zero.C
    symp = cotangent_algebroid(base, {(0, 1): B.one()}, WIDE)
    assert symp.rho_at((0,), 1) == 1 and symp.rho_at((1,), 0) == -1 and not symp.C
    assert check_linfty(symp).passed
    kos = cotangent_algebroid(base, {(0, 1): x}, WIDE)
    assert kos.C_at((0, 1), 0) == 1 and kos.rho_at((0,), 1) == x
    assert check_linfty(kos).passed


def test_cotangent_algebroid_rejects_non_poisson():
    base = tuple(Coordinate(n, 0) for n in "xyz")
    B = Ring(base, WIDE)
    x, y, z = B.gens()
    with pytest.raises(LinftyError):
        cotangent_algebroid(base, {(0, 1): B.one(), (1, 2): y}, WIDE)


def _random_algebroid(rng):
    base = (Coordinate("x", 0),)
    B = Ring(base, WIDE)
    x = B.var("x")
    pool = [B.zero(), B.one(), -B.one(), x, -x, x * x]
    rho = {(i,): {0: rng.choice(pool)} for i in range(2)}
    C = {(0, 1): {j: rng.choice(pool) for j in range(2)}}
    return StructureConstants(base, (Coordinate("e1", 0), Coordinate("e2", 0)), rho, C, WIDE)


@settings(max_examples=100)
@given(st.data())
def test_homological_iff_maurer_cartan(data):
    sc = _random_algebroid(HypoRng(data))
    total = to_dual(sc, ce_vector_field(sc))
    s = PoissonStructure.from_total(total)
    assert check_linfty(sc).passed == mc_check(s).passed


# --- linear Poisson structures -------------------------------------------------

def test_linear_poisson_examples():
    s = linear_poisson(lie2())
    R = s.ring
    assert not s.Q
    assert s.Pi[2] == -(R.var("xi_e2") * R.momentum("xi_e1") * R.momentum("xi_e2"))
    assert not linear_poisson(lie_algebra(2, {})).total
    sc = tangent(["x"])
    B = sc.base_ring
    s = linear_poisson(sc, [B.var("x").scale(2)])
    R = s.ring
    assert s.Q == R.var("x").scale(2) * R.momentum("xi_ex")
    assert s.Pi[2] == R.momentum("x") * R.momentum("xi_ex")


def test_mc_for_linear_and_cocycle_instances():
    sc = affine_line()
    B = sc.base_ring
    assert mc_check(linear_poisson(lie2())).passed
    assert mc_check(linear_poisson(sc, [B.one(), B.zero()])).passed
    # e2* is not closed: d(e2*) = -e1*∧e2*
    with_bad = PoissonStructure.from_total(to_dual(sc, ce_vector_field(sc))
                                           + to_dual(sc, sc.shifted_ring.var("eta_e2")))
    assert not mc_check(with_bad).passed


def test_n_degree():
    for sc in (lie2(), affine_line(), lie_algebra(3, SL2), tangent(["x", "y"])):
        s = linear_poisson(sc)
        for n, P in s.Pi.items():
            assert n_degree(sc, P) == {1 - n}


# --- Fourier quantization -----------------------------------------------------

@pytest.mark.parametrize("rank,brackets", [(2, {(0, 1): {1: 1}}), (3, SL2), (3, SOLV3)],
                         ids=["aff2", "sl2", "solv3"])
def test_fourier_delta_is_ce_boundary(rank, brackets):
    sc = lie_algebra(rank, brackets)
    D = fourier_quantize(sc)
    R = D.ring
    assert set(D.coeffs) == {2}
    for k in range(rank + 1):
        for idx in combinations(range(rank), k):
            f, want = ce_oracle(R, rank, brackets, list(idx))
            assert apply(D[2], f) == want


def test_fourier_examples():
    assert not fourier_quantize(lie_algebra(2, {}))
    D = fourier_quantize(lie2())
    R = D.ring
    e1, e2 = R.gens()
    assert apply(D[2], e1 * e2) == e2.scale(Fraction(1, 2))
    assert D[2] == (HalfDensityOp.d(R, "xi_e1") * Fraction(-1, 2)
                    - HalfDensityOp(e2) @ HalfDensityOp.d(R, "xi_e1") @ HalfDensityOp.d(R, "xi_e2"))


@pytest.mark.parametrize("make", [lie2, affine_line, lambda: lie_algebra(3, SL2), lambda: tangent(["x", "y"])],
                         ids=["lie2", "affine", "sl2", "tangent2"])
def test_fourier_quantization_is_bv(make):
    sc = make()
    D = fourier_quantize(sc)
    assert is_bv_infinity(D).passed
    assert is_self_adjoint(D)
    assert extended_symbol(D).at_one() == linear_poisson(sc).total


def test_derived_brackets_reproduce_structure_constants():
    sc = affine_line()
    D = fourier_quantize(sc)
    R = D.ring
    x, a, b = R.gens()
    assert derived_brackets(D, a, b) == b
    assert derived_brackets(D, a, x * x) == -(x * x).scale(2)
    assert derived_brackets(D, b, x) == 1
    for sc in (lie2(), lie_algebra(3, SL2)):
        D = fourier_quantize(sc)
        R = D.ring
        xs = R.gens()
        for i, j in combinations(range(sc.rank), 2):
            want = R.zero()
            for k, c in sc.C.get((i, j), {}).items():
                want = want + xs[k] * c.constant_term()
            assert derived_brackets(D, xs[i], xs[j]) == want


def test_derived_brackets_follow_the_leibniz_rule():
    D = fourier_quantize(affine_line())
    R = D.ring
    x, a, b = R.gens()
    for f, g, h in ((a, b, x), (a, x, x), (b, a, a * x), (a * b, x, b)):
        s = sgn((f.degree() + 1) * g.degree())
        assert derived_brackets(D, f, g * h) == derived_brackets(D, f, g) * h + (g * derived_brackets(D, f, h)).scale(s)


@settings(max_examples=50)
@given(st.data())
def test_berezin_fourier_oracle(data):
    rng = HypoRng(data)
    sc = rng.choice((lie2(), affine_line()))
    D = fourier_quantize(sc)
    R = D.ring
    g = rand_poly(rng, R, degree=rng.randint(-2, 0), max_weight=0, max_base=2)
    pre = inverse_fourier_transform(sc, {0: g})
    assert fourier_transform(sc, pre) == ({0: g} if g else {})
    L = lie_derivative(ce_vector_field(sc))
    lhs = fourier_transform(sc, laurent_apply(L, pre, shift=1))
    rhs = {n: apply(op, g) for n, op in D.coeffs.items()}
    assert lhs == {n: v for n, v in rhs.items() if v}


# --- ELW quantization ----------------------------------------------------------

def test_elw_line():
    sc = tangent(["x"])
    x = sc.base_ring.var("x")
    res = elw_quantize(sc, None, [(x * x).partial("x")])
    R = res.Delta.ring
    X = R.var("x")
    assert res.Delta[1] == HalfDensityOp(X.scale(2) * R.momentum("xi_ex"))
    assert res.Delta[2] == HalfDensityOp(R.momentum("x") * R.momentum("xi_ex"))
    assert is_bv_infinity(res.Delta).passed
    assert not commutator(res.conj, res.iota)


def test_elw_plane():
    sc = tangent(["x", "y"])
    B = sc.base_ring
    x, y = B.gens()
    f = x * x * y + y ** 3
    res = elw_quantize(sc, None, [f.partial("x"), f.partial("y")])
    assert is_bv_infinity(res.Delta).passed
    assert not commutator(res.conj, res.iota)
    with pytest.raises(CocycleError) as err:
        elw_quantize(sc, None, [B.zero(), x])
    assert err.value.residual


def test_elw_matches_fourier_without_cocycle():
    for sc in (affine_line(), lie2(), tangent(["x", "y"])):
        assert elw_quantize(sc, None, []).Delta == fourier_quantize(sc)


def test_elw_frame_validation():
    sc = affine_line()
    can = AlgebroidFrameData.canonical(sc)
    B = sc.base_ring
    assert can.theta_A == (B.one(), B.zero())
    assert can.theta_M == (-B.one(), B.zero())
    bad = AlgebroidFrameData((B.zero(), B.zero()), can.theta_M)
    with pytest.raises(FrameError):
        elw_quantize(sc, bad, [])
    # a graded fibre is an L∞-algebroid but not an ordinary Lie algebroid
    graded = StructureConstants((), (Coordinate("e", -2),), {}, {}, WIDE)
    with pytest.raises(LinftyError):
        elw_quantize(graded, None, [])


@settings(max_examples=50)
@given(st.data())
def test_phi_conjugation_matches_contraction(data):
    rng = HypoRng(data)
    sc = rng.choice((affine_line(), tangent(["x", "y"])))
    src = sc.shifted_ring
    op = rand_op(rng, src, order=2, degree=rng.randint(-1, 2))
    f = rand_poly(rng, src, degree=rng.randint(0, 2), max_weight=0, max_base=2)
    assert contraction_inverse(sc, contraction_map(sc, f)) == f
    assert apply(phi_conjugate(sc, op), contraction_map(sc, f)) == contraction_map(sc, apply(op, f))
