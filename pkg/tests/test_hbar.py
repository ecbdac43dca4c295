import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dpq.hbar import (INF, FiltrationError, HbarOp, HbarSymbol, NegativeHbarPower, derived_brackets,
                      embed_hbar, extended_symbol, extended_symbol_t, hbar, hbar_commutator,
                      is_bv_infinity, is_self_adjoint, square, symbol_bracket, t_index)
from dpq.linfty import fourier_quantize
from dpq.operators import HalfDensityOp, lie_derivative, principal_symbol
from dpq.polyvector import poisson_bracket
from helpers import (HOVIK, RINGS, HypoRng, hovik, lie2, rand_hbar, rand_poly, rand_vector_field)


def hovik_delta2():
    R, P, Q = hovik()
    LP, LQ = lie_derivative(P), lie_derivative(Q)
    return (LP @ LQ + LQ @ LP) * Fraction(1, 2)


def test_t_index_examples():
    R = HOVIK
    first = HalfDensityOp.d(R, "z")
    assert t_index(hbar(R, 2, first)) == 1
    R_, P, Q = hovik()
    D = HbarOp(R, {1: lie_derivative(Q), 2: hovik_delta2()})
    assert t_index(D) == 0
    assert t_index(HbarOp(R)) == INF


def test_filtration_checks():
    R = HOVIK
    with pytest.raises(FiltrationError):
        HbarOp(R, {1: hovik_delta2()}, check=True)
    with pytest.raises(FiltrationError):
        extended_symbol_t(hbar(R, 2, hovik_delta2()), 1)
    with pytest.raises(NegativeHbarPower):
        HbarOp(R, {-1: HalfDensityOp.d(R, "z")})


def test_commutator_examples():
    R, P, Q = hovik()
    D = hbar(R, 2, hovik_delta2())
    # Δ² = ¼∂_z at ℏ⁴, so (1/ℏ)[Δ, Δ] = ℏ³·½∂_z
    assert hbar_commutator(D, D) == hbar(R, 3, HalfDensityOp.d(R, "z") * Fraction(1, 2))
    f, g = (HbarOp(R, {0: HalfDensityOp(x)}) for x in (R.var("xi"), R.var("z")))
    assert not hbar_commutator(f, g)


def test_lie_derivatives_under_modified_commutator():
    for seed in range(30):
        rng = random.Random(seed)
        R = rng.choice(RINGS)
        X = rand_vector_field(rng, R, degree=rng.randint(-2, 2))
        Y = rand_vector_field(rng, R, degree=rng.randint(-2, 2))
        lhs = hbar_commutator(hbar(R, 1, lie_derivative(X)), hbar(R, 1, lie_derivative(Y)))
        assert lhs == hbar(R, 1, lie_derivative(poisson_bracket(X, Y)))


def test_extended_symbol_examples():
    R, P, Q = hovik()
    D = HbarOp(R, {1: lie_derivative(Q), 2: hovik_delta2()})
    sig = extended_symbol(D)
    assert sig == HbarSymbol(R, {1: Q, 2: P * Q})
    assert sig.at_one() == Q + P * Q
    first = HalfDensityOp.d(R, "z")
    assert not extended_symbol(hbar(R, 2, first))
    assert extended_symbol_t(hbar(R, 2, first), 1) == HbarSymbol(R, {2: R.momentum("z")})


def test_self_adjoint_examples():
    R, P, Q = hovik()
    assert is_self_adjoint(hbar(R, 1, lie_derivative(P)))
    assert is_self_adjoint(hbar(R, 2, hovik_delta2()))
    assert not is_self_adjoint(hbar(R, 1, HalfDensityOp(R.var("z"))))


def test_bv_examples():
    R = HOVIK
    rep = is_bv_infinity(hbar(R, 2, hovik_delta2()))
    assert rep.status == "FAIL"
    witness = dict(rep.failures)["square zero"]
    assert witness == hbar(R, 4, HalfDensityOp.d(R, "z") * Fraction(1, 4))
    assert rep.verdict.startswith("FAIL (up to order h^")
    rep0 = is_bv_infinity(HbarOp(R))
    assert [c for c, _ in rep0.failures] == ["nonzero symbol"]
    D = fourier_quantize(lie2())
    assert is_bv_infinity(D).passed
    assert not square(D)


def test_bv_rejects_constant_term_and_wrong_degree():
    R = HOVIK
    rep = is_bv_infinity(HbarOp(R, {0: HalfDensityOp.d(R, "xi")}))
    assert "vanishing at h=0" in dict(rep.failures)
    rep = is_bv_infinity(hbar(R, 1, HalfDensityOp.d(R, "z")))
    assert "degree" in dict(rep.failures)


def test_derived_bracket_examples():
    R = HOVIK
    xi, tau, z = R.gens()
    D = hbar(R, 2, hovik_delta2())
    assert derived_brackets(D, xi, tau) == -tau
    assert derived_brackets(D, R.one(), z) == 0


@settings(max_examples=100)
@given(st.data())
def test_derived_brackets_match_contraction(data):
    rng = HypoRng(data)
    D = fourier_quantize(lie2()) if rng.randint(0, 1) else hbar(HOVIK, 2, hovik_delta2())
    R = D.ring
    f = rand_poly(rng, R, max_weight=0, max_base=3)
    g = rand_poly(rng, R, max_weight=0, max_base=3)
    lam = derived_brackets(D, f, g)
    assert lam == poisson_bracket(poisson_bracket(principal_symbol(D[2], 2), f), g)
    # the bracket is a derivation in its second slot
    h = rand_poly(rng, R, max_weight=0, max_base=2)
    s = -1 if ((f.degree() + 1) * g.degree()) % 2 else 1
    assert derived_brackets(D, f, g * h) == derived_brackets(D, f, g) * h + (g * derived_brackets(D, f, h)).scale(s)


# --- properties -------------------------------------------------------------

@settings(max_examples=100)
@given(st.data())
def test_commutator_respects_filtration(data):
    rng = HypoRng(data)
    R = rng.choice(RINGS)
    s, t = rng.randint(0, 2), rng.randint(0, 2)
    A = rand_hbar(rng, R, t=s, self_adjoint=False)
    B = rand_hbar(rng, R, t=t, self_adjoint=False)
    assert t_index(A) >= s and t_index(B) >= t
    assert t_index(hbar_commutator(A, B)) >= s + t


@settings(max_examples=100)
@given(st.data())
def test_symbol_bracket_compatibility(data):
    rng = HypoRng(data)
    R = rng.choice(RINGS)
    A = rand_hbar(rng, R, self_adjoint=rng.randint(0, 1) == 1)
    B = rand_hbar(rng, R, self_adjoint=rng.randint(0, 1) == 1)
    C = hbar_commutator(A, B)
    assert extended_symbol(C) == symbol_bracket(extended_symbol(A), extended_symbol(B)).truncate(C.hbar_max)


@settings(max_examples=100)
@given(st.data())
def test_twisted_symbol_bracket_compatibility(data):
    rng = HypoRng(data)
    R = rng.choice(RINGS)
    s, t = rng.randint(0, 1), rng.randint(0, 1)
    A = rand_hbar(rng, R, t=s, top=4)
    B = rand_hbar(rng, R, t=t, top=4)
    lhs = extended_symbol_t(hbar_commutator(A, B), s + t)
    rhs = symbol_bracket(extended_symbol_t(A, s), extended_symbol_t(B, t))
    assert lhs == rhs.truncate(A.hbar_max)


@settings(max_examples=100)
@given(st.data())
def test_hbar_embedding_is_a_morphism(data):
    rng = HypoRng(data)
    R = rng.choice(RINGS)
    X = rand_poly(rng, R, max_weight=3)
    Y = rand_poly(rng, R, max_weight=3)
    assert embed_hbar(poisson_bracket(X, Y)) == symbol_bracket(embed_hbar(X), embed_hbar(Y))
    assert embed_hbar(X).at_one() == X


@settings(max_examples=100)
@given(st.data())
def test_self_adjoint_closure(data):
    rng = HypoRng(data)
    R = rng.choice(RINGS)
    A, B = rand_hbar(rng, R), rand_hbar(rng, R)
    assert is_self_adjoint(A) and is_self_adjoint(B)
    assert is_self_adjoint(hbar_commutator(A, B))


@settings(max_examples=100)
@given(st.data())
def test_vanishing_symbol_means_gap_two(data):
    rng = HypoRng(data)
    R = rng.choice(RINGS)
    D = rand_hbar(rng, R, t=rng.randint(0, 1), top=4)
    assert (not extended_symbol(D)) == (t_index(D) >= 2)


@settings(max_examples=100)
@given(st.data())
def test_equal_symbols_differ_by_two_steps(data):
    rng = HypoRng(data)
    R = rng.choice(RINGS)
    t = rng.randint(0, 1)
    deg = rng.randint(-2, 2)
    D = rand_hbar(rng, R, degree=deg, t=t, top=4)
    E = rand_hbar(rng, R, degree=deg, t=t + 1, top=4)
    D2 = D + E
    if t_index(D) != t or t_index(D2) != t:
        return
    assert extended_symbol_t(D, t) == extended_symbol_t(D2, t)
    assert t_index(D - D2) >= t + 2
