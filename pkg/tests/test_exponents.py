from __future__ import annotations

import pickle
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from weightlab.exponents import (INF, ExponentError, ExponentSystem, admissible, characterization_indices, conj,
                                 derived_deltas, dual_tuple, ext, factorization_exponents, fmt, modified_maximal_exponents,
                                 multilinear_target_check, offdiagonal_chain, one_var_extrapolation, recip)


# -- extended reals ---------------------------------------------------------

def test_ext_parsing_and_infinity():
    assert ext("3/4") == F(3, 4)
    assert ext(2) == F(2)
    assert ext("inf") is INF and ext("∞") is INF
    assert recip(INF) == 0 and recip(0) is INF
    assert conj(1) is INF and conj(INF) == 1 and conj(2) == 2 and conj(3) == F(3, 2)
    assert fmt(F(6, 4)) == "3/2" and fmt(INF) == "inf" and fmt(2) == "2/1"
    assert INF > F(10 ** 9) and not INF < 5 and INF >= INF
    assert pickle.loads(pickle.dumps(INF)) is INF


def test_ext_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        ext(0.5)
    with pytest.raises(TypeError):
        ext(True)
    with pytest.raises(ExponentError):
        conj(F(1, 2))


def test_exponent_system_identity_and_validation():
    sys_ = ExponentSystem((2, 3), F(1, 2), r=(1, 1, 1))
    assert sys_.m == 2 and sys_.inv_p == F(5, 6)
    assert sys_.inv_p_last == -1  # q <= 1 leaves 1/q' negative
    assert sys_.identity_holds()
    with pytest.raises(ExponentError):
        ExponentSystem((2,), 2, r=(1,))
    with pytest.raises(ExponentError):
        ExponentSystem((F(1, 2),), 2)
    with pytest.raises(ExponentError):
        ExponentSystem((2,), 0)


# -- admissibility and derived quantities -----------------------------------

def test_admissible_examples():
    assert admissible((1, 1), (2,), 2)
    assert admissible((1, 1, 1, 1), (2, 5, INF), 7)
    v = admissible((3, 1), (2,), 2)
    assert not v and "r_1 <= p_1" in v.failed
    assert not admissible((2, 1), (2,), 2, strict=True)
    with pytest.raises(ExponentError):
        admissible((1,), (2,), 2)


def test_admissible_last_slot():
    # r_2 = 2 gives r_2' = 2, which is not > q = 2
    v = admissible((1, 2), (2,), 2)
    assert not v and v.failed == ("r'_2 > q",)
    assert admissible((1, 2), (2,), F(3, 2))


def test_derived_deltas_examples():
    de = derived_deltas((1, 1), (2,), 2)
    assert de.delta == (2, 2) and de.kappa == 1 and de.rho == 1 and de.theta == ()
    de = derived_deltas((1, 1), (INF,), 1)
    assert de.inv_delta == (1, 1) and de.kappa == 2


def test_derived_deltas_rejects_inadmissible():
    with pytest.raises(ExponentError):
        derived_deltas((3, 1), (2,), 2)


_pos = st.fractions(min_value=F(1), max_value=F(8), max_denominator=12)


@settings(max_examples=60, deadline=None)
@given(_pos, _pos, st.fractions(min_value=F(1, 2), max_value=F(6), max_denominator=12), st.data())
def test_derived_identities(p1, p2, q, data):
    r1 = data.draw(st.fractions(min_value=F(1), max_value=p1, max_denominator=12))
    r2 = data.draw(st.fractions(min_value=F(1), max_value=p2, max_denominator=12))
    r3 = data.draw(st.fractions(min_value=F(1), max_value=F(6), max_denominator=12))
    assume(admissible((r1, r2, r3), (p1, p2), q))
    try:
        de = derived_deltas((r1, r2, r3), (p1, p2), q)
    except ExponentError:
        return
    inv_r = 1 / r1 + 1 / r2 + 1 / r3
    assert de.kappa == inv_r - (1 / p1 + 1 / p2) - (1 - 1 / q)
    assert de.inv_theta[0] + de.inv_delta[0] == de.kappa
    assert de.inv_rho == de.inv_delta[1] + de.inv_delta[2]
    assert all(v >= 0 for v in de.inv_delta[:2])
    assert ExponentSystem((p1, p2), q, r=(r1, r2, r3)).identity_holds()


# -- one-variable extrapolation ---------------------------------------------

def test_one_var_extrapolation_examples():
    assert one_var_extrapolation(2, 2, 2, 3) == (3, 3)
    assert one_var_extrapolation(F(3, 2), 4, 5, F(3, 2)) == (4, 5)
    with pytest.raises(ExponentError):
        one_var_extrapolation(1, 2, 2, 2)


@settings(max_examples=60, deadline=None)
@given(_pos, _pos, _pos, _pos)
def test_one_var_extrapolation_shift(p0, q0, t0, p):
    try:
        q, t = one_var_extrapolation(p0, q0, t0, p)
    except ExponentError:
        assume(False)
    assert recip(p) - recip(p0) == recip(q) - recip(q0) == recip(t) - recip(t0)


# -- off-diagonal chain -----------------------------------------------------

def test_offdiagonal_chain_example():
    ch = offdiagonal_chain(1, F(9, 10), F(1, 5), F(11, 10), F(6, 5))
    assert ch[1].beta == F(1, 5)
    assert ch[2].beta == F(21, 40)
    assert ch.limit == F(17, 20)
    assert ch.k0 == 5
    # k0 is the first k with beta_k >= 2 alpha - d
    assert ch[5].beta >= F(4, 5) > ch[4].beta
    assert ch.violations == ()


def test_offdiagonal_chain_trivial_when_alpha_small():
    ch = offdiagonal_chain(1, F(1, 2), F(1, 5), 2, 1)
    assert ch.k0 == 1 and len(ch.steps) == 1 and ch[1].beta == F(1, 5)


def test_offdiagonal_chain_preconditions():
    with pytest.raises(ExponentError):
        offdiagonal_chain(1, F(1, 5), F(1, 2), 2, 1)
    with pytest.raises(ExponentError):
        offdiagonal_chain(1, F(9, 10), F(1, 5), 2, 2)  # s >= d/(alpha - beta)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.data())
def test_offdiagonal_chain_ladder(d, data):
    alpha = data.draw(st.fractions(min_value=F(d, 2), max_value=F(d), max_denominator=40))
    beta = data.draw(st.fractions(min_value=F(0), max_value=alpha, max_denominator=40))
    assume(0 <= beta < alpha < d and alpha > (d + beta) / 2)
    ch = offdiagonal_chain(d, alpha, beta, F(11, 10), 1)
    betas = [st_.beta for st_ in ch.steps]
    assert all(b < c for b, c in zip(betas, betas[1:]))
    assert all(2 * c - b == ch.limit for b, c in zip(betas, betas[1:]))
    assert ch.limit == F(3, 2) * alpha - F(d, 2)
    assert alpha <= (d + betas[-1]) / 2
    assert all(alpha > (d + b) / 2 for b in betas[:-1])


# -- duals and characterization ---------------------------------------------

def test_dual_tuple_examples():
    assert dual_tuple((2,), 3, 1) == ((F(3, 2),), 2)
    assert dual_tuple((2, 4), 2, 2) == ((2, 2), F(4, 3))
    with pytest.raises(ExponentError):
        dual_tuple((1, 2), 2, 1)
    with pytest.raises(ExponentError):
        dual_tuple((2,), 2, 2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=F(11, 10), max_value=F(9), max_denominator=10), min_size=1, max_size=3),
       st.fractions(min_value=F(11, 10), max_value=F(9), max_denominator=10), st.data())
def test_dual_tuple_involution(p, q, data):
    i = data.draw(st.integers(1, len(p)))
    once, target = dual_tuple(p, q, i)
    twice, back = dual_tuple(once, target, i)
    assert twice == tuple(ext(x) for x in p) and back == q


def test_characterization_examples():
    ci = characterization_indices((2,), 2)
    assert ci.slot_index == (2,) and ci.product_index == 2
    assert characterization_indices((2, 2), 4).product_index == 5
    assert characterization_indices((1, 2), 2).slot_index[0] is None
    part = characterization_indices((2,), 2, partial=True)
    assert part.m == 2 and len(part.slot_index) == 2


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=F(1), max_value=F(9), max_denominator=10), min_size=1, max_size=4),
       st.fractions(min_value=F(1), max_value=F(9), max_denominator=10))
def test_characterization_holder_rows_sum_to_one(p, q):
    assume(sum(1 / x for x in p) - 1 / q >= 0)
    ci = characterization_indices(p, q)
    for row, total in zip(ci.inv_s, ci.inv_s_sums()):
        if row:
            assert total == 1


# -- factorization and targets ----------------------------------------------

def test_factorization_examples():
    fe = factorization_exponents(2, 3, 1, F(3, 2))
    assert fe.gamma == F(3, 2) and fe.case == "ii" and fe.mu_exp == F(-1, 2)
    fe = factorization_exponents(3, 3, 2, 2)
    assert (fe.mu_exp, fe.w_exp) == (0, 1)
    assert factorization_exponents(3, 2, F(3, 2), 1).case == "iv"
    assert factorization_exponents(3, 2, 4, 3).case == "iii"
    with pytest.raises(ExponentError):
        factorization_exponents(2, 3, 2, 1)


def test_multilinear_target_examples():
    assert multilinear_target_check((2, 2), 1, (4, 4), 2, (1, 1, 1))
    v = multilinear_target_check((2, 2), 1, (4, 4), 3, (1, 1, 1))
    assert "1/p - 1/q = 1/p* - 1/q*" in v.failed
    # q = 1/2 needs 1/p > 1; p = (4, 4) gives 1/p = 1/2
    v = multilinear_target_check((4, 4), F(1, 2), (8, 8), F(2, 3), (1, 1, 1))
    assert "1/p > max(0, (1-q)/q)" in v.failed


def test_modified_maximal_exponents():
    mm = modified_maximal_exponents(2, 2)
    assert mm.gamma == 1 and mm.q_gamma == 2 and not mm.degenerate
    assert modified_maximal_exponents(1, 1).degenerate
