from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetawalls.algebra import (ContextMismatch, Cyclo, Element, Exponent,
                                NotAUnit, NotOnePlusNilpotent, TruncationSpec,
                                cyclotomic_polynomial)

SPEC1 = TruncationSpec(1, (1,), 2)
CTX = "test"


def mono(lam, q, coeff=1, spec=SPEC1):
    return Element.monomial(spec, CTX, Exponent(tuple(lam), tuple(q)), coeff)


def one(spec=SPEC1, rank=1):
    return Element.one(spec, CTX, rank)


# ---------------------------------------------------------------------------
# cyclotomic scalars
# ---------------------------------------------------------------------------

def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


def test_zeta3_cube_is_one():
    z = Cyclo.zeta(3)
    assert z ** 3 == Cyclo.one(3)
    assert z ** 2 == z.inverse()
    # 1 + zeta + zeta^2 = 0
    assert (Cyclo.one(3) + z + z * z).is_zero()


def test_cyclo_inverse_random():
    z = Cyclo.zeta(5)
    x = Cyclo.one(5) + z.scale(3) - (z * z).scale(Fraction(2, 7))
    assert x * x.inverse() == Cyclo.one(5)


def test_cyclo_order_mismatch():
    with pytest.raises(ContextMismatch):
        Cyclo.one(3) + Cyclo.one(5)


# ---------------------------------------------------------------------------
# truncated ring operations (worked examples)
# ---------------------------------------------------------------------------

def test_additive_identity():
    x = mono([1], [1])
    assert x + Element.zero(SPEC1, CTX) == x


def test_cancellation():
    tx = mono([1], [1])
    a = one() + tx
    b = one() - tx
    assert a + b == one().scale(2)


def test_truncation_drops_high_order():
    spec = TruncationSpec(1, (1,), 1)
    tx = mono([1], [1], spec=spec)
    t = mono([0], [1], spec=spec)
    assert tx + t * tx == tx  # t^2 x dies at order 1


def test_product_expansion():
    tx = mono([1, 0], [1])
    ty = mono([0, 1], [1])
    lhs = (one(rank=2) + tx) * (one(rank=2) + ty)
    expect = (one(rank=2) + tx + ty
              + mono([1, 1], [2]))
    assert lhs == expect


def test_mul_unit():
    f = one() + mono([1], [1]) + mono([-2], [2], Fraction(5, 3))
    assert f * one() == f


def test_product_truncates_square():
    spec = TruncationSpec(1, (1,), 1)
    f = Element.one(spec, CTX, 1) + mono([1], [1], spec=spec)
    assert f * f == Element.one(spec, CTX, 1) + mono([1], [1], 2, spec=spec)


def test_invert_geometric_series():
    f = one() + mono([1], [1])
    inv = f.invert_unit()
    assert inv == one() - mono([1], [1]) + mono([2], [2])
    assert f * inv == one()


def test_invert_one():
    assert one().invert_unit() == one()


def test_invert_monomial_unit():
    f = mono([3], [0], 2)
    assert f.invert_unit() == mono([-3], [0], Fraction(1, 2))


def test_invert_requires_unit():
    with pytest.raises(NotAUnit):
        (mono([0], [1])).invert_unit()
    with pytest.raises(NotAUnit):
        (one() + mono([1], [0])).invert_unit()


def test_nth_root_trivial():
    assert one().nth_root(5) == one()


def test_nth_root_exact_square():
    f = one() + mono([1], [1])
    spec4 = TruncationSpec(1, (1,), 4)
    g = Element.one(spec4, CTX, 1) + Element.monomial(spec4, CTX, Exponent((1,), (1,)))
    assert (g * g).nth_root(2) == g


def test_nth_root_binomial_series():
    f = one() + mono([1], [1])
    r = f.nth_root(2)
    expect = (one() + mono([1], [1], Fraction(1, 2))
              - mono([2], [2], Fraction(1, 8)))
    assert r == expect
    assert r * r == f


def test_nth_root_rejects_nonunit_head():
    with pytest.raises(NotOnePlusNilpotent):
        (one().scale(2) + mono([1], [1])).nth_root(2)


def test_power_zero():
    f = one() + mono([1], [1])
    assert f.power(0) == one()


def test_power_negative():
    spec = TruncationSpec(1, (1,), 1)
    f = Element.one(spec, CTX, 1) + mono([1], [1], spec=spec)
    assert f.power(-1) == Element.one(spec, CTX, 1) - mono([1], [1], spec=spec)
    assert f.power(3) == Element.one(spec, CTX, 1) + mono([1], [1], 3, spec=spec)


def test_context_mismatch_raises():
    a = mono([1], [1])
    b = Element.monomial(SPEC1, "other", Exponent((1,), (1,)))
    with pytest.raises(ContextMismatch):
        a + b


def test_extra_generators_refine_ideal():
    spec = TruncationSpec(2, (1, 1), 5, extra_generators=((2, 0),))
    e = Element.monomial(spec, CTX, Exponent((0,), (2, 0)))
    assert e.is_zero()
    assert not Element.monomial(spec, CTX, Exponent((0,), (1, 3))).is_zero()


# ---------------------------------------------------------------------------
# property-based ring axioms
# ---------------------------------------------------------------------------

def elements(spec=SPEC1, rank=2):
    exps = st.tuples(
        st.tuples(*[st.integers(-2, 2)] * rank),
        st.tuples(*[st.integers(0, 2)] * spec.q_rank))
    coeffs = st.fractions(min_value=-4, max_value=4, max_denominator=3)
    term = st.tuples(exps, coeffs)
    return st.lists(term, min_size=0, max_size=4).map(
        lambda ts: _build(spec, ts, rank))


def _build(spec, ts, rank):
    acc = Element.zero(spec, CTX)
    for (lam_q, c) in ts:
        lam, q = lam_q
        acc = acc + Element.monomial(spec, CTX, Exponent(lam, q), c)
    return acc


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), elements())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(elements())
def test_truncation_is_ring_hom(a):
    # reducing then multiplying equals multiplying then reducing
    k = 1
    low = a.reduce_to_order(k)
    assert (a * a).reduce_to_order(k) == low * low


@settings(max_examples=100, deadline=None)
@given(elements())
def test_randomized_units_invert(g):
    f = one(rank=2) + _strip_order_zero(g)
    inv = f.invert_unit()
    assert f * inv == one(rank=2)


def _strip_order_zero(g):
    out = Element.zero(g.spec, g.context)
    for e, c in g.terms.items():
        if g.spec.h(e.q) >= 1 and all(x >= 0 for x in e.q):
            out = out + Element.monomial(g.spec, g.context, e, c)
    return out


@settings(max_examples=60, deadline=None)
@given(elements(), st.integers(1, 4))
def test_nth_root_inverts_power(g, a):
    f = one(rank=2) + _strip_order_zero(g)
    assert f.power(a).nth_root(a) == f
    assert f.nth_root(a).power(a) == f
