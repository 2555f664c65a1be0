import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qdc.scalars import MixedFieldError, PoleError, Scalar, constants, eval_at, field, random_point, to_string


def q_of(N):
    return field(N).q


def test_difference_of_squares():
    F = field(1)
    q = F.q
    assert (q - q.inv()) * (q + q.inv()) == q**2 - q**-2


def test_lambda_times_inverse():
    F = field(2)
    assert F.lam.inv() * F.lam == F.one


def test_normalize_cancels_common_factor():
    F = field(1)
    q = F.q
    s = (q**2 - 1) / (q * (q - 1))
    assert s == (q + 1) / q
    assert str(s.den) == "p" and str(s.num) == "p + 1"


def test_nq_at_two():
    F = field(2)
    assert F.nq == F.q + F.q.inv()


def test_kappa_closed_forms():
    q1 = field(1).q
    assert constants(1)[2] == 1 - q1**-2
    q2 = field(2).q
    assert constants(2)[2] == (q2**4 - q2**2) / (q2**4 + 1)


def test_eval_examples():
    assert eval_at(field(1).lam, 2) == Fraction(3, 2)
    assert eval_at(field(2).nq, q0=2) == Fraction(5, 2)
    assert eval_at(field(2).kq, q0=2) == Fraction(12, 17)


def test_eval_rejects_degenerate_and_poles():
    F = field(1)
    for p0 in (0, 1, -1):
        with pytest.raises(PoleError):
            eval_at(F.q, p0)
    with pytest.raises(PoleError):
        eval_at((F.q - 2).inv(), 2)


def test_eval_q0_rejects_fractional_powers():
    with pytest.raises(ValueError):
        eval_at(field(2).p, q0=3)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        field(3).zero.inv()


def test_mixed_fields_rejected():
    with pytest.raises(MixedFieldError):
        field(2).q + field(3).q


def test_canonical_denominator_sign():
    F = field(1)
    s = F.one / (1 - F.q)
    lead = s.den.coeffs()[0]
    assert lead > 0
    assert s == -F.one / (F.q - 1)


def test_to_string_forms():
    F = field(2)
    assert to_string(F.q) == "p^2"
    assert to_string(F.q.inv()) == "(p^2)^-1"
    assert to_string(-F.q.inv()) == "-(p^2)^-1"


def test_hash_consistent_with_eq():
    F = field(1)
    a = (F.q**2 - 1) / (F.q - 1)
    b = F.q + 1
    assert a == b and hash(a) == hash(b)


def _value(s, pt):
    return eval_at(s, *pt)


def test_field_axioms_and_eval_soundness():
    """1000 random triples: axioms symbolically and at random points."""
    rng = random.Random(1234)
    for k in range(1000):
        N = 1 + k % 3
        F = field(N)
        a, b, c = (F.random(rng, max_deg=2, coeff=4) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a and a * b == b * a
        if a:
            assert a * a.inv() == F.one
        # numeric shadow of the same identities
        for _ in range(10):
            pt = random_point(rng)
            try:
                va, vb, vc = (_value(s, pt) for s in (a, b, c))
                vab = _value(a * b + c, pt)
            except PoleError:
                continue
            assert vab == va * vb + vc
            break


def test_nonzero_never_evaluates_to_zero_everywhere():
    rng = random.Random(99)
    F = field(2)
    for _ in range(100):
        s = F.random(rng)
        if not s:
            continue
        for _ in range(50):
            try:
                v = eval_at(s, *random_point(rng))
            except PoleError:
                continue
            if v != 0:
                break
        else:
            pytest.fail(f"{s} vanished at 50 random points")


def test_symbolic_zero_evaluates_to_zero():
    rng = random.Random(5)
    F = field(3)
    for _ in range(50):
        a, b = F.random(rng), F.random(rng)
        z = a * b - b * a + (a - a)
        assert z.is_zero()


@settings(max_examples=60, deadline=None)
@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(1, 4))
def test_qpow_is_multiplicative(i, j, N):
    F = field(N)
    assert F.qpow(i) * F.qpow(j) == F.qpow(i + j)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_normalize_idempotent(seed):
    F = field(2)
    s = F.random(random.Random(seed))
    n = s.normalize()
    assert n == s and n.normalize() == n
    assert str(n) == str(s)


def test_coercion_from_int_and_fraction():
    F = field(2)
    assert F(3) == F.one + F.one + F.one
    assert F(Fraction(1, 2)) * 2 == F.one
