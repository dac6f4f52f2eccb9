"""Field arithmetic: canonical forms, axioms, sampling."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from frozenrank.field import RATIONAL_POOL, FieldElement, FieldSpec, is_prime, sample_nonzero
from frozenrank.prf import Stream

F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)
F5 = FieldSpec.prime(5)
F7 = FieldSpec.prime(7)
F31 = FieldSpec.prime(31)
Q = FieldSpec.rationals()


def test_addition_examples():
    assert (F5.element(3) + F5.element(4)) == F5.element(2)
    assert (F2.element(1) + F2.element(1)) == F2.element(0)
    assert (Q.element(Fraction(1, 3)) + Q.element(Fraction(1, 6))) == Q.element(Fraction(1, 2))


def test_inverse_examples():
    assert F7.element(3).inv() == F7.element(5)
    assert F2.element(1).inv() == F2.element(1)
    assert Q.element(Fraction(-2, 3)).inv() == Q.element(Fraction(-3, 2))


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        F5.element(0).inv()
    with pytest.raises(ZeroDivisionError):
        Q.element(0).inv()


def test_mixed_field_operands_rejected():
    with pytest.raises(ValueError):
        F5.element(1) + F7.element(1)
    with pytest.raises(ValueError):
        F2.element(1) * Q.element(1)


def test_prime_validation():
    with pytest.raises(ValueError):
        FieldSpec.prime(1)
    with pytest.raises(ValueError):
        FieldSpec.prime(4)
    with pytest.raises(ValueError):
        FieldSpec.prime(2**31)  # above the 64-bit-intermediate bound
    with pytest.raises(ValueError):
        FieldSpec.prime(2**31 - 2)
    assert FieldSpec.prime(2**31 - 1).p == 2147483647


def test_is_prime_small_cases():
    primes = {2, 3, 5, 7, 11, 13, 97, 7919}
    for n in range(2, 100):
        assert is_prime(n) == (n in primes or all(n % k for k in range(2, n)))


def test_canonical_residues():
    assert F5.element(12).value == 2
    assert F5.element(-1).value == 4
    assert Q.element(Fraction(2, -4)).value == Fraction(-1, 2)
    assert Q.element(Fraction(2, -4)).value.denominator == 2


def test_labels_roundtrip():
    for spec in (F2, F5, FieldSpec.prime(101), Q):
        assert FieldSpec.parse_label(spec.label()) == spec
    assert FieldSpec.parse_label("Fp:2") == F2
    with pytest.raises(ValueError):
        FieldSpec.parse_label("F3")
    with pytest.raises(ValueError):
        FieldSpec.parse_label("Fp:nine")


def test_rendering():
    assert str(F7.element(5)) == "5"
    assert str(Q.element(Fraction(-1, 3))) == "-1/3"
    assert str(Q.element(2)) == "2"


def test_sample_nonzero_gf2_always_one():
    stream = Stream(9)
    assert all(sample_nonzero(stream, F2).value == 1 for _ in range(50))


def test_sample_nonzero_reproducible():
    a = [sample_nonzero(Stream(1234), F3).value for _ in range(3)]
    b = [sample_nonzero(Stream(1234), F3).value for _ in range(3)]
    assert a == b and set(a) <= {1, 2}


def test_sample_nonzero_rational_pool():
    stream = Stream(7)
    seen = {sample_nonzero(stream, Q).value for _ in range(500)}
    assert seen <= set(RATIONAL_POOL)
    assert len(seen) == len(RATIONAL_POOL)  # all pool members show up


def _elements(spec):
    if spec.kind == "prime":
        return st.integers(0, spec.p - 1).map(spec.element)
    pool = st.sampled_from(RATIONAL_POOL + (Fraction(0),))
    return pool.map(spec.element)


@pytest.mark.parametrize("spec", [F2, F3, F5, F31, Q], ids=lambda s: s.label())
def test_field_axioms(spec):
    @given(a=_elements(spec), b=_elements(spec), c=_elements(spec))
    def inner(a, b, c):
        assert (a + b) == (b + a)
        assert (a * b) == (b * a)
        assert ((a + b) + c) == (a + (b + c))
        assert ((a * b) * c) == (a * (b * c))
        assert (a * (b + c)) == (a * b + a * c)
        assert (a + spec.zero()) == a
        assert (a * spec.one()) == a
        assert (a + (-a)).is_zero()
        if not a.is_zero():
            assert (a * a.inv()) == spec.one()
            assert a.inv().inv() == a

    inner()


def test_modular_arithmetic_matches_integers():
    stream = Stream(31337)
    p = 2**31 - 1
    spec = FieldSpec.prime(p)
    for _ in range(10_000):
        x = stream.randbelow(p)
        y = stream.randbelow(p)
        assert (spec.element(x) + spec.element(y)).value == (x + y) % p
        assert (spec.element(x) * spec.element(y)).value == (x * y) % p
        assert (spec.element(x) - spec.element(y)).value == (x - y) % p
