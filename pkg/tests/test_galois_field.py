import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import DegreeMismatch, DivisionByZero, FieldError, FieldMismatch, NonPrime, ReducibleModulus
from galois_field import default_modulus, enumerate_field, make_field, nth_roots

SMALL_FIELDS = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3), (2, 5), (7, 2), (2, 6)]


@pytest.mark.parametrize("p,m", SMALL_FIELDS)
def test_field_axioms_exhaustive(p, m):
    field = make_field(p, m)
    q = field.q
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    a, b, c = field.gf(a.ravel()), field.gf(b.ravel()), field.gf(c.ravel())

    assert np.array_equal(a + b, b + a)
    assert np.array_equal(a * b, b * a)
    assert np.array_equal((a + b) + c, a + (b + c))
    assert np.array_equal((a * b) * c, a * (b * c))
    assert np.array_equal(a * (b + c), a * b + a * c)

    elements = field.elements
    assert np.all(elements + field.gf(0) == elements)
    assert np.all(elements * field.gf(1) == elements)
    assert np.all(elements + (-elements) == 0)
    nonzero = elements[1:]
    assert np.all(nonzero * (field.gf(1) / nonzero) == 1)


@pytest.mark.parametrize("p,m", [(3, 1), (2, 2), (5, 1), (3, 2), (2, 3)])
def test_field_element_matches_vectorized_arithmetic(p, m):
    field = make_field(p, m)
    for x in enumerate_field(field):
        for y in enumerate_field(field):
            assert (x + y).enc == int(x.value + y.value)
            assert (x - y).enc == int(x.value - y.value)
            assert (x * y).enc == int(x.value * y.value)
            if y:
                assert (x / y) * y == x


def test_default_modulus_is_lexicographically_smallest():
    assert default_modulus(2, 2) == (1, 1, 1)
    assert default_modulus(2, 3) == (1, 0, 1, 1)
    assert default_modulus(2, 4) == (1, 0, 0, 1, 1)
    assert default_modulus(3, 2) == (1, 0, 1)
    assert default_modulus(5, 2) == (1, 1, 1)


def test_extension_encoding_follows_modulus(gf9, gf16):
    # GF(9) = GF(3)[x]/(x²+1): x² = -1
    x = gf9.element(3)
    assert x.coeffs == (0, 1)
    assert x * x == gf9.element(2)
    # GF(16) = GF(2)[x]/(x⁴+x³+1): x⁴ = x³ + 1
    assert gf16.element(2) ** 4 == gf16.element(9)


def test_prime_field_is_integers_mod_p(gf13):
    assert gf13.modulus == ()
    assert (gf13.element(7) * gf13.element(9)).enc == 63 % 13
    assert gf13.element(5).inv().enc == 8


def test_integer_operands_go_through_prime_subfield(gf9):
    a = gf9.element(4)
    assert a * 2 == a + a
    assert gf9.one * -1 == gf9.element(2)
    assert 1 - gf9.one == gf9.zero


def test_make_field_errors():
    with pytest.raises(NonPrime):
        make_field(4)
    with pytest.raises(NonPrime):
        make_field(1)
    with pytest.raises(DegreeMismatch):
        make_field(3, 0)
    with pytest.raises(ReducibleModulus):
        make_field(3, 2, [2, 0, 1])
    with pytest.raises(DegreeMismatch):
        make_field(3, 2, [1, 0, 2])
    with pytest.raises(DegreeMismatch):
        make_field(3, 2, [1, 1])
    with pytest.raises(FieldError):
        make_field(2, 17)


def test_explicit_modulus_is_kept():
    field = make_field(3, 2, [2, 1, 1])
    assert field.modulus == (2, 1, 1)
    assert str(field) == "GF(9)"


def test_division_by_zero(gf5):
    with pytest.raises(DivisionByZero):
        gf5.zero.inv()
    with pytest.raises(ZeroDivisionError):
        gf5.one / gf5.zero


def test_mixing_fields_fails(gf5, gf13):
    with pytest.raises(FieldMismatch):
        gf5.one + gf13.one
    with pytest.raises(FieldError):
        gf5.element(5)


def test_nth_roots(gf13):
    assert [x.enc for x in nth_roots(gf13, 4, gf13.one)] == [1, 5, 8, 12]
    assert nth_roots(gf13, 4, gf13.element(2)) == []
    assert [x.enc for x in nth_roots(gf13, 1, gf13.element(6))] == [6]
    with pytest.raises(FieldError):
        nth_roots(gf13, 0, gf13.one)


def test_enumerate_field_in_enc_order(gf9):
    assert [e.enc for e in enumerate_field(gf9)] == list(range(9))


@given(p=st.sampled_from([3, 5, 7, 11, 13]), m=st.integers(min_value=1, max_value=2), data=st.data())
def test_fermat_and_negative_powers(p, m, data):
    field = make_field(p, m)
    x = field.element(data.draw(st.integers(min_value=1, max_value=field.q - 1)))
    assert x ** (field.q - 1) == field.one
    assert x ** -1 == x.inv()
    assert x ** 0 == field.one
    assert x ** -3 * x ** 3 == field.one


@given(p=st.sampled_from([2, 3, 5]), m=st.integers(min_value=1, max_value=3), data=st.data())
def test_frobenius_is_additive(p, m, data):
    field = make_field(p, m)
    elements = st.integers(min_value=0, max_value=field.q - 1)
    a = field.element(data.draw(elements))
    b = field.element(data.draw(elements))
    assert (a + b) ** p == a ** p + b ** p


@given(p=st.sampled_from([3, 5, 7, 13]), m=st.integers(min_value=1, max_value=2),
       n=st.integers(min_value=1, max_value=12), data=st.data())
def test_nth_roots_count(p, m, n, data):
    field = make_field(p, m)
    c = field.element(data.draw(st.integers(min_value=1, max_value=field.q - 1)))
    roots = nth_roots(field, n, c)
    assert len(roots) in (0, math.gcd(n, field.q - 1))
    assert all(x ** n == c for x in roots)
