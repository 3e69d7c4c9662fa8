import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from errors import DegreeMismatch, FieldMismatch, SingularMatrix
from galois_field import make_field
from poly_algebra import (HomogForm, invert, is_zero_poly, poly_coeffs, poly_degree, poly_eval, rank, roots_product,
                          rref, same_row_space, solve, stack_rows, to_matrix, uni_poly, vandermonde)


def test_uni_poly_and_degree(gf13):
    f = uni_poly(gf13, [1, 0, 0, 0, 1])
    assert poly_degree(f) == 4
    assert poly_coeffs(f) == (1, 0, 0, 0, 1)
    assert poly_eval(f, gf13.element(2)).enc == 17 % 13

    zero = uni_poly(gf13, [])
    assert is_zero_poly(zero)
    assert poly_degree(zero) == -math.inf
    assert poly_coeffs(uni_poly(gf13, [0, 0])) == ()


def test_poly_eval_rejects_other_field(gf5, gf13):
    with pytest.raises(FieldMismatch):
        poly_eval(uni_poly(gf13, [1, 1]), gf5.one)


def test_roots_product_vanishes_exactly_on_roots(gf9):
    roots = [gf9.element(1), gf9.element(4), gf9.element(7)]
    f = roots_product(gf9, roots)
    assert poly_degree(f) == 3
    values = [poly_eval(f, e).enc for e in map(gf9.element, range(9))]
    assert [i for i, value in enumerate(values) if value == 0] == [1, 4, 7]


def test_homogeneous_form(gf13):
    # 2t² + 3tu + u²
    form = HomogForm(gf13, 2, (1, 3, 2))
    t, u = gf13.element(4), gf13.element(5)
    expected = 2 * 16 + 3 * 20 + 25
    assert form.evaluate(t, u).enc == expected % 13
    assert form.evaluate(t, gf13.one) == poly_eval(form.dehomogenize(), t)

    ts = gf13.elements
    affine = form.evaluate_affine(ts)
    assert [int(v) for v in affine] == [form.evaluate(gf13.element(i), gf13.one).enc for i in range(13)]


def test_homogeneous_form_from_terms_lifts_negative_integers(gf9):
    form = HomogForm.from_terms(gf9, 2, {0: -1, 2: 1})
    assert form.coeffs == (2, 0, 1)
    with pytest.raises(DegreeMismatch):
        HomogForm(gf9, 2, (1, 1))


def test_rank_rref_and_inverse(gf13):
    matrix = to_matrix(gf13, [[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert rank(matrix) == 2
    reduced = rref(matrix)
    assert rank(reduced[:2]) == 2
    assert not np.any(reduced[2].view(np.ndarray))

    with pytest.raises(SingularMatrix):
        invert(matrix)
    with pytest.raises(SingularMatrix):
        invert(to_matrix(gf13, [[1, 2, 3], [4, 5, 6]]))

    square = to_matrix(gf13, [[2, 1], [1, 1]])
    assert np.array_equal(square @ invert(square), gf13.gf.Identity(2))


def test_solve(gf9):
    matrix = to_matrix(gf9, [[1, 3], [5, 2]])
    vector = gf9.array([7, 1])
    x = solve(matrix, vector)
    assert np.array_equal(matrix @ x, vector)


def test_solve_rejects_mixed_fields(gf5, gf13):
    with pytest.raises(FieldMismatch):
        solve(to_matrix(gf13, [[1, 0], [0, 1]]), gf5.array([1, 1]))


def test_to_matrix_requires_2d(gf5):
    with pytest.raises(DegreeMismatch):
        to_matrix(gf5, [1, 2, 3])


def test_empty_matrix_rank_is_zero(gf5):
    assert rank(gf5.gf(np.zeros((0, 3), dtype=np.int64))) == 0


@given(st.lists(st.integers(min_value=0, max_value=12), min_size=2, max_size=6, unique=True))
def test_vandermonde_on_distinct_nodes_is_invertible(nodes):
    field = make_field(13)
    matrix = vandermonde([field.element(x) for x in nodes], len(nodes))
    assert rank(matrix) == len(nodes)
    assert [int(v) for v in matrix[:, 1]] == nodes


def test_same_row_space(gf13):
    a = to_matrix(gf13, [[1, 0, 2], [0, 1, 3]])
    b = to_matrix(gf13, [[1, 1, 5], [2, 0, 4]])
    c = to_matrix(gf13, [[1, 0, 0], [0, 1, 0]])
    assert same_row_space(a, b)
    assert not same_row_space(a, c)
    assert rank(stack_rows(gf13, [a, c])) == 3


def test_vandermonde_needs_nodes():
    with pytest.raises(DegreeMismatch):
        vandermonde([], 3)


matrices = st.integers(min_value=1, max_value=5).flatmap(
    lambda rows: st.integers(min_value=1, max_value=5).flatmap(
        lambda cols: st.lists(st.lists(st.integers(min_value=0, max_value=12), min_size=cols, max_size=cols),
                              min_size=rows, max_size=rows)))


@given(matrices)
def test_rank_equals_rank_of_transpose(values):
    field = make_field(13)
    transposed = [list(column) for column in zip(*values)]
    assert rank(to_matrix(field, values)) == rank(to_matrix(field, transposed))


@given(st.integers(min_value=1, max_value=5).flatmap(
    lambda size: st.tuples(
        st.lists(st.lists(st.integers(min_value=0, max_value=8), min_size=size, max_size=size),
                 min_size=size, max_size=size),
        st.lists(st.integers(min_value=0, max_value=8), min_size=size, max_size=size))))
def test_solve_recovers_vector(case):
    values, v = case
    field = make_field(3, 2)
    matrix = to_matrix(field, values)
    assume(rank(matrix) == len(values))
    vector = field.array(v)
    assert np.array_equal(solve(matrix, matrix @ vector), vector)
