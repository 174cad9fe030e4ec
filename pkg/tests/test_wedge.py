from collections import Counter
from math import factorial, gcd, prod

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import divisors
from sympy.functions.combinatorial.numbers import mobius

from todacalc.database import lookup_group
from todacalc.syntax import parse_expr
from todacalc.terms import ComposabilityError
from todacalc.wedge import (
    FormalMatrix,
    MatrixError,
    WedgeSpace,
    hall_basis,
    image_through_row,
    is_zero_matrix,
    matrix_compose,
    matrix_equal,
    product_sphere,
    wedge_components,
    wedge_group,
)


def witt(r, w):
    return sum(int(mobius(d)) * r ** (w // d) for d in divisors(w)) // w


def witt_multi(alpha):
    """Dimension of the multi-degree ``alpha`` part of the free Lie algebra."""
    w = sum(alpha)
    g = 0
    for a in alpha:
        g = gcd(g, a)
    total = 0
    for d in divisors(g):
        total += int(mobius(d)) * factorial(w // d) // prod(factorial(a // d) for a in alpha)
    return total // w


@given(st.integers(1, 4), st.integers(1, 6))
def test_hall_basis_counts_match_witt(r, w):
    basis = hall_basis(r, w)
    by_weight = Counter(p.weight for p in basis)
    for k in range(1, w + 1):
        assert by_weight[k] == witt(r, k)


@given(st.integers(2, 3), st.integers(2, 6))
def test_hall_basis_multidegrees(r, w):
    seen = Counter()
    for p in hall_basis(r, w):
        if p.weight == w:
            c = Counter(p.letters())
            seen[tuple(c[i] for i in range(r))] += 1
    for alpha, n in seen.items():
        assert n == witt_multi(alpha)


def test_hall_order_two_letters():
    names = [p.render() for p in hall_basis(2, 3)]
    assert names == ["j1", "j2", "[j1,j2]", "[[j1,j2],j1]", "[[j1,j2],j2]"]


def test_product_sphere():
    p = hall_basis(2, 3)[3]
    assert product_sphere(p, (14, 20)) == 14 + 14 + 20 - 2


def test_wedge_group_example(db):
    W = WedgeSpace((14, 20))
    g = wedge_group(db, 33, W)
    assert g.shape() == "Z/2 + Z/2 + Z/8 + Z_(2)"
    assert g.names[-1] == "[j1,j2].iota_33"
    # weight three lives on S^46 and S^52
    assert [p.weight for p in hall_basis(2, 3)].count(3) == 2
    assert all(product_sphere(p, W.summands) > 33 for p in hall_basis(2, 3) if p.weight == 3)
    assert [c.tag for c in wedge_components(db, 33, W)] == ["j1", "j2", "[j1,j2]"]


def test_single_summand_is_lookup(db):
    assert wedge_group(db, 22, WedgeSpace((13,))) == lookup_group(db, 22, 13)


def test_circle_summand_rejected(db):
    with pytest.raises(MatrixError):
        wedge_components(db, 5, WedgeSpace((1, 3)))


def test_matrix_compose_row_column(db):
    a = FormalMatrix.parse("[eta_13, sigma_13]", db)
    b = FormalMatrix.parse("[sigma_14; eta_20]", db)
    ab = matrix_compose(a, b, db)
    assert ab.shape == (1, 1)
    assert is_zero_matrix(ab, db) == []


def test_matrix_compose_matches_dot_product(db):
    a = FormalMatrix.parse("[eta_9, nu_9]", db)
    b = FormalMatrix.parse("[nu_10; eta_12]", db)
    dot = parse_expr("eta_9.nu_10 + nu_9.eta_12", db.gens)
    want = FormalMatrix(((dot,),), a.row_space, b.col_space)
    assert matrix_equal(matrix_compose(a, b, db), want, db)


def test_matrix_compose_shapes(db):
    a = FormalMatrix.parse("[eta_13, sigma_13]", db)
    with pytest.raises(ComposabilityError):
        matrix_compose(a, a, db)


def test_non_suspension_column_refused(db):
    a = FormalMatrix.parse("[eta_7, 0_7^(1); eta_7, eta_7]", db)
    b = FormalMatrix.parse("[sigma_8, 0_8^(7); 0_8^(7), 0_8^(7)]", db)
    with pytest.raises(MatrixError):
        matrix_compose(a, b, db)


def test_image_through_row(db):
    a = FormalMatrix.parse("[eta_13, sigma_13]", db)
    img = image_through_row(a, db, 33, 0)
    assert img.render() == "{Sigma-theta_13.nubar_25, Sigma-theta_13.epsilon_25}"
    assert img.order() == 4


def test_image_through_single_entry_row(db):
    a = FormalMatrix.parse("[eta_13]", db)
    img = image_through_row(a, db, 33, 0)
    assert img.render() == "{Sigma-theta_13.nubar_25}"
