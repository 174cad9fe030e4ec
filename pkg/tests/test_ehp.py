import pytest

from todacalc.bracket import BracketSpec
from todacalc.database import lookup_group
from todacalc.ehp import (
    EHPNode,
    NotInImage,
    apply_map,
    desuspend,
    h_formula,
    h_kills_suspension,
    p_inverse,
)
from todacalc.rewrite import normalize
from todacalc.syntax import parse_expr
from todacalc.terms import SuspensionError

T = "{[nu_6]; [eta_7, sigma'_7.eta_14]; [eta_8.kappa_9; nubar_15]}_2"


def el(db, text):
    return normalize(parse_expr(text, db.gens), db)


def stored_nodes(db):
    return sorted({(r.m, r.degree) for r in db.ehp})


def test_p_of_iota11(db):
    y = apply_map(EHPNode(db, 5, 9), "P", lookup_group(db, 11, 11).gen(0))
    assert y == el(db, "nu_5.eta_8")


def test_h_of_p_iota13(db):
    y = apply_map(EHPNode(db, 6, 11), "P", lookup_group(db, 13, 13).gen(0))
    assert y.render() == "w_6"
    assert apply_map(EHPNode(db, 5, 10), "H", y).render() == "2*iota_11"


def test_e_of_zero(db):
    node = EHPNode(db, 5, 9)
    assert apply_map(node, "E", node.source("E").zero()).is_zero


def test_group_mismatch(db):
    with pytest.raises(ValueError):
        apply_map(EHPNode(db, 5, 9), "P", lookup_group(db, 13, 13).gen(0))


def test_p_inverse_contains_iota(db):
    c = p_inverse(EHPNode(db, 5, 9), el(db, "nu_5.eta_8"))
    assert c.representative.render() == "iota_11"
    assert c.indeterminacy.render() == "{2*iota_11}"


def test_p_inverse_of_zero_is_kernel(db):
    node = EHPNode(db, 5, 9)
    c = p_inverse(node, node.target("P").zero())
    assert c.representative.is_zero
    assert c.indeterminacy == node.hom("P").kernel()


def test_p_inverse_bounded_by_sigma(db):
    y = el(db, "nu_5.sigma'_8.eta_15")
    c = p_inverse(EHPNode(db, 5, 16), y)
    assert c.representative is None
    assert c.bound.render() == "{sigma_11}"


def test_p_inverse_outside_image(db):
    with pytest.raises(NotInImage, match="not in im"):
        p_inverse(EHPNode(db, 5, 8), el(db, "nu_5"))


def test_exactness_corollaries(db):
    """E o P = 0, P(rep) = y and ker P = im H on every stored node."""
    checked = 0
    for m, N in stored_nodes(db):
        node = EHPNode(db, m, N)
        P, E = node.hom("P"), node.hom("E")
        if P is None or E is None:
            continue
        for x in P.source.names:
            assert E(P(P.source.gen(x))).is_zero
        for i in range(P.source.rank):
            y = P(P.source.gen(i))
            c = p_inverse(node, y)
            assert P(c.representative) == y
            H = EHPNode(db, m, N + 1).hom("H")
            if H is not None:
                assert c.indeterminacy == H.image()
        checked += 1
    assert checked >= 3


def test_h_formula_T(db):
    c = h_formula(BracketSpec.parse(T, db), db)
    assert c.representative.render() == "eta_11.kappa_12"
    assert c.indeterminacy.is_trivial


def test_h_formula_is_sum_over_columns(db):
    spec = BracketSpec.parse(T, db)
    whole = h_formula(spec, db)
    cols = [h_formula(spec.drop(ys=(1 - s,)), db) for s in range(2)]
    assert cols[0].representative + cols[1].representative == whole.representative
    assert all(c.indeterminacy.is_trivial for c in cols)


def test_h_formula_zero_column(db):
    c = h_formula(BracketSpec.parse("{[nu_6]; [eta_7]; [0_8^(1)]}_2", db), db)
    assert c.representative.is_zero and c.indeterminacy.is_trivial


def test_h_formula_needs_positive_index(db):
    spec = BracketSpec.parse("{[eta_13, sigma_13]; [sigma_14; eta_20]; [4*zeta_21]}_0", db)
    with pytest.raises(ValueError):
        h_formula(spec, db)


def test_desuspend(db):
    assert desuspend(parse_expr("eta_11.kappa_12", db.gens)).render() == "eta_10.kappa_11"
    with pytest.raises(SuspensionError):
        desuspend(parse_expr("sigma_8", db.gens))


def test_h_kills_suspension(db):
    why = h_kills_suspension(db, parse_expr("nu_6", db.gens), 26, 9)
    assert "nu_6 = E(nu_5)" in why
