import pytest

from corpus import check_additivity, check_associativity, check_idempotence, corpus
from todacalc.rewrite import StuckTerm, canonical, normalize, normalize_traced
from todacalc.syntax import parse_expr
from todacalc.terms import compose_expr


def ev(db, text):
    return normalize(parse_expr(text, db.gens), db)


def test_sigma_prime_eta_nubar(db):
    el, used = normalize_traced(parse_expr("sigma'_7.eta_14.nubar_15", db.gens), db)
    assert el.render() == "eta_7^2.kappa_9"
    assert (el.group.degree, el.group.target) == (23, "S^7")
    cites = " ".join(r.citation for r in used)
    assert "(7.3)" in cites and "(10.23)" in cites


def test_twice_eta_squared(db):
    assert ev(db, "2*eta_6.eta_7").is_zero


def test_eta_omega_nu(db):
    el = ev(db, "eta_13.omega_14.nu_30")
    assert el.render() == "Sigma-theta_13.nubar_25"
    assert el.group.shape() == "Z/8 + Z/2 + Z/2 + Z/2"


def test_order_kills_multiple(db):
    assert ev(db, "8*zetabar_14").is_zero
    assert not ev(db, "4*zetabar_14").is_zero


def test_scalar_moves_through_post_composition(db):
    e = compose_expr(parse_expr("sigma_10", db.gens), parse_expr("4*zeta_17", db.gens))
    assert normalize(e, db).is_zero


def test_merged_coefficient_reaches_gated_rule(db):
    e = parse_expr("sigma_10.zeta_17 + 3*sigma_10.zeta_17", db.gens)
    assert normalize(e, db).is_zero


def test_p_image_suspends_to_zero(db):
    assert ev(db, "nu_6.eta_9").is_zero


def test_unlisted_group_keeps_symbols(db):
    el = ev(db, "eta_11.kappa_12")
    assert el.is_symbolic and el.render() == "eta_11.kappa_12"


def test_canonical_reduces_residuals(db):
    x = ev(db, "eta_10.kappa_11")
    assert (x + x).render() == "2*eta_10.kappa_11"
    assert canonical(x + x, db).is_zero


def test_budget(db):
    with pytest.raises(StuckTerm):
        normalize(parse_expr("sigma'_7.eta_14.nubar_15", db.gens), db, budget=2)


def test_stuck_when_no_basis_match(db):
    with pytest.raises(StuckTerm) as exc:
        ev(db, "nu_6^4")
    assert exc.value.fragment


@pytest.fixture(scope="module")
def items(db):
    return corpus(db)


def test_corpus_is_substantial(items):
    assert len(items) > 50


def test_idempotence(db, items):
    bad, stuck = check_idempotence(db, items)
    assert bad == [] and stuck == 0


def test_additivity(db, items):
    n, bad, _ = check_additivity(db, items)
    assert n > 100 and bad == []


def test_associativity(db, items):
    n, bad, _, one_sided = check_associativity(db, items)
    assert n > 1000 and bad == []
    # a term that cannot be expressed gets stuck whichever way it is bracketed
    assert one_sided == 0
