import pytest
from hypothesis import given
from hypothesis import strategies as st

from todacalc.syntax import ParseError, parse_chain, parse_expr, parse_term
from todacalc.terms import (
    ComposabilityError,
    Expr,
    GeneratorRecord,
    Term,
    compose,
    compose_expr,
    gen_atom,
    iota,
    scalar_mul,
    suspend,
)


def test_generator_record_checks():
    with pytest.raises(ValueError):
        GeneratorRecord("x", 0, 1, 2)
    with pytest.raises(ValueError):
        GeneratorRecord("x", 3, 1, 6)
    GeneratorRecord("x", 3, 1, None)


def test_subscript_below_birth(db):
    with pytest.raises(ValueError):
        gen_atom(db.gens["nu"], 4)
    with pytest.raises(ParseError):
        parse_term("nu_4", db.gens)


def test_compose_concatenates(db):
    f = parse_term("eta_13", db.gens)
    g = parse_term("omega_14.nu_30", db.gens)
    assert compose(f, g).render() == "eta_13.omega_14.nu_30"


def test_identity_composition(db):
    assert compose(Term(1, (iota(6),)), parse_term("nu_6", db.gens)).render() == "nu_6"


def test_scalar_on_the_right_always_pulls_out(db):
    t = compose(parse_term("sigma_10", db.gens), parse_term("4*zeta_17", db.gens))
    assert t.coef == 4
    assert t.render() == "4*sigma_10.zeta_17"


def test_scalar_on_the_left_needs_a_suspension(db):
    # sigma_8 is born on S^8, so it is not a suspension
    t = compose(parse_term("2*eta_7", db.gens), parse_term("sigma_8", db.gens))
    assert t.coef == 1
    assert t.render() == "eta_7.[2]_8.sigma_8"
    t = compose(parse_term("2*eta_8", db.gens), parse_term("sigma_9", db.gens))
    assert t.render() == "2*eta_8.sigma_9"


def test_composability_error(db):
    with pytest.raises(ComposabilityError):
        compose(parse_term("eta_5", db.gens), parse_term("nu_7", db.gens))
    with pytest.raises(ParseError):
        parse_chain("eta_5.nu_7", db.gens)


def test_sum_precomposes_only_with_suspension(db):
    s = parse_expr("eta_10.sigma_11 + epsilon_10", db.gens)
    with pytest.raises(ComposabilityError):
        compose_expr(parse_expr("eta_7", db.gens) + parse_expr("eta_7", db.gens), parse_expr("sigma_8", db.gens))
    assert len(compose_expr(s, parse_expr("eta_18", db.gens)).terms) == 2


def test_suspend(db):
    t = parse_term("nu_5.eta_8", db.gens)
    assert suspend(t, 1).render() == "nu_6.eta_9"
    assert suspend(t, 0) == t
    t = parse_term("sigma'_7.eta_14.nubar_15", db.gens)
    assert suspend(t, 2).render() == "sigma'_9.eta_16.nubar_17"


def test_whitehead_square_suspends_to_zero(db):
    assert suspend(parse_term("w_6.sigma_11", db.gens), 1).is_zero


def test_scalar_mul(db):
    t = parse_term("zeta_21", db.gens)
    assert scalar_mul(4, t).render() == "4*zeta_21"
    assert scalar_mul(1, t) == t


def test_zero_literal(db):
    e = parse_expr("0_9^(8)", db.gens)
    assert e.is_zero and (e.target, e.source) == (9, 17)
    assert parse_expr("0", db.gens) is None


def test_parse_error_column(db):
    with pytest.raises(ParseError) as exc:
        parse_expr("eta_3 + + nu_5", db.gens)
    assert "column 9" in str(exc.value)
    with pytest.raises(ParseError):
        parse_expr("foo_3", db.gens)


def test_whitehead_product_literal(db):
    t = parse_term("[eta_13, sigma_13]", db.gens)
    assert (t.target, t.source) == (13, 33)


def test_toda_power_renders_folded(db):
    assert parse_term("nu_6.nu_9.nu_12", db.gens).render() == "nu_6^3"
    assert parse_term("eta_7^2.kappa_9", db.gens).render() == "eta_7^2.kappa_9"


names = st.sampled_from(["eta", "nu", "sigma", "epsilon", "nubar", "mu", "zeta", "kappa"])


@given(st.lists(names, min_size=1, max_size=4), st.integers(10, 20), st.integers(-5, 5))
def test_render_parse_roundtrip(db, gens, start, coef):
    chain = []
    m = start
    for g in gens:
        a = gen_atom(db.gens[g], m)
        chain.append(a)
        m = a.dom
    t = Term(coef, tuple(chain))
    e = Expr.of(t)
    back = parse_expr(e.render(), db.gens)
    if t.is_zero:
        assert back is None
    else:
        assert back == e
