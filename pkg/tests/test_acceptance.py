"""Acceptance criteria 1-7, each exact and timed.

Every test records a one-line verdict; the lines are printed at the end of
the pytest run (see conftest.py) and when this file is run directly.
"""

import random
import re
import sys
import time
from math import prod
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import check_additivity, check_associativity, check_idempotence, corpus  # noqa: E402
from oracle import closure  # noqa: E402
from todacalc import load_default  # noqa: E402
from todacalc.bracket import (  # noqa: E402
    BracketSpec,
    check_well_defined,
    compare_formula,
    indeterminacy,
    indeterminacy_full,
    shape_rewrite,
    shape_cases,
)
from todacalc.database import lookup_group  # noqa: E402
from todacalc.ehp import EHPNode, h_formula, p_inverse  # noqa: E402
from todacalc.groups import BasisEntry, GroupPresentation, member, span, subgroup_sum  # noqa: E402
from todacalc.rewrite import normalize  # noqa: E402
from todacalc.script import format_step, load_script, run_script, shipped_scripts  # noqa: E402
from todacalc.syntax import parse_expr  # noqa: E402
from todacalc.validate import mutation_sample, validate_database  # noqa: E402

LIMIT = 10.0
VERDICTS: dict[int, str] = {}

R = "{[eta_13, sigma_13]; [sigma_14; eta_20]; [4*zeta_21]}_0"
T = "{[nu_6]; [eta_7, sigma'_7.eta_14]; [eta_8.kappa_9; nubar_15]}_2"


def verdict(n, title, check):
    """Run ``check`` (which returns a detail string), time it and record one line."""
    t = time.perf_counter()
    ok, detail = True, ""
    try:
        detail = check()
    except AssertionError as exc:
        ok, detail = False, str(exc) or "assertion failed"
    dt = time.perf_counter() - t
    if dt >= LIMIT:
        ok, detail = False, f"took {dt:.1f}s; " + detail
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  ({dt:.2f}s)  {detail}"
    VERDICTS[n] = line
    print(line)
    assert ok, line


def el(db, text):
    return normalize(parse_expr(text, db.gens), db)


def c1(db):
    r = BracketSpec.parse(R, db)
    assert check_well_defined(r, db).ok, "R is not well-defined"
    amb = lookup_group(db, 33, 13)
    assert amb.shape() == "Z/8 + Z/2 + Z/2 + Z/2", amb.shape()
    full = indeterminacy_full(r, db)
    want = span(amb, [el(db, "Sigma-theta_13.nubar_25"), el(db, "Sigma-theta_13.epsilon_25")])
    assert full == want, f"full indeterminacy {full.render()}"
    assert [x.render() for x in full.basis()] == ["Sigma-theta_13.nubar_25", "Sigma-theta_13.epsilon_25"]
    assert full.order() == 4
    cmp = compare_formula(r, db)
    assert cmp.formula.order() == 2
    assert cmp.strict and "not a coset of" in cmp.render()
    return f"Ind = {full.render()} (order 4), formula order 2, strict"


def c2(db):
    t = BracketSpec.parse(T, db)
    rep = check_well_defined(t, db)
    assert rep.ok, "T is not well-defined"
    used = {r.render() for r in rep.relations}
    # nu_5 eta_8 = P(iota_11) enters suspended; the last four form the chain for sigma' eta nubar
    want = {
        "nu_6.eta_9 = 0",
        "sigma'_9 = 2*sigma_9",
        "eta_6.nubar_7 = nu_6^3",
        "sigma'_7.nu_14^3 = nu_7.sigma_10.nu_17^2",
        "nu_5.sigma_8.nu_15^2 = eta_5.epsilonbar_6",
        "epsilonbar_6 = eta_6.kappa_7",
    }
    assert used == want, f"relations {sorted(used)}"
    p_iota = EHPNode(db, 5, 9).hom("P")(lookup_group(db, 11, 11).gen(0))
    assert p_iota == el(db, "nu_5.eta_8")
    assert el(db, "sigma_11.nubar_18").is_zero
    bound = p_inverse(EHPNode(db, 5, 16), el(db, "nu_5.sigma'_8.eta_15")).bound
    assert bound == lookup_group(db, 18, 11).whole() and bound.render() == "{sigma_11}"
    c = h_formula(t, db)
    assert c.representative is not None and c.representative.render() == "eta_11.kappa_12"
    assert c.indeterminacy.is_trivial
    return "H(T) = eta_11.kappa_12 + {0}"


def c3(db):
    script = load_script(shipped_scripts()["prop_5_1.td"])
    rep = run_script(script, db)
    assert rep.ok, f"script {rep.summary()}: {rep.results[-1].output}"
    steps = [format_step(r.step) for r in rep.results]
    text = "\n".join(steps)
    for needed in (
        "let K = rewrite(Tp, 4)",
        "assert equal K = {[nu_6]; [eta_9]; [eta_10.kappa_11]}_0",
        "assert equal pi(18, 6) = span(w_6.sigma_11)",
        "assert zero extra(Tp, 4)",
        "let H1 = hcomp(5, 10, eta_11.kappa_12)",
        "assert zero H1",
        "let H2 = hsusp(nu_6, 26, 9)",
        "assert zero H2",
    ):
        assert needed in text, f"missing step: {needed}"
    assert steps[-1] == "echo H{nu_6, eta_9, eta_10.kappa_11} = eta_11.kappa_12"
    # H(P(iota_13)) = 2 iota_11 spans H(pi_11(S^6))
    h = EHPNode(db, 5, 10).hom("H")
    assert h.image().render() == "{2*iota_11}"
    return rep.summary()


def c4(db):
    rng = random.Random(20240611)
    agree = 0
    for _ in range(200):
        while True:
            orders = [rng.choice([2, 4, 8]) for _ in range(rng.randint(1, 5))]
            if prod(orders) <= 2**12:
                break
        g = GroupPresentation(1, "G", tuple(BasisEntry(f"g{i}", o) for i, o in enumerate(orders)))
        gens = [tuple(rng.randrange(o) for o in orders) for _ in range(rng.randint(0, 4))]
        x = tuple(rng.randrange(o) for o in orders)
        h = span(g, [g.element(v) for v in gens])
        brute = closure(gens, orders)
        canon = closure([b.coords for b in h.basis()], orders)
        ok = canon == brute and member(h, g.element(x)) == (x in brute) and h.order() == len(brute)
        agree += ok
    assert agree == 200, f"{agree}/200 agree"
    return "200/200 agree with enumeration"


def c5(db):
    rep = validate_database(db)
    assert rep.ok, rep.render()
    sample = mutation_sample(db, 50)
    assert len(sample) == 50
    missed = [m.description for m in sample if validate_database(m.db).ok]
    assert not missed, f"undetected: {missed}"
    return f"{len(rep.checked)} checks, 0 failures; 50/50 mutations detected"


def c6(db):
    items = corpus(db)
    bad, stuck = check_idempotence(db, items)
    assert not bad and not stuck, f"idempotence: {bad[:3]} stuck {stuck}"
    n_add, bad_add, stuck_add = check_additivity(db, items)
    assert not bad_add, f"additivity: {bad_add[:3]}"
    n_assoc, bad_assoc, both, one = check_associativity(db, items)
    assert not bad_assoc, f"associativity: {bad_assoc[:3]}"
    assert one == 0, f"{one} triples stuck on only one side"
    return (
        f"{len(items)} corpus terms; additivity {n_add} ok; associativity {n_assoc} ok; "
        f"{stuck_add + both} cases leave the stored groups on both sides"
    )


def c7(db):
    cases = shape_cases(db)
    assert sorted(cases) == [1, 2, 3, 4]
    for case, spec in cases.items():
        assert check_well_defined(spec, db).ok, f"case {case} spec is not well-defined"
        res = shape_rewrite(spec, case, db)
        lhs = indeterminacy(spec, db)
        rhs = subgroup_sum(indeterminacy(res.spec, db), res.extra_subgroup(db))
        assert lhs == rhs, f"case {case}: {lhs.render()} != {rhs.render()}"
    return "4/4 cases: Ind = Ind' + extra"


CRITERIA = {
    1: ("index-0 indeterminacy of R", c1),
    2: ("H-formula on T", c2),
    3: ("containment script for T", c3),
    4: ("subgroup oracle", c4),
    5: ("exactness audit", c5),
    6: ("normalization properties", c6),
    7: ("shape rewrites", c7),
}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(db, n):
    title, fn = CRITERIA[n]
    verdict(n, title, lambda: fn(db))


if __name__ == "__main__":
    database = load_default()
    failed = 0
    for n, (title, fn) in sorted(CRITERIA.items()):
        try:
            verdict(n, title, lambda: fn(database))
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
