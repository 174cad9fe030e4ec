"""The relation corpus: every contiguous sub-chain of a shipped rewrite rule."""

from todacalc.rewrite import StuckTerm, as_expr, canonical, normalize
from todacalc.terms import Expr, Term, compose_expr

SCALARS = [(1, 1, 1), (3, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2), (2, 3, 4)]


def corpus(db):
    items = {}
    for r in db.rules:
        lhs = Expr.of(r.lhs) if isinstance(r.lhs, Term) else r.lhs
        for e in (lhs, r.rhs):
            for t in e.terms:
                ch = t.chain
                for i in range(len(ch)):
                    for j in range(i + 1, len(ch) + 1):
                        x = Expr.of(Term(1, ch[i:j]))
                        items.setdefault(x.render(), x)
    return list(items.values())


def by_target(items):
    out = {}
    for e in items:
        out.setdefault(e.target, []).append(e)
    return out


def triples(items):
    idx = by_target(items)
    return [(x, y, z) for x in items for y in idx.get(x.source, []) for z in idx.get(y.source, [])]


def scaled(c, e):
    return Expr(tuple(Term(c * t.coef, t.chain) for t in e.terms), e.target, e.source)


def attempt(f):
    """Value of ``f()``, or the StuckTerm it raised."""
    try:
        return f()
    except StuckTerm as exc:
        return exc


def check_idempotence(db, items):
    bad, stuck = [], 0
    for x in items:
        el = attempt(lambda: normalize(x, db))
        if isinstance(el, StuckTerm):
            stuck += 1
            continue
        e = as_expr(el, db, x.target, x.source)
        again = normalize(e, db) if e.terms else el.group.zero()
        if again != el:
            bad.append((x.render(), el.render(), again.render()))
    return bad, stuck


def check_additivity(db, items):
    """``f o (g + h) = f o g + f o h`` for composable f and same-group g, h."""
    idx = by_target(items)
    bad, stuck, n = [], 0, 0
    for f in items:
        pool = idx.get(f.source, [])
        for g in pool:
            for h in [scaled(k, x) for x in pool for k in (1, 3)]:
                if h.source != g.source:
                    continue
                def both():
                    lhs = normalize(compose_expr(f, g + h), db)
                    rhs = normalize(compose_expr(f, g), db) + normalize(compose_expr(f, h), db)
                    return lhs, canonical(rhs, db)
                res = attempt(both)
                if isinstance(res, StuckTerm):
                    stuck += 1
                    continue
                n += 1
                if res[0] != res[1]:
                    bad.append((f.render(), g.render(), h.render()))
    return n, bad, stuck


def check_associativity(db, items):
    """Counts (comparisons, mismatches, stuck on both sides, stuck on one side)."""
    n, bad, both, one = 0, [], 0, 0
    for x, y, z in triples(items):
        for cs in SCALARS:
            a, b, c = scaled(cs[0], x), scaled(cs[1], y), scaled(cs[2], z)
            lhs = attempt(lambda: normalize(compose_expr(compose_expr(a, b), c), db))
            rhs = attempt(lambda: normalize(compose_expr(a, compose_expr(b, c)), db))
            sl, sr = isinstance(lhs, StuckTerm), isinstance(rhs, StuckTerm)
            if sl and sr:
                both += 1
            elif sl or sr:
                one += 1
            else:
                n += 1
                if lhs != rhs:
                    bad.append((cs, x.render(), y.render(), z.render()))
    return n, bad, both, one
