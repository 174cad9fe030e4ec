"""The EHP sequence over S^m as stored data, P-preimages and the H-formula.

Node ``(m, N)`` carries the maps

    E: pi_N(S^m)            -> pi_{N+1}(S^{m+1})
    H: pi_{N+1}(S^{m+1})    -> pi_{N+1}(S^{2m+1})
    P: pi_{N+2}(S^{2m+1})   -> pi_N(S^m)

E is suspension, so a missing E record is computed by suspending and
normalizing. H and P are only what the database states; a map with a basis
element lacking a record is unavailable unless its target is trivial.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

from .database import Database, NotInDatabase, group_or_unlisted, lookup_group
from .groups import Coset, Element, GroupPresentation, Hom, Subgroup, member, span
from .rewrite import Normalizer, as_expr
from .syntax import Parser
from .terms import Expr, SuspensionError, Term, compose_expr, suspend, suspend_expr

__all__ = [
    "NodeMissing",
    "NotInImage",
    "EHPNode",
    "apply_map",
    "p_inverse",
    "h_formula",
    "h_of_composite",
    "h_kills_suspension",
    "desuspend",
    "compose_subgroup",
    "sphere",
]


class NodeMissing(LookupError):
    pass


class NotInImage(ValueError):
    pass


_SHAPE = {
    "E": lambda m, N: ((N, m), (N + 1, m + 1)),
    "H": lambda m, N: ((N + 1, m + 1), (N + 1, 2 * m + 1)),
    "P": lambda m, N: ((N + 2, 2 * m + 1), (N, m)),
}


@dataclass(frozen=True, eq=False)
class EHPNode:
    db: Database
    m: int
    N: int

    def groups(self, which: str) -> tuple[tuple[int, int], tuple[int, int]]:
        return _SHAPE[which](self.m, self.N)

    def source(self, which: str) -> GroupPresentation:
        N, s = self.groups(which)[0]
        return lookup_group(self.db, N, s)

    def target(self, which: str) -> GroupPresentation:
        N, s = self.groups(which)[1]
        return group_or_unlisted(self.db, N, s)

    @cached_property
    def _homs(self) -> dict:
        return {}

    def hom(self, which: str) -> Hom | None:
        """The map as a matrix, or ``None`` when the data does not determine it."""
        if which in self._homs:
            return self._homs[which]
        self._homs[which] = h = self._build(which)
        return h

    def _build(self, which: str) -> Hom | None:
        try:
            src = self.source(which)
        except NotInDatabase:
            return None
        tgt = self.target(which)
        recs = {r.basis: r for r in self.db.ehp_records(self.m, self.N, which)}
        norm = Normalizer(self.db)
        images = []
        for name in src.names:
            if name in recs:
                images.append(norm.element(recs[name].image))
            elif which == "E":
                chain = Parser(name, self.db.gens).chain()
                images.append(norm.element(suspend(Term(1, chain), 1)))
            elif tgt.is_trivial:
                images.append(tgt.zero())
            else:
                return None
        return Hom(src, tgt, tuple(images))

    def label(self) -> str:
        return f"(m={self.m}, N={self.N})"


def _node(db: Database, m: int, N: int) -> EHPNode:
    return EHPNode(db, m, N)


def apply_map(node: EHPNode, which: str, x: Element) -> Element:
    h = node.hom(which)
    if h is None:
        raise NodeMissing(f"{which} at node {node.label()} is not in database")
    return h(x)


def _suspend_element(db: Database, y: Element, m: int, N: int) -> Element:
    node = _node(db, m, N)
    if not y.is_symbolic:
        h = node.hom("E")
        if h is not None:
            return h(y)
    e = as_expr(y, db, m, N)
    return Normalizer(db).element(suspend_expr(e, 1) if e.terms else Expr.zero(m + 1, N + 1))


def p_inverse(node: EHPNode, y: Element) -> Coset:
    """``P^{-1}(y)`` in pi_{N+2}(S^{2m+1}).

    The indeterminacy is ``ker P``, read from the P matrix when it is stored
    and otherwise from ``im H`` at the next node. Without a P matrix the
    representative is unknown and the whole group bounds the coset.
    """
    db, m, N = node.db, node.m, node.N
    if y.group.degree != N or y.group.target != f"S^{m}":
        raise NotInImage(f"{y.render()} is not in pi_{N}(S^{m})")
    ey = _suspend_element(db, y, m, N)
    if ey.is_symbolic:
        raise NotInImage(f"cannot decide whether E({y.render()}) = {ey.render()} vanishes")
    if not ey.is_zero:
        raise NotInImage(f"y not in im(P): E({y.render()}) = {ey.render()} != 0")
    try:
        src = node.source("P")
    except NotInDatabase:
        raise NodeMissing(f"pi_{N + 2}(S^{2 * m + 1}) is not in database") from None
    P = node.hom("P")
    H = _node(db, m, N + 1).hom("H")
    if P is not None:
        ker = P.kernel()
    elif H is not None:
        ker = H.image()
    else:
        ker = src.whole()
    if P is not None and not y.is_symbolic:
        x = P.preimage(y)
        if x is None:
            raise NotInImage(f"no preimage of {y.render()} under P at node {node.label()}")
        return Coset(ker, x)
    if y.is_zero:
        return Coset(ker, src.zero())
    return Coset(ker, None, src.whole())


def desuspend(e: Expr, k: int = 1) -> Expr:
    """The ``k``-fold desuspension of a class written as suspended generators."""
    terms = []
    for t in e.terms:
        chain = []
        for a in t.chain:
            if a.kind in ("w", "wp"):
                raise SuspensionError(f"{a.render()} is not a suspension")
            if a.sub - k < max(1, a.birth):
                raise SuspensionError(f"{a.render()} does not desuspend {k} times")
            chain.append(replace(a, sub=a.sub - k, dom=a.dom - k))
        terms.append(Term(t.coef, tuple(chain)))
    return Expr(tuple(terms), e.target - k, e.source - k)


def sphere(group: GroupPresentation) -> int:
    return int(group.target.removeprefix("S^"))


def compose_subgroup(db: Database, H: Subgroup, g: Expr, ambient: GroupPresentation) -> Subgroup:
    """``H o g`` for a suspension ``g``; a scalar on ``g`` acts on ``H`` first."""
    if g.is_zero or H.is_trivial:
        return span(ambient, [])
    if len(g.terms) == 1 and g.terms[0].coef != 1 and g.suspension:
        c = g.terms[0].coef
        H = span(H.ambient, [c * x for x in H.basis()])
        g = Expr.of(Term(1, g.terms[0].chain))
    norm = Normalizer(db)
    gens = []
    for x in H.basis():
        xe = as_expr(x, db, sphere(H.ambient), H.ambient.degree)
        if xe.terms:
            gens.append(norm.element(compose_expr(xe, g)))
    return span(ambient, gens)


def h_formula(spec, db: Database) -> Coset:
    """``-sum_s P^{-1}(f o b_s) o Sigma^2 c_s`` for ``{Sigma f, Sigma b, Sigma c}_1``.

    ``spec`` holds undesuspended ``b``, ``c`` at index ``n >= 1``; ``f`` is
    ``a`` desuspended once and ``b``, ``c`` are suspended ``n - 1`` times.
    """
    if spec.n < 1:
        raise ValueError("the H-formula needs index n >= 1")
    a, b, c = spec.a, spec.b, spec.c
    f = [desuspend(e) for e in a.entries[0]]
    b1 = b.suspend(spec.n - 1)
    c1 = c.suspend(spec.n - 1)
    for s, row in enumerate(c1.entries):
        if not row[0].suspension:
            raise ValueError(f"c_{s + 1} = {row[0].render()} is not a suspension")
    w = a.row_space.summands[0]
    m = w - 1
    out_src = c1.col_space.summands[0] + 2
    ambient = group_or_unlisted(db, out_src, 2 * m + 1)
    norm = Normalizer(db)
    rep = ambient.zero()
    known = True
    ind_gens: list[Element] = []
    for s in range(len(b1.col_space)):
        ys = Expr.zero(m, b1.col_space.summands[s])
        for k, fk in enumerate(f):
            if fk.is_zero or b1[k, s].is_zero:
                continue
            ys = ys + compose_expr(fk, b1[k, s])
        y = norm.element(ys)
        node = _node(db, m, ys.source)
        coset = p_inverse(node, y)
        cs = suspend_expr(c1[s, 0], 2)
        ind_gens.extend(compose_subgroup(db, coset.indeterminacy, cs, ambient).generators)
        if coset.representative is not None:
            xe = as_expr(coset.representative, db, 2 * m + 1, ys.source + 2)
            if xe.terms:
                rep = rep - norm.element(compose_expr(xe, cs))
        else:
            img = compose_subgroup(db, coset.bound, cs, ambient)
            if not img.is_trivial:
                known = False
                ind_gens.extend(img.generators)
    ind = span(ambient, ind_gens)
    if not known:
        return Coset(ind, None, None)
    # residual coefficients of an unlisted group are only reduced by normalize
    e = as_expr(rep, db, 2 * m + 1, out_src)
    rep = norm.element(e) if e.terms else rep
    return Coset(ind, rep)


def h_of_composite(db: Database, m: int, N: int, g: Expr) -> Subgroup:
    """``H(pi_{N+1}(S^{m+1}) o g)`` for a suspension ``g``, via H(a o Eb) = H(a) o Eb."""
    if not g.suspension:
        raise ValueError(f"{g.render()} is not a suspension")
    node = _node(db, m, N)
    h = node.hom("H")
    if h is None:
        raise NodeMissing(f"H at node {node.label()} is not in database")
    ambient = group_or_unlisted(db, g.source, 2 * m + 1)
    return compose_subgroup(db, h.image(), g, ambient)


def h_kills_suspension(db: Database, a: Expr, N: int, k: int) -> str:
    """Reason why ``H(a o pi_N(S^k)) = 0``, or raise.

    Needs ``a`` to desuspend and ``pi_N(S^k)`` to be the suspension of
    ``pi_{N-1}(S^{k-1})``; then every composite is a suspension and H o E = 0.
    """
    desuspend(a)
    if k == N:
        return f"pi_{N}(S^{k}) is generated by iota_{k}"
    if (N - 1, k - 1) not in db.esurj:
        raise NodeMissing(f"no record that pi_{N}(S^{k}) = E pi_{N - 1}(S^{k - 1})")
    return f"{a.render()} = E({desuspend(a).render()}) and {db.esurj[(N - 1, k - 1)]}"


def member_of(c: Coset, x: Element) -> bool:
    return c.representative is not None and member(c.indeterminacy, x - c.representative)
