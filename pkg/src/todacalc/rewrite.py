"""Normalization of composition chains to elements of presented groups.

Relations are applied leftmost-innermost: start positions ascending, then
window lengths ascending, then database order. A relation ``L = R`` stored at
``min m`` matches at every shift ``s >= 0`` of its subscripts (shift 0 only
when ``L`` involves a Whitehead product). Replacing a window by a sum needs
the chain to its right to be a suspension, since only then does
pre-composition distribute.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .database import Database, RelationRecord, group_or_unlisted
from .groups import Element, GroupPresentation
from .syntax import Parser
from .terms import Atom, Expr, Term, compose, is_suspension, iota, render_chain, suspend_expr

__all__ = ["StuckTerm", "Normalizer", "normalize", "normalize_traced", "as_expr", "chain_order", "canonical"]

DEFAULT_BUDGET = 10_000
_TRIVIAL_W = (1, 3, 7)


class StuckTerm(ValueError):
    def __init__(self, msg: str, fragment: str = ""):
        self.fragment = fragment
        super().__init__(f"stuck term: {msg}")


def _atom_order(db: Database, a: Atom) -> int | None | bool:
    """Known finite order of one atom, ``None`` for infinite, ``False`` if unknown."""
    if a.kind == "gen":
        rec = db.gens[a.name]
        return False if rec.order == 0 else rec.order
    if a.kind == "w":
        return None if a.sub % 2 == 0 else 2
    return False


def chain_order(db: Database, chain: tuple[Atom, ...]) -> int | None:
    """Smallest order bound ``o`` with ``o * chain = 0`` visible from one atom.

    An atom ``a_i`` bounds the chain when everything after it is a suspension,
    because then ``c * chain = prefix o (c a_i) o suffix``.
    """
    best = None
    for i, a in enumerate(chain):
        if not is_suspension(chain[i + 1:]):
            continue
        o = _atom_order(db, a)
        if o is False or o is None:
            continue
        best = o if best is None else min(best, o)
    return best


def _push_degrees(db: Database, chain: tuple[Atom, ...]) -> tuple[Atom, ...] | None:
    """Move degree atoms right past suspensions and merge them.

    ``[c] o Sigma g = Sigma g o [c]`` and ``a o [c] = c * a``, so a degree
    atom right after an atom of order ``o`` only matters modulo ``o``.
    Returns ``None`` when the chain is null-homotopic.
    """
    out = list(chain)
    changed = True
    while changed:
        changed = False
        for i, a in enumerate(out):
            if a.kind != "deg":
                continue
            nxt = out[i + 1] if i + 1 < len(out) else None
            if nxt is not None and nxt.kind == "deg":
                out[i:i + 2] = [Atom("deg", a.sub, a.dom, scale=a.scale * nxt.scale)]
                changed = True
                break
            if nxt is not None and nxt.suspension and nxt.kind not in ("iota", "zero"):
                out[i:i + 2] = [nxt, Atom("deg", nxt.dom, nxt.dom, scale=a.scale)]
                changed = True
                break
            if i:
                o = _atom_order(db, out[i - 1])
                if o not in (False, None) and a.scale % o != a.scale:
                    out[i] = Atom("deg", a.sub, a.dom, scale=a.scale % o)
                    changed = True
                    break
            if a.scale == 0:
                return None
    return tuple(out)


def _clean(chain: tuple[Atom, ...], coef: int, db: Database | None = None) -> tuple[int, tuple[Atom, ...]]:
    """Drop identities; pull degree atoms with suspension tails into the coefficient."""
    if db is not None and any(a.kind == "deg" for a in chain):
        pushed = _push_degrees(db, chain)
        if pushed is None:
            return 0, chain
        chain = pushed
    out: list[Atom] = []
    tgt = chain[0].sub
    for i, a in enumerate(chain):
        if a.kind == "zero" or (a.kind == "w" and a.sub in _TRIVIAL_W):
            return 0, chain
        if a.kind == "iota":
            continue
        if a.kind == "deg":
            if a.scale == 0:
                return 0, chain
            if is_suspension(chain[i + 1:]):
                coef *= a.scale
                continue
            if a.scale == 1:
                continue
        out.append(a)
    if not out:
        out = [iota(tgt)]
    return coef, tuple(out)


@dataclass
class Normalizer:
    db: Database
    budget: int = DEFAULT_BUDGET
    steps: int = 0
    used: list[RelationRecord] = field(default_factory=list)

    def _tick(self, chain):
        self.steps += 1
        if self.steps > self.budget:
            raise StuckTerm(f"rewrite budget {self.budget} exhausted", render_chain(chain))

    def _match(self, rel: RelationRecord, chain: tuple[Atom, ...], i: int) -> int | None:
        lhs = rel.lhs.chain
        win = chain[i:i + len(lhs)]
        if len(win) != len(lhs):
            return None
        s = win[0].sub - lhs[0].sub
        if s < 0:
            return None
        if s and any(a.kind in ("w", "wp") for a in lhs):
            return None
        for x, y in zip(lhs, win):
            if x.shifted(s) != y:
                return None
        return s

    def _step(self, coef: int, chain: tuple[Atom, ...]) -> list[tuple[int, tuple[Atom, ...]]] | None:
        """One leftmost-innermost rewrite, or ``None`` when the chain is irreducible."""
        n = len(chain)
        for i in range(n):
            for length in range(1, n - i + 1):
                suffix = chain[i + length:]
                susp_tail = is_suspension(suffix)
                for rel in self.db.rules:
                    if rel.sign_unknown or len(rel.lhs.chain) != length:
                        continue
                    s = self._match(rel, chain, i)
                    if s is None:
                        continue
                    lc = rel.lhs.coef
                    if lc != 1 and not (susp_tail and coef % lc == 0):
                        continue
                    rhs = suspend_expr(rel.rhs, s)
                    if len(rhs.terms) > 1 and not susp_tail:
                        continue
                    self.used.append(rel)
                    out = []
                    scale = coef // lc if lc != 1 else coef
                    for t in rhs.terms:
                        piece = Term(t.coef, t.chain)
                        if i:
                            piece = compose(Term(1, chain[:i]), piece)
                        if suffix:
                            piece = compose(piece, Term(1, suffix))
                        out.append((scale * piece.coef, piece.chain))
                    return out
        return None

    def reduce_term(self, coef: int, chain: tuple[Atom, ...]) -> dict[str, tuple[int, tuple[Atom, ...]]]:
        """Irreducible chains keyed by rendering, with accumulated coefficients."""
        acc: dict[str, tuple[int, tuple[Atom, ...]]] = {}
        stack = [(coef, chain)]
        while stack:
            c, ch = stack.pop()
            self._tick(ch)
            c, ch = _clean(ch, c, self.db)
            if c == 0:
                continue
            o = chain_order(self.db, ch)
            if o is not None:
                c %= o
                if c == 0:
                    continue
            nxt = self._step(c, ch)
            if nxt is None:
                key = render_chain(ch)
                old = acc.get(key, (0, ch))[0]
                acc[key] = (old + c, ch)
            else:
                stack.extend(reversed(nxt))
        self._settle(acc)
        return acc

    def element(self, e: Expr | Term) -> Element:
        if isinstance(e, Term):
            e = Expr.of(e) if not e.is_zero else Expr.zero(e.target, e.source)
        group = group_or_unlisted(self.db, e.source, e.target)
        acc: dict[str, tuple[int, tuple[Atom, ...]]] = {}
        for t in e.terms:
            self._merge(acc, self.reduce_term(t.coef, t.chain))
        self._settle(acc)
        return self._to_element(group, acc)

    @staticmethod
    def _merge(acc, more):
        for key, (c, ch) in more.items():
            acc[key] = (acc.get(key, (0, ch))[0] + c, ch)

    def _settle(self, acc):
        """Merged coefficients can enable rules gated on a multiple, such as ``4*x = 0``."""
        again = True
        while again:
            again = False
            for key, (c, ch) in list(acc.items()):
                o = chain_order(self.db, ch)
                c = c % o if o is not None else c
                if c == 0:
                    del acc[key]
                    continue
                acc[key] = (c, ch)
                self._tick(ch)
                nxt = self._step(c, ch)
                if nxt is None:
                    continue
                del acc[key]
                for c2, ch2 in nxt:
                    self._merge(acc, self.reduce_term(c2, ch2))
                again = True
                break

    def _to_element(self, group: GroupPresentation, acc) -> Element:
        coords = [0] * group.rank
        residual: list[tuple[str, int]] = []
        if group.status == "connectivity":
            return group.zero()
        for key, (c, ch) in acc.items():
            if group.status == "unlisted":
                o = chain_order(self.db, ch)
                if o is not None:
                    c %= o
                residual.append((key, c))
                continue
            if group.status == "table" and group.rank == 0:
                continue  # trivial by table
            if key in group.names:
                coords[group.index(key)] += c
                continue
            raise StuckTerm(f"{key} does not reduce to a basis element of {group}", key)
        return Element(group, tuple(coords), tuple(residual))


def normalize(e: Expr | Term, db: Database, budget: int = DEFAULT_BUDGET) -> Element:
    return Normalizer(db, budget).element(e)


def normalize_traced(e: Expr | Term, db: Database, budget: int = DEFAULT_BUDGET) -> tuple[Element, list[RelationRecord]]:
    n = Normalizer(db, budget)
    el = n.element(e)
    seen: list[RelationRecord] = []
    for r in n.used:
        if r not in seen:
            seen.append(r)
    return el, seen


def _parse_chain(db: Database, text: str) -> tuple[Atom, ...]:
    p = Parser(text, db.gens)
    ch = p.chain()
    p.finish()
    return ch


def as_expr(el: Element, db: Database, target: int, source: int) -> Expr:
    """Re-read an element as a formal sum of chains."""
    terms: list[Term] = []
    for c, name in zip(el.coords, el.group.names):
        if c:
            terms.append(Term(c, _parse_chain(db, name)))
    for name, c in el.residual:
        terms.append(Term(c, _parse_chain(db, name)))
    return Expr(tuple(terms), target, source)


def canonical(el: Element, db: Database) -> Element:
    """Reduce residual coefficients, which element arithmetic leaves alone."""
    if not el.is_symbolic:
        return el
    e = as_expr(el, db, int(el.group.target.removeprefix("S^")), el.group.degree)
    return normalize(e, db) if e.terms else el.group.zero()


def sum_elements(items: Iterable[Element], group: GroupPresentation) -> Element:
    out = group.zero()
    for x in items:
        out = out + x
    return out
