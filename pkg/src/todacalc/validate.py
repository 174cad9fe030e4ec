"""Consistency checks for a database, and a mutation pool to test them.

Exactness is checked at three positions around each stored EHP node:

    A  im P(m,N)  = ker E(m,N)     in pi_N(S^m)
    B  im E(m,N)  = ker H(m,N)     in pi_{N+1}(S^{m+1})
    C  im H(m,N)  = ker P(m,N-1)   in pi_{N+1}(S^{2m+1})

A position is skipped when either map is not determined by the data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from .database import Database, EHPRecord, GroupRecord, NotInDatabase, lookup_group
from .ehp import EHPNode, sphere
from .groups import BasisEntry, v2
from .rewrite import Normalizer, StuckTerm, chain_order
from .syntax import Parser
from .terms import Expr, Term, compose_expr, suspend

__all__ = ["Finding", "ValidationReport", "validate_database", "Mutation", "mutation_pool", "mutation_sample"]


@dataclass(frozen=True)
class Finding:
    kind: str
    where: str
    message: str

    def render(self) -> str:
        return f"[{self.kind}] {self.where}: {self.message}"


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)
    checked: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, kind: str, where: str, message: str):
        self.findings.append(Finding(kind, where, message))

    def nodes(self, kind: str | None = None) -> set[str]:
        return {f.where for f in self.findings if kind is None or f.kind == kind}

    def render(self, verbose: bool = False) -> str:
        lines = [f.render() for f in self.findings]
        if verbose:
            lines += [f"checked {c}" for c in self.checked]
            lines += [f"skipped {s}" for s in self.skipped]
        lines.append(
            ("PASS" if self.ok else "FAIL")
            + f": {len(self.checked)} checks, {len(self.findings)} failures, {len(self.skipped)} skipped"
        )
        return "\n".join(lines)


def _exactness(db: Database, rep: ValidationReport, m: int, N: int):
    node = EHPNode(db, m, N)
    prev = EHPNode(db, m, N - 1)
    where = f"node (m={m}, N={N})"
    for pos, first, second in (
        ("A", node.hom("P"), node.hom("E")),
        ("B", node.hom("E"), node.hom("H")),
        ("C", node.hom("H"), prev.hom("P") if N > m else None),
    ):
        label = f"{where} position {pos}"
        if first is None or second is None:
            rep.skipped.append(label)
            continue
        rep.checked.append(label)
        im, ker = first.image(), second.kernel()
        try:
            same = im == ker
        except ValueError:
            rep.skipped.append(label + " (symbolic group)")
            continue
        if not same:
            rep.add("exactness", where, f"position {pos}: image {im.render()} != kernel {ker.render()}")


def _order_defects(db: Database, rep: ValidationReport, m: int, N: int):
    node = EHPNode(db, m, N)
    for which in "EHP":
        h = node.hom(which)
        if h is None:
            continue
        for d in h.order_defects():
            rep.add("order", f"node (m={m}, N={N})", f"{which}: {d}")


def _chain(db: Database, name: str):
    p = Parser(name, db.gens)
    ch = p.chain()
    p.finish()
    return ch


def _e_records(db: Database, rep: ValidationReport):
    """Each stored E image must agree with suspending and normalizing without it."""
    for r in db.ehp:
        if r.map != "E":
            continue
        where = f"node (m={r.m}, N={r.degree})"
        try:
            chain = _chain(db, r.basis)
        except Exception:
            continue
        # drop the record, and with it the rule it induces
        norm = Normalizer(db.replace(ehp=tuple(x for x in db.ehp if x is not r)))
        rep.checked.append(f"{where} E record {r.basis}")
        try:
            got = norm.element(suspend(Term(1, chain), 1))
            want = Normalizer(db).element(r.image)
        except StuckTerm:
            continue
        if got.is_symbolic or want.is_symbolic:
            continue
        if got != want:
            rep.add("suspension", where, f"E({r.basis}) is {want.render()} but suspending gives {got.render()}")


def _h_prefix(db: Database, rep: ValidationReport):
    """``H(a o Sigma b) = H(a) o Sigma b``: a stored H image of a composite must follow from its prefix."""
    for r in db.ehp:
        if r.map != "H":
            continue
        where = f"node (m={r.m}, N={r.degree})"
        chain = _chain(db, r.basis)
        for i in range(1, len(chain)):
            head, tail = chain[:i], chain[i:]
            if not all(a.suspension for a in tail):
                continue
            N0 = head[-1].dom - 1
            hh = [x for x in db.ehp_records(r.m, N0, "H") if x.basis == Term(1, head).render()]
            if not hh:
                continue
            rep.checked.append(f"{where} H prefix {hh[0].basis}")
            tail_e = Expr.of(Term(1, tail))
            norm = Normalizer(db)
            try:
                want = norm.element(compose_expr(hh[0].image, tail_e)) if hh[0].image.terms else None
                got = norm.element(r.image)
            except StuckTerm:
                continue
            want = want if want is not None else got.group.zero()
            if want.is_symbolic or got.is_symbolic:
                continue
            if want != got:
                rep.add("hopf", where, f"H({r.basis}) is {got.render()} but H({hh[0].basis}) o {tail_e.render()} = {want.render()}")
            break


def _order_bound(db: Database, chain) -> int | None:
    """An order the chain's class must divide, from atoms and from stored tails."""
    best = chain_order(db, chain)
    norm = Normalizer(db)
    for i in range(1, len(chain)):
        tail = chain[i:]
        try:
            el = norm.element(Term(1, tail))
        except (StuckTerm, NotInDatabase):
            continue
        if el.is_symbolic:
            continue
        o = el.order()
        if o is not None:
            best = o if best is None else min(best, o)
    return best


def _basis_orders(db: Database, rep: ValidationReport):
    for (N, m), g in sorted(db.groups.items()):
        where = f"pi_{N}(S^{m})"
        for b in g.basis:
            if b.name in g.opaque or b.order is None:
                continue
            try:
                chain = _chain(db, b.name)
            except Exception:
                continue
            bound = _order_bound(db, chain)
            if bound is not None and bound % b.order:
                rep.add("order", where, f"{b.name} has stored order {b.order}, which does not divide {bound}")


def _stable(db: Database, rep: ValidationReport):
    """Freudenthal: pi_N(S^m) = pi_{N+1}(S^{m+1}) when N < 2m - 1."""
    for (N, m), g in sorted(db.groups.items()):
        if N >= 2 * m - 1 or (N + 1, m + 1) not in db.groups:
            continue
        h = db.groups[(N + 1, m + 1)]
        key = lambda r: sorted((o or 0) for o in (b.order for b in r.basis))
        rep.checked.append(f"stable pi_{N}(S^{m}) -> pi_{N + 1}(S^{m + 1})")
        if key(g) != key(h):
            rep.add(
                "stable",
                f"pi_{N}(S^{m})",
                f"orders {g.presentation().shape()} differ from pi_{N + 1}(S^{m + 1}) = {h.presentation().shape()}",
            )


def _relations(db: Database, rep: ValidationReport):
    for r in db.relations:
        if r.rhs.terms and (r.rhs.target, r.rhs.source) != (r.lhs.target, r.lhs.source):
            rep.add("degree", r.render(), "sides live in different groups")
        if r.lhs.target != r.min_subscript:
            rep.add("degree", r.render(), f"lhs is not at its minimal subscript {r.min_subscript}")


def _nodes(db: Database) -> list[tuple[int, int]]:
    out = set()
    for r in db.ehp:
        out.update({(r.m, r.degree), (r.m, r.degree + 1)})
    return sorted(out)


def validate_database(db: Database) -> ValidationReport:
    rep = ValidationReport()
    for m, N in _nodes(db):
        _exactness(db, rep, m, N)
        _order_defects(db, rep, m, N)
    _e_records(db, rep)
    _h_prefix(db, rep)
    _basis_orders(db, rep)
    _stable(db, rep)
    _relations(db, rep)
    return rep


# mutations


@dataclass(frozen=True)
class Mutation:
    description: str
    db: Database


def _alternatives(db: Database, r: EHPRecord) -> list[Expr]:
    N, s = r.target()
    try:
        tgt = lookup_group(db, N, s)
    except NotInDatabase:
        return []
    if tgt.rank != 1:
        return []
    orig = Normalizer(db).element(r.image).coords[0]
    o = tgt.orders[0]
    chain = _chain(db, tgt.names[0])
    if o is None:
        # odd multiples generate the same subgroup 2-locally
        ks = [k for k in range(-8, 9) if k != orig and not (k and orig and v2(k) == v2(orig))]
    else:
        ks = [k for k in range(o) if k != orig]
    out = []
    for k in ks:
        out.append(Expr.of(Term(k, chain)) if k else Expr.zero(sphere(tgt), N))
    return out


def _ehp_related(db: Database) -> set[tuple[int, int]]:
    keys = set()
    for r in db.ehp:
        keys.add(r.source())
        keys.add(r.target())
    return {k for k in keys if k in db.groups}


def mutation_pool(db: Database) -> list[Mutation]:
    """Single-record corruptions the validator should detect.

    EHP images are replaced by other elements of a cyclic target; free targets
    skip odd multiples of the original. Group orders are doubled, or halved
    for stable groups of order at least 4.
    """
    pool: list[Mutation] = []
    for i, r in enumerate(db.ehp):
        for alt in _alternatives(db, r):
            ehp = db.ehp[:i] + (replace(r, image=alt),) + db.ehp[i + 1:]
            pool.append(Mutation(f"{r.map}({r.basis}) at (m={r.m}, N={r.degree}) -> {alt.render()}", db.replace(ehp=ehp)))
    related = _ehp_related(db)
    for key, g in sorted(db.groups.items()):
        N, m = key
        stable = N < 2 * m - 1
        if not (stable or key in related):
            continue
        for j, b in enumerate(g.basis):
            if b.order is None or b.name in g.opaque:
                continue
            factors = [2] + ([0.5] if stable and b.order >= 4 else [])
            for f in factors:
                new = BasisEntry(b.name, int(b.order * f))
                basis = g.basis[:j] + (new,) + g.basis[j + 1:]
                groups = dict(db.groups)
                groups[key] = GroupRecord(g.degree, g.sphere, basis, g.citation, g.opaque)
                pool.append(Mutation(f"order of {b.name} in pi_{N}(S^{m}) -> {new.order}", db.replace(groups=groups)))
    return pool


def mutation_sample(db: Database, k: int = 50, seed: int = 0) -> list[Mutation]:
    """``k`` mutations, half from EHP images and half from group orders when possible."""
    pool = mutation_pool(db)
    ehp = [x for x in pool if not x.description.startswith("order")]
    grp = [x for x in pool if x.description.startswith("order")]
    rng = random.Random(seed)
    a = min(len(ehp), k // 2)
    picked = rng.sample(ehp, a) + rng.sample(grp, min(len(grp), k - a))
    return picked
