"""The curated database of 2-local homotopy groups of spheres.

Text format, one record per line, ``#`` starts a comment::

    gen <name> <birth_sphere> <stem> <order|inf|?> <citation>
    group pi <N> S <m> basis <name:order ...|(none)> <citation>
    rel <lhs-chain> = <rhs-combination> min <m> <citation>
    ehp <m> <N> <E|H|P> <basis-name> -> <element> <citation>
    esurj <m> <N> <citation>

``ehp`` records encode the EHP sequence of the fibration over ``S^m``:
``E: pi_N(S^m) -> pi_{N+1}(S^{m+1})``, ``H: pi_{N+1}(S^{m+1}) -> pi_{N+1}(S^{2m+1})``
and ``P: pi_{N+2}(S^{2m+1}) -> pi_N(S^m)``. ``esurj m N`` states that
``E: pi_N(S^m) -> pi_{N+1}(S^{m+1})`` is onto. A relation whose right side
carries ``±`` is stored but never applied.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, TextIO

from .groups import BasisEntry, GroupPresentation
from .syntax import ParseError, Parser
from .terms import Expr, GeneratorRecord, Term, render_chain, suspend

__all__ = [
    "DatabaseError",
    "NotInDatabase",
    "GroupRecord",
    "RelationRecord",
    "EHPRecord",
    "Database",
    "load_database",
    "load_default",
    "dump_database",
    "lookup_group",
    "sphere_name",
]


class DatabaseError(ValueError):
    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line else msg)


class NotInDatabase(LookupError):
    pass


def sphere_name(m: int) -> str:
    return f"S^{m}"


def _fmt_order(o: int | None) -> str:
    return "inf" if o is None else ("?" if o == 0 else str(o))


@dataclass(frozen=True)
class GroupRecord:
    degree: int
    sphere: int
    basis: tuple[BasisEntry, ...]
    citation: str = ""
    opaque: frozenset[str] = frozenset()

    @property
    def stem(self) -> int:
        return self.degree - self.sphere

    def presentation(self) -> GroupPresentation:
        return GroupPresentation(self.degree, sphere_name(self.sphere), self.basis, self.citation, "table")


@dataclass(frozen=True)
class RelationRecord:
    lhs: Term
    rhs: Expr
    min_subscript: int
    citation: str = ""
    sign_unknown: bool = False

    def render(self) -> str:
        rhs = self.rhs.render()
        if self.sign_unknown:
            rhs = "±" + rhs
        return f"{self.lhs.render()} = {rhs}"


@dataclass(frozen=True)
class EHPRecord:
    m: int
    degree: int
    map: str  # E | H | P
    basis: str
    image: Expr
    citation: str = ""

    def source(self) -> tuple[int, int]:
        """(N, sphere) of the group holding ``basis``."""
        m, N = self.m, self.degree
        return {"E": (N, m), "H": (N + 1, m + 1), "P": (N + 2, 2 * m + 1)}[self.map]

    def target(self) -> tuple[int, int]:
        m, N = self.m, self.degree
        return {"E": (N + 1, m + 1), "H": (N + 1, 2 * m + 1), "P": (N, m)}[self.map]


@dataclass(frozen=True)
class Database:
    """Immutable collection of records; safe to share between threads."""

    gens: Mapping[str, GeneratorRecord] = field(default_factory=dict)
    groups: Mapping[tuple[int, int], GroupRecord] = field(default_factory=dict)
    relations: tuple[RelationRecord, ...] = ()
    ehp: tuple[EHPRecord, ...] = ()
    esurj: Mapping[tuple[int, int], str] = field(default_factory=dict)

    def __post_init__(self):
        for k in ("gens", "groups", "esurj"):
            object.__setattr__(self, k, MappingProxyType(dict(getattr(self, k))))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Database):
            return NotImplemented
        return (
            dict(self.gens) == dict(other.gens)
            and dict(self.groups) == dict(other.groups)
            and self.relations == other.relations
            and self.ehp == other.ehp
            and dict(self.esurj) == dict(other.esurj)
        )

    def __hash__(self) -> int:
        return hash((len(self.gens), len(self.groups), self.relations, self.ehp))

    @property
    def is_empty(self) -> bool:
        return not (self.gens or self.groups or self.relations or self.ehp or self.esurj)

    @cached_property
    def rules(self) -> tuple[RelationRecord, ...]:
        """Stored relations followed by those read off E records.

        ``E(b) = y`` at node (m, N) says ``Sigma b = y`` from S^{m+1} on.
        """
        out = list(self.relations)
        for r in self.ehp:
            if r.map != "E":
                continue
            try:
                chain = Parser(r.basis, self.gens).chain()
            except (ParseError, KeyError):
                continue
            if any(a.kind in ("iota", "w", "wp") for a in chain):
                continue
            lhs = suspend(Term(1, chain), 1)
            out.append(RelationRecord(lhs, r.image, r.m + 1, r.citation))
        return tuple(out)

    def group(self, N: int, target) -> GroupPresentation:
        return lookup_group(self, N, target)

    def parse(self, text: str) -> Expr | None:
        p = Parser(text, self.gens)
        e = p.expr()
        p.finish()
        return e

    def ehp_records(self, m: int, N: int, which: str) -> tuple[EHPRecord, ...]:
        return tuple(r for r in self.ehp if (r.m, r.degree, r.map) == (m, N, which))

    def has_ehp(self, m: int, N: int, which: str) -> bool:
        return bool(self.ehp_records(m, N, which))

    def replace(self, **kw) -> "Database":
        d = dict(
            gens=self.gens,
            groups=self.groups,
            relations=self.relations,
            ehp=self.ehp,
            esurj=self.esurj,
        )
        d.update(kw)
        return Database(**d)


def lookup_group(db: Database, N: int, target) -> GroupPresentation:
    """pi_N of a sphere (int) or wedge.

    Below the bottom cell the group is trivial by connectivity; pi_m(S^m) is
    Z_(2) on ``iota_m``. Anything else must be stored.
    """
    if hasattr(target, "summands"):
        from .wedge import wedge_group

        if len(target.summands) == 1:
            return lookup_group(db, N, target.summands[0])
        return wedge_group(db, N, target)
    m = int(target)
    if N < m:
        return GroupPresentation(N, sphere_name(m), (), "connectivity", "connectivity")
    if N == m:
        return GroupPresentation(N, sphere_name(m), (BasisEntry(f"iota_{m}", None),), "degree", "stem0")
    rec = db.groups.get((N, m))
    if rec is None:
        raise NotInDatabase(f"pi_{N}(S^{m}) is not in database")
    return rec.presentation()


def unlisted_group(N: int, m: int) -> GroupPresentation:
    return GroupPresentation(N, sphere_name(m), (), "not in database", "unlisted")


def group_or_unlisted(db: Database, N: int, m: int) -> GroupPresentation:
    try:
        return lookup_group(db, N, m)
    except NotInDatabase:
        return unlisted_group(N, m)


# --- loading -----------------------------------------------------------------

_ORDER = re.compile(r"^(?P<name>.+):(?P<order>\d+|inf)$")


def _order(text: str, line: int) -> int | None:
    if text == "inf":
        return None
    if text == "?":
        return 0
    try:
        return int(text)
    except ValueError:
        raise DatabaseError(f"bad order {text!r}", line) from None


def _parse_expr_prefix(text: str, gens, line: int) -> tuple[Expr | None, str]:
    """Parse a leading expression; the remainder is the citation."""
    p = Parser(text, gens)
    try:
        e = p.expr()
    except ParseError as exc:
        raise DatabaseError(str(exc), line) from None
    return e, text[p.tok.col:].strip()


def _lines(source: str | TextIO | Iterable[str]) -> list[str]:
    if isinstance(source, str):
        return source.splitlines()
    return [ln.rstrip("\n") for ln in source]


def load_database(source: str | TextIO | Iterable[str]) -> Database:
    """Parse the text format into a :class:`Database`."""
    lines = _lines(source)
    gens: dict[str, GeneratorRecord] = {}
    rest: list[tuple[int, str, str]] = []
    for no, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip() if not raw.lstrip().startswith("#") else ""
        if not text:
            continue
        kind, _, body = text.partition(" ")
        if kind == "gen":
            parts = body.split(None, 4)
            if len(parts) < 4:
                raise DatabaseError("gen needs name, birth sphere, stem, order", no)
            name = parts[0]
            if name in gens or name in ("iota", "w"):
                raise DatabaseError(f"duplicate generator {name!r}", no)
            try:
                gens[name] = GeneratorRecord(
                    name, int(parts[1]), int(parts[2]), _order(parts[3], no), parts[4] if len(parts) > 4 else ""
                )
            except ValueError as exc:
                raise DatabaseError(str(exc), no) from None
        elif kind in ("group", "rel", "ehp", "esurj"):
            rest.append((no, kind, body))
        else:
            raise DatabaseError(f"unknown record kind {kind!r}", no)

    groups: dict[tuple[int, int], GroupRecord] = {}
    relations: list[RelationRecord] = []
    ehp: list[EHPRecord] = []
    esurj: dict[tuple[int, int], str] = {}
    for no, kind, body in rest:
        if kind == "group":
            groups_add(groups, _parse_group(body, gens, no), no)
        elif kind == "rel":
            relations.append(_parse_rel(body, gens, no))
        elif kind == "ehp":
            ehp.append(_parse_ehp(body, gens, no))
        else:
            parts = body.split(None, 2)
            try:
                key = (int(parts[1]), int(parts[0]))
            except (ValueError, IndexError):
                raise DatabaseError("esurj needs m and N", no) from None
            esurj[key] = parts[2] if len(parts) > 2 else ""
    return Database(gens, groups, tuple(relations), tuple(ehp), esurj)


def groups_add(groups, rec: GroupRecord, no: int):
    key = (rec.degree, rec.sphere)
    if key in groups:
        raise DatabaseError(f"duplicate group pi_{rec.degree}(S^{rec.sphere})", no)
    groups[key] = rec


_GROUP = re.compile(r"^pi\s+(?P<N>\d+)\s+S\s*(?P<m>\d+)\s+basis\s+(?P<rest>.*)$")


def _parse_group(body: str, gens, no: int) -> GroupRecord:
    m = _GROUP.match(body)
    if not m:
        raise DatabaseError("expected 'group pi <N> S <m> basis ...'", no)
    N, sph = int(m.group("N")), int(m.group("m"))
    toks = m.group("rest").split()
    basis: list[BasisEntry] = []
    opaque = set()
    i = 0
    if toks and toks[0] == "(none)":
        i = 1
    else:
        while i < len(toks) and _ORDER.match(toks[i]):
            mm = _ORDER.match(toks[i])
            name = mm.group("name")
            try:
                p = Parser(name, gens)
                chain = p.chain()
                p.finish()
            except ParseError:
                opaque.add(name)
            else:
                if chain[0].sub != sph or chain[-1].dom != N:
                    raise DatabaseError(f"basis element {name} is not in pi_{N}(S^{sph})", no)
                name = render_chain(chain)
            try:
                basis.append(BasisEntry(name, _order(mm.group("order"), no)))
            except ValueError as exc:
                raise DatabaseError(str(exc), no) from None
            i += 1
    if len({b.name for b in basis}) != len(basis):
        raise DatabaseError("duplicate basis name", no)
    return GroupRecord(N, sph, tuple(basis), " ".join(toks[i:]), frozenset(opaque))


_MIN = re.compile(r"\smin\s+(\d+)(?:\s+|$)")


def _parse_rel(body: str, gens, no: int) -> RelationRecord:
    lhs_text, eq, rhs_text = body.partition("=")
    if not eq:
        raise DatabaseError("relation needs '='", no)
    mm = _MIN.search(" " + rhs_text)
    if not mm:
        raise DatabaseError("relation needs 'min <m>'", no)
    rhs_part = (" " + rhs_text)[: mm.start()].strip()
    citation = (" " + rhs_text)[mm.end():].strip()
    minsub = int(mm.group(1))
    sign_unknown = "±" in rhs_part
    rhs_part = rhs_part.replace("±", "")
    try:
        p = Parser(lhs_text.strip(), gens)
        lhs = p.term()
        p.finish()
        p = Parser(rhs_part, gens)
        rhs = p.expr()
        p.finish()
    except ParseError as exc:
        raise DatabaseError(str(exc), no) from None
    except KeyError as exc:
        raise DatabaseError(f"relation references unknown generator: {exc}", no) from None
    if lhs is None:
        raise DatabaseError("relation lhs cannot be 0", no)
    if rhs is None:
        rhs = Expr.zero(lhs.target, lhs.source)
    if (rhs.target, rhs.source) != (lhs.target, lhs.source):
        raise DatabaseError(
            f"relation sides live in different groups: [S^{lhs.source}, S^{lhs.target}] vs "
            f"[S^{rhs.source}, S^{rhs.target}]",
            no,
        )
    if lhs.target != minsub:
        raise DatabaseError(f"relation lhs must be written at its min subscript {minsub}", no)
    return RelationRecord(lhs, rhs, minsub, citation, sign_unknown)


_EHP = re.compile(r"^(?P<m>\d+)\s+(?P<N>\d+)\s+(?P<map>[EHP])\s+(?P<basis>\S+)\s+->\s+(?P<rest>.*)$")


def _parse_ehp(body: str, gens, no: int) -> EHPRecord:
    mm = _EHP.match(body)
    if not mm:
        raise DatabaseError("expected 'ehp <m> <N> <E|H|P> <basis> -> <element>'", no)
    m, N, which = int(mm.group("m")), int(mm.group("N")), mm.group("map")
    rec0 = EHPRecord(m, N, which, mm.group("basis"), Expr.zero(0, 0))
    tN, tm = rec0.target()
    img, cit = _parse_expr_prefix(mm.group("rest"), gens, no)
    if img is None:
        img = Expr.zero(tm, tN)
    if (img.target, img.source) != (tm, tN):
        raise DatabaseError(f"{which} image {img.render()} is not in pi_{tN}(S^{tm})", no)
    basis = mm.group("basis")
    try:
        p = Parser(basis, gens)
        ch = p.chain()
        p.finish()
        basis = render_chain(ch)
    except ParseError:
        pass
    return EHPRecord(m, N, which, basis, img, cit)


def dump_database(db: Database) -> str:
    out = []
    for g in db.gens.values():
        out.append(f"gen {g.name} {g.birth_sphere} {g.stem} {_fmt_order(g.order)} {g.citation}".rstrip())
    for (N, m), g in db.groups.items():
        basis = " ".join(f"{b.name}:{_fmt_order(b.order)}" for b in g.basis) or "(none)"
        out.append(f"group pi {N} S {m} basis {basis} {g.citation}".rstrip())
    for r in db.relations:
        out.append(f"rel {r.render()} min {r.min_subscript} {r.citation}".rstrip())
    for e in db.ehp:
        out.append(f"ehp {e.m} {e.degree} {e.map} {e.basis} -> {e.image.render()} {e.citation}".rstrip())
    for (N, m), cit in db.esurj.items():
        out.append(f"esurj {m} {N} {cit}".rstrip())
    return "\n".join(out) + ("\n" if out else "")


DEFAULT_DB = "toda2.db"


def default_path() -> Path:
    return Path(str(resources.files("todacalc") / "data" / DEFAULT_DB))


def load_default() -> Database:
    with open(default_path(), encoding="utf-8") as fh:
        return load_database(fh)
