"""Shared grammar for terms, matrices and bracket literals.

::

    expr   := ['-'] term (('+' | '-') term)*
    term   := [INT '*'] chain | '0'
    chain  := atom ('.' atom)*
    atom   := NAME '_' INT ['^' INT] | '[' INT ']_' INT | '[' chain ',' chain ']'
            | '0_' INT '^(' INT ')'
    matrix := '[' expr (',' expr)* (';' expr (',' expr)*)* ']'
    spec   := '{' matrix ';' matrix ';' matrix '}_' INT

``w_n`` is the Whitehead square [iota_n, iota_n]; ``x_n^p`` is the Toda power
``x_n o x_{n+k} o ... `` with ``p`` factors. ``0_m^(k)`` is the zero class of
pi_{m+k}(S^m), for zero matrix entries whose spheres cannot be inferred.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .terms import (
    Atom,
    ComposabilityError,
    Expr,
    GeneratorRecord,
    Term,
    lookup_atoms,
    whitehead_product,
)

__all__ = ["ParseError", "Parser", "parse_expr", "parse_term", "parse_chain"]


class ParseError(ValueError):
    def __init__(self, msg: str, text: str = "", col: int = 0):
        self.col = col
        self.text = text
        super().__init__(f"{msg} at column {col + 1}" + (f": {text!r}" if text else ""))


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<deg>\[(?P<dscale>-?\d+)\]_(?P<dsub>\d+))
  | (?P<atom>(?P<name>[A-Za-z][A-Za-z'\-]*)_(?P<sub>\d+)(?:\^(?P<pow>\d+))?)
  | (?P<zero>0_(?P<zsub>\d+)\^\((?P<zk>\d+)\))
  | (?P<specend>\}_(?P<index>\d+))
  | (?P<int>\d+)
  | (?P<sym>[.+\-*\[\],;{}])
  | (?P<other>\S)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    col: int
    groups: tuple = ()


def tokenize(text: str) -> list[Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        kind = m.lastgroup
        if m.group("ws"):
            pass
        elif m.group("deg"):
            out.append(Tok("deg", m.group(0), pos, (int(m.group("dscale")), int(m.group("dsub")))))
        elif m.group("atom"):
            p = m.group("pow")
            out.append(
                Tok("atom", m.group(0), pos, (m.group("name"), int(m.group("sub")), int(p) if p else 1))
            )
        elif m.group("zero"):
            out.append(Tok("zero", m.group(0), pos, (int(m.group("zsub")), int(m.group("zk")))))
        elif m.group("specend"):
            out.append(Tok("specend", m.group(0), pos, (int(m.group("index")),)))
        elif m.group("int"):
            out.append(Tok("int", m.group(0), pos, (int(m.group(0)),)))
        elif m.group("other"):
            out.append(Tok("other", m.group(0), pos))
        else:
            out.append(Tok("sym", m.group(0), pos))
        del kind
        pos = m.end()
    out.append(Tok("eof", "", len(text)))
    return out


class Parser:
    """Recursive-descent parser over one input string."""

    def __init__(self, text: str, gens: Mapping[str, GeneratorRecord]):
        self.text = text
        self.gens = gens
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, self.text, self.tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "sym" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            raise self.error(f"expected {text!r}")

    def at_end(self) -> bool:
        return self.tok.kind == "eof"

    def finish(self):
        if self.tok.kind == "other":
            raise self.error("unexpected character")
        if not self.at_end():
            raise self.error("trailing input")

    # grammar
    def atom(self) -> tuple[Atom, ...]:
        t = self.tok
        if t.kind == "atom":
            self.i += 1
            name, sub, p = t.groups
            try:
                return lookup_atoms(self.gens, name, sub, p)
            except (KeyError, ValueError) as exc:
                raise ParseError(str(exc).strip('"'), self.text, t.col) from None
        if t.kind == "zero":
            self.i += 1
            m, k = t.groups
            return (Atom("zero", m, m + k),)
        if t.kind == "deg":
            self.i += 1
            k, m = t.groups
            return (Atom("deg", m, m, scale=k),)
        if self.accept("["):
            a = self.chain()
            self.expect(",")
            b = self.chain()
            self.expect("]")
            try:
                return (whitehead_product(a, b),)
            except ComposabilityError as exc:
                raise ParseError(str(exc), self.text, t.col) from None
        if t.kind == "other":
            raise self.error("unexpected character")
        raise self.error("expected an atom")

    def chain(self) -> tuple[Atom, ...]:
        col = self.tok.col
        out = list(self.atom())
        while self.accept("."):
            out.extend(self.atom())
        for x, y in zip(out, out[1:]):
            if x.dom != y.sub:
                raise ParseError(
                    f"{x.render()} has source S^{x.dom} but {y.render()} has target S^{y.sub}",
                    self.text,
                    col,
                )
        return tuple(out)

    def term(self) -> Term | None:
        """A term, or ``None`` for a bare ``0``."""
        coef = 1
        if self.tok.kind == "int":
            coef = self.tok.groups[0]
            self.i += 1
            if not self.accept("*"):
                if coef == 0:
                    return None
                raise self.error("expected '*' after a coefficient")
        return Term(coef, self.chain())

    def expr(self) -> Expr | None:
        """A formal sum, or ``None`` when it is a bare zero without degree data."""
        sign = -1 if self.accept("-") else 1
        items: list[Term] = []
        t = self.term()
        if t is not None:
            items.append(Term(sign * t.coef, t.chain))
        while True:
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                break
            t = self.term()
            if t is not None:
                items.append(Term(sign * t.coef, t.chain))
        if not items:
            return None
        try:
            return Expr(tuple(items))
        except ComposabilityError as exc:
            raise self.error(str(exc)) from None

    def matrix(self) -> list[list[Expr | None]]:
        self.expect("[")
        rows: list[list[Expr | None]] = [[self.expr()]]
        while True:
            if self.accept(","):
                rows[-1].append(self.expr())
            elif self.accept(";"):
                rows.append([self.expr()])
            else:
                break
        self.expect("]")
        if len({len(r) for r in rows}) != 1:
            raise self.error("ragged matrix")
        return rows

    def spec(self) -> tuple[list, list, list, int]:
        self.expect("{")
        a = self.matrix()
        self.expect(";")
        b = self.matrix()
        self.expect(";")
        c = self.matrix()
        if self.tok.kind != "specend":
            raise self.error("expected '}_n'")
        n = self.tok.groups[0]
        self.i += 1
        return a, b, c, n


def parse_expr(text: str, gens: Mapping[str, GeneratorRecord]) -> Expr | None:
    p = Parser(text, gens)
    e = p.expr()
    p.finish()
    return e


def parse_term(text: str, gens: Mapping[str, GeneratorRecord]) -> Term | None:
    p = Parser(text, gens)
    t = p.term()
    p.finish()
    return t


def parse_chain(text: str, gens: Mapping[str, GeneratorRecord]) -> tuple[Atom, ...]:
    p = Parser(text, gens)
    c = p.chain()
    p.finish()
    return c
