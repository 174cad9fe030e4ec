"""Composition chains of suspended generators between spheres.

An :class:`Atom` is one map between spheres: a named Toda generator ``x_m``
(codomain ``S^m``), the identity ``iota_m``, the Whitehead square
``w_m = [iota_m, iota_m]``, a Whitehead product ``[a, b]`` of two chains, a
degree map ``[k]_m`` or the zero map. A :class:`Term` is ``c * (a1 o a2 o ...)``
where the scalar acts on the right, i.e. ``c*x = x o (c iota)``; that action is
a homomorphism for every ``x``. An :class:`Expr` is a formal sum of terms with
common source and target.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

__all__ = [
    "ComposabilityError",
    "SuspensionError",
    "GeneratorRecord",
    "Atom",
    "Term",
    "Expr",
    "gen_atom",
    "iota",
    "whitehead_square",
    "compose",
    "compose_expr",
    "suspend",
    "scalar_mul",
    "chain_key",
    "render_chain",
    "is_suspension",
]


class ComposabilityError(ValueError):
    pass


class SuspensionError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorRecord:
    """A named generator family ``x_n`` with ``x_n`` in pi_{n+stem}(S^n).

    ``order`` is the order of ``x_birth`` (so it bounds the order of every
    suspension); ``None`` means infinite and ``0`` means unknown.
    """

    name: str
    birth_sphere: int
    stem: int
    order: int | None
    citation: str = ""

    def __post_init__(self):
        if self.birth_sphere < 1:
            raise ValueError(f"birth sphere of {self.name} must be >= 1")
        if self.stem < 0:
            raise ValueError(f"stem of {self.name} must be >= 0")
        o = self.order
        if o is not None and o != 0 and (o < 1 or o & (o - 1)):
            raise ValueError(f"order of {self.name} must be a power of 2, inf or ?, got {o}")


@dataclass(frozen=True)
class Atom:
    kind: str  # gen | iota | w | wp | deg | zero
    sub: int  # codomain sphere
    dom: int  # domain sphere
    name: str = ""
    birth: int = 0
    scale: int = 1
    args: tuple[tuple["Atom", ...], ...] = ()

    @property
    def stem(self) -> int:
        return self.dom - self.sub

    @property
    def suspension(self) -> bool:
        """Syntactic desuspendability: a generator strictly above its birth sphere."""
        if self.kind == "gen":
            return self.sub > self.birth
        return self.kind in ("iota", "deg", "zero")

    def shifted(self, k: int) -> "Atom":
        if k == 0:
            return self
        if self.kind in ("w", "wp"):
            # Whitehead products lie in the kernel of suspension
            return Atom("zero", self.sub + k, self.dom + k)
        return replace(self, sub=self.sub + k, dom=self.dom + k)

    def render(self) -> str:
        if self.kind == "gen":
            return f"{self.name}_{self.sub}"
        if self.kind == "iota":
            return f"iota_{self.sub}"
        if self.kind == "w":
            return f"w_{self.sub}"
        if self.kind == "deg":
            return f"[{self.scale}]_{self.sub}"
        if self.kind == "zero":
            return "0"
        return "[" + render_chain(self.args[0]) + ", " + render_chain(self.args[1]) + "]"


def gen_atom(rec: GeneratorRecord, sub: int) -> Atom:
    if sub < rec.birth_sphere:
        raise ValueError(f"{rec.name}_{sub} is below the birth sphere {rec.birth_sphere}")
    return Atom("gen", sub, sub + rec.stem, rec.name, rec.birth_sphere)


def iota(m: int) -> Atom:
    return Atom("iota", m, m)


def whitehead_square(m: int) -> Atom:
    return Atom("w", m, 2 * m - 1)


def whitehead_product(a: Sequence[Atom], b: Sequence[Atom]) -> Atom:
    a, b = tuple(a), tuple(b)
    if a[0].sub != b[0].sub:
        raise ComposabilityError("Whitehead product of classes with different targets")
    return Atom("wp", a[0].sub, a[-1].dom + b[-1].dom - 1, args=(a, b))


def render_chain(chain: Sequence[Atom]) -> str:
    """Render a chain, folding Toda powers ``x_n o x_{n+k} o ...`` into ``x_n^p``."""
    out: list[str] = []
    i = 0
    chain = tuple(chain)
    while i < len(chain):
        a = chain[i]
        p = 1
        if a.kind == "gen" and a.stem > 0:
            while (
                i + p < len(chain)
                and chain[i + p].kind == "gen"
                and chain[i + p].name == a.name
                and chain[i + p].sub == a.sub + p * a.stem
            ):
                p += 1
        out.append(a.render() + (f"^{p}" if p > 1 else ""))
        i += p
    return ".".join(out)


def chain_key(chain: Sequence[Atom]) -> str:
    return render_chain(chain)


def is_suspension(chain: Sequence[Atom]) -> bool:
    return all(a.suspension for a in chain)


def _check_chain(chain: Sequence[Atom]):
    for x, y in zip(chain, chain[1:]):
        if x.dom != y.sub:
            raise ComposabilityError(
                f"{x.render()} has source S^{x.dom} but {y.render()} has target S^{y.sub}"
            )


@dataclass(frozen=True)
class Term:
    coef: int
    chain: tuple[Atom, ...]

    def __post_init__(self):
        if not self.chain:
            raise ValueError("a term needs at least one atom; use iota_m for the identity")
        _check_chain(self.chain)

    @property
    def target(self) -> int:
        return self.chain[0].sub

    @property
    def source(self) -> int:
        return self.chain[-1].dom

    @property
    def is_zero(self) -> bool:
        return self.coef == 0 or any(a.kind == "zero" for a in self.chain)

    @property
    def suspension(self) -> bool:
        return is_suspension(self.chain)

    @classmethod
    def zero(cls, target: int, source: int) -> "Term":
        return cls(0, (Atom("zero", target, source),))

    @classmethod
    def identity(cls, m: int, coef: int = 1) -> "Term":
        return cls(coef, (iota(m),))

    def render(self) -> str:
        if self.is_zero:
            return "0"
        body = render_chain(self.chain)
        return body if self.coef == 1 else f"{self.coef}*{body}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Expr:
    """A formal sum of terms sharing target and source spheres."""

    terms: tuple[Term, ...]
    target: int = field(default=0)
    source: int = field(default=0)

    def __post_init__(self):
        ts = tuple(t for t in self.terms if not t.is_zero)
        if self.terms:
            tgt, src = self.terms[0].target, self.terms[0].source
            for t in self.terms:
                if (t.target, t.source) != (tgt, src):
                    raise ComposabilityError(
                        f"cannot add {t.render()} to a class in [S^{src}, S^{tgt}]"
                    )
            object.__setattr__(self, "target", tgt)
            object.__setattr__(self, "source", src)
        object.__setattr__(self, "terms", ts)

    @classmethod
    def of(cls, *terms: Term) -> "Expr":
        return cls(tuple(terms))

    @classmethod
    def zero(cls, target: int, source: int) -> "Expr":
        return cls((), target, source)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def suspension(self) -> bool:
        return all(t.suspension for t in self.terms)

    def __add__(self, other: "Expr") -> "Expr":
        if (self.target, self.source) != (other.target, other.source):
            raise ComposabilityError(
                f"cannot add classes of [S^{self.source}, S^{self.target}] and "
                f"[S^{other.source}, S^{other.target}]"
            )
        return Expr(self.terms + other.terms, self.target, self.source)

    def __neg__(self) -> "Expr":
        return Expr(tuple(scalar_mul(-1, t) for t in self.terms), self.target, self.source)

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = self.terms[0].render()
        for t in self.terms[1:]:
            if t.coef < 0:
                out += " - " + scalar_mul(-1, t).render()
            else:
                out += " + " + t.render()
        return out

    def __str__(self) -> str:
        return self.render()


def scalar_mul(c: int, t: Term) -> Term:
    return Term(c * t.coef, t.chain)


def _strip(chain: Sequence[Atom]) -> tuple[Atom, ...]:
    core = tuple(a for a in chain if not (a.kind == "iota" or (a.kind == "deg" and a.scale == 1)))
    return core or (chain[0] if chain[0].kind == "iota" else iota(chain[0].sub),)


def compose(f: Term, g: Term) -> Term:
    """``f o g``.

    ``f o (d*g) = d*(f o g)`` always. ``(c*f) o g = c*(f o g)`` only when ``g``
    is a suspension; otherwise the scalar stays in the chain as ``[c]``.
    """
    if f.source != g.target:
        raise ComposabilityError(
            f"{f.render()} has source S^{f.source} but {g.render()} has target S^{g.target}"
        )
    if f.is_zero or g.is_zero:
        return Term.zero(f.target, g.source)
    if f.coef == 1 or g.suspension:
        return Term(f.coef * g.coef, _strip(f.chain + g.chain))
    deg = Atom("deg", f.source, f.source, scale=f.coef)
    return Term(g.coef, _strip(f.chain + (deg,) + g.chain))


def compose_expr(f: Expr, g: Expr) -> Expr:
    """Composite of formal sums.

    Post-composition always distributes; a sum on the left distributes over
    ``g`` only when ``g`` is a suspension.
    """
    if f.source != g.target:
        raise ComposabilityError(f"[{f.render()}] o [{g.render()}]: S^{f.source} != S^{g.target}")
    if f.is_zero or g.is_zero:
        return Expr.zero(f.target, g.source)
    if len(f.terms) > 1 and not g.suspension:
        raise ComposabilityError(
            f"({f.render()}) o ({g.render()}): a sum pre-composes additively only with a suspension"
        )
    out = [compose(a, b) for a in f.terms for b in g.terms]
    return Expr(tuple(out), f.target, g.source)


def suspend(t: Term, k: int) -> Term:
    """Apply ``Sigma^k``: every subscript rises by ``k``.

    Whitehead products go to zero, since they lie in the kernel of suspension.
    """
    if k < 0:
        raise SuspensionError("cannot desuspend")
    if k == 0:
        return t
    chain = tuple(a.shifted(k) for a in t.chain)
    return Term(t.coef, chain)


def suspend_expr(e: Expr, k: int) -> Expr:
    if k == 0:
        return e
    return Expr(tuple(suspend(t, k) for t in e.terms), e.target + k, e.source + k)


def expand_power(rec: GeneratorRecord, sub: int, p: int) -> tuple[Atom, ...]:
    return tuple(gen_atom(rec, sub + i * rec.stem) for i in range(p))


def lookup_atoms(gens: Mapping[str, GeneratorRecord], name: str, sub: int, power: int = 1) -> tuple[Atom, ...]:
    if name == "iota":
        return (iota(sub),) * 1
    if name == "w":
        if power != 1:
            raise ValueError("powers of w are not defined")
        return (whitehead_square(sub),)
    if name not in gens:
        raise KeyError(f"unknown generator {name!r}")
    return expand_power(gens[name], sub, power)


def terms_from(items: Iterable[tuple[int, Sequence[Atom]]]) -> Expr:
    return Expr(tuple(Term(c, tuple(ch)) for c, ch in items))
