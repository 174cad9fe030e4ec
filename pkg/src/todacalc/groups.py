"""2-local finitely generated abelian groups, their elements and subgroups.

A group is presented by an ordered basis of cyclic summands, each of order
``2**j`` or infinite (``None``, a free Z_(2) summand). Subgroups are kept in a
canonical Hermite-style echelon form over the 2-local integers, so two
subgroups are equal exactly when their canonical forms are equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "AmbientMismatch",
    "BasisEntry",
    "GroupPresentation",
    "Element",
    "Subgroup",
    "v2",
    "span",
    "member",
    "subgroup_sum",
    "subgroup_equal",
    "is_subgroup",
    "Hom",
    "Coset",
]


class AmbientMismatch(ValueError):
    """Raised when elements or subgroups of different groups are combined."""


def v2(x: Fraction | int) -> int:
    """2-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("v2(0) is infinite")
    n, d = x.numerator, x.denominator
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    while d % 2 == 0:
        d //= 2
        v -= 1
    return v


def _mod_pow2(x: Fraction, k: int) -> int:
    """Integer representative in [0, 2**k) of a 2-local rational."""
    m = 1 << k
    if x.denominator % 2 == 0:
        raise ValueError(f"{x} is not 2-local integral")
    return (x.numerator * pow(x.denominator, -1, m)) % m


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class BasisEntry:
    name: str
    order: int | None  # None: infinite cyclic (free Z_(2))

    def __post_init__(self):
        if self.order is not None and not _is_pow2(self.order):
            raise ValueError(f"order of {self.name} must be a power of 2, got {self.order}")


@dataclass(frozen=True)
class GroupPresentation:
    """The group ``pi_N`` of a sphere or wedge, with a named cyclic basis.

    ``status`` records how the presentation was obtained: ``table`` (stored
    record), ``connectivity`` (trivial because N is below the bottom cell),
    ``stem0`` (pi_n S^n), ``wedge`` (assembled from summands) or ``unlisted``
    (not in the database; only symbolic elements are available).
    """

    degree: int
    target: str
    basis: tuple[BasisEntry, ...] = ()
    citation: str = ""
    status: str = "table"

    @property
    def orders(self) -> tuple[int | None, ...]:
        return tuple(b.order for b in self.basis)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(b.name for b in self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_trivial(self) -> bool:
        return self.status != "unlisted" and not self.basis

    @property
    def is_finite(self) -> bool:
        return all(o is not None for o in self.orders)

    @property
    def order(self) -> int | None:
        if not self.is_finite:
            return None
        out = 1
        for o in self.orders:
            out *= o
        return out

    def index(self, name: str) -> int:
        return self.names.index(name)

    def zero(self) -> Element:
        return Element(self, (0,) * self.rank)

    def gen(self, i: int | str) -> Element:
        if isinstance(i, str):
            i = self.index(i)
        coords = [0] * self.rank
        coords[i] = 1
        return Element(self, tuple(coords))

    def element(self, coords: Sequence[int]) -> Element:
        return Element(self, tuple(coords))

    def shape(self) -> str:
        if self.status == "unlisted":
            return "?"
        if not self.basis:
            return "0"
        parts = []
        for o in self.orders:
            parts.append("Z_(2)" if o is None else f"Z/{o}")
        return " + ".join(parts)

    def whole(self) -> Subgroup:
        return span(self, [self.gen(i) for i in range(self.rank)])

    def same_group(self, other: GroupPresentation) -> bool:
        return (self.degree, self.target, self.basis) == (other.degree, other.target, other.basis)

    def __str__(self) -> str:
        return f"pi_{self.degree}({self.target})"


def _reduce(coords: Iterable[int], orders: Sequence[int | None]) -> tuple[int, ...]:
    return tuple(c if o is None else c % o for c, o in zip(coords, orders))


@dataclass(frozen=True)
class Element:
    """An element of a presented group.

    For ``unlisted`` groups the element is carried symbolically in
    ``residual``: a sorted tuple of ``(chain text, coefficient)`` pairs of
    irreducible composition chains. Syntactic equality of residuals is a
    sufficient, not a necessary, condition for equality.
    """

    group: GroupPresentation
    coords: tuple[int, ...]
    residual: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if len(self.coords) != self.group.rank:
            raise ValueError(
                f"{len(self.coords)} coordinates for a group of rank {self.group.rank}"
            )
        object.__setattr__(self, "coords", _reduce(self.coords, self.group.orders))
        object.__setattr__(
            self, "residual", tuple(sorted((k, c) for k, c in self.residual if c != 0))
        )

    @property
    def is_zero(self) -> bool:
        return not any(self.coords) and not self.residual

    @property
    def is_symbolic(self) -> bool:
        return bool(self.residual)

    def _check(self, other: Element):
        if not self.group.same_group(other.group):
            raise AmbientMismatch(f"{self.group} vs {other.group}")

    def __add__(self, other: Element) -> Element:
        self._check(other)
        res = dict(self.residual)
        for k, c in other.residual:
            res[k] = res.get(k, 0) + c
        return Element(
            self.group,
            tuple(a + b for a, b in zip(self.coords, other.coords)),
            tuple(res.items()),
        )

    def __neg__(self) -> Element:
        return Element(
            self.group, tuple(-c for c in self.coords), tuple((k, -c) for k, c in self.residual)
        )

    def __sub__(self, other: Element) -> Element:
        return self + (-other)

    def __rmul__(self, k: int) -> Element:
        return Element(
            self.group, tuple(k * c for c in self.coords), tuple((n, k * c) for n, c in self.residual)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return (
            self.group.same_group(other.group)
            and self.coords == other.coords
            and self.residual == other.residual
        )

    def __hash__(self) -> int:
        return hash((self.group.degree, self.group.target, self.coords, self.residual))

    def order(self) -> int | None:
        if self.residual:
            raise ValueError("order of a symbolic element is not determined")
        out = 1
        for c, o in zip(self.coords, self.group.orders):
            if c == 0:
                continue
            if o is None:
                return None
            out = max(out, o // gcd(c, o))
        return out

    def render(self) -> str:
        parts: list[str] = []
        for c, b in zip(self.coords, self.group.basis):
            if c == 0:
                continue
            parts.append(b.name if c == 1 else f"{c}*{b.name}")
        for k, c in self.residual:
            parts.append(k if c == 1 else f"{c}*{k}")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.render()


def _echelon(rows: list[list[Fraction]], orders: Sequence[int | None]) -> tuple[tuple[Fraction, ...], ...]:
    """Canonical echelon form of a Z_(2)-lattice containing the order relations."""
    n = len(orders)
    rows = [list(r) for r in rows]
    for j, o in enumerate(orders):
        if o is not None:
            r = [Fraction(0)] * n
            r[j] = Fraction(o)
            rows.append(r)
    pivots: list[tuple[int, list[Fraction]]] = []
    remaining = [r for r in rows if any(r)]
    for j in range(n):
        cands = [r for r in remaining if r[j] != 0]
        if not cands:
            continue
        piv = min(cands, key=lambda r: v2(r[j]))
        remaining = [r for r in remaining if r is not piv]
        v = v2(piv[j])
        unit = piv[j] / Fraction(2) ** v
        piv = [x / unit for x in piv]
        p = piv[j]
        nxt = []
        for r in remaining:
            if r[j] != 0:
                q = r[j] / p
                r = [a - q * b for a, b in zip(r, piv)]
            if any(r):
                nxt.append(r)
        remaining = nxt
        pivots.append((j, piv))
    # reduce entries above each pivot into [0, pivot)
    for idx, (j, piv) in enumerate(pivots):
        v = v2(piv[j])
        for k in range(idx):
            jj, r = pivots[k]
            e = r[j]
            if e == 0:
                continue
            rem = _mod_pow2(e, v)
            q = (e - rem) / piv[j]
            pivots[k] = (jj, [a - q * b for a, b in zip(r, piv)])
    return tuple(tuple(r) for _, r in pivots)


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a presented group, stored with its canonical form."""

    ambient: GroupPresentation
    generators: tuple[Element, ...]
    canonical: tuple[tuple[Fraction, ...], ...] = field(default=(), compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return subgroup_equal(self, other)

    def __hash__(self) -> int:
        return hash((self.ambient.degree, self.ambient.target, self.canonical))

    @property
    def is_symbolic(self) -> bool:
        return self.ambient.status == "unlisted"

    @property
    def is_trivial(self) -> bool:
        return not self.basis()

    def basis(self) -> tuple[Element, ...]:
        """Canonical generating set: echelon rows reduced into the ambient group."""
        if self.is_symbolic:
            return tuple(g for g in self.generators if not g.is_zero)
        out = []
        for row in self.canonical:
            coords = []
            for x, o in zip(row, self.ambient.orders):
                if o is None:
                    if x.denominator != 1:
                        raise ValueError("free coordinate needs a Z_(2) rescaling to be integral")
                    coords.append(int(x))
                else:
                    coords.append(_mod_pow2(x, o.bit_length() - 1))
            e = Element(self.ambient, tuple(coords))
            if not e.is_zero:
                out.append(e)
        return tuple(out)

    def order(self) -> int | None:
        if self.is_symbolic:
            if self.basis():
                raise ValueError("order of a symbolic subgroup is not determined")
            return 1
        orders = self.ambient.orders
        total = 1
        for row in self.canonical:
            j = next(i for i, x in enumerate(row) if x != 0)
            if orders[j] is None:
                return None
            total *= Fraction(orders[j]) / row[j]
        return int(total)

    def invariants(self) -> tuple[int, ...]:
        """Cyclic orders of the subgroup's decomposition, descending."""
        if self.order() is None:
            raise ValueError("invariants only implemented for finite subgroups")
        sizes = []
        gens = list(self.basis())
        k = 1
        while True:
            sz = span(self.ambient, [k * g for g in gens]).order()
            sizes.append(sz)
            if sz == 1:
                break
            k *= 2
        out: list[int] = []
        # cyclic factors of order >= 2**(j+1) number log2(|2^j H| / |2^{j+1} H|)
        counts = [(sizes[j] // sizes[j + 1]).bit_length() - 1 for j in range(len(sizes) - 1)]
        for j in range(len(counts)):
            exact = counts[j] - (counts[j + 1] if j + 1 < len(counts) else 0)
            out.extend([2 ** (j + 1)] * exact)
        return tuple(sorted(out, reverse=True))

    def shape(self) -> str:
        if self.is_symbolic:
            return "0" if not self.basis() else "?"
        if self.order() is None:
            return "infinite"
        inv = self.invariants()
        if not inv:
            return "0"
        return " + ".join(f"Z/{o}" for o in inv)

    def reduce(self, x: Element) -> Element:
        """Canonical representative of the coset ``x + self``."""
        if not x.group.same_group(self.ambient):
            raise AmbientMismatch(f"{x.group} vs {self.ambient}")
        if self.is_symbolic:
            return x
        v = [Fraction(c) for c in x.coords]
        for row in self.canonical:
            j = next(i for i, e in enumerate(row) if e != 0)
            k = v2(row[j])
            rem = _mod_pow2(v[j], k) if k >= 0 else 0
            q = (v[j] - rem) / row[j]
            v = [a - q * b for a, b in zip(v, row)]
        return Element(self.ambient, tuple(_to_int(c, o) for c, o in zip(v, self.ambient.orders)))

    def render(self) -> str:
        return "{" + ", ".join(e.render() for e in self.basis()) + "}" if self.basis() else "{0}"

    def __str__(self) -> str:
        return self.render()


def span(ambient: GroupPresentation, elements: Iterable[Element]) -> Subgroup:
    elements = tuple(elements)
    for e in elements:
        if not e.group.same_group(ambient):
            raise AmbientMismatch(f"element of {e.group} in span over {ambient}")
    if ambient.status == "unlisted":
        return Subgroup(ambient, tuple(e for e in elements if not e.is_zero))
    rows = [[Fraction(c) for c in e.coords] for e in elements]
    return Subgroup(ambient, elements, _echelon(rows, ambient.orders))


def member(h: Subgroup, x: Element) -> bool:
    if not x.group.same_group(h.ambient):
        raise AmbientMismatch(f"{x.group} vs {h.ambient}")
    if h.is_symbolic:
        if x.is_zero:
            return True
        raise ValueError("membership in a subgroup of an unlisted group is not decidable")
    return span(h.ambient, h.generators + (x,)).canonical == h.canonical


def subgroup_sum(a: Subgroup, b: Subgroup) -> Subgroup:
    if not a.ambient.same_group(b.ambient):
        raise AmbientMismatch(f"{a.ambient} vs {b.ambient}")
    return span(a.ambient, a.generators + b.generators)


def subgroup_equal(a: Subgroup, b: Subgroup) -> bool:
    if not a.ambient.same_group(b.ambient):
        raise AmbientMismatch(f"{a.ambient} vs {b.ambient}")
    if a.is_symbolic:
        if a.basis() or b.basis():
            raise ValueError("equality of subgroups of an unlisted group is not decidable")
        return True
    return a.canonical == b.canonical


def is_subgroup(a: Subgroup, b: Subgroup) -> bool:
    """True when ``a`` is contained in ``b``."""
    return subgroup_equal(subgroup_sum(a, b), b)


def _to_int(x: Fraction, order: int | None) -> int:
    if order is not None:
        return _mod_pow2(x, order.bit_length() - 1)
    if x.denominator != 1:
        raise ValueError(f"{x} is not an integer coordinate")
    return int(x)


@dataclass(frozen=True)
class Hom:
    """A homomorphism given by the images of the source basis."""

    source: GroupPresentation
    target: GroupPresentation
    images: tuple[Element, ...]

    def __post_init__(self):
        if len(self.images) != self.source.rank:
            raise ValueError(f"{len(self.images)} images for a source of rank {self.source.rank}")
        for y in self.images:
            if not y.group.same_group(self.target):
                raise AmbientMismatch(f"image in {y.group}, expected {self.target}")

    def __call__(self, x: Element) -> Element:
        if not x.group.same_group(self.source):
            raise AmbientMismatch(f"{x.group} is not the source {self.source}")
        out = self.target.zero()
        for c, y in zip(x.coords, self.images):
            out = out + c * y
        return out

    def order_defects(self) -> list[str]:
        """Basis elements whose image order does not divide the source order."""
        bad = []
        for b, y in zip(self.source.basis, self.images):
            if y.is_symbolic or b.order is None:
                continue
            oy = y.order()
            if oy is None or b.order % oy:
                bad.append(f"{b.name} has order {b.order} but its image {y.render()} has order {oy or 'inf'}")
        return bad

    def image(self) -> Subgroup:
        return span(self.target, self.images)

    def _reduced(self):
        n, m = self.source.rank, self.target.rank
        rows = []
        for i, y in enumerate(self.images):
            e = [Fraction(0)] * n
            e[i] = Fraction(1)
            rows.append([Fraction(c) for c in y.coords] + e)
        for j, o in enumerate(self.target.orders):
            if o is not None:
                r = [Fraction(0)] * (m + n)
                r[j] = Fraction(o)
                rows.append(r)
        pivots = []
        remaining = rows
        for j in range(m):
            cands = [r for r in remaining if r[j] != 0]
            if not cands:
                continue
            orig = min(cands, key=lambda r: v2(r[j]))
            unit = orig[j] / Fraction(2) ** v2(orig[j])
            piv = [x / unit for x in orig]
            nxt = []
            for r in remaining:
                if r is orig:
                    continue
                if r[j] != 0:
                    q = r[j] / piv[j]
                    r = [a - q * b for a, b in zip(r, piv)]
                nxt.append(r)
            remaining = nxt
            pivots.append((j, piv))
        return pivots, [r[m:] for r in remaining]

    def kernel(self) -> Subgroup:
        _, kern = self._reduced()
        gens = []
        for v in kern:
            if not any(v):
                continue
            den = 1
            for x in v:
                den = den * x.denominator // gcd(den, x.denominator)
            gens.append(Element(self.source, tuple(_to_int(x * den, o) for x, o in zip(v, self.source.orders))))
        return span(self.source, gens)

    def preimage(self, y: Element) -> Element | None:
        """Canonical preimage of ``y`` modulo the kernel, or ``None``."""
        if not y.group.same_group(self.target):
            raise AmbientMismatch(f"{y.group} is not the target {self.target}")
        pivots, _ = self._reduced()
        n, m = self.source.rank, self.target.rank
        row = [Fraction(c) for c in y.coords] + [Fraction(0)] * n
        for j, piv in pivots:
            if row[j] == 0:
                continue
            q = row[j] / piv[j]
            if q.denominator % 2 == 0:
                return None
            row = [a - q * b for a, b in zip(row, piv)]
        if any(row[:m]):
            return None
        x = Element(self.source, tuple(_to_int(-c, o) for c, o in zip(row[m:], self.source.orders)))
        return self.kernel().reduce(x)


@dataclass(frozen=True)
class Coset:
    """``representative + indeterminacy``; the representative may be unknown.

    An unknown representative can come with ``bound``, a subgroup known to
    contain the whole coset.
    """

    indeterminacy: Subgroup
    representative: Element | None = None
    bound: Subgroup | None = None

    def __post_init__(self):
        r = self.representative
        if r is not None and not r.group.same_group(self.indeterminacy.ambient):
            raise AmbientMismatch(f"representative in {r.group}, indeterminacy in {self.indeterminacy.ambient}")

    @property
    def ambient(self) -> GroupPresentation:
        return self.indeterminacy.ambient

    @property
    def known(self) -> bool:
        return self.representative is not None

    def contains(self, x: Element) -> bool:
        if self.representative is None:
            raise ValueError("coset with unknown representative")
        return member(self.indeterminacy, x - self.representative)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Coset):
            return NotImplemented
        if not (self.known and other.known):
            return False
        return self.indeterminacy == other.indeterminacy and self.contains(other.representative)

    def __hash__(self) -> int:
        return hash(self.indeterminacy)

    def render(self) -> str:
        rep = self.representative.render() if self.representative is not None else "?"
        out = f"coset: {rep} + {self.indeterminacy.render()}"
        if self.representative is None and self.bound is not None:
            out += f" within {self.bound.render()}"
        return out

    def __str__(self) -> str:
        return self.render()
