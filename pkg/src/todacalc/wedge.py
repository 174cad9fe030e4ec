"""Formal matrices between wedges of spheres and truncated Hilton-Milnor groups.

pi_N of a wedge of spheres ``S^{n_1} v ... v S^{n_r}`` splits as a sum over
basic products ``P`` in the free Lie algebra on ``j_1..j_r``: the summand is
``P_* pi_N(S^{d(P)})`` with ``d(P) = sum n_i - (weight - 1)``. Products with
``d(P) > N`` contribute nothing by connectivity, so enumeration stops at the
first weight whose smallest sphere is above ``N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .database import Database, NotInDatabase, group_or_unlisted, lookup_group
from .groups import BasisEntry, Element, GroupPresentation, Subgroup, span
from .rewrite import Normalizer, as_expr, normalize
from .syntax import Parser
from .terms import (
    Atom,
    ComposabilityError,
    Expr,
    Term,
    compose,
    compose_expr,
    suspend,
    suspend_expr,
    whitehead_product,
)

__all__ = [
    "MatrixError",
    "WedgeSpace",
    "FormalMatrix",
    "BasicProduct",
    "WedgeComponent",
    "hall_basis",
    "product_sphere",
    "render_entry",
    "is_zero_matrix",
    "wedge_components",
    "wedge_group",
    "matrix_compose",
    "matrix_equal",
    "image_through_row",
]


class MatrixError(ValueError):
    pass


@dataclass(frozen=True)
class WedgeSpace:
    """A wedge of spheres; suspension acts on every summand."""

    summands: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(int(x) for x in self.summands))
        if not self.summands:
            raise ValueError("a wedge needs at least one summand")
        if any(x < 1 for x in self.summands):
            raise ValueError("sphere dimensions must be positive")

    def suspend(self, k: int) -> "WedgeSpace":
        return WedgeSpace(tuple(x + k for x in self.summands))

    @property
    def bottom(self) -> int:
        return min(self.summands)

    def __len__(self) -> int:
        return len(self.summands)

    def render(self) -> str:
        return " v ".join(f"S^{x}" for x in self.summands)

    def __str__(self) -> str:
        return self.render()


# --- Hall basis ----------------------------------------------------------------


@dataclass(frozen=True)
class BasicProduct:
    """A basic product; ``letter`` is set for weight one, else ``left``/``right``."""

    letter: int | None = None
    left: "BasicProduct | None" = None
    right: "BasicProduct | None" = None

    @property
    def weight(self) -> int:
        return 1 if self.letter is not None else self.left.weight + self.right.weight

    def letters(self) -> tuple[int, ...]:
        if self.letter is not None:
            return (self.letter,)
        return self.left.letters() + self.right.letters()

    def render(self) -> str:
        if self.letter is not None:
            return f"j{self.letter + 1}"
        return f"[{self.left.render()},{self.right.render()}]"


def hall_basis(r: int, max_weight: int) -> list[BasicProduct]:
    """Basic products on ``r`` letters up to ``max_weight``, in Hall order.

    Letters are ordered ``j1 > j2 > ...`` so that weight two reads ``[j1,j2]``.
    ``[u, v]`` is basic when ``u > v`` and, if ``u = [x, y]``, also ``y <= v``.
    """
    rank: dict[BasicProduct, int] = {}
    out: list[BasicProduct] = []
    for k in range(r - 1, -1, -1):
        p = BasicProduct(letter=k)
        rank[p] = len(rank)
        out.append(p)
    out.sort(key=lambda p: p.letter)
    by_weight: dict[int, list[BasicProduct]] = {1: list(out)}
    for w in range(2, max_weight + 1):
        new = []
        for wu in range(1, w):
            for u in by_weight.get(wu, []):
                for v in by_weight.get(w - wu, []):
                    if rank[u] <= rank[v]:
                        continue
                    if u.letter is None and rank[u.right] > rank[v]:
                        continue
                    new.append(BasicProduct(left=u, right=v))
        for p in new:
            rank[p] = len(rank)
        by_weight[w] = new
        out.extend(new)
    return out


def product_sphere(p: BasicProduct, summands: Sequence[int]) -> int:
    ls = p.letters()
    return sum(summands[i] for i in ls) - (len(ls) - 1)


@dataclass(frozen=True)
class WedgeComponent:
    product: BasicProduct
    sphere: int
    group: GroupPresentation

    @property
    def tag(self) -> str:
        return self.product.render()


def _max_weight(N: int, W: WedgeSpace) -> int:
    lo = W.bottom
    if lo < 2:
        raise MatrixError("wedges with an S^1 summand have no finite Hilton-Milnor truncation")
    w = 1
    while w * lo - (w - 1) <= N:
        w += 1
    return w - 1


def wedge_components(db: Database, N: int, W: WedgeSpace) -> list[WedgeComponent]:
    mw = max(_max_weight(N, W), 1)
    out = []
    for p in hall_basis(len(W), mw + 1):
        d = product_sphere(p, W.summands)
        if p.weight > mw:
            assert d > N, "truncation dropped a product on a sphere of dimension <= N"
            continue
        if d > N:
            continue
        out.append(WedgeComponent(p, d, lookup_group(db, N, d)))
    return out


def wedge_group(db: Database, N: int, W: WedgeSpace) -> GroupPresentation:
    if len(W) == 1:
        return lookup_group(db, N, W.summands[0])
    basis: list[BasisEntry] = []
    cites = []
    for comp in wedge_components(db, N, W):
        if comp.group.status == "unlisted":
            raise NotInDatabase(f"pi_{N}(S^{comp.sphere}) is not in database")
        for b in comp.group.basis:
            basis.append(BasisEntry(f"{comp.tag}.{b.name}", b.order))
        if comp.group.citation:
            cites.append(comp.group.citation)
    return GroupPresentation(N, W.render(), tuple(basis), "; ".join(dict.fromkeys(cites)), "wedge")


# --- formal matrices ---------------------------------------------------------------


def _entry_zero(target: int, source: int) -> Expr:
    return Expr.zero(target, source)


def render_entry(e: Expr) -> str:
    if e.is_zero:
        return f"0_{e.target}^({e.source - e.target})"
    return e.render()


@dataclass(frozen=True)
class FormalMatrix:
    """An ``l x r`` array of classes from ``col_space`` to ``row_space``.

    Entry ``(k, s)`` maps summand ``s`` of the domain to summand ``k`` of the
    codomain.
    """

    entries: tuple[tuple[Expr, ...], ...]
    row_space: WedgeSpace
    col_space: WedgeSpace

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        if len(rows) != len(self.row_space) or any(len(r) != len(self.col_space) for r in rows):
            raise MatrixError(
                f"{len(rows)}x{len(rows[0]) if rows else 0} entries for "
                f"{self.row_space} <- {self.col_space}"
            )
        for k, row in enumerate(rows):
            for s, e in enumerate(row):
                if (e.target, e.source) != (self.row_space.summands[k], self.col_space.summands[s]):
                    raise ComposabilityError(
                        f"entry ({k + 1},{s + 1}) = {render_entry(e)} is not a map "
                        f"S^{self.col_space.summands[s]} -> S^{self.row_space.summands[k]}"
                    )

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_space), len(self.col_space)

    def __getitem__(self, ks: tuple[int, int]) -> Expr:
        k, s = ks
        return self.entries[k][s]

    def column(self, s: int) -> "FormalMatrix":
        return FormalMatrix(
            tuple((row[s],) for row in self.entries), self.row_space, WedgeSpace((self.col_space.summands[s],))
        )

    def row(self, k: int) -> "FormalMatrix":
        return FormalMatrix((self.entries[k],), WedgeSpace((self.row_space.summands[k],)), self.col_space)

    def suspend(self, k: int) -> "FormalMatrix":
        return FormalMatrix(
            tuple(tuple(suspend_expr(e, k) for e in row) for row in self.entries),
            self.row_space.suspend(k),
            self.col_space.suspend(k),
        )

    def is_suspension(self) -> bool:
        return all(e.suspension for row in self.entries for e in row)

    def is_zero_syntactically(self) -> bool:
        return all(e.is_zero for row in self.entries for e in row)

    def render(self) -> str:
        return "[" + "; ".join(", ".join(render_entry(e) for e in row) for row in self.entries) + "]"

    def __str__(self) -> str:
        return self.render()

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[Expr | None]],
        row_space: WedgeSpace | None = None,
        col_space: WedgeSpace | None = None,
    ) -> "FormalMatrix":
        """Build from parsed rows; bare zeros take their spheres from the other entries."""
        nr, nc = len(rows), len(rows[0])
        tg: list[int | None] = list(row_space.summands) if row_space else [None] * nr
        sc: list[int | None] = list(col_space.summands) if col_space else [None] * nc
        for k, row in enumerate(rows):
            for s, e in enumerate(row):
                if e is None:
                    continue
                for lst, i, v in ((tg, k, e.target), (sc, s, e.source)):
                    if lst[i] is None:
                        lst[i] = v
                    elif lst[i] != v:
                        raise ComposabilityError(f"entry ({k + 1},{s + 1}) disagrees with its row or column spheres")
        if None in tg or None in sc:
            raise MatrixError("cannot infer the spheres of a zero entry; write it as 0_m^(k)")
        ents = tuple(
            tuple(e if e is not None else _entry_zero(tg[k], sc[s]) for s, e in enumerate(row))
            for k, row in enumerate(rows)
        )
        return cls(ents, WedgeSpace(tuple(tg)), WedgeSpace(tuple(sc)))

    @classmethod
    def parse(cls, text: str, db: Database) -> "FormalMatrix":
        p = Parser(text, db.gens)
        rows = p.matrix()
        p.finish()
        return cls.from_rows(rows)


def matrix_compose(A: FormalMatrix, B: FormalMatrix, db: Database) -> FormalMatrix:
    """``A o B`` with normalized entries.

    ``B``'s column ``s`` is ``sum_k i_k b_ks``; composing it after something
    distributes only when ``b_ks`` is a suspension, unless column ``k`` of ``A``
    has a single nonzero entry (post-composition is always additive).
    """
    if A.col_space != B.row_space:
        raise ComposabilityError(f"{A.col_space} != {B.row_space}")
    nr, nk = A.shape
    nc = len(B.col_space)
    out = []
    for i in range(nr):
        row = []
        for j in range(nc):
            acc = _entry_zero(A.row_space.summands[i], B.col_space.summands[j])
            for k in range(nk):
                a, b = A[i, k], B[k, j]
                if a.is_zero or b.is_zero:
                    continue
                if nr > 1 and not b.suspension and sum(not A[x, k].is_zero for x in range(nr)) > 1:
                    raise MatrixError(
                        f"matrix product not homotopy-meaningful: {b.render()} is not a suspension"
                    )
                acc = acc + compose_expr(a, b)
            el = normalize(acc, db)
            row.append(as_expr(el, db, acc.target, acc.source))
        out.append(tuple(row))
    return FormalMatrix(tuple(out), A.row_space, B.col_space)


def matrix_equal(A: FormalMatrix, B: FormalMatrix, db: Database) -> bool:
    if (A.row_space, A.col_space) != (B.row_space, B.col_space):
        return False
    for ra, rb in zip(A.entries, B.entries):
        for a, b in zip(ra, rb):
            if normalize(a, db) != normalize(b, db):
                return False
    return True


def is_zero_matrix(A: FormalMatrix, db: Database) -> list[tuple[int, int, Element]]:
    """Entries of ``A`` that do not normalize to zero."""
    bad = []
    for k, row in enumerate(A.entries):
        for s, e in enumerate(row):
            el = normalize(e, db)
            if not el.is_zero:
                bad.append((k, s, el))
    return bad


def _single_chain(e: Expr) -> tuple[Atom, ...] | None:
    if e.is_zero:
        return None
    if len(e.terms) != 1 or e.terms[0].coef != 1:
        raise MatrixError(f"Whitehead products of {e.render()} need it as a single chain")
    return e.terms[0].chain


def _bracket_atom(p: BasicProduct, row: Sequence[Expr]):
    """``[a_p, a_q]`` (weight two) as an atom, ``None`` when an entry is zero."""
    if p.weight != 2 or p.left.letter is None or p.right.letter is None:
        chains = [_single_chain(row[i]) for i in p.letters()]
        if any(c is None for c in chains):
            return None
        raise MatrixError(f"no Whitehead relation for the iterated product {p.render()}")
    a = _single_chain(row[p.left.letter])
    b = _single_chain(row[p.right.letter])
    if a is None or b is None:
        return None
    return whitehead_product(a, b)


def image_through_row(a: FormalMatrix, db: Database, N: int, n: int = 0) -> Subgroup:
    """``a o Sigma^n pi_N(X)`` where ``a``'s domain is ``Sigma^n X``.

    ``a o (j_k o x) = a_k o x``; a Whitehead summand ``[j_p, j_q] o x`` maps to
    ``[a_p, a_q] o x`` when ``n = 0`` and vanishes when ``n >= 1``.
    """
    if a.shape[0] != 1:
        raise MatrixError("image_through_row needs a single row")
    X = a.col_space.suspend(-n)
    W = a.row_space.summands[0]
    target = N + n
    ambient = group_or_unlisted(db, target, W)
    row = a.entries[0]
    gens: list[Element] = []
    norm = Normalizer(db)
    for comp in wedge_components(db, N, X):
        if comp.group.status == "unlisted":
            raise NotInDatabase(f"pi_{N}(S^{comp.sphere}) is not in database")
        for name in comp.group.names:
            p = Parser(name, db.gens)
            x = Term(1, p.chain())
            if comp.product.weight == 1:
                ak = row[comp.product.letter]
                if ak.is_zero:
                    continue
                img = compose_expr(ak, Expr.of(suspend(x, n)))
                gens.append(norm.element(img))
                continue
            if n >= 1:
                continue  # Whitehead products are killed by suspension
            atom = _bracket_atom(comp.product, row)
            if atom is None:
                continue
            t = compose(Term(1, (atom,)), x)
            gens.append(norm.element(t))
    return span(ambient, gens)
