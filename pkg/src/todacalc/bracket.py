"""Matrix Toda brackets ``{a, Sigma^n b, Sigma^n c}_n``.

A spec stores the undesuspended data: ``c: U -> Y``, ``b: Y -> X`` and
``a: Sigma^n X -> W`` with ``W`` a single sphere, ``X`` and ``Y`` wedges.
The bracket is a coset in ``[Sigma^{n+1} U, W]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .database import Database, NotInDatabase, RelationRecord, group_or_unlisted, lookup_group
from .ehp import compose_subgroup
from .groups import Element, GroupPresentation, Subgroup, is_subgroup, span, subgroup_equal, subgroup_sum
from .rewrite import normalize_traced
from .syntax import Parser
from .terms import ComposabilityError, Expr, compose_expr, suspend_expr
from .wedge import FormalMatrix, MatrixError, WedgeSpace, image_through_row, matrix_equal, render_entry

__all__ = [
    "FULL_LABEL",
    "PreconditionError",
    "BracketSpec",
    "WellDefinednessReport",
    "Summand",
    "RewriteResult",
    "FormulaComparison",
    "check_well_defined",
    "compare_formula",
    "indeterminacy",
    "indeterminacy_summands",
    "indeterminacy_full",
    "shape_rewrite",
    "lower",
    "pad",
    "same_spec",
    "shape_cases",
    "compose_subgroup",
]


# label for index-0 results, where only the full evaluation is the indeterminacy
FULL_LABEL = "full computation (Eq. 2.2a)"


class PreconditionError(ValueError):
    """A mathematical hypothesis of the requested computation fails."""


def _infer(raw, lists, n):
    """Fill sphere lists ``[W, X, Y, U]`` from the entries of the three raw matrices."""
    ra, rb, rc = raw
    W, X, Y, U = lists
    changed = True

    def put(lst, i, v):
        nonlocal changed
        if lst[i] is None:
            lst[i] = v
            changed = True
        elif lst[i] != v:
            raise ComposabilityError(f"summand {i + 1} is S^{lst[i]} in one entry and S^{v} in another")

    while changed:
        changed = False
        for k, e in enumerate(ra[0]):
            if e is not None:
                put(W, 0, e.target)
                put(X, k, e.source - n)
        for k, row in enumerate(rb):
            for s, e in enumerate(row):
                if e is not None:
                    put(X, k, e.target)
                    put(Y, s, e.source)
        for s, row in enumerate(rc):
            if row[0] is not None:
                put(Y, s, row[0].target)
                put(U, 0, row[0].source)


@dataclass(frozen=True)
class BracketSpec:
    a: FormalMatrix
    b: FormalMatrix
    c: FormalMatrix
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("bracket index must be >= 0")
        if self.a.shape[0] != 1 or self.c.shape[1] != 1:
            raise MatrixError("a must be a row and c a column")
        if self.a.col_space != self.b.row_space.suspend(self.n):
            raise ComposabilityError(f"a has domain {self.a.col_space}, Sigma^{self.n} b has {self.b.row_space.suspend(self.n)}")
        if self.b.col_space != self.c.row_space:
            raise ComposabilityError(f"b has domain {self.b.col_space}, c has codomain {self.c.row_space}")
        for s, row in enumerate(self.c.entries):
            if not row[0].suspension:
                raise PreconditionError(f"c_{s + 1} = {row[0].render()} is not a suspension")

    @property
    def W(self) -> int:
        return self.a.row_space.summands[0]

    @property
    def X(self) -> WedgeSpace:
        return self.b.row_space

    @property
    def Y(self) -> WedgeSpace:
        return self.b.col_space

    @property
    def U(self) -> int:
        return self.c.col_space.summands[0]

    @property
    def degree(self) -> int:
        """The bracket lies in ``pi_degree(S^W)``."""
        return self.U + self.n + 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.b.shape

    def ambient(self, db: Database) -> GroupPresentation:
        return group_or_unlisted(db, self.degree, self.W)

    def render(self) -> str:
        return "{" + f"{self.a.render()}; {self.b.render()}; {self.c.render()}" + "}" + f"_{self.n}"

    def __str__(self) -> str:
        return self.render()

    @classmethod
    def from_raw(cls, raw, n: int) -> "BracketSpec":
        ra, rb, rc = raw
        if len(ra) != 1:
            raise MatrixError("a must be a single row")
        if any(len(r) != 1 for r in rc):
            raise MatrixError("c must be a single column")
        l, r = len(ra[0]), len(rc)
        if len(rb) != l or any(len(row) != r for row in rb):
            raise MatrixError(f"b must be {l}x{r}")
        lists = [[None], [None] * l, [None] * r, [None]]
        _infer(raw, lists, n)
        if any(None in x for x in lists):
            raise MatrixError("cannot infer the spheres of a zero entry; write it as 0_m^(k)")
        W, X, Y, U = (WedgeSpace(tuple(x)) for x in lists)
        a = FormalMatrix.from_rows(ra, W, X.suspend(n))
        b = FormalMatrix.from_rows(rb, X, Y)
        c = FormalMatrix.from_rows(rc, Y, U)
        return cls(a, b, c, n)

    @classmethod
    def parse(cls, text: str, db: Database) -> "BracketSpec":
        p = Parser(text, db.gens)
        ra, rb, rc, n = p.spec()
        p.finish()
        return cls.from_raw((ra, rb, rc), n)

    def drop(self, xs: tuple[int, ...] = (), ys: tuple[int, ...] = ()) -> "BracketSpec":
        """Remove summands of X (indices ``xs``) and of Y (indices ``ys``)."""
        kx = [k for k in range(len(self.X)) if k not in xs]
        ky = [s for s in range(len(self.Y)) if s not in ys]
        if not kx or not ky:
            raise MatrixError("cannot remove every summand")
        X = WedgeSpace(tuple(self.X.summands[k] for k in kx))
        Y = WedgeSpace(tuple(self.Y.summands[s] for s in ky))
        a = FormalMatrix((tuple(self.a[0, k] for k in kx),), self.a.row_space, X.suspend(self.n))
        b = FormalMatrix(tuple(tuple(self.b[k, s] for s in ky) for k in kx), X, Y)
        c = FormalMatrix(tuple((self.c[s, 0],) for s in ky), Y, self.c.col_space)
        return BracketSpec(a, b, c, self.n)

    def pruned(self) -> "BracketSpec":
        """Drop X-summands with zero ``a_k`` and zero row, Y-summands with zero column and ``c_s``."""
        l, r = self.shape
        xs = tuple(k for k in range(l) if self.a[0, k].is_zero and all(self.b[k, s].is_zero for s in range(r)))
        ys = tuple(s for s in range(r) if self.c[s, 0].is_zero and all(self.b[k, s].is_zero for k in range(l)))
        if len(xs) == l:
            xs = xs[1:]
        if len(ys) == r:
            ys = ys[1:]
        return self.drop(xs, ys) if xs or ys else self


@dataclass
class WellDefinednessReport:
    ok: bool
    offending: list[tuple[str, int, int, Element]] = field(default_factory=list)
    relations: list[RelationRecord] = field(default_factory=list)

    def render(self) -> str:
        if self.ok:
            lines = ["well-defined: a o Sigma^n b = O and b o c = O"]
        else:
            lines = ["not well-defined:"]
            for which, i, j, el in self.offending:
                lines.append(f"  ({which})[{i + 1},{j + 1}] = {el.render()}")
        for r in self.relations:
            lines.append(f"  used {r.render()}  [{r.citation}]")
        return "\n".join(lines)


def _dot(row: list[Expr], col: list[Expr], target: int, source: int) -> Expr:
    acc = Expr.zero(target, source)
    for x, y in zip(row, col):
        if x.is_zero or y.is_zero:
            continue
        acc = acc + compose_expr(x, y)
    return acc


def check_well_defined(spec: BracketSpec, db: Database) -> WellDefinednessReport:
    rep = WellDefinednessReport(True)
    sb = spec.b.suspend(spec.n)
    l, r = spec.shape

    def record(which, i, j, e):
        el, used = normalize_traced(e, db)
        for u in used:
            if u not in rep.relations:
                rep.relations.append(u)
        if not el.is_zero:
            rep.ok = False
            rep.offending.append((which, i, j, el))

    for s in range(r):
        col = [sb[k, s] for k in range(l)]
        record("a o Sigma^n b", 0, s, _dot(list(spec.a.entries[0]), col, spec.W, sb.col_space.summands[s]))
    for k in range(l):
        col = [spec.c[s, 0] for s in range(r)]
        if sum(not spec.b[k, s].is_zero for s in range(r)) > 1 and not all(c.suspension for c in col):
            raise MatrixError("matrix product not homotopy-meaningful")
        record("b o c", k, 0, _dot(list(spec.b.entries[k]), col, spec.X.summands[k], spec.U))
    return rep


def _group_as_subgroup(db: Database, N: int, m: int) -> Subgroup:
    return lookup_group(db, N, m).whole()


@dataclass(frozen=True)
class Summand:
    label: str
    subgroup: Subgroup | None
    reason: str = ""

    def render(self) -> str:
        body = self.subgroup.render() if self.subgroup is not None else f"unavailable ({self.reason})"
        return f"{self.label}: {body}"


def _left_label(spec: BracketSpec, k: int) -> str:
    pre = f"Sigma^{spec.n} " if spec.n else ""
    return f"{render_entry(spec.a[0, k])} o {pre}pi_{spec.U + 1}(S^{spec.X.summands[k]})"


def _right_label(spec: BracketSpec, s: int) -> str:
    y = spec.Y.summands[s] + spec.n + 1
    return f"pi_{y}(S^{spec.W}) o {render_entry(suspend_expr(spec.c[s, 0], spec.n + 1))}"


def indeterminacy_summands(spec: BracketSpec, db: Database, force: bool = False) -> list[Summand]:
    """The summands of the suspension-case indeterminacy formula, labelled.

    ``force`` evaluates the formula even at ``n = 0``, where it need not be
    the indeterminacy.
    """
    if spec.n == 0 and not force:
        raise PreconditionError("Prop 3.2 inapplicable: n = 0")
    for k, x in enumerate(spec.X.summands):
        if x < 2:
            raise PreconditionError(f"X_{k + 1} not a suspension")
    ambient = spec.ambient(db)
    out: list[Summand] = []
    for k in range(len(spec.X)):
        label = _left_label(spec, k)
        ak = spec.a[0, k]
        if ak.is_zero:
            out.append(Summand(label, span(ambient, [])))
            continue
        row = FormalMatrix(((ak,),), spec.a.row_space, WedgeSpace((spec.a.col_space.summands[k],)))
        try:
            out.append(Summand(label, image_through_row(row, db, spec.U + 1, spec.n)))
        except NotInDatabase as exc:
            out.append(Summand(label, None, str(exc)))
    for s in range(len(spec.Y)):
        out.append(_right_summand(spec, db, s, ambient))
    return out


def _right_summand(spec: BracketSpec, db: Database, s: int, ambient: GroupPresentation) -> Summand:
    label = _right_label(spec, s)
    cs = suspend_expr(spec.c[s, 0], spec.n + 1)
    if cs.is_zero:
        return Summand(label, span(ambient, []))
    try:
        G = _group_as_subgroup(db, cs.target, spec.W)
    except NotInDatabase as exc:
        return Summand(label, None, str(exc))
    return Summand(label, compose_subgroup(db, G, cs, ambient))


def _total(spec: BracketSpec, db: Database, parts: list[Summand]) -> Subgroup:
    out = span(spec.ambient(db), [])
    for p in parts:
        if p.subgroup is None:
            raise NotInDatabase(f"{p.label}: {p.reason}")
        out = subgroup_sum(out, p.subgroup)
    return out


def indeterminacy(spec: BracketSpec, db: Database, force: bool = False) -> Subgroup:
    """Suspension-case indeterminacy: left images through each summand plus right composites."""
    return _total(spec, db, indeterminacy_summands(spec, db, force))


def indeterminacy_full(spec: BracketSpec, db: Database) -> Subgroup:
    """``a o Sigma^n pi(Sigma U; X) + sum_s pi(Sigma^{n+1} Y_s; W) o Sigma^{n+1} c_s``.

    The left summand runs over the whole Hilton-Milnor decomposition of the
    wedge, so Whitehead summands contribute when ``n = 0``.
    """
    ambient = spec.ambient(db)
    left = image_through_row(spec.a, db, spec.U + 1, spec.n)
    parts = [Summand("left", left)] + [_right_summand(spec, db, s, ambient) for s in range(len(spec.Y))]
    return _total(spec, db, parts)


@dataclass(frozen=True)
class FormulaComparison:
    full: Subgroup
    formula: Subgroup

    @property
    def agree(self) -> bool:
        return subgroup_equal(self.full, self.formula)

    @property
    def strict(self) -> bool:
        return not self.agree and is_subgroup(self.formula, self.full)

    def render(self) -> str:
        f, g = self.full, self.formula
        head = f"indeterminacy {f.render()} ({f.shape()}); summand formula {g.render()} ({g.shape()})"
        if self.agree:
            return head + ": they agree"
        if self.strict:
            return head + ": strict containment, so the bracket is not a coset of the formula subgroup"
        return head + ": they differ"


def compare_formula(spec: BracketSpec, db: Database) -> FormulaComparison:
    """Full indeterminacy against the summand formula evaluated on the same data."""
    return FormulaComparison(indeterminacy_full(spec, db), indeterminacy(spec, db, force=True))


@dataclass(frozen=True)
class RewriteResult:
    """``spec`` plus ``extra`` contains the original bracket; equal as cosets when ``exact``."""

    spec: BracketSpec
    extra: Summand | None
    exact: bool = True

    def extra_subgroup(self, db: Database) -> Subgroup:
        if self.extra is None:
            return span(self.spec.ambient(db), [])
        if self.extra.subgroup is None:
            raise NotInDatabase(self.extra.reason)
        return self.extra.subgroup


def _vanishes(e: Expr, db: Database) -> bool:
    return e.is_zero or normalize_traced(e, db)[0].is_zero


def shape_rewrite(spec: BracketSpec, case: int, db: Database, containment: bool = False) -> RewriteResult:
    """Reduce a 2x2 bracket with ``b_22 = 0`` and one more zero entry.

    1: ``a_2 = 0``, right bracket.  2: ``c_2 = 0``, left bracket.
    3: ``b_21 = 0``, right bracket plus ``a_2 o Sigma^n [Sigma U, X_2]``.
    4: ``b_12 = 0``, left bracket plus ``[Sigma^{n+1} Y_2, W] o Sigma^{n+1} c_2``.

    With ``containment`` the rewrite is also allowed at ``n = 0``, where it
    only yields an inclusion of the original bracket in the result.
    """
    if spec.n < 1 and not containment:
        raise PreconditionError("shape rewrites need n >= 1")
    exact = spec.n >= 1
    if spec.shape != (2, 2):
        raise PreconditionError(f"shape rewrites need a 2x2 matrix b, got {spec.shape[0]}x{spec.shape[1]}")
    if any(x < 2 for x in spec.X.summands):
        raise PreconditionError("X_1 and X_2 must be suspensions")
    if not _vanishes(spec.b[1, 1], db):
        raise PreconditionError("shape rewrites need b_22 = 0")
    need = {1: ("a_2", spec.a[0, 1]), 2: ("c_2", spec.c[1, 0]), 3: ("b_21", spec.b[1, 0]), 4: ("b_12", spec.b[0, 1])}
    if case not in need:
        raise ValueError("case must be 1, 2, 3 or 4")
    name, e = need[case]
    if not _vanishes(e, db):
        raise PreconditionError(f"case {case} needs {name} = 0, got {e.render()}")
    ambient = spec.ambient(db)
    if case == 1:
        return RewriteResult(spec.drop(xs=(1,)), None, exact)
    if case == 2:
        return RewriteResult(spec.drop(ys=(1,)), None, exact)
    if case == 3:
        full = indeterminacy_summands(spec, db, force=True)
        return RewriteResult(spec.drop(xs=(1,)), full[1], exact)
    return RewriteResult(spec.drop(ys=(1,)), _right_summand(spec, db, 1, ambient), exact)


def lower(spec: BracketSpec, k: int) -> BracketSpec:
    """``{a, Sigma^n b, Sigma^n c}_n`` as a bracket of index ``n - k``, which contains it."""
    if not 0 <= k <= spec.n:
        raise PreconditionError(f"cannot lower index {spec.n} by {k}")
    return BracketSpec(spec.a, spec.b.suspend(k), spec.c.suspend(k), spec.n - k)


def pad(spec: BracketSpec) -> BracketSpec:
    """Make a 1x2 or 2x1 matrix ``b`` square with a zero summand copying its neighbour."""
    l, r = spec.shape
    if (l, r) == (1, 2):
        X = WedgeSpace(spec.X.summands * 2)
        a = FormalMatrix(((spec.a[0, 0], Expr.zero(spec.W, X.summands[1] + spec.n)),), spec.a.row_space, X.suspend(spec.n))
        zero = tuple(Expr.zero(X.summands[1], y) for y in spec.Y.summands)
        b = FormalMatrix((spec.b.entries[0], zero), X, spec.Y)
        return BracketSpec(a, b, spec.c, spec.n)
    if (l, r) == (2, 1):
        Y = WedgeSpace(spec.Y.summands * 2)
        b = FormalMatrix(tuple((row[0], Expr.zero(x, Y.summands[1])) for row, x in zip(spec.b.entries, spec.X.summands)), spec.X, Y)
        c = FormalMatrix((spec.c.entries[0], (Expr.zero(Y.summands[1], spec.U),)), Y, spec.c.col_space)
        return BracketSpec(spec.a, b, c, spec.n)
    raise PreconditionError(f"pad needs a 1x2 or 2x1 matrix b, got {l}x{r}")


def same_spec(s: BracketSpec, t: BracketSpec, db: Database) -> bool:
    """Equal brackets by their data, compared up to homotopy.

    ``b`` and ``c`` are compared as stored, before the n-fold suspension:
    the bracket depends on them and not only on their suspensions.
    """
    if (s.n, s.shape, s.X, s.Y, s.W, s.U) != (t.n, t.shape, t.X, t.Y, t.W, t.U):
        return False
    return all(matrix_equal(x, y, db) for x, y in ((s.a, t.a), (s.b, t.b), (s.c, t.c)))


def shape_cases(db: Database) -> dict[int, BracketSpec]:
    """The shipped example spec for each rewrite case."""
    from importlib import resources

    text = (resources.files("todacalc") / "data" / "shape_cases.txt").read_text()
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            case, spec = line.split(None, 1)
            out[int(case)] = BracketSpec.parse(spec, db)
    return out
