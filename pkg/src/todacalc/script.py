"""Line-oriented derivation scripts.

::

    # comment
    let NAME = VALUE
    assert equal VALUE = VALUE
    assert zero VALUE
    assert subgroup VALUE <= VALUE
    assert proper VALUE < VALUE
    assert order VALUE = INT
    assert wellformed VALUE
    assert member VALUE in VALUE
    compute VALUE
    echo free text

A VALUE is a bound name, an integer, a bracket literal ``{...}_n``, a call
``f(VALUE, ...)`` of one of ``FUNCTIONS``, or a term expression such as
``eta_11.kappa_12``. Names are bound once and must be bound before use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .bracket import (
    FULL_LABEL,
    BracketSpec,
    PreconditionError,
    check_well_defined,
    indeterminacy,
    indeterminacy_full,
    shape_rewrite,
    lower,
    pad,
    same_spec,
)
from .database import Database, NotInDatabase, group_or_unlisted, lookup_group
from .ehp import NodeMissing, NotInImage, h_formula, h_kills_suspension, h_of_composite
from .groups import Coset, Element, Subgroup, is_subgroup, member, span, subgroup_equal
from .rewrite import StuckTerm, normalize
from .syntax import ParseError, parse_expr
from .terms import Expr

__all__ = [
    "ScriptError",
    "Step",
    "Script",
    "StepResult",
    "RunReport",
    "parse_script",
    "format_script",
    "format_step",
    "run_script",
    "FUNCTIONS",
    "render_value",
    "load_script",
    "shipped_scripts",
]


class ScriptError(ValueError):
    def __init__(self, msg: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {msg}")


# values: ("name", x) | ("int", k) | ("lit", text) | ("call", f, (args...))
Value = tuple

FUNCTIONS: dict[str, tuple[int, int]] = {
    "ind": (1, 1),
    "indformula": (1, 1),
    "indfull": (1, 1),
    "hformula": (1, 1),
    "rewrite": (2, 2),
    "extra": (2, 2),
    "hcomp": (3, 3),
    "hsusp": (3, 3),
    "pi": (2, 2),
    "lower": (2, 2),
    "pad": (1, 1),
    "span": (0, 64),
}

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9]*$")
_CALL = re.compile(r"([a-z]+)\((.*)\)$", re.S)
_ASSERT = {
    "equal": "=",
    "subgroup": "<=",
    "proper": "<",
    "order": "=",
    "member": " in ",
}


@dataclass(frozen=True)
class Step:
    kind: str  # let | assert | compute | echo
    line: int
    name: str = ""  # bound name, or assertion kind
    args: tuple = ()
    text: str = ""

    def key(self) -> tuple:
        return (self.kind, self.name, self.args, self.text)


@dataclass(frozen=True)
class Script:
    steps: tuple[Step, ...]

    def keys(self) -> list[tuple]:
        return [s.key() for s in self.steps]


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur, i = [], 0, [], 0
    while i < len(text):
        ch = text[i]
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if depth == 0 and text.startswith(sep, i):
            out.append("".join(cur))
            cur = []
            i += len(sep)
            continue
        cur.append(ch)
        i += 1
    out.append("".join(cur))
    return out


def _value(text: str, line: int) -> Value:
    t = text.strip()
    if not t:
        raise ScriptError("missing value", line)
    if re.fullmatch(r"-?\d+", t):
        return ("int", int(t))
    if _NAME.match(t):
        return ("name", t)
    m = _CALL.match(t)
    if m and m.group(1) in FUNCTIONS:
        inner = m.group(2).strip()
        parts = _split_top(inner, ",") if inner else []
        lo, hi = FUNCTIONS[m.group(1)]
        if not lo <= len(parts) <= hi:
            raise ScriptError(f"{m.group(1)} takes {lo if lo == hi else f'{lo} to {hi}'} arguments", line)
        return ("call", m.group(1), tuple(_value(p, line) for p in parts))
    if m:
        raise ScriptError(f"unknown function {m.group(1)!r}", line)
    return ("lit", " ".join(t.split()))


def _show(v: Value) -> str:
    if v[0] == "int":
        return str(v[1])
    if v[0] in ("name", "lit"):
        return v[1]
    return f"{v[1]}(" + ", ".join(_show(a) for a in v[2]) + ")"


def _strip_comment(raw: str) -> str:
    # '#' starts a comment only at the beginning or after whitespace
    m = re.search(r"(^|\s)#", raw)
    return raw[: m.start()] if m else raw


def parse_script(text: str) -> Script:
    steps: list[Step] = []
    bound: set[str] = set()
    for no, raw in enumerate(text.splitlines(), 1):
        if raw.strip().startswith("echo "):
            steps.append(Step("echo", no, text=raw.strip()[5:].strip()))
            continue
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line == "echo":
            steps.append(Step("echo", no))
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "let":
            name, eq, val = rest.partition("=")
            name = name.strip()
            if not eq or not _NAME.match(name):
                raise ScriptError("expected 'let NAME = VALUE'", no)
            if name in bound:
                raise ScriptError(f"{name} is already bound", no)
            if name in FUNCTIONS:
                raise ScriptError(f"{name} is a function name", no)
            v = _value(val, no)
            _check_names(v, bound, no)
            bound.add(name)
            steps.append(Step("let", no, name, (v,)))
        elif word == "assert":
            kind, _, body = rest.partition(" ")
            if kind in _ASSERT:
                parts = _split_top(body, _ASSERT[kind])
                if len(parts) != 2:
                    raise ScriptError(f"expected 'assert {kind} A{_ASSERT[kind]}B'".replace("  ", " "), no)
                vals = (_value(parts[0], no), _value(parts[1], no))
                if kind == "order" and vals[1][0] != "int":
                    raise ScriptError("order must be an integer", no)
            elif kind in ("zero", "wellformed"):
                vals = (_value(body, no),)
            else:
                raise ScriptError(f"unknown assertion {kind!r}", no)
            for v in vals:
                _check_names(v, bound, no)
            steps.append(Step("assert", no, kind, vals))
        elif word == "compute":
            v = _value(rest, no)
            _check_names(v, bound, no)
            steps.append(Step("compute", no, args=(v,)))
        else:
            raise ScriptError(f"unknown statement {word!r}", no)
    return Script(tuple(steps))


def _check_names(v: Value, bound: set[str], line: int):
    if v[0] == "name" and v[1] not in bound:
        raise ScriptError(f"{v[1]} is not bound", line)
    if v[0] == "call":
        for a in v[2]:
            _check_names(a, bound, line)


def format_step(s: Step) -> str:
    if s.kind == "let":
        return f"let {s.name} = {_show(s.args[0])}"
    if s.kind == "compute":
        return f"compute {_show(s.args[0])}"
    if s.kind == "echo":
        return f"echo {s.text}".rstrip()
    if s.name in _ASSERT:
        sep = _ASSERT[s.name].strip()
        return f"assert {s.name} {_show(s.args[0])} {sep} {_show(s.args[1])}"
    return f"assert {s.name} {_show(s.args[0])}"


def format_script(script: Script) -> str:
    out = [format_step(s) for s in script.steps]
    return "\n".join(out) + ("\n" if out else "")


# evaluation


class _Env:
    def __init__(self, db: Database):
        self.db = db
        self.names: dict[str, object] = {}
        self.full = False  # an index-0 full indeterminacy was evaluated

    def value(self, v: Value):
        kind = v[0]
        if kind == "int":
            return v[1]
        if kind == "name":
            return self.names[v[1]]
        if kind == "lit":
            text = v[1]
            if text.startswith("{"):
                return BracketSpec.parse(text, self.db)
            e = parse_expr(text, self.db.gens)
            if e is None:
                raise ValueError(f"{text!r} has no degree; write 0_m^(k)")
            return e
        return self.call(v[1], [self.value(a) for a in v[2]])

    def _spec(self, x) -> BracketSpec:
        if not isinstance(x, BracketSpec):
            raise TypeError("expected a bracket spec")
        return x

    def element(self, x) -> Element:
        if isinstance(x, Element):
            return x
        if isinstance(x, Expr):
            return normalize(x, self.db)
        raise TypeError(f"expected an element, got {type(x).__name__}")

    def call(self, f: str, args: list):
        db = self.db
        if f == "ind":
            return indeterminacy(self._spec(args[0]), db)
        if f == "indformula":
            return indeterminacy(self._spec(args[0]), db, force=True)
        if f == "indfull":
            spec = self._spec(args[0])
            self.full |= spec.n == 0
            return indeterminacy_full(spec, db)
        if f == "hformula":
            return h_formula(self._spec(args[0]), db)
        # at index 0 a rewrite only gives a containment
        if f == "rewrite":
            return shape_rewrite(self._spec(args[0]), args[1], db, containment=True).spec.pruned()
        if f == "extra":
            return shape_rewrite(self._spec(args[0]), args[1], db, containment=True).extra_subgroup(db)
        if f == "lower":
            return lower(self._spec(args[0]), args[1])
        if f == "pad":
            return pad(self._spec(args[0]))
        if f == "hcomp":
            m, N, g = args
            return h_of_composite(db, m, N, g)
        if f == "hsusp":
            a, N, k = args
            h_kills_suspension(db, a, N, k)
            return span(group_or_unlisted(db, N, 2 * (a.target - 1) + 1), [])
        if f == "pi":
            N, m = args
            return lookup_group(db, N, m).whole()
        if f == "span":
            els = [self.element(x) for x in args]
            if not els:
                raise ValueError("span() needs at least one element to fix the group")
            return span(els[0].group, els)
        raise ValueError(f"unknown function {f}")


def render_value(x) -> str:
    if isinstance(x, Subgroup):
        try:
            shape = x.shape()
        except ValueError:
            shape = "?"
        return f"{x.render()} in {x.ambient} ({shape})"
    if isinstance(x, Element):
        return f"{x.render()} in {x.group}"
    if isinstance(x, (Coset, BracketSpec, Expr)):
        return x.render()
    return str(x)


def _equal(env: _Env, x, y) -> bool:
    if isinstance(x, BracketSpec) or isinstance(y, BracketSpec):
        return isinstance(x, BracketSpec) and isinstance(y, BracketSpec) and same_spec(x, y, env.db)
    if isinstance(x, Subgroup) and isinstance(y, Subgroup):
        return subgroup_equal(x, y)
    if isinstance(y, Coset):
        x, y = y, x
    if isinstance(x, Coset):
        if isinstance(y, Coset):
            return x == y
        el = env.element(y)
        return x.known and x.indeterminacy.is_trivial and x.contains(el)
    return env.element(x) == env.element(y)


def _zero(env: _Env, x) -> bool:
    if isinstance(x, Subgroup):
        return x.is_trivial
    if isinstance(x, Coset):
        return x.known and x.indeterminacy.is_trivial and x.representative.is_zero
    return env.element(x).is_zero


def _assert(env: _Env, kind: str, vals: list) -> tuple[bool, str]:
    if kind == "equal":
        return _equal(env, *vals), ""
    if kind == "zero":
        return _zero(env, vals[0]), ""
    if kind in ("subgroup", "proper"):
        a, b = vals
        inside = is_subgroup(a, b)
        if kind == "subgroup":
            return inside, ""
        return inside and not subgroup_equal(a, b), ""
    if kind == "order":
        x, k = vals
        o = x.order() if isinstance(x, Subgroup) else env.element(x).order()
        return o == k, f"order {o}"
    if kind == "wellformed":
        rep = check_well_defined(vals[0], env.db)
        return rep.ok, rep.render()
    if kind == "member":
        x, h = vals
        el = env.element(x)
        if isinstance(h, Coset):
            return h.known and h.contains(el), ""
        return member(h, el), ""
    raise ValueError(kind)


@dataclass
class StepResult:
    step: Step
    ok: bool
    output: str


@dataclass
class RunReport:
    results: list[StepResult]
    asserts: int
    passed: int
    failed_at: int | None

    @property
    def ok(self) -> bool:
        return self.failed_at is None

    def summary(self) -> str:
        if self.ok:
            return f"PASS {self.passed}/{self.asserts}"
        return f"FAIL at step {self.failed_at}"


_ERRORS = (
    PreconditionError,
    NotInDatabase,
    NodeMissing,
    NotInImage,
    StuckTerm,
    ParseError,
    ValueError,
    TypeError,
    LookupError,
)


def run_script(script: Script, db: Database, keep_going: bool = False) -> RunReport:
    env = _Env(db)
    results: list[StepResult] = []
    asserts = passed = 0
    failed_at = None
    for i, step in enumerate(script.steps, 1):
        ok, out = True, ""
        env.full = False
        try:
            if step.kind == "let":
                env.names[step.name] = env.value(step.args[0])
                out = f"{step.name} = {render_value(env.names[step.name])}"
            elif step.kind == "compute":
                out = render_value(env.value(step.args[0]))
            elif step.kind == "echo":
                out = step.text
            else:
                asserts += 1
                vals = [env.value(v) for v in step.args]
                ok, out = _assert(env, step.name, vals)
                passed += ok
        except _ERRORS as exc:
            ok, out = False, f"error: {exc}"
        if env.full and ok and out:
            out = f"{out}  [{FULL_LABEL}]"
        results.append(StepResult(step, ok, out))
        if not ok:
            if failed_at is None:
                failed_at = i
            if not keep_going:
                break
    return RunReport(results, asserts, passed, failed_at)


def shipped_scripts() -> dict[str, Path]:
    from importlib import resources

    root = resources.files("todacalc") / "data" / "scripts"
    return {p.name: Path(str(p)) for p in root.iterdir() if p.name.endswith(".td")}


def load_script(path: str | Path) -> Script:
    return parse_script(Path(path).read_text())

