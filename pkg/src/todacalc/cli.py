"""Command-line front end.

Exit codes: 0 on success, 1 on data or parse errors and failed checks,
2 when a mathematical precondition of the requested computation fails.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .bracket import (
    FULL_LABEL,
    BracketSpec,
    PreconditionError,
    check_well_defined,
    compare_formula,
    indeterminacy,
    indeterminacy_full,
    indeterminacy_summands,
)
from .database import Database, DatabaseError, NotInDatabase, default_path, load_database, lookup_group
from .ehp import NodeMissing, NotInImage, h_formula
from .rewrite import StuckTerm, normalize_traced
from .script import ScriptError, format_step, load_script, run_script, shipped_scripts
from .syntax import ParseError, parse_expr
from .terms import ComposabilityError, SuspensionError
from .wedge import MatrixError

ENV_DB = "TODACALC_DB"

OK, DATA_ERROR, PRECONDITION = 0, 1, 2

_DATA_ERRORS = (
    ParseError,
    DatabaseError,
    NotInDatabase,
    NodeMissing,
    StuckTerm,
    ScriptError,
    ComposabilityError,
    MatrixError,
    OSError,
)


class Output:
    """Plain lines, or tab-separated records with a stable field order."""

    def __init__(self, machine: bool, stream=None):
        self.machine = machine
        self.stream = stream or sys.stdout

    def text(self, line: str = ""):
        if not self.machine:
            print(line, file=self.stream)

    def record(self, kind: str, *fields):
        if self.machine:
            clean = [str(f).replace("\t", " ").replace("\n", " | ") for f in fields]
            print("\t".join([kind, *clean]), file=self.stream)


def resolve_db_path(flag: str | None, environ=os.environ) -> Path:
    """The flag wins over the environment variable, which wins over the bundled file."""
    if flag:
        return Path(flag)
    if environ.get(ENV_DB):
        return Path(environ[ENV_DB])
    return default_path()


def open_db(flag: str | None) -> Database:
    path = resolve_db_path(flag)
    with open(path, encoding="utf-8") as fh:
        return load_database(fh)


def _group_label(g) -> str:
    return f"pi_{g.degree}({g.target})"


def cmd_eval(args, out: Output) -> int:
    db = open_db(args.db)
    e = parse_expr(args.expr, db.gens)
    if e is None:
        raise ParseError("expression has no degree; write 0_m^(k)", args.expr)
    el, used = normalize_traced(e, db)
    g = el.group
    shape = g.shape()
    cite = g.citation or g.status
    try:
        order = el.order()
        order_s = "inf" if order is None else str(order)
    except ValueError:
        order_s = "?"
    out.text(f"{el.render()} in {_group_label(g)}")
    out.text(f"  group {shape}  [{cite}]")
    out.text(f"  order {order_s}")
    for r in used:
        out.text(f"  used {r.render()}  [{r.citation}]")
    out.record("eval", el.render(), _group_label(g), shape, order_s, "; ".join(f"{r.render()} [{r.citation}]" for r in used))
    return OK


def cmd_group(args, out: Output) -> int:
    db = open_db(args.db)
    g = lookup_group(db, args.N, args.m)
    out.text(f"{_group_label(g)} = {g.shape()}  [{g.citation or g.status}]")
    for name, o in zip(g.names, g.orders):
        out.text(f"  {name}  order {'inf' if o is None else o}")
    out.record("group", _group_label(g), g.shape(), " ".join(g.names), g.citation or g.status)
    return OK


def cmd_bracket(args, out: Output) -> int:
    db = open_db(args.db)
    spec = BracketSpec.parse(args.spec, db)
    wanted = [w for w in ("check", "ind", "ind_full", "hformula") if getattr(args, w)] or ["check"]
    out.text(f"bracket {spec.render()} in {_group_label(spec.ambient(db))}")
    status = OK
    for w in wanted:
        if w == "check":
            rep = check_well_defined(spec, db)
            out.text(rep.render())
            out.record("check", "ok" if rep.ok else "fail", "; ".join(f"{r.render()} [{r.citation}]" for r in rep.relations))
            if not rep.ok:
                status = PRECONDITION
        elif w == "ind":
            parts = indeterminacy_summands(spec, db)
            for p in parts:
                out.text(f"  {p.render()}")
            ind = indeterminacy(spec, db)
            out.text(f"indeterminacy {ind.render()} ({ind.shape()})")
            out.record("ind", ind.render(), ind.shape())
        elif w == "ind_full":
            ind = indeterminacy_full(spec, db)
            label = f"  [{FULL_LABEL}]" if spec.n == 0 else ""
            out.text(f"full indeterminacy {ind.render()} ({ind.shape()}){label}")
            out.record("ind-full", ind.render(), ind.shape(), FULL_LABEL if spec.n == 0 else "")
            if spec.n == 0:
                try:
                    cmp = compare_formula(spec, db)
                except (PreconditionError, NotInDatabase):
                    continue
                out.text(cmp.render())
                out.record("compare", "agree" if cmp.agree else "strict" if cmp.strict else "differ", cmp.formula.render())
        else:
            try:
                c = h_formula(spec, db)
            except NotInImage as exc:
                raise PreconditionError(str(exc)) from None
            except ValueError as exc:
                if isinstance(exc, _DATA_ERRORS):
                    raise
                raise PreconditionError(str(exc)) from None
            out.text(f"H = {c.render()}")
            out.record("hformula", c.render())
    return status


def _script_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    shipped = shipped_scripts()
    if name in shipped:
        return shipped[name]
    if name + ".td" in shipped:
        return shipped[name + ".td"]
    raise FileNotFoundError(f"no script {name!r}; shipped: {', '.join(sorted(shipped))}")


def cmd_run(args, out: Output) -> int:
    db = open_db(args.db)
    script = load_script(_script_path(args.script))
    rep = run_script(script, db, keep_going=args.keep_going)
    for i, r in enumerate(rep.results, 1):
        mark = "ok" if r.ok else "FAIL"
        if args.verbose or not r.ok or r.step.kind in ("echo", "compute"):
            out.text(f"[{i}] {mark}  {format_step(r.step)}")
            if r.output and (args.verbose or r.step.kind == "compute" or not r.ok):
                for line in r.output.splitlines():
                    out.text(f"      {line}")
        out.record("step", i, mark, format_step(r.step), r.output)
    out.text(rep.summary())
    out.record("summary", rep.summary())
    return OK if rep.ok else DATA_ERROR


def cmd_checkdb(args, out: Output) -> int:
    from .validate import validate_database

    db = open_db(args.path or args.db)
    rep = validate_database(db)
    out.text(rep.render(verbose=args.verbose))
    for f in rep.findings:
        out.record("finding", f.kind, f.where, f.message)
    out.record("summary", "PASS" if rep.ok else "FAIL", len(rep.checked), len(rep.findings), len(rep.skipped))
    return OK if rep.ok else DATA_ERROR


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--db", default=argparse.SUPPRESS, help=f"database file (overrides ${ENV_DB})")
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--machine", action="store_true", default=argparse.SUPPRESS, help="tab-separated records")

    p = argparse.ArgumentParser(prog="todacalc", parents=[common], description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="normalize a term")
    s.add_argument("expr")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("group", parents=[common], help="show pi_N(S^m)")
    s.add_argument("N", type=int)
    s.add_argument("m", type=int)
    s.set_defaults(func=cmd_group)

    s = sub.add_parser("bracket", parents=[common], help="analyze a bracket spec")
    s.add_argument("spec")
    s.add_argument("--check", action="store_true", help="well-definedness (default)")
    s.add_argument("--ind", action="store_true", help="summand formula, needs n >= 1")
    s.add_argument("--ind-full", dest="ind_full", action="store_true", help="full indeterminacy")
    s.add_argument("--hformula", action="store_true", help="Hopf invariant via P-preimages")
    s.set_defaults(func=cmd_bracket)

    s = sub.add_parser("run", parents=[common], help="run a derivation script")
    s.add_argument("script", help="path, or name of a shipped script")
    s.add_argument("--keep-going", action="store_true")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("checkdb", parents=[common], help="validate a database")
    s.add_argument("path", nargs="?")
    s.set_defaults(func=cmd_checkdb)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("db", None), ("verbose", False), ("machine", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    out = Output(args.machine)
    try:
        return args.func(args, out)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        out.record("error", "precondition", exc)
        return PRECONDITION
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        out.record("error", "data", exc)
        return DATA_ERROR
    except SuspensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        out.record("error", "precondition", exc)
        return PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
