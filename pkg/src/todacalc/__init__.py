"""Symbolic calculus for 2-local homotopy groups of spheres and matrix Toda brackets."""

from .database import Database, NotInDatabase, load_database, load_default, lookup_group
from .groups import Element, GroupPresentation, Hom, Subgroup, member, span, subgroup_equal, subgroup_sum
from .rewrite import StuckTerm, normalize
from .terms import Expr, Term, compose, scalar_mul, suspend

__all__ = [
    "Database",
    "NotInDatabase",
    "load_database",
    "load_default",
    "lookup_group",
    "Element",
    "GroupPresentation",
    "Hom",
    "Subgroup",
    "member",
    "span",
    "subgroup_equal",
    "subgroup_sum",
    "StuckTerm",
    "normalize",
    "Expr",
    "Term",
    "compose",
    "scalar_mul",
    "suspend",
]

__version__ = "0.1.0"
