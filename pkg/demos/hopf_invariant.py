"""The Hopf invariant of a bracket on S^6 at index 2, column by column.

Run with ``python demos/hopf_invariant.py``.
"""

from todacalc import load_default
from todacalc.bracket import BracketSpec, check_well_defined
from todacalc.ehp import EHPNode, h_formula, p_inverse
from todacalc.rewrite import normalize
from todacalc.script import format_step, load_script, run_script, shipped_scripts
from todacalc.syntax import parse_expr

db = load_default()
T = BracketSpec.parse("{[nu_6]; [eta_7, sigma'_7.eta_14]; [eta_8.kappa_9; nubar_15]}_2", db)
print("bracket", T.render())
print(check_well_defined(T, db).render())

# The formula desuspends the row once: f = nu_5. Each column needs a P-preimage.
for text, node in (("nu_5.eta_8", EHPNode(db, 5, 9)), ("nu_5.sigma'_8.eta_15", EHPNode(db, 5, 16))):
    y = normalize(parse_expr(text, db.gens), db)
    print(f"P^-1({text}) =", p_inverse(node, y).render())

# second column: the bound {sigma_11} composes with nubar_18 to zero
print("H =", h_formula(T, db).render())

# The shipped derivation goes on to lower the index and pin down the bracket
# {nu_6, eta_9, eta_10.kappa_11} that contains T.
print()
rep = run_script(load_script(shipped_scripts()["prop_5_1.td"]), db)
for r in rep.results[-6:]:
    print(" ", "ok  " if r.ok else "FAIL", format_step(r.step))
print(rep.summary())
