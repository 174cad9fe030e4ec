"""A 2x2 matrix bracket at index 0 whose indeterminacy outgrows the summand formula.

Run with ``python demos/index_zero_bracket.py``.
"""

from todacalc import load_default
from todacalc.bracket import BracketSpec, check_well_defined, compare_formula, indeterminacy_full
from todacalc.wedge import wedge_group

db = load_default()
R = BracketSpec.parse("{[eta_13, sigma_13]; [sigma_14; eta_20]; [4*zeta_21]}_0", db)
print("bracket", R.render(), "in", R.ambient(db))

print()
print(check_well_defined(R, db).render())

# The left summand runs over pi_33 of the whole wedge. Besides the two
# spheres, the Whitehead product [j1,j2] lands on S^33 and contributes.
G = wedge_group(db, 33, R.a.col_space)
print()
print("pi_33(S^14 v S^20) =", G.shape())
for name in G.names:
    print("  ", name)

ind = indeterminacy_full(R, db)
print()
print("full indeterminacy:", ind.render(), f"({ind.shape()})")
print(compare_formula(R, db).render())
