"""Tableaux, heights and principal columns."""
import numpy as np

from selfsim.fp import ReducedPoly
from selfsim.mealy import load_group
from selfsim.recursion import MarkedBasis, level_matrix
from selfsim.triangular import (
    alpha, height, is_uniserial, principal_columns_from_matrix, reconstruct_column, tableau_of,
)

add = load_group("adding").generators["a"]
print("tableau of the adding machine:")
print(tableau_of(add, 4))

f = ReducedPoly.from_table(np.array([[0, 1], [1, 1]]), 2)
print(f"height of {f}:", {m: height(f, m) for m in ("brute", "R", "T", "p2")})

d = load_group("grigorchuk").generators["d"]
cols = principal_columns_from_matrix(d, 4)
M = level_matrix(d, 4, MarkedBasis.monomial(2)).a
print("columns of d rebuilt from columns 1, 2, 4, 8:",
      all(reconstruct_column(cols, j, 2) == list(M[:, j]) for j in range(16)))

for name in ("grigorchuk", "gupta_sidki"):
    grp = load_group(name)
    ok, w = is_uniserial(list(grp.generators.values()))
    print(f"{name}: uniserial={ok}", [w.name_for(k) for k in range(6)])
print("alpha of the Gupta-Sidki generators:", [str(alpha(g)) for g in load_group("gupta_sidki").generators.values()])
