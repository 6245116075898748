"""Level matrices of the Grigorchuk generators in the binomial basis.

Prints the 8x8 matrices, checks uni-triangularity up to level 9 and writes
a 512x512 PBM of b when given an output path:

    python3 gallery/01_grigorchuk_matrices.py b.pbm
"""
import sys

from selfsim.automatic import render
from selfsim.mealy import load_group
from selfsim.recursion import MarkedBasis, level_matrix

G = load_group("grigorchuk")
B = MarkedBasis.binomial(2)

for name in "abcd":
    M = level_matrix(G.generators[name], 3, B)
    print(f"{name}:")
    for row in M.a:
        print("  " + "".join(".1"[x] for x in row))

for n in range(1, 10):
    assert all(level_matrix(G.generators[k], n, B).is_upper_unitriangular() for k in "abcd")
print("upper uni-triangular through level 9")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w", encoding="utf-8") as fh:
        fh.write(render(level_matrix(G.generators["b"], 9, B)))
    print("wrote", sys.argv[1])
