"""Prefix-code exchanges of the binary Cantor set as automatic matrices."""
from selfsim.automatic import (
    ThompsonElement, psi_closure, thompson_compose, thompson_inverse, thompson_operator,
)
from selfsim.fp import FpMatrix
from selfsim.recursion import MarkedBasis

A = ThompsonElement(2, ((0, 0), (0, 1), (1,)), ((0,), (1, 0), (1, 1)))
Bx = ThompsonElement(2, ((0,), (1, 0), (1, 1)), ((1,), (0, 0), (0, 1)))
word = (0, 0, 1, 1, 0, 1)
print("A", word, "->", A(word))
print("A B acts as A after B:", thompson_compose(A, Bx)(word) == A(Bx(word)))

basis = MarkedBasis.binomial(2)
LA = thompson_operator(A, basis)
print("operator of A:", len(LA), "symbols")
for row in LA.truncate(8).a:
    print("  " + "".join(".1"[x] for x in row))
P = LA @ thompson_operator(thompson_inverse(A), basis)
print("L(A) L(A^-1) = I on 128x128:", P.truncate(128) == FpMatrix.identity(128, 2))
print("section closure of A:", len(psi_closure(A)), "maps")
