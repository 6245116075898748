"""Generating series of Grigorchuk diagonals over F_2."""
from selfsim.mealy import load_group
from selfsim.recursion import MarkedBasis
from selfsim.series import (
    diagonal_series, fit_closed_form, grigorchuk_closed_forms, grigorchuk_diagonal_system,
    grigorchuk_relation, verify_algebraic,
)

G = load_group("grigorchuk")
N = 64
for name in "BCD":
    X = diagonal_series(G.generators[name.lower()], 1, N, MarkedBasis.binomial(2))
    ok = verify_algebraic(X, grigorchuk_relation(name, N), 56)
    print(f"{name}1 = {X}")
    print(f"  s^7 {name}1^8 + {name}1 + r(s) = 0 mod s^56: {ok}")

system = grigorchuk_diagonal_system(8, 256)
forms = grigorchuk_closed_forms(8)
for n in range(1, 9):
    for name in "BCD":
        f = forms[(name, n)]
        assert fit_closed_form(system[(name, n)], system[("B", 1)]) == f
        print(f"{name}_{n} = {f}")
