"""First diagonals as Toeplitz sequences, and their decimation kernels."""
from selfsim.automatic import from_group_ring
from selfsim.mealy import load_group
from selfsim.recursion import MarkedBasis
from selfsim.sequences import kernel, thue_morse, toeplitz_from_alpha
from selfsim.triangular import alpha, first_diagonal, first_diagonal_oracle

G = load_group("grigorchuk")
for name in "abcd":
    g = G.generators[name]
    a = alpha(g)
    diag = first_diagonal(g, 24)
    assert diag == first_diagonal_oracle(g, 24)
    print(f"alpha({name}) = {a}   diagonal: {''.join(map(str, diag))}")

# the b diagonal as an automatic sequence
b = G.generators["b"]
T = toeplitz_from_alpha(alpha(b), 2)
print("Toeplitz system for b:", len(T), "symbols;", [T.term(n) for n in range(1, 17)])

M = from_group_ring(b, MarkedBasis.binomial(2))
K = kernel(lambda n: M.entry(n, n + 1), 2, prefix_len=64)
print("kernel of the b diagonal (read off the infinite matrix):", len(K), "subsequences")

tm = thue_morse()
print("Thue-Morse:", "".join(str(tm.term(n)) for n in range(32)))
print("Thue-Morse kernel size:", len(kernel(lambda n: bin(n).count("1") % 2, 2, 32)))
