"""Infinite matrices given by finitely many decimation symbols."""
from selfsim.automatic import from_group_ring, shift_operators
from selfsim.mealy import load_group
from selfsim.recursion import MarkedBasis

B = MarkedBasis.binomial(2)
J = from_group_ring(load_group("adding").generators["a"], B)
print("adding machine:", len(J), "symbols; top corner")
for row in J.truncate(8).a:
    print("  " + "".join(".1"[x] for x in row))

G = load_group("grigorchuk")
mats = {k: from_group_ring(G.generators[k], B) for k in "abcd"}
for k, M in mats.items():
    print(f"{k}: {len(M)} symbols, {len(M.minimized())} after minimization")

# products stay automatic, and relations of the group hold exactly
assert (mats["b"] @ mats["c"]) == mats["d"]
assert (mats["a"] @ mats["a"]).is_identity()
ad = mats["a"] @ mats["d"]
print("(ad)^4 is the identity:", (ad @ ad @ ad @ ad).is_identity())

# entries far from the corner cost one digit walk
print("entry (10^6, 10^6 + 1) of b:", mats["b"].entry(10**6, 10**6 + 1))

T, Tp = shift_operators(B)
print("sum T_i T_i' = I:", (T[0] @ Tp[0] + T[1] @ Tp[1]).is_identity())
