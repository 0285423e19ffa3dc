# The long pseudo-PI-sequence for n = k = 3.
#
# Action 2 (the highest index) is the special action.  All 27 policies are
# sorted by how many states are not yet on it; the subsequence then skips
# |T| policies after each pick.

from pibound import build_supersequence, closed_form_length, greedy_subsequence, verify_pseudo

o = build_supersequence(3, 3)
p = greedy_subsequence(o)
picked = set(p.subsequence_indices)
for i, (policy, t) in enumerate(o.items):
    mark = "*" if i in picked else " "
    print(f"{mark} {i:2d} {policy} T={sorted(t.pairs)}")

print("subsequence length:", len(p), "closed form:", closed_form_length(3, 3))
print("verified:", verify_pseudo(p).ok)

for n in range(2, 8):
    q = greedy_subsequence(build_supersequence(n, 2))
    print(f"n={n}, k=2: {len(q)} steps, closed form {float(closed_form_length(n, 2)):.2f}")
