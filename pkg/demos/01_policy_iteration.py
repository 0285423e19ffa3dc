# Greedy policy iteration on a small random MDP, with exact values.
#
# Every value below is a Fraction: no tolerance is involved when deciding
# whether one policy dominates another.

from pibound import brute_force_optimal, evaluate_all, generate_random_mdp, run_policy_iteration

mdp = generate_random_mdp(n=5, k=3, seed=4)
trace = run_policy_iteration(mdp)

for i, step in enumerate(trace.steps):
    print(f"pi_{i} = {step.policy}  |T| = {len(step.improvement_set)}  switch {list(step.chosen_switch)}")
    print("   v =", [str(x) for x in step.value.values])

# The last policy has an empty improvement set, so it is optimal.  Check it
# against exhaustive enumeration of all 3^5 policies.
values = evaluate_all(mdp)
best = brute_force_optimal(mdp, values)
print("brute force optimum:", best, "same value:", values[best] == trace.steps[-1].value)
