# Combinatorial properties of a real PI run.
#
# For each pair of visited policies, an improvement state of the earlier one
# must point away from the later one (non-inclusion).  Each greedy step also
# passes a chain of neighbors at least as long as the number of switched
# states.

from pibound import AnnotatedSequence, check_acyclicity, check_non_inclusion, domination_dag, find_neighbor_chain
from pibound import generate_random_mdp, run_policy_iteration

mdp = generate_random_mdp(n=4, k=2, seed=21)
trace = run_policy_iteration(mdp)
seq = AnnotatedSequence(trace.items(), mdp.n, mdp.k)
print("non-inclusion ok:", check_non_inclusion(seq).ok)
print("acyclicity ok:   ", check_acyclicity(seq).ok)

dag = domination_dag(mdp)
print("strict neighbor edges:", dag.graph.number_of_edges(), "ties:", len(dag.ties))
for st, nxt in zip(trace.steps, trace.steps[1:]):
    d = len(st.improvement_set.states)
    chain = find_neighbor_chain(dag, st.policy, nxt.policy, d)
    print(f"{st.policy} -> {nxt.policy}: jumps over {chain}")
