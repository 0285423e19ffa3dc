"""Greedy Policy Iteration with a full per-iteration trace."""

from dataclasses import dataclass, field

from .formats import dump_trace, mdp_digest
from .mdp import Comparison, ImprovementSet, compare, evaluate_policy, improvement_set_fast, lookahead_gains, switch

GREEDY = "greedy"


class IterationCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceStep:
    policy: tuple
    value: object
    improvement_set: ImprovementSet
    chosen_switch: tuple = ()


@dataclass
class PiTrace:
    steps: list = field(default_factory=list)
    mdp_digest: str = ""
    update_rule: str = GREEDY
    n: int = 0
    k: int = 0

    def __len__(self):
        return len(self.steps)

    @property
    def policies(self):
        return [st.policy for st in self.steps]

    @property
    def final_policy(self):
        return self.steps[-1].policy

    def items(self):
        return [(st.policy, st.improvement_set) for st in self.steps]

    def dumps(self):
        header = {"mdp_digest": self.mdp_digest, "update_rule": self.update_rule, "n": self.n, "k": self.k}
        records = [
            {
                "policy": st.policy,
                "value": st.value,
                "improvement_set": st.improvement_set.pairs,
                "chosen_switch": st.chosen_switch,
            }
            for st in self.steps
        ]
        return dump_trace(header, records)


def trace_from_file(tf):
    """Rebuild a PiTrace from a parsed trace file."""
    h = tf.header
    trace = PiTrace(mdp_digest=h.get("mdp_digest", ""), update_rule=h.get("update_rule", GREEDY), n=h["n"], k=h["k"])
    for rec in tf.records:
        trace.steps.append(
            TraceStep(
                tuple(rec["policy"]),
                rec.get("value"),
                ImprovementSet(frozenset(map(tuple, rec["improvement_set"]))),
                tuple(tuple(p) for p in rec.get("chosen_switch", ())),
            )
        )
    return trace


def _greedy_choice(mdp, policy, value, improvement):
    gains = lookahead_gains(mdp, policy, value)
    chosen = []
    for s in sorted(improvement.states):
        # max gain, ties to the lowest action index
        best = max(improvement.actions(s), key=lambda a: (gains[s, a], -a))
        chosen.append((s, best))
    return tuple(chosen)


def greedy_step(mdp, policy, value=None, improvement=None):
    """One greedy PI step: switch every improvement state.

    At each improvement state the action with the largest one-step
    lookahead value is taken, ties going to the lowest index.
    """
    policy = tuple(policy)
    if value is None:
        value = evaluate_policy(mdp, policy)
    if improvement is None:
        improvement = improvement_set_fast(mdp, policy, value)
    if not improvement:
        raise ValueError("empty improvement set: policy is already optimal")
    u = _greedy_choice(mdp, policy, value, improvement)
    return switch(policy, u), u


def run_policy_iteration(mdp, start=None, max_iterations=None):
    """Run greedy PI from ``start`` (all zeros by default) to convergence."""
    if start is None:
        start = (0,) * mdp.n
    policy = tuple(start)
    mdp.check_policy(policy)
    if max_iterations is None:
        max_iterations = mdp.num_policies
    trace = PiTrace(mdp_digest=mdp_digest(mdp), update_rule=GREEDY, n=mdp.n, k=mdp.k)
    while True:
        value = evaluate_policy(mdp, policy)
        improvement = improvement_set_fast(mdp, policy, value)
        if not improvement:
            trace.steps.append(TraceStep(policy, value, improvement, ()))
            return trace
        if len(trace.steps) + 2 > max_iterations:
            raise IterationCapExceeded(f"no convergence within {max_iterations} policies")
        nxt, u = greedy_step(mdp, policy, value, improvement)
        trace.steps.append(TraceStep(policy, value, improvement, u))
        policy = nxt


def check_trace(trace):
    """Structural invariants of a recorded trace; returns a list of problems."""
    problems = []
    steps = trace.steps
    if not steps:
        return ["empty trace"]
    for i, st in enumerate(steps):
        u = st.chosen_switch
        states = [s for s, _ in u]
        if len(set(states)) != len(states):
            problems.append(f"step {i}: chosen switch is not well-defined")
        if not set(map(tuple, u)) <= st.improvement_set.pairs:
            problems.append(f"step {i}: chosen switch not contained in the improvement set")
        if i + 1 < len(steps):
            if trace.update_rule == GREEDY and set(states) != set(st.improvement_set.states):
                problems.append(f"step {i}: greedy switch does not cover all improvement states")
            if switch(st.policy, u) != steps[i + 1].policy:
                problems.append(f"step {i}: next policy is not policy (+) chosen switch")
            if st.value is not None and steps[i + 1].value is not None:
                c = compare(steps[i + 1].value, st.value)
                if c is not Comparison.STRICTLY_GREATER:
                    problems.append(f"step {i}: value does not strictly increase ({c.name})")
    if steps[-1].improvement_set:
        problems.append("last step has a non-empty improvement set")
    if len(set(trace.policies)) != len(steps):
        problems.append("a policy is visited twice")
    return problems
