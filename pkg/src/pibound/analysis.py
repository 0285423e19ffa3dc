"""Verifiers for the combinatorial properties of (pseudo-)PI-sequences.

The pairwise checks encode each pair ``(s, a)`` as bit ``s * k + a``.  For
item ``j`` the *allowed* mask holds its own action at every state plus every
pair of its improvement set; item ``i`` is *covered* by ``j`` when all bits of
a requirement mask of ``i`` are allowed by ``j``.

* non-inclusion fails for ``i < j`` iff ``(s, pi_i(s))`` is allowed by ``j``
  for every improvement state ``s`` of ``pi_i``;
* acyclicity fails iff the same holds for every state.  A policy equals
  ``pi_j (+) U`` for some ``U`` inside ``T_j`` exactly when each state where
  the two differ has its ``pi_i`` action in ``T_j``: take ``U`` to be those
  pairs, and conversely any such ``U`` must contain them.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .linalg import integer_rank
from .mdp import Comparison, ImprovementSet, compare, switch


class TheoremViolation(AssertionError):
    """A property that the theory guarantees failed on concrete data."""


@dataclass
class AnnotatedSequence:
    items: list
    n: int
    k: int

    def __post_init__(self):
        items = []
        for p, t in self.items:
            p = tuple(p)
            if len(p) != self.n or any(not 0 <= a < self.k for a in p):
                raise ValueError(f"policy {p} is not valid for n={self.n}, k={self.k}")
            if not isinstance(t, ImprovementSet):
                t = ImprovementSet(frozenset(t))
            items.append((p, t))
        self.items = items

    def __len__(self):
        return len(self.items)

    @property
    def policies(self):
        return [p for p, _ in self.items]


@dataclass(frozen=True)
class Violation:
    indices: tuple
    rule: str
    witness: str


@dataclass
class ViolationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def extend(self, other):
        self.violations.extend(other.violations)
        return self

    def sorted(self):
        self.violations.sort(key=lambda v: (v.indices, v.rule))
        return self


def _masks(seq, only_improvement_states):
    k = seq.k
    wide = seq.n * k > 64
    allow = []
    req = []
    for p, t in seq.items:
        a = 0
        for s, act in enumerate(p):
            a |= 1 << (s * k + act)
        for s, act in t.pairs:
            a |= 1 << (s * k + act)
        allow.append(a)
        states = t.states if only_improvement_states else range(seq.n)
        r = 0
        for s in states:
            r |= 1 << (s * k + p[s])
        req.append(r)
    if wide:
        return req, allow, None
    return np.array(req, dtype=np.uint64), np.array(allow, dtype=np.uint64), True


def _covered_pairs(seq, only_improvement_states):
    """All (i, j), i < j, where item i's requirement is allowed by item j."""
    req, allow, vectorised = _masks(seq, only_improvement_states)
    out = []
    m = len(seq)
    if vectorised:
        inv = ~allow
        for i in range(m - 1):
            hits = np.flatnonzero((inv[i + 1:] & req[i]) == 0)
            out.extend((i, i + 1 + int(j)) for j in hits)
    else:
        for i in range(m - 1):
            for j in range(i + 1, m):
                if req[i] & ~allow[j] == 0:
                    out.append((i, j))
    return out


def _scan(seq, i, j, states):
    p, _ = seq.items[i]
    q, tq = seq.items[j]
    parts = []
    for s in sorted(states):
        if p[s] == q[s]:
            parts.append(f"s{s}: same action {p[s]}")
        else:
            parts.append(f"s{s}: ({s},{p[s]}) in T of item {j}")
    return "; ".join(parts) if parts else "no improvement states"


def check_non_inclusion(seq):
    """Every earlier item has an improvement state whose action the later
    item neither shares nor can switch back to."""
    report = ViolationReport()
    for i, j in _covered_pairs(seq, True):
        report.violations.append(
            Violation((i, j), "non-inclusion", _scan(seq, i, j, seq.items[i][1].states))
        )
    return report.sorted()


def check_non_inclusion_k2(seq):
    """Binary-action form: no earlier improvement-state set inside a later one."""
    if seq.k != 2:
        raise ValueError(f"check_non_inclusion_k2 needs k = 2, got k = {seq.k}")
    report = ViolationReport()
    states = [t.states for _, t in seq.items]
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            if states[i] <= states[j]:
                report.violations.append(
                    Violation((i, j), "non-inclusion-k2", f"S_{i}={sorted(states[i])} within S_{j}={sorted(states[j])}")
                )
    return report


def check_acyclicity(seq):
    """No earlier item is reachable from a later one by switching inside the
    later item's improvement set."""
    report = ViolationReport()
    for i, j in _covered_pairs(seq, False):
        p, q = seq.items[i][0], seq.items[j][0]
        u = [(s, p[s]) for s in range(seq.n) if p[s] != q[s]]
        report.violations.append(Violation((i, j), "acyclicity", f"item {i} = item {j} (+) {u}"))
    return report.sorted()


def count_repeated_state_sets(seq):
    """Group items by improvement-state set and flag groups over (k-1)^d."""
    counts = Counter(t.states for _, t in seq.items)
    report = ViolationReport()
    for states, c in sorted(counts.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        limit = (seq.k - 1) ** len(states)
        if c > limit:
            idx = tuple(i for i, (_, t) in enumerate(seq.items) if t.states == states)
            report.violations.append(
                Violation(idx, "repeated-state-set", f"S={sorted(states)} occurs {c} times > (k-1)^d = {limit}")
            )
    return dict(counts), report.sorted()


def tensor_vector(policy, improvement, states, k):
    """Kronecker product over ``states`` of e[pi(s)] - e[T(s)]."""
    simple = improvement.simplified()
    vec = np.ones(1, dtype=np.int64)
    for s in states:
        e = np.zeros(k, dtype=np.int64)
        e[policy[s]] += 1
        e[simple.actions(s)[0]] -= 1
        vec = np.kron(vec, e)
    return vec


def tensor_rank_check(group, k):
    """Rank of the tensor vectors of a group sharing one improvement-state set.

    Returns ``(rank, ok)`` where ``ok`` means the vectors are linearly
    independent and there are at most (k-1)^d of them.
    """
    group = [(tuple(p), t if isinstance(t, ImprovementSet) else ImprovementSet(frozenset(t))) for p, t in group]
    if not group:
        return 0, True
    states = group[0][1].states
    if any(t.states != states for _, t in group):
        raise ValueError("group members do not share the same improvement-state set")
    order = sorted(states)
    rows = [tensor_vector(p, t, order, k).tolist() for p, t in group]
    rank = integer_rank(rows)
    size = len(group)
    return rank, rank == size and size <= (k - 1) ** len(order)


def state_set_groups(seq):
    groups = {}
    for p, t in seq.items:
        groups.setdefault(t.states, []).append((p, t))
    return groups


def find_neighbor_chain(dag, lo, hi, d):
    """Neighbor-to-neighbor chain from just above ``lo`` up to ``hi``.

    ``hi`` must equal ``lo (+) U`` for a well-defined ``U`` of size ``d``
    inside the improvement set of ``lo``.  The chain is built by repeatedly
    switching one state of the current top back to its ``lo`` action, picking
    a state where that switch is not an improvement.  Returns the chain,
    ending with ``hi``; raises :class:`TheoremViolation` if no chain exists.
    """
    lo, hi = tuple(lo), tuple(hi)
    values = dag.values
    t_lo = dag.improvement_set(lo)
    u = [(s, hi[s]) for s in range(len(lo)) if lo[s] != hi[s]]
    if len(u) != d or d < 1:
        raise ValueError(f"hi differs from lo in {len(u)} states, expected d = {d} >= 1")
    if not set(u) <= t_lo.pairs:
        raise ValueError("hi is not lo switched inside its improvement set")

    chain = [hi]
    top = hi
    remaining = dict(u)
    while len(remaining) > 1:
        t_top = dag.improvement_set(top)
        for s in sorted(remaining):
            if (s, lo[s]) not in t_top:
                break
        else:
            raise TheoremViolation(f"no state of {sorted(remaining)} can be peeled below {top}")
        top = switch(top, [(s, lo[s])])
        del remaining[s]
        chain.append(top)
    chain.reverse()

    v_lo, v_hi = values[lo], values[hi]
    for idx, p in enumerate(chain):
        if compare(values[p], v_lo) is not Comparison.STRICTLY_GREATER:
            raise TheoremViolation(f"chain policy {p} does not strictly dominate {lo}")
        if not compare(values[p], v_hi).is_le:
            raise TheoremViolation(f"chain policy {p} is not dominated by {hi}")
        if idx and sum(a != b for a, b in zip(p, chain[idx - 1])) != 1:
            raise TheoremViolation(f"{chain[idx - 1]} and {p} are not neighbors")
        if idx and not compare(values[p], values[chain[idx - 1]]).is_ge:
            raise TheoremViolation(f"chain is not monotone at {p}")
    return chain


def verify_trace_properties(trace, dag=None):
    """All sequence checks on a real PI trace; neighbor chains need ``dag``."""
    seq = AnnotatedSequence(trace.items(), trace.n, trace.k)
    report = ViolationReport()
    report.extend(check_non_inclusion(seq))
    report.extend(check_acyclicity(seq))
    if seq.k == 2:
        report.extend(check_non_inclusion_k2(seq))
    _, rep = count_repeated_state_sets(seq)
    report.extend(rep)
    for states, group in sorted(state_set_groups(seq).items(), key=lambda kv: sorted(kv[0])):
        rank, ok = tensor_rank_check(group, seq.k)
        if not ok:
            report.violations.append(
                Violation((), "tensor-rank", f"S={sorted(states)}: rank {rank} for {len(group)} policies")
            )
    if dag is not None:
        for i, st in enumerate(trace.steps[:-1]):
            d = len(st.improvement_set.states)
            try:
                chain = find_neighbor_chain(dag, st.policy, trace.steps[i + 1].policy, d)
            except (TheoremViolation, ValueError) as exc:
                report.violations.append(Violation((i, i + 1), "neighbor-chain", str(exc)))
                continue
            if len(chain) < d:
                report.violations.append(Violation((i, i + 1), "neighbor-chain", f"chain of {len(chain)} < {d}"))
    return report.sorted()
