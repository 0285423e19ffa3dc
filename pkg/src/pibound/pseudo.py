"""The tight pseudo-PI-sequence over all k**n policies.

Action ``k - 1`` plays the role of the special action: a policy's
improvement set switches every other state to it.  Sorting all policies
by decreasing improvement-set size (lexicographic within a size) gives a
supersequence with the non-inclusion property, and stepping through it by
``|T| + 1`` each time gives the long subsequence.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .analysis import AnnotatedSequence, Violation, ViolationReport, check_non_inclusion
from .mdp import MAX_POLICIES, BudgetExceeded, ImprovementSet, all_policies


def canonical_improvement_set(policy, k):
    return ImprovementSet(frozenset((s, k - 1) for s, a in enumerate(policy) if a != k - 1))


def build_supersequence(n, k, max_policies=MAX_POLICIES):
    if k ** n > max_policies:
        raise BudgetExceeded(f"k^n = {k ** n} exceeds the enumeration budget {max_policies}")
    items = [(p, canonical_improvement_set(p, k)) for p in all_policies(n, k)]
    # stable sort keeps lexicographic order inside each block
    items.sort(key=lambda it: -len(it[1]))
    return AnnotatedSequence(items, n, k)


@dataclass
class PseudoPiSequence:
    supersequence: AnnotatedSequence
    subsequence_indices: list

    @property
    def n(self):
        return self.supersequence.n

    @property
    def k(self):
        return self.supersequence.k

    @property
    def policies(self):
        return [self.supersequence.items[i][0] for i in self.subsequence_indices]

    def __len__(self):
        return len(self.subsequence_indices)


def greedy_subsequence(o):
    if not len(o):
        raise ValueError("supersequence is empty")
    idx = []
    i = 0
    while i < len(o):
        idx.append(i)
        i += len(o.items[i][1]) + 1
    return PseudoPiSequence(o, idx)


def closed_form_length(n, k):
    """Sum over d of C(n, d) (k-1)^d / (d+1), in closed form."""
    if n < 1 or k < 2:
        raise ValueError(f"need n >= 1 and k >= 2, got n={n}, k={k}")
    return Fraction(k ** (n + 1) - 1, (n + 1) * (k - 1))


def block_sizes(n, k):
    """Number of policies with d improvement pairs, for d = 0..n."""
    return [comb(n, d) * (k - 1) ** d for d in range(n + 1)]


def is_canonical(o):
    n, k = o.n, o.k
    if len(o) != k ** n:
        return False
    return all(t == canonical_improvement_set(p, k) for p, t in o.items)


def verify_pseudo(p):
    o = p.supersequence
    report = ViolationReport()
    if len({pol for pol, _ in o.items}) != len(o):
        report.violations.append(Violation((), "distinct", "supersequence repeats a policy"))
    for i in range(len(o) - 1):
        if len(o.items[i + 1][1]) > len(o.items[i][1]):
            report.violations.append(
                Violation((i, i + 1), "non-increasing", f"|T| rises from {len(o.items[i][1])} to {len(o.items[i + 1][1])}")
            )
    report.extend(check_non_inclusion(o))
    idx = p.subsequence_indices
    if idx and idx[0] != 0:
        report.violations.append(Violation((0,), "jumping", f"subsequence starts at {idx[0]}, not 0"))
    for a, b in zip(idx, idx[1:]):
        step = len(o.items[a][1]) + 1
        if b - a != step:
            report.violations.append(Violation((a, b), "jumping", f"advance {b - a} != |T| + 1 = {step}"))
    if idx and idx[-1] + len(o.items[idx[-1]][1]) + 1 < len(o):
        report.violations.append(Violation((idx[-1],), "jumping", "subsequence stops before the end"))
    if is_canonical(o):
        floor = closed_form_length(o.n, o.k).__floor__()
        if len(idx) < floor:
            report.violations.append(Violation((), "length", f"{len(idx)} < floor(closed form) = {floor}"))
    return report.sorted()


def neighbor_consistency_violations(o, limit=None):
    """Neighbor pairs ordered later without an improving switch.

    In a real MDP, a neighbor that strictly dominates a policy differs from
    it by a pair of its improvement set.  Returns ``(i, j, (s, a))`` triples
    where item ``j > i`` is a neighbor of item ``i`` via ``(s, a)`` but the
    pair is not in ``T`` of item ``i``.
    """
    pos = {p: i for i, (p, _) in enumerate(o.items)}
    out = []
    for i, (p, t) in enumerate(o.items):
        for s in range(o.n):
            for a in range(o.k):
                if a == p[s]:
                    continue
                q = p[:s] + (a,) + p[s + 1:]
                j = pos[q]
                if j > i and (s, a) not in t:
                    out.append((i, j, (s, a)))
                    if limit and len(out) >= limit:
                        return out
    return out
