"""Exact-arithmetic MDPs: evaluation, domination, switching, improvement sets.

Policies are plain tuples of 0-based action indices.  Value vectors are
kept as integer numerators over one positive common denominator so that
comparisons stay exact without paying for ``Fraction`` normalisation on
every operation.
"""

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import networkx as nx
import numpy as np

from .linalg import solve_integer

#: default guard on k**n for operations that enumerate the policy space
MAX_POLICIES = 2 ** 24


class MdpError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Mdp:
    """A finite MDP with ``k`` actions in each of ``n`` states.

    ``transitions[s][a][t]`` is the probability of moving from ``s`` to ``t``
    under action ``a``; ``rewards[s][a]`` the immediate reward.  All entries
    are ``Fraction`` and rows must sum to exactly 1.
    """

    n: int
    k: int
    transitions: tuple
    rewards: tuple
    discount: Fraction

    def __post_init__(self):
        n, k = self.n, self.k
        if n < 1:
            raise MdpError(f"n must be positive, got {n}")
        if k < 2:
            raise MdpError(f"k must be at least 2, got {k}")
        g = Fraction(self.discount)
        if not 0 < g < 1:
            raise MdpError(f"discount must lie in (0, 1), got {g}")
        object.__setattr__(self, "discount", g)
        if len(self.transitions) != n or len(self.rewards) != n:
            raise MdpError("transitions and rewards need one entry per state")
        trans = []
        rews = []
        for s in range(n):
            if len(self.transitions[s]) != k or len(self.rewards[s]) != k:
                raise MdpError(f"state {s} does not expose exactly {k} actions")
            rows = []
            for a in range(k):
                row = tuple(Fraction(p) for p in self.transitions[s][a])
                if len(row) != n:
                    raise MdpError(f"transition row ({s}, {a}) has length {len(row)}, expected {n}")
                if any(p < 0 or p > 1 for p in row):
                    raise MdpError(f"transition row ({s}, {a}) has an entry outside [0, 1]")
                total = sum(row)
                if total != 1:
                    raise MdpError(f"transition row ({s}, {a}) row sum {total} != 1")
                rows.append(row)
            trans.append(tuple(rows))
            rews.append(tuple(Fraction(r) for r in self.rewards[s]))
        object.__setattr__(self, "transitions", tuple(trans))
        object.__setattr__(self, "rewards", tuple(rews))

    @property
    def num_policies(self):
        return self.k ** self.n

    @cached_property
    def _integer_rows(self):
        # row (s, a) of (I - gamma P) and r, scaled by the lcm of their denominators
        g = self.discount
        out = {}
        for s in range(self.n):
            for a in range(self.k):
                coeffs = [(1 if t == s else 0) - g * p for t, p in enumerate(self.transitions[s][a])]
                r = self.rewards[s][a]
                scale = math.lcm(*(c.denominator for c in coeffs), r.denominator)
                out[s, a] = ([int(c * scale) for c in coeffs], int(r * scale), scale)
        return out

    def check_policy(self, policy):
        if len(policy) != self.n:
            raise MdpError(f"policy has length {len(policy)}, expected {self.n}")
        for a in policy:
            if not 0 <= a < self.k:
                raise MdpError(f"action {a} out of range for k={self.k}")


class ValueVector:
    """Exact value vector ``num[i] / den`` with ``den > 0``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = [-x for x in num], -den
        self.num = tuple(num)
        self.den = den

    @classmethod
    def from_fractions(cls, values):
        values = [Fraction(v) for v in values]
        den = math.lcm(*(v.denominator for v in values)) if values else 1
        return cls([v.numerator * (den // v.denominator) for v in values], den)

    @property
    def values(self):
        return tuple(Fraction(x, self.den) for x in self.num)

    def __len__(self):
        return len(self.num)

    def __getitem__(self, i):
        return Fraction(self.num[i], self.den)

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other):
        if not isinstance(other, ValueVector):
            return NotImplemented
        if len(self.num) != len(other.num):
            return False
        return all(x * other.den == y * self.den for x, y in zip(self.num, other.num))

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return "ValueVector(" + ", ".join(str(v) for v in self.values) + ")"


class Comparison(enum.Enum):
    """Outcome of comparing two value vectors componentwise.

    ``compare`` only ever returns the four resolved outcomes; the two
    non-strict members name the predicate groups used in assertions.
    """

    STRICTLY_LESS = "<"
    LESS_EQUAL = "<="
    EQUAL = "=="
    STRICTLY_GREATER = ">"
    GREATER_EQUAL = ">="
    INCOMPARABLE = "||"

    @property
    def is_ge(self):
        return self in (Comparison.EQUAL, Comparison.STRICTLY_GREATER, Comparison.GREATER_EQUAL)

    @property
    def is_le(self):
        return self in (Comparison.EQUAL, Comparison.STRICTLY_LESS, Comparison.LESS_EQUAL)


def compare(v, v2):
    """Compare ``v`` against ``v2``: STRICTLY_GREATER means ``v`` strictly dominates."""
    if not isinstance(v, ValueVector):
        v = ValueVector.from_fractions(v)
    if not isinstance(v2, ValueVector):
        v2 = ValueVector.from_fractions(v2)
    if len(v.num) != len(v2.num):
        raise ValueError(f"length mismatch: {len(v.num)} vs {len(v2.num)}")
    greater = less = False
    d1, d2 = v.den, v2.den
    for x, y in zip(v.num, v2.num):
        lhs, rhs = x * d2, y * d1
        if lhs > rhs:
            greater = True
        elif lhs < rhs:
            less = True
        if greater and less:
            return Comparison.INCOMPARABLE
    if greater:
        return Comparison.STRICTLY_GREATER
    if less:
        return Comparison.STRICTLY_LESS
    return Comparison.EQUAL


@dataclass(frozen=True)
class ImprovementSet:
    """Improving (state, action) pairs of a policy, with their states."""

    pairs: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset((int(s), int(a)) for s, a in self.pairs))

    @property
    def states(self):
        return frozenset(s for s, _ in self.pairs)

    def actions(self, s):
        return sorted(a for t, a in self.pairs if t == s)

    def __contains__(self, pair):
        return tuple(pair) in self.pairs

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __bool__(self):
        return bool(self.pairs)

    def simplified(self):
        """One pair per improvement state, keeping the lowest action."""
        return ImprovementSet(frozenset((s, self.actions(s)[0]) for s in self.states))


def switch(policy, u):
    """Return ``policy`` with the action of each state in ``u`` replaced."""
    out = list(policy)
    seen = set()
    for s, a in u:
        if s in seen:
            raise ValueError(f"switch set is not well-defined: state {s} repeated")
        seen.add(s)
        out[s] = a
    return tuple(out)


def evaluate_policy(mdp, policy):
    """Discounted value of ``policy``: the exact solution of (I - gamma P) v = r."""
    mdp.check_policy(policy)
    rows = mdp._integer_rows
    a = []
    b = []
    for s, act in enumerate(policy):
        row, rhs, _ = rows[s, act]
        a.append(row)
        b.append(rhs)
    y, d = solve_integer(a, b)
    return ValueVector(y, d)


def all_policies(n, k):
    """Every policy in lexicographic order."""
    return itertools.product(range(k), repeat=n)


def _check_budget(mdp, max_policies):
    if mdp.num_policies > max_policies:
        raise BudgetExceeded(f"k^n = {mdp.num_policies} exceeds the enumeration budget {max_policies}")


def evaluate_all(mdp, max_policies=MAX_POLICIES):
    """Value vector of every policy, keyed by policy, in lexicographic order."""
    _check_budget(mdp, max_policies)
    return {p: evaluate_policy(mdp, p) for p in all_policies(mdp.n, mdp.k)}


def improvement_set_oracle(mdp, policy, values=None):
    """Improvement set by definition: evaluate each single switch and compare.

    ``values`` may be a precomputed policy -> ValueVector table (as returned
    by :func:`evaluate_all`); missing entries are evaluated on demand.
    """
    def value(p):
        if values is not None and p in values:
            return values[p]
        return evaluate_policy(mdp, p)

    policy = tuple(policy)
    base = value(policy)
    pairs = []
    for s in range(mdp.n):
        for a in range(mdp.k):
            if a == policy[s]:
                continue
            if compare(value(switch(policy, [(s, a)])), base) is Comparison.STRICTLY_GREATER:
                pairs.append((s, a))
    return ImprovementSet(frozenset(pairs))


def lookahead_gains(mdp, policy, value=None):
    """One-step gains ``r(s,a) + gamma P(s,a) v - v(s)`` for every pair, exact."""
    if value is None:
        value = evaluate_policy(mdp, policy)
    gains = {}
    for (s, a), (row, rhs, scale) in mdp._integer_rows.items():
        acc = rhs * value.den - sum(c * x for c, x in zip(row, value.num))
        gains[s, a] = Fraction(acc, value.den * scale)
    return gains


def improvement_set_fast(mdp, policy, value=None):
    """Improvement set via one-step lookahead on the policy's own value.

    ``(s, a)`` improves iff ``r(s,a) + gamma P(s,a) v > v(s)``.  The test is
    done on integers: rows are scaled by a positive factor, which preserves
    the sign.
    """
    policy = tuple(policy)
    if value is None:
        value = evaluate_policy(mdp, policy)
    rows = mdp._integer_rows
    num, den = value.num, value.den
    pairs = []
    for s in range(mdp.n):
        for a in range(mdp.k):
            if a == policy[s]:
                continue
            row, rhs, _ = rows[s, a]
            if rhs * den > sum(c * x for c, x in zip(row, num)):
                pairs.append((s, a))
    return ImprovementSet(frozenset(pairs))


def improvement_set_from_values(values, policy, k):
    """Improvement set read off a full value table (no MDP needed)."""
    policy = tuple(policy)
    base = values[policy]
    pairs = []
    for s in range(len(policy)):
        for a in range(k):
            if a != policy[s] and compare(values[switch(policy, [(s, a)])], base) is Comparison.STRICTLY_GREATER:
                pairs.append((s, a))
    return ImprovementSet(frozenset(pairs))


def brute_force_optimal(mdp, values=None, max_policies=MAX_POLICIES):
    """Optimal policy by exhaustive evaluation.

    The optimal value is the componentwise maximum over all policies; the
    lexicographically smallest policy attaining it is returned.
    """
    if values is None:
        values = evaluate_all(mdp, max_policies)
    best = [None] * mdp.n
    for v in values.values():
        for i in range(mdp.n):
            if best[i] is None or v.num[i] * best[i][1] > best[i][0] * v.den:
                best[i] = (v.num[i], v.den)
    top = ValueVector.from_fractions([Fraction(x, d) for x, d in best])
    for p in all_policies(mdp.n, mdp.k):
        if values[p] == top:
            return p
    raise AssertionError("no policy attains the componentwise maximum")


@dataclass
class DominationGraph:
    """Neighbor graph of the policy space oriented by domination.

    ``graph`` holds one edge per strictly comparable neighbor pair, from
    the dominated policy to the dominating one.  Neighbor pairs with equal
    values are listed in ``ties`` instead.
    """

    n: int
    k: int
    graph: nx.DiGraph
    ties: list
    values: dict

    def improvement_set(self, policy):
        return improvement_set_from_values(self.values, policy, self.k)

    def sinks(self):
        return sorted(p for p in self.graph if self.graph.out_degree(p) == 0)


def domination_dag(mdp, values=None, max_policies=MAX_POLICIES):
    if values is None:
        values = evaluate_all(mdp, max_policies)
    g = nx.DiGraph()
    g.add_nodes_from(values)
    ties = []
    for p, v in values.items():
        for s in range(mdp.n):
            for a in range(p[s] + 1, mdp.k):
                q = switch(p, [(s, a)])
                c = compare(values[q], v)
                if c is Comparison.STRICTLY_GREATER:
                    g.add_edge(p, q)
                elif c is Comparison.STRICTLY_LESS:
                    g.add_edge(q, p)
                elif c is Comparison.EQUAL:
                    ties.append((p, q))
                else:
                    raise AssertionError(f"neighbors {p} and {q} are incomparable")
    return DominationGraph(mdp.n, mdp.k, g, ties, values)
