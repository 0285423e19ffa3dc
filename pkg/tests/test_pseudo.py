import itertools
from collections import Counter
from fractions import Fraction
from math import comb, floor

import pytest

from oracles import closed_form_sum
from pibound.analysis import AnnotatedSequence, count_repeated_state_sets, state_set_groups, tensor_rank_check
from pibound.mdp import all_policies, switch
from pibound.pseudo import (
    PseudoPiSequence,
    block_sizes,
    build_supersequence,
    canonical_improvement_set,
    closed_form_length,
    greedy_subsequence,
    neighbor_consistency_violations,
    verify_pseudo,
)


def test_canonical_improvement_set():
    assert canonical_improvement_set((2, 2, 2), 3).pairs == set()
    assert canonical_improvement_set((0, 1, 2), 3).pairs == {(0, 2), (1, 2)}


@pytest.mark.parametrize("n, k", [(3, 3), (4, 2), (3, 4), (5, 3)])
def test_block_sizes_by_enumeration(n, k):
    counts = Counter(len(canonical_improvement_set(p, k)) for p in all_policies(n, k))
    assert [counts[d] for d in range(n + 1)] == [comb(n, d) * (k - 1) ** d for d in range(n + 1)]
    assert block_sizes(n, k) == [counts[d] for d in range(n + 1)]


def test_supersequence_3_3():
    o = build_supersequence(3, 3)
    sizes = [len(t) for _, t in o.items]
    assert len(o) == 27 and len(set(o.policies)) == 27
    assert o.items[0][0] == (0, 0, 0) and sizes[0] == 3
    assert o.items[-1][0] == (2, 2, 2) and sizes[-1] == 0
    assert [sizes.count(d) for d in (3, 2, 1, 0)] == [8, 12, 6, 1]
    assert sizes == sorted(sizes, reverse=True)
    # lexicographic inside each block
    for d in range(4):
        block = [p for p, t in o.items if len(t) == d]
        assert block == sorted(block)


@pytest.mark.parametrize("n, k", [(3, 3), (4, 2), (3, 4)])
def test_state_set_inclusion_means_equality(n, k):
    o = build_supersequence(n, k)
    states = [t.states for _, t in o.items]
    for i, j in itertools.combinations(range(len(o)), 2):
        if states[i] <= states[j]:
            assert states[i] == states[j]


def test_greedy_subsequence_3_3():
    p = greedy_subsequence(build_supersequence(3, 3))
    assert len(p) >= 10
    # informative: the lexicographic instantiation hits the closed form exactly
    assert len(p) == 10
    assert p.subsequence_indices[0] == 0


def test_greedy_subsequence_trivial_cases():
    one = AnnotatedSequence([((2,), canonical_improvement_set((2,), 3))], 1, 3)
    assert greedy_subsequence(one).subsequence_indices == [0]
    flat = AnnotatedSequence([((a, b), frozenset()) for a in range(2) for b in range(2)], 2, 2)
    assert greedy_subsequence(flat).subsequence_indices == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        greedy_subsequence(AnnotatedSequence([], 1, 2))


def test_closed_form_examples():
    assert closed_form_length(3, 3) == 10
    assert closed_form_length(1, 2) == Fraction(3, 2)


@pytest.mark.parametrize("n", range(1, 13))
@pytest.mark.parametrize("k", range(2, 6))
def test_closed_form_matches_sum(n, k):
    value = closed_form_length(n, k)
    assert value == closed_form_sum(n, k)
    assert value * (n + 1) * (k - 1) == k ** (n + 1) - 1


@pytest.mark.parametrize("n, k", [(n, k) for n in range(1, 7) for k in (2, 3, 4) if k ** n <= 5000])
def test_construction_sweep(n, k):
    p = greedy_subsequence(build_supersequence(n, k))
    assert verify_pseudo(p).ok
    assert len(p) >= floor(closed_form_length(n, k))


def test_verify_catches_off_by_one():
    p = greedy_subsequence(build_supersequence(3, 3))
    idx = list(p.subsequence_indices)
    idx[1] -= 1
    rep = verify_pseudo(PseudoPiSequence(p.supersequence, idx))
    assert any(v.rule == "jumping" for v in rep.violations)


def test_verify_catches_increasing_blocks():
    o = build_supersequence(3, 3)
    items = [it for it in o.items if len(it[1]) == 2] + [it for it in o.items if len(it[1]) == 3]
    items += [it for it in o.items if len(it[1]) < 2]
    bad = AnnotatedSequence(items, 3, 3)
    rep = verify_pseudo(greedy_subsequence(bad))
    assert any(v.rule == "non-increasing" for v in rep.violations)


def test_verify_catches_short_subsequence():
    p = greedy_subsequence(build_supersequence(2, 3))
    rep = verify_pseudo(PseudoPiSequence(p.supersequence, p.subsequence_indices[:-1]))
    assert not rep.ok


@pytest.mark.parametrize("n, k", [(2, 3), (3, 3), (4, 2), (3, 4), (4, 3)])
def test_groups_saturate_repetition_bound(n, k):
    o = build_supersequence(n, k)
    counts, rep = count_repeated_state_sets(o)
    assert rep.ok
    for states, group in state_set_groups(o).items():
        assert counts[states] == (k - 1) ** len(states)
        rank, ok = tensor_rank_check(group, k)
        assert ok and rank == len(group)


def test_switching_inside_improvement_set_moves_later():
    # the ordering is consistent with subsets of T improving...
    o = build_supersequence(3, 3)
    pos = {p: i for i, p in enumerate(o.policies)}
    for p, t in o.items:
        for r in range(1, len(t) + 1):
            for u in itertools.combinations(sorted(t.pairs), r):
                assert pos[switch(p, u)] > pos[p]


def test_construction_is_not_realizable():
    # ...but a later neighbor is not always reached by an improving switch,
    # which no MDP allows: (0,0,0) -> (1,0,0) sits later in the same block
    o = build_supersequence(3, 3)
    bad = neighbor_consistency_violations(o)
    assert bad
    assert (0, 1, (2, 1)) in bad
    assert o.items[0][0] == (0, 0, 0) and o.items[1][0] == (0, 0, 1)
