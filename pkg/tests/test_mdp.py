import itertools
import json
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from conftest import self_loop_mdp
from oracles import evaluate_by_definition
from pibound.formats import FormatError, parse_mdp, serialize_mdp
from pibound.mdp import (
    BudgetExceeded,
    Comparison,
    ImprovementSet,
    Mdp,
    MdpError,
    ValueVector,
    all_policies,
    brute_force_optimal,
    compare,
    domination_dag,
    evaluate_all,
    evaluate_policy,
    improvement_set_fast,
    improvement_set_oracle,
    lookahead_gains,
    switch,
)
from pibound.random_mdp import generate_random_mdp


def doc(n, k, gamma, trans, rews):
    return json.dumps({"n": n, "k": k, "gamma": gamma, "transitions": trans, "rewards": rews})


# -- parsing and the file format ---------------------------------------------


def test_parse_rejects_single_action():
    with pytest.raises(FormatError, match="k must be at least 2"):
        parse_mdp(doc(1, 1, "1/2", [[["1"]]], [["1"]]))


def test_parse_accepts_duplicate_actions():
    m = parse_mdp(doc(1, 2, "1/2", [[["1"], ["1"]]], [["1", "1"]]))
    assert (m.n, m.k, m.discount) == (1, 2, Fraction(1, 2))


def test_parse_row_sum():
    text = doc(2, 2, "1/2", [[["9/10", "0"], ["1", "0"]], [["0", "1"], ["0", "1"]]], [["0", "0"], ["0", "0"]])
    with pytest.raises(FormatError, match="row sum 9/10 != 1"):
        parse_mdp(text)


@pytest.mark.parametrize("gamma", ["0", "1", "3/2", "-1/2"])
def test_parse_discount_range(gamma):
    with pytest.raises(FormatError, match="discount"):
        parse_mdp(doc(1, 2, gamma, [[["1"], ["1"]]], [["0", "0"]]))


def test_parse_ragged_actions():
    text = doc(2, 2, "1/2", [[["1", "0"], ["1", "0"]], [["0", "1"]]], [["0", "0"], ["0", "0"]])
    with pytest.raises(FormatError, match="exactly 2 actions"):
        parse_mdp(text)


def test_parse_syntax_error_position():
    with pytest.raises(FormatError, match="line 1 column"):
        parse_mdp('{"n": 1,')


@pytest.mark.parametrize("bad", ["1/0", "1.5", "a", "1/-2", "+1", " 1"])
def test_parse_rational_grammar(bad):
    with pytest.raises(FormatError):
        parse_mdp(doc(1, 2, "1/2", [[["1"], ["1"]]], [[bad, "0"]]))


def test_parse_integer_literals_and_negative_rewards():
    m = parse_mdp(doc(1, 2, "1/2", [[[1], [1]]], [["-3/6", 2]]))
    assert m.rewards[0] == (Fraction(-1, 2), Fraction(2))


def test_serialize_round_trip_and_canonical():
    m = parse_mdp(doc(1, 2, "2/4", [[["2/2"], ["1"]]], [["-3/6", "4/2"]]))
    text = serialize_mdp(m)
    assert '"-1/2"' in text and '"2"' in text and '"1/2"' in text
    assert parse_mdp(text) == m
    assert serialize_mdp(parse_mdp(text)) == text


# -- generator ------------------------------------------------------------------


def test_generator_deterministic():
    assert generate_random_mdp(3, 2, 7, 2) == generate_random_mdp(3, 2, 7, 2)
    assert serialize_mdp(generate_random_mdp(3, 2, 7, 2)) == serialize_mdp(generate_random_mdp(3, 2, 7, 2))


def test_generator_seed_sensitive():
    assert generate_random_mdp(3, 2, 7, 2) != generate_random_mdp(3, 2, 8, 2)


@pytest.mark.parametrize("args", [(0, 2, 1, 1), (2, 1, 1, 1), (3, 2, 1, 0), (3, 2, 1, 4), (3, 2, -1, 1)])
def test_generator_ranges(args):
    with pytest.raises(ValueError):
        generate_random_mdp(*args)


@given(st.integers(1, 5), st.integers(2, 4), st.integers(0, 2 ** 64 - 1), st.data())
@settings(max_examples=60, deadline=None)
def test_generator_round_trip_and_support(n, k, seed, data):
    support = data.draw(st.integers(1, n))
    m = generate_random_mdp(n, k, seed, support)
    assert parse_mdp(serialize_mdp(m)) == m
    for s in range(n):
        for a in range(k):
            row = m.transitions[s][a]
            assert sum(row) == 1
            assert sum(1 for p in row if p) == support
            assert 0 <= m.rewards[s][a] <= 1


# -- evaluation and comparison ------------------------------------------------


def test_evaluate_one_state(one_state):
    m = self_loop_mdp([[1, 1]])
    assert evaluate_policy(m, (0,)).values == (2,)


def test_evaluate_two_state(two_state):
    assert evaluate_policy(two_state, (1, 1)).values == (2, 2)
    assert evaluate_policy(two_state, (1, 0)).values == (2, 0)


def test_evaluate_zero_rewards():
    m = generate_random_mdp(4, 3, 1)
    zero = Mdp(m.n, m.k, m.transitions, [[0] * m.k] * m.n, m.discount)
    for p in [(0, 0, 0, 0), (2, 1, 0, 2)]:
        assert evaluate_policy(zero, p).values == (0,) * 4


@given(st.integers(1, 5), st.integers(2, 3), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_evaluate_matches_fraction_solve(n, k, seed):
    m = generate_random_mdp(n, k, seed, min(n, 3), Fraction(seed % 7 + 1, 9))
    for p in itertools.islice(all_policies(n, k), 0, None, 5):
        assert list(evaluate_policy(m, p).values) == evaluate_by_definition(m, p)


def test_evaluate_rejects_bad_policy(two_state):
    with pytest.raises(MdpError):
        evaluate_policy(two_state, (0, 2))
    with pytest.raises(MdpError):
        evaluate_policy(two_state, (0,))


@pytest.mark.parametrize(
    "v, w, expected",
    [
        ((1, 0), (0, 1), Comparison.INCOMPARABLE),
        ((2, 2), (0, 0), Comparison.STRICTLY_GREATER),
        ((1, 1), (1, 1), Comparison.EQUAL),
        ((1, 0), (1, 1), Comparison.STRICTLY_LESS),
        ((Fraction(1, 3), 0), (Fraction(2, 6), 0), Comparison.EQUAL),
    ],
)
def test_compare(v, w, expected):
    assert compare(ValueVector.from_fractions(v), ValueVector.from_fractions(w)) is expected


def test_compare_length_mismatch():
    with pytest.raises(ValueError):
        compare((1,), (1, 2))


@given(st.lists(st.tuples(st.fractions(max_denominator=20), st.fractions(max_denominator=20)), min_size=1, max_size=6))
def test_compare_definition(pairs):
    v = [a for a, _ in pairs]
    w = [b for _, b in pairs]
    c = compare(v, w)
    ge = all(a >= b for a, b in pairs)
    le = all(a <= b for a, b in pairs)
    assert (c is Comparison.STRICTLY_GREATER) == (ge and not le)
    assert (c is Comparison.STRICTLY_LESS) == (le and not ge)
    assert (c is Comparison.EQUAL) == (ge and le)
    assert (c is Comparison.INCOMPARABLE) == (not ge and not le)


def test_switch():
    assert switch((0, 0), [(0, 1)]) == (1, 0)
    assert switch((0, 0), []) == (0, 0)
    with pytest.raises(ValueError, match="state 0 repeated"):
        switch((0, 0), [(0, 1), (0, 2)])


# -- improvement sets ---------------------------------------------------------


def test_improvement_set_one_state(one_state):
    assert improvement_set_oracle(one_state, (0,)).pairs == {(0, 1)}
    assert improvement_set_fast(one_state, (0,)).pairs == {(0, 1)}


def test_improvement_set_two_state(two_state):
    assert improvement_set_oracle(two_state, (0, 0)).pairs == {(0, 1), (1, 1)}
    assert improvement_set_fast(two_state, (0, 0)).pairs == {(0, 1), (1, 1)}
    assert improvement_set_oracle(two_state, (1, 1)).pairs == set()
    assert improvement_set_fast(two_state, (1, 1)).pairs == set()


def test_improvement_set_equal_rewards():
    m = generate_random_mdp(3, 3, 5)
    flat = Mdp(m.n, m.k, m.transitions, [[Fraction(1, 3)] * 3] * 3, m.discount)
    for p in all_policies(3, 3):
        assert not improvement_set_fast(flat, p)
        assert not improvement_set_oracle(flat, p)


def test_improvement_set_states_and_simplify():
    t = ImprovementSet(frozenset({(0, 2), (0, 1), (3, 1)}))
    assert t.states == {0, 3}
    assert t.simplified().pairs == {(0, 1), (3, 1)}


def test_fast_matches_oracle_sweep():
    for seed in range(200):
        n = 1 + seed % 6
        k = 2 + seed % 2
        m = generate_random_mdp(n, k, seed)
        values = evaluate_all(m)
        for p, v in values.items():
            assert improvement_set_fast(m, p, v) == improvement_set_oracle(m, p, values), (seed, p)


def test_lookahead_gain_matches_definition():
    m = generate_random_mdp(4, 3, 11, 3)
    p = (0, 1, 2, 0)
    v = evaluate_policy(m, p).values
    gains = lookahead_gains(m, p)
    for s in range(4):
        for a in range(3):
            expect = m.rewards[s][a] + m.discount * sum(q * x for q, x in zip(m.transitions[s][a], v)) - v[s]
            assert gains[s, a] == expect


# -- theory checks over the full policy space ---------------------------------


@pytest.mark.parametrize("seed", range(40))
def test_improvement_properties(seed):
    n = 2 + seed % 3
    k = 2 + seed % 2
    m = generate_random_mdp(n, k, seed, support=min(n, 1 + seed % 3))
    values = evaluate_all(m)
    opt = values[brute_force_optimal(m, values)]
    for p, v in values.items():
        t = improvement_set_oracle(m, p, values)
        for s in range(n):
            for a in range(k):
                if a == p[s]:
                    continue
                c = compare(values[switch(p, [(s, a)])], v)
                # neighbors are always comparable
                assert c is not Comparison.INCOMPARABLE
                assert ((s, a) in t) == (c is Comparison.STRICTLY_GREATER)
        # any well-defined non-empty subset of T improves strictly
        by_state = {s: [(s, a) for a in t.actions(s)] for s in t.states}
        for r in range(1, len(by_state) + 1):
            for states in itertools.combinations(sorted(by_state), r):
                for u in itertools.product(*(by_state[s] for s in states)):
                    assert compare(values[switch(p, u)], v) is Comparison.STRICTLY_GREATER
        if not t:
            assert v == opt
        # agreeing on improvement states means being dominated
        for q, w in values.items():
            if all(q[s] == p[s] for s in t.states):
                assert compare(w, v).is_le


def test_brute_force_examples(two_state, one_state):
    assert brute_force_optimal(two_state) == (1, 1)
    assert brute_force_optimal(one_state) == (1,)
    zero = self_loop_mdp([[0, 0, 0]] * 3)
    assert brute_force_optimal(zero) == (0, 0, 0)


def test_brute_force_dominates_everything():
    m = generate_random_mdp(5, 2, 3)
    values = evaluate_all(m)
    best = values[brute_force_optimal(m, values)]
    assert all(compare(best, v).is_ge for v in values.values())


def test_budget_guard():
    m = generate_random_mdp(5, 3, 0)
    with pytest.raises(BudgetExceeded):
        brute_force_optimal(m, max_policies=100)
    with pytest.raises(BudgetExceeded):
        domination_dag(m, max_policies=100)


def test_domination_dag_small(two_state):
    g = domination_dag(two_state)
    assert g.graph.number_of_nodes() == 4
    assert g.graph.number_of_edges() + len(g.ties) == 4


@pytest.mark.parametrize("seed", range(25))
def test_domination_dag_acyclic_unique_sink(seed):
    n, k = 2 + seed % 4, 2 + seed % 2
    m = generate_random_mdp(n, k, seed)
    g = domination_dag(m)
    assert nx.is_directed_acyclic_graph(g.graph)
    assert g.graph.number_of_edges() + len(g.ties) == k ** n * n * (k - 1) // 2
    if not g.ties:
        assert g.sinks() == [brute_force_optimal(m, g.values)]


def test_domination_dag_records_ties():
    m = self_loop_mdp([[1, 1], [0, 1]])
    g = domination_dag(m)
    assert len(g.ties) == 2
    assert g.graph.number_of_edges() == 2
