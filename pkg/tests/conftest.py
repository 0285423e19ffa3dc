from fractions import Fraction

import pytest

from pibound.mdp import Mdp


def self_loop_mdp(rewards, discount=Fraction(1, 2)):
    """Every action of every state loops back; ``rewards[s][a]`` as given."""
    n = len(rewards)
    k = len(rewards[0])
    trans = [[[1 if t == s else 0 for t in range(n)] for _ in range(k)] for s in range(n)]
    return Mdp(n, k, trans, rewards, discount)


@pytest.fixture
def two_state():
    # reward equals the chosen action index in both states
    return self_loop_mdp([[0, 1], [0, 1]])


@pytest.fixture
def one_state():
    return self_loop_mdp([[0, 1]])


ACCEPTANCE = []


def record(label, ok, detail=""):
    """Log an acceptance line for the terminal summary, then assert it."""
    ACCEPTANCE.append((label, bool(ok), detail))
    assert ok, f"{label}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
