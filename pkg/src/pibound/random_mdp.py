"""Seeded random MDP instances.

Generation is fixed so traces can be reproduced from ``(n, k, seed,
support)`` alone.  Using numpy's PCG64 (``default_rng(seed)``), for each
state ``s`` and then each action ``a``:

1. ``support`` distinct successor states are drawn without replacement;
2. each successor gets an integer weight in ``[1, 4]``; probabilities are
   the weights divided by their sum;
3. the reward is ``j / 20`` with ``j`` drawn uniformly from ``[0, 20]``.
"""

from fractions import Fraction

import numpy as np

from .mdp import Mdp

DEFAULT_DISCOUNT = Fraction(9, 10)


def generate_random_mdp(n, k, seed, support=None, discount=DEFAULT_DISCOUNT):
    if support is None:
        support = min(n, 2)
    if n < 1 or k < 2:
        raise ValueError(f"need n >= 1 and k >= 2, got n={n}, k={k}")
    if not 1 <= support <= n:
        raise ValueError(f"support must lie in [1, n], got {support}")
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    rng = np.random.default_rng(seed)
    transitions = []
    rewards = []
    for s in range(n):
        rows = []
        rews = []
        for a in range(k):
            succ = rng.choice(n, size=support, replace=False)
            weights = rng.integers(1, 5, size=support)
            total = int(weights.sum())
            row = [Fraction(0)] * n
            for t, w in zip(succ, weights):
                row[int(t)] = Fraction(int(w), total)
            rows.append(row)
            rews.append(Fraction(int(rng.integers(0, 21)), 20))
        transitions.append(rows)
        rewards.append(rews)
    return Mdp(n, k, transitions, rewards, Fraction(discount))
