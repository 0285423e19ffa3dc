"""Order-regular binary matrices and a branch-and-bound search for long ones.

A matrix with rows ``R_0 .. R_{m-1}`` is order-regular when for every pair
``i < j`` some column ``c`` has ``R_i[c] != R_{i+1}[c] == R_j[c] == R_{j+1}[c]``,
reading ``R_m`` as ``R_{m-1}``, and the last two rows differ.

Rows are handled as bitmasks with column 0 as the most significant bit,
so integer order is lexicographic order on rows.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .analysis import Violation, ViolationReport

SPLIT_DEPTH = 3
DEFAULT_BUDGET = 10 ** 9
LONG_RUN_N = 6


def _to_mask(row):
    m = 0
    for b in row:
        m = (m << 1) | int(b)
    return m


def _to_row(mask, n):
    return tuple((mask >> (n - 1 - c)) & 1 for c in range(n))


def _pair_ok(r, i, j):
    """Pair (i, j) on mask rows ``r``, using the convention past the end."""
    nxt = r[j + 1] if j + 1 < len(r) else r[j]
    d = r[i] ^ r[i + 1]
    return d & ~(r[i + 1] ^ r[j]) & ~(r[i + 1] ^ nxt) != 0


def check_order_regular(rows):
    rows = [tuple(row) for row in rows]
    if not rows:
        raise ValueError("matrix has no rows")
    n = len(rows[0])
    if n < 1 or any(len(row) != n for row in rows):
        raise ValueError("rows must be non-empty and of equal length")
    if any(b not in (0, 1) for row in rows for b in row):
        raise ValueError("entries must be 0 or 1")
    r = [_to_mask(row) for row in rows]
    m = len(r)
    report = ViolationReport()
    for i in range(m - 1):
        for j in range(i + 1, m):
            if not _pair_ok(r, i, j):
                report.violations.append(Violation((i, j), "order-regular", f"no column for rows ({i}, {j})"))
    if m >= 2 and r[-1] == r[-2]:
        report.violations.append(Violation((m - 2, m - 1), "last-rows-distinct", "last two rows are equal"))
    return report.sorted()


@dataclass
class SearchResult:
    n: int
    max_rows: int
    witness: list
    nodes_explored: int
    exhausted: bool


def fibonacci(i):
    if i < 1:
        raise ValueError(f"Fibonacci index must be >= 1, got {i}")
    a, b = 1, 1
    for _ in range(i - 1):
        a, b = b, a + b
    return a


def conjecture_check(n, result):
    if not result.exhausted:
        raise ValueError("conjecture check needs an exhausted search")
    return result.max_rows == fibonacci(n + 2)


class _Search:
    """Depth-first search below one fixed prefix."""

    def __init__(self, n, budget):
        self.n = n
        self.full = (1 << n) - 1
        self.budget = budget
        self.nodes = 0
        self.hit_budget = False
        self.best_len = 0
        self.best = None

    def sorted_within_classes(self, row, classes):
        for cls in classes:
            seen_one = False
            for c in cls:
                bit = (row >> (self.n - 1 - c)) & 1
                if bit:
                    seen_one = True
                elif seen_one:
                    return False
        return True

    def refine(self, classes, row):
        out = []
        for cls in classes:
            zeros = [c for c in cls if not (row >> (self.n - 1 - c)) & 1]
            ones = [c for c in cls if (row >> (self.n - 1 - c)) & 1]
            out.extend(x for x in (zeros, ones) if x)
        return out

    def finalizable(self, r):
        t = len(r)
        if t >= 2 and r[-1] == r[-2]:
            return False
        last = r[-1]
        for i in range(t - 1):
            if (r[i] ^ r[i + 1]) & ~(r[i + 1] ^ last) == 0:
                return False
        return True

    def extensions(self, r, allowed, classes):
        """Rows that may follow prefix ``r`` without breaking a checkable pair."""
        t = len(r)
        used = set(r)
        prev = r[-1]
        for row in allowed:
            if row in used or not self.sorted_within_classes(row, classes):
                continue
            ok = True
            for i in range(t - 1):
                d = r[i] ^ r[i + 1]
                if d & ~(r[i + 1] ^ prev) & ~(r[i + 1] ^ row) == 0:
                    ok = False
                    break
            if ok:
                yield row

    def filter_allowed(self, allowed, r):
        """Keep rows usable after the newest change ``r[-2] -> r[-1]``."""
        d = r[-2] ^ r[-1]
        top = r[-1]
        return [x for x in allowed if d & ~(x ^ top)]

    def visit(self, r, allowed, classes):
        if self.nodes >= self.budget:
            self.hit_budget = True
            return
        self.nodes += 1
        t = len(r)
        if t > self.best_len and self.finalizable(r):
            self.best_len = t
            self.best = list(r)
        avail = sum(1 for x in allowed if x not in r)
        if t + avail <= self.best_len:
            return
        for row in list(self.extensions(r, allowed, classes)):
            r.append(row)
            self.visit(r, self.filter_allowed(allowed, r), self.refine(classes, row))
            r.pop()
            if self.hit_budget:
                return


def _root_state(n):
    r = [0]
    return r, list(range(1 << n)), [list(range(n))]


def _prefix_state(n, prefix):
    s = _Search(n, 0)
    r, allowed, classes = _root_state(n)
    for row in prefix[1:]:
        r.append(row)
        allowed = s.filter_allowed(allowed, r)
        classes = s.refine(classes, row)
    return r, allowed, classes


def _run_task(args):
    n, prefix, budget = args
    s = _Search(n, budget)
    r, allowed, classes = _prefix_state(n, prefix)
    s.visit(r, allowed, classes)
    return s.best_len, s.best, s.nodes, s.hit_budget


def _shallow(n, depth):
    """Enumerate prefixes up to ``depth`` rows; returns (best, nodes, tasks)."""
    s = _Search(n, math.inf)
    tasks = []

    def walk(r, allowed, classes):
        s.nodes += 1
        if len(r) > s.best_len and s.finalizable(r):
            s.best_len, s.best = len(r), list(r)
        if len(r) == depth:
            tasks.append(tuple(r))
            return
        for row in list(s.extensions(r, allowed, classes)):
            r.append(row)
            walk(r, s.filter_allowed(allowed, r), s.refine(classes, row))
            r.pop()

    walk(*_root_state(n))
    return s.best_len, s.best, s.nodes, tasks


def search_max_rows(n, node_budget=DEFAULT_BUDGET, worker_count=1, long_run=False):
    """Longest order-regular matrix with ``n`` columns.

    The first row is fixed to zeros (complementing a column preserves the
    condition) and each new row is sorted within every class of columns
    that agree on all earlier rows (permuting such columns preserves the
    prefix).  The tree is cut into subtrees at a fixed depth; each gets an
    equal share of ``node_budget`` and is searched independently, so the
    result does not depend on ``worker_count``.  Among longest matrices the
    lexicographically least (as a sequence of rows) is returned.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n >= LONG_RUN_N and not long_run:
        raise ValueError(f"n >= {LONG_RUN_N} is a long run; pass long_run=True")
    best_len, best, nodes, tasks = _shallow(n, SPLIT_DEPTH)
    exhausted = True
    if tasks:
        share = max(1, (node_budget - nodes) // len(tasks))
        args = [(n, t, share) for t in tasks]
        # tasks below the split depth were already counted by _shallow
        nodes -= len(tasks)
        if worker_count > 1:
            with ProcessPoolExecutor(max_workers=worker_count) as pool:
                results = list(pool.map(_run_task, args))
        else:
            results = [_run_task(a) for a in args]
        for length, witness, cnt, hit in results:
            nodes += cnt
            exhausted = exhausted and not hit
            if length > best_len or (length == best_len and witness is not None and witness < best):
                best_len, best = length, witness
    return SearchResult(n, best_len, [_to_row(x, n) for x in best], nodes, exhausted)
