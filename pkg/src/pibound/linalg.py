"""Fraction-free (Bareiss) elimination over Python integers.

Everything here works on lists of ``int`` rows so the results are exact;
callers that hold rationals scale rows to integers first.
"""


def solve_integer(a, b):
    """Solve ``a @ x = b`` exactly for a square nonsingular integer matrix.

    Returns ``(y, d)`` with integers ``y`` and ``d > 0`` such that
    ``x = y / d``.  Raises ``ZeroDivisionError`` if ``a`` is singular.
    """
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    prev = 1
    for c in range(n):
        if m[c][c] == 0:
            for r in range(c + 1, n):
                if m[r][c] != 0:
                    m[c], m[r] = m[r], m[c]
                    break
            else:
                raise ZeroDivisionError("singular matrix")
        pivot = m[c][c]
        row_c = m[c]
        for r in range(c + 1, n):
            row_r = m[r]
            f = row_r[c]
            for j in range(c + 1, n + 1):
                row_r[j] = (pivot * row_r[j] - f * row_c[j]) // prev
            row_r[c] = 0
        prev = pivot

    det = m[n - 1][n - 1]
    y = [0] * n
    for i in range(n - 1, -1, -1):
        row = m[i]
        acc = det * row[n]
        for j in range(i + 1, n):
            acc -= row[j] * y[j]
        # exact: det * x_i is an integer by Cramer's rule
        y[i] = acc // row[i]
    if det < 0:
        det = -det
        y = [-v for v in y]
    return y, det


def integer_rank(rows):
    """Rank over the rationals of a list of equal-length integer rows."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    width = len(m[0])
    rank = 0
    prev = 1
    for c in range(width):
        if rank == len(m):
            break
        for r in range(rank, len(m)):
            if m[r][c] != 0:
                m[rank], m[r] = m[r], m[rank]
                break
        else:
            continue
        pivot = m[rank][c]
        top = m[rank]
        for r in range(rank + 1, len(m)):
            row = m[r]
            f = row[c]
            for j in range(c, width):
                row[j] = (pivot * row[j] - f * top[j]) // prev
        prev = pivot
        rank += 1
    return rank
