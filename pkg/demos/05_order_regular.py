# Longest order-regular matrices for small n.
#
# The extremal row counts follow the Fibonacci numbers F(n+2) for the
# sizes that can be searched exhaustively here.

from pibound import check_order_regular, conjecture_check, fibonacci, search_max_rows

for n in range(1, 6):
    res = search_max_rows(n)
    print(f"n={n}: {res.max_rows} rows (F_{n + 2} = {fibonacci(n + 2)}), {res.nodes_explored} nodes, "
          f"fibonacci={conjecture_check(n, res)}")

res = search_max_rows(4)
print("\n".join("".join(map(str, r)) for r in res.witness))
print("valid:", check_order_regular(res.witness).ok)
