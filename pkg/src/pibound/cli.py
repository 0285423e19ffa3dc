"""Command-line entry point ``pi``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error,
3 budget exhausted.
"""

import argparse
import csv
import io
import sys
from fractions import Fraction

import numpy as np

from . import bounds
from .analysis import AnnotatedSequence, verify_trace_properties
from .formats import FormatError, dump_trace, format_matrix, load_trace, mdp_digest, parse_matrix, parse_mdp, serialize_mdp
from .iteration import GREEDY, check_trace, run_policy_iteration, trace_from_file
from .mdp import (
    BudgetExceeded,
    MdpError,
    domination_dag,
    evaluate_all,
    evaluate_policy,
    improvement_set_fast,
)
from .order_regular import DEFAULT_BUDGET, check_order_regular, search_max_rows
from .pseudo import PseudoPiSequence, build_supersequence, closed_form_length, greedy_subsequence, verify_pseudo
from .random_mdp import generate_random_mdp

OK, FAILED, USAGE, BUDGET = 0, 1, 2, 3
PSEUDO = "pseudo"


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _start_policy(spec, n, k, seed):
    if spec == "zeros":
        return (0,) * n
    if spec == "random":
        rng = np.random.default_rng(seed)
        return tuple(int(a) for a in rng.integers(0, k, size=n))
    policy = tuple(int(a) for a in spec.split(","))
    if len(policy) != n:
        raise ValueError(f"start policy has {len(policy)} entries, expected {n}")
    return policy


def _report(lines, report):
    for v in report.violations:
        lines.append(f"VIOLATION {v.rule} {list(v.indices)}: {v.witness}")


def cmd_gen(args):
    mdp = generate_random_mdp(args.n, args.k, args.seed, args.support, Fraction(args.gamma))
    _write(args.out, serialize_mdp(mdp))
    return OK


def cmd_run(args):
    mdp = parse_mdp(_read(args.mdp))
    start = _start_policy(args.start, mdp.n, mdp.k, args.seed)
    trace = run_policy_iteration(mdp, start)
    _write(args.trace, trace.dumps())
    if args.trace not in (None, "-"):
        print(f"iterations={len(trace)} final={','.join(map(str, trace.final_policy))}")
    return OK


def _verify_pi(tf, args, lines):
    trace = trace_from_file(tf)
    ok = True
    for problem in check_trace(trace):
        lines.append(f"VIOLATION trace: {problem}")
        ok = False
    dag = None
    if args.mdp:
        mdp = parse_mdp(_read(args.mdp))
        if mdp_digest(mdp) != trace.mdp_digest:
            lines.append("VIOLATION digest: trace was not produced from this MDP")
            ok = False
        for i, st in enumerate(trace.steps):
            v = evaluate_policy(mdp, st.policy)
            if st.value is not None and v != st.value:
                lines.append(f"VIOLATION value: step {i} records a wrong value vector")
                ok = False
            if improvement_set_fast(mdp, st.policy, v) != st.improvement_set:
                lines.append(f"VIOLATION improvement-set: step {i} records a wrong improvement set")
                ok = False
        if mdp.num_policies <= args.max_policies:
            dag = domination_dag(mdp, evaluate_all(mdp, args.max_policies))
        else:
            lines.append(f"note: k^n = {mdp.num_policies} above --max-policies, neighbor chains skipped")
    report = verify_trace_properties(trace, dag)
    report.extend(bounds.validate_trace_bounds(trace))
    _report(lines, report)
    lines.append(f"iterations={len(trace)}")
    return ok and report.ok


def _verify_pseudo(tf, lines):
    seq = AnnotatedSequence(tf.items(), tf.n, tf.k)
    p = PseudoPiSequence(seq, list(tf.header.get("subsequence", [])))
    report = verify_pseudo(p)
    _report(lines, report)
    lines.append(f"supersequence={len(seq)} subsequence={len(p)}")
    return report.ok


def cmd_verify(args):
    tf = load_trace(_read(args.trace))
    lines = []
    if tf.header.get("update_rule") == PSEUDO:
        ok = _verify_pseudo(tf, lines)
    else:
        ok = _verify_pi(tf, args, lines)
    lines.append("ok" if ok else "FAILED")
    print("\n".join(lines))
    return OK if ok else FAILED


def cmd_pseudo(args):
    o = build_supersequence(args.n, args.k)
    p = greedy_subsequence(o)
    header = {"n": args.n, "k": args.k, "update_rule": PSEUDO, "subsequence": p.subsequence_indices}
    records = [{"policy": pol, "improvement_set": t.pairs} for pol, t in o.items]
    _write(args.out, dump_trace(header, records))
    if args.out not in (None, "-"):
        print(f"supersequence={len(o)} subsequence={len(p)} closed_form={closed_form_length(args.n, args.k)}")
    return OK


def _fmt(x):
    return str(x)


def cmd_bound(args):
    if args.sweep:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "k", "ms_bound", "improved_bound", "fallback"])
        for k in args.k_values:
            for n in range(args.n_min, args.n_max + 1):
                b = bounds.improved_bound(n, k)
                w.writerow([n, k, float(bounds.mansour_singh_bound(n, k)), float(b.total_bound), int(b.fallback_used)])
        _write(args.out, buf.getvalue())
        return OK
    if args.n is None or args.k is None:
        print("bound: --n and --k are required without --sweep", file=sys.stderr)
        return USAGE
    b = bounds.improved_bound(args.n, args.k)
    rows = b.rows() + [("Mansour-Singh 13 k^n / n", float(bounds.mansour_singh_bound(args.n, args.k)))]
    width = max(len(name) for name, _ in rows)
    _write(args.out, "".join(f"{name:<{width}}  {value}\n" for name, value in rows))
    return OK


def cmd_orm_check(args):
    rows = parse_matrix(_read(args.file))
    report = check_order_regular(rows)
    lines = []
    _report(lines, report)
    lines.append(f"rows={len(rows)} " + ("ok" if report.ok else "FAILED"))
    print("\n".join(lines))
    return OK if report.ok else FAILED


def cmd_orm_search(args):
    res = search_max_rows(args.n, args.budget, args.workers, long_run=args.long)
    witness = ";".join("".join(map(str, r)) for r in res.witness)
    print(f"max_rows={res.max_rows} witness={witness} nodes={res.nodes_explored} exhausted={str(res.exhausted).lower()}")
    if args.out:
        _write(args.out, format_matrix(res.witness))
    return OK if res.exhausted else BUDGET


def cmd_sweep(args):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "k", "seed", "start", "iterations", "ms_bound", "improved_bound"])
    ok = True
    for k in args.k_values:
        for n in range(args.n_min, args.n_max + 1):
            ms = float(bounds.mansour_singh_bound(n, k))
            ib = float(bounds.improved_bound(n, k).total_bound)
            for i in range(args.seeds):
                seed = args.seed + i
                mdp = generate_random_mdp(n, k, seed, args.support)
                start = _start_policy(args.start, n, k, seed)
                trace = run_policy_iteration(mdp, start)
                ok = ok and bounds.validate_trace_bounds(trace).ok
                w.writerow([n, k, seed, ",".join(map(str, start)), len(trace), ms, ib])
    _write(args.out, buf.getvalue())
    return OK if ok else FAILED


def build_parser():
    p = argparse.ArgumentParser(prog="pi", description="Greedy policy iteration workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded random MDP")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--support", type=int, default=None)
    g.add_argument("--gamma", default="9/10")
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run greedy policy iteration and write a trace")
    r.add_argument("--mdp", required=True)
    r.add_argument("--start", default="zeros", help="zeros, random, or comma-separated actions")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--trace", default=None)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="check a PI or pseudo trace")
    v.add_argument("--trace", required=True)
    v.add_argument("--mdp", default=None)
    v.add_argument("--max-policies", type=int, default=2 ** 14)
    v.set_defaults(func=cmd_verify)

    ps = sub.add_parser("pseudo", help="write the canonical pseudo-PI-sequence")
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--k", type=int, required=True)
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=cmd_pseudo)

    b = sub.add_parser("bound", help="print iteration bounds")
    b.add_argument("--n", type=int)
    b.add_argument("--k", type=int)
    b.add_argument("--sweep", action="store_true")
    b.add_argument("--n-min", type=int, default=1)
    b.add_argument("--n-max", type=int, default=30)
    b.add_argument("--k-values", type=int, nargs="+", default=[2, 3, 4])
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bound)

    o = sub.add_parser("orm", help="order-regular matrices")
    osub = o.add_subparsers(dest="orm_command", required=True)
    oc = osub.add_parser("check")
    oc.add_argument("--file", required=True)
    oc.set_defaults(func=cmd_orm_check)
    os_ = osub.add_parser("search")
    os_.add_argument("--n", type=int, required=True)
    os_.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    os_.add_argument("--workers", type=int, default=1)
    os_.add_argument("--long", action="store_true", help="allow n >= 6")
    os_.add_argument("--out", default=None)
    os_.set_defaults(func=cmd_orm_search)

    s = sub.add_parser("sweep", help="batch PI runs on random MDPs, CSV out")
    s.add_argument("--n-min", type=int, default=2)
    s.add_argument("--n-max", type=int, default=6)
    s.add_argument("--k-values", type=int, nargs="+", default=[2, 3])
    s.add_argument("--seeds", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--support", type=int, default=None)
    s.add_argument("--start", default="zeros")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"pi: {exc}", file=sys.stderr)
        return BUDGET
    except (FormatError, MdpError, ValueError, OSError) as exc:
        print(f"pi: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
