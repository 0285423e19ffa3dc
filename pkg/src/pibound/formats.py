"""Text formats: MDP documents, trace files and 0/1 matrices.

MDP documents are JSON objects with keys ``n``, ``k``, ``gamma``,
``transitions`` (n x k x n) and ``rewards`` (n x k).  Rationals are
written as strings ``"p/q"`` or integers; actions are 0-based.

Trace files are JSON lines: a header object followed by one record per
policy of the sequence.
"""

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .mdp import ImprovementSet, Mdp, MdpError, ValueVector

_RATIONAL = re.compile(r"-?[0-9]+(/[0-9]+)?\Z")


class FormatError(ValueError):
    pass


def parse_rational(x):
    if isinstance(x, bool):
        raise FormatError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if not isinstance(x, str) or not _RATIONAL.match(x):
        raise FormatError(f"not a rational: {x!r}")
    value = x.split("/")
    if len(value) == 2 and int(value[1]) == 0:
        raise FormatError(f"zero denominator in {x!r}")
    return Fraction(x)


def format_rational(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _load_json(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{what}: syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_mdp(text):
    doc = _load_json(text, "mdp")
    if not isinstance(doc, dict):
        raise FormatError("mdp: top level must be an object")
    missing = {"n", "k", "gamma", "transitions", "rewards"} - doc.keys()
    if missing:
        raise FormatError(f"mdp: missing fields {sorted(missing)}")
    n, k = doc["n"], doc["k"]
    if not isinstance(n, int) or not isinstance(k, int) or isinstance(n, bool) or isinstance(k, bool):
        raise FormatError("mdp: n and k must be integers")
    try:
        trans = [[[parse_rational(p) for p in row] for row in state] for state in doc["transitions"]]
        rews = [[parse_rational(r) for r in state] for state in doc["rewards"]]
        gamma = parse_rational(doc["gamma"])
    except TypeError:
        raise FormatError("mdp: transitions/rewards must be nested arrays") from None
    try:
        return Mdp(n, k, trans, rews, gamma)
    except MdpError as exc:
        raise FormatError(f"mdp: {exc}") from None


def serialize_mdp(mdp):
    lines = ["{", f'  "n": {mdp.n},', f'  "k": {mdp.k},', f'  "gamma": "{format_rational(mdp.discount)}",']
    lines.append('  "transitions": [')
    for s in range(mdp.n):
        rows = ",\n".join(
            "      " + json.dumps([format_rational(p) for p in mdp.transitions[s][a]]) for a in range(mdp.k)
        )
        lines.append("    [\n" + rows + "\n    ]" + ("," if s < mdp.n - 1 else ""))
    lines.append("  ],")
    lines.append('  "rewards": [')
    for s in range(mdp.n):
        lines.append(
            "    " + json.dumps([format_rational(r) for r in mdp.rewards[s]]) + ("," if s < mdp.n - 1 else "")
        )
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def mdp_digest(mdp):
    return hashlib.sha256(serialize_mdp(mdp).encode()).hexdigest()


@dataclass
class TraceFile:
    """Parsed trace: header fields plus one dict per record."""

    header: dict
    records: list = field(default_factory=list)

    @property
    def n(self):
        return self.header["n"]

    @property
    def k(self):
        return self.header["k"]

    def items(self):
        return [(tuple(r["policy"]), ImprovementSet(frozenset(map(tuple, r["improvement_set"])))) for r in self.records]


def _pairs(pairs):
    return [[int(s), int(a)] for s, a in sorted(pairs)]


def dump_trace(header, records):
    """Serialise a header and records; ``value`` is optional per record."""
    out = [json.dumps(header, sort_keys=True)]
    for i, rec in enumerate(records):
        line = {
            "iteration": i,
            "policy": list(rec["policy"]),
            "improvement_set": _pairs(rec["improvement_set"]),
            "chosen_switch": _pairs(rec.get("chosen_switch", ())),
        }
        if rec.get("value") is not None:
            line["value"] = [format_rational(v) for v in rec["value"]]
        out.append(json.dumps(line, sort_keys=True))
    return "\n".join(out) + "\n"


def load_trace(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("trace: empty file")
    header = _load_json(lines[0], "trace header")
    if not isinstance(header, dict) or "n" not in header or "k" not in header:
        raise FormatError("trace: header must be an object with n and k")
    records = []
    for lineno, ln in enumerate(lines[1:], start=2):
        rec = _load_json(ln, f"trace line {lineno}")
        if not isinstance(rec, dict) or "policy" not in rec or "improvement_set" not in rec:
            raise FormatError(f"trace line {lineno}: needs policy and improvement_set")
        if rec.get("iteration") != lineno - 2:
            raise FormatError(f"trace line {lineno}: iteration {rec.get('iteration')} out of order")
        if "value" in rec:
            rec["value"] = ValueVector.from_fractions([parse_rational(v) for v in rec["value"]])
        records.append(rec)
    return TraceFile(header, records)


def parse_matrix(text):
    """Rows of 0/1 characters, one per line; blank lines ignored."""
    rows = []
    for lineno, ln in enumerate(text.splitlines(), start=1):
        ln = ln.strip()
        if not ln:
            continue
        if set(ln) - {"0", "1"}:
            raise FormatError(f"matrix line {lineno}: only 0 and 1 allowed")
        rows.append(tuple(int(c) for c in ln))
    return rows


def format_matrix(rows):
    return "".join("".join(str(b) for b in row) + "\n" for row in rows)
