"""Independent reference implementations used to check the main engine.

Nothing here imports the engine's reasoner, evaluator or CVSS code.
"""

from __future__ import annotations

import itertools
import math
from decimal import Decimal
from fractions import Fraction

from defii.terms import (
    IRI,
    OWL,
    RDF,
    RDFS,
    XSD,
    Literal,
    Triple,
)

# ---------------------------------------------------------------- CVSS v3.1
# Exact rational arithmetic, with Roundup applied as CVSS v3.1
# defines it: round to 5 decimals first, then ceil to 1 decimal.

F = Fraction
AV = {"N": F("0.85"), "A": F("0.62"), "L": F("0.55"), "P": F("0.2")}
AC = {"L": F("0.77"), "H": F("0.44")}
PR_U = {"N": F("0.85"), "L": F("0.62"), "H": F("0.27")}
PR_C = {"N": F("0.85"), "L": F("0.68"), "H": F("0.5")}
UI = {"N": F("0.85"), "R": F("0.62")}
CIA = {"H": F("0.56"), "L": F("0.22"), "N": F(0)}


def _roundup(x: Fraction) -> Fraction:
    int_input = math.floor(x * 100000 + F(1, 2))
    if int_input % 10000 == 0:
        return F(int_input, 100000)
    return F(math.floor(F(int_input, 10000)) + 1, 10)


def oracle_cvss(vector: str) -> Decimal:
    parts = dict(p.split(":") for p in vector.split("/")[1:])
    iss = 1 - (1 - CIA[parts["C"]]) * (1 - CIA[parts["I"]]) * (1 - CIA[parts["A"]])
    changed = parts["S"] == "C"
    if changed:
        impact = F("7.52") * (iss - F("0.029")) - F("3.25") * (iss - F("0.02")) ** 15
    else:
        impact = F("6.42") * iss
    pr = (PR_C if changed else PR_U)[parts["PR"]]
    exploitability = F("8.22") * AV[parts["AV"]] * AC[parts["AC"]] * pr * UI[parts["UI"]]
    if impact <= 0:
        score = F(0)
    elif changed:
        score = _roundup(min(F("1.08") * (impact + exploitability), F(10)))
    else:
        score = _roundup(min(impact + exploitability, F(10)))
    return Decimal(score.numerator) / Decimal(score.denominator)


def all_vectors():
    for av, ac, pr, ui, s, c, i, a in itertools.product(
        "NALP", "LH", "NLH", "NR", "UC", "HLN", "HLN", "HLN"
    ):
        yield f"CVSS:3.1/AV:{av}/AC:{ac}/PR:{pr}/UI:{ui}/S:{s}/C:{c}/I:{i}/A:{a}"


# ---------------------------------------------------------------- reasoning
# Naive loop: apply every rule to the whole statement set until nothing changes.

_T = IRI(RDF + "type")
_SC = IRI(RDFS + "subClassOf")
_SP = IRI(RDFS + "subPropertyOf")
_DOM = IRI(RDFS + "domain")
_RNG = IRI(RDFS + "range")
_INV = IRI(OWL + "inverseOf")
_SAME = IRI(OWL + "sameAs")
_SYM = IRI(OWL + "SymmetricProperty")
_TRANS = IRI(OWL + "TransitiveProperty")
_FUNC = IRI(OWL + "FunctionalProperty")
_IFUNC = IRI(OWL + "InverseFunctionalProperty")


def _ok(s, p, o):
    return not isinstance(s, Literal) and isinstance(p, IRI)


def _one_round(ts: set) -> set:
    out = set()

    def add(s, p, o):
        if _ok(s, p, o):
            out.add(Triple(s, p, o))

    lst = list(ts)
    for (s1, p1, o1) in lst:
        for (s2, p2, o2) in lst:
            if p1 == _SC and p2 == _SC and o1 == s2:
                add(s1, _SC, o2)
            if p1 == _T and p2 == _SC and o1 == s2:
                add(s1, _T, o2)
            if p1 == _SP and p2 == _SP and o1 == s2:
                add(s1, _SP, o2)
            if p2 == _SP and p1 == s2:
                add(s1, o2, o1)
            if p2 == _DOM and p1 == s2:
                add(s1, _T, o2)
            if p2 == _RNG and p1 == s2:
                add(o1, _T, o2)
            if p2 == _INV and p1 == s2:
                add(o1, o2, s1)
            if p2 == _INV and p1 == o2:
                add(o1, s2, s1)
            if p2 == _T and o2 == _SYM and p1 == s2:
                add(o1, p1, s1)
            if p2 == _T and o2 == _FUNC and p1 == s2:
                for (s3, p3, o3) in lst:
                    if p3 == p1 and s3 == s1 and o3 != o1 and not isinstance(o1, Literal) and not isinstance(o3, Literal):
                        add(o1, _SAME, o3)
            if p2 == _T and o2 == _IFUNC and p1 == s2:
                for (s3, p3, o3) in lst:
                    if p3 == p1 and o3 == o1 and s3 != s1:
                        add(s1, _SAME, s3)
            if p2 == _T and o2 == _TRANS and p1 == s2:
                for (s3, p3, o3) in lst:
                    if p3 == p1 and s3 == o1:
                        add(s1, p1, o3)
            if p1 == _SAME:
                if p2 == _SAME and o1 == s2:
                    add(s1, _SAME, o2)
                if p2 != _SAME and s2 == s1:
                    add(o1, p2, o2)
                if p2 != _SAME and o2 == s1:
                    add(s2, p2, o1)
        if p1 == _SAME:
            add(o1, _SAME, s1)
    return out


def naive_closure(statements: set) -> set:
    """Full fixpoint (input statements included)."""
    closed = set(statements)
    while True:
        new = _one_round(closed) - closed
        if not new:
            return closed
        closed |= new


# ---------------------------------------------------------------- SPARQL
# Assignment enumeration over the term universe.

_NUMERIC = {XSD + "integer", XSD + "decimal"}


def _value(term):
    if isinstance(term, Literal):
        if term.datatype in _NUMERIC:
            return ("num", Decimal(term.lexical))
        if term.datatype == XSD + "string":
            return ("str", term.lexical)
        if term.datatype == XSD + "boolean":
            return ("bool", term.lexical == "true")
    return ("term", term)


def _cmp(op, a, b):
    """True / False / None (type error)."""
    ka, va = _value(a)
    kb, vb = _value(b)
    if ka == kb and ka in ("num", "str", "bool"):
        return {
            "=": va == vb, "!=": va != vb, "<": va < vb,
            "<=": va <= vb, ">": va > vb, ">=": va >= vb,
        }[op]
    if op in ("=", "!="):
        if {ka, kb} == {"num", "str"}:
            return None
        if ka == "term" or kb == "term":
            return (a == b) if op == "=" else (a != b)
        return True if a == b and op == "=" else (None if a != b else False)
    return None


def oracle_expr(expr, row):
    """Evaluate a tiny expression tree given as nested tuples."""
    kind = expr[0]
    if kind == "var":
        return row.get(expr[1], None), True
    if kind == "const":
        return expr[1], True
    raise AssertionError(kind)


def oracle_filter(expr, row):
    kind = expr[0]
    if kind == "cmp":
        _, op, left, right = expr
        a = row.get(left[1]) if left[0] == "var" else left[1]
        b = row.get(right[1]) if right[0] == "var" else right[1]
        if a is None or b is None:
            return None
        return _cmp(op, a, b)
    if kind == "and":
        x, y = oracle_filter(expr[1], row), oracle_filter(expr[2], row)
        if x is False or y is False:
            return False
        if x is None or y is None:
            return None
        return True
    if kind == "or":
        x, y = oracle_filter(expr[1], row), oracle_filter(expr[2], row)
        if x is True or y is True:
            return True
        if x is None or y is None:
            return None
        return False
    if kind == "not":
        x = oracle_filter(expr[1], row)
        return None if x is None else not x
    raise AssertionError(kind)


def oracle_select(statements: set, patterns, filters, projection, distinct, binds=()):
    """Brute-force SELECT.

    ``patterns`` are (s, p, o) with variables written as ``"?name"`` strings;
    ``binds`` are (var, constant term) pairs; ``filters`` are expression tuples.
    Returns sorted list of projected tuples (None for unbound).
    """
    variables = sorted({x for pat in patterns for x in pat if isinstance(x, str)})
    universe = set()
    for t in statements:
        universe.update(t)
    for pat in patterns:
        universe.update(x for x in pat if not isinstance(x, str))
    universe = sorted(universe, key=lambda t: t.n3())
    rows = []
    for combo in itertools.product(universe, repeat=len(variables)):
        row = dict(zip(variables, combo))

        def sub(x):
            return row[x] if isinstance(x, str) else x

        try:
            if not all(Triple(sub(s), sub(p), sub(o)) in statements for s, p, o in patterns):
                continue
        except ValueError:
            continue
        for var, const in binds:
            row[var] = const
        if all(oracle_filter(f, row) is True for f in filters):
            rows.append(tuple(row.get(v) for v in projection))
    if distinct:
        rows = list(set(rows))
    return sorted(rows, key=lambda r: tuple("" if x is None else x.n3() for x in r))
