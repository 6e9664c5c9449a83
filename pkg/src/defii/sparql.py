"""SELECT-only SPARQL subset: basic graph patterns, BIND and FILTER.

Grammar accepted::

    PREFIX p: <iri> ...
    SELECT [DISTINCT] ?v1 ?v2 ...
    [WHERE] { triple patterns (with a ; ,) | BIND(expr AS ?v) | FILTER(expr) }

Expressions are variables, constants, comparisons (= != < <= > >=), ``&&``,
``||``, ``!`` and parentheses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Union

from ._lexer import Token, TokenStream, tokenize, unescape_string
from .errors import ParseError, QueryEvaluationError
from .rdfio import expand_pname
from .store import EXPLICIT, Repository
from .terms import (
    IRI,
    RDF_TYPE,
    XSD,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_INTEGER,
    XSD_STRING,
    BNode,
    Literal,
    Term,
    TermError,
    sort_key,
)

# ------------------------------------------------------------------ AST


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


@dataclass(frozen=True)
class Const:
    term: Term


@dataclass(frozen=True)
class Compare:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class And:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Or:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Not:
    operand: "Expression"


Expression = Union[Var, Const, Compare, And, Or, Not]


@dataclass(frozen=True)
class TriplePattern:
    s: Term | Var
    p: Term | Var
    o: Term | Var

    def variables(self) -> set[str]:
        return {x.name for x in (self.s, self.p, self.o) if isinstance(x, Var)}


@dataclass(frozen=True)
class Bind:
    expression: Expression
    target: str


@dataclass(frozen=True)
class Filter:
    expression: Expression


PatternElement = Union[TriplePattern, Bind, Filter]


@dataclass
class QueryAst:
    prefixes: dict[str, str]
    distinct: bool
    projection: list[str]
    patterns: list[PatternElement] = field(default_factory=list)

    @property
    def triple_patterns(self) -> list[TriplePattern]:
        return [e for e in self.patterns if isinstance(e, TriplePattern)]

    @property
    def binds(self) -> list[Bind]:
        return [e for e in self.patterns if isinstance(e, Bind)]

    @property
    def filters(self) -> list[Filter]:
        return [e for e in self.patterns if isinstance(e, Filter)]


@dataclass
class SolutionTable:
    variables: list[str]
    rows: list[tuple[Term | None, ...]]

    def __len__(self) -> int:
        return len(self.rows)

    def dicts(self) -> list[dict[str, Term]]:
        return [
            {v: t for v, t in zip(self.variables, row) if t is not None} for row in self.rows
        ]

    def to_json(self) -> dict:
        """W3C SPARQL 1.1 JSON results shape."""
        bindings = []
        for row in self.dicts():
            bindings.append({v: _term_json(t) for v, t in row.items()})
        return {"head": {"vars": list(self.variables)}, "results": {"bindings": bindings}}


def _term_json(t: Term) -> dict:
    if isinstance(t, IRI):
        return {"type": "uri", "value": t.value}
    if isinstance(t, BNode):
        return {"type": "bnode", "value": t.label}
    out = {"type": "literal", "value": t.lexical}
    if t.lang is not None:
        out["xml:lang"] = t.lang
    elif t.datatype != XSD_STRING:
        out["datatype"] = t.datatype
    return out


# ------------------------------------------------------------------ parser

_UNSUPPORTED = {
    "OPTIONAL", "UNION", "GRAPH", "MINUS", "SERVICE", "VALUES", "EXISTS", "NOT",
    "ORDER", "LIMIT", "OFFSET", "GROUP", "HAVING", "FROM", "NAMED",
    "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "LOAD", "CLEAR", "DROP",
    "CREATE", "WITH", "BASE",
    "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT",
}
_COMPARISONS = ("=", "!=", "<=", ">=", "<", ">")


class _QueryParser:
    def __init__(self, text: str) -> None:
        self.s = TokenStream(tokenize(text))
        self.prefixes: dict[str, str] = {}
        self.bound: set[str] = set()

    def unsupported(self, tok: Token) -> None:
        if tok.kind == "NAME" and tok.text.upper() in _UNSUPPORTED:
            raise self.s.error(f"unsupported keyword {tok.text.upper()}", tok)

    def parse(self) -> QueryAst:
        s = self.s
        while s.peek.is_keyword("PREFIX"):
            s.next()
            name = s.next()
            if name.kind != "PNAME" or not name.text.endswith(":") or name.text.count(":") != 1:
                raise s.error("expected prefix name such as 'ex:'", name)
            iri = s.next()
            if iri.kind != "IRIREF":
                raise s.error("expected <IRI> after prefix name", iri)
            self.prefixes[name.text[:-1]] = iri.text[1:-1]
        self.unsupported(s.peek)
        if not s.peek.is_keyword("SELECT"):
            raise s.error(f"expected SELECT, found {s.peek.text or 'end of input'!r}")
        s.next()
        distinct = False
        if s.peek.is_keyword("DISTINCT"):
            s.next()
            distinct = True
        elif s.peek.is_keyword("REDUCED"):
            raise s.error("unsupported keyword REDUCED")
        projection: list[str] = []
        projection_tokens = []
        while s.peek.kind == "VAR":
            tok = s.next()
            projection.append(tok.text[1:])
            projection_tokens.append(tok)
        if s.peek.is_op("*"):
            raise s.error("SELECT * is not supported; list the variables")
        if s.peek.is_op("("):
            raise s.error("unsupported projection expression (aggregates are not supported)")
        self.unsupported(s.peek)
        if not projection:
            raise s.error("expected at least one projected variable")
        if s.peek.is_keyword("WHERE"):
            s.next()
        s.expect_op("{")
        patterns = self.group_body()
        s.expect_op("}")
        self.unsupported(s.peek)
        if s.peek.kind != "EOF":
            raise s.error(f"unexpected {s.peek.text!r} after query body")
        for name, tok in zip(projection, projection_tokens):
            if name not in self.bound:
                raise s.error(f"projected variable ?{name} does not appear in the query body", tok)
        return QueryAst(dict(self.prefixes), distinct, projection, patterns)

    def group_body(self) -> list[PatternElement]:
        s = self.s
        out: list[PatternElement] = []
        while True:
            tok = s.peek
            if tok.is_op("}") or tok.kind == "EOF":
                return out
            if tok.is_op("."):
                s.next()
                continue
            self.unsupported(tok)
            if tok.is_op("{"):
                raise s.error("nested group patterns are not supported", tok)
            if tok.is_keyword("BIND"):
                out.append(self.bind())
            elif tok.is_keyword("FILTER"):
                s.next()
                s.expect_op("(")
                expr = self.expression()
                s.expect_op(")")
                out.append(Filter(expr))
            else:
                out.extend(self.triples_block())

    def bind(self) -> Bind:
        s = self.s
        s.next()
        s.expect_op("(")
        start = s.peek
        expr = self.expression()
        if not s.peek.is_keyword("AS"):
            raise s.error("expected AS in BIND")
        s.next()
        var = s.next()
        if var.kind != "VAR":
            raise s.error("expected variable after AS", var)
        s.expect_op(")")
        for name in sorted(_expr_vars(expr)):
            if name not in self.bound:
                raise s.error(f"BIND references ?{name} before it is bound", start)
        name = var.text[1:]
        if name in self.bound:
            raise s.error(f"BIND target ?{name} is already bound", var)
        self.bound.add(name)
        return Bind(expr, name)

    def triples_block(self) -> list[TriplePattern]:
        s = self.s
        out = []
        subject = self.term(position="subject")
        while True:
            predicate = self.verb()
            while True:
                obj = self.term(position="object")
                out.append(TriplePattern(subject, predicate, obj))
                if s.peek.is_op(","):
                    s.next()
                    continue
                break
            if s.peek.is_op(";"):
                while s.peek.is_op(";"):
                    s.next()
                if s.peek.is_op(".") or s.peek.is_op("}"):
                    break
                continue
            break
        for pat in out:
            self.bound |= pat.variables()
        if not (s.peek.is_op(".") or s.peek.is_op("}") or s.peek.is_keyword("FILTER") or s.peek.is_keyword("BIND")):
            tok = s.peek
            self.unsupported(tok)
            raise s.error(f"expected '.' or '}}', found {tok.text or 'end of input'!r}")
        return out

    def verb(self) -> Term | Var:
        s = self.s
        tok = s.peek
        if tok.is_op("^"):
            raise s.error("property paths are not supported", tok)
        if tok.kind == "NAME" and tok.text == "a":
            s.next()
            term: Term | Var = RDF_TYPE
        elif tok.kind == "VAR":
            s.next()
            term = Var(tok.text[1:])
        elif tok.kind in ("IRIREF", "PNAME"):
            term = self.term(position="predicate")
        else:
            raise s.error(f"expected predicate, found {tok.text or 'end of input'!r}", tok)
        nxt = s.peek
        if nxt.kind == "OP" and nxt.text in ("/", "|", "*", "+", "?", "^"):
            raise s.error("property paths are not supported", nxt)
        return term

    def term(self, position: str) -> Term | Var:
        s = self.s
        tok = s.peek
        self.unsupported(tok)
        if tok.kind == "VAR":
            s.next()
            return Var(tok.text[1:])
        if tok.kind == "IRIREF":
            s.next()
            try:
                return IRI(tok.text[1:-1])
            except TermError as exc:
                raise s.error(str(exc), tok) from None
        if tok.kind == "PNAME":
            s.next()
            return expand_pname(tok, self.prefixes)
        if tok.kind == "BNODE" or tok.is_op("["):
            raise s.error("blank nodes in query patterns are not supported", tok)
        if tok.is_op("("):
            raise s.error("collections are not supported", tok)
        if position == "object":
            lit = self.literal()
            if lit is not None:
                return lit
        if position == "subject" and tok.kind in ("STRING", "INTEGER", "DECIMAL"):
            raise s.error("literal in subject position", tok)
        raise s.error(f"expected {position}, found {tok.text or 'end of input'!r}", tok)

    def literal(self) -> Literal | None:
        s = self.s
        tok = s.peek
        if tok.kind == "STRING":
            s.next()
            lexical = unescape_string(tok)
            if s.peek.kind == "LANGTAG":
                return Literal(lexical, lang=s.next().text[1:])
            if s.peek.is_op("^^"):
                s.next()
                dt = s.next()
                if dt.kind == "IRIREF":
                    return Literal(lexical, dt.text[1:-1])
                if dt.kind == "PNAME":
                    return Literal(lexical, expand_pname(dt, self.prefixes).value)
                raise s.error("expected datatype IRI after '^^'", dt)
            return Literal(lexical)
        if tok.kind == "INTEGER":
            s.next()
            return Literal(tok.text, XSD_INTEGER)
        if tok.kind == "DECIMAL":
            s.next()
            return Literal(tok.text, XSD_DECIMAL)
        if tok.kind == "NAME" and tok.text in ("true", "false"):
            s.next()
            return Literal(tok.text, XSD_BOOLEAN)
        if tok.kind in ("DOUBLE", "SQSTRING", "LONGSTRING"):
            raise s.error(f"unsupported literal form {tok.text!r}", tok)
        return None

    # expression := or ; or := and ('||' and)* ; and := rel ('&&' rel)*
    # rel := unary (cmp unary)? ; unary := '!' unary | primary

    def expression(self) -> Expression:
        left = self.conjunction()
        while self.s.peek.is_op("||"):
            self.s.next()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Expression:
        left = self.relational()
        while self.s.peek.is_op("&&"):
            self.s.next()
            left = And(left, self.relational())
        return left

    def relational(self) -> Expression:
        left = self.unary()
        tok = self.s.peek
        if tok.kind == "OP" and tok.text in _COMPARISONS:
            self.s.next()
            return Compare(tok.text, left, self.unary())
        return left

    def unary(self) -> Expression:
        s = self.s
        if s.peek.is_op("!"):
            s.next()
            return Not(self.unary())
        tok = s.peek
        if tok.is_op("("):
            s.next()
            inner = self.expression()
            s.expect_op(")")
            return inner
        if tok.kind == "VAR":
            s.next()
            return Var(tok.text[1:])
        if tok.kind in ("IRIREF", "PNAME"):
            return Const(self.term(position="predicate"))
        lit = self.literal()
        if lit is not None:
            return Const(lit)
        self.unsupported(tok)
        if tok.kind == "NAME" and s.lookahead().is_op("("):
            raise s.error(f"unsupported function {tok.text}", tok)
        if tok.kind == "OP" and tok.text in ("+", "-", "*", "/"):
            raise s.error("arithmetic is not supported", tok)
        raise s.error(f"expected expression, found {tok.text or 'end of input'!r}", tok)


def _expr_vars(expr: Expression) -> set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Not):
        return _expr_vars(expr.operand)
    return _expr_vars(expr.left) | _expr_vars(expr.right)


def parse_query(text: str) -> QueryAst:
    """Parse query text; raises :class:`ParseError` with line and column."""
    return _QueryParser(text).parse()


# ------------------------------------------------------------------ evaluation

_NUMERIC_TYPES = {
    XSD + t
    for t in (
        "integer", "decimal", "int", "long", "short", "byte", "nonNegativeInteger",
        "positiveInteger", "negativeInteger", "nonPositiveInteger", "unsignedInt",
        "unsignedLong", "unsignedShort", "unsignedByte",
    )
}
_FLOAT_TYPES = {XSD + "float", XSD + "double"}


class _TypeError(Exception):
    """Expression type error; drops the row under FILTER."""


def _classify(t: Term):
    if isinstance(t, Literal):
        if t.datatype in _NUMERIC_TYPES or t.datatype in _FLOAT_TYPES:
            try:
                value = float(t.lexical) if t.datatype in _FLOAT_TYPES else Decimal(t.lexical)
            except (ValueError, InvalidOperation):
                raise _TypeError(f"invalid numeric literal {t.lexical!r}") from None
            return "numeric", value
        if t.datatype == XSD_STRING:
            return "string", t.lexical
        if t.datatype == XSD_BOOLEAN:
            if t.lexical not in ("true", "false", "1", "0"):
                raise _TypeError(f"invalid boolean {t.lexical!r}")
            return "boolean", t.lexical in ("true", "1")
        return "literal", t
    return "node", t


def _compare(op: str, a: Term, b: Term) -> bool:
    ka, va = _classify(a)
    kb, vb = _classify(b)
    if ka == kb and ka in ("numeric", "string", "boolean"):
        if ka == "numeric" and isinstance(va, float) != isinstance(vb, float):
            va, vb = float(va), float(vb)
        return {
            "=": va == vb, "!=": va != vb, "<": va < vb,
            "<=": va <= vb, ">": va > vb, ">=": va >= vb,
        }[op]
    if op not in ("=", "!="):
        raise _TypeError(f"cannot order {a.n3()} and {b.n3()}")
    if {ka, kb} == {"numeric", "string"}:
        raise _TypeError(f"cannot compare {a.n3()} with {b.n3()}")
    if ka == "node" or kb == "node":
        equal = a == b
    elif a == b:
        equal = True
    else:
        raise _TypeError(f"cannot compare {a.n3()} with {b.n3()}")
    return equal if op == "=" else not equal


_TRUE = Literal("true", XSD_BOOLEAN)
_FALSE = Literal("false", XSD_BOOLEAN)


def _ebv(t: Term) -> bool:
    kind, value = _classify(t)
    if kind == "boolean":
        return value
    if kind == "numeric":
        return value != 0
    if kind == "string":
        return value != ""
    raise _TypeError(f"no boolean value for {t.n3()}")


def _eval(expr: Expression, row: dict[str, Term]) -> Term:
    if isinstance(expr, Const):
        return expr.term
    if isinstance(expr, Var):
        if expr.name not in row:
            raise _TypeError(f"unbound variable ?{expr.name}")
        return row[expr.name]
    if isinstance(expr, Compare):
        return _TRUE if _compare(expr.op, _eval(expr.left, row), _eval(expr.right, row)) else _FALSE
    if isinstance(expr, Not):
        return _FALSE if _ebv(_eval(expr.operand, row)) else _TRUE
    # && and || follow the three-valued logic of the W3C recommendation
    results = []
    for side in (expr.left, expr.right):
        try:
            results.append(_ebv(_eval(side, row)))
        except _TypeError as exc:
            results.append(exc)
    decisive = isinstance(expr, Or)
    if decisive in results:
        return _TRUE if decisive else _FALSE
    for r in results:
        if isinstance(r, _TypeError):
            raise r
    return _FALSE if decisive else _TRUE


def _substitute(x: Term | Var, row: dict[str, Term]) -> Term | None:
    if isinstance(x, Var):
        return row.get(x.name)
    return x


def _bound_count(pat: TriplePattern, bound: set[str]) -> int:
    return sum(1 for x in (pat.s, pat.p, pat.o) if not isinstance(x, Var) or x.name in bound)


def _join(graph, pattern: TriplePattern, rows: list[dict], include_inferred: bool) -> list[dict]:
    out = []
    for row in rows:
        s, p, o = (_substitute(x, row) for x in (pattern.s, pattern.p, pattern.o))
        if isinstance(s, Literal) or (p is not None and not isinstance(p, IRI)):
            continue
        for t in graph.find(s, p, o):
            if not include_inferred and graph.records[t] is not EXPLICIT:
                continue
            new = dict(row)
            ok = True
            for slot, value in ((pattern.s, t.subject), (pattern.p, t.predicate), (pattern.o, t.object)):
                if isinstance(slot, Var):
                    prev = new.get(slot.name)
                    if prev is None:
                        new[slot.name] = value
                    elif prev != value:
                        ok = False
                        break
            if ok:
                out.append(new)
    return out


def evaluate(
    repo: Repository, graph: str, ast: QueryAst, *, include_inferred: bool = True
) -> SolutionTable:
    """Evaluate against one graph.

    Consecutive triple patterns are joined nested-loop style starting from
    the most selective one; BINDs apply at their position; FILTERs are
    applied once every pattern and BIND has been evaluated.
    """
    g = repo.graph(graph)
    rows: list[dict[str, Term]] = [{}]
    bound: set[str] = set()
    filters = []
    elements = list(ast.patterns)
    i = 0
    while i < len(elements):
        el = elements[i]
        if isinstance(el, TriplePattern):
            block = []
            while i < len(elements) and isinstance(elements[i], TriplePattern):
                block.append(elements[i])
                i += 1
            while block:
                best = max(block, key=lambda pat: _bound_count(pat, bound))
                block.remove(best)
                rows = _join(g, best, rows, include_inferred)
                bound |= best.variables()
            continue
        if isinstance(el, Bind):
            missing = sorted(_expr_vars(el.expression) - bound)
            if missing:
                raise QueryEvaluationError(f"BIND references unbound variable ?{missing[0]}")
            if el.target in bound:
                raise QueryEvaluationError(f"BIND target ?{el.target} is already bound")
            extended = []
            for row in rows:
                try:
                    value = _eval(el.expression, row)
                except _TypeError as exc:
                    raise QueryEvaluationError(f"BIND to ?{el.target} failed: {exc}") from None
                extended.append({**row, el.target: value})
            rows = extended
            bound.add(el.target)
        else:
            filters.append(el)
        i += 1

    kept = []
    for row in rows:
        try:
            if all(_ebv(_eval(f.expression, row)) for f in filters):
                kept.append(row)
        except _TypeError:
            continue
    projected = [tuple(row.get(v) for v in ast.projection) for row in kept]
    if ast.distinct:
        projected = list(dict.fromkeys(projected))
    projected.sort(key=lambda r: tuple(sort_key(t) for t in r))
    return SolutionTable(list(ast.projection), projected)


def select(repo: Repository, graph: str, text: str, **kwargs) -> SolutionTable:
    return evaluate(repo, graph, parse_query(text), **kwargs)
