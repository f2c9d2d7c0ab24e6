"""Parser for the SPARQL 1.0 query subset.

Produces the algebra of ``algebra.py`` directly: prefixed names are
expanded, ``a`` becomes rdf:type, predicate-object and object lists become
plain triples and blank nodes become hidden variables.  SPARQL 1.1
constructs and named graphs are rejected with UNSUPPORTED_FEATURE naming
the construct.
"""

from __future__ import annotations

import re
from typing import Optional
from urllib.parse import urljoin

from ..errors import SparqlError
from .algebra import (
    BGP, FUNCTIONS, RDF, RDF_TYPE, XSD, BinOp, Call, Filter, IRI, Join, Lit, Modifiers, Neg,
    Not, Optional_, OrderCondition, Query, Triple, Union_, Var,
)

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iri><[^<>"{}|^`\\\x00-\x20]*>)
  | (?P<str>\"\"\"(?:[^"\\]|\\.|"(?!""))*\"\"\"|'''(?:[^'\\]|\\.|'(?!''))*'''
            |"(?:[^"\\\n\r]|\\.)*"|'(?:[^'\\\n\r]|\\.)*')
  | (?P<var>[?$][A-Za-z0-9_]+)
  | (?P<bnode>_:[A-Za-z0-9_](?:[\w\-]|\.(?=[\w\-]))*)
  | (?P<lang>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<pname>(?:[A-Za-z](?:[\w\-]|\.(?=[\w\-]))*)?:(?:[\w\-](?:[\w\-]|\.(?=[\w\-]))*)?)
  | (?P<name>[A-Za-z_][\w\-]*)
  | (?P<punct>\^\^|&&|\|\||!=|<=|>=|[{}()\[\];,.*=<>!+\-/^|])
""", re.X)

_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}

# Keywords of later SPARQL versions or of features outside the subset.
_UNSUPPORTED = {
    "GRAPH": "GRAPH", "FROM": "FROM (dataset clause)", "NAMED": "FROM NAMED (dataset clause)",
    "MINUS": "MINUS", "BIND": "BIND", "VALUES": "VALUES", "SERVICE": "SERVICE",
    "GROUP": "GROUP BY", "HAVING": "HAVING", "EXISTS": "EXISTS", "NOT": "NOT EXISTS",
    "INSERT": "INSERT (update)", "DELETE": "DELETE (update)", "LOAD": "LOAD (update)",
    "CLEAR": "CLEAR (update)", "CREATE": "CREATE (update)", "DROP": "DROP (update)",
}
_UNSUPPORTED_FUNCTIONS = {
    "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT", "IF", "COALESCE", "IRI", "URI",
    "BNODE", "RAND", "ABS", "CEIL", "FLOOR", "ROUND", "CONCAT", "STRLEN", "UCASE", "LCASE",
    "ENCODE_FOR_URI", "CONTAINS", "STRSTARTS", "STRENDS", "STRBEFORE", "STRAFTER", "YEAR",
    "MONTH", "DAY", "HOURS", "MINUTES", "SECONDS", "TIMEZONE", "TZ", "NOW", "UUID", "STRUUID",
    "MD5", "SHA1", "SHA256", "SHA384", "SHA512", "STRLANG", "STRDT", "ISNUMERIC", "SUBSTR",
    "REPLACE",
}
_BUILTINS = {name.upper(): name for name in FUNCTIONS}
_BUILTINS["ISURI"] = "isIRI"


class _Tok:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind, self.text, self.pos = kind, text, pos

    def __repr__(self) -> str:
        return f"{self.kind}:{self.text}"


def _tokenize(text: str) -> list[_Tok]:
    out: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise _error(text, pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(0), pos))
        pos = m.end()
    out.append(_Tok("eof", "", len(text)))
    return out


def _error(text: str, pos: int, msg: str, code: str = "SYNTAX") -> SparqlError:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return SparqlError(code, msg, f"line {line}, column {col}")


def _unescape(body: str) -> str:
    out, i = [], 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            n = body[i + 1]
            if n in _ESCAPES:
                out.append(_ESCAPES[n])
                i += 2
                continue
            if n in "uU":
                width = 4 if n == "u" else 8
                out.append(chr(int(body[i + 2:i + 2 + width], 16)))
                i += 2 + width
                continue
        out.append(c)
        i += 1
    return "".join(out)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {}
        self.prefix_order: list[tuple[str, str]] = []
        self.base: Optional[str] = None
        labels = {t.text[2:] for t in self.toks if t.kind == "bnode"}
        self.fresh_names = (f"genid{n}" for n in range(1, 1 << 30) if f"genid{n}" not in labels)

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Optional[_Tok] = None, code: str = "SYNTAX") -> SparqlError:
        return _error(self.text, (tok or self.tok).pos, msg, code)

    def expected(self, what: str) -> SparqlError:
        found = self.tok.text or "end of input"
        return self.error(f"expected {what}, found {found!r}")

    def is_kw(self, word: str) -> bool:
        return self.tok.kind == "name" and self.tok.text.upper() == word

    def accept_kw(self, word: str) -> bool:
        if self.is_kw(word):
            self.i += 1
            return True
        return False

    def expect_kw(self, word: str) -> None:
        if not self.accept_kw(word):
            raise self.expected(word)

    def is_p(self, s: str) -> bool:
        return self.tok.kind == "punct" and self.tok.text == s

    def accept_p(self, s: str) -> bool:
        if self.is_p(s):
            self.i += 1
            return True
        return False

    def expect_p(self, s: str) -> None:
        if not self.accept_p(s):
            raise self.expected(repr(s))

    def unsupported(self, feature: str, tok: Optional[_Tok] = None) -> SparqlError:
        return self.error(f"{feature} is not supported (SPARQL 1.0 subset)", tok,
                          code="UNSUPPORTED_FEATURE")

    def check_unsupported_keyword(self) -> None:
        if self.tok.kind == "name" and self.tok.text.upper() in _UNSUPPORTED:
            raise self.unsupported(_UNSUPPORTED[self.tok.text.upper()])

    # -- terms ----------------------------------------------------------------

    def iri_ref(self, tok: _Tok) -> str:
        value = tok.text[1:-1]
        if self.base is not None:
            value = urljoin(self.base, value)
        return value

    def pname(self, tok: _Tok) -> str:
        prefix, local = tok.text.split(":", 1)
        if prefix not in self.prefixes:
            raise self.error(f"undeclared prefix {prefix!r}", tok)
        return self.prefixes[prefix] + local

    def iri(self) -> str:
        t = self.tok
        if t.kind == "iri":
            self.i += 1
            return self.iri_ref(t)
        if t.kind == "pname":
            self.i += 1
            return self.pname(t)
        raise self.expected("an IRI")

    def var(self) -> Var:
        if self.tok.kind != "var":
            raise self.expected("a variable")
        return Var(self.advance().text[1:])

    def fresh(self) -> Var:
        return Var(next(self.fresh_names), hidden=True)

    def literal(self) -> Lit:
        t = self.tok
        if t.kind == "str":
            self.i += 1
            q = 3 if t.text[:3] in ('"""', "'''") else 1
            lexical = _unescape(t.text[q:-q])
            if self.tok.kind == "lang":
                return Lit(lexical, None, self.advance().text[1:].lower())
            if self.accept_p("^^"):
                return Lit(lexical, self.iri())
            return Lit(lexical)
        if t.kind == "num":
            self.i += 1
            return _numeric(t.text)
        if t.kind == "name" and t.text in ("true", "false"):
            self.i += 1
            return Lit(t.text, XSD + "boolean")
        raise self.expected("a literal")

    # -- prologue and query forms ---------------------------------------------

    def query(self) -> Query:
        while True:
            if self.accept_kw("BASE"):
                t = self.advance()
                if t.kind != "iri":
                    raise self.error("BASE needs an IRI reference", t)
                self.base = self.iri_ref(t)
            elif self.accept_kw("PREFIX"):
                t = self.advance()
                if t.kind != "pname" or not t.text.endswith(":"):
                    raise self.error("expected a prefix name ending in ':'", t)
                target = self.advance()
                if target.kind != "iri":
                    raise self.error("PREFIX needs an IRI reference", target)
                iri = self.iri_ref(target)
                self.prefixes[t.text[:-1]] = iri
                self.prefix_order.append((t.text[:-1], iri))
            else:
                break
        self.check_unsupported_keyword()
        if self.accept_kw("SELECT"):
            q = self.select()
        elif self.accept_kw("ASK"):
            self.dataset_clauses()
            q = Query("ASK", self.where(optional_keyword=True))
        elif self.accept_kw("CONSTRUCT"):
            template = self.construct_template()
            self.dataset_clauses()
            pattern = self.where(optional_keyword=True)
            q = Query("CONSTRUCT", pattern, template=template, modifiers=self.modifiers())
        elif self.accept_kw("DESCRIBE"):
            q = self.describe()
        else:
            raise self.expected("SELECT, ASK, CONSTRUCT or DESCRIBE")
        if self.tok.kind != "eof":
            self.check_unsupported_keyword()
            raise self.expected("end of query")
        return Query(q.form, q.pattern, q.projection, q.distinct, q.template, q.describe,
                     q.modifiers, tuple(self.prefix_order), self.base)

    def dataset_clauses(self) -> None:
        if self.is_kw("FROM"):
            raise self.unsupported("FROM (dataset clause)")

    def select(self) -> Query:
        distinct = ""
        if self.accept_kw("DISTINCT"):
            distinct = "DISTINCT"
        elif self.accept_kw("REDUCED"):
            distinct = "REDUCED"
        projection: Optional[list[Var]] = None
        if self.accept_p("*"):
            pass
        else:
            projection = []
            while self.tok.kind == "var" or self.is_p("("):
                if self.is_p("("):
                    raise self.unsupported("SELECT expressions (expr AS ?var)")
                v = self.var()
                if v in projection:
                    raise self.error(f"variable ?{v.name} projected twice")
                projection.append(v)
            if not projection:
                raise self.expected("projected variables or '*'")
        self.dataset_clauses()
        pattern = self.where(optional_keyword=True)
        return Query("SELECT", pattern, None if projection is None else tuple(projection),
                     distinct, modifiers=self.modifiers())

    def describe(self) -> Query:
        targets = []
        if not self.accept_p("*"):
            while self.tok.kind in ("var", "iri", "pname"):
                targets.append(self.var() if self.tok.kind == "var" else IRI(self.iri()))
            if not targets:
                raise self.expected("DESCRIBE targets")
        self.dataset_clauses()
        if self.is_kw("WHERE") or self.is_p("{"):
            pattern = self.where(optional_keyword=True)
        else:
            pattern = BGP(())
        return Query("DESCRIBE", pattern, describe=tuple(targets), modifiers=self.modifiers())

    def where(self, optional_keyword: bool) -> object:
        if not self.accept_kw("WHERE") and not optional_keyword:
            raise self.expected("WHERE")
        return self.group()

    def construct_template(self) -> tuple:
        self.expect_p("{")
        triples: list[Triple] = []
        while not self.is_p("}"):
            self.triples_same_subject(triples)
            if not self.accept_p("."):
                break
        self.expect_p("}")
        return tuple(triples)

    def modifiers(self) -> Modifiers:
        order = []
        if self.accept_kw("ORDER"):
            self.expect_kw("BY")
            while True:
                if self.is_kw("ASC") or self.is_kw("DESC"):
                    desc = self.advance().text.upper() == "DESC"
                    self.expect_p("(")
                    e = self.expression()
                    self.expect_p(")")
                    order.append(OrderCondition(e, desc))
                elif self.tok.kind == "var":
                    order.append(OrderCondition(self.var()))
                elif self.is_p("("):
                    self.i += 1
                    e = self.expression()
                    self.expect_p(")")
                    order.append(OrderCondition(e))
                elif self.tok.kind == "name" and self.tok.text.upper() in _BUILTINS:
                    order.append(OrderCondition(self.builtin_call()))
                else:
                    break
            if not order:
                raise self.expected("an order condition")
        self.check_unsupported_keyword()
        limit = offset = None
        for _ in range(2):
            if limit is None and self.accept_kw("LIMIT"):
                limit = self.integer()
            elif offset is None and self.accept_kw("OFFSET"):
                offset = self.integer()
        return Modifiers(tuple(order), limit, offset)

    def integer(self) -> int:
        t = self.advance()
        if t.kind != "num" or not t.text.isdigit():
            raise self.error("expected a non-negative integer", t)
        return int(t.text)

    # -- graph patterns ----------------------------------------------------------

    def group(self):
        self.expect_p("{")
        current = None
        filters = []
        last_was_bgp = False
        while not self.is_p("}"):
            self.check_unsupported_keyword()
            if self.is_kw("FILTER"):
                self.i += 1
                filters.append(self.constraint())
                self.accept_p(".")
                continue
            if self.is_kw("OPTIONAL"):
                self.i += 1
                right = self.group()
                current = Optional_(current if current is not None else BGP(()), right)
                last_was_bgp = False
                self.accept_p(".")
                continue
            if self.is_p("{"):
                if self.toks[self.i + 1].kind == "name" and self.toks[self.i + 1].text.upper() == "SELECT":
                    raise self.unsupported("subqueries")
                p = self.group()
                while self.accept_kw("UNION"):
                    p = Union_(p, self.group())
                current = p if current is None else Join(current, p)
                last_was_bgp = False
                self.accept_p(".")
                continue
            triples: list[Triple] = []
            while True:
                self.triples_same_subject(triples)
                if not self.accept_p("."):
                    break
                if not self.starts_triple():
                    break
            if self.starts_triple():
                raise self.expected("'.' between triple patterns")
            block = BGP(tuple(triples))
            if current is None:
                current = block
            elif last_was_bgp:
                current = BGP(current.triples + block.triples)
            else:
                current = Join(current, block)
            last_was_bgp = True
        self.expect_p("}")
        if current is None:
            current = BGP(())
        if filters:
            expr = filters[0]
            for f in filters[1:]:
                expr = BinOp("&&", expr, f)
            current = Filter(current, expr)
        return current

    def starts_triple(self) -> bool:
        t = self.tok
        return t.kind in ("var", "iri", "pname", "bnode", "str", "num") or self.is_p("[") or \
            self.is_p("(") or (t.kind == "name" and t.text in ("true", "false"))

    def constraint(self):
        if self.is_p("("):
            self.i += 1
            e = self.expression()
            self.expect_p(")")
            return e
        if self.tok.kind == "name":
            return self.builtin_call()
        if self.tok.kind in ("iri", "pname"):
            raise self.unsupported("extension function calls")
        raise self.expected("a FILTER constraint")

    def triples_same_subject(self, out: list[Triple]) -> None:
        if self.is_p("["):
            subject = self.blank_node_property_list(out)
            if self.tok.kind in ("var", "iri", "pname") or self.is_kw("A") and self.tok.text == "a":
                self.property_list(subject, out)
            return
        subject = self.subject_term()
        self.property_list(subject, out, required=True)

    def subject_term(self):
        t = self.tok
        if t.kind == "var":
            return self.var()
        if t.kind in ("iri", "pname"):
            return IRI(self.iri())
        if t.kind == "bnode":
            self.i += 1
            return Var(t.text[2:], hidden=True)
        if self.is_p("("):
            raise self.unsupported("RDF collections")
        if t.kind in ("str", "num") or t.kind == "name" and t.text in ("true", "false"):
            raise self.error("a literal cannot be a subject")
        raise self.expected("a triple subject")

    def property_list(self, subject, out: list[Triple], required: bool = True) -> None:
        while True:
            pred = self.verb()
            while True:
                obj = self.object_term(out)
                out.append(Triple(subject, pred, obj))
                if not self.accept_p(","):
                    break
            if not self.accept_p(";"):
                return
            while self.accept_p(";"):
                pass
            if not (self.tok.kind in ("var", "iri", "pname") or self.tok.text == "a"):
                return

    def verb(self):
        t = self.tok
        if t.kind == "name" and t.text == "a":
            self.i += 1
            return IRI(RDF_TYPE)
        if t.kind == "var":
            return self.var()
        if t.kind in ("iri", "pname"):
            iri = self.iri()
            if self.tok.kind == "punct" and self.tok.text in ("/", "|", "^", "*", "+") or \
                    self.is_p("?"):
                raise self.unsupported("property paths")
            return IRI(iri)
        if self.is_p("^") or self.is_p("("):
            raise self.unsupported("property paths")
        if t.kind in ("str", "num"):
            raise self.error("a literal cannot be a predicate")
        raise self.expected("a predicate")

    def object_term(self, out: list[Triple]):
        t = self.tok
        if t.kind == "var":
            return self.var()
        if t.kind in ("iri", "pname"):
            return IRI(self.iri())
        if t.kind == "bnode":
            self.i += 1
            return Var(t.text[2:], hidden=True)
        if self.is_p("["):
            return self.blank_node_property_list(out)
        if self.is_p("("):
            raise self.unsupported("RDF collections")
        if self.is_p("-") or self.is_p("+"):
            sign = self.advance().text
            if self.tok.kind != "num":
                raise self.expected("a number")
            lit = _numeric(self.advance().text)
            return Lit(("-" if sign == "-" else "") + lit.lexical, lit.datatype)
        return self.literal()

    def blank_node_property_list(self, out: list[Triple]) -> Var:
        self.expect_p("[")
        node = self.fresh()
        if not self.accept_p("]"):
            self.property_list(node, out)
            self.expect_p("]")
        return node

    # -- expressions ----------------------------------------------------------------

    def expression(self):
        e = self.and_expr()
        while self.accept_p("||"):
            e = BinOp("||", e, self.and_expr())
        return e

    def and_expr(self):
        e = self.relational()
        while self.accept_p("&&"):
            e = BinOp("&&", e, self.relational())
        return e

    def relational(self):
        e = self.additive()
        for op in ("=", "!=", "<=", ">=", "<", ">"):
            if self.accept_p(op):
                return BinOp(op, e, self.additive())
        if self.is_kw("IN") or self.is_kw("NOT"):
            raise self.unsupported("IN / NOT IN")
        return e

    def additive(self):
        e = self.multiplicative()
        while True:
            if self.accept_p("+"):
                e = BinOp("+", e, self.multiplicative())
            elif self.accept_p("-"):
                e = BinOp("-", e, self.multiplicative())
            else:
                return e

    def multiplicative(self):
        e = self.unary()
        while True:
            if self.accept_p("*"):
                e = BinOp("*", e, self.unary())
            elif self.accept_p("/"):
                e = BinOp("/", e, self.unary())
            else:
                return e

    def unary(self):
        if self.accept_p("!"):
            return Not(self.unary())
        if self.accept_p("-"):
            return Neg(self.unary())
        if self.accept_p("+"):
            return self.unary()
        return self.primary()

    def primary(self):
        t = self.tok
        if self.accept_p("("):
            e = self.expression()
            self.expect_p(")")
            return e
        if t.kind == "var":
            return self.var()
        if t.kind in ("str", "num") or t.kind == "name" and t.text in ("true", "false"):
            return self.literal()
        if t.kind in ("iri", "pname"):
            iri = self.iri()
            if self.is_p("("):
                raise self.unsupported(f"function call <{iri}>", t)
            return IRI(iri)
        if t.kind == "name":
            return self.builtin_call()
        raise self.expected("an expression")

    def builtin_call(self):
        t = self.advance()
        upper = t.text.upper()
        if upper in ("EXISTS", "NOT"):
            raise self.unsupported("EXISTS / NOT EXISTS", t)
        if upper in _UNSUPPORTED_FUNCTIONS:
            raise self.unsupported(f"function {upper}", t)
        if upper not in _BUILTINS:
            raise self.error(f"unknown function {t.text!r}", t)
        name = _BUILTINS[upper]
        self.expect_p("(")
        args = []
        if not self.accept_p(")"):
            args.append(self.expression())
            while self.accept_p(","):
                args.append(self.expression())
            self.expect_p(")")
        lo, hi = FUNCTIONS[name]
        if not lo <= len(args) <= hi:
            raise self.error(f"{name} takes {lo}..{hi} arguments, got {len(args)}", t)
        if name == "bound" and not isinstance(args[0], Var):
            raise self.error("bound() needs a variable", t)
        return Call(name, tuple(args))


def _numeric(text: str) -> Lit:
    if "e" in text or "E" in text:
        return Lit(text, XSD + "double")
    if "." in text:
        return Lit(text, XSD + "decimal")
    return Lit(text, XSD + "integer")


def parse_query(text: str) -> Query:
    """Parse SPARQL text into a Query over the algebra types."""
    return _Parser(text).query()


__all__ = ["parse_query", "RDF"]
