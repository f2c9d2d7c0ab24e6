"""SPARQL query algebra: terms, graph patterns, filter expressions, queries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
RDF_TYPE = RDF + "type"


@dataclass(frozen=True)
class Var:
    name: str
    hidden: bool = False  # stands for a blank node of the query text

    def __str__(self) -> str:
        return f"_:{self.name}" if self.hidden else f"?{self.name}"


@dataclass(frozen=True)
class IRI:
    value: str

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True)
class Lit:
    lexical: str
    datatype: Optional[str] = None  # full IRI; None for plain literals
    lang: Optional[str] = None

    def __str__(self) -> str:
        body = '"' + escape_string(self.lexical) + '"'
        if self.lang:
            return f"{body}@{self.lang}"
        if self.datatype:
            return f"{body}^^<{self.datatype}>"
        return body


Term = Union[Var, IRI, Lit]


def escape_string(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"')
    return out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")


@dataclass(frozen=True)
class Triple:
    s: Term
    p: Term
    o: Term

    def vars(self) -> list[Var]:
        return [t for t in (self.s, self.p, self.o) if isinstance(t, Var)]


# -- graph patterns ------------------------------------------------------------

@dataclass(frozen=True)
class BGP:
    triples: tuple = ()


@dataclass(frozen=True)
class Join:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Union_:
    left: "Pattern"
    right: "Pattern"


@dataclass(frozen=True)
class Optional_:
    left: "Pattern"
    right: "Pattern"  # a Filter directly here is the left-join condition


@dataclass(frozen=True)
class Filter:
    inner: "Pattern"
    expr: "Expr"


Pattern = Union[BGP, Join, Union_, Optional_, Filter]


# -- filter expressions -------------------------------------------------------------

BINARY_OPS = ("||", "&&", "=", "!=", "<", ">", "<=", ">=", "+", "-", "*", "/")
FUNCTIONS = {
    # canonical name: (min args, max args)
    "regex": (2, 3), "bound": (1, 1), "str": (1, 1), "datatype": (1, 1), "lang": (1, 1),
    "langMatches": (2, 2), "isIRI": (1, 1), "isBlank": (1, 1), "isLiteral": (1, 1),
    "sameTerm": (2, 2),
}


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Union[Var, IRI, Lit, BinOp, Not, Neg, Call]


# -- queries --------------------------------------------------------------------

@dataclass(frozen=True)
class OrderCondition:
    expr: Expr
    descending: bool = False


@dataclass(frozen=True)
class Modifiers:
    order_by: tuple = ()
    limit: Optional[int] = None
    offset: Optional[int] = None


@dataclass(frozen=True)
class Query:
    form: str  # SELECT | ASK | CONSTRUCT | DESCRIBE
    pattern: Pattern
    projection: Optional[tuple] = None  # Vars; None means *
    distinct: str = ""  # "" | DISTINCT | REDUCED
    template: tuple = ()  # CONSTRUCT triples
    describe: tuple = ()  # DESCRIBE targets
    modifiers: Modifiers = field(default_factory=Modifiers)
    prefixes: tuple = ()  # ((prefix, iri), ...) in declaration order
    base: Optional[str] = None

    def projected(self) -> tuple:
        """Projected variables, resolving ``*`` to the visible pattern variables."""
        if self.projection is not None:
            return self.projection
        return tuple(v for v in pattern_vars(self.pattern) if not v.hidden)

    @property
    def unbound_projection(self) -> tuple:
        """Projected or template variables the pattern never binds."""
        bound = set(pattern_vars(self.pattern))
        wanted = list(self.projection or ())
        for t in self.template:
            wanted.extend(t.vars())
        out: list[Var] = []
        for v in wanted:
            if v not in bound and v not in out:
                out.append(v)
        return tuple(out)


# -- helpers ----------------------------------------------------------------------

def pattern_vars(p: Pattern) -> list[Var]:
    """Variables occurring in ``p`` (filters excluded), in first-occurrence order."""
    out: list[Var] = []

    def add(v: Var) -> None:
        if v not in out:
            out.append(v)

    def walk(q) -> None:
        if isinstance(q, BGP):
            for t in q.triples:
                for v in t.vars():
                    add(v)
        elif isinstance(q, Filter):
            walk(q.inner)
        else:
            walk(q.left)
            walk(q.right)

    walk(p)
    return out


def certain_vars(p: Pattern) -> set[Var]:
    """Variables bound in every solution of ``p``."""
    if isinstance(p, BGP):
        return {v for t in p.triples for v in t.vars()}
    if isinstance(p, Filter):
        return certain_vars(p.inner)
    if isinstance(p, Join):
        return certain_vars(p.left) | certain_vars(p.right)
    if isinstance(p, Optional_):
        return certain_vars(p.left)
    return certain_vars(p.left) & certain_vars(p.right)


def expr_vars(e: Expr) -> list[Var]:
    out: list[Var] = []

    def walk(x) -> None:
        if isinstance(x, Var):
            if x not in out:
                out.append(x)
        elif isinstance(x, BinOp):
            walk(x.left)
            walk(x.right)
        elif isinstance(x, (Not, Neg)):
            walk(x.operand)
        elif isinstance(x, Call):
            for a in x.args:
                walk(a)

    walk(e)
    return out


def conjuncts(e: Expr) -> list[Expr]:
    if isinstance(e, BinOp) and e.op == "&&":
        return conjuncts(e.left) + conjuncts(e.right)
    return [e]


def conjoin(parts: list) -> Optional[Expr]:
    out = None
    for p in parts:
        out = p if out is None else BinOp("&&", out, p)
    return out


def union_branches(p: Pattern) -> list[Pattern]:
    if isinstance(p, Union_):
        return union_branches(p.left) + union_branches(p.right)
    return [p]


def make_union(branches: list) -> Pattern:
    out = branches[0]
    for b in branches[1:]:
        out = Union_(out, b)
    return out


__all__ = [
    "BGP", "BINARY_OPS", "BinOp", "Call", "Expr", "FUNCTIONS", "Filter", "IRI", "Join", "Lit",
    "Modifiers", "Neg", "Not", "OWL", "Optional_", "OrderCondition", "Pattern", "Query", "RDF",
    "RDFS", "RDF_TYPE", "Term", "Triple", "Union_", "Var", "XSD", "certain_vars", "conjoin",
    "conjuncts", "escape_string", "expr_vars", "make_union", "pattern_vars", "union_branches",
]
