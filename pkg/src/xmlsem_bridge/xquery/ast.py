"""AST for the XQuery subset.

Nodes are frozen dataclasses so that ASTs compare structurally; golden
tests compare programs with ``==`` rather than by text.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

FUNCTIONS = {
    # name: (min arity, max arity)
    "collection": (1, 1), "doc": (1, 1), "string": (1, 1), "exists": (1, 1),
    "empty": (1, 1), "not": (1, 1), "matches": (2, 3), "starts-with": (2, 2),
    "contains": (2, 2), "position": (0, 0), "last": (0, 0), "count": (1, 1),
    "distinct-values": (1, 1), "concat": (2, 64), "deep-equal": (2, 2),
    "path": (1, 1), "true": (0, 0), "false": (0, 0),
    "xs:string": (1, 1), "xs:integer": (1, 1), "xs:decimal": (1, 1),
    "xs:float": (1, 1), "xs:double": (1, 1), "xs:date": (1, 1), "xs:boolean": (1, 1),
}

COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=", "is")
ARITH_OPS = ("+", "-", "*", "div")


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class ContextItem:
    pass


@dataclass(frozen=True)
class Root:
    """The leading ``/`` of an absolute path."""


@dataclass(frozen=True)
class StringLit:
    value: str


@dataclass(frozen=True)
class NumberLit:
    lexical: str  # 12 | 1.5 | 1.5e0, kind follows from the lexical form

    @property
    def kind(self) -> str:
        if "e" in self.lexical or "E" in self.lexical:
            return "double"
        return "decimal" if "." in self.lexical else "integer"


@dataclass(frozen=True)
class Step:
    axis: str  # child | attribute
    name: str
    predicates: tuple = ()


@dataclass(frozen=True)
class Path:
    start: Optional["Expr"]  # None: relative to the context item
    steps: tuple


@dataclass(frozen=True)
class Filter:
    base: "Expr"
    predicates: tuple


@dataclass(frozen=True)
class FnCall:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Comparison:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Arith:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Logical:
    op: str  # and | or
    operands: tuple


@dataclass(frozen=True)
class Union_:
    operands: tuple


@dataclass(frozen=True)
class Sequence:
    items: tuple


@dataclass(frozen=True)
class IfThenElse:
    cond: "Expr"
    then: "Expr"
    else_: "Expr"


@dataclass(frozen=True)
class Text:
    value: str


@dataclass(frozen=True)
class Enclosed:
    expr: "Expr"


@dataclass(frozen=True)
class ElementCtor:
    name: str
    attributes: tuple = ()  # ((name, literal value), ...)
    children: tuple = ()  # Text | Enclosed | ElementCtor


@dataclass(frozen=True)
class For:
    var: str
    source: "Expr"
    at: Optional[str] = None


@dataclass(frozen=True)
class Let:
    var: str
    source: "Expr"


@dataclass(frozen=True)
class Where:
    cond: "Expr"


@dataclass(frozen=True)
class OrderSpec:
    expr: "Expr"
    descending: bool = False
    empty_least: bool = True


@dataclass(frozen=True)
class OrderBy:
    specs: tuple


@dataclass(frozen=True)
class FLWOR:
    clauses: tuple
    ret: "Expr"


@dataclass(frozen=True)
class Program:
    body: "Expr"


Expr = Union[VarRef, ContextItem, Root, StringLit, NumberLit, Path, Filter, FnCall, Comparison,
             Arith, Neg, Logical, Union_, Sequence, IfThenElse, ElementCtor, FLWOR]

Clause = Union[For, Let, Where, OrderBy]


# -- small constructors used by the translator ----------------------------------

def var(name: str) -> VarRef:
    return VarRef(name)


def call(name: str, *args) -> FnCall:
    return FnCall(name, tuple(args))


def child(name: str, *predicates) -> Step:
    return Step("child", name, tuple(predicates))


def attr(name: str, *predicates) -> Step:
    return Step("attribute", name, tuple(predicates))


def path(start, *steps) -> Union[Path, "Expr"]:
    return Path(start, tuple(steps)) if steps else start


def and_(*operands) -> "Expr":
    flat = []
    for o in operands:
        if isinstance(o, Logical) and o.op == "and":
            flat.extend(o.operands)
        else:
            flat.append(o)
    return flat[0] if len(flat) == 1 else Logical("and", tuple(flat))


def or_(*operands) -> "Expr":
    flat = []
    for o in operands:
        if isinstance(o, Logical) and o.op == "or":
            flat.extend(o.operands)
        else:
            flat.append(o)
    return flat[0] if len(flat) == 1 else Logical("or", tuple(flat))


def seq(*items) -> "Expr":
    flat = []
    for i in items:
        if isinstance(i, Sequence):
            flat.extend(i.items)
        else:
            flat.append(i)
    return flat[0] if len(flat) == 1 else Sequence(tuple(flat))


__all__ = [
    "ARITH_OPS", "COMPARISON_OPS", "FUNCTIONS", "Arith", "Clause", "Comparison", "ContextItem",
    "ElementCtor", "Enclosed", "Expr", "FLWOR", "Filter", "FnCall", "For", "IfThenElse", "Let",
    "Logical", "Neg", "NumberLit", "OrderBy", "OrderSpec", "Path", "Program", "Root", "Sequence",
    "Step", "StringLit", "Text", "Union_", "VarRef", "Where", "and_", "attr", "call", "child",
    "or_", "path", "seq", "var",
]
