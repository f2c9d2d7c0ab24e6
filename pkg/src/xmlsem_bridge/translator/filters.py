"""FILTER expressions compiled to XQuery conditions.

SPARQL filters have three outcomes (true, false, error) while an XQuery
``where`` clause has two, so every expression is compiled to a pair
``(T, F)``: T holds exactly when the SPARQL expression is true, F exactly
when it is false.  Both are XQuery expressions or the Python constants
True/False when the outcome is known statically.  Negation swaps the pair
and a filter keeps a solution when T holds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .. import values as V
from ..errors import TranslationError
from ..mapping import XPath
from ..sparql.algebra import BinOp, Call, IRI, Lit, Neg, Not, Var, XSD, expr_vars
from ..sparql.evaluate import ExprError, ebv as sparql_ebv, eval_expr, norm
from ..xquery.ast import (
    Arith, Comparison, ContextItem, FnCall, Neg as XNeg, NumberLit, Path, StringLit, VarRef,
    and_, call, or_,
)
from .paths import ast_steps, positional_path

BoolX = Union[bool, object]


# -- bindings -------------------------------------------------------------------

@dataclass(frozen=True)
class NodeB:
    """A variable bound to instance nodes at ``path``; its terms are IRIs."""

    xq: str
    path: XPath


@dataclass(frozen=True)
class LitB:
    """A variable bound to literal values (nodes or atomic values holding the lexical form).

    ``xq`` None stands for the context item, used inside step predicates.
    """

    xq: Optional[str]
    known: bool
    datatype: Optional[str]


@dataclass(frozen=True)
class ConstB:
    """A variable fixed to one term for the whole case."""

    term: object


def ref(b) -> object:
    return ContextItem() if b.xq is None else VarRef(b.xq)


# -- three-valued helpers ----------------------------------------------------------

def b_and(*xs) -> BoolX:
    parts = []
    for x in xs:
        if x is False:
            return False
        if x is not True:
            parts.append(x)
    return and_(*parts) if parts else True


def b_or(*xs) -> BoolX:
    parts = []
    for x in xs:
        if x is True:
            return True
        if x is not False:
            parts.append(x)
    return or_(*parts) if parts else False


def b_not(x) -> BoolX:
    if isinstance(x, bool):
        return not x
    if isinstance(x, FnCall) and x.name == "not":
        return x.args[0]
    return call("not", x)


def to_expr(x) -> object:
    if x is True:
        return call("true")
    if x is False:
        return call("false")
    return x


# -- operands --------------------------------------------------------------------

@dataclass(frozen=True)
class Operand:
    kind: str  # lit | node | iri | error
    expr: object = None  # raw value: a node or untyped value holding the lexical form
    typed: object = None  # typed value (cast, literal or computed)
    cat: str = "untyped"  # numeric | string | boolean | date | other | untyped
    datatype: Optional[str] = None
    known: bool = False  # datatype known
    const: object = None  # the term itself when statically known
    defined: tuple = ()  # conditions for the value to exist (no division by zero)
    simple: bool = False  # a literal without datatype (regex accepts only these)

    @property
    def is_const(self) -> bool:
        return self.const is not None


ERROR = Operand("error")

_CASTS = {"integer": "xs:integer", "decimal": "xs:decimal", "double": "xs:double"}


def cast_function(datatype: Optional[str]) -> Optional[str]:
    """XQuery cast giving ordered values for literals of ``datatype``, None for strings."""
    cat = V.category(datatype)
    if cat == "numeric":
        if datatype == XSD + "float":
            return "xs:float"
        return _CASTS[V.numeric_kind(datatype)]
    if cat == "date":
        return "xs:date"
    if cat == "boolean":
        return "xs:boolean"
    return None


def literal_expr(t: Lit):
    """XQuery literal for a SPARQL constant, None when it has no typed form."""
    cat = V.category(t.datatype)
    if t.lang:
        return None
    try:
        _, value = V.typed_value(t.lexical, t.datatype)
    except V.ValueError_:
        return None
    if cat == "string":
        return StringLit(t.lexical)
    if cat == "numeric":
        kind = V.numeric_kind(t.datatype)
        if kind == "double" and (value != value or value in (float("inf"), float("-inf"))):
            return call("xs:double", StringLit(t.lexical.strip()))
        neg = value < 0
        value = -value if neg else value
        if kind == "integer":
            text = str(value)
        elif kind == "decimal":
            text = format(value, "f")
            if "." not in text:
                text += ".0"
        else:
            text = repr(float(value))
            text = text if "e" in text else text + "e0"
        lit = NumberLit(text)
        return XNeg(lit) if neg else lit
    if cat == "date":
        return call("xs:date", StringLit(t.lexical.strip()))
    if cat == "boolean":
        return call("true") if value else call("false")
    return None


def const_operand(t) -> Operand:
    if isinstance(t, IRI):
        return Operand("iri", const=t)
    t = norm(t)
    cat = V.category(t.datatype) if not t.lang else "other"
    x = literal_expr(t)
    if x is None:
        cat = "other"
        x = StringLit(t.lexical)
    return Operand("lit", expr=x, typed=x, cat=cat, datatype=t.datatype, known=True, const=t,
                   simple=t.datatype is None and not t.lang)


def var_operand(b) -> Operand:
    if isinstance(b, NodeB):
        return Operand("node", expr=ref(b))
    if isinstance(b, ConstB):
        return const_operand(b.term)
    r = ref(b)
    if not b.known:
        return Operand("lit", expr=r, typed=r, cat="untyped", simple=True)
    fn = cast_function(b.datatype)
    typed = call(fn, r) if fn else r
    return Operand("lit", expr=r, typed=typed, cat=V.category(b.datatype), datatype=b.datatype,
                   known=True, simple=b.datatype is None)


def _arith_kind(op: Operand) -> str:
    if not op.known or op.datatype is None:
        return "double"
    return V.numeric_kind(op.datatype)


class FilterCompiler:
    """Compile filter expressions against variable bindings.

    ``node_expr`` resolves a resource IRI to an XQuery expression selecting
    its node (None when the IRI does not name an instance node).
    """

    def __init__(self, env: dict, document_iri: str, doc_var: str = "doc"):
        self.env = env
        self.document_iri = document_iri
        self.doc_var = doc_var

    # static folding ------------------------------------------------------------

    def _static_mu(self, e) -> Optional[dict]:
        mu = {}
        for v in expr_vars(e):
            b = self.env.get(v)
            if b is None:
                continue
            if not isinstance(b, ConstB):
                return None
            mu[v] = b.term
        return mu

    def condition(self, e) -> tuple[BoolX, BoolX]:
        mu = self._static_mu(e)
        if mu is not None:
            try:
                value = sparql_ebv(eval_expr(e, mu))
            except ExprError:
                return False, False
            return value, not value
        if isinstance(e, BinOp) and e.op in ("&&", "||"):
            ta, fa = self.condition(e.left)
            tb, fb = self.condition(e.right)
            if e.op == "&&":
                return b_and(ta, tb), b_or(fa, fb)
            return b_or(ta, tb), b_and(fa, fb)
        if isinstance(e, Not):
            t, f = self.condition(e.operand)
            return f, t
        if isinstance(e, BinOp) and e.op in ("=", "!=", "<", ">", "<=", ">="):
            return self.compare(e.op, self.operand(e.left), self.operand(e.right))
        if isinstance(e, Call):
            if e.name == "bound":
                b = e.args[0] in self.env
                return b, not b
            if e.name in ("isIRI", "isLiteral", "isBlank"):
                return self._kind_test(e.name, self.operand(e.args[0]))
            if e.name == "sameTerm":
                return self._same_term(self.operand(e.args[0]), self.operand(e.args[1]))
            if e.name == "regex":
                return self._regex(e)
            if e.name == "langMatches":
                args = [self.operand(a) for a in e.args]
                if all(a.is_const for a in args):
                    try:
                        value = sparql_ebv(eval_expr(Call(e.name, tuple(a.const for a in args)), {}))
                    except ExprError:
                        return False, False
                    return value, not value
                raise TranslationError("UNTRANSLATABLE_FILTER", "langMatches() on computed tags")
        return self._ebv(self.operand(e))

    # operands ---------------------------------------------------------------------

    def operand(self, e) -> Operand:
        mu = self._static_mu(e)
        if mu is not None and not (isinstance(e, Var) and e not in self.env):
            try:
                return const_operand(eval_expr(e, mu))
            except ExprError:
                return ERROR
        if isinstance(e, Var):
            b = self.env.get(e)
            return ERROR if b is None else var_operand(b)
        if isinstance(e, (IRI, Lit)):
            return const_operand(e)
        if isinstance(e, BinOp) and e.op in ("+", "-", "*", "/"):
            return self._arith(e.op, self.operand(e.left), self.operand(e.right))
        if isinstance(e, Neg):
            a = self.operand(e.operand)
            if a.kind != "lit" or a.cat not in ("numeric", "untyped"):
                return ERROR
            return Operand("lit", expr=XNeg(a.typed), typed=XNeg(a.typed), cat="numeric",
                           datatype=a.datatype, known=a.known, defined=a.defined)
        if isinstance(e, Call):
            return self._call_operand(e)
        # a boolean-valued expression used as a value
        t, f = self.condition(e)
        if isinstance(t, bool) and isinstance(f, bool):
            if not t and not f:
                return ERROR
            return const_operand(Lit("true" if t else "false", XSD + "boolean"))
        x = to_expr(t)
        return Operand("lit", expr=x, typed=x, cat="boolean", datatype=XSD + "boolean", known=True,
                       defined=(to_expr(b_or(t, f)),))

    def _arith(self, op: str, a: Operand, b: Operand) -> Operand:
        for x in (a, b):
            if x.kind != "lit" or x.cat not in ("numeric", "untyped"):
                return ERROR
        kinds = {_arith_kind(a), _arith_kind(b)}
        if "double" in kinds:
            dt = XSD + "double"
        elif "decimal" in kinds or op == "/":
            dt = XSD + "decimal"
        else:
            dt = XSD + "integer"
        xop = "div" if op == "/" else op
        x = Arith(xop, a.typed, b.typed)
        defined = a.defined + b.defined
        if op == "/" and dt != XSD + "double":
            defined += (Comparison("!=", b.typed, NumberLit("0")),)
        known = a.known and b.known
        return Operand("lit", expr=x, typed=x, cat="numeric", datatype=dt if known else None,
                       known=known, defined=defined)

    def _call_operand(self, e: Call) -> Operand:
        args = [self.operand(a) for a in e.args]
        if any(a.kind == "error" for a in args):
            return ERROR
        if e.name == "str":
            a = args[0]
            if a.kind == "node":
                raise TranslationError("UNTRANSLATABLE_FILTER", "str() of an instance node IRI")
            if a.kind == "iri":
                return const_operand(Lit(a.const.value))
            x = call("string", a.expr)
            return Operand("lit", expr=x, typed=x, cat="string", known=True, defined=a.defined,
                           simple=True)
        if e.name == "datatype":
            a = args[0]
            if a.kind != "lit":
                return ERROR
            if not a.known or a.cat == "untyped":
                raise TranslationError("UNTRANSLATABLE_FILTER",
                                       "datatype() of a value whose datatype is unknown")
            return const_operand(IRI(a.datatype or XSD + "string"))
        if e.name == "lang" and not args[0].is_const:
            # the XML data model has no language tags to read
            raise TranslationError("UNTRANSLATABLE_FILTER", "lang() of a variable")
        if all(a.is_const for a in args):
            try:
                return const_operand(eval_expr(Call(e.name, tuple(a.const for a in args)), {}))
            except ExprError:
                return ERROR
        t, f = self.condition(e)
        x = to_expr(t)
        return Operand("lit", expr=x, typed=x, cat="boolean", datatype=XSD + "boolean", known=True,
                       defined=(to_expr(b_or(t, f)),))

    # tests -----------------------------------------------------------------------

    def node_expr(self, iri: IRI):
        from ..rdf import iri_steps

        steps = iri_steps(iri.value, self.document_iri)
        if steps is None:
            return None
        if not steps:
            return VarRef(self.doc_var)
        return Path(VarRef(self.doc_var), ast_steps(positional_path(steps)))

    def _with_defs(self, a: Operand, b: Operand, t, f):
        defs = a.defined + b.defined
        return b_and(*defs, t), b_and(*defs, f)

    def compare(self, op: str, a: Operand, b: Operand) -> tuple[BoolX, BoolX]:
        if a.kind == "error" or b.kind == "error":
            return False, False
        if a.is_const and b.is_const:
            try:
                value = sparql_ebv(eval_expr(BinOp(op, a.const, b.const), {}))
            except ExprError:
                return False, False
            return value, not value
        resources = ("node", "iri")
        if a.kind in resources or b.kind in resources:
            if a.kind in resources and b.kind in resources:
                if op not in ("=", "!="):
                    return False, False
                t = self._identity(a, b)
                return (t, b_not(t)) if op == "=" else (b_not(t), t)
            if op == "=":
                return False, True
            if op == "!=":
                return True, False
            return False, False
        if a.cat == "untyped" or b.cat == "untyped":
            left = a.expr if b.is_const else a.typed
            right = b.expr if a.is_const else b.typed
            cmp = Comparison(op, left, right)
            return self._with_defs(a, b, cmp, b_not(cmp))
        if a.cat == b.cat and a.cat in ("numeric", "string", "boolean", "date"):
            # against a constant XQuery's untyped promotion does the cast
            left = a.expr if b.is_const else a.typed
            right = b.expr if a.is_const else b.typed
            cmp = Comparison(op, left, right)
            return self._with_defs(a, b, cmp, b_not(cmp))
        if op in ("=", "!=") and a.datatype == b.datatype and a.known and b.known:
            eq = Comparison("=", call("string", a.expr), call("string", b.expr))
            t, f = (eq, False) if op == "=" else (False, eq)
            return self._with_defs(a, b, t, f)
        return False, False

    def _identity(self, a: Operand, b: Operand) -> BoolX:
        def target(x: Operand):
            return x.expr if x.kind == "node" else self.node_expr(x.const)

        if a.kind == "iri" and b.kind == "iri":
            return a.const == b.const
        ta, tb = target(a), target(b)
        if ta is None or tb is None:
            return False
        return Comparison("is", ta, tb)

    def _kind_test(self, name: str, a: Operand) -> tuple[BoolX, BoolX]:
        if a.kind == "error":
            return False, False
        if name == "isBlank":
            result = False
        elif name == "isIRI":
            result = a.kind in ("node", "iri")
        else:
            result = a.kind == "lit"
        if result and a.defined:
            return b_and(*a.defined), False
        return result, not result

    def _same_term(self, a: Operand, b: Operand) -> tuple[BoolX, BoolX]:
        if a.kind == "error" or b.kind == "error":
            return False, False
        resources = ("node", "iri")
        if (a.kind in resources) != (b.kind in resources):
            return False, True
        if a.kind in resources:
            t = self._identity(a, b)
            return t, b_not(t)
        if a.known and b.known and a.datatype != b.datatype:
            return False, True
        eq = Comparison("=", call("string", a.expr), call("string", b.expr))
        return self._with_defs(a, b, eq, b_not(eq))

    def _regex(self, e: Call) -> tuple[BoolX, BoolX]:
        text = self.operand(e.args[0])
        rest = [self.operand(a) for a in e.args[1:]]
        if text.kind == "error" or any(r.kind == "error" for r in rest):
            return False, False
        if not all(r.is_const for r in rest):
            raise TranslationError("UNTRANSLATABLE_FILTER", "regex() with a computed pattern")
        if any(not r.simple for r in rest):
            return False, False
        pattern = rest[0].const.lexical
        flags = rest[1].const.lexical if len(rest) > 1 else ""
        try:
            V.compile_regex(pattern, flags)
        except V.ValueError_:
            return False, False
        if text.kind != "lit" or not (text.simple or text.cat == "untyped"):
            return False, False
        args = [text.expr, StringLit(pattern)] + ([StringLit(flags)] if flags else [])
        m = FnCall("matches", tuple(args))
        return self._with_defs(text, ERROR_FREE, m, b_not(m))

    def _ebv(self, a: Operand) -> tuple[BoolX, BoolX]:
        if a.kind != "lit":
            return False, False
        if a.is_const:
            try:
                value = sparql_ebv(a.const)
            except ExprError:
                return False, False
            return value, not value
        if a.cat == "boolean":
            t = a.typed
        elif a.cat == "numeric":
            t = Comparison("!=", a.typed, NumberLit("0"))
        elif a.cat in ("string", "untyped"):
            t = Comparison("!=", call("string", a.expr), StringLit(""))
        else:
            return False, False
        return self._with_defs(a, ERROR_FREE, t, b_not(t))


ERROR_FREE = Operand("lit")


def compile_filter(e, env: dict, document_iri: str) -> tuple[BoolX, BoolX]:
    return FilterCompiler(env, document_iri).condition(e)


__all__ = [
    "ConstB", "FilterCompiler", "LitB", "NodeB", "Operand", "b_and", "b_not", "b_or",
    "cast_function", "compile_filter", "const_operand", "literal_expr", "ref", "to_expr",
]
