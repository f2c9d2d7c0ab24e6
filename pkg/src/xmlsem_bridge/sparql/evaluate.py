"""Direct SPARQL 1.0 evaluation over a set of triples (the reference oracle).

Solutions are dicts from ``Var`` to terms and solution sequences are lists,
so duplicates are kept (bag semantics).  Filter expressions use the
three-valued logic of SPARQL: an error inside ``||``/``&&`` is absorbed when
the other side decides the result, and a filter that ends in an error drops
the solution.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from .. import values as V
from ..errors import EvaluationError
from .algebra import (
    BGP, BinOp, Call, Filter, IRI, Join, Lit, Neg, Not, Optional_, Query, Triple, Union_, Var,
    XSD,
)

BOOLEAN = XSD + "boolean"
TRUE = Lit("true", BOOLEAN)
FALSE = Lit("false", BOOLEAN)


@dataclass(frozen=True)
class BNode:
    """A blank node minted by a CONSTRUCT template."""

    label: str

    def __str__(self) -> str:
        return f"_:{self.label}"


class ExprError(Exception):
    """A SPARQL expression error (type error, unbound variable)."""


def norm(t):
    """Term identity: ``"x"^^xsd:string`` and ``"x"`` are the same term."""
    if isinstance(t, Lit) and t.datatype == XSD + "string":
        return Lit(t.lexical)
    return t


# -- basic graph patterns --------------------------------------------------------

class TripleIndex:
    def __init__(self, triples):
        self.all = [Triple(norm(t.s), norm(t.p), norm(t.o)) for t in triples]
        self.by_p: dict = {}
        self.by_s: dict = {}
        for t in self.all:
            self.by_p.setdefault(t.p, []).append(t)
            self.by_s.setdefault(t.s, []).append(t)

    def candidates(self, s, p) -> list:
        if s is not None:
            return self.by_s.get(s, [])
        if p is not None:
            return self.by_p.get(p, [])
        return self.all


def _bound(term, mu):
    if isinstance(term, Var):
        return mu.get(term)
    return norm(term)


def _match_bgp(triples: tuple, index: TripleIndex, mu: dict) -> list[dict]:
    if not triples:
        return [mu]

    def score(t: Triple) -> int:
        return sum(_bound(x, mu) is not None for x in (t.s, t.p, t.o))

    best = max(range(len(triples)), key=lambda i: score(triples[i]))
    pat = triples[best]
    rest = triples[:best] + triples[best + 1:]
    out = []
    s, p, o = (_bound(x, mu) for x in (pat.s, pat.p, pat.o))
    for t in index.candidates(s, p):
        if (s is not None and t.s != s) or (p is not None and t.p != p) or (o is not None and t.o != o):
            continue
        nu = dict(mu)
        ok = True
        for qt, dt in ((pat.s, t.s), (pat.p, t.p), (pat.o, t.o)):
            if isinstance(qt, Var):
                prev = nu.get(qt)
                if prev is None:
                    nu[qt] = dt
                elif prev != dt:
                    ok = False
                    break
        if ok:
            out.extend(_match_bgp(rest, index, nu))
    return out


def _compatible(a: dict, b: dict) -> bool:
    return all(b[k] == v for k, v in a.items() if k in b)


def eval_pattern(p, index: TripleIndex) -> list[dict]:
    if isinstance(p, BGP):
        return _match_bgp(tuple(p.triples), index, {})
    if isinstance(p, Join):
        left = eval_pattern(p.left, index)
        right = eval_pattern(p.right, index)
        return [{**a, **b} for a in left for b in right if _compatible(a, b)]
    if isinstance(p, Union_):
        return eval_pattern(p.left, index) + eval_pattern(p.right, index)
    if isinstance(p, Filter):
        return [mu for mu in eval_pattern(p.inner, index) if filter_holds(p.expr, mu)]
    if isinstance(p, Optional_):
        right_p, cond = p.right, None
        if isinstance(right_p, Filter):
            right_p, cond = right_p.inner, right_p.expr
        left = eval_pattern(p.left, index)
        right = eval_pattern(right_p, index)
        out = []
        for a in left:
            matched = False
            for b in right:
                if _compatible(a, b):
                    merged = {**a, **b}
                    if cond is None or filter_holds(cond, merged):
                        out.append(merged)
                        matched = True
            if not matched:
                out.append(a)
        return out
    raise TypeError(f"not a graph pattern: {p!r}")


# -- expressions -------------------------------------------------------------------

def _literal_value(t):
    """(category, value) of a literal, raising ExprError when not comparable."""
    if not isinstance(t, Lit) or t.lang:
        raise ExprError("not a typed-comparable literal")
    try:
        cat, v = V.typed_value(t.lexical, t.datatype)
    except V.ValueError_ as exc:
        raise ExprError(str(exc)) from None
    if cat == "other":
        raise ExprError(f"no ordering for datatype {t.datatype}")
    return cat, v


def _equal(a, b) -> bool:
    if isinstance(a, Lit) and isinstance(b, Lit):
        try:
            return V.compare("=", _literal_value(a), _literal_value(b))
        except (ExprError, V.ValueError_):
            if norm(a) == norm(b):
                return True
            raise ExprError("literals of unrelated datatypes") from None
    return norm(a) == norm(b)


def _compare(op: str, a, b) -> bool:
    if op == "=":
        return _equal(a, b)
    if op == "!=":
        return not _equal(a, b)
    try:
        return V.compare(op, _literal_value(a), _literal_value(b))
    except V.ValueError_ as exc:
        raise ExprError(str(exc)) from None


def _numeric(t):
    cat, v = _literal_value(t)
    if cat != "numeric":
        raise ExprError("arithmetic needs numbers")
    return v


def _number_literal(v) -> Lit:
    if isinstance(v, float):
        return Lit(V.number_lexical(v), XSD + "double")
    if isinstance(v, Decimal):
        return Lit(V.number_lexical(v), XSD + "decimal")
    return Lit(str(v), XSD + "integer")


def _simple_text(t) -> str:
    if isinstance(t, Lit) and not t.lang and t.datatype in (None, XSD + "string"):
        return t.lexical
    raise ExprError("expected a simple literal")


def ebv(t) -> bool:
    if isinstance(t, Lit) and not t.lang:
        if t.datatype == BOOLEAN:
            try:
                return V.parse_boolean(t.lexical)
            except V.ValueError_:
                return False
        if t.datatype in (None, XSD + "string"):
            return t.lexical != ""
        if t.datatype in V.NUMERIC_TYPES:
            try:
                v = V.parse_number(t.lexical, V.numeric_kind(t.datatype))
            except V.ValueError_:
                return False
            return v != 0 and v == v
    raise ExprError("no effective boolean value")


def _bool(b: bool) -> Lit:
    return TRUE if b else FALSE


def eval_expr(e, mu: dict):
    if isinstance(e, Var):
        if e not in mu:
            raise ExprError(f"{e} is unbound")
        return mu[e]
    if isinstance(e, (IRI, Lit)):
        return e
    if isinstance(e, BinOp):
        if e.op in ("||", "&&"):
            results = []
            for side in (e.left, e.right):
                try:
                    results.append(ebv(eval_expr(side, mu)))
                except ExprError:
                    results.append(None)
            if e.op == "||":
                if True in results:
                    return TRUE
                if results == [False, False]:
                    return FALSE
            else:
                if False in results:
                    return FALSE
                if results == [True, True]:
                    return TRUE
            raise ExprError("error operand decides the connective")
        a = eval_expr(e.left, mu)
        b = eval_expr(e.right, mu)
        if e.op in ("=", "!=", "<", ">", "<=", ">="):
            return _bool(_compare(e.op, a, b))
        try:
            return _number_literal(V.arithmetic(e.op, _numeric(a), _numeric(b)))
        except V.ValueError_ as exc:
            raise ExprError(str(exc)) from None
    if isinstance(e, Not):
        return _bool(not ebv(eval_expr(e.operand, mu)))
    if isinstance(e, Neg):
        return _number_literal(-_numeric(eval_expr(e.operand, mu)))
    if isinstance(e, Call):
        return _call(e, mu)
    raise TypeError(f"not an expression: {e!r}")


def _call(e: Call, mu: dict):
    name = e.name
    if name == "bound":
        return _bool(e.args[0] in mu)
    args = [eval_expr(a, mu) for a in e.args]
    if name == "str":
        t = args[0]
        if isinstance(t, IRI):
            return Lit(t.value)
        if isinstance(t, Lit):
            return Lit(t.lexical)
        raise ExprError("str() of a blank node")
    if name == "datatype":
        t = args[0]
        if not isinstance(t, Lit) or t.lang:
            raise ExprError("datatype() needs a typed or simple literal")
        return IRI(t.datatype or XSD + "string")
    if name == "lang":
        if not isinstance(args[0], Lit):
            raise ExprError("lang() needs a literal")
        return Lit(args[0].lang or "")
    if name == "langMatches":
        tag, rng = _simple_text(args[0]), _simple_text(args[1])
        if rng == "*":
            return _bool(tag != "")
        return _bool(tag.lower() == rng.lower() or tag.lower().startswith(rng.lower() + "-"))
    if name == "isIRI":
        return _bool(isinstance(args[0], IRI))
    if name == "isBlank":
        return _bool(isinstance(args[0], BNode))
    if name == "isLiteral":
        return _bool(isinstance(args[0], Lit))
    if name == "sameTerm":
        return _bool(norm(args[0]) == norm(args[1]))
    if name == "regex":
        flags = _simple_text(args[2]) if len(args) > 2 else ""
        try:
            return _bool(V.regex_match(_simple_text(args[0]), _simple_text(args[1]), flags))
        except V.ValueError_ as exc:
            raise ExprError(str(exc)) from None
    raise ExprError(f"unsupported function {name}")


def filter_holds(e, mu: dict) -> bool:
    try:
        return ebv(eval_expr(e, mu))
    except ExprError:
        return False


# -- ordering ----------------------------------------------------------------------

_CATEGORY_RANK = {"numeric": 0, "string": 1, "boolean": 2, "date": 3}


def order_compare(a, b) -> int:
    """Total preorder: unbound < blank < IRI < literal; literals by value where comparable."""
    def rank(t) -> int:
        if t is None:
            return 0
        if isinstance(t, BNode):
            return 1
        if isinstance(t, IRI):
            return 2
        return 3

    ra, rb = rank(a), rank(b)
    if ra != rb:
        return -1 if ra < rb else 1
    if ra == 0:
        return 0
    if ra in (1, 2):
        x, y = str(a), str(b)
        return (x > y) - (x < y)
    try:
        ca, va = _literal_value(a)
        cb, vb = _literal_value(b)
    except ExprError:
        ca = cb = None
    if ca is not None and ca == cb:
        if V.compare("<", (ca, va), (cb, vb)):
            return -1
        if V.compare(">", (ca, va), (cb, vb)):
            return 1
        return 0
    ka = (_CATEGORY_RANK.get(ca, 9) if ca else 9, a.lexical, a.datatype or "", a.lang or "")
    kb = (_CATEGORY_RANK.get(cb, 9) if cb else 9, b.lexical, b.datatype or "", b.lang or "")
    return (ka > kb) - (ka < kb)


def order_key_values(query: Query, mu: dict) -> tuple:
    out = []
    for cond in query.modifiers.order_by:
        try:
            out.append(eval_expr(cond.expr, mu))
        except ExprError:
            out.append(None)
    return tuple(out)


def _key_compare(query: Query, ka: tuple, kb: tuple) -> int:
    for cond, a, b in zip(query.modifiers.order_by, ka, kb):
        r = order_compare(a, b)
        if r:
            return -r if cond.descending else r
    return 0


# -- queries -----------------------------------------------------------------------

@dataclass
class SparqlResult:
    form: str
    variables: tuple = ()  # projected Vars (SELECT) or template Vars (CONSTRUCT)
    rows: list = field(default_factory=list)  # SELECT: tuples of terms (None = unbound)
    boolean: Optional[bool] = None  # ASK
    triples: frozenset = frozenset()  # CONSTRUCT
    groups: list = field(default_factory=list)  # ordered, pre-slice rows grouped by equal keys
    ordered: bool = False


def eval_sparql(query: Query, triples) -> SparqlResult:
    """Answer ``query`` against ``triples``."""
    if query.form == "DESCRIBE":
        raise EvaluationError("UNSUPPORTED_FORM", "DESCRIBE has no defined result to compare with")
    index = triples if isinstance(triples, TripleIndex) else TripleIndex(triples)
    sols = eval_pattern(query.pattern, index)
    if query.form == "ASK":
        return SparqlResult("ASK", boolean=bool(sols))

    mods = query.modifiers
    keyed = [(order_key_values(query, mu), mu) for mu in sols]
    if mods.order_by:
        keyed.sort(key=functools.cmp_to_key(lambda x, y: _key_compare(query, x[0], y[0])))

    if query.form == "CONSTRUCT":
        seq = [mu for _, mu in keyed]
        seq = _slice(seq, mods)
        return SparqlResult("CONSTRUCT", triples=instantiate(query.template, seq))

    proj = query.projected()
    rows = [(k, tuple(mu.get(v) for v in proj)) for k, mu in keyed]
    if query.distinct == "DISTINCT":
        seen = set()
        uniq = []
        for k, r in rows:
            if r not in seen:
                seen.add(r)
                uniq.append((k, r))
        rows = uniq
    groups: list = []
    prev = None
    for k, r in rows:
        if groups and mods.order_by and _key_compare(query, prev, k) == 0:
            groups[-1].append(r)
        elif groups and not mods.order_by:
            groups[-1].append(r)
        else:
            groups.append([r])
        prev = k
    final = _slice([r for _, r in rows], mods)
    return SparqlResult("SELECT", variables=proj, rows=final, groups=groups,
                        ordered=bool(mods.order_by))


def _slice(seq: list, mods) -> list:
    start = mods.offset or 0
    if mods.limit is None:
        return seq[start:]
    return seq[start:start + mods.limit]


def instantiate(template: tuple, solutions: list) -> frozenset:
    """CONSTRUCT: template triples per solution, skipping unbound and ill-formed ones."""
    out = set()
    for n, mu in enumerate(solutions):
        fresh: dict = {}
        for t in template:
            terms = []
            for x in (t.s, t.p, t.o):
                if isinstance(x, Var) and x.hidden and x not in mu:
                    x = fresh.setdefault(x, BNode(f"b{n}_{x.name}"))
                elif isinstance(x, Var):
                    x = mu.get(x)
                terms.append(x)
            s, p, o = terms
            if s is None or p is None or o is None:
                continue
            if isinstance(s, Lit) or not isinstance(p, IRI):
                continue
            out.add(Triple(s, p, norm(o)))
    return frozenset(out)


__all__ = [
    "BNode", "ExprError", "SparqlResult", "TripleIndex", "ebv", "eval_expr", "eval_pattern",
    "eval_sparql", "filter_holds", "instantiate", "norm", "order_compare",
]
