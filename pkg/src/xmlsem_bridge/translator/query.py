"""Whole queries: result construction, solution modifiers and query forms.

Every SELECT translation has the same skeleton::

    let $doc := collection("...")
    let $Modified_Results := ( <pattern results, then modifiers> )
    return <Results>{ $Modified_Results }</Results>

Each solution becomes a ``<Result>`` element with one child per bound
variable.  Literals are written as their lexical form, instance nodes as
their ``fn:path`` so the caller can rebuild the node IRIs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import TranslationError
from ..sparql.algebra import IRI, Query, Var, pattern_vars
from ..sparql.normalize import normalize
from ..xquery.ast import (
    FLWOR, Comparison, ContextItem, ElementCtor, Enclosed, Filter as XFilter, For, IfThenElse,
    Let, NumberLit, OrderBy, OrderSpec, Path, Program, Sequence, StringLit, Text, VarRef, Where,
    and_, call, child, seq,
)
from .context import TranslationContext
from .filters import ConstB, LitB, NodeB, b_or, cast_function, to_expr
from .patterns import (
    Namer, PatternTranslator, case_expr, exists_expr, flatten, merge_root_sources,
)
from .types import specify_variable_types


@dataclass(frozen=True)
class Column:
    var: Var
    element: str
    kinds: frozenset  # {("iri", None) | ("literal", datatype or None)}
    known: bool = True  # literal datatypes are known

    @property
    def mixed(self) -> bool:
        return len(self.kinds) > 1


@dataclass(frozen=True)
class ResultShape:
    """How to read the XQuery result back into SPARQL terms."""

    form: str
    variables: tuple  # projected (SELECT) or template (CONSTRUCT) variables
    columns: tuple  # Column per variable written into <Result>, projected ones first
    template: tuple = ()
    ordered: bool = False
    ordering_exact: bool = True
    distinct: bool = False
    document_iri: str = ""
    limit: Optional[int] = None
    offset: Optional[int] = None

    def column(self, v: Var) -> Optional[Column]:
        for c in self.columns:
            if c.var == v:
                return c
        return None


@dataclass
class Translation:
    program: Program
    shape: ResultShape
    warnings: list = field(default_factory=list)


def _binding_kind(b) -> Optional[tuple]:
    if isinstance(b, NodeB):
        return ("iri", None)
    if isinstance(b, ConstB):
        if isinstance(b.term, IRI):
            return ("iri", None)
        return ("literal", b.term.datatype)
    if isinstance(b, LitB):
        return ("literal", b.datatype if b.known else None)
    return None


def _value(b):
    if isinstance(b, NodeB):
        return Enclosed(call("path", VarRef(b.xq)))
    if isinstance(b, LitB):
        return Enclosed(call("string", VarRef(b.xq)))
    t = b.term
    return Text(t.value if isinstance(t, IRI) else t.lexical)


def result_element(env: dict, columns: tuple) -> ElementCtor:
    children = []
    for c in columns:
        b = env.get(c.var)
        if b is None:
            continue
        attrs = ()
        if c.mixed:
            kind, dt = _binding_kind(b)
            attrs = (("kind", kind),) + ((("datatype", dt),) if dt else ())
        children.append(ElementCtor(c.element, attrs, (_value(b),)))
    return ElementCtor("Result", (), tuple(children))


def translate_gp(pattern, ctx: TranslationContext, namer: Namer,
                 projected: frozenset = frozenset()) -> list:
    """CaseCode per solution-producing case of a normalized pattern."""
    pt = PatternTranslator(ctx, namer, projected)
    out = []
    for fb in flatten(pattern):
        out.extend(pt.branch(fb, {}, nested=False))
    return out


def translate_modifiers(inner, q: Query, shape: ResultShape):
    """Wrap ``inner`` in the ordering, projection, DISTINCT and window stages."""
    m = q.modifiers
    stages = [("Results", inner)]
    cur = VarRef("Results")
    if m.order_by:
        specs = []
        for cond in m.order_by:
            col = shape.column(cond.expr)
            key = Path(VarRef("iter"), (child(col.element),))
            kind, dt = next(iter(col.kinds)) if len(col.kinds) == 1 else ("literal", None)
            fn = cast_function(dt) if kind == "literal" and col.known else None
            specs.append(OrderSpec(call(fn, key) if fn else key, cond.descending, True))
        stages.append(("Ordered_Results", FLWOR((For("iter", cur), OrderBy(tuple(specs))),
                                                VarRef("iter"))))
        cur = VarRef("Ordered_Results")
    visible = [c for c in shape.columns if c.var in shape.variables]
    if q.form == "SELECT" and len(visible) < len(shape.columns):
        items = [Path(VarRef("r"), (child(c.element),)) for c in visible]
        body = ElementCtor("Result", (), (Enclosed(seq(*items)),) if items else ())
        stages.append(("Projected_Results", FLWOR((For("r", cur),), body)))
        cur = VarRef("Projected_Results")
    if q.distinct == "DISTINCT" and q.form == "SELECT":
        earlier = XFilter(cur, (Comparison("<", call("position"), VarRef("i")),
                                call("deep-equal", ContextItem(), VarRef("r"))))
        stages.append(("Distinct_Results", FLWOR((For("r", cur, at="i"),
                                                  Where(call("empty", earlier))), VarRef("r"))))
        cur = VarRef("Distinct_Results")
    final = cur
    window = _window(m.offset, m.limit)
    if window is not None:
        final = XFilter(cur, (window,))
    if len(stages) == 1 and window is None:
        return inner
    body = final
    for name, e in reversed(stages):
        body = FLWOR((Let(name, e),), body)
    return body


def _window(offset: Optional[int], limit: Optional[int]):
    pos = call("position")
    lo = offset or 0
    if limit is not None and lo:
        return and_(Comparison(">", pos, NumberLit(str(lo))),
                    Comparison("<=", pos, NumberLit(str(lo + limit))))
    if limit is not None:
        return Comparison("<=", pos, NumberLit(str(limit)))
    if lo:
        return Comparison(">", pos, NumberLit(str(lo)))
    return None


def _source(ctx: TranslationContext):
    return call("doc" if ctx.source_kind == "doc" else "collection", StringLit(ctx.source_uri))


def translate(q: Query, ctx: TranslationContext) -> Translation:
    """Translate a parsed query; the shape tells how to read the result back."""
    if q.form == "DESCRIBE":
        raise TranslationError("UNSUPPORTED_FORM", "DESCRIBE results are implementation-defined")
    pattern = normalize(q.pattern)
    specify_variable_types(pattern, ctx)
    namer = Namer()

    if q.form == "CONSTRUCT":
        wanted = []
        for t in q.template:
            for v in t.vars():
                if v.hidden:
                    raise TranslationError("UNSUPPORTED_FEATURE",
                                           "blank nodes in CONSTRUCT templates")
                if v not in wanted:
                    wanted.append(v)
        variables = tuple(wanted)
    elif q.form == "SELECT":
        variables = tuple(q.projected())
    else:
        variables = ()
    keys = []
    for cond in q.modifiers.order_by if q.form != "ASK" else ():
        if not isinstance(cond.expr, Var):
            raise TranslationError("UNSUPPORTED_FEATURE", "ORDER BY on an expression")
        if cond.expr not in variables and cond.expr not in keys:
            keys.append(cond.expr)
    wanted_vars = list(variables) + keys
    for v in wanted_vars:
        namer.name(v)
    bound_anywhere = set(pattern_vars(pattern))
    for v in variables:
        if v not in bound_anywhere:
            ctx.warnings.add(TranslationError("UNBOUND_VARIABLE", f"{v} is never bound"))

    codes = translate_gp(pattern, ctx, namer, frozenset(variables))

    kinds: dict = {v: set() for v in wanted_vars}
    known = {v: True for v in wanted_vars}
    for code in codes:
        for v in wanted_vars:
            b = code.env.get(v)
            if b is not None:
                kinds[v].add(_binding_kind(b))
                if isinstance(b, LitB) and not b.known:
                    known[v] = False
    columns = tuple(Column(v, namer.name(v), frozenset(kinds[v]), known[v]) for v in wanted_vars)
    exact = True
    for v in keys + [c.expr for c in q.modifiers.order_by if c.expr in variables]:
        col = next(c for c in columns if c.var == v)
        if col.mixed:
            raise TranslationError("UNSUPPORTED_FEATURE",
                                   f"ORDER BY {v} whose values are of different kinds")
        if not col.known or any(k == "iri" for k, _ in col.kinds):
            exact = False
    shape = ResultShape(
        q.form, variables, columns, q.template, ordered=bool(q.modifiers.order_by),
        ordering_exact=exact, distinct=q.distinct == "DISTINCT", document_iri=ctx.document_iri,
        limit=q.modifiers.limit, offset=q.modifiers.offset)

    if not codes:
        ctx.problem("EMPTY_INTERSECTION", "the pattern cannot match any instance data")

    let_doc = Let("doc", _source(ctx))
    if q.form == "ASK":
        found = to_expr(b_or(*[exists_expr(c) for c in codes]))
        body = FLWOR((let_doc,), ElementCtor("boolean", (), (Enclosed(found),)))
        return Translation(Program(body), shape, list(ctx.warnings))

    exprs = merge_root_sources([case_expr(c, result_element(c.env, columns)) for c in codes])
    inner = seq(*exprs) if exprs else Sequence(())
    modified = translate_modifiers(inner, q, shape)
    if q.form == "CONSTRUCT":
        ret = ElementCtor("triples", (), (Enclosed(_construct_rows(q, shape)),))
    else:
        ret = ElementCtor("Results", (), (Enclosed(VarRef("Modified_Results")),))
    body = FLWOR((let_doc, Let("Modified_Results", modified)), ret)
    return Translation(Program(body), shape, list(ctx.warnings))


def _construct_rows(q: Query, shape: ResultShape):
    """One ``<triple n="i"><s/><p/><o/></triple>`` per template triple and solution.

    Positions holding a variable carry a copy of that variable's result
    element; constant positions are left empty and restored from the
    template when the result is read back.
    """
    parts = []
    for n, t in enumerate(q.template):
        slots, needed = [], []
        for tag, term in (("s", t.s), ("p", t.p), ("o", t.o)):
            if isinstance(term, Var):
                item = Path(VarRef("r"), (child(shape.column(term).element),))
                slots.append(ElementCtor(tag, (), (Enclosed(item),)))
                if item not in needed:
                    needed.append(item)
            else:
                slots.append(ElementCtor(tag))
        triple = ElementCtor("triple", (("n", str(n)),), tuple(slots))
        if needed:
            cond = and_(*[call("exists", i) for i in needed])
            parts.append(IfThenElse(cond, triple, Sequence(())))
        else:
            parts.append(triple)
    body = seq(*parts) if parts else Sequence(())
    return FLWOR((For("r", VarRef("Modified_Results")),), body)


def translate_query(q: Query, ctx: TranslationContext) -> Program:
    """The XQuery program answering ``q`` over the instance documents."""
    return translate(q, ctx).program


__all__ = [
    "Column", "ResultShape", "Translation", "result_element", "translate", "translate_gp",
    "translate_modifiers", "translate_query",
]
