"""Variable kinds and schema-level triples.

A variable used as the object of a datatype property can only ever hold a
literal, one used as the subject of any mapped property only an instance
node.  Mixing the two inside the required part of a pattern makes it
unsatisfiable, which is reported instead of silently translated to an
empty query.
"""

from __future__ import annotations

from typing import Optional

from ..errors import TranslationError
from ..sparql.algebra import (
    BGP, Call, Filter, IRI, Join, Optional_, RDF_TYPE, RDFS, Triple, Union_, Var,
)
from ..sparql.evaluate import norm
from .context import SCHEMA_OBJECTS, TBOX_PREDICATES, TranslationContext

NODE = "NODE"
LITERAL = "LITERAL"
CLASS = "CLASS"
PREDICATE = "PREDICATE"
ANY = "ANY"

_TBOX_KINDS = {
    RDFS + "subClassOf": (CLASS, CLASS),
    RDFS + "subPropertyOf": (PREDICATE, PREDICATE),
    RDFS + "domain": (PREDICATE, CLASS),
    RDFS + "range": (PREDICATE, ANY),
}


def _required_triples(p) -> list[Triple]:
    """Triples every solution of ``p`` has to match (OPTIONAL right sides excluded)."""
    if isinstance(p, BGP):
        return list(p.triples)
    if isinstance(p, Filter):
        return _required_triples(p.inner)
    if isinstance(p, Join):
        return _required_triples(p.left) + _required_triples(p.right)
    if isinstance(p, Optional_):
        return _required_triples(p.left)
    return []


def _all_filters(p) -> list:
    if isinstance(p, BGP):
        return []
    if isinstance(p, Filter):
        return [p.expr] + _all_filters(p.inner)
    return _all_filters(p.left) + _all_filters(p.right)


def _triple_kinds(t: Triple, ctx: TranslationContext) -> list[tuple[object, str]]:
    """(term, kind) facts implied by one triple with a constant predicate."""
    if not isinstance(t.p, IRI):
        return [(t.p, PREDICATE)]
    p = t.p.value
    if p == RDF_TYPE:
        if isinstance(t.o, IRI) and t.o.value in SCHEMA_OBJECTS:
            return [(t.s, CLASS if t.o.value.endswith("#Class") else PREDICATE)]
        if isinstance(t.o, IRI):
            return [(t.s, NODE)]
        return []
    if p in _TBOX_KINDS:
        ks, ko = _TBOX_KINDS[p]
        return [(t.s, ks), (t.o, ko)]
    pid = ctx.local(p)
    kind = ctx.property_kind(pid) if pid else None
    if kind == "dtp":
        return [(t.s, NODE), (t.o, LITERAL)]
    if kind == "op":
        return [(t.s, NODE), (t.o, NODE)]
    return []


def specify_variable_types(pattern, ctx: TranslationContext) -> dict:
    """Kind (NODE, LITERAL, CLASS, PREDICATE or ANY) of every pattern variable.

    Conflicts between LITERAL and any other kind among the required
    triples of one union branch raise TYPE_CONFLICT, naming both triples.
    """
    out: dict[Var, str] = {}
    branches = []

    def split(p):
        if isinstance(p, Union_):
            split(p.left)
            split(p.right)
        else:
            branches.append(p)

    split(pattern)
    everything: list[Triple] = []

    def collect(p):
        if isinstance(p, BGP):
            everything.extend(p.triples)
        elif isinstance(p, Filter):
            collect(p.inner)
        else:
            collect(p.left)
            collect(p.right)

    collect(pattern)
    for branch in branches:
        seen: dict[Var, tuple[str, Triple]] = {}
        for t in _required_triples(branch):
            for term, kind in _triple_kinds(t, ctx):
                if not isinstance(term, Var) or kind == ANY:
                    continue
                prev = seen.get(term)
                if prev is None:
                    seen[term] = (kind, t)
                elif prev[0] != kind and LITERAL in (prev[0], kind):
                    raise TranslationError(
                        "TYPE_CONFLICT",
                        f"{term} is used as {prev[0]} in {_show(prev[1])} and as {kind} in {_show(t)}")
        for v, (kind, _) in seen.items():
            out.setdefault(v, kind)
        for e in _all_filters(branch):
            _check_filter(e, seen)
    for t in everything:
        for term, kind in _triple_kinds(t, ctx):
            if isinstance(term, Var):
                out.setdefault(term, kind)
        for v in t.vars():
            out.setdefault(v, ANY)
    return out


def _check_filter(e, seen: dict) -> None:
    if isinstance(e, Call) and e.name == "regex" and isinstance(e.args[0], Var):
        kind = seen.get(e.args[0], (ANY, None))[0]
        if kind in (NODE, CLASS, PREDICATE):
            raise TranslationError("TYPE_CONFLICT",
                                   f"regex() needs a literal but {e.args[0]} is a {kind}")
    for sub in getattr(e, "args", ()) or ():
        _check_filter(sub, seen)
    for attr in ("left", "right", "operand"):
        if hasattr(e, attr):
            _check_filter(getattr(e, attr), seen)


def _show(t: Triple) -> str:
    return f"{t.s} {t.p} {t.o}"


def is_schema_triple(t: Triple) -> bool:
    if not isinstance(t.p, IRI):
        return False
    if t.p.value in TBOX_PREDICATES:
        return True
    return t.p.value == RDF_TYPE and isinstance(t.o, IRI) and t.o.value in SCHEMA_OBJECTS


def process_schema_triples(triples, ctx: TranslationContext) -> Optional[tuple]:
    """Drop ground schema-level triples that hold; None when one does not.

    Triples with variables are kept; they are matched against the TBox
    facts while cases are enumerated.
    """
    tbox = {Triple(norm(f.s), norm(f.p), norm(f.o)) for f in ctx.tbox()}
    kept = []
    for t in triples:
        if is_schema_triple(t) and not t.vars():
            if Triple(norm(t.s), norm(t.p), norm(t.o)) not in tbox:
                return None
            continue
        kept.append(t)
    return tuple(kept)


__all__ = [
    "ANY", "CLASS", "LITERAL", "NODE", "PREDICATE", "is_schema_triple", "process_schema_triples",
    "specify_variable_types",
]
