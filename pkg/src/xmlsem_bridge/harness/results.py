"""Reading XQuery results back as SPARQL results, and SPARQL Results XML output."""

from __future__ import annotations

from typing import Optional

from ..errors import EvaluationError
from ..rdf import path_to_iri, serialize_triples
from ..sparql.algebra import IRI, Lit, Triple, Var, XSD
from ..sparql.evaluate import BNode, SparqlResult, norm
from ..translator.query import ResultShape
from ..xmltree import Node, escape_attr, escape_text

SRX_NS = "http://www.w3.org/2005/sparql-results#"


def _shape_error(msg: str) -> EvaluationError:
    return EvaluationError("SHAPE", msg)


def _root(items: list, expected: str) -> Node:
    if len(items) != 1 or not isinstance(items[0], Node) or items[0].kind != "element":
        raise _shape_error(f"expected a single <{expected}> element")
    root = items[0]
    if root.name != expected:
        raise _shape_error(f"expected <{expected}>, found <{root.name}>")
    return root


def _decode_term(el: Node, shape: ResultShape):
    col = next((c for c in shape.columns if c.element == el.name), None)
    if col is None:
        raise _shape_error(f"unexpected result element <{el.name}>")
    text = el.string_value()
    kind = el.get("kind")
    dt = el.get("datatype")
    if kind is None:
        kind, dt = next(iter(col.kinds)) if len(col.kinds) == 1 else ("literal", None)
    if kind == "iri":
        if text.startswith("/"):
            return col.var, IRI(path_to_iri(text, shape.document_iri))
        return col.var, IRI(text)
    return col.var, norm(Lit(text, dt))


def decode_row(result: Node, shape: ResultShape) -> dict:
    if result.kind != "element" or result.name != "Result":
        raise _shape_error("expected <Result> elements")
    out = {}
    for el in result.elements():
        v, term = _decode_term(el, shape)
        out[v] = term
    return out


def decode_results(items: list, shape: ResultShape) -> SparqlResult:
    """The SPARQL result encoded by the items of a translated program."""
    if shape.form == "ASK":
        root = _root(items, "boolean")
        text = root.string_value().strip()
        if text not in ("true", "false"):
            raise _shape_error(f"bad boolean {text!r}")
        return SparqlResult("ASK", boolean=text == "true")
    if shape.form == "CONSTRUCT":
        root = _root(items, "triples")
        out = set()
        for t in root.elements():
            n = t.get("n")
            if t.name != "triple" or n is None or not n.isdigit() or int(n) >= len(shape.template):
                raise _shape_error("expected <triple n=...> elements")
            pattern = shape.template[int(n)]
            slots = t.elements()
            if [s.name for s in slots] != ["s", "p", "o"]:
                raise _shape_error("a <triple> needs <s>, <p> and <o>")
            terms = []
            for term, slot in zip((pattern.s, pattern.p, pattern.o), slots):
                if isinstance(term, Var):
                    inner = slot.elements()
                    if len(inner) != 1:
                        raise _shape_error("a variable slot holds one result element")
                    term = _decode_term(inner[0], shape)[1]
                terms.append(term)
            s, p, o = terms
            if isinstance(s, Lit) or not isinstance(p, IRI):
                continue
            out.add(Triple(s, p, norm(o)))
        return SparqlResult("CONSTRUCT", variables=shape.variables, triples=frozenset(out))
    root = _root(items, "Results")
    rows = []
    for r in root.children:
        if r.kind == "text" and not r.value.strip():
            continue
        row = decode_row(r, shape)
        rows.append(tuple(row.get(v) for v in shape.variables))
    return SparqlResult("SELECT", variables=shape.variables, rows=rows, ordered=shape.ordered)


# -- SPARQL Query Results XML ---------------------------------------------------------

def _binding(v: Var, term) -> str:
    if isinstance(term, IRI):
        body = f"<uri>{escape_text(term.value)}</uri>"
    elif isinstance(term, BNode):
        body = f"<bnode>{escape_text(term.label)}</bnode>"
    else:
        attrs = ""
        if term.lang:
            attrs = f' xml:lang="{escape_attr(term.lang)}"'
        elif term.datatype:
            attrs = f' datatype="{escape_attr(term.datatype)}"'
        body = f"<literal{attrs}>{escape_text(term.lexical)}</literal>"
    return f'      <binding name="{escape_attr(v.name)}">{body}</binding>'


def to_sparql_results_xml(results, shape: Optional[ResultShape] = None,
                          datatypes: Optional[dict] = None) -> str:
    """Serialize a SELECT or ASK result in the SPARQL Query Results XML Format.

    ``results`` is a SparqlResult (from the oracle or ``decode_results``) or
    the raw items of a translated program, which then need ``shape``.
    ``datatypes`` optionally maps variables to the datatype of their
    literals for results whose literals came back untyped.
    """
    if not isinstance(results, SparqlResult):
        if shape is None:
            raise _shape_error("raw XQuery results need a result shape")
        if shape.form == "CONSTRUCT":
            raise _shape_error("CONSTRUCT results are triples, not solutions")
        results = decode_results(results if isinstance(results, list) else [results], shape)
    out = ['<?xml version="1.0" encoding="UTF-8"?>', f'<sparql xmlns="{SRX_NS}">']
    if results.form == "ASK":
        out.append("  <head/>")
        out.append(f"  <boolean>{'true' if results.boolean else 'false'}</boolean>")
        out.append("</sparql>")
        return "\n".join(out) + "\n"
    if results.form != "SELECT":
        raise _shape_error(f"{results.form} results are not solutions")
    out.append("  <head>")
    for v in results.variables:
        out.append(f'    <variable name="{escape_attr(v.name)}"/>')
    out.append("  </head>")
    if not results.rows:
        out.append("  <results/>")
    else:
        out.append("  <results>")
        for row in results.rows:
            out.append("    <result>")
            for v, term in zip(results.variables, row):
                if term is None:
                    continue
                if datatypes and isinstance(term, Lit) and not term.datatype and datatypes.get(v):
                    dt = datatypes[v]
                    term = Lit(term.lexical, None if dt == XSD + "string" else dt)
                out.append(_binding(v, term))
            out.append("    </result>")
        out.append("  </results>")
    out.append("</sparql>")
    return "\n".join(out) + "\n"


def to_turtle(results) -> str:
    """CONSTRUCT results as Turtle (one N-Triples style statement per line)."""
    if not isinstance(results, SparqlResult) or results.form != "CONSTRUCT":
        raise _shape_error("Turtle output needs a CONSTRUCT result")
    return serialize_triples(results.triples)


__all__ = ["SRX_NS", "decode_results", "decode_row", "to_sparql_results_xml", "to_turtle"]
