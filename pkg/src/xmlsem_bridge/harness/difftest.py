"""Differential testing: translated XQuery against the SPARQL oracle.

For a case the oracle answers the query over the RDF view of the instance
(built with the mappings generated from the schema), while the translator
works from the case's mappings, which may differ from the generated ones
when a test wants to see a mapping bug caught.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, replace
from typing import Optional

from ..errors import BridgeError
from ..mapping import generate_mappings, parse_mappings
from ..rdf import dataset, load_instance, term_text
from ..sparql.algebra import Modifiers
from ..sparql.evaluate import SparqlResult, eval_sparql
from ..sparql.parser import parse_query
from ..translator import TranslationContext, translate
from ..xquery.interp import eval_xquery
from ..xs2owl import transform
from ..xsd_model import parse_schema
from ..xsd_paths import enumerate_paths
from .corpus import Case
from .results import decode_results

SOURCE_URI = "corpus"


@dataclass
class Report:
    case_id: str
    status: str  # PASS | FAIL
    seed: Optional[int] = None
    first_divergence: Optional[str] = None
    expected: Optional[int] = None  # solutions (or triples) on the oracle side
    actual: Optional[int] = None

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "case-id": self.case_id, "status": self.status,
                           "first-divergence": self.first_divergence})


def _row_text(variables, row) -> str:
    parts = [f"?{v.name}={term_text(t)}" for v, t in zip(variables, row) if t is not None]
    return "{" + ", ".join(parts) + "}"


def _multiset_divergence(variables, expected: list, actual: list) -> Optional[str]:
    want, got = Counter(expected), Counter(actual)
    missing = sorted((want - got).elements(), key=repr)
    if missing:
        return "missing solution " + _row_text(variables, missing[0])
    extra = sorted((got - want).elements(), key=repr)
    if extra:
        return "unexpected solution " + _row_text(variables, extra[0])
    return None


def _within(variables, pool: list, actual: list, size: int) -> Optional[str]:
    """``actual`` is a sub-multiset of ``pool`` holding ``size`` rows."""
    extra = sorted((Counter(actual) - Counter(pool)).elements(), key=repr)
    if extra:
        return "unexpected solution " + _row_text(variables, extra[0])
    if len(actual) != size:
        return f"expected {size} solutions, got {len(actual)}"
    return None


def _ordered_divergence(oracle: SparqlResult, actual: list, lo: int, hi: Optional[int]) -> Optional[str]:
    """Tie-aware comparison: rows may be permuted only inside groups of equal keys."""
    variables = oracle.variables
    pos = 0
    chunks = []
    for g in oracle.groups:
        start, end = pos, pos + len(g)
        pos = end
        a, b = max(start, lo), end if hi is None else min(end, hi)
        if a < b:
            chunks.append((g, b - a))
    expected_len = sum(n for _, n in chunks)
    if len(actual) != expected_len:
        missing = _multiset_divergence(variables, oracle.rows, actual)
        return missing or f"expected {expected_len} solutions, got {len(actual)}"
    at = 0
    for g, n in chunks:
        part = actual[at:at + n]
        if len(g) == n:
            d = _multiset_divergence(variables, g, part)
        else:
            d = _within(variables, g, part, n)
        if d:
            return f"{d} at position {at + lo + 1}"
        at += n
    return None


def compare_results(oracle: SparqlResult, actual: SparqlResult, exact_order: bool,
                    unsliced: Optional[SparqlResult] = None, limit=None, offset=None) -> Optional[str]:
    """The first divergence between the oracle's answer and the translated one, or None."""
    if oracle.form == "ASK":
        if oracle.boolean != actual.boolean:
            return f"ASK answered {actual.boolean}, expected {oracle.boolean}"
        return None
    if oracle.form == "CONSTRUCT":
        if unsliced is not None:
            extra = sorted(actual.triples - unsliced.triples, key=repr)
            if extra:
                return "unexpected triple " + " ".join(term_text(x) for x in extra[0])
            return None
        missing = sorted(oracle.triples - actual.triples, key=repr)
        if missing:
            return "missing triple " + " ".join(term_text(x) for x in missing[0])
        extra = sorted(actual.triples - oracle.triples, key=repr)
        if extra:
            return "unexpected triple " + " ".join(term_text(x) for x in extra[0])
        return None
    lo = offset or 0
    hi = None if limit is None else lo + limit
    if oracle.ordered and exact_order:
        return _ordered_divergence(oracle, actual.rows, lo, hi)
    if limit is None and not offset:
        return _multiset_divergence(oracle.variables, oracle.rows, actual.rows)
    pool = [r for g in oracle.groups for r in g]
    return _within(oracle.variables, pool, actual.rows, len(oracle.rows))


def run_case(case: Case, strict: bool = False):
    """(oracle result, translated result, translation) for a case."""
    schema = parse_schema(case.schema)
    os, _ = transform(schema)
    catalog = enumerate_paths(schema)
    generated = generate_mappings(schema, os, catalog)
    ms = parse_mappings(case.mappings, os) if case.mappings else generated
    doc = load_instance(case.instance)
    q = parse_query(case.query)
    oracle = eval_sparql(q, dataset(doc, os, generated))
    ctx = TranslationContext.build(ms, os, catalog, source_uri=SOURCE_URI, strict=strict)
    tr = translate(q, ctx)
    items = eval_xquery(tr.program, {SOURCE_URI: [doc]})
    actual = decode_results(items, tr.shape)
    unsliced = None
    m = q.modifiers
    if q.form == "CONSTRUCT" and (m.limit is not None or m.offset):
        unsliced = eval_sparql(replace(q, modifiers=Modifiers(m.order_by)), dataset(doc, os, generated))
    return oracle, actual, tr, unsliced


def diff_test(case: Case) -> Report:
    """PASS when the translated query returns the oracle's answer on the case."""
    try:
        oracle, actual, tr, unsliced = run_case(case)
    except BridgeError as e:
        return Report(case.case_id, "FAIL", case.seed, f"{e.code}: {e}")
    d = compare_results(oracle, actual, tr.shape.ordering_exact, unsliced,
                        tr.shape.limit, tr.shape.offset)
    size = (len(oracle.rows), len(actual.rows)) if oracle.form == "SELECT" else \
        (len(oracle.triples), len(actual.triples)) if oracle.form == "CONSTRUCT" else (None, None)
    return Report(case.case_id, "FAIL" if d else "PASS", case.seed, d, *size)


def load_case(schema_text: str, instance_text: str, query_text: str,
              mappings_text: Optional[str] = None, case_id: str = "case") -> Case:
    return Case(case_id, schema_text, instance_text, query_text, mappings=mappings_text)


__all__ = ["Report", "compare_results", "diff_test", "load_case", "run_case"]
