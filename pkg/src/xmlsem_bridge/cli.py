"""Command line: ``xmlsem-bridge <command> ...``.

Exit codes: 0 success, 1 differential failures, 2 schema, mapping or
input errors, 3 SPARQL syntax errors, 4 translation errors, 5 runtime and
result-format errors.  Diagnostics go to stderr; payloads go to the output
file or stdout.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional

from .errors import (
    BridgeError, EvaluationError, MappingError, OntologyError, SchemaError, SparqlError,
    TranslationError, Warnings, XQueryError,
)
from .mapping import generate_mappings, parse_mappings, serialize_mappings
from .owl_model import parse_turtle, serialize_turtle
from .rdf import DEFAULT_DOCUMENT_IRI, load_instance, serialize_triples, xml_to_rdf
from .xs2owl import DEFAULT_BASE_IRI, transform
from .xsd_model import parse_schema
from .xsd_paths import DEFAULT_MAX_DEPTH, enumerate_paths

INPUT_CODES = {"WELL_FORMEDNESS", "UNMATCHED_NODE", "RECURSION_LIMIT", "INPUT"}


def exit_code(e: BridgeError) -> int:
    if e.code in INPUT_CODES or isinstance(e, (SchemaError, MappingError, OntologyError)):
        return 2
    if isinstance(e, SparqlError):
        return 3
    if isinstance(e, TranslationError):
        return 4
    if isinstance(e, (EvaluationError, XQueryError)):
        return 5
    return 1


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise EvaluationError("INPUT", f"cannot read {path}: {e.strerror}") from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _strict(args) -> bool:
    return bool(getattr(args, "strict", False)) or os.environ.get("XMLSEM_BRIDGE_STRICT") == "1"


def _report_warnings(warnings) -> None:
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)


def _schema_stack(xsd: str, base: str = DEFAULT_BASE_IRI, max_depth: int = DEFAULT_MAX_DEPTH):
    schema = parse_schema(_read(xsd))
    os_, obc = transform(schema, base)
    return schema, os_, obc, enumerate_paths(schema, max_depth)


# -- commands -------------------------------------------------------------------------

def cmd_transform(args) -> int:
    schema = parse_schema(_read(args.xsd))
    os_, obc = transform(schema, args.base)
    _write(args.out_onto, serialize_turtle(os_))
    _write(args.out_bc, serialize_turtle(obc))
    return 0


def cmd_map(args) -> int:
    schema, os_, _, catalog = _schema_stack(args.xsd, args.base, args.max_depth)
    _write(args.out, serialize_mappings(generate_mappings(schema, os_, catalog)))
    return 0


def _context(args):
    """Mappings plus whatever the optional schema or ontology adds."""
    from .translator import TranslationContext

    ontology, catalog = None, None
    if args.xsd:
        _, ontology, _, catalog = _schema_stack(args.xsd, max_depth=args.max_depth)
    elif args.onto:
        ontology = parse_turtle(_read(args.onto))
    ms = parse_mappings(_read(args.mappings), ontology, strict=_strict(args))
    kind = "doc" if args.source_kind == "doc" else "collection"
    return TranslationContext.build(ms, ontology, catalog, source_kind=kind,
                                    source_uri=args.source, strict=_strict(args),
                                    document_iri=args.base_doc)


def _translate(args):
    from .sparql.parser import parse_query
    from .translator import translate

    ctx = _context(args)
    q = parse_query(_read(args.query))
    tr = translate(q, ctx)
    _report_warnings(tr.warnings)
    return q, tr


def cmd_translate(args) -> int:
    from .xquery.printer import pretty_print

    _, tr = _translate(args)
    _write(args.out, pretty_print(tr.program))
    return 0


def cmd_run(args) -> int:
    from .harness.results import decode_results, to_sparql_results_xml, to_turtle
    from .xquery.interp import eval_xquery, serialize_items

    q, tr = _translate(args)
    doc = load_instance(_read(args.xml))
    items = eval_xquery(tr.program, {args.source: [doc]})
    if args.format == "native":
        _write(args.out, serialize_items(items) + "\n")
        return 0
    if args.format == "turtle":
        if tr.shape.form != "CONSTRUCT":
            raise EvaluationError("SHAPE", "Turtle output needs a CONSTRUCT query")
        _write(args.out, to_turtle(decode_results(items, tr.shape)))
        return 0
    if tr.shape.form == "CONSTRUCT":
        raise EvaluationError("SHAPE", "CONSTRUCT results are triples; use --format turtle")
    _write(args.out, to_sparql_results_xml(decode_results(items, tr.shape)))
    return 0


def cmd_xml2rdf(args) -> int:
    schema, os_, _, catalog = _schema_stack(args.xsd, max_depth=args.max_depth)
    ms = parse_mappings(_read(args.mappings), os_) if args.mappings else \
        generate_mappings(schema, os_, catalog)
    doc = load_instance(_read(args.xml))
    warnings = Warnings()
    triples = xml_to_rdf(doc, os_, ms, args.base, _strict(args), warnings)
    _report_warnings(warnings)
    _write(args.out, serialize_triples(triples))
    return 0


def cmd_difftest(args) -> int:
    from .harness import diff_test, generate_corpus
    from .harness.difftest import load_case

    if args.xsd or args.xml or args.query:
        if not (args.xsd and args.xml and args.query):
            print("error: a fixed case needs --xsd, --xml and --query", file=sys.stderr)
            return 2
        cases = [load_case(_read(args.xsd), _read(args.xml), _read(args.query),
                           _read(args.mappings) if args.mappings else None, Path(args.query).stem)]
    else:
        corpus = generate_corpus(args.seed, args.cases)
        cases = corpus.cases
        print(f"coverage: {corpus.report()}", file=sys.stderr)
    reports = [diff_test(c) for c in cases]
    if args.report:
        _write(args.report, "".join(r.to_json() + "\n" for r in reports))
    failed = [r for r in reports if r.status != "PASS"]
    for r in failed:
        print(f"FAIL {r.case_id}: {r.first_divergence}")
    passed = len(reports) - len(failed)
    print(f"{'PASS' if not failed else 'FAIL'} {passed}/{len(reports)}")
    return 0 if not failed else 1


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xmlsem-bridge",
                                description="XML Schema to OWL, mappings and SPARQL to XQuery.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="XML Schema to the schema and compatibility ontologies")
    t.add_argument("--xsd", required=True)
    t.add_argument("--out-onto", required=True)
    t.add_argument("--out-bc", required=True)
    t.add_argument("--base", default=DEFAULT_BASE_IRI, help="ontology base IRI")
    t.set_defaults(func=cmd_transform)

    m = sub.add_parser("map", help="generate the mapping document for a schema")
    m.add_argument("--xsd", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    m.add_argument("--base", default=DEFAULT_BASE_IRI, help="ontology base IRI")
    m.set_defaults(func=cmd_map)

    def query_args(sp):
        sp.add_argument("--mappings", required=True)
        sp.add_argument("--query", required=True)
        sp.add_argument("--source", default="videos", help="collection (or document) URI")
        sp.add_argument("--source-kind", choices=("collection", "doc"), default="collection")
        hints = sp.add_mutually_exclusive_group()
        hints.add_argument("--xsd", help="schema giving datatypes and cardinalities")
        hints.add_argument("--onto", help="schema ontology (Turtle) giving datatypes")
        sp.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
        sp.add_argument("--base-doc", default=DEFAULT_DOCUMENT_IRI, help="document IRI of results")
        sp.add_argument("--out")
        sp.add_argument("--strict", action="store_true")

    tr = sub.add_parser("translate", help="SPARQL query to XQuery")
    query_args(tr)
    tr.set_defaults(func=cmd_translate)

    r = sub.add_parser("run", help="translate, evaluate over a document and format the results")
    query_args(r)
    r.add_argument("--xml", required=True)
    r.add_argument("--format", choices=("srx", "native", "turtle"), default="srx")
    r.set_defaults(func=cmd_run)

    x = sub.add_parser("xml2rdf", help="instance document to RDF triples")
    x.add_argument("--xsd", required=True)
    x.add_argument("--xml", required=True)
    x.add_argument("--out")
    x.add_argument("--mappings", help="mapping document (default: generated from the schema)")
    x.add_argument("--base", default=DEFAULT_DOCUMENT_IRI, help="document IRI")
    x.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    x.add_argument("--strict", action="store_true")
    x.set_defaults(func=cmd_xml2rdf)

    d = sub.add_parser("difftest", help="compare translated queries with the SPARQL evaluator")
    d.add_argument("--seed", type=int, default=7)
    d.add_argument("--cases", type=int, default=200)
    d.add_argument("--xsd")
    d.add_argument("--xml")
    d.add_argument("--query")
    d.add_argument("--mappings", help="mappings the translator uses for a fixed case")
    d.add_argument("--report", help="write JSON-lines reports here")
    d.set_defaults(func=cmd_difftest)
    return p


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BridgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
