"""Running translated queries and checking them against the SPARQL oracle."""

from ..rdf import xml_to_rdf
from ..sparql.evaluate import eval_sparql
from ..xquery.interp import eval_xquery
from .corpus import Case, Corpus, generate_corpus
from .difftest import Report, compare_results, diff_test, load_case
from .results import decode_results, to_sparql_results_xml, to_turtle

__all__ = [
    "Case", "Corpus", "Report", "compare_results", "decode_results", "diff_test",
    "eval_sparql", "eval_xquery", "generate_corpus", "load_case", "to_sparql_results_xml",
    "to_turtle", "xml_to_rdf",
]
