"""Result formats, the random corpus and differential testing."""

import json
import xml.etree.ElementTree as ET

import pytest

from conftest import read
from xmlsem_bridge.errors import EvaluationError
from xmlsem_bridge.harness import (
    compare_results, diff_test, generate_corpus, load_case, to_sparql_results_xml, to_turtle,
)
from xmlsem_bridge.harness.corpus import FEATURES, check_instance, generate_case
from xmlsem_bridge.sparql.algebra import XSD, IRI, Lit, Var
from xmlsem_bridge.sparql.evaluate import SparqlResult
from xmlsem_bridge.xsd_model import parse_schema
from xmlsem_bridge.xsd_paths import enumerate_paths

SRX = "{http://www.w3.org/2005/sparql-results#}"


def select(rows, variables=("x", "y"), **kw):
    return SparqlResult("SELECT", tuple(Var(v) for v in variables), list(rows), **kw)


# -- SRX ----------------------------------------------------------------------------

def test_srx_is_well_formed_with_head_variables():
    r = select([(IRI("urn:a"), Lit("1", XSD + "integer")), (Lit("b", lang="en"), None)])
    root = ET.fromstring(to_sparql_results_xml(r).encode())
    assert [v.get("name") for v in root.iter(SRX + "variable")] == ["x", "y"]
    results = root.findall(f"{SRX}results/{SRX}result")
    assert len(results) == 2
    assert len(results[1].findall(SRX + "binding")) == 1  # unbound ?y is omitted
    lit = results[0].find(f"{SRX}binding/{SRX}literal")
    assert lit.get("datatype") == XSD + "integer"


def test_srx_empty_results():
    text = to_sparql_results_xml(select([]))
    assert "<results/>" in text
    ET.fromstring(text.encode())


def test_srx_ask():
    root = ET.fromstring(to_sparql_results_xml(SparqlResult("ASK", boolean=True)).encode())
    assert root.find(SRX + "boolean").text == "true"


def test_turtle_needs_construct():
    with pytest.raises(EvaluationError) as e:
        to_turtle(select([]))
    assert e.value.code == "SHAPE"


# -- comparison -------------------------------------------------------------------------

A, B, C = (Lit(s) for s in "abc")


def test_multiset_comparison_counts_duplicates():
    oracle = select([(A,), (A,)], ("x",))
    assert compare_results(oracle, select([(A,), (A,)], ("x",)), True) is None
    assert "missing solution" in compare_results(oracle, select([(A,)], ("x",)), True)


def test_ties_may_permute_inside_a_group():
    oracle = select([(A,), (B,), (C,)], ("x",), ordered=True, groups=[[(A,), (B,)], [(C,)]])
    assert compare_results(oracle, select([(B,), (A,), (C,)], ("x",)), True) is None
    d = compare_results(oracle, select([(C,), (A,), (B,)], ("x",)), True)
    assert d and "position 1" in d


def test_window_cut_inside_a_tie_group():
    oracle = select([(A,)], ("x",), ordered=True, groups=[[(A,), (B,)], [(C,)]])
    assert compare_results(oracle, select([(B,)], ("x",)), True, limit=1) is None
    assert compare_results(oracle, select([(C,)], ("x",)), True, limit=1) is not None


# -- corpus ----------------------------------------------------------------------------

def test_corpus_is_deterministic():
    a = generate_corpus(3, 20)
    b = generate_corpus(3, 20)
    assert [(c.schema, c.instance, c.query) for c in a.cases] == \
        [(c.schema, c.instance, c.query) for c in b.cases]
    assert generate_case(3, 5).query == a.cases[5].query


def test_corpus_covers_every_feature():
    corpus = generate_corpus(11, 100)
    assert all(corpus.coverage[f] >= 5 for f in FEATURES), corpus.report()


def test_corpus_respects_size_bounds():
    for case in generate_corpus(5, 30).cases:
        schema = parse_schema(case.schema)
        assert len(schema.complex_types) <= 4
        check_instance(case.instance, enumerate_paths(schema))


def test_corpus_rejects_invalid_sizes():
    with pytest.raises(ValueError):
        generate_corpus(1, 0)


def test_check_instance_rejects_unknown_paths(fig6):
    with pytest.raises(EvaluationError) as e:
        check_instance(read("video1_stray.xml"), fig6[3])
    assert e.value.code == "INPUT"


# -- differential testing ----------------------------------------------------------------

def test_fixed_case_passes():
    r = diff_test(load_case(read("fig6.xsd"), read("videos3.xml"), read("query_creators.rq")))
    assert r.status == "PASS" and r.expected == r.actual > 0


def test_mutated_mapping_is_caught():
    r = diff_test(load_case(read("fig6.xsd"), read("videos3.xml"), read("query_creators.rq"),
                            read("fig6_mappings_mutated.xml"), "mutated"))
    assert r.status == "FAIL"
    assert r.first_divergence.startswith("missing solution")
    assert "EditedVideo" in r.first_divergence
    record = json.loads(r.to_json())
    assert set(record) == {"seed", "case-id", "status", "first-divergence"}


@pytest.mark.parametrize("query", ["query_ask.rq", "query_construct.rq",
                                   "query_optional_rating.rq", "query_8_1_unwindowed.rq",
                                   "query_empty_intersection.rq"])
@pytest.mark.parametrize("instance", ["videos3.xml", "videos3_norating.xml", "videos14.xml",
                                      "empty_root.xml"])
def test_fixtures_agree_with_oracle(query, instance):
    r = diff_test(load_case(read("fig6.xsd"), read(instance), read(query)))
    assert r.status == "PASS", r.first_divergence
