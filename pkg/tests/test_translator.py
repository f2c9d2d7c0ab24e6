"""SPARQL to XQuery translation."""

import pytest

from conftest import read
from xmlsem_bridge.errors import TranslationError
from xmlsem_bridge.harness import diff_test, load_case
from xmlsem_bridge.harness.results import decode_results
from xmlsem_bridge.mapping import parse_mappings
from xmlsem_bridge.owl_model import parse_turtle
from xmlsem_bridge.rdf import load_instance
from xmlsem_bridge.sparql.parser import parse_query
from xmlsem_bridge.translator import TranslationContext, translate
from xmlsem_bridge.xquery.interp import eval_xquery
from xmlsem_bridge.xquery.printer import pretty_print

PREFIX = "PREFIX ns: <http://example.com/ns#>\n"


@pytest.fixture(scope="module")
def full(fig6):
    _, os_, _, catalog, ms = fig6
    return TranslationContext.build(ms, os_, catalog)


def xq(query: str, ctx) -> str:
    return pretty_print(translate(parse_query(PREFIX + query), ctx).program)


def test_ask_shape(fig6):
    ctx = TranslationContext.build(fig6[4])
    assert "<boolean>{ exists($doc/MultimediaContent/Video) }</boolean>" in \
        xq("ASK { ?v a ns:Video_Type }", ctx)


def test_mapping_only_uses_distinct_values(fig6):
    ctx = TranslationContext.build(fig6[4])
    text = xq("SELECT ?t WHERE { ?v ns:Title_videoGroup__xs_string ?t }", ctx)
    assert "distinct-values(" in text


def test_single_valued_properties_bind_directly(full):
    text = xq("SELECT ?t WHERE { ?v ns:Title_videoGroup__xs_string ?t }", full)
    assert "distinct-values(" not in text


def test_constant_object_is_pushed_into_the_path(full):
    text = xq('SELECT ?v WHERE { ?v ns:Creator__xs_string "Johnson John" }', full)
    assert '[./Creator = "Johnson John"]' in text


def test_union_becomes_sequence_of_branches(full):
    text = xq("SELECT ?x WHERE { { ?x a ns:Video_Type } UNION { ?x a ns:EditedVideo_Type } }",
              full)
    assert "MultimediaContent/Video" in text and "MultimediaContent/EditedVideo" in text


def test_lang_of_variable_is_untranslatable(full):
    with pytest.raises(TranslationError) as e:
        translate(parse_query(PREFIX + 'SELECT ?t WHERE { ?v ns:Title_videoGroup__xs_string ?t '
                              'FILTER(lang(?t) = "en") }'), full)
    assert e.value.code == "UNTRANSLATABLE_FILTER"


def test_type_conflict(full):
    with pytest.raises(TranslationError) as e:
        translate(parse_query(read("query_type_conflict.rq")), full)
    assert e.value.code == "TYPE_CONFLICT"


def test_unknown_predicate_lenient_and_strict(fig6):
    _, os_, _, catalog, ms = fig6
    q = parse_query(read("query_unmapped.rq"))
    tr = translate(q, TranslationContext.build(ms, os_, catalog))
    assert any(w.code == "UNKNOWN_PREDICATE" for w in tr.warnings)
    assert "let $Modified_Results := ()" in pretty_print(tr.program)
    with pytest.raises(TranslationError) as e:
        translate(q, TranslationContext.build(ms, os_, catalog, strict=True))
    assert e.value.code == "UNKNOWN_PREDICATE"


def test_describe_is_unsupported(full):
    with pytest.raises(TranslationError) as e:
        translate(parse_query(read("query_describe.rq")), full)
    assert e.value.code == "UNSUPPORTED_FORM"


def test_full_query_on_fourteen_videos(fig6):
    _, os_, _, catalog, ms = fig6
    tr = translate(parse_query(read("query_8_1.rq")), TranslationContext.build(ms, os_, catalog))
    doc = load_instance(read("videos14.xml"))
    rows = decode_results(eval_xquery(tr.program, {"videos": [doc]}), tr.shape).rows
    assert [r[0].lexical for r in rows] == ["304", "308"]


def test_manual_mappings_with_predicates():
    os_ = parse_turtle(read("vod_a.ttl"))
    ms = parse_mappings(read("vod_a_mappings.xml"), os_)
    tr = translate(parse_query(read("query_vod.rq")), TranslationContext.build(ms, os_))
    doc = load_instance(read("vod_videos.xml"))
    rows = decode_results(eval_xquery(tr.program, {"videos": [doc]}), tr.shape).rows
    assert [(a.lexical, b.lexical) for a, b in rows] == [("960123", "Kynodontas"),
                                                         ("960777", "Attenberg")]


# Each query runs through the translator and the SPARQL oracle on the same document.
HANDWRITTEN = [
    "SELECT ?v ?t WHERE { ?v a ns:Video_Type ; ns:Title_videoGroup__xs_string ?t }",
    "SELECT ?v ?r WHERE { ?v ns:Title_videoGroup__xs_string ?t "
    "OPTIONAL { ?v ns:Rating_videoGroup__xs_float ?r FILTER(?r > 5) } }",
    "SELECT DISTINCT ?c WHERE { ?v ns:Creator__xs_string ?c } ORDER BY ?c",
    "SELECT ?v ?p ?o WHERE { ?v a ns:Video_Type ; ?p ?o }",
    "SELECT ?v WHERE { ?v ns:code__xs_integer ?c FILTER(?c >= 102 && !(?c = 103)) }",
    "SELECT ?v ?c WHERE { { ?v ns:code__xs_integer ?c } UNION "
    "{ ?v ns:Title_videoGroup__xs_string ?c } }",
    "SELECT ?v WHERE { ?v ns:Reviews_videoGroup__Reviews_Type ?r . "
    "?r ns:Review__xs_string ?text FILTER regex(?text, \"great\", \"i\") }",
    "SELECT ?t WHERE { ?v ns:Title_videoGroup__xs_string ?t FILTER(!bound(?x)) } "
    "ORDER BY DESC(?t) LIMIT 2 OFFSET 1",
    "CONSTRUCT { ?v <urn:out#title> ?t } WHERE { ?v ns:Title_videoGroup__xs_string ?t }",
    "SELECT ?x WHERE { ?x ns:Date_videoGroup__xs_date ?d "
    "FILTER(?d > \"2010-01-01\"^^<http://www.w3.org/2001/XMLSchema#date>) }",
]


@pytest.mark.parametrize("query", HANDWRITTEN)
@pytest.mark.parametrize("instance", ["videos3.xml", "videos14.xml"])
def test_agrees_with_the_oracle(query, instance):
    case = load_case(read("fig6.xsd"), read(instance), PREFIX + query)
    report = diff_test(case)
    assert report.status == "PASS", report.first_divergence
