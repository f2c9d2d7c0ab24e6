"""The RDF view of instance documents."""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import read
from xmlsem_bridge.errors import EvaluationError, Warnings
from xmlsem_bridge.rdf import (
    dataset, iri_steps, load_instance, node_iri, parse_triples, serialize_triples, xml_to_rdf,
)
from xmlsem_bridge.sparql.algebra import XSD, IRI, Lit, Triple

NS = "http://example.com/ns#"
DOC = "http://example.com/doc"
RDF_TYPE = IRI("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
VIDEO = IRI(DOC + "#_MultimediaContent.1_Video.1")


def test_single_video_triples(fig6):
    _, os_, _, _, ms = fig6
    triples = xml_to_rdf(load_instance(read("video1.xml")), os_, ms)
    assert Triple(VIDEO, RDF_TYPE, IRI(NS + "Video_Type")) in triples
    assert Triple(VIDEO, IRI(NS + "code__xs_integer"), Lit("960123", XSD + "integer")) in triples
    assert Triple(VIDEO, IRI(NS + "Title_videoGroup__xs_string"), Lit("Kynodontas")) in triples
    assert Triple(IRI(DOC + "#_MultimediaContent.1"), IRI(NS + "Video__Video_Type"), VIDEO) in triples
    assert len(triples) == 9


def test_empty_root_has_only_the_root(fig6):
    _, os_, _, _, ms = fig6
    triples = xml_to_rdf(load_instance(read("empty_root.xml")), os_, ms)
    assert {t.p for t in triples} == {RDF_TYPE, IRI(NS + "MultimediaContent__NS_MultimediaContent_UNType")}


def test_stray_element_warns_or_fails(fig6):
    _, os_, _, _, ms = fig6
    doc = load_instance(read("video1_stray.xml"))
    warnings = Warnings()
    lenient = xml_to_rdf(doc, os_, ms, warnings=warnings)
    assert warnings.codes() == ["UNMATCHED_NODE"]
    assert "Extra" in str(warnings.items[0])
    assert lenient == xml_to_rdf(load_instance(read("video1.xml")), os_, ms)
    with pytest.raises(EvaluationError) as e:
        xml_to_rdf(doc, os_, ms, strict=True)
    assert e.value.code == "UNMATCHED_NODE"


def test_subproperty_closure(fig6):
    _, os_, _, _, ms = fig6
    doc = load_instance(read("videos3.xml"))
    plain = xml_to_rdf(doc, os_, ms)
    closed = xml_to_rdf(doc, os_, ms, subproperty_closure=True)
    agents = {t.o for t in plain if t.p == IRI(NS + "Agent__xs_string")}
    creators = {t.o for t in closed if t.p == IRI(NS + "Creator__xs_string")}
    assert agents and agents <= creators


def test_dataset_adds_schema_triples(fig6):
    _, os_, _, _, ms = fig6
    doc = load_instance(read("video1.xml"))
    extra = dataset(doc, os_, ms) - xml_to_rdf(doc, os_, ms)
    sub = IRI("http://www.w3.org/2000/01/rdf-schema#subClassOf")
    assert Triple(IRI(NS + "EditedVideo_Type"), sub, IRI(NS + "Video_Type")) in extra


def test_malformed_instance():
    with pytest.raises(EvaluationError) as e:
        load_instance("<a><b></a>")
    assert e.value.code == "INPUT"


def test_ntriples_round_trip(fig6):
    _, os_, _, _, ms = fig6
    triples = dataset(load_instance(read("videos3.xml")), os_, ms)
    assert parse_triples(serialize_triples(triples)) == triples


# Random documents built from a few names, so siblings often share a name.
names = st.sampled_from(["A", "B", "C"])
trees = st.recursive(names.map(lambda n: (n, [])),
                     lambda kids: st.tuples(names, st.lists(kids, max_size=3)), max_leaves=20)


def _xml(tree) -> str:
    name, kids = tree
    return f"<{name}>" + "".join(_xml(k) for k in kids) + f"</{name}>"


@settings(max_examples=300, deadline=None, suppress_health_check=list(HealthCheck))
@given(trees)
def test_node_iris_are_injective_and_decodable(tree):
    doc = load_instance(_xml(tree))
    elements = [n for n in doc.iter() if n.kind == "element"]
    iris = [node_iri(n) for n in elements]
    assert len(set(iris)) == len(iris)
    for n, iri in zip(elements, iris):
        steps = iri_steps(iri)
        cur = doc
        for name, pos in steps:
            cur = cur.elements(name)[pos - 1]
        assert cur is n
