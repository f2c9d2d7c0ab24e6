"""Ontology model, Turtle I/O and mapping documents."""

import pytest

from conftest import read
from xmlsem_bridge.errors import MappingError, OntologyError
from xmlsem_bridge.mapping import (
    Mapping, MappingSet, XPathSet, canonical_xpath, generate_mappings, parse_mappings,
    parse_xpath, resolve_property_paths, serialize_mappings,
)
from xmlsem_bridge.owl_model import (
    Ontology, OwlClass, OwlProperty, compact, expand, parse_turtle, serialize_turtle,
)


def test_fig6_turtle_round_trip(fig6):
    _, os_, obc, _, _ = fig6
    assert parse_turtle(serialize_turtle(os_)) == os_
    assert parse_turtle(serialize_turtle(obc)) == obc


def test_turtle_fixture_matches_transform(fig6):
    assert parse_turtle(read("fig6.ttl")) == fig6[1]


def test_base_from_single_prefix():
    o = parse_turtle(read("vod_a.ttl"))
    assert o.base_iri.endswith("#") and o.classes


def test_expand_and_compact():
    base = "http://example.com/ns#"
    assert expand("Video_Type", base) == base + "Video_Type"
    assert expand("owl:Thing", base) == "http://www.w3.org/2002/07/owl#Thing"
    assert compact(base + "Video_Type", base) == "Video_Type"


def test_properties_merge_on_add():
    o = Ontology("urn:o#")
    o.add(OwlProperty("p", "datatype", frozenset({"A"}), frozenset({"xs:string"})))
    o.add(OwlProperty("p", "datatype", frozenset({"B"}), frozenset({"xs:string"})))
    assert o.property("p").domains == {"A", "B"}


def test_class_supers_merge_dropping_thing():
    o = Ontology("urn:o#")
    o.add(OwlClass("A"))
    o.add(OwlClass("A", ("B",)))
    assert o.classes["A"].super_classes == ("B",)


def test_id_kind_conflict():
    o = Ontology("urn:o#")
    o.add(OwlClass("X"))
    with pytest.raises(OntologyError) as e:
        o.add(OwlProperty("X", "object"))
    assert e.value.code == "ID_KIND_CONFLICT"


def test_turtle_syntax_error():
    with pytest.raises(OntologyError) as e:
        parse_turtle("@prefix ns: <urn:x#> .\nns:A a ")
    assert e.value.code == "SYNTAX"


# -- mappings --------------------------------------------------------------------

def test_xpath_canonical_form():
    assert canonical_xpath("/A / B[ 2 ] / @code") == canonical_xpath("/A/B[ 2 ]/@code")
    xp = parse_xpath('/A/B[./C = "x"]/@code')
    assert xp.last.axis == "attribute"
    assert parse_xpath(xp.text) == xp


def test_generated_mappings_are_deterministic(fig6):
    schema, os_, _, catalog, ms = fig6
    again = generate_mappings(schema, os_, catalog)
    assert serialize_mappings(again) == serialize_mappings(ms)


def test_fixture_is_the_generated_document(fig6):
    assert parse_mappings(read("fig6_mappings.xml")) == fig6[4]


def test_mapping_xml_round_trip(fig6):
    ms = fig6[4]
    assert parse_mappings(serialize_mappings(ms)) == ms


def test_predicated_paths_survive(fig6):
    ms = parse_mappings(read("vod_a_mappings.xml"))
    text = serialize_mappings(ms)
    assert 'starts-with(@code, "960")' in text.replace("&quot;", '"')
    assert parse_mappings(text) == ms


def test_unknown_construct_strict_and_lenient(fig6):
    os_ = fig6[1]
    doc = serialize_mappings(MappingSet(os_.base_iri, "", {
        "Nope": Mapping("Nope", "class", XPathSet.of(["/MultimediaContent"]))}))
    with pytest.raises(MappingError):
        parse_mappings(doc, os_, strict=True)
    assert len(parse_mappings(doc, os_, strict=False)) == 0


def test_class_mapping_cannot_end_in_attribute():
    with pytest.raises(MappingError) as e:
        Mapping("C", "class", XPathSet.of(["/A/@code"]))
    assert e.value.code == "INVALID_MAPPING"


def test_empty_xpath_set_rejected():
    with pytest.raises(MappingError):
        XPathSet(())


def test_sub_property_paths_are_included(fig6):
    _, os_, _, _, ms = fig6
    paths = set(resolve_property_paths(ms, os_, "Creator__xs_string"))
    assert "/MultimediaContent/Video/Agent" in paths
    assert "/MultimediaContent/Video/Creator" in paths
