"""XML Schema reading, path enumeration and the ontology transform."""

import pytest

from conftest import read
from xmlsem_bridge.errors import SchemaError
from xmlsem_bridge.owl_model import OWL_THING
from xmlsem_bridge.xs2owl import transform
from xmlsem_bridge.xsd_model import parse_schema, serialize_schema
from xmlsem_bridge.xsd_paths import enumerate_paths

XS_HEAD = '<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">'


def schema(body: str):
    return parse_schema(XS_HEAD + body + "</xs:schema>")


def test_fig6_components(fig6):
    s = fig6[0]
    assert set(s.complex_types) == {"Video_Type", "EditedVideo_Type", "Reviews_Type",
                                    "NS_MultimediaContent_UNType"}
    assert s.substitution_groups == {"Creator": ("Agent",)}
    assert list(s.model_groups) == ["videoGroup"]


def test_schema_serialization_round_trip(fig6):
    s = fig6[0]
    assert parse_schema(serialize_schema(s)) == s


def test_malformed_schema_is_a_well_formedness_error():
    with pytest.raises(SchemaError) as e:
        parse_schema(read("malformed.xsd"))
    assert e.value.code == "WELL_FORMEDNESS"


def test_empty_schema_gives_empty_ontologies():
    os_, obc = transform(parse_schema(read("empty.xsd")))
    assert not os_.classes and not os_.properties()


def test_bad_occurrence_bounds():
    with pytest.raises(SchemaError) as e:
        schema('<xs:element name="A"><xs:complexType><xs:sequence>'
               '<xs:element name="B" type="xs:string" minOccurs="2" maxOccurs="1"/>'
               '</xs:sequence></xs:complexType></xs:element>')
    assert e.value.code == "INVALID_VALUE"


def test_unresolved_type_reference():
    with pytest.raises(SchemaError) as e:
        enumerate_paths(schema('<xs:element name="A" type="Missing"/>'))
    assert e.value.code == "UNRESOLVED_REF"


def test_instance_paths(fig6):
    catalog = fig6[3]
    assert "/MultimediaContent/Video/Reviews/Review" in catalog.paths
    assert "/MultimediaContent/EditedVideo/Edit" in catalog.paths
    assert "/MultimediaContent/Video/Edit" not in catalog.paths
    assert catalog.class_paths["Reviews_Type"] == ("/MultimediaContent/EditedVideo/Reviews",
                                                   "/MultimediaContent/Video/Reviews")
    assert catalog.single_valued("/MultimediaContent/Video/Title")
    assert not catalog.single_valued("/MultimediaContent/Video/Creator")


def test_recursion_limit_names_the_cycle():
    s = parse_schema(read("recursive_part.xsd"))
    with pytest.raises(SchemaError) as e:
        enumerate_paths(s, max_depth=4)
    assert e.value.code == "RECURSION_LIMIT"
    assert "Assembly -> Part -> Part" in str(e.value)


def test_extension_becomes_subclass(fig6):
    os_ = fig6[1]
    assert os_.classes["EditedVideo_Type"].super_classes == ("Video_Type",)
    assert os_.super_classes_of("EditedVideo_Type") == ["Video_Type"]


def test_attribute_and_choice_property():
    s = schema(
        '<xs:complexType name="T"><xs:choice>'
        '<xs:element name="X" type="xs:integer"/><xs:element name="Y" type="xs:string"/>'
        '</xs:choice><xs:attribute name="id" type="xs:string"/></xs:complexType>'
        '<xs:element name="Root" type="T"/>')
    os_, obc = transform(s)
    assert os_.property("X__xs_integer").ranges == {"xs:integer"}
    assert os_.property("id__xs_string").domains == {"T"}
    root = os_.property("Root__T")
    assert root.kind == "object" and root.domains == {OWL_THING}
    assert obc.individuals["T"].class_id == "ComplexTypeInfoType"


def test_identity_constraints_become_keys():
    s = schema(
        '<xs:complexType name="T"><xs:sequence><xs:element name="K" type="xs:string"/>'
        '</xs:sequence></xs:complexType>'
        '<xs:element name="Root"><xs:complexType><xs:sequence>'
        '<xs:element name="Item" type="T" maxOccurs="unbounded"/></xs:sequence></xs:complexType>'
        '<xs:key name="itemKey"><xs:selector xpath="Item"/><xs:field xpath="K"/></xs:key>'
        '</xs:element>')
    os_, _ = transform(s)
    kinds = {a.kind for a in os_.axioms}
    assert "hasKey" in kinds
