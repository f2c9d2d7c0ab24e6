"""Command line behaviour and exit codes."""

import json
import xml.etree.ElementTree as ET

import pytest

from conftest import DATA
from xmlsem_bridge.cli import main


def d(name: str) -> str:
    return str(DATA / name)


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_transform_writes_both_ontologies(capsys, tmp_path):
    code, _, _ = cli(capsys, "transform", "--xsd", d("fig6.xsd"),
                     "--out-onto", str(tmp_path / "os.ttl"), "--out-bc", str(tmp_path / "bc.ttl"))
    assert code == 0
    assert (tmp_path / "os.ttl").read_text() == (DATA / "fig6.ttl").read_text()
    assert "ComplexTypeInfoType" in (tmp_path / "bc.ttl").read_text()


def test_map_is_byte_deterministic(capsys, tmp_path):
    for name in ("a.xml", "b.xml"):
        assert cli(capsys, "map", "--xsd", d("fig6.xsd"), "--out", str(tmp_path / name))[0] == 0
    assert (tmp_path / "a.xml").read_bytes() == (tmp_path / "b.xml").read_bytes()
    assert (tmp_path / "a.xml").read_text() == (DATA / "fig6_mappings.xml").read_text()


def test_translate_to_stdout(capsys):
    code, out, _ = cli(capsys, "translate", "--mappings", d("fig6_mappings.xml"),
                       "--query", d("query_8_1.rq"), "--xsd", d("fig6.xsd"))
    assert code == 0 and out.startswith('let $doc := collection("videos")')


def test_doc_source_kind(capsys):
    code, out, _ = cli(capsys, "translate", "--mappings", d("fig6_mappings.xml"),
                       "--query", d("query_ask.rq"), "--source", "v.xml", "--source-kind", "doc")
    assert code == 0 and 'doc("v.xml")' in out


def test_run_select_as_srx(capsys):
    code, out, _ = cli(capsys, "run", "--mappings", d("fig6_mappings.xml"),
                       "--query", d("query_8_1_unwindowed.rq"), "--xsd", d("fig6.xsd"),
                       "--xml", d("videos3.xml"))
    assert code == 0
    ns = "{http://www.w3.org/2005/sparql-results#}"
    root = ET.fromstring(out.encode())
    ids = [b.find(ns + "literal").text for b in root.iter(ns + "binding") if b.get("name") == "id"]
    assert ids == ["102", "101"]


def test_run_ask(capsys):
    code, out, _ = cli(capsys, "run", "--mappings", d("fig6_mappings.xml"),
                       "--query", d("query_ask.rq"), "--xml", d("videos3.xml"))
    assert code == 0 and "<boolean>true</boolean>" in out


def test_run_construct_as_turtle(capsys):
    code, out, _ = cli(capsys, "run", "--mappings", d("fig6_mappings.xml"),
                       "--query", d("query_construct.rq"), "--xml", d("videos3.xml"),
                       "--format", "turtle")
    assert code == 0 and out.strip() and all(line.endswith(" .") for line in out.splitlines())


@pytest.mark.parametrize("query,fmt", [("query_ask.rq", "turtle"), ("query_construct.rq", "srx")])
def test_result_shape_mismatch_exit_5(capsys, query, fmt):
    code, _, err = cli(capsys, "run", "--mappings", d("fig6_mappings.xml"), "--query", d(query),
                       "--xml", d("videos3.xml"), "--format", fmt)
    assert code == 5 and "SHAPE" in err


def test_xml2rdf_stray_node(capsys, tmp_path, monkeypatch):
    code, out, err = cli(capsys, "xml2rdf", "--xsd", d("fig6.xsd"), "--xml", d("video1_stray.xml"))
    assert code == 0 and "warning: UNMATCHED_NODE" in err and len(out.splitlines()) == 9
    code, _, err = cli(capsys, "xml2rdf", "--xsd", d("fig6.xsd"), "--xml", d("video1_stray.xml"),
                       "--strict")
    assert code == 2 and "UNMATCHED_NODE" in err
    monkeypatch.setenv("XMLSEM_BRIDGE_STRICT", "1")
    assert cli(capsys, "xml2rdf", "--xsd", d("fig6.xsd"), "--xml", d("video1_stray.xml"))[0] == 2


def test_strict_environment_variable_for_translation(capsys, monkeypatch):
    args = ("translate", "--mappings", d("fig6_mappings.xml"), "--query", d("query_unmapped.rq"))
    assert cli(capsys, *args)[0] == 0
    monkeypatch.setenv("XMLSEM_BRIDGE_STRICT", "1")
    assert cli(capsys, *args)[0] == 4


@pytest.mark.parametrize("argv,code,marker", [
    (("transform", "--xsd", d("malformed.xsd"), "--out-onto", "-", "--out-bc", "-"), 2,
     "WELL_FORMEDNESS"),
    (("map", "--xsd", d("recursive_part.xsd"), "--out", "-"), 2, "RECURSION_LIMIT"),
    (("map", "--xsd", d("no_such_file.xsd"), "--out", "-"), 2, "cannot read"),
    (("translate", "--mappings", d("fig6_mappings.xml"), "--query", d("fig6.xsd")), 3, "SYNTAX"),
])
def test_error_exit_codes(capsys, argv, code, marker):
    got, _, err = cli(capsys, *argv)
    assert got == code and marker in err and err.startswith("error: ")


def test_empty_schema(capsys, tmp_path):
    code, _, _ = cli(capsys, "transform", "--xsd", d("empty.xsd"),
                     "--out-onto", str(tmp_path / "o.ttl"), "--out-bc", str(tmp_path / "b.ttl"))
    assert code == 0


def test_difftest_fixed_case_with_report(capsys, tmp_path):
    report = tmp_path / "r.jsonl"
    code, out, _ = cli(capsys, "difftest", "--xsd", d("fig6.xsd"), "--xml", d("videos3.xml"),
                       "--query", d("query_creators.rq"),
                       "--mappings", d("fig6_mappings_mutated.xml"), "--report", str(report))
    assert code == 1 and "FAIL query_creators: missing solution" in out
    record = json.loads(report.read_text().splitlines()[0])
    assert record["status"] == "FAIL" and record["case-id"] == "query_creators"


def test_difftest_fixed_case_needs_all_inputs(capsys):
    code, _, err = cli(capsys, "difftest", "--xsd", d("fig6.xsd"))
    assert code == 2 and "--xml" in err


def test_difftest_small_corpus(capsys):
    code, out, err = cli(capsys, "difftest", "--seed", "1", "--cases", "10")
    assert code == 0 and out.strip() == "PASS 10/10"
    assert err.startswith("coverage: UNION=")
