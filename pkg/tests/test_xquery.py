"""XQuery subset: parser, printer and interpreter."""

import pytest

from xmlsem_bridge.errors import EvaluationError, XQueryError
from xmlsem_bridge.rdf import load_instance
from xmlsem_bridge.xquery import ast as X
from xmlsem_bridge.xquery.interp import eval_xquery, serialize_items
from xmlsem_bridge.xquery.parser import parse_expression, parse_subset
from xmlsem_bridge.xquery.printer import pretty_print

DOC = load_instance("""<MultimediaContent>
  <Video code="2"><Title>B</Title><Rating>4</Rating></Video>
  <Video code="10"><Title>A</Title><Rating>9.5</Rating><Creator>X</Creator><Creator>Y</Creator></Video>
</MultimediaContent>""")


def run(text: str, docs=None) -> str:
    items = eval_xquery(parse_subset(text), {"v": [DOC]} if docs is None else docs)
    return serialize_items(items).rstrip("\n")


@pytest.mark.parametrize("text,expected", [
    ("exists(())", "false"),
    ("empty(())", "true"),
    ("count((1, 2, 3))", "3"),
    ("1 + 2 * 3", "7"),
    ('"a" = ("b", "a")', "true"),
    ("<a>{ 1 + 2 }</a>", "<a>3</a>"),
    ("if (1 > 2) then 'x' else 'y'", "y"),
    ("for $x in (1, 2, 3) where $x > 1 return $x", "2\n3"),
    ("(5, 6, 7)[position() > 1 and position() <= 2]", "6"),
])
def test_expressions(text, expected):
    assert run(text, {}) == expected


def test_paths_and_predicates():
    assert run('for $v in collection("v")/MultimediaContent/Video[./Rating > 5] '
               'return string($v/@code)') == "10"
    assert run('count(collection("v")/MultimediaContent/Video/Creator)') == "2"
    assert run('distinct-values(collection("v")/MultimediaContent/Video/Title)') == "B\nA"


def test_order_by_casts_and_empty_least():
    text = ('for $v in collection("v")/MultimediaContent/Video '
            'order by xs:integer($v/@code) descending empty least return string($v/@code)')
    assert run(text) == "10\n2"
    lexical = ('for $v in collection("v")/MultimediaContent/Video '
               'order by $v/@code return string($v/@code)')
    assert run(lexical) == "10\n2"


def test_matches_and_path():
    assert run('matches("Music box", "^Mus")', {}) == "true"
    assert run('path(collection("v")/MultimediaContent/Video[2])').endswith("Video[2]")


def test_missing_source():
    with pytest.raises(EvaluationError) as e:
        run('collection("nope")', {})
    assert e.value.code == "MISSING_SOURCE"


def test_syntax_error_has_location():
    with pytest.raises(XQueryError) as e:
        parse_subset("let $x := (1, 2 return $x")
    assert e.value.code == "SYNTAX" and "line 1" in str(e.value)


def test_printer_rejects_unbound_variables():
    with pytest.raises(XQueryError) as e:
        pretty_print(X.Program(X.VarRef("nowhere")))
    assert e.value.code == "UNBOUND_VARIABLE"


def test_print_parse_round_trip_on_handwritten_program():
    text = """let $doc := collection("v")
let $r := (
  for $v in $doc/MultimediaContent/Video[./Title = "A" or @code = "2"]
  let $c := $v/Creator
  where exists($c)
  order by $v/Rating descending empty least
  return <Result><id>{ string($v/@code) }</id><n>{ count($c) }</n></Result>
)
return <Results>{ $r }</Results>"""
    program = parse_subset(text)
    assert parse_subset(pretty_print(program)) == program
    compact = "".join(line.strip() for line in run(text).splitlines())
    assert compact == "<Results><Result><id>10</id><n>2</n></Result></Results>"


def test_string_escapes_survive_printing():
    e = parse_expression('concat("a""b", \'c\', "&amp;")')
    assert parse_expression(pretty_print(X.Program(e))) == e
    assert run(pretty_print(X.Program(e)), {}) == 'a"bc&'
