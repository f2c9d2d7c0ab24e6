"""SPARQL parsing, normalization and the reference evaluator."""

from collections import Counter

import pytest
from hypothesis import HealthCheck, given, settings

from strategies import graphs, patterns, queries
from xmlsem_bridge.errors import EvaluationError, SparqlError
from xmlsem_bridge.sparql.algebra import (
    BGP, XSD, BinOp, Filter, IRI, Join, Lit, Optional_, Triple, Union_, Var, certain_vars,
    pattern_vars,
)
from xmlsem_bridge.sparql.evaluate import TripleIndex, eval_pattern, eval_sparql, filter_holds
from xmlsem_bridge.sparql.normalize import is_union_free, normalize
from xmlsem_bridge.sparql.parser import parse_query
from xmlsem_bridge.sparql.unparse import unparse

PROPS = settings(max_examples=300, deadline=None, suppress_health_check=list(HealthCheck))
E = "urn:e#"


def multiset(solutions):
    return Counter(frozenset(mu.items()) for mu in solutions)


# -- parser -------------------------------------------------------------------------

def test_parse_abbreviations():
    q = parse_query(f'PREFIX e: <{E}> SELECT ?x WHERE {{ ?x a e:C ; e:p "v"@en, 3 }}')
    triples = q.pattern.triples
    assert len(triples) == 3
    assert triples[1].o == Lit("v", lang="en")
    assert triples[2].o == Lit("3", XSD + "integer")


def test_blank_nodes_become_hidden_variables():
    q = parse_query(f"PREFIX e: <{E}> SELECT * WHERE {{ _:b e:p ?x }}")
    s = q.pattern.triples[0].s
    assert isinstance(s, Var) and s.hidden
    assert q.projected() == (Var("x"),)


@pytest.mark.parametrize("text,code", [
    ("SELECT * WHERE { ?s ?p ?o } GROUP BY ?s", "UNSUPPORTED_FEATURE"),
    ("SELECT (COUNT(?x) AS ?c) WHERE { ?x ?p ?o }", "UNSUPPORTED_FEATURE"),
    ("SELECT ?x WHERE { ?x ?p }", "SYNTAX"),
    ("SELECT ?x WHERE { ?x ex:p ?o }", "SYNTAX"),
    ("SELECT ?x WHERE { ?x ?p ?o FILTER(STRLEN(?o) > 1) }", "UNSUPPORTED_FEATURE"),
])
def test_parse_errors(text, code):
    with pytest.raises(SparqlError) as e:
        parse_query(text)
    assert e.value.code == code


def test_error_location():
    with pytest.raises(SparqlError) as e:
        parse_query("SELECT ?x\nWHERE { ?x ?p }")
    assert "line 2" in str(e.value)


@PROPS
@given(queries())
def test_unparse_round_trip(q):
    back = parse_query(unparse(q))
    assert (back.pattern, back.projection, back.distinct, back.modifiers) == \
        (q.pattern, q.projection, q.distinct, q.modifiers)


# -- normalization ---------------------------------------------------------------

def test_join_distributes_over_union():
    a, b, c = (BGP((Triple(Var(n), IRI(E + n), Var("o")),)) for n in "abc")
    n = normalize(Join(a, Union_(b, c)))
    assert isinstance(n, Union_)
    assert n.left == BGP(a.triples + b.triples) and n.right == BGP(a.triples + c.triples)


def test_union_inside_optional_right_stays():
    a, b, c = (BGP((Triple(Var(n), IRI(E + n), Var("o")),)) for n in "abc")
    p = Optional_(a, Union_(b, c))
    assert normalize(p) == p
    assert is_union_free(p)


@PROPS
@given(patterns())
def test_normal_form_branches_are_union_free(p):
    n = normalize(p)
    branches = []
    while isinstance(n, Union_):
        branches.append(n.right)
        n = n.left
    branches.append(n)
    assert all(is_union_free(b) for b in branches)


# -- evaluation laws beyond the acceptance set ---------------------------------------

@PROPS
@given(graphs, patterns(), patterns())
def test_union_commutes(g, a, b):
    i = TripleIndex(g)
    assert multiset(eval_pattern(Union_(a, b), i)) == multiset(eval_pattern(Union_(b, a), i))


@PROPS
@given(graphs, patterns(), patterns(), patterns())
def test_join_associates(g, a, b, c):
    i = TripleIndex(g)
    assert multiset(eval_pattern(Join(Join(a, b), c), i)) == \
        multiset(eval_pattern(Join(a, Join(b, c)), i))


@PROPS
@given(graphs, patterns())
def test_filter_conjunction_splits(g, p):
    i = TripleIndex(g)
    x = BinOp(">", Var("a"), Lit("2", XSD + "integer"))
    y = BinOp("!=", Var("b"), Lit("x"))
    assert multiset(eval_pattern(Filter(p, BinOp("&&", x, y)), i)) == \
        multiset(eval_pattern(Filter(Filter(p, x), y), i))


def test_pattern_vars_and_certain_vars():
    a = BGP((Triple(Var("x"), IRI(E + "p"), Var("y")),))
    b = BGP((Triple(Var("x"), IRI(E + "q"), Var("z")),))
    p = Optional_(a, b)
    assert pattern_vars(p) == [Var("x"), Var("y"), Var("z")]
    assert certain_vars(p) == {Var("x"), Var("y")}


# -- evaluator ----------------------------------------------------------------------------

G = [
    Triple(IRI(E + "v1"), IRI(E + "title"), Lit("Music One")),
    Triple(IRI(E + "v1"), IRI(E + "rating"), Lit("7", XSD + "float")),
    Triple(IRI(E + "v2"), IRI(E + "title"), Lit("Other")),
    Triple(IRI(E + "v2"), IRI(E + "rating"), Lit("3", XSD + "float")),
    Triple(IRI(E + "v3"), IRI(E + "title"), Lit("Music Two")),
]


def test_select_with_optional_filter_and_order():
    q = parse_query(f"""PREFIX e: <{E}>
        SELECT ?v ?r WHERE {{ ?v e:title ?t OPTIONAL {{ ?v e:rating ?r }}
                              FILTER regex(?t, "Music") }} ORDER BY DESC(?r)""")
    r = eval_sparql(q, G)
    assert r.rows == [(IRI(E + "v1"), Lit("7", XSD + "float")), (IRI(E + "v3"), None)]
    assert r.ordered


def test_error_in_filter_is_false():
    mu = {Var("t"): Lit("Music")}
    assert not filter_holds(BinOp(">", Var("t"), Lit("2", XSD + "integer")), mu)
    assert not filter_holds(BinOp(">", Var("unbound"), Lit("2", XSD + "integer")), mu)


def test_ask_and_construct():
    ask = parse_query(f"PREFIX e: <{E}> ASK {{ ?v e:rating ?r FILTER(?r > 5) }}")
    assert eval_sparql(ask, G).boolean is True
    c = parse_query(f"PREFIX e: <{E}> CONSTRUCT {{ ?v e:good ?t }} "
                    f"WHERE {{ ?v e:title ?t ; e:rating ?r FILTER(?r > 5) }}")
    assert eval_sparql(c, G).triples == {Triple(IRI(E + "v1"), IRI(E + "good"), Lit("Music One"))}


def test_describe_has_no_oracle():
    with pytest.raises(EvaluationError) as e:
        eval_sparql(parse_query(f"DESCRIBE <{E}v1>"), G)
    assert e.value.code == "UNSUPPORTED_FORM"


def test_numeric_equality_across_lexical_forms():
    q = parse_query(f'PREFIX e: <{E}> SELECT ?v WHERE {{ ?v e:rating "7.0"^^<{XSD}float> }}')
    assert eval_sparql(q, G).rows == []  # triple matching is term equality
    q = parse_query(f"PREFIX e: <{E}> SELECT ?v WHERE {{ ?v e:rating ?r FILTER(?r = 7.0) }}")
    assert eval_sparql(q, G).rows == [(IRI(E + "v1"),)]
