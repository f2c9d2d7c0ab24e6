"""Hypothesis strategies over small vocabularies, so that patterns actually match."""

from hypothesis import strategies as st

from xmlsem_bridge.mapping import Mapping, MappingSet, XPathSet
from xmlsem_bridge.owl_model import (
    OWL_THING, Axiom, ClassExpr, Datatype, Individual, Literal, Ontology, OwlClass, OwlProperty,
    Ref,
)
from xmlsem_bridge.sparql.algebra import (
    BGP, XSD, BinOp, Call, Filter, IRI, Join, Lit, Modifiers, Not, Optional_, OrderCondition,
    Query, Triple, Union_, Var,
)

EX = "http://example.com/t#"
SUBJECTS = [IRI(EX + f"s{i}") for i in range(4)]
PREDICATES = [IRI(EX + f"p{i}") for i in range(3)]
VARS = [Var(n) for n in "abcd"]

literals = st.one_of(
    st.integers(0, 5).map(lambda i: Lit(str(i), XSD + "integer")),
    st.sampled_from(["x", "y", "xy"]).map(Lit),
)
objects = st.one_of(st.sampled_from(SUBJECTS), literals)

graphs = st.frozensets(st.builds(Triple, st.sampled_from(SUBJECTS), st.sampled_from(PREDICATES),
                                 objects), max_size=12)


def _pattern_triples(vars_):
    node = st.one_of(st.sampled_from(vars_), st.sampled_from(SUBJECTS))
    pred = st.one_of(st.sampled_from(PREDICATES), st.sampled_from(vars_))
    obj = st.one_of(st.sampled_from(vars_), objects)
    return st.builds(Triple, node, pred, obj)


def bgps(vars_=VARS):
    return st.lists(_pattern_triples(vars_), min_size=1, max_size=3).map(lambda ts: BGP(tuple(ts)))


def expressions(vars_=VARS):
    v = st.sampled_from(vars_)
    atoms = st.one_of(
        st.builds(BinOp, st.sampled_from(["=", "!=", "<", ">", "<=", ">="]), v,
                  st.one_of(literals, v)),
        st.builds(lambda x: Call("bound", (x,)), v),
        st.builds(lambda x, p: Call("regex", (x, Lit(p))), v, st.sampled_from(["x", "^y", "1"])),
        st.builds(lambda x: Call("isIRI", (x,)), v),
    )
    return st.recursive(atoms, lambda inner: st.one_of(
        st.builds(BinOp, st.sampled_from(["&&", "||"]), inner, inner),
        st.builds(Not, inner)), max_leaves=4)


def patterns(vars_=VARS):
    return st.recursive(bgps(vars_), lambda inner: st.one_of(
        st.builds(Join, inner, inner),
        st.builds(Union_, inner, inner),
        st.builds(Optional_, inner, inner),
        st.builds(Filter, inner, expressions(vars_)),
    ), max_leaves=4)


def queries():
    """SELECT queries with every modifier in play."""
    return st.builds(
        lambda p, proj, distinct, order, limit, offset: Query(
            "SELECT", p, tuple(proj) if proj else None, "DISTINCT" if distinct else "",
            modifiers=Modifiers(tuple(OrderCondition(v, d) for v, d in order), limit, offset)),
        patterns(),
        st.lists(st.sampled_from(VARS), unique=True, max_size=3),
        st.booleans(),
        st.lists(st.tuples(st.sampled_from(VARS), st.booleans()), max_size=2),
        st.none() | st.integers(0, 6),
        st.none() | st.integers(0, 6),
    )


# -- ontologies --------------------------------------------------------------------

_IDS = [f"C{i}" for i in range(4)]
_PROPS = [f"p{i}__xs_string" for i in range(3)] + [f"o{i}__C0" for i in range(2)]
_XS = ["xs:string", "xs:integer", "xs:date", "xs:float"]
_text = st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
                max_size=12)


@st.composite
def ontologies(draw):
    o = Ontology(draw(st.sampled_from(["http://example.com/ns#", "urn:test:onto#"])))
    classes = draw(st.lists(st.sampled_from(_IDS), unique=True, max_size=4))
    for c in classes:
        others = [x for x in classes if x != c]
        supers = (draw(st.lists(st.sampled_from(others), unique=True, max_size=2))
                  if others else []) or [OWL_THING]
        definition = None
        if draw(st.booleans()):
            ops = draw(st.lists(st.sampled_from(_PROPS), min_size=1, max_size=3))
            definition = ClassExpr(draw(st.sampled_from(["intersection", "union"])), tuple(ops),
                                   draw(st.none() | st.sampled_from(["xs:sequence", "xs:choice"])))
        o.add(OwlClass(c, tuple(supers), definition))
    datatypes = []
    if draw(st.booleans()):
        datatypes.append("D0")
        o.add(Datatype("D0", draw(st.sampled_from(_XS))))
    props = draw(st.lists(st.sampled_from(_PROPS), unique=True, max_size=5))
    for p in props:
        kind = "object" if p.startswith("o") else "datatype"
        ranges = (draw(st.lists(st.sampled_from(classes), unique=True, max_size=1))
                  if kind == "object" and classes else [] if kind == "object"
                  else draw(st.lists(st.sampled_from(_XS + datatypes), unique=True, max_size=2)))
        same_kind = [q for q in props if q != p and q[0] == p[0]]
        o.add(OwlProperty(
            p, kind,
            frozenset(draw(st.lists(st.sampled_from(classes + [OWL_THING]), unique=True, max_size=2))),
            frozenset(ranges),
            frozenset(draw(st.lists(st.sampled_from(same_kind), unique=True, max_size=1)))
            if same_kind else frozenset()))
    if classes and props:
        for _ in range(draw(st.integers(0, 2))):
            c = draw(st.sampled_from(classes))
            p = draw(st.sampled_from(props))
            if draw(st.booleans()):
                o.add(Axiom("hasKey", (c, p)))
            else:
                o.add(Axiom("exactCardinality", (c, p), draw(st.integers(0, 3))))
    if classes:
        for i in range(draw(st.integers(0, 2))):
            values = draw(st.lists(st.one_of(
                st.tuples(st.sampled_from(props or ["p0__xs_string"]),
                          st.builds(Literal, _text, st.sampled_from([None, "xs:string"]))),
                st.tuples(st.sampled_from(props or ["p0__xs_string"]),
                          st.integers(-50, 50).map(lambda n: Literal(str(n), "xs:integer"))),
                st.tuples(st.sampled_from(props or ["p0__xs_string"]),
                          st.sampled_from(classes).map(Ref))), max_size=3, unique=True))
            o.add(Individual(f"i{i}", draw(st.sampled_from(classes)), tuple(values)))
    named = classes + props
    for ident in draw(st.lists(st.sampled_from(named), unique=True, max_size=2)) if named else []:
        o.comments[ident] = draw(_text)
    return o


# -- mapping sets ----------------------------------------------------------------

_STEP_NAMES = ["A", "B", "Video", "Title", "x-y", "n.1"]
_PREDICATES = ['./Date = 2011', 'starts-with(@code, "960")', "2", '. > 7.5',
               './Title = "a ]b"', "@id and ./B"]


@st.composite
def xpaths(draw, attribute_ok: bool):
    steps = []
    for _ in range(draw(st.integers(1, 4))):
        name = draw(st.sampled_from(_STEP_NAMES))
        preds = draw(st.lists(st.sampled_from(_PREDICATES), max_size=2))
        steps.append(name + "".join(f"[{p}]" for p in preds))
    if attribute_ok and draw(st.booleans()):
        steps.append("@" + draw(st.sampled_from(["code", "id"])))
    return "/" + "/".join(steps)


@st.composite
def mapping_sets(draw):
    mappings = {}
    for cid in draw(st.lists(st.sampled_from(_IDS + _PROPS + ["New_Greek_Movie"]), unique=True,
                             max_size=6)):
        kind = draw(st.sampled_from(["class", "dtp", "op"]))
        paths = draw(st.lists(xpaths(kind == "dtp"), min_size=1, max_size=3))
        mappings[cid] = Mapping(cid, kind, XPathSet.of(paths))
    notes = tuple(draw(st.lists(st.sampled_from(["generated", "hand written - checked"]),
                                max_size=1)))
    return MappingSet(draw(st.sampled_from(["http://example.com/ns#", "http://example.com/vod#"])),
                      draw(st.sampled_from(["", "urn:x"])), dict(sorted(mappings.items())), notes)
