"""RDF view of XML instances under a mapping.

Every element reached by a class mapping becomes a resource typed with that
class.  A property mapping path ending at node ``m`` yields the triple
``(parent(m), P, value(m))``: the literal string value for datatype
properties, the resource of ``m`` for object properties.  The document node
is the subject of object properties that address the document element.

Resource IRIs encode the element's position, e.g.
``http://example.com/doc#_MultimediaContent.1_Video.2`` for the second Video.
``xs:string`` values become plain literals (the two are the same term in
RDF 1.1 and SPARQL queries usually write plain strings).
"""

from __future__ import annotations

import re
from typing import Optional

from .errors import BridgeError, EvaluationError, Warnings
from .mapping import MappingSet, xquery_steps
from .owl_model import OWL_THING, Ontology, expand
from .sparql.algebra import IRI, Lit, OWL, RDF_TYPE, RDFS, Triple, XSD, escape_string
from .xmltree import Node, number_document, parse_xml
from .xquery.ast import Path, Root
from .xquery.interp import Interpreter, _Focus

DEFAULT_DOCUMENT_IRI = "http://example.com/doc"

_SEGMENT = re.compile(r"_(.+?)\.(\d+)(?=_|$)")
_PATH_STEP = re.compile(r"^Q\{[^}]*\}(.+)\[(\d+)\]$")


def load_instance(text: str) -> Node:
    """Parse an instance document (whitespace-only text dropped) and number it."""
    def err(code, msg, loc=None):
        return EvaluationError("INPUT", f"instance document is not well-formed: {msg}", loc)

    return number_document(parse_xml(text, err, keep_whitespace=False))


# -- resource identifiers ----------------------------------------------------------

def node_iri(node: Node, document_iri: str = DEFAULT_DOCUMENT_IRI) -> str:
    if node.kind == "document":
        return document_iri
    steps = []
    cur: Optional[Node] = node
    while cur is not None and cur.kind == "element":
        steps.append(f"_{cur.name}.{cur.position()}")
        cur = cur.parent
    return document_iri + "#" + "".join(reversed(steps))


def path_to_iri(path: str, document_iri: str = DEFAULT_DOCUMENT_IRI) -> str:
    """Convert an ``fn:path`` result for an element or document node to its IRI."""
    if path == "/":
        return document_iri
    segs = []
    for part in path.strip("/").split("/"):
        m = _PATH_STEP.match(part)
        if not m:
            raise EvaluationError("SHAPE", f"not an element path: {path!r}")
        segs.append(f"_{m.group(1)}.{m.group(2)}")
    return document_iri + "#" + "".join(segs)


def iri_steps(iri: str, document_iri: str = DEFAULT_DOCUMENT_IRI) -> Optional[list[tuple[str, int]]]:
    """(name, position) steps of a resource IRI; [] for the document; None otherwise."""
    if iri == document_iri:
        return []
    prefix = document_iri + "#"
    if not iri.startswith(prefix):
        return None
    rest = iri[len(prefix):]
    steps = [(m.group(1), int(m.group(2))) for m in _SEGMENT.finditer(rest)]
    if "".join(f"_{n}.{k}" for n, k in steps) != rest or not steps:
        return None
    return steps


# -- vocabulary ----------------------------------------------------------------------

def datatype_iri(os: Optional[Ontology], property_id: str) -> Optional[str]:
    """Datatype of literals for a datatype property; None means a plain literal."""
    if os is None:
        return None
    prop = os.datatype_properties.get(property_id)
    if prop is None or len(prop.ranges) != 1:
        return None
    (rng,) = prop.ranges
    if rng in os.datatypes:
        rng = os.datatypes[rng].base
    full = expand(rng, os.base_iri)
    return None if full == XSD + "string" else full


def tbox_triples(os: Ontology) -> frozenset:
    """Named schema-level triples of ``os`` (class expressions and axioms are left out)."""
    out = set()

    def full(ident: str) -> IRI:
        return IRI(expand(ident, os.base_iri))

    for c in os.classes.values():
        out.add(Triple(full(c.id), IRI(RDF_TYPE), IRI(OWL + "Class")))
        for s in c.super_classes:
            out.add(Triple(full(c.id), IRI(RDFS + "subClassOf"), full(s)))
    for p in os.properties():
        kind = OWL + ("DatatypeProperty" if p.kind == "datatype" else "ObjectProperty")
        out.add(Triple(full(p.id), IRI(RDF_TYPE), IRI(kind)))
        for d in p.domains:
            out.add(Triple(full(p.id), IRI(RDFS + "domain"), full(d)))
        for r in p.ranges:
            out.add(Triple(full(p.id), IRI(RDFS + "range"), full(r)))
        for s in p.super_properties:
            out.add(Triple(full(p.id), IRI(RDFS + "subPropertyOf"), full(s)))
    for d in os.datatypes.values():
        out.add(Triple(full(d.id), IRI(RDF_TYPE), IRI(RDFS + "Datatype")))
    return frozenset(out)


# -- lifting ----------------------------------------------------------------------------

def mapped_nodes(doc: Node, ms: MappingSet, construct: str) -> list[Node]:
    """Nodes addressed by the mapping of ``construct``, in document order."""
    m = ms.get(construct)
    if m is None:
        return []
    interp = Interpreter()
    found: dict[int, Node] = {}
    for xp in m.xpath_set.parsed():
        for n in interp.eval(Path(Root(), xquery_steps(xp)), {}, _Focus(doc, 1, 1)):
            found[id(n)] = n
    return sorted(found.values(), key=lambda n: n.sort_key())


def xml_to_rdf(doc: Node, os: Optional[Ontology], ms: MappingSet,
               document_iri: str = DEFAULT_DOCUMENT_IRI, strict: bool = False,
               warnings: Optional[Warnings] = None, subproperty_closure: bool = False) -> frozenset:
    """Instance triples of ``doc``.

    With ``subproperty_closure`` every triple of a property is repeated for
    its transitive super-properties.  Elements and attributes no mapping
    reaches are UNMATCHED_NODE errors in strict mode and warnings otherwise.
    """
    base = ms.ontology_iri
    out: set = set()
    reached: set[int] = set()

    def supers(pid: str) -> list[str]:
        if not subproperty_closure or os is None:
            return [pid]
        found, frontier = [pid], [pid]
        while frontier:
            prop = os.property(frontier.pop())
            for s in sorted(prop.super_properties) if prop else ():
                if s not in found and s != OWL_THING:
                    found.append(s)
                    frontier.append(s)
        return found

    for cid in ms.ids():
        m = ms.get(cid)
        nodes = mapped_nodes(doc, ms, cid)
        reached.update(id(n) for n in nodes)
        for n in nodes:
            if m.kind == "class":
                if n.kind == "element":
                    out.add(Triple(IRI(node_iri(n, document_iri)), IRI(RDF_TYPE),
                                   IRI(expand(cid, base))))
                continue
            subject = IRI(node_iri(n.parent, document_iri))
            for pid in supers(cid):
                if m.kind == "op":
                    obj = IRI(node_iri(n, document_iri))
                else:
                    obj = Lit(n.string_value(), datatype_iri(os, pid))
                out.add(Triple(subject, IRI(expand(pid, base)), obj))

    for n in doc.iter():
        candidates = [n] if n.kind == "element" else []
        if n.kind == "element":
            candidates += [a for a in n.attributes if not a.name.startswith(("xmlns", "xsi:"))]
        for c in candidates:
            if id(c) not in reached:
                where = "/" + "/".join(c.name_path())
                err = EvaluationError("UNMATCHED_NODE", f"no mapping reaches {where}",
                                      f"line {c.line}" if c.line else None)
                if strict:
                    raise err
                if warnings is not None:
                    warnings.add(err)
    return frozenset(out)


def dataset(doc: Node, os: Optional[Ontology], ms: MappingSet,
            document_iri: str = DEFAULT_DOCUMENT_IRI, strict: bool = False,
            warnings: Optional[Warnings] = None, subproperty_closure: bool = False) -> frozenset:
    """Instance triples plus the TBox triples of ``os``; what queries are answered against."""
    triples = xml_to_rdf(doc, os, ms, document_iri, strict, warnings, subproperty_closure)
    if os is not None:
        triples = triples | tbox_triples(os)
    return triples


# -- N-Triples style output ------------------------------------------------------------

def term_text(t) -> str:
    if isinstance(t, IRI):
        return f"<{t.value}>"
    body = '"' + escape_string(t.lexical) + '"'
    if t.lang:
        return f"{body}@{t.lang}"
    if t.datatype:
        return f"{body}^^<{t.datatype}>"
    return body


def serialize_triples(triples) -> str:
    """One ``<s> <p> <o> .`` line per triple, sorted; valid Turtle and N-Triples."""
    lines = sorted(f"{term_text(t.s)} {term_text(t.p)} {term_text(t.o)} ." for t in triples)
    return "\n".join(lines) + ("\n" if lines else "")


_NT_TERM = re.compile(r'\s*(<[^>]*>|"(?:[^"\\]|\\.)*"(?:@[A-Za-z0-9-]+|\^\^<[^>]*>)?)')
_UNESCAPE = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\"}


def _parse_term(text: str):
    if text.startswith("<"):
        return IRI(text[1:-1])
    end = text.rindex('"')
    body = re.sub(r"\\(.)", lambda m: _UNESCAPE.get(m.group(1), m.group(1)), text[1:end])
    rest = text[end + 1:]
    if rest.startswith("@"):
        return Lit(body, None, rest[1:])
    if rest.startswith("^^"):
        return Lit(body, rest[3:-1])
    return Lit(body)


def parse_triples(text: str) -> frozenset:
    """Read the output of ``serialize_triples``."""
    out = set()
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        terms, pos = [], 0
        for _ in range(3):
            m = _NT_TERM.match(line, pos)
            if not m:
                raise BridgeError("SYNTAX", f"bad triple line: {line!r}", f"line {n}")
            terms.append(_parse_term(m.group(1)))
            pos = m.end()
        if line[pos:].strip() != ".":
            raise BridgeError("SYNTAX", f"triple line must end with '.': {line!r}", f"line {n}")
        out.add(Triple(*terms))
    return frozenset(out)


__all__ = [
    "DEFAULT_DOCUMENT_IRI", "dataset", "datatype_iri", "iri_steps", "load_instance", "mapped_nodes",
    "node_iri", "parse_triples", "path_to_iri", "serialize_triples", "tbox_triples", "term_text",
    "xml_to_rdf",
]
