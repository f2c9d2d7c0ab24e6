"""Mappings between ontology constructs and sets of absolute XPath expressions.

A mapping associates one class or property with the XPath expressions that
address its occurrences in instance documents.  Generated mappings follow the
schema structure exactly; hand-written ones may carry bracketed predicates,
which are kept verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .errors import MappingError, Warnings, XQueryError
from .owl_model import Ontology, compact, is_full_iri
from .xmltree import escape_attr, escape_text, parse_xml
from .xs2owl import make_class_id, property_id
from .xsd_model import XsdSchema
from .xsd_paths import PathCatalog, decl_key

MAPPINGS_NS = "urn:xmlsem-bridge:mappings:v1"
KINDS = ("class", "dtp", "op")
_ONTOLOGY_KINDS = {"class": "class", "datatype property": "dtp", "object property": "op"}

GENERATOR_NOTE = (
    f"generated by xmlsem-bridge {__version__}; property paths follow the schema nesting, "
    "so elements declared inside Reviews_Type are addressed through their Reviews parent"
)


# -- XPath model ---------------------------------------------------------------

@dataclass(frozen=True)
class XStep:
    axis: str  # child | attribute
    name: str
    predicates: tuple = ()  # predicate bodies, verbatim

    @property
    def text(self) -> str:
        head = ("@" if self.axis == "attribute" else "") + self.name
        return head + "".join(f"[{p}]" for p in self.predicates)


@dataclass(frozen=True)
class XPath:
    steps: tuple

    @property
    def text(self) -> str:
        return "/" + "/".join(s.text for s in self.steps)

    @property
    def last(self) -> XStep:
        return self.steps[-1]

    def plain(self) -> "XPath":
        """The same path with every predicate removed."""
        return XPath(tuple(XStep(s.axis, s.name) for s in self.steps))

    def __str__(self) -> str:
        return self.text


def _split_steps(text: str) -> list[tuple[str, list[str]]]:
    """Split ``text`` on top-level slashes into (step head, [predicates])."""
    steps: list[tuple[str, list[str]]] = []
    head: list[str] = []
    preds: list[str] = []
    depth, quote, start = 0, "", 0
    for i, c in enumerate(text):
        if quote:
            if c == quote:
                quote = ""
            continue
        if depth and c in "\"'":
            quote = c
        elif c == "[":
            if depth == 0:
                start = i + 1
            depth += 1
        elif c == "]":
            depth -= 1
            if depth < 0:
                raise MappingError("SYNTAX", f"unbalanced ']' in {text!r}")
            if depth == 0:
                preds.append(text[start:i])
        elif depth == 0:
            if c == "/":
                steps.append(("".join(head).strip(), preds))
                head, preds = [], []
            else:
                if preds and not c.isspace():
                    raise MappingError("SYNTAX", f"text after a predicate in {text!r}")
                head.append(c)
    if depth or quote:
        raise MappingError("SYNTAX", f"unbalanced brackets or quotes in {text!r}")
    steps.append(("".join(head).strip(), preds))
    return steps


def parse_xpath(text: str) -> XPath:
    """Parse an absolute child/attribute path with optional predicates."""
    from .xquery import parse_expression

    parts = _split_steps(text.strip())
    if not parts or parts[0] != ("", []):
        raise MappingError("SYNTAX", f"XPath must be absolute: {text!r}")
    steps = []
    for i, (head, preds) in enumerate(parts[1:]):
        axis = "attribute" if head.startswith("@") else "child"
        name = head[1:].strip() if axis == "attribute" else head
        if not _is_name(name):
            raise MappingError("SYNTAX", f"bad step {head!r} in {text!r}")
        if axis == "attribute" and i != len(parts) - 2:
            raise MappingError("SYNTAX", f"attribute step must be last in {text!r}")
        for p in preds:
            try:
                parse_expression(p)
            except XQueryError as exc:
                raise MappingError("SYNTAX", f"predicate [{p}] in {text!r}: {exc.message}") from None
        steps.append(XStep(axis, name, tuple(preds)))
    if not steps:
        raise MappingError("SYNTAX", f"empty XPath {text!r}")
    return XPath(tuple(steps))


def _is_name(s: str) -> bool:
    if not s:
        return False
    parts = s.split(":")
    return len(parts) <= 2 and all(
        p and (p[0].isalpha() or p[0] == "_") and all(ch.isalnum() or ch in "_.-" for ch in p)
        for p in parts)


def canonical_xpath(text: str) -> str:
    return parse_xpath(text).text


_PREDICATE_CACHE: dict = {}


def xquery_steps(xp: XPath) -> tuple:
    """The XQuery AST steps of ``xp``; predicates are parsed once and cached."""
    from .xquery import parse_expression
    from .xquery.ast import Step

    steps = []
    for s in xp.steps:
        preds = []
        for p in s.predicates:
            if p not in _PREDICATE_CACHE:
                _PREDICATE_CACHE[p] = parse_expression(p)
            preds.append(_PREDICATE_CACHE[p])
        steps.append(Step(s.axis, s.name, tuple(preds)))
    return tuple(steps)


# -- mapping model ----------------------------------------------------------------

@dataclass(frozen=True)
class XPathSet:
    paths: tuple  # canonical path strings, sorted, no duplicates

    def __post_init__(self):
        if not self.paths:
            raise MappingError("SYNTAX", "an XPath set must not be empty")
        object.__setattr__(self, "paths", tuple(sorted(set(self.paths))))

    @classmethod
    def of(cls, paths) -> "XPathSet":
        return cls(tuple(canonical_xpath(p) for p in paths))

    def parsed(self) -> list[XPath]:
        return [parse_xpath(p) for p in self.paths]

    def __iter__(self):
        return iter(self.paths)

    def __len__(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class Mapping:
    construct: str
    kind: str  # class | dtp | op
    xpath_set: XPathSet

    def __post_init__(self):
        if self.kind not in KINDS:
            raise MappingError("SYNTAX", f"unknown mapping kind {self.kind!r}")
        for p in self.xpath_set.parsed():
            if self.kind != "dtp" and p.last.axis == "attribute":
                raise MappingError("INVALID_MAPPING",
                                   f"{self.kind} mapping {self.construct} ends in an attribute step",
                                   p.text)


@dataclass(frozen=True)
class MappingSet:
    ontology_iri: str
    schema_namespace: str
    mappings: dict = field(default_factory=dict)  # construct id -> Mapping; never mutated
    notes: tuple = ()

    def get(self, construct: str) -> Optional[Mapping]:
        return self.mappings.get(construct)

    def ids(self, kind: Optional[str] = None) -> list[str]:
        return sorted(k for k, m in self.mappings.items() if kind is None or m.kind == kind)

    def __len__(self) -> int:
        return len(self.mappings)


def normalize_construct(ident: str, ontology_iri: str) -> str:
    """Ontology-local id for ``ns:Name``, a full IRI in the ontology, or a bare name."""
    if ident.startswith("ns:"):
        return ident[3:]
    if is_full_iri(ident):
        return compact(ident, ontology_iri)
    return ident


# -- generation -----------------------------------------------------------------

def generate_mappings(schema: XsdSchema, os: Ontology, catalog: PathCatalog) -> MappingSet:
    """Map every class and property of the schema ontology to its instance paths."""
    found: dict[str, tuple[str, set]] = {}

    def add(construct: str, kind: str, paths) -> None:
        actual = _ONTOLOGY_KINDS.get(os.kind_of(construct) or "")
        if actual is None:
            raise MappingError("INCONSISTENT_INPUT",
                               f"{construct} is derived from the schema but missing from the ontology")
        if actual != kind:
            raise MappingError("INCONSISTENT_INPUT",
                               f"{construct} is a {kind} for the schema but a {actual} in the ontology")
        if paths:
            found.setdefault(construct, (kind, set()))[1].update(paths)

    for key, ct in schema.complex_types.items():
        add(make_class_id(ct), "class", catalog.class_paths.get(key, ()))
    for dk, paths in catalog.decl_paths.items():
        decl = _declaration(schema, dk)
        pid = property_id(schema, decl)
        is_object = dk[2] == "element" and decl.type_key in schema.complex_types
        add(pid, "op" if is_object else "dtp", paths)

    mappings = {cid: Mapping(cid, kind, XPathSet(tuple(sorted(paths))))
                for cid, (kind, paths) in sorted(found.items())}
    return MappingSet(os.base_iri, schema.target_namespace or "", mappings, (GENERATOR_NOTE,))


def _declaration(schema: XsdSchema, dk):
    from .xsd_paths import attribute_decls, child_slots

    ctx_kind, ctx_name, what, name = dk
    if ctx_kind == "top":
        table = schema.top_elements if what == "element" else schema.top_attributes
        return table[name]
    if what == "attribute":
        cands = [a for ct in schema.complex_types.values() for a in attribute_decls(schema, ct)]
    else:
        cands = [d for ct in schema.complex_types.values() for d, _, _ in child_slots(schema, ct)]
    for d in cands:
        if decl_key(d) == dk:
            return d
    raise MappingError("INCONSISTENT_INPUT", f"no declaration for {dk}")


# -- XML persistence -------------------------------------------------------------

def serialize_mappings(ms: MappingSet) -> str:
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    for note in ms.notes:
        out.append(f"<!-- {note.replace('--', '- -')} -->")
    out.append(f'<mappings xmlns="{MAPPINGS_NS}" ontology="{escape_attr(ms.ontology_iri)}" '
               f'schemaNamespace="{escape_attr(ms.schema_namespace)}">')
    for cid in sorted(ms.mappings):
        m = ms.mappings[cid]
        out.append(f'  <mapping construct="{escape_attr(cid)}" kind="{m.kind}">')
        for p in m.xpath_set.paths:
            out.append(f"    <xpath>{escape_text(p)}</xpath>")
        out.append("  </mapping>")
    out.append("</mappings>")
    return "\n".join(out) + "\n"


def _mapping_error(code: str, message: str, location: Optional[str] = None) -> MappingError:
    if code == "WELL_FORMEDNESS":
        code = "SYNTAX"
    return MappingError(code, message, location)


def parse_mappings(text: str, ontology: Optional[Ontology] = None, strict: bool = True,
                   warnings: Optional[Warnings] = None) -> MappingSet:
    """Read a mapping document.

    With an ``ontology`` every construct is checked against it: unknown ids
    are UNKNOWN_CONSTRUCT errors in strict mode and warnings (the mapping is
    dropped) otherwise, which suits partially mapped existing ontologies.
    """
    doc = parse_xml(text, _mapping_error, keep_whitespace=False)
    root = doc.document_element()
    if root.name != "mappings" or root.ns != MAPPINGS_NS:
        raise MappingError("SYNTAX", f"root element must be {{{MAPPINGS_NS}}}mappings",
                           f"line {root.line}")
    ontology_iri = root.get("ontology")
    if ontology_iri is None:
        raise MappingError("SYNTAX", "missing ontology attribute", f"line {root.line}")
    notes = tuple(c.value.strip() for c in doc.children if c.kind == "comment")
    mappings: dict[str, Mapping] = {}
    for el in root.children:
        if el.kind == "text":
            raise MappingError("SYNTAX", "unexpected text in <mappings>", f"line {root.line}")
        if el.name != "mapping" or el.ns != MAPPINGS_NS:
            raise MappingError("SYNTAX", f"unexpected element <{el.name}>", f"line {el.line}")
        raw = el.get("construct")
        kind = el.get("kind")
        if not raw or kind not in KINDS:
            raise MappingError("SYNTAX", "mapping needs construct and kind (class|dtp|op)",
                               f"line {el.line}")
        cid = normalize_construct(raw, ontology_iri)
        paths = []
        for x in el.children:
            if x.kind != "element" or x.name != "xpath" or x.ns != MAPPINGS_NS:
                raise MappingError("SYNTAX", "a mapping holds only <xpath> elements", f"line {el.line}")
            try:
                paths.append(canonical_xpath(x.string_value()))
            except MappingError as exc:
                raise MappingError(exc.code, exc.message, f"line {x.line}") from None
        if not paths:
            raise MappingError("SYNTAX", f"mapping {raw} has no <xpath>", f"line {el.line}")
        if cid in mappings:
            raise MappingError("SYNTAX", f"second mapping for {raw}", f"line {el.line}")
        if ontology is not None:
            actual = _ONTOLOGY_KINDS.get(ontology.kind_of(cid) or "")
            if actual is None:
                err = MappingError("UNKNOWN_CONSTRUCT", f"{raw} is not in the ontology",
                                   f"line {el.line}")
                if strict:
                    raise err
                if warnings is not None:
                    warnings.add(err)
                continue
            if actual != kind:
                raise MappingError("INVALID_MAPPING", f"{raw} is a {actual}, not {kind}",
                                   f"line {el.line}")
        try:
            mappings[cid] = Mapping(cid, kind, XPathSet(tuple(paths)))
        except MappingError as exc:
            raise MappingError(exc.code, exc.message, f"line {el.line}") from None
    return MappingSet(ontology_iri, root.get("schemaNamespace", ""), dict(sorted(mappings.items())),
                      notes)


# -- resolution --------------------------------------------------------------------

def resolve_property_paths(ms: MappingSet, os: Optional[Ontology], property_id: str) -> XPathSet:
    """Paths of ``property_id`` together with those of its transitive sub-properties."""
    ids = [property_id] + (os.sub_properties(property_id) if os is not None else [])
    paths: list[str] = []
    for pid in ids:
        m = ms.get(pid)
        if m is not None and m.kind != "class":
            paths.extend(m.xpath_set.paths)
    if not paths:
        raise MappingError("UNMAPPED_CONSTRUCT", f"property {property_id} has no mapped paths")
    return XPathSet(tuple(paths))


__all__ = [
    "GENERATOR_NOTE", "MAPPINGS_NS", "Mapping", "MappingSet", "XPath", "XPathSet", "XStep",
    "canonical_xpath", "generate_mappings", "normalize_construct", "parse_mappings", "parse_xpath",
    "resolve_property_paths", "serialize_mappings", "xquery_steps",
]
