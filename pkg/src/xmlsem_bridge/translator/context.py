"""Translation context: mappings, optional ontology and schema hints, options."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import MappingError, TranslationError, Warnings
from ..mapping import MappingSet, XPath, parse_xpath, resolve_property_paths
from ..owl_model import Ontology
from ..rdf import DEFAULT_DOCUMENT_IRI, datatype_iri, tbox_triples
from ..sparql.algebra import IRI, OWL, RDF_TYPE, RDFS
from ..xsd_paths import PathCatalog

TBOX_PREDICATES = frozenset(RDFS + p for p in ("subClassOf", "subPropertyOf", "domain", "range"))
SCHEMA_OBJECTS = frozenset({OWL + "Class", OWL + "DatatypeProperty", OWL + "ObjectProperty",
                            RDFS + "Datatype"})


@dataclass
class TranslationContext:
    """Everything the translator needs besides the query.

    ``single_valued`` holds plain instance paths known to occur at most once
    under their parent (from the schema's occurrence bounds); attribute
    paths are always single-valued.  Without an ontology literal datatypes
    are unknown and comparisons are emitted without static checks.
    """

    mappings: MappingSet
    ontology: Optional[Ontology] = None
    source_kind: str = "collection"  # collection | doc
    source_uri: str = "videos"
    single_valued: frozenset = frozenset()
    strict: bool = False
    subproperty_closure: bool = False
    document_iri: str = DEFAULT_DOCUMENT_IRI
    warnings: Warnings = field(default_factory=Warnings)

    def __post_init__(self):
        self._paths: dict = {}
        self._tbox = None

    @classmethod
    def build(cls, mappings: MappingSet, ontology: Optional[Ontology] = None,
              catalog: Optional[PathCatalog] = None, **options) -> "TranslationContext":
        hints = frozenset()
        if catalog is not None:
            hints = frozenset(p for p in catalog.paths if catalog.single_valued(p))
        return cls(mappings, ontology, single_valued=hints, **options)

    # -- vocabulary -------------------------------------------------------------

    def local(self, iri: str) -> Optional[str]:
        base = self.mappings.ontology_iri
        if iri.startswith(base) and len(iri) > len(base):
            return iri[len(base):]
        return None

    def full(self, ident: str) -> IRI:
        return IRI(self.mappings.ontology_iri + ident)

    def kind(self, ident: str) -> Optional[str]:
        m = self.mappings.get(ident)
        return m.kind if m is not None else None

    def declared(self, ident: str) -> Optional[str]:
        """class | dtp | op as declared by the ontology, None when unknown."""
        if self.ontology is None:
            return None
        k = self.ontology.kind_of(ident)
        return {"class": "class", "datatype property": "dtp", "object property": "op"}.get(k or "")

    def property_kind(self, ident: str) -> Optional[str]:
        """dtp | op for a property the translator can answer, else None.

        With the sub-property closure a property is answerable through its
        mapped sub-properties even when it has no mapping of its own.
        """
        kind = self.kind(ident)
        if kind in ("dtp", "op"):
            return kind
        if kind is None and self.subproperty_closure and self.declared(ident) in ("dtp", "op"):
            return self.declared(ident) if self.paths(ident) else None
        return None

    def paths(self, ident: str) -> list[XPath]:
        """Instance paths of a mapped construct (sub-properties included when closed)."""
        if ident not in self._paths:
            m = self.mappings.get(ident)
            kind = m.kind if m is not None else self.declared(ident)
            if kind in ("dtp", "op") and self.subproperty_closure and self.ontology is not None:
                try:
                    found = resolve_property_paths(self.mappings, self.ontology, ident).parsed()
                except MappingError:
                    found = []
                self._paths[ident] = found
            elif m is None:
                self._paths[ident] = []
            else:
                self._paths[ident] = m.xpath_set.parsed()
        return self._paths[ident]

    def datatype(self, pid: str) -> tuple[bool, Optional[str]]:
        """(known, datatype IRI) of the literals of datatype property ``pid``."""
        if self.ontology is None:
            return False, None
        return True, datatype_iri(self.ontology, pid)

    def is_single(self, xp: XPath) -> bool:
        return xp.last.axis == "attribute" or xp.plain().text in self.single_valued

    def tbox(self) -> frozenset:
        if self._tbox is None:
            self._tbox = tbox_triples(self.ontology) if self.ontology is not None else frozenset()
        return self._tbox

    def all_constructs(self, kind: str) -> list[str]:
        return self.mappings.ids(kind)

    # -- strictness -------------------------------------------------------------

    def problem(self, code: str, message: str) -> None:
        """Raise in strict mode, record a warning otherwise."""
        err = TranslationError(code, message)
        if self.strict:
            raise err
        self.warnings.add(err)


def hint_paths(texts) -> frozenset:
    return frozenset(parse_xpath(t).plain().text for t in texts)


__all__ = ["RDF_TYPE", "SCHEMA_OBJECTS", "TBOX_PREDICATES", "TranslationContext", "hint_paths"]
