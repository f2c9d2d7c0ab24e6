"""Error types shared by every stage of the bridge.

Each error carries a stable ``code`` string (for example ``UNRESOLVED_REF``)
so callers and the CLI can react to the kind of failure without parsing
messages.
"""

from __future__ import annotations

from typing import Optional


class BridgeError(Exception):
    """Base class. ``location`` is free-form (``line 12``, a path, a triple)."""

    def __init__(self, code: str, message: str, location: Optional[str] = None):
        self.code = code
        self.message = message
        self.location = location
        text = f"{code}: {message}"
        if location:
            text += f" ({location})"
        super().__init__(text)


class SchemaError(BridgeError):
    """Problems reading or walking an XML Schema."""


class OntologyError(BridgeError):
    """Problems building, reading or writing an ontology."""


class MappingError(BridgeError):
    """Problems with mapping documents or mapping generation."""


class SparqlError(BridgeError):
    """SPARQL syntax errors and unsupported SPARQL features."""


class XQueryError(BridgeError):
    """XQuery syntax and scoping problems."""


class TranslationError(BridgeError):
    """SPARQL to XQuery translation failures."""


class EvaluationError(BridgeError):
    """Runtime failures while evaluating queries or building RDF views."""


class Warnings:
    """Collects non-fatal diagnostics in lenient mode."""

    def __init__(self) -> None:
        self.items: list[BridgeError] = []

    def add(self, error: BridgeError) -> None:
        # the same diagnostic can come up once per pattern branch
        if all(str(e) != str(error) for e in self.items):
            self.items.append(error)

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def codes(self) -> list[str]:
        return [e.code for e in self.items]
