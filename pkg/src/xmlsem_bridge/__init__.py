"""Bridge XML Schema data to OWL and SPARQL.

Transforms XML Schemas into OWL ontologies, maps ontology constructs to
XPath sets, translates SPARQL queries into XQuery and checks every
translation against a reference evaluator.
"""

__version__ = "0.1.0"
