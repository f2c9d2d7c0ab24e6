"""SPARQL to XQuery translation driven by XPath mappings."""

from .context import TranslationContext
from .filters import compile_filter
from .patterns import PatternTranslator, alternatives, bind_variables, flatten, resolve_case
from .query import (
    Column, ResultShape, Translation, translate, translate_gp, translate_modifiers,
    translate_query,
)
from .types import process_schema_triples, specify_variable_types

__all__ = [
    "Column", "PatternTranslator", "ResultShape", "Translation", "TranslationContext",
    "alternatives", "bind_variables", "compile_filter", "flatten", "process_schema_triples",
    "resolve_case", "specify_variable_types", "translate", "translate_gp", "translate_modifiers",
    "translate_query",
]
