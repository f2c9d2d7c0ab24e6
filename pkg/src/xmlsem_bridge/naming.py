"""Identifier conventions shared by the schema model and the XS2OWL rules."""

from __future__ import annotations


class NamingRule:
    """Separator and affix constants used to build ontology identifiers."""

    GROUP_SEPARATOR = "_"  # property name + "_" + enclosing model group
    TYPE_SEPARATOR = "__"  # ... + "__" + range type
    QNAME_SEPARATOR = "_"  # replaces ":" in prefixed type names
    ANON_PREFIX = "NS_"  # anonymous complex types: NS_<element>_UNType
    ANON_SUFFIX = "_UNType"
    ELEMENT_INFO_SUFFIX = "__ei"


def sanitize(name: str) -> str:
    return name.replace(":", NamingRule.QNAME_SEPARATOR)


def anonymous_type_id(host: str, context: str = "") -> str:
    """``NS_<host>_UNType``; ``context`` disambiguates same-named hosts."""
    core = f"{context}_{host}" if context else host
    return f"{NamingRule.ANON_PREFIX}{core}{NamingRule.ANON_SUFFIX}"
