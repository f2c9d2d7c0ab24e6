"""Typed literal values shared by the SPARQL oracle and the XQuery interpreter.

Both evaluators parse lexical forms with the same functions and compare
values with the same promotion rules, so a difference between them points
at the translation rather than at two coercion tables drifting apart.
Float and double are both held as Python floats.
"""

from __future__ import annotations

import datetime as _dt
import re
from decimal import Decimal, InvalidOperation
from typing import Optional

XSD = "http://www.w3.org/2001/XMLSchema#"

INTEGER_TYPES = frozenset(
    XSD + t for t in (
        "integer", "int", "long", "short", "byte", "nonNegativeInteger", "positiveInteger",
        "negativeInteger", "nonPositiveInteger", "unsignedInt", "unsignedLong", "unsignedShort",
        "unsignedByte",
    ))
DECIMAL_TYPES = frozenset({XSD + "decimal"})
FLOAT_TYPES = frozenset({XSD + "float", XSD + "double"})
NUMERIC_TYPES = INTEGER_TYPES | DECIMAL_TYPES | FLOAT_TYPES
STRING_TYPES = frozenset({XSD + "string", XSD + "normalizedString", XSD + "token"})

_INTEGER = re.compile(r"^[+-]?\d+$")
_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")
_DOUBLE = re.compile(r"^([+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?|[+-]?INF|NaN)$")
_DATE = re.compile(r"^(-?\d{4,})-(\d\d)-(\d\d)(Z|[+-]\d\d:\d\d)?$")


class ValueError_(Exception):
    """A lexical form that is not valid for its datatype, or incomparable values."""


def category(datatype: Optional[str]) -> str:
    """numeric | string | boolean | date | other, for a datatype IRI (None = plain)."""
    if datatype is None or datatype in STRING_TYPES:
        return "string"
    if datatype in NUMERIC_TYPES:
        return "numeric"
    if datatype == XSD + "boolean":
        return "boolean"
    if datatype == XSD + "date":
        return "date"
    return "other"


def numeric_kind(datatype: str) -> str:
    if datatype in INTEGER_TYPES:
        return "integer"
    if datatype in DECIMAL_TYPES:
        return "decimal"
    return "double"


def parse_number(lexical: str, kind: str):
    s = lexical.strip()
    if kind == "integer":
        if not _INTEGER.match(s):
            raise ValueError_(f"{lexical!r} is not an integer")
        return int(s)
    if kind == "decimal":
        if not _DECIMAL.match(s):
            raise ValueError_(f"{lexical!r} is not a decimal")
        return Decimal(s)
    if not _DOUBLE.match(s):
        raise ValueError_(f"{lexical!r} is not a double")
    return float(s.replace("INF", "inf"))


def parse_boolean(lexical: str) -> bool:
    s = lexical.strip()
    if s in ("true", "1"):
        return True
    if s in ("false", "0"):
        return False
    raise ValueError_(f"{lexical!r} is not a boolean")


def parse_date(lexical: str) -> _dt.date:
    m = _DATE.match(lexical.strip())
    if not m:
        raise ValueError_(f"{lexical!r} is not a date")
    try:
        return _dt.date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError:
        raise ValueError_(f"{lexical!r} is not a date") from None


def typed_value(lexical: str, datatype: Optional[str]):
    """(category, python value) of a literal; raises ValueError_ when ill-typed."""
    cat = category(datatype)
    if cat == "string":
        return cat, lexical
    if cat == "numeric":
        return cat, parse_number(lexical, numeric_kind(datatype))
    if cat == "boolean":
        return cat, parse_boolean(lexical)
    if cat == "date":
        return cat, parse_date(lexical)
    return cat, (lexical, datatype)


def promote(a, b):
    """Apply numeric type promotion to two Python numbers."""
    if isinstance(a, float) or isinstance(b, float):
        return float(a), float(b)
    if isinstance(a, Decimal) or isinstance(b, Decimal):
        return Decimal(a), Decimal(b)
    return a, b


def compare(op: str, left, right) -> bool:
    """Compare two (category, value) pairs of the same category."""
    lc, lv = left
    rc, rv = right
    if lc != rc or lc == "other":
        raise ValueError_(f"cannot compare {lc} with {rc}")
    if lc == "numeric":
        lv, rv = promote(lv, rv)
    if op == "=":
        return lv == rv
    if op == "!=":
        return lv != rv
    if op == "<":
        return lv < rv
    if op == "<=":
        return lv <= rv
    if op == ">":
        return lv > rv
    if op == ">=":
        return lv >= rv
    raise ValueError_(f"unknown comparison {op}")


def arithmetic(op: str, a, b):
    a, b = promote(a, b)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op in ("/", "div"):
        if isinstance(a, float):
            if b == 0:
                if a == 0 or a != a:
                    return float("nan")
                return float("inf") if (a > 0) == (str(b)[0] != "-") else float("-inf")
            return a / b
        if b == 0:
            raise ValueError_("division by zero")
        return Decimal(a) / Decimal(b)
    raise ValueError_(f"unknown operator {op}")


def number_lexical(v) -> str:
    """Canonical-ish lexical form used when arithmetic results are printed."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Decimal):
        try:
            if v == v.to_integral_value():
                return str(v.quantize(Decimal(1)))
        except InvalidOperation:
            pass
        text = format(v.normalize(), "f")
        return text
    if v != v:
        return "NaN"
    if v in (float("inf"), float("-inf")):
        return "INF" if v > 0 else "-INF"
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


# -- regular expressions -------------------------------------------------------

_REGEX_CACHE: dict = {}


def compile_regex(pattern: str, flags: str = ""):
    """Compile an XPath/SPARQL regular expression with Python's ``re``."""
    key = (pattern, flags)
    if key in _REGEX_CACHE:
        return _REGEX_CACHE[key]
    f = 0
    for ch in flags:
        if ch == "i":
            f |= re.IGNORECASE
        elif ch == "s":
            f |= re.DOTALL
        elif ch == "m":
            f |= re.MULTILINE
        elif ch == "x":
            f |= re.VERBOSE
        else:
            raise ValueError_(f"unknown regex flag {ch!r}")
    try:
        rx = re.compile(pattern, f)
    except re.error as exc:
        raise ValueError_(f"bad regular expression {pattern!r}: {exc}") from None
    _REGEX_CACHE[key] = rx
    return rx


def regex_match(text: str, pattern: str, flags: str = "") -> bool:
    return compile_regex(pattern, flags).search(text) is not None
