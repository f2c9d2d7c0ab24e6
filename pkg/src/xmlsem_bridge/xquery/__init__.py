"""The XQuery subset emitted by the translator: AST, printer, parser."""

from .ast import *  # noqa: F401,F403
from .parser import parse_expression, parse_subset  # noqa: F401
from .printer import pretty_print  # noqa: F401
