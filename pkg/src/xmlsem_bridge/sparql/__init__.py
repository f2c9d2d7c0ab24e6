from .algebra import *  # noqa: F401,F403
from .algebra import __all__ as _algebra_all
from .normalize import is_union_free, normalize
from .parser import parse_query
from .unparse import unparse, unparse_expr, unparse_pattern

__all__ = list(_algebra_all) + ["is_union_free", "normalize", "parse_query", "unparse",
                                "unparse_expr", "unparse_pattern"]
