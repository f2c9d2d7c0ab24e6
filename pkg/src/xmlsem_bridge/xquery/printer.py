"""Deterministic pretty-printer for the XQuery subset.

FLWOR expressions are laid out one clause per line with two-space
indentation; everything else prints on one line.  Parentheses are added
where operator precedence needs them and around nested multi-line blocks.
"""

from __future__ import annotations

from ..errors import XQueryError
from .ast import (
    FLWOR, Arith, Comparison, ContextItem, ElementCtor, Enclosed, Filter, FnCall, For,
    IfThenElse, Let, Logical, Neg, NumberLit, OrderBy, Path, Program, Root, Sequence, Step,
    StringLit, Text, Union_, VarRef, Where,
)

INDENT = "  "


def _prec(e) -> int:
    if isinstance(e, (FLWOR, IfThenElse)):
        return 1
    if isinstance(e, Logical):
        return 2 if e.op == "or" else 3
    if isinstance(e, Comparison):
        return 4
    if isinstance(e, Arith):
        return 5 if e.op in ("+", "-") else 6
    if isinstance(e, Neg):
        return 7
    if isinstance(e, Union_):
        return 8
    if isinstance(e, (Path, Filter)):
        return 9
    return 10


def _string(s: str) -> str:
    return '"' + s.replace("&", "&amp;").replace('"', '""') + '"'


def _text(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace("{", "{{").replace("}", "}}"))


def _attr_value(s: str) -> str:
    return (s.replace("&", "&amp;").replace("<", "&lt;").replace('"', "&quot;")
            .replace("{", "{{").replace("}", "}}"))


def _wrap(text: str, own: int, needed: int) -> str:
    return f"({text})" if own < needed else text


# -- single-line form ------------------------------------------------------------

def inline(e, prec: int = 0) -> str:
    if isinstance(e, VarRef):
        return "$" + e.name
    if isinstance(e, ContextItem):
        return "."
    if isinstance(e, Root):
        return "/"
    if isinstance(e, StringLit):
        return _string(e.value)
    if isinstance(e, NumberLit):
        return e.lexical
    if isinstance(e, Path):
        return _wrap(_path(e), 9, prec)
    if isinstance(e, Filter):
        base = e.base
        b = inline(base, 10)
        if isinstance(base, Filter):
            b = f"({b})"
        return _wrap(b + "".join(f"[{inline(p)}]" for p in e.predicates), 9, prec)
    if isinstance(e, FnCall):
        return f"{e.name}({', '.join(inline(a, 1) for a in e.args)})"
    if isinstance(e, Comparison):
        return _wrap(f"{inline(e.left, 5)} {e.op} {inline(e.right, 5)}", 4, prec)
    if isinstance(e, Arith):
        own = _prec(e)
        return _wrap(f"{inline(e.left, own)} {e.op} {inline(e.right, own + 1)}", own, prec)
    if isinstance(e, Neg):
        return _wrap("-" + inline(e.operand, 7), 7, prec)
    if isinstance(e, Logical):
        own = _prec(e)
        return _wrap(f" {e.op} ".join(inline(o, own + 1) for o in e.operands), own, prec)
    if isinstance(e, Union_):
        return _wrap(" | ".join(inline(o, 9) for o in e.operands), 8, prec)
    if isinstance(e, Sequence):
        return "(" + ", ".join(inline(i, 1) for i in e.items) + ")"
    if isinstance(e, IfThenElse):
        text = f"if ({inline(e.cond)}) then {inline(e.then, 1)} else {inline(e.else_, 1)}"
        return _wrap(text, 1, prec)
    if isinstance(e, ElementCtor):
        return _ctor_inline(e)
    if isinstance(e, FLWOR):
        parts = [_clause_inline(c) for c in e.clauses] + [f"return {inline(e.ret, 1)}"]
        return _wrap(" ".join(parts), 1, prec)
    raise XQueryError("SYNTAX", f"cannot print {type(e).__name__}")


def _step(s: Step) -> str:
    head = ("@" if s.axis == "attribute" else "") + s.name
    return head + "".join(f"[{inline(p)}]" for p in s.predicates)


def _path(e: Path) -> str:
    steps = "/".join(_step(s) for s in e.steps)
    if e.start is None:
        return steps
    if isinstance(e.start, Root):
        return "/" + steps
    start = inline(e.start, 9)
    if isinstance(e.start, Path):
        start = f"({start})"
    return f"{start}/{steps}"


def _ctor_open(e: ElementCtor) -> str:
    attrs = "".join(f' {n}="{_attr_value(v)}"' for n, v in e.attributes)
    return f"<{e.name}{attrs}"


def _ctor_inline(e: ElementCtor) -> str:
    if not e.children:
        return _ctor_open(e) + "/>"
    out = [_ctor_open(e), ">"]
    for c in e.children:
        if isinstance(c, Text):
            out.append(_text(c.value))
        elif isinstance(c, Enclosed):
            out.append("{ " + inline(c.expr) + " }")
        else:
            out.append(_ctor_inline(c))
    out.append(f"</{e.name}>")
    return "".join(out)


def _order_spec(s) -> str:
    text = inline(s.expr, 1)
    if s.descending:
        text += " descending"
    return text + (" empty least" if s.empty_least else " empty greatest")


def _clause_inline(c) -> str:
    if isinstance(c, For):
        at = f" at ${c.at}" if c.at else ""
        return f"for ${c.var}{at} in {inline(c.source, 1)}"
    if isinstance(c, Let):
        return f"let ${c.var} := {inline(c.source, 1)}"
    if isinstance(c, Where):
        return f"where {inline(c.cond, 1)}"
    if isinstance(c, OrderBy):
        return "order by " + " , ".join(_order_spec(s) for s in c.specs)
    raise XQueryError("SYNTAX", f"unknown clause {type(c).__name__}")


# -- multi-line form ---------------------------------------------------------------

def _is_block(e) -> bool:
    if isinstance(e, FLWOR):
        return True
    if isinstance(e, Sequence):
        return any(_is_block(i) for i in e.items)
    if isinstance(e, FnCall):
        return any(_is_block(a) for a in e.args)
    if isinstance(e, IfThenElse):
        return _is_block(e.then) or _is_block(e.else_)
    if isinstance(e, ElementCtor):
        return any(isinstance(c, Enclosed) and _is_block(c.expr)
                   or isinstance(c, ElementCtor) and _is_block(c) for c in e.children)
    return False


def _indent(lines: list[str]) -> list[str]:
    return [INDENT + l for l in lines]


def _grouped(e) -> list[str]:
    """Lines of ``e`` enclosed in parentheses (sequences bring their own)."""
    if isinstance(e, Sequence):
        return _lines(e, 0)
    if not _is_block(e):
        return [f"({inline(e)})"] if _prec(e) < 10 else [inline(e)]
    return ["("] + _indent(_lines(e, 0)) + [")"]


def _attach(prefix: str, block: list[str]) -> list[str]:
    return [prefix + block[0]] + block[1:]


def _lines(e, prec: int) -> list[str]:
    if not _is_block(e):
        return [inline(e, prec)]
    if isinstance(e, FLWOR):
        out: list[str] = []
        for c in e.clauses:
            if isinstance(c, For) and _is_block(c.source):
                at = f" at ${c.at}" if c.at else ""
                out += _attach(f"for ${c.var}{at} in ", _grouped(c.source))
            elif isinstance(c, Let) and _is_block(c.source):
                out += _attach(f"let ${c.var} := ", _grouped(c.source))
            elif isinstance(c, Where) and _is_block(c.cond):
                out += _attach("where ", _grouped(c.cond))
            else:
                out.append(_clause_inline(c))
        if _is_block(e.ret):
            out += _attach("return ", _grouped(e.ret))
        else:
            out.append("return " + inline(e.ret, 1))
        if prec > 1:
            return ["("] + _indent(out) + [")"]
        return out
    if isinstance(e, Sequence):
        out = ["("]
        for i, item in enumerate(e.items):
            if i:
                out.append(INDENT + ",")
            out += _indent(_lines(item, 1))
        return out + [")"]
    if isinstance(e, FnCall):
        out = [e.name + "("]
        for i, a in enumerate(e.args):
            if i:
                out.append(INDENT + ",")
            out += _indent(_lines(a, 1))
        return out + [")"]
    if isinstance(e, IfThenElse):
        out = [f"if ({inline(e.cond)}) then ("]
        out += _indent(_lines(e.then, 1))
        out += [") else ("]
        out += _indent(_lines(e.else_, 1))
        out += [")"]
        if prec > 1:
            return ["("] + _indent(out) + [")"]
        return out
    if isinstance(e, ElementCtor):
        return _ctor_lines(e)
    return [inline(e, prec)]


def _ctor_lines(e: ElementCtor) -> list[str]:
    out: list[str] = []
    cur = _ctor_open(e) + ">"
    for c in e.children:
        if isinstance(c, Text):
            cur += _text(c.value)
        elif isinstance(c, Enclosed) and _is_block(c.expr):
            out.append(cur + "{")
            out += _indent(_lines(c.expr, 0))
            cur = "}"
        elif isinstance(c, Enclosed):
            cur += "{ " + inline(c.expr) + " }"
        elif _is_block(c):
            sub = _ctor_lines(c)
            out.append(cur + sub[0])
            out += sub[1:-1]
            cur = sub[-1]
        else:
            cur += _ctor_inline(c)
    out.append(cur + f"</{e.name}>")
    return out


# -- scoping -------------------------------------------------------------------------

def check_bound(e, scope: frozenset = frozenset()) -> None:
    """Raise UNBOUND_VARIABLE for any variable not bound by an enclosing clause."""
    if isinstance(e, VarRef):
        if e.name not in scope:
            raise XQueryError("UNBOUND_VARIABLE", f"${e.name} is not bound")
        return
    if isinstance(e, FLWOR):
        for c in e.clauses:
            if isinstance(c, For):
                check_bound(c.source, scope)
                scope = scope | {c.var} | ({c.at} if c.at else set())
            elif isinstance(c, Let):
                check_bound(c.source, scope)
                scope = scope | {c.var}
            elif isinstance(c, Where):
                check_bound(c.cond, scope)
            elif isinstance(c, OrderBy):
                for s in c.specs:
                    check_bound(s.expr, scope)
        check_bound(e.ret, scope)
        return
    for child in _children(e):
        check_bound(child, scope)


def _children(e):
    if isinstance(e, Path):
        out = [] if e.start is None else [e.start]
        for s in e.steps:
            out.extend(s.predicates)
        return out
    if isinstance(e, Filter):
        return [e.base, *e.predicates]
    if isinstance(e, FnCall):
        return list(e.args)
    if isinstance(e, (Comparison, Arith)):
        return [e.left, e.right]
    if isinstance(e, Neg):
        return [e.operand]
    if isinstance(e, (Logical, Union_)):
        return list(e.operands)
    if isinstance(e, Sequence):
        return list(e.items)
    if isinstance(e, IfThenElse):
        return [e.cond, e.then, e.else_]
    if isinstance(e, ElementCtor):
        return [c.expr if isinstance(c, Enclosed) else c for c in e.children
                if not isinstance(c, Text)]
    return []


def pretty_print(program) -> str:
    """Render ``program`` (a Program or bare expression) as XQuery text."""
    body = program.body if isinstance(program, Program) else program
    check_bound(body)
    return "\n".join(_lines(body, 0)) + "\n"
