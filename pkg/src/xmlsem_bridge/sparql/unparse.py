"""Debug printer: SPARQL text that parses back to an equal Query.

Every sub-pattern is printed as its own group so the parser rebuilds the
same tree; IRIs are always written in full.
"""

from __future__ import annotations

from .algebra import (
    BGP, BinOp, Call, Filter, IRI, Join, Lit, Neg, Not, Optional_, Query, Triple, Union_, Var,
)


def unparse_expr(e) -> str:
    if isinstance(e, (Var, IRI, Lit)):
        return str(e)
    if isinstance(e, BinOp):
        return f"({unparse_expr(e.left)} {e.op} {unparse_expr(e.right)})"
    if isinstance(e, Not):
        return f"!({unparse_expr(e.operand)})"
    if isinstance(e, Neg):
        return f"-({unparse_expr(e.operand)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(unparse_expr(a) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def _triple(t: Triple) -> str:
    return f"{t.s} {t.p} {t.o} ."


def unparse_pattern(p, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(p, BGP):
        if not p.triples:
            return "{ }"
        body = "\n".join(inner + _triple(t) for t in p.triples)
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(p, Join):
        return ("{\n" + inner + unparse_pattern(p.left, indent + 1) + "\n"
                + inner + unparse_pattern(p.right, indent + 1) + "\n" + pad + "}")
    if isinstance(p, Union_):
        return ("{\n" + inner + unparse_pattern(p.left, indent + 1) + "\n"
                + inner + "UNION " + unparse_pattern(p.right, indent + 1) + "\n" + pad + "}")
    if isinstance(p, Optional_):
        return ("{\n" + inner + unparse_pattern(p.left, indent + 1) + "\n"
                + inner + "OPTIONAL " + unparse_pattern(p.right, indent + 1) + "\n" + pad + "}")
    if isinstance(p, Filter):
        return ("{\n" + inner + unparse_pattern(p.inner, indent + 1) + "\n"
                + inner + f"FILTER ({unparse_expr(p.expr)})" + "\n" + pad + "}")
    raise TypeError(f"not a graph pattern: {p!r}")


def unparse(q: Query) -> str:
    lines = []
    if q.base is not None:
        lines.append(f"BASE <{q.base}>")
    for prefix, iri in q.prefixes:
        lines.append(f"PREFIX {prefix}: <{iri}>")
    if q.form == "SELECT":
        head = "SELECT"
        if q.distinct:
            head += " " + q.distinct
        head += " " + (" ".join(str(v) for v in q.projection) if q.projection is not None else "*")
        lines.append(head)
    elif q.form == "CONSTRUCT":
        lines.append("CONSTRUCT {")
        lines.extend("  " + _triple(t) for t in q.template)
        lines.append("}")
    elif q.form == "DESCRIBE":
        lines.append("DESCRIBE " + (" ".join(str(t) for t in q.describe) or "*"))
    else:
        lines.append("ASK")
    lines.append("WHERE " + unparse_pattern(q.pattern))
    m = q.modifiers
    if m.order_by:
        keys = " ".join(("DESC" if c.descending else "ASC") + f"({unparse_expr(c.expr)})"
                        for c in m.order_by)
        lines.append("ORDER BY " + keys)
    if m.limit is not None:
        lines.append(f"LIMIT {m.limit}")
    if m.offset is not None:
        lines.append(f"OFFSET {m.offset}")
    return "\n".join(lines) + "\n"


__all__ = ["unparse", "unparse_expr", "unparse_pattern"]
