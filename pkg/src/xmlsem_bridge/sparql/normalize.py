"""Rewrite graph patterns into UNION normal form.

The result is a left-deep UNION of branches that contain no UNION except
inside the right operand of an OPTIONAL.  A union on the right of OPTIONAL
cannot be distributed (the left-outer-join would keep unmatched rows once
per branch), so it stays in place and is itself normalized.
"""

from __future__ import annotations

from .algebra import BGP, Filter, Join, Optional_, Pattern, Union_, make_union


def _join_operands(p: Pattern) -> list[Pattern]:
    if isinstance(p, Join):
        return _join_operands(p.left) + _join_operands(p.right)
    return [p]


def _merge_join(parts: list[Pattern]) -> Pattern:
    """Left-deep join of ``parts`` with adjacent BGPs merged and empty BGPs dropped."""
    flat: list[Pattern] = []
    for part in parts:
        flat.extend(_join_operands(part))
    merged: list[Pattern] = []
    for part in flat:
        if isinstance(part, BGP) and merged and isinstance(merged[-1], BGP):
            merged[-1] = BGP(merged[-1].triples + part.triples)
        else:
            merged.append(part)
    merged = [m for m in merged if m != BGP(())] or [BGP(())]
    out = merged[0]
    for m in merged[1:]:
        out = Join(out, m)
    return out


def _branches(p: Pattern) -> list[Pattern]:
    if isinstance(p, BGP):
        return [p]
    if isinstance(p, Union_):
        return _branches(p.left) + _branches(p.right)
    if isinstance(p, Join):
        return [_merge_join([a, b]) for a in _branches(p.left) for b in _branches(p.right)]
    if isinstance(p, Filter):
        return [Filter(b, p.expr) for b in _branches(p.inner)]
    if isinstance(p, Optional_):
        right = normalize(p.right)
        return [Optional_(b, right) for b in _branches(p.left)]
    raise TypeError(f"not a graph pattern: {p!r}")


def normalize(gp: Pattern) -> Pattern:
    """Equivalent pattern in UNION normal form; idempotent."""
    return make_union(_branches(gp))


def is_union_free(p: Pattern) -> bool:
    """True when ``p`` has no UNION outside OPTIONAL right operands."""
    if isinstance(p, Union_):
        return False
    if isinstance(p, BGP):
        return True
    if isinstance(p, Filter):
        return is_union_free(p.inner)
    if isinstance(p, Optional_):
        return is_union_free(p.left)
    return is_union_free(p.left) and is_union_free(p.right)


__all__ = ["is_union_free", "normalize"]
