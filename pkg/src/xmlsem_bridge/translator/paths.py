"""Path algebra used while binding variables to instance paths.

Paths are compared on their predicate-free form; predicates from different
sources (a class mapping, a property mapping) are merged step by step.
"""

from __future__ import annotations

import functools
from typing import Optional

from ..errors import TranslationError
from ..mapping import XPath, XStep
from ..xquery import parse_expression
from ..xquery.ast import Step

DOCUMENT = XPath(())


def parent(xp: XPath) -> XPath:
    return XPath(xp.steps[:-1])


def plain_key(xp: XPath) -> str:
    return xp.plain().text if xp.steps else "/"


def unify(a: XPath, b: XPath) -> Optional[XPath]:
    """The path matching exactly what both ``a`` and ``b`` match, or None."""
    if len(a.steps) != len(b.steps):
        return None
    steps = []
    for x, y in zip(a.steps, b.steps):
        if (x.axis, x.name) != (y.axis, y.name):
            return None
        preds = list(x.predicates) + [p for p in y.predicates if p not in x.predicates]
        steps.append(XStep(x.axis, x.name, tuple(preds)))
    return XPath(tuple(steps))


def _positional(pred: str) -> bool:
    return pred.strip().isdigit()


def merge_overlapping(paths: list[XPath]) -> list[XPath]:
    """Merge paths with equal plain form so that no node is reached twice.

    Paths that differ in the predicates of a single step are merged into one
    path with an ``or`` predicate there; anything else is unsupported.
    """
    groups: dict[str, list[XPath]] = {}
    for p in paths:
        group = groups.setdefault(plain_key(p), [])
        if p not in group:
            group.append(p)
    out = []
    for group in groups.values():
        out.append(group[0] if len(group) == 1 else _or_merge(group))
    return out


def _or_merge(group: list[XPath]) -> XPath:
    differing = {i for p in group[1:] for i, (x, y) in enumerate(zip(group[0].steps, p.steps))
                 if x.predicates != y.predicates}
    if len(differing) != 1:
        raise TranslationError("UNSUPPORTED_FEATURE",
                               "overlapping mapping paths differ in more than one step: "
                               + ", ".join(p.text for p in group))
    (i,) = differing
    alternatives = []
    for p in group:
        preds = p.steps[i].predicates
        if any(_positional(q) for q in preds):
            raise TranslationError("UNSUPPORTED_FEATURE",
                                   "overlapping mapping paths with positional predicates: "
                                   + ", ".join(q.text for q in group))
        if not preds:
            alternatives = None
            break
        alternatives.append(" and ".join(f"({q})" for q in preds) if len(preds) > 1 else preds[0])
    step = group[0].steps[i]
    merged = () if alternatives is None else (" or ".join(f"({a})" for a in alternatives),)
    steps = list(group[0].steps)
    steps[i] = XStep(step.axis, step.name, merged)
    return XPath(tuple(steps))


def unify_sets(a: Optional[list[XPath]], b: list[XPath]) -> list[XPath]:
    if a is None:
        return merge_overlapping(list(b))
    out = []
    for x in a:
        for y in b:
            u = unify(x, y)
            if u is not None:
                out.append(u)
    return merge_overlapping(out)


@functools.lru_cache(maxsize=None)
def predicate_ast(text: str):
    return parse_expression(text)


def ast_step(s: XStep, extra: tuple = ()) -> Step:
    return Step(s.axis, s.name, tuple(predicate_ast(p) for p in s.predicates) + tuple(extra))


def ast_steps(xp: XPath) -> tuple:
    return tuple(ast_step(s) for s in xp.steps)


def relative(parent_path: XPath, child_path: XPath) -> tuple[tuple, XStep]:
    """(predicates to add on the parent binding, last step) to reach ``child_path``.

    Predicates the child path puts on steps above its parent's own level
    cannot be expressed from a bound parent variable.
    """
    n = len(parent_path.steps)
    for i in range(n - 1):
        if not set(child_path.steps[i].predicates) <= set(parent_path.steps[i].predicates):
            raise TranslationError(
                "UNSUPPORTED_FEATURE",
                f"predicate on an ancestor step of {child_path.text} relative to {parent_path.text}")
    extra: tuple = ()
    if n:
        own = parent_path.steps[n - 1].predicates
        extra = tuple(p for p in child_path.steps[n - 1].predicates if p not in own)
    return extra, child_path.last


def positional_path(steps: list[tuple[str, int]]) -> XPath:
    return XPath(tuple(XStep("child", name, (str(pos),)) for name, pos in steps))


__all__ = [
    "DOCUMENT", "ast_step", "ast_steps", "merge_overlapping", "parent", "plain_key",
    "positional_path", "predicate_ast", "relative", "unify", "unify_sets",
]
