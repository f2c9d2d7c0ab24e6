"""Reference interpreter for the XQuery subset.

Values are Python lists of items; an item is an ``xmltree.Node`` or an
``Atomic``.  Documents have no schema types, so atomizing a node yields
``xs:untypedAtomic`` and comparisons follow the general-comparison casting
rules.  Lexical parsing and numeric promotion come from ``values`` so the
SPARQL oracle and this interpreter agree on typed values.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import Optional

from .. import values as V
from ..errors import EvaluationError
from ..xmltree import Node, copy_node, number_document
from .ast import (
    Arith, Comparison, ElementCtor, Enclosed, FLWOR, Filter, FnCall, For,
    IfThenElse, Let, Logical, Neg, NumberLit, OrderBy, Path, Program, Sequence, Step,
    StringLit, Text, Union_, VarRef, Where,
)

FN_NS = "http://www.w3.org/2005/xpath-functions"


class Atomic:
    """An atomic value: ``type`` is untypedAtomic, string, integer, decimal, double, boolean or date."""

    __slots__ = ("type", "value")

    def __init__(self, type_: str, value):
        self.type = type_
        self.value = value

    def __repr__(self) -> str:
        return f"Atomic({self.type}, {self.value!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Atomic) and (self.type, self.value) == (other.type, other.value)

    def __hash__(self) -> int:
        return hash((self.type, str(self.value)))

    @property
    def lexical(self) -> str:
        if self.type in ("string", "untypedAtomic"):
            return self.value
        if self.type == "boolean":
            return "true" if self.value else "false"
        if self.type == "date":
            return self.value.isoformat()
        return V.number_lexical(self.value)


NUMERIC = ("integer", "decimal", "double")


def _err(code: str, msg: str) -> EvaluationError:
    return EvaluationError(code, msg)


def _type_error(msg: str) -> EvaluationError:
    return _err("RUNTIME_TYPE", msg)


# -- atomization and casting ----------------------------------------------------

def atomize(items: list) -> list[Atomic]:
    out = []
    for it in items:
        if isinstance(it, Node):
            out.append(Atomic("untypedAtomic", it.string_value()))
        else:
            out.append(it)
    return out


def cast(a: Atomic, target: str) -> Atomic:
    if a.type == target:
        return a
    if target == "string":
        return Atomic("string", a.lexical)
    if target == "untypedAtomic":
        return Atomic("untypedAtomic", a.lexical)
    try:
        if a.type in ("string", "untypedAtomic"):
            text = a.value
            if target in NUMERIC:
                return Atomic(target, V.parse_number(text, target))
            if target == "boolean":
                return Atomic("boolean", V.parse_boolean(text))
            if target == "date":
                return Atomic("date", V.parse_date(text))
        elif a.type in NUMERIC:
            if target == "integer":
                if isinstance(a.value, float) and (a.value != a.value or a.value in (float("inf"), float("-inf"))):
                    raise V.ValueError_("cannot cast a non-finite double to integer")
                return Atomic("integer", int(a.value))
            if target == "decimal":
                if isinstance(a.value, float) and (a.value != a.value or a.value in (float("inf"), float("-inf"))):
                    raise V.ValueError_("cannot cast a non-finite double to decimal")
                return Atomic("decimal", Decimal(str(a.value)) if isinstance(a.value, float) else Decimal(a.value))
            if target == "double":
                return Atomic("double", float(a.value))
            if target == "boolean":
                return Atomic("boolean", a.value != 0 and a.value == a.value)
        elif a.type == "boolean":
            if target in NUMERIC:
                return Atomic(target, {"integer": int, "decimal": Decimal, "double": float}[target](int(a.value)))
    except V.ValueError_ as exc:
        raise _type_error(f"cannot cast {a.lexical!r} to xs:{target}: {exc}") from None
    raise _type_error(f"cannot cast xs:{a.type} to xs:{target}")


def _category(a: Atomic) -> str:
    if a.type in NUMERIC:
        return "numeric"
    if a.type in ("string", "untypedAtomic"):
        return "string"
    return a.type


def _value_compare(op: str, a: Atomic, b: Atomic) -> bool:
    ca, cb = _category(a), _category(b)
    if ca != cb:
        raise _type_error(f"cannot compare xs:{a.type} with xs:{b.type}")
    return V.compare(op, (ca, a.value), (cb, b.value))


def _general_pair(op: str, a: Atomic, b: Atomic) -> bool:
    if a.type == "untypedAtomic" and b.type == "untypedAtomic":
        a, b = cast(a, "string"), cast(b, "string")
    elif a.type == "untypedAtomic":
        a = cast(a, "double" if b.type in NUMERIC else ("string" if b.type == "untypedAtomic" else b.type))
    elif b.type == "untypedAtomic":
        b = cast(b, "double" if a.type in NUMERIC else a.type)
    return _value_compare(op, a, b)


def general_compare(op: str, left: list, right: list) -> bool:
    la, ra = atomize(left), atomize(right)
    for a in la:
        for b in ra:
            if _general_pair(op, a, b):
                return True
    return False


def ebv(items: list) -> bool:
    """Effective boolean value."""
    if not items:
        return False
    first = items[0]
    if isinstance(first, Node):
        return True
    if len(items) > 1:
        raise _type_error("effective boolean value of a sequence of several atomic values")
    if first.type == "boolean":
        return first.value
    if first.type in ("string", "untypedAtomic"):
        return first.value != ""
    if first.type in NUMERIC:
        return first.value != 0 and first.value == first.value
    raise _type_error(f"no effective boolean value for xs:{first.type}")


def _single(items: list, what: str) -> Optional[Atomic]:
    atoms = atomize(items)
    if not atoms:
        return None
    if len(atoms) > 1:
        raise _type_error(f"{what} expects at most one item, got {len(atoms)}")
    return atoms[0]


def _string_arg(items: list, what: str) -> str:
    a = _single(items, what)
    return "" if a is None else a.lexical


def doc_order(nodes: list) -> list:
    seen = set()
    out = []
    for n in nodes:
        if id(n) not in seen:
            seen.add(id(n))
            out.append(n)
    out.sort(key=lambda n: n.sort_key())
    return out


def node_path(node: Node) -> str:
    """fn:path: ``/Q{}MultimediaContent[1]/Q{}Video[2]/@code``."""
    parts = []
    cur: Optional[Node] = node
    while cur is not None and cur.kind != "document":
        if cur.kind == "element":
            parts.append(f"Q{{{cur.ns}}}{cur.name}[{cur.position()}]")
        elif cur.kind == "attribute":
            parts.append("@" + cur.name)
        elif cur.kind == "text":
            k = [c for c in cur.parent.children if c.kind == "text"].index(cur) + 1
            parts.append(f"text()[{k}]")
        else:
            parts.append("node()")
        cur = cur.parent
    parts.reverse()
    if cur is None:
        return f"Q{{{FN_NS}}}root()" + "".join("/" + p for p in parts[1:])
    return "/" + "/".join(parts)


def deep_equal(a: list, b: list) -> bool:
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if isinstance(x, Node) != isinstance(y, Node):
            return False
        if isinstance(x, Node):
            if not _deep_node(x, y):
                return False
        else:
            try:
                if not _value_compare("=", _eq_form(x), _eq_form(y)):
                    return False
            except EvaluationError:
                return False
    return True


def _eq_form(a: Atomic) -> Atomic:
    return cast(a, "string") if a.type == "untypedAtomic" else a


def _deep_node(x: Node, y: Node) -> bool:
    if x.kind != y.kind or x.name != y.name or x.ns != y.ns:
        return False
    if x.kind in ("text", "attribute", "comment"):
        return x.value == y.value
    if x.kind == "element":
        if sorted((a.name, a.value) for a in x.attributes) != sorted((a.name, a.value) for a in y.attributes):
            return False
    xc = [c for c in x.children if c.kind != "comment"]
    yc = [c for c in y.children if c.kind != "comment"]
    return len(xc) == len(yc) and all(_deep_node(p, q) for p, q in zip(xc, yc))


# -- the evaluator --------------------------------------------------------------------

@dataclass
class _Focus:
    item: object
    position: int
    size: int


class Interpreter:
    def __init__(self, collections: Optional[dict] = None):
        self.collections = collections or {}

    def run(self, program) -> list:
        body = program.body if isinstance(program, Program) else program
        return self.eval(body, {}, None)

    # dispatch
    def eval(self, e, env: dict, focus: Optional[_Focus]) -> list:
        m = getattr(self, "_" + type(e).__name__)
        return m(e, env, focus)

    def _VarRef(self, e: VarRef, env, focus):
        try:
            return env[e.name]
        except KeyError:
            raise _err("RUNTIME", f"variable ${e.name} is not bound") from None

    def _ContextItem(self, e, env, focus):
        if focus is None:
            raise _err("RUNTIME", "the context item is undefined")
        return [focus.item]

    def _Root(self, e, env, focus):
        if focus is None or not isinstance(focus.item, Node):
            raise _type_error("'/' needs a node as context item")
        return [focus.item.root()]

    def _StringLit(self, e: StringLit, env, focus):
        return [Atomic("string", e.value)]

    def _NumberLit(self, e: NumberLit, env, focus):
        return [Atomic(e.kind, V.parse_number(e.lexical, e.kind))]

    def _Path(self, e: Path, env, focus):
        if e.start is None:
            current = self._ContextItem(e, env, focus)
        else:
            current = self.eval(e.start, env, focus)
        for step in e.steps:
            nxt = []
            for n in current:
                if not isinstance(n, Node):
                    raise _type_error("a path step needs nodes, found an atomic value")
                nxt.extend(self._step(n, step, env))
            current = doc_order(nxt)
        return current

    def _step(self, node: Node, step: Step, env) -> list:
        if step.axis == "attribute":
            found = [a for a in node.attributes if step.name == "*" or a.name == step.name]
        else:
            found = [c for c in node.children if c.kind == "element"
                     and (step.name == "*" or c.name == step.name)]
        for pred in step.predicates:
            found = self._apply_predicate(found, pred, env)
        return found

    def _apply_predicate(self, items: list, pred, env) -> list:
        out = []
        size = len(items)
        for i, it in enumerate(items, 1):
            r = self.eval(pred, env, _Focus(it, i, size))
            if len(r) == 1 and isinstance(r[0], Atomic) and r[0].type in NUMERIC:
                if r[0].value == i:
                    out.append(it)
            elif ebv(r):
                out.append(it)
        return out

    def _Filter(self, e: Filter, env, focus):
        items = self.eval(e.base, env, focus)
        for pred in e.predicates:
            items = self._apply_predicate(items, pred, env)
        return items

    def _Comparison(self, e: Comparison, env, focus):
        left = self.eval(e.left, env, focus)
        right = self.eval(e.right, env, focus)
        if e.op == "is":
            if not left or not right:
                return []
            if len(left) > 1 or len(right) > 1 or not isinstance(left[0], Node) or not isinstance(right[0], Node):
                raise _type_error("'is' compares single nodes")
            return [Atomic("boolean", left[0] is right[0])]
        return [Atomic("boolean", general_compare(e.op, left, right))]

    def _Arith(self, e: Arith, env, focus):
        a = _single(self.eval(e.left, env, focus), "arithmetic")
        b = _single(self.eval(e.right, env, focus), "arithmetic")
        if a is None or b is None:
            return []
        a = cast(a, "double") if a.type == "untypedAtomic" else a
        b = cast(b, "double") if b.type == "untypedAtomic" else b
        if a.type not in NUMERIC or b.type not in NUMERIC:
            raise _type_error(f"arithmetic on xs:{a.type} and xs:{b.type}")
        try:
            v = V.arithmetic(e.op, a.value, b.value)
        except V.ValueError_ as exc:
            raise _err("RUNTIME", str(exc)) from None
        except ArithmeticError as exc:
            raise _err("RUNTIME", str(exc)) from None
        return [Atomic(_numeric_type(v), v)]

    def _Neg(self, e: Neg, env, focus):
        a = _single(self.eval(e.operand, env, focus), "unary minus")
        if a is None:
            return []
        a = cast(a, "double") if a.type == "untypedAtomic" else a
        if a.type not in NUMERIC:
            raise _type_error(f"unary minus on xs:{a.type}")
        return [Atomic(a.type, -a.value)]

    def _Logical(self, e: Logical, env, focus):
        if e.op == "and":
            for o in e.operands:
                if not ebv(self.eval(o, env, focus)):
                    return [Atomic("boolean", False)]
            return [Atomic("boolean", True)]
        for o in e.operands:
            if ebv(self.eval(o, env, focus)):
                return [Atomic("boolean", True)]
        return [Atomic("boolean", False)]

    def _Union_(self, e: Union_, env, focus):
        out = []
        for o in e.operands:
            r = self.eval(o, env, focus)
            if any(not isinstance(x, Node) for x in r):
                raise _type_error("'|' needs node sequences")
            out.extend(r)
        return doc_order(out)

    def _Sequence(self, e: Sequence, env, focus):
        out = []
        for it in e.items:
            out.extend(self.eval(it, env, focus))
        return out

    def _IfThenElse(self, e: IfThenElse, env, focus):
        if ebv(self.eval(e.cond, env, focus)):
            return self.eval(e.then, env, focus)
        return self.eval(e.else_, env, focus)

    def _ElementCtor(self, e: ElementCtor, env, focus):
        el = self._build(e, env, focus, None)
        number_document(el)
        return [el]

    def _build(self, e: ElementCtor, env, focus, parent: Optional[Node]) -> Node:
        el = Node("element", e.name)
        el.parent = parent
        for name, value in e.attributes:
            a = Node("attribute", name, value=value)
            a.parent = el
            el.attributes.append(a)
        pending: list[str] = []

        def flush() -> None:
            if pending:
                self._text(el, " ".join(pending))
                pending.clear()

        for c in e.children:
            if isinstance(c, Text):
                flush()
                self._text(el, c.value)
            elif isinstance(c, ElementCtor):
                flush()
                el.children.append(self._build(c, env, focus, el))
            elif isinstance(c, Enclosed):
                for it in self.eval(c.expr, env, focus):
                    if isinstance(it, Atomic):
                        pending.append(it.lexical)
                        continue
                    flush()
                    if it.kind == "attribute":
                        if el.children:
                            raise _type_error("attribute added after element content")
                        a = Node("attribute", it.name, value=it.value)
                        a.parent = el
                        el.attributes = [x for x in el.attributes if x.name != it.name] + [a]
                    elif it.kind == "document":
                        for ch in it.children:
                            el.children.append(copy_node(ch, el))
                    else:
                        el.children.append(copy_node(it, el))
                flush()
        # merge adjacent text nodes
        merged: list[Node] = []
        for ch in el.children:
            if ch.kind == "text" and merged and merged[-1].kind == "text":
                merged[-1].value += ch.value
            elif ch.kind == "text" and ch.value == "":
                continue
            else:
                merged.append(ch)
        el.children = merged
        return el

    @staticmethod
    def _text(el: Node, value: str) -> None:
        t = Node("text", value=value)
        t.parent = el
        el.children.append(t)

    def _FnCall(self, e: FnCall, env, focus):
        name = e.name
        if name == "position":
            if focus is None:
                raise _err("RUNTIME", "position() without a focus")
            return [Atomic("integer", focus.position)]
        if name == "last":
            if focus is None:
                raise _err("RUNTIME", "last() without a focus")
            return [Atomic("integer", focus.size)]
        if name == "true":
            return [Atomic("boolean", True)]
        if name == "false":
            return [Atomic("boolean", False)]
        args = [self.eval(a, env, focus) for a in e.args]
        if name in ("collection", "doc"):
            uri = _string_arg(args[0], name)
            if uri not in self.collections:
                raise _err("MISSING_SOURCE", f"no documents for {name}({uri!r})")
            docs = self.collections[uri]
            return list(docs[:1]) if name == "doc" else list(docs)
        if name == "string":
            a = args[0]
            if not a:
                return [Atomic("string", "")]
            if len(a) > 1:
                raise _type_error("string() expects at most one item")
            it = a[0]
            return [Atomic("string", it.string_value() if isinstance(it, Node) else it.lexical)]
        if name == "exists":
            return [Atomic("boolean", bool(args[0]))]
        if name == "empty":
            return [Atomic("boolean", not args[0])]
        if name == "not":
            return [Atomic("boolean", not ebv(args[0]))]
        if name == "count":
            return [Atomic("integer", len(args[0]))]
        if name == "matches":
            flags = _string_arg(args[2], "matches") if len(args) > 2 else ""
            try:
                ok = V.regex_match(_string_arg(args[0], "matches"), _string_arg(args[1], "matches"), flags)
            except V.ValueError_ as exc:
                raise _err("RUNTIME", str(exc)) from None
            return [Atomic("boolean", ok)]
        if name == "starts-with":
            return [Atomic("boolean", _string_arg(args[0], name).startswith(_string_arg(args[1], name)))]
        if name == "contains":
            return [Atomic("boolean", _string_arg(args[1], name) in _string_arg(args[0], name))]
        if name == "concat":
            return [Atomic("string", "".join(_string_arg(a, name) for a in args))]
        if name == "distinct-values":
            out: list[Atomic] = []
            for a in atomize(args[0]):
                if not any(deep_equal([a], [b]) for b in out):
                    out.append(a)
            return out
        if name == "deep-equal":
            return [Atomic("boolean", deep_equal(args[0], args[1]))]
        if name == "path":
            if not args[0]:
                return []
            n = args[0][0]
            if len(args[0]) > 1 or not isinstance(n, Node):
                raise _type_error("path() expects a single node")
            return [Atomic("string", node_path(n))]
        if name.startswith("xs:"):
            a = _single(args[0], name)
            if a is None:
                return []
            target = name[3:]
            if target == "float":
                target = "double"
            return [cast(a, target)]
        raise _err("RUNTIME", f"unknown function {name}()")

    def _FLWOR(self, e: FLWOR, env, focus):
        tuples = [env]
        for c in e.clauses:
            if isinstance(c, For):
                nxt = []
                for t in tuples:
                    for i, it in enumerate(self.eval(c.source, t, focus), 1):
                        t2 = dict(t)
                        t2[c.var] = [it]
                        if c.at:
                            t2[c.at] = [Atomic("integer", i)]
                        nxt.append(t2)
                tuples = nxt
            elif isinstance(c, Let):
                nxt = []
                for t in tuples:
                    t2 = dict(t)
                    t2[c.var] = self.eval(c.source, t, focus)
                    nxt.append(t2)
                tuples = nxt
            elif isinstance(c, Where):
                tuples = [t for t in tuples if ebv(self.eval(c.cond, t, focus))]
            elif isinstance(c, OrderBy):
                tuples = self._order(tuples, c, focus)
            else:
                raise _err("RUNTIME", f"unknown clause {c!r}")
        out = []
        for t in tuples:
            out.extend(self.eval(e.ret, t, focus))
        return out

    def _order(self, tuples: list, c: OrderBy, focus) -> list:
        keyed = []
        for t in tuples:
            keys = []
            for spec in c.specs:
                a = _single(self.eval(spec.expr, t, focus), "order by")
                if a is not None and a.type == "untypedAtomic":
                    a = cast(a, "string")
                keys.append(a)
            keyed.append((keys, t))
        import functools

        def cmp(x, y) -> int:
            for spec, a, b in zip(c.specs, x[0], y[0]):
                r = _order_cmp(a, b, spec.empty_least)
                if r:
                    return -r if spec.descending else r
            return 0

        keyed.sort(key=functools.cmp_to_key(cmp))
        return [t for _, t in keyed]


def _order_cmp(a: Optional[Atomic], b: Optional[Atomic], empty_least: bool) -> int:
    if a is None or b is None:
        if a is None and b is None:
            return 0
        least = -1 if empty_least else 1
        return least if a is None else -least
    if _value_compare("<", a, b):
        return -1
    if _value_compare(">", a, b):
        return 1
    return 0


def _numeric_type(v) -> str:
    if isinstance(v, float):
        return "double"
    if isinstance(v, Decimal):
        return "decimal"
    return "integer"


def eval_xquery(program, collections: Optional[dict] = None) -> list:
    """Evaluate ``program`` with ``collections`` mapping URIs to document nodes."""
    return Interpreter(collections).run(program)


def serialize_items(items: list) -> str:
    """Items as XML text: nodes serialized, atomics as their lexical form."""
    from ..xmltree import serialize

    out = []
    for it in items:
        if isinstance(it, Node):
            out.append(serialize(it, indent=2))
        else:
            out.append(it.lexical)
    return "\n".join(out) + ("\n" if out else "")


__all__ = ["Atomic", "Interpreter", "atomize", "ebv", "eval_xquery", "node_path", "serialize_items"]
