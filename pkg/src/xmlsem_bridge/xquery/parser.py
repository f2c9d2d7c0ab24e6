"""Recursive-descent parser for the XQuery subset.

The parser works directly on the source string because direct element
constructors switch between expression and content syntax.  Only the
functions listed in ``FUNCTIONS`` are accepted; anything else is a SYNTAX
error naming the function.
"""

from __future__ import annotations

import re

from ..errors import XQueryError
from .ast import (
    FLWOR, FUNCTIONS, Arith, Comparison, ContextItem, ElementCtor, Enclosed, Filter, FnCall,
    For, IfThenElse, Let, Logical, Neg, NumberLit, OrderBy, OrderSpec, Path, Program, Root,
    Sequence, Step, StringLit, Text, Union_, VarRef, Where,
)

_NAME = re.compile(r"[A-Za-z_][\w.\-]*(?::[A-Za-z_][\w.\-]*)?")
_NCNAME = re.compile(r"[A-Za-z_][\w.\-]*")
_NUMBER = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_ENTITIES = {"lt": "<", "gt": ">", "amp": "&", "quot": '"', "apos": "'"}
_ENTITY = re.compile(r"&(#x[0-9a-fA-F]+|#\d+|[a-z]+);")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    # -- low level -----------------------------------------------------------

    def error(self, msg: str, pos: int = None) -> XQueryError:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return XQueryError("SYNTAX", msg, f"line {line}, column {col}")

    def skip(self) -> None:
        t = self.text
        while self.pos < len(t):
            if t[self.pos].isspace():
                self.pos += 1
            elif t.startswith("(:", self.pos):
                depth, i = 0, self.pos
                while i < len(t):
                    if t.startswith("(:", i):
                        depth, i = depth + 1, i + 2
                    elif t.startswith(":)", i):
                        depth, i = depth - 1, i + 2
                        if depth == 0:
                            break
                    else:
                        i += 1
                if depth:
                    raise self.error("unterminated comment")
                self.pos = i
            else:
                break

    def at_end(self) -> bool:
        self.skip()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str) -> None:
        if not self.accept(s):
            raise self.error(f"expected {s!r}, found {self.snippet()!r}")

    def snippet(self) -> str:
        rest = self.text[self.pos:self.pos + 12]
        return rest.split("\n")[0] or "end of input"

    def peek_word(self) -> str:
        self.skip()
        m = _NAME.match(self.text, self.pos)
        return m.group(0) if m else ""

    def peek_keyword(self, word: str) -> bool:
        self.skip()
        m = _NCNAME.match(self.text, self.pos)
        return bool(m) and m.group(0) == word

    def accept_keyword(self, word: str) -> bool:
        if self.peek_keyword(word):
            self.pos += len(word)
            return True
        return False

    def expect_keyword(self, word: str) -> None:
        if not self.accept_keyword(word):
            raise self.error(f"expected {word!r}, found {self.snippet()!r}")

    def followed_by(self, word: str, nxt: str) -> bool:
        """True when ``word`` is next and the following token starts with ``nxt``."""
        if not self.peek_keyword(word):
            return False
        save = self.pos
        self.pos += len(word)
        ok = self.peek(nxt)
        self.pos = save
        return ok

    def varname(self) -> str:
        self.expect("$")
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise self.error("expected a variable name")
        self.pos = m.end()
        return m.group(0)

    # -- expressions -----------------------------------------------------------

    def expr(self):
        items = [self.expr_single()]
        while self.accept(","):
            items.append(self.expr_single())
        return items[0] if len(items) == 1 else Sequence(tuple(items))

    def expr_single(self):
        if self.followed_by("for", "$") or self.followed_by("let", "$"):
            return self.flwor()
        if self.followed_by("if", "("):
            self.expect_keyword("if")
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            self.expect_keyword("then")
            then = self.expr_single()
            self.expect_keyword("else")
            return IfThenElse(cond, then, self.expr_single())
        return self.or_expr()

    def flwor(self):
        clauses = []
        while True:
            if self.accept_keyword("for"):
                while True:
                    name = self.varname()
                    at = self.varname() if self.accept_keyword("at") else None
                    self.expect_keyword("in")
                    clauses.append(For(name, self.expr_single(), at))
                    if not self.accept(","):
                        break
            elif self.accept_keyword("let"):
                while True:
                    name = self.varname()
                    self.expect(":=")
                    clauses.append(Let(name, self.expr_single()))
                    if not self.accept(","):
                        break
            elif self.accept_keyword("where"):
                clauses.append(Where(self.expr_single()))
            elif self.peek_keyword("order") or self.peek_keyword("stable"):
                self.accept_keyword("stable")
                self.expect_keyword("order")
                self.expect_keyword("by")
                specs = [self.order_spec()]
                while self.accept(","):
                    specs.append(self.order_spec())
                clauses.append(OrderBy(tuple(specs)))
            elif self.accept_keyword("return"):
                return FLWOR(tuple(clauses), self.expr_single())
            else:
                raise self.error(f"expected a FLWOR clause or 'return', found {self.snippet()!r}")

    def order_spec(self) -> OrderSpec:
        e = self.expr_single()
        descending = False
        if self.accept_keyword("descending"):
            descending = True
        else:
            self.accept_keyword("ascending")
        empty_least = True
        if self.followed_by("empty", "greatest") or self.followed_by("empty", "least"):
            self.expect_keyword("empty")
            empty_least = not self.accept_keyword("greatest")
            if empty_least:
                self.expect_keyword("least")
        return OrderSpec(e, descending, empty_least)

    def or_expr(self):
        ops = [self.and_expr()]
        while self.accept_keyword("or"):
            ops.append(self.and_expr())
        return ops[0] if len(ops) == 1 else Logical("or", tuple(ops))

    def and_expr(self):
        ops = [self.comparison()]
        while self.accept_keyword("and"):
            ops.append(self.comparison())
        return ops[0] if len(ops) == 1 else Logical("and", tuple(ops))

    def comparison(self):
        left = self.additive()
        self.skip()
        for op in ("!=", "<=", ">=", "=", "<", ">"):
            if self.text.startswith(op, self.pos):
                if op == "<" and self.looks_like_ctor():
                    break
                self.pos += len(op)
                return Comparison(op, left, self.additive())
        if self.accept_keyword("is"):
            return Comparison("is", left, self.additive())
        return left

    def additive(self):
        e = self.multiplicative()
        while True:
            if self.accept("+"):
                e = Arith("+", e, self.multiplicative())
            elif self.accept("-"):
                e = Arith("-", e, self.multiplicative())
            else:
                return e

    def multiplicative(self):
        e = self.unary()
        while True:
            if self.accept("*"):
                e = Arith("*", e, self.unary())
            elif self.accept_keyword("div"):
                e = Arith("div", e, self.unary())
            else:
                return e

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.union()

    def union(self):
        ops = [self.path_expr()]
        while self.accept("|"):
            ops.append(self.path_expr())
        return ops[0] if len(ops) == 1 else Union_(tuple(ops))

    # -- paths -----------------------------------------------------------------

    def path_expr(self):
        self.skip()
        if self.peek("/"):
            self.pos += 1
            if not self.starts_step():
                return Root()
            return Path(Root(), tuple(self.steps()))
        if self.starts_step():
            return Path(None, tuple(self.steps()))
        base = self.filter_expr()
        if self.peek("/"):
            self.pos += 1
            return Path(base, tuple(self.steps()))
        return base

    def starts_step(self) -> bool:
        self.skip()
        t, p = self.text, self.pos
        if t.startswith("@", p) or t.startswith("*", p):
            return True
        m = _NAME.match(t, p)
        if not m:
            return False
        word = m.group(0)
        after = m.end()
        while after < len(t) and t[after].isspace():
            after += 1
        if after < len(t) and t[after] == "(":
            return False  # function call or keyword construct
        if word in ("for", "let") and t.startswith("$", after):
            return False
        return True

    def steps(self) -> list:
        out = [self.step()]
        while self.peek("/"):
            self.pos += 1
            out.append(self.step())
        return out

    def step(self) -> Step:
        axis = "attribute" if self.accept("@") else "child"
        self.skip()
        if self.text.startswith("*", self.pos):
            self.pos += 1
            name = "*"
        else:
            m = _NAME.match(self.text, self.pos)
            if not m:
                raise self.error(f"expected a name test, found {self.snippet()!r}")
            self.pos = m.end()
            name = m.group(0)
        return Step(axis, name, self.predicates())

    def predicates(self) -> tuple:
        preds = []
        while self.accept("["):
            preds.append(self.expr())
            self.expect("]")
        return tuple(preds)

    def filter_expr(self):
        base = self.primary()
        preds = self.predicates()
        return Filter(base, preds) if preds else base

    def primary(self):
        self.skip()
        t, p = self.text, self.pos
        if p >= len(t):
            raise self.error("unexpected end of input")
        c = t[p]
        if c == "$":
            return VarRef(self.varname())
        if c in "\"'":
            return StringLit(self.string_literal())
        m = _NUMBER.match(t, p)
        if m:
            self.pos = m.end()
            return NumberLit(m.group(0))
        if c == ".":
            self.pos += 1
            return ContextItem()
        if c == "(":
            self.pos += 1
            if self.accept(")"):
                return Sequence(())
            e = self.expr()
            self.expect(")")
            return e
        if c == "<" and self.looks_like_ctor():
            return self.constructor()
        m = _NAME.match(t, p)
        if m:
            return self.function_call(m)
        raise self.error(f"unexpected {self.snippet()!r}")

    def function_call(self, m):
        name = m.group(0)
        start = self.pos
        self.pos = m.end()
        if not self.peek("("):
            raise self.error(f"unexpected {name!r}", start)
        fname = name[3:] if name.startswith("fn:") else name
        if fname not in FUNCTIONS:
            raise self.error(f"function {name}() is not in the supported subset", start)
        self.expect("(")
        args = []
        if not self.accept(")"):
            args.append(self.expr_single())
            while self.accept(","):
                args.append(self.expr_single())
            self.expect(")")
        lo, hi = FUNCTIONS[fname]
        if not lo <= len(args) <= hi:
            raise self.error(f"{fname}() takes {lo}..{hi} arguments, got {len(args)}", start)
        return FnCall(fname, tuple(args))

    def string_literal(self) -> str:
        t = self.text
        q = t[self.pos]
        i = self.pos + 1
        out = []
        while True:
            if i >= len(t):
                raise self.error("unterminated string literal")
            if t[i] == q:
                if t.startswith(q, i + 1):
                    out.append(q)
                    i += 2
                    continue
                break
            if t[i] == "&":
                ch, i = self.entity(i)
                out.append(ch)
                continue
            out.append(t[i])
            i += 1
        self.pos = i + 1
        return "".join(out)

    def entity(self, i: int) -> tuple[str, int]:
        m = _ENTITY.match(self.text, i)
        if not m:
            raise self.error("bad entity reference", i)
        ref = m.group(1)
        if ref.startswith("#x"):
            return chr(int(ref[2:], 16)), m.end()
        if ref.startswith("#"):
            return chr(int(ref[1:])), m.end()
        if ref not in _ENTITIES:
            raise self.error(f"unknown entity &{ref};", i)
        return _ENTITIES[ref], m.end()

    # -- direct constructors ----------------------------------------------------

    def looks_like_ctor(self) -> bool:
        t, p = self.text, self.pos
        return t.startswith("<", p) and bool(_NAME.match(t, p + 1))

    def constructor(self) -> ElementCtor:
        t = self.text
        self.pos += 1
        m = _NAME.match(t, self.pos)
        name = m.group(0)
        self.pos = m.end()
        attrs = []
        while True:
            self.skip()
            if t.startswith("/>", self.pos):
                self.pos += 2
                return ElementCtor(name, tuple(attrs), ())
            if t.startswith(">", self.pos):
                self.pos += 1
                break
            m = _NAME.match(t, self.pos)
            if not m:
                raise self.error(f"bad attribute in <{name}>")
            self.pos = m.end()
            self.expect("=")
            self.skip()
            if self.pos >= len(t) or t[self.pos] not in "\"'":
                raise self.error("expected a quoted attribute value")
            attrs.append((m.group(0), self.attribute_value()))
        children = self.content(name)
        return ElementCtor(name, tuple(attrs), tuple(children))

    def attribute_value(self) -> str:
        t = self.text
        q = t[self.pos]
        i = self.pos + 1
        out = []
        while True:
            if i >= len(t):
                raise self.error("unterminated attribute value")
            c = t[i]
            if c == q:
                if t.startswith(q, i + 1):
                    out.append(q)
                    i += 2
                    continue
                break
            if c in "{}":
                if t.startswith(c * 2, i):
                    out.append(c)
                    i += 2
                    continue
                raise self.error("enclosed expressions in attributes are not supported", i)
            if c == "&":
                ch, i = self.entity(i)
                out.append(ch)
                continue
            out.append(c)
            i += 1
        self.pos = i + 1
        return "".join(out)

    def content(self, name: str) -> list:
        t = self.text
        children: list = []
        buf: list[str] = []

        def flush():
            s = "".join(buf)
            buf.clear()
            if s and not s.isspace():
                if children and isinstance(children[-1], Text):
                    children[-1] = Text(children[-1].value + s)
                else:
                    children.append(Text(s))

        while True:
            if self.pos >= len(t):
                raise self.error(f"unterminated element <{name}>")
            c = t[self.pos]
            if t.startswith("</", self.pos):
                flush()
                self.pos += 2
                m = _NAME.match(t, self.pos)
                if not m or m.group(0) != name:
                    raise self.error(f"mismatched end tag for <{name}>")
                self.pos = m.end()
                self.expect(">")
                return children
            if c == "<":
                flush()
                if not self.looks_like_ctor():
                    raise self.error("unsupported markup in element content")
                children.append(self.constructor())
            elif c == "{":
                if t.startswith("{{", self.pos):
                    buf.append("{")
                    self.pos += 2
                    continue
                flush()
                self.pos += 1
                e = self.expr()
                self.expect("}")
                children.append(Enclosed(e))
            elif c == "}":
                if not t.startswith("}}", self.pos):
                    raise self.error("unescaped '}' in element content")
                buf.append("}")
                self.pos += 2
            elif c == "&":
                ch, self.pos = self.entity(self.pos)
                buf.append(ch)
            else:
                buf.append(c)
                self.pos += 1


def _skip_version_decl(p: _Parser) -> None:
    if p.followed_by("xquery", "version"):
        p.expect_keyword("xquery")
        p.expect_keyword("version")
        p.skip()
        p.string_literal()
        p.expect(";")


def parse_subset(text: str) -> Program:
    """Parse a complete query of the supported subset."""
    p = _Parser(text)
    _skip_version_decl(p)
    body = p.expr()
    if not p.at_end():
        raise p.error(f"unexpected {p.snippet()!r}")
    return Program(body)


def parse_expression(text: str):
    """Parse a single expression, e.g. an XPath predicate body."""
    p = _Parser(text)
    e = p.expr()
    if not p.at_end():
        raise p.error(f"unexpected {p.snippet()!r}")
    return e


__all__ = ["parse_expression", "parse_subset"]
