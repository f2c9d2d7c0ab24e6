"""A small ordered XML node model built on expat.

ElementTree drops line numbers and parent links, and the XQuery evaluator
needs document order, node identity and parents, so documents are read
into this model instead.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterator, Optional
from xml.parsers import expat

from .errors import BridgeError

XML_NS = "http://www.w3.org/XML/1998/namespace"

_doc_ids = itertools.count(1)


class Node:
    """Document, element, attribute, text or (top-level) comment node."""

    __slots__ = (
        "kind", "name", "ns", "value", "parent", "children", "attributes",
        "line", "order", "doc_id", "nsmap",
    )

    def __init__(self, kind: str, name: str = "", value: str = "", ns: str = ""):
        self.kind = kind
        self.name = name
        self.ns = ns
        self.value = value
        self.parent: Optional[Node] = None
        self.children: list[Node] = []
        self.attributes: list[Node] = []
        self.line = 0
        self.order = 0
        self.doc_id = 0
        self.nsmap: dict[str, str] = {}

    def __repr__(self) -> str:
        if self.kind == "element":
            return f"<Node element {self.name}>"
        if self.kind == "attribute":
            return f"<Node @{self.name}={self.value!r}>"
        return f"<Node {self.kind}>"

    # -- navigation -------------------------------------------------------

    def elements(self, name: Optional[str] = None) -> list["Node"]:
        return [c for c in self.children
                if c.kind == "element" and (name is None or c.name == name)]

    def attribute(self, name: str) -> Optional["Node"]:
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def get(self, name: str, default: Optional[str] = None) -> Optional[str]:
        a = self.attribute(name)
        return a.value if a is not None else default

    def string_value(self) -> str:
        if self.kind in ("attribute", "text", "comment"):
            return self.value
        return "".join(t.value for t in self.iter() if t.kind == "text")

    def iter(self) -> Iterator["Node"]:
        """Pre-order walk over this node and its descendants (no attributes)."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def root(self) -> "Node":
        node = self
        while node.parent is not None:
            node = node.parent
        return node

    def document_element(self) -> Optional["Node"]:
        for c in self.children:
            if c.kind == "element":
                return c
        return None

    def sort_key(self) -> tuple[int, int]:
        return (self.doc_id, self.order)

    def name_path(self) -> list[str]:
        """Element/attribute names from the document element down to here."""
        names = []
        node: Optional[Node] = self
        while node is not None and node.kind != "document":
            names.append(("@" if node.kind == "attribute" else "") + node.name)
            node = node.parent
        names.reverse()
        return names

    def position(self) -> int:
        """1-based index among same-named element siblings."""
        if self.parent is None or self.kind != "element":
            return 1
        k = 0
        for sib in self.parent.children:
            if sib.kind == "element" and sib.name == self.name:
                k += 1
            if sib is self:
                return k
        return k

    def resolve_qname(self, qname: str) -> tuple[str, str]:
        """Split ``prefix:local`` using the in-scope namespaces."""
        if ":" in qname:
            prefix, local = qname.split(":", 1)
        else:
            prefix, local = "", qname
        return self.nsmap.get(prefix, ""), local


def number_document(doc: Node) -> Node:
    """Assign document order to every node (attributes follow their element)."""
    doc.doc_id = next(_doc_ids)
    counter = 0
    for node in doc.iter():
        node.order = counter
        node.doc_id = doc.doc_id
        counter += 1
        for a in node.attributes:
            a.order = counter
            a.doc_id = doc.doc_id
            counter += 1
    return doc


def parse_xml(
    text: str,
    error: Callable[..., BridgeError],
    keep_whitespace: bool = True,
) -> Node:
    """Parse ``text`` into a numbered document node.

    ``error`` builds the exception raised for malformed input, so each caller
    reports WELL_FORMEDNESS through its own error class.
    """
    parser = expat.ParserCreate(namespace_separator=" ")
    doc = Node("document")
    stack: list[Node] = [doc]
    pending_ns: dict[str, str] = {}
    text_buf: list[str] = []

    def split(name: str) -> tuple[str, str]:
        if " " in name:
            ns, local = name.split(" ", 1)
            return ns, local
        return "", name

    def flush_text() -> None:
        if text_buf:
            value = "".join(text_buf)
            text_buf.clear()
            if stack[-1].kind == "document":
                return
            if not keep_whitespace and not value.strip():
                return
            t = Node("text", value=value)
            t.parent = stack[-1]
            stack[-1].children.append(t)

    def start_ns(prefix: Optional[str], uri: Optional[str]) -> None:
        pending_ns[prefix or ""] = uri or ""

    def start(name: str, attrs: list[str]) -> None:
        flush_text()
        ns, local = split(name)
        el = Node("element", local, ns=ns)
        el.line = parser.CurrentLineNumber
        parent = stack[-1]
        el.nsmap = dict(parent.nsmap)
        el.nsmap.setdefault("xml", XML_NS)
        el.nsmap.update(pending_ns)
        pending_ns.clear()
        for i in range(0, len(attrs), 2):
            ans, alocal = split(attrs[i])
            a = Node("attribute", alocal, value=attrs[i + 1], ns=ans)
            a.parent = el
            a.line = el.line
            el.attributes.append(a)
        el.parent = parent
        parent.children.append(el)
        stack.append(el)

    def end(name: str) -> None:
        flush_text()
        stack.pop()

    def chars(data: str) -> None:
        text_buf.append(data)

    def comment(data: str) -> None:
        flush_text()
        if stack[-1].kind == "document":
            c = Node("comment", value=data)
            c.parent = doc
            doc.children.append(c)

    parser.StartNamespaceDeclHandler = start_ns
    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    parser.CommentHandler = comment
    parser.ordered_attributes = True
    try:
        parser.Parse(text, True)
    except expat.ExpatError as exc:
        raise error("WELL_FORMEDNESS", expat.ErrorString(exc.code),
                    f"line {exc.lineno}, column {exc.offset}") from None
    if doc.document_element() is None:
        raise error("WELL_FORMEDNESS", "no document element", "line 1")
    return number_document(doc)


# -- construction and serialization -----------------------------------------

def new_document() -> Node:
    return Node("document")


def append_element(parent: Node, name: str, attrs: Optional[dict[str, str]] = None,
                   text: Optional[str] = None) -> Node:
    el = Node("element", name)
    el.parent = parent
    parent.children.append(el)
    for k, v in (attrs or {}).items():
        a = Node("attribute", k, value=v)
        a.parent = el
        el.attributes.append(a)
    if text is not None:
        t = Node("text", value=text)
        t.parent = el
        el.children.append(t)
    return el


def escape_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def escape_attr(s: str) -> str:
    return (escape_text(s).replace('"', "&quot;")
            .replace("\n", "&#10;").replace("\t", "&#9;").replace("\r", "&#13;"))


def serialize(node: Node, indent: Optional[int] = None) -> str:
    """Serialize a node.  With ``indent``, element-only content is indented."""
    out: list[str] = []

    def element_only(n: Node) -> bool:
        return all(c.kind != "text" or not c.value.strip() for c in n.children)

    def write(n: Node, depth: int, pretty: bool) -> None:
        pad = " " * (indent * depth) if (pretty and indent) else ""
        if n.kind == "document":
            for c in n.children:
                write(c, depth, pretty)
                if indent is not None:
                    out.append("\n")
            return
        if n.kind == "text":
            out.append(escape_text(n.value))
            return
        if n.kind == "comment":
            out.append(f"{pad}<!--{n.value}-->")
            return
        if n.kind == "attribute":
            out.append(f'{n.name}="{escape_attr(n.value)}"')
            return
        attrs = "".join(f' {a.name}="{escape_attr(a.value)}"' for a in n.attributes)
        out.append(f"{pad}<{n.name}{attrs}")
        if not n.children:
            out.append("/>")
            return
        out.append(">")
        if indent is not None and element_only(n):
            for c in n.children:
                if c.kind == "text":
                    continue
                out.append("\n")
                write(c, depth + 1, True)
            out.append("\n" + pad)
        else:
            for c in n.children:
                write(c, 0, False)
        out.append(f"</{n.name}>")

    write(node, 0, True)
    return "".join(out)


def copy_node(node: Node, parent: Optional[Node] = None) -> Node:
    """Deep copy (new identity); the copy is not numbered."""
    c = Node(node.kind, node.name, node.value, node.ns)
    c.line = node.line
    c.nsmap = node.nsmap
    c.parent = parent
    for a in node.attributes:
        ca = Node("attribute", a.name, a.value, a.ns)
        ca.parent = c
        c.attributes.append(ca)
    for ch in node.children:
        c.children.append(copy_node(ch, c))
    return c
