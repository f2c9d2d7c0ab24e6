"""In-memory model of the XML Schema subset the bridge understands.

``parse_schema`` reads schema text into an immutable ``XsdSchema``;
``serialize_schema`` writes it back so that parsing the output yields an
equal model.  Path enumeration lives in ``xsd_paths``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import SchemaError
from .naming import anonymous_type_id
from .xmltree import Node, escape_attr, escape_text, parse_xml

XS = "http://www.w3.org/2001/XMLSchema"

BUILTIN_TYPES = frozenset("""
    anyType anySimpleType anyAtomicType string normalizedString token language
    Name NCName ID IDREF IDREFS ENTITY ENTITIES NMTOKEN NMTOKENS QName NOTATION
    anyURI base64Binary hexBinary boolean decimal integer long int short byte
    nonNegativeInteger positiveInteger nonPositiveInteger negativeInteger
    unsignedLong unsignedInt unsignedShort unsignedByte float double duration
    dateTime date time gYear gYearMonth gMonth gMonthDay gDay dateTimeStamp
    dayTimeDuration yearMonthDuration error
""".split())


@dataclass(frozen=True)
class Context:
    """Where a declaration lives: top level, a complex type, or a model group."""

    kind: str  # "top" | "type" | "group"
    name: str = ""


TOP = Context("top")


@dataclass(frozen=True)
class SimpleType:
    name: str
    base: str
    variety: str = "restriction"  # restriction | list | union
    annotation: Optional[str] = None


@dataclass(frozen=True)
class ElementDecl:
    name: str
    type_name: Optional[str]  # builtin "xs:..." or a named user type
    anonymous_type: Optional[str]  # key into XsdSchema.complex_types
    context: Context
    min_occurs: int = 1
    max_occurs: Optional[int] = 1  # None means unbounded
    default: Optional[str] = None
    fixed: Optional[str] = None
    substitution_group: Optional[str] = None
    abstract: bool = False
    annotation: Optional[str] = None
    line: int = field(default=0, compare=False)

    @property
    def type_key(self) -> str:
        return self.anonymous_type or self.type_name or "xs:anyType"


@dataclass(frozen=True)
class ElementRef:
    ref: str
    min_occurs: int = 1
    max_occurs: Optional[int] = 1
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AttributeDecl:
    name: str
    type_name: str
    context: Context
    use: str = "optional"
    default: Optional[str] = None
    fixed: Optional[str] = None
    annotation: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AttributeRef:
    ref: str
    use: str = "optional"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Sequence:
    items: tuple
    min_occurs: int = 1
    max_occurs: Optional[int] = 1


@dataclass(frozen=True)
class Choice:
    items: tuple
    min_occurs: int = 1
    max_occurs: Optional[int] = 1


@dataclass(frozen=True)
class All:
    items: tuple
    min_occurs: int = 1
    max_occurs: Optional[int] = 1


@dataclass(frozen=True)
class GroupRef:
    ref: str
    min_occurs: int = 1
    max_occurs: Optional[int] = 1
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Any:
    namespace: str = "##any"
    process_contents: str = "strict"
    min_occurs: int = 1
    max_occurs: Optional[int] = 1
    line: int = field(default=0, compare=False)


Particle = Union[Sequence, Choice, All, GroupRef, Any, ElementDecl, ElementRef]


@dataclass(frozen=True)
class ComplexType:
    key: str
    name: Optional[str]  # None for anonymous types
    host: Optional[str] = None  # host element name for anonymous types
    base: Optional[str] = None
    derivation: Optional[str] = None  # extension | restriction
    content: Optional[Particle] = None
    attributes: tuple = ()
    any_attribute: bool = False
    mixed: bool = False
    abstract: bool = False
    asserts: tuple = ()  # verbatim XSD 1.1 assertions
    annotation: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ModelGroup:
    name: str
    content: Particle
    annotation: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class IdentityConstraint:
    kind: str  # unique | key | keyref
    name: str
    host: str  # name of the element carrying the constraint
    context: Context
    selector: str
    fields: tuple
    refer: Optional[str] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Xsd11Construct:
    """A construct kept verbatim (assert, alternative, override, redefine)."""

    kind: str
    text: str
    context: str  # owning element/type name, or "" at top level


@dataclass(frozen=True)
class XsdSchema:
    target_namespace: Optional[str] = None
    complex_types: dict = field(default_factory=dict)  # key -> ComplexType
    simple_types: dict = field(default_factory=dict)  # name -> SimpleType
    top_elements: dict = field(default_factory=dict)  # name -> ElementDecl
    top_attributes: dict = field(default_factory=dict)  # name -> AttributeDecl
    model_groups: dict = field(default_factory=dict)  # name -> ModelGroup
    substitution_groups: dict = field(default_factory=dict)  # head -> tuple of members
    identity_constraints: tuple = ()
    xsd11_constructs: tuple = ()

    def named_types(self) -> list[ComplexType]:
        return [t for t in self.complex_types.values() if t.name is not None]

    def element_type(self, decl: ElementDecl) -> Optional[ComplexType]:
        """The complex type governing ``decl``, or None for simple content."""
        return self.complex_types.get(decl.type_key)

    def resolve(self, particle: Union[ElementDecl, ElementRef]) -> ElementDecl:
        if isinstance(particle, ElementRef):
            return self.top_elements[particle.ref]
        return particle

    def simple_base(self, type_name: str) -> str:
        """Follow user simple types down to a builtin ``xs:`` name."""
        seen = set()
        while type_name in self.simple_types and type_name not in seen:
            seen.add(type_name)
            type_name = self.simple_types[type_name].base
        return type_name


# -- parsing ---------------------------------------------------------------

def _occurs(node: Node) -> tuple[int, Optional[int]]:
    lo = node.get("minOccurs", "1")
    hi = node.get("maxOccurs", "1")
    try:
        min_occurs = int(lo)
        max_occurs = None if hi == "unbounded" else int(hi)
    except ValueError:
        raise SchemaError("INVALID_VALUE", f"bad occurrence bounds {lo!r}..{hi!r}",
                          f"line {node.line}") from None
    if min_occurs < 0 or (max_occurs is not None and max_occurs < min_occurs):
        raise SchemaError("INVALID_VALUE", f"bad occurrence bounds {lo!r}..{hi!r}",
                          f"line {node.line}")
    return min_occurs, max_occurs


def _annotation(node: Node) -> Optional[str]:
    for ann in node.elements("annotation"):
        if ann.ns != XS:
            continue
        parts = [d.string_value().strip() for d in ann.elements("documentation")]
        text = " ".join(p for p in parts if p)
        if text:
            return text
    return None


def _fragment_text(node: Node) -> str:
    """Canonical text of a schema fragment, with XSD elements as ``xs:``."""
    prefix = "xs:" if node.ns == XS else ""
    attrs = "".join(f' {a.name}="{escape_attr(a.value)}"' for a in node.attributes)
    inner = []
    for c in node.children:
        if c.kind == "element":
            inner.append(_fragment_text(c))
        elif c.kind == "text" and c.value.strip():
            inner.append(escape_text(c.value.strip()))
    if not inner:
        return f"<{prefix}{node.name}{attrs}/>"
    return f"<{prefix}{node.name}{attrs}>{''.join(inner)}</{prefix}{node.name}>"


class _Parser:
    def __init__(self, doc: Node):
        self.root = doc.document_element()
        self.complex_types: dict[str, ComplexType] = {}
        self.simple_types: dict[str, SimpleType] = {}
        self.top_elements: dict[str, ElementDecl] = {}
        self.top_attributes: dict[str, AttributeDecl] = {}
        self.model_groups: dict[str, ModelGroup] = {}
        self.identity: list[IdentityConstraint] = []
        self.xsd11: list[Xsd11Construct] = []
        self.anon_keys: dict[int, str] = {}
        self.tns = self.root.get("targetNamespace")

    def fail(self, code: str, msg: str, node: Node) -> SchemaError:
        return SchemaError(code, msg, f"line {node.line}")

    def xs_children(self, node: Node) -> list[Node]:
        out = []
        for c in node.elements():
            if c.ns != XS:
                raise self.fail("UNSUPPORTED_CONSTRUCT",
                                f"foreign element {c.name!r} in schema", c)
            if c.name != "annotation":
                out.append(c)
        return out

    def type_ref(self, node: Node, qname: str) -> str:
        ns, local = node.resolve_qname(qname)
        if ns == XS:
            if local not in BUILTIN_TYPES:
                raise self.fail("UNRESOLVED_REF", f"unknown builtin type xs:{local}", node)
            return "xs:" + local
        return local

    def name_ref(self, node: Node, qname: str) -> str:
        return qname.split(":", 1)[1] if ":" in qname else qname

    # anonymous complex types are keyed by their host element; hosts that
    # share a name get the declaring context folded into the key
    def assign_anonymous_keys(self) -> None:
        found: list[tuple[Node, str, str]] = []

        def walk(node: Node, ctx: str, top: bool) -> None:
            for c in node.elements():
                if c.ns != XS:
                    continue
                if c.name == "element" and c.get("name"):
                    ct = [x for x in c.elements("complexType") if x.ns == XS]
                    if ct:
                        found.append((ct[0], c.get("name"), "" if top else ctx))
                        key_holder = len(found) - 1
                        walk(ct[0], str(key_holder), False)
                    continue
                if c.name == "complexType" and c.get("name"):
                    walk(c, c.get("name"), False)
                elif c.name == "group" and c.get("name"):
                    walk(c, c.get("name"), False)
                elif c.name in ("redefine", "override"):
                    continue
                else:
                    walk(c, ctx, top and c.name == "schema")

        walk(self.root, "", True)
        counts: dict[str, int] = {}
        for _, host, _ in found:
            counts[host] = counts.get(host, 0) + 1
        keys: list[str] = []
        for node, host, ctx in found:
            if ctx.isdigit():
                ctx = keys[int(ctx)]
            if ctx and counts[host] > 1:
                key = anonymous_type_id(host, ctx)
            else:
                key = anonymous_type_id(host)
            keys.append(key)
            self.anon_keys[id(node)] = key

    def parse(self) -> XsdSchema:
        root = self.root
        if root.ns != XS or root.name != "schema":
            raise self.fail("UNSUPPORTED_CONSTRUCT", "document element is not xs:schema", root)
        self.assign_anonymous_keys()
        for node in self.xs_children(root):
            kind = node.name
            if kind == "element":
                decl = self.element(node, TOP)
                self.add_unique(self.top_elements, decl.name, decl, node, "element")
            elif kind == "attribute":
                decl = self.attribute(node, TOP)
                self.add_unique(self.top_attributes, decl.name, decl, node, "attribute")
            elif kind == "complexType":
                name = node.get("name")
                if not name:
                    raise self.fail("UNSUPPORTED_CONSTRUCT", "top-level complexType without name", node)
                self.complex_type(node, name, None)
            elif kind == "simpleType":
                name = node.get("name")
                if not name:
                    raise self.fail("UNSUPPORTED_CONSTRUCT", "top-level simpleType without name", node)
                st = self.simple_type(node, name)
                self.add_unique(self.simple_types, name, st, node, "simple type")
            elif kind == "group":
                name = node.get("name")
                content = self.group_content(node, Context("group", name))
                self.add_unique(self.model_groups, name,
                                ModelGroup(name, content, _annotation(node), node.line),
                                node, "group")
            elif kind in ("redefine", "override"):
                self.xsd11.append(Xsd11Construct(kind, _fragment_text(node), ""))
            elif kind == "notation":
                continue
            else:
                raise self.fail("UNSUPPORTED_CONSTRUCT", f"xs:{kind} is not supported", node)
        schema = XsdSchema(
            target_namespace=self.tns,
            complex_types=self.complex_types,
            simple_types=self.simple_types,
            top_elements=self.top_elements,
            top_attributes=self.top_attributes,
            model_groups=self.model_groups,
            substitution_groups=self.substitution_groups(),
            identity_constraints=tuple(sorted(
                self.identity, key=lambda ic: (ic.host, ic.context.kind, ic.context.name,
                                               ic.kind, ic.name))),
            xsd11_constructs=tuple(sorted(
                self.xsd11, key=lambda x: (x.kind, x.context, x.text))),
        )
        _check_references(schema)
        return schema

    def add_unique(self, table: dict, name: str, value, node: Node, what: str) -> None:
        if name in table:
            raise self.fail("DUPLICATE_NAME", f"{what} {name!r} declared twice", node)
        table[name] = value

    def substitution_groups(self) -> dict:
        groups: dict[str, list[str]] = {}
        for decl in self.top_elements.values():
            if decl.substitution_group:
                groups.setdefault(decl.substitution_group, []).append(decl.name)
        return {head: tuple(sorted(members)) for head, members in groups.items()}

    def element(self, node: Node, ctx: Context) -> Union[ElementDecl, ElementRef]:
        min_occurs, max_occurs = _occurs(node)
        if ctx.kind == "top":
            min_occurs, max_occurs = 1, 1
        ref = node.get("ref")
        if ref is not None:
            if ctx.kind == "top":
                raise self.fail("UNSUPPORTED_CONSTRUCT", "top-level element with ref", node)
            return ElementRef(self.name_ref(node, ref), min_occurs, max_occurs, node.line)
        name = node.get("name")
        if not name:
            raise self.fail("UNSUPPORTED_CONSTRUCT", "element without name or ref", node)
        type_name = node.get("type")
        anonymous = None
        if type_name is not None:
            type_name = self.type_ref(node, type_name)
        for child in self.xs_children(node):
            if child.name == "complexType":
                if type_name is not None or anonymous is not None:
                    raise self.fail("UNSUPPORTED_CONSTRUCT",
                                    f"element {name!r} has both a type and an inline type", child)
                anonymous = self.anon_keys[id(child)]
                self.complex_type(child, None, anonymous, host=name)
            elif child.name == "simpleType":
                if type_name is not None or anonymous is not None:
                    raise self.fail("UNSUPPORTED_CONSTRUCT",
                                    f"element {name!r} has both a type and an inline type", child)
                type_name = self.simple_type(child, None).base
            elif child.name in ("unique", "key", "keyref"):
                self.identity.append(self.identity_constraint(child, name, ctx))
            elif child.name == "alternative":
                self.xsd11.append(Xsd11Construct("alternative", _fragment_text(child), name))
            else:
                raise self.fail("UNSUPPORTED_CONSTRUCT", f"xs:{child.name} inside element", child)
        if type_name is None and anonymous is None:
            type_name = "xs:anyType"
        sub = node.get("substitutionGroup")
        return ElementDecl(
            name=name,
            type_name=type_name,
            anonymous_type=anonymous,
            context=ctx,
            min_occurs=min_occurs,
            max_occurs=max_occurs,
            default=node.get("default"),
            fixed=node.get("fixed"),
            substitution_group=self.name_ref(node, sub) if sub else None,
            abstract=node.get("abstract") == "true",
            annotation=_annotation(node),
            line=node.line,
        )

    def attribute(self, node: Node, ctx: Context) -> Union[AttributeDecl, AttributeRef]:
        use = node.get("use", "optional")
        ref = node.get("ref")
        if ref is not None:
            return AttributeRef(self.name_ref(node, ref), use, node.line)
        name = node.get("name")
        if not name:
            raise self.fail("UNSUPPORTED_CONSTRUCT", "attribute without name or ref", node)
        type_name = node.get("type")
        if type_name is not None:
            type_name = self.type_ref(node, type_name)
        for child in self.xs_children(node):
            if child.name == "simpleType" and type_name is None:
                type_name = self.simple_type(child, None).base
            else:
                raise self.fail("UNSUPPORTED_CONSTRUCT", f"xs:{child.name} inside attribute", child)
        return AttributeDecl(
            name=name,
            type_name=type_name or "xs:anySimpleType",
            context=ctx,
            use=use,
            default=node.get("default"),
            fixed=node.get("fixed"),
            annotation=_annotation(node),
            line=node.line,
        )

    def simple_type(self, node: Node, name: Optional[str]) -> SimpleType:
        children = self.xs_children(node)
        if len(children) != 1:
            raise self.fail("UNSUPPORTED_CONSTRUCT", "simpleType needs one derivation", node)
        d = children[0]
        if d.name == "restriction":
            base = d.get("base")
            if base is None:
                inner = [c for c in self.xs_children(d) if c.name == "simpleType"]
                if not inner:
                    raise self.fail("UNSUPPORTED_CONSTRUCT", "restriction without base", d)
                base_name = self.simple_type(inner[0], None).base
            else:
                base_name = self.type_ref(d, base)
            return SimpleType(name or "", base_name, "restriction", _annotation(node))
        if d.name in ("list", "union"):
            return SimpleType(name or "", "xs:string", d.name, _annotation(node))
        raise self.fail("UNSUPPORTED_CONSTRUCT", f"xs:{d.name} in simpleType", d)

    def complex_type(self, node: Node, name: Optional[str], key: Optional[str],
                     host: Optional[str] = None) -> ComplexType:
        key = key or name
        ctx = Context("type", key)
        base = derivation = None
        content = None
        attributes: list = []
        any_attribute = False
        asserts: list[str] = []
        mixed = node.get("mixed") == "true"

        def body(parent: Node) -> None:
            nonlocal content, any_attribute
            for child in self.xs_children(parent):
                if child.name in ("sequence", "choice", "all", "group"):
                    if content is not None:
                        raise self.fail("UNSUPPORTED_CONSTRUCT", "more than one content model", child)
                    content = self.particle(child, ctx)
                elif child.name == "attribute":
                    attributes.append(self.attribute(child, ctx))
                elif child.name == "anyAttribute":
                    any_attribute = True
                elif child.name == "assert":
                    text = _fragment_text(child)
                    asserts.append(text)
                    self.xsd11.append(Xsd11Construct("assert", text, key))
                else:
                    raise self.fail("UNSUPPORTED_CONSTRUCT", f"xs:{child.name} in complexType", child)

        children = self.xs_children(node)
        if len(children) == 1 and children[0].name == "complexContent":
            cc = children[0]
            derivs = self.xs_children(cc)
            if len(derivs) != 1 or derivs[0].name not in ("extension", "restriction"):
                raise self.fail("UNSUPPORTED_CONSTRUCT", "complexContent needs one derivation", cc)
            d = derivs[0]
            derivation = d.name
            base = self.type_ref(d, d.get("base", ""))
            if base == "xs:anyType":
                base = derivation = None
            body(d)
        elif any(c.name == "simpleContent" for c in children):
            sc = next(c for c in children if c.name == "simpleContent")
            raise self.fail("UNSUPPORTED_CONSTRUCT", "simpleContent is not supported", sc)
        else:
            body(node)
        ct = ComplexType(
            key=key, name=name, host=host, base=base, derivation=derivation,
            content=content, attributes=tuple(attributes), any_attribute=any_attribute,
            mixed=mixed, abstract=node.get("abstract") == "true", asserts=tuple(asserts),
            annotation=_annotation(node), line=node.line,
        )
        self.add_unique(self.complex_types, key, ct, node, "complex type")
        return ct

    def particle(self, node: Node, ctx: Context) -> Particle:
        kind = node.name
        if kind == "element":
            return self.element(node, ctx)
        if kind == "group":
            lo, hi = _occurs(node)
            ref = node.get("ref")
            if ref is None:
                raise self.fail("UNSUPPORTED_CONSTRUCT", "local group without ref", node)
            return GroupRef(self.name_ref(node, ref), lo, hi, node.line)
        if kind == "any":
            lo, hi = _occurs(node)
            return Any(node.get("namespace", "##any"), node.get("processContents", "strict"),
                       lo, hi, node.line)
        if kind in ("sequence", "choice", "all"):
            lo, hi = _occurs(node)
            items = tuple(self.particle(c, ctx) for c in self.xs_children(node))
            cls = {"sequence": Sequence, "choice": Choice, "all": All}[kind]
            return cls(items, lo, hi)
        raise self.fail("UNSUPPORTED_CONSTRUCT", f"xs:{kind} in a content model", node)

    def group_content(self, node: Node, ctx: Context) -> Particle:
        children = self.xs_children(node)
        if len(children) != 1 or children[0].name not in ("sequence", "choice", "all"):
            raise self.fail("UNSUPPORTED_CONSTRUCT", "group needs one sequence/choice/all", node)
        return self.particle(children[0], ctx)

    def identity_constraint(self, node: Node, host: str, ctx: Context) -> IdentityConstraint:
        selector = None
        fields = []
        for c in self.xs_children(node):
            if c.name == "selector":
                selector = c.get("xpath", "")
            elif c.name == "field":
                fields.append(c.get("xpath", ""))
        if selector is None or not fields:
            raise self.fail("UNSUPPORTED_CONSTRUCT", f"{node.name} needs selector and field", node)
        refer = node.get("refer")
        return IdentityConstraint(node.name, node.get("name", ""), host, ctx, selector,
                                  tuple(fields), self.name_ref(node, refer) if refer else None,
                                  node.line)


def iter_particles(particle: Optional[Particle]):
    """Yield every particle nested in ``particle`` (pre-order, itself included)."""
    if particle is None:
        return
    yield particle
    if isinstance(particle, (Sequence, Choice, All)):
        for item in particle.items:
            yield from iter_particles(item)


def _check_references(schema: XsdSchema) -> None:
    def check_type(name: Optional[str], line: int, what: str) -> None:
        if name is None or name.startswith("xs:"):
            return
        if name not in schema.complex_types and name not in schema.simple_types:
            raise SchemaError("UNRESOLVED_REF", f"{what} refers to unknown type {name!r}",
                              f"line {line}")

    def check_particles(content: Optional[Particle]) -> None:
        for p in iter_particles(content):
            if isinstance(p, ElementRef) and p.ref not in schema.top_elements:
                raise SchemaError("UNRESOLVED_REF", f"element ref {p.ref!r} is not declared",
                                  f"line {p.line}")
            if isinstance(p, GroupRef) and p.ref not in schema.model_groups:
                raise SchemaError("UNRESOLVED_REF", f"group ref {p.ref!r} is not declared",
                                  f"line {p.line}")
            if isinstance(p, ElementDecl):
                check_type(p.type_name, p.line, f"element {p.name!r}")

    def check_attributes(attrs) -> None:
        for a in attrs:
            if isinstance(a, AttributeRef):
                if a.ref not in schema.top_attributes:
                    raise SchemaError("UNRESOLVED_REF", f"attribute ref {a.ref!r} is not declared",
                                      f"line {a.line}")
            else:
                check_type(a.type_name, a.line, f"attribute {a.name!r}")
                if a.type_name in schema.complex_types:
                    raise SchemaError("UNRESOLVED_REF", f"attribute {a.name!r} needs a simple type",
                                      f"line {a.line}")

    for ct in schema.complex_types.values():
        if ct.base is not None:
            if ct.base not in schema.complex_types:
                raise SchemaError("UNRESOLVED_REF", f"base type {ct.base!r} of {ct.key!r} is not a "
                                  "declared complex type", f"line {ct.line}")
        check_particles(ct.content)
        check_attributes(ct.attributes)
    for g in schema.model_groups.values():
        check_particles(g.content)
    for e in schema.top_elements.values():
        check_type(e.type_name, e.line, f"element {e.name!r}")
        if e.substitution_group and e.substitution_group not in schema.top_elements:
            raise SchemaError("UNRESOLVED_REF",
                              f"substitution group head {e.substitution_group!r} is not declared",
                              f"line {e.line}")
    check_attributes(schema.top_attributes.values())
    for st in schema.simple_types.values():
        check_type(st.base, 0, f"simple type {st.name!r}")
    keys = {ic.name for ic in schema.identity_constraints if ic.kind in ("key", "unique")}
    for ic in schema.identity_constraints:
        if ic.kind == "keyref" and ic.refer not in keys:
            raise SchemaError("UNRESOLVED_REF", f"keyref {ic.name!r} refers to unknown key {ic.refer!r}",
                              f"line {ic.line}")


def parse_schema(text: str) -> XsdSchema:
    """Parse XML Schema text into an ``XsdSchema``."""
    doc = parse_xml(text, SchemaError, keep_whitespace=False)
    return _Parser(doc).parse()


# -- serialization ---------------------------------------------------------

def _occ_attrs(lo: int, hi: Optional[int]) -> str:
    out = ""
    if lo != 1:
        out += f' minOccurs="{lo}"'
    if hi != 1:
        out += f' maxOccurs="{"unbounded" if hi is None else hi}"'
    return out


def _opt(name: str, value: Optional[str]) -> str:
    return "" if value is None else f' {name}="{escape_attr(value)}"'


class _Writer:
    def __init__(self, schema: XsdSchema):
        self.schema = schema
        self.lines: list[str] = []

    def emit(self, depth: int, text: str) -> None:
        self.lines.append("  " * depth + text)

    def annotation(self, depth: int, text: Optional[str]) -> None:
        if text:
            self.emit(depth, "<xs:annotation>")
            self.emit(depth + 1, f"<xs:documentation>{escape_text(text)}</xs:documentation>")
            self.emit(depth, "</xs:annotation>")

    def element(self, depth: int, e: Union[ElementDecl, ElementRef], top: bool = False) -> None:
        if isinstance(e, ElementRef):
            self.emit(depth, f'<xs:element ref="{e.ref}"{_occ_attrs(e.min_occurs, e.max_occurs)}/>')
            return
        attrs = f' name="{e.name}"'
        if e.type_name is not None:
            attrs += f' type="{e.type_name}"'
        if not top:
            attrs += _occ_attrs(e.min_occurs, e.max_occurs)
        attrs += _opt("default", e.default) + _opt("fixed", e.fixed)
        attrs += _opt("substitutionGroup", e.substitution_group)
        if e.abstract:
            attrs += ' abstract="true"'
        inner_ic = [ic for ic in self.schema.identity_constraints
                    if ic.host == e.name and ic.context == e.context]
        alternatives = [x for x in self.schema.xsd11_constructs
                        if x.kind == "alternative" and x.context == e.name]
        if not (e.annotation or e.anonymous_type or inner_ic or alternatives):
            self.emit(depth, f"<xs:element{attrs}/>")
            return
        self.emit(depth, f"<xs:element{attrs}>")
        self.annotation(depth + 1, e.annotation)
        if e.anonymous_type:
            self.complex_type(depth + 1, self.schema.complex_types[e.anonymous_type])
        for alt in alternatives:
            self.emit(depth + 1, alt.text)
        for ic in inner_ic:
            refer = f' refer="{ic.refer}"' if ic.refer else ""
            self.emit(depth + 1, f'<xs:{ic.kind} name="{ic.name}"{refer}>')
            self.emit(depth + 2, f'<xs:selector xpath="{escape_attr(ic.selector)}"/>')
            for f_ in ic.fields:
                self.emit(depth + 2, f'<xs:field xpath="{escape_attr(f_)}"/>')
            self.emit(depth + 1, f"</xs:{ic.kind}>")
        self.emit(depth, "</xs:element>")

    def attribute(self, depth: int, a) -> None:
        if isinstance(a, AttributeRef):
            use = "" if a.use == "optional" else f' use="{a.use}"'
            self.emit(depth, f'<xs:attribute ref="{a.ref}"{use}/>')
            return
        attrs = f' name="{a.name}" type="{a.type_name}"'
        if a.use != "optional":
            attrs += f' use="{a.use}"'
        attrs += _opt("default", a.default) + _opt("fixed", a.fixed)
        if a.annotation:
            self.emit(depth, f"<xs:attribute{attrs}>")
            self.annotation(depth + 1, a.annotation)
            self.emit(depth, "</xs:attribute>")
        else:
            self.emit(depth, f"<xs:attribute{attrs}/>")

    def particle(self, depth: int, p: Particle) -> None:
        if isinstance(p, (ElementDecl, ElementRef)):
            self.element(depth, p)
        elif isinstance(p, GroupRef):
            self.emit(depth, f'<xs:group ref="{p.ref}"{_occ_attrs(p.min_occurs, p.max_occurs)}/>')
        elif isinstance(p, Any):
            self.emit(depth, f'<xs:any namespace="{p.namespace}" processContents="{p.process_contents}"'
                             f"{_occ_attrs(p.min_occurs, p.max_occurs)}/>")
        else:
            tag = {Sequence: "sequence", Choice: "choice", All: "all"}[type(p)]
            occ = _occ_attrs(p.min_occurs, p.max_occurs)
            if not p.items:
                self.emit(depth, f"<xs:{tag}{occ}/>")
                return
            self.emit(depth, f"<xs:{tag}{occ}>")
            for item in p.items:
                self.particle(depth + 1, item)
            self.emit(depth, f"</xs:{tag}>")

    def complex_type(self, depth: int, ct: ComplexType) -> None:
        attrs = f' name="{ct.name}"' if ct.name else ""
        if ct.mixed:
            attrs += ' mixed="true"'
        if ct.abstract:
            attrs += ' abstract="true"'
        self.emit(depth, f"<xs:complexType{attrs}>")
        self.annotation(depth + 1, ct.annotation)
        d = depth + 1
        if ct.base is not None:
            self.emit(d, "<xs:complexContent>")
            self.emit(d + 1, f'<xs:{ct.derivation} base="{ct.base}">')
            d += 2
        if ct.content is not None:
            self.particle(d, ct.content)
        for a in ct.attributes:
            self.attribute(d, a)
        if ct.any_attribute:
            self.emit(d, "<xs:anyAttribute/>")
        for text in ct.asserts:
            self.emit(d, text)
        if ct.base is not None:
            self.emit(depth + 2, f"</xs:{ct.derivation}>")
            self.emit(depth + 1, "</xs:complexContent>")
        self.emit(depth, "</xs:complexType>")

    def write(self) -> str:
        s = self.schema
        tns = _opt("targetNamespace", s.target_namespace)
        self.emit(0, f'<xs:schema xmlns:xs="{XS}"{tns}>')
        for st in s.simple_types.values():
            self.emit(1, f'<xs:simpleType name="{st.name}">')
            self.annotation(2, st.annotation)
            if st.variety == "restriction":
                self.emit(2, f'<xs:restriction base="{st.base}"/>')
            elif st.variety == "list":
                self.emit(2, '<xs:list itemType="xs:string"/>')
            else:
                self.emit(2, '<xs:union memberTypes="xs:string"/>')
            self.emit(1, "</xs:simpleType>")
        for ct in s.named_types():
            self.complex_type(1, ct)
        for g in s.model_groups.values():
            self.emit(1, f'<xs:group name="{g.name}">')
            self.annotation(2, g.annotation)
            self.particle(2, g.content)
            self.emit(1, "</xs:group>")
        for e in s.top_elements.values():
            self.element(1, e, top=True)
        for a in s.top_attributes.values():
            self.attribute(1, a)
        for x in s.xsd11_constructs:
            if x.kind in ("redefine", "override"):
                self.emit(1, x.text)
        self.emit(0, "</xs:schema>")
        return "\n".join(self.lines) + "\n"


def serialize_schema(schema: XsdSchema) -> str:
    """Write ``schema`` back out as XSD text (``parse_schema`` inverts it)."""
    return _Writer(schema).write()
