"""XML Schema to OWL transformation.

``transform`` produces two ontologies: the schema ontology, which captures
the semantics of the schema constructs as classes, properties and axioms,
and the backwards-compatibility ontology, whose individuals record the
syntactic details (element order, occurrence bounds, verbatim XSD 1.1
constructs) that OWL cannot express.
"""

from __future__ import annotations

from typing import Optional, Union

from .errors import SchemaError
from .naming import NamingRule, sanitize
from .owl_model import (
    OWL_THING, Axiom, ClassExpr, Datatype, Individual, Literal, Ontology, OwlClass,
    OwlProperty, Ref, add_construct, expand,
)
from .xsd_model import (
    All, AttributeDecl, AttributeRef, Choice, ComplexType, ElementDecl,
    ElementRef, GroupRef, Sequence, XsdSchema, iter_particles,
)
from .xsd_paths import attribute_decls, child_slots, root_elements, substitution_members

DEFAULT_BASE_IRI = "http://example.com/ns#"

# backwards-compatibility vocabulary
COMPLEX_TYPE_INFO = "ComplexTypeInfoType"
ELEMENT_INFO = "ElementInfoType"
DATATYPE_PROPERTY_INFO = "DatatypePropertyInfoType"
OBJECT_PROPERTY_INFO = "ObjectPropertyInfoType"
SCHEMA_INFO = "SchemaInfoType"
BC_CLASSES = (COMPLEX_TYPE_INFO, ELEMENT_INFO, DATATYPE_PROPERTY_INFO, OBJECT_PROPERTY_INFO)
BC_DATATYPE_PROPERTIES = {
    "name": "xs:string", "order": "xs:integer", "minOccurs": "xs:integer",
    "maxOccurs": "xs:string", "default": "xs:string", "fixed": "xs:string",
    "use": "xs:string", "reference": "xs:string", "verbatim": "xs:string",
}
BC_OBJECT_PROPERTIES = ("schemaConstruct",)


def bc_base_iri(base_iri: str) -> str:
    return base_iri.rstrip("#/") + "/bc#"


def make_class_id(ct: ComplexType) -> str:
    """Named types keep their name; anonymous types use ``NS_<host>_UNType``."""
    return ct.name if ct.name is not None else ct.key


def type_component(schema: XsdSchema, type_name: str) -> str:
    """The range part of a property id (``xs_string``, ``Reviews_Type``...)."""
    if type_name in schema.complex_types:
        return make_class_id(schema.complex_types[type_name])
    return sanitize(type_name)


def make_property_id(name: str, group: Optional[str], range_component: str) -> str:
    """``<name>[_<group>]__<range>``, e.g. ``Title_videoGroup__xs_string``."""
    core = name + (NamingRule.GROUP_SEPARATOR + group if group else "")
    return core + NamingRule.TYPE_SEPARATOR + range_component


def property_id(schema: XsdSchema, decl: Union[ElementDecl, AttributeDecl]) -> str:
    group = decl.context.name if decl.context.kind == "group" else None
    if isinstance(decl, ElementDecl):
        return make_property_id(decl.name, group, type_component(schema, decl.type_key))
    return make_property_id(decl.name, group, type_component(schema, decl.type_name))


def info_id(schema: XsdSchema, decl: Union[ElementDecl, AttributeDecl]) -> str:
    """Backwards-compatibility id: locally declared constructs carry their type."""
    pid = property_id(schema, decl)
    if decl.context.kind == "type":
        return decl.context.name + "_" + pid
    return pid


def _range(schema: XsdSchema, type_name: str) -> str:
    if type_name in schema.complex_types:
        return make_class_id(schema.complex_types[type_name])
    return type_name


def _declarations(schema: XsdSchema):
    """Every element/attribute declaration in the schema, in a stable order."""
    seen: list = []

    def add(d) -> None:
        if d not in seen:
            seen.append(d)

    for ct in schema.complex_types.values():
        for p in iter_particles(ct.content):
            if isinstance(p, ElementDecl):
                add(p)
        for a in ct.attributes:
            if isinstance(a, AttributeDecl):
                add(a)
    for g in schema.model_groups.values():
        for p in iter_particles(g.content):
            if isinstance(p, ElementDecl):
                add(p)
    for e in schema.top_elements.values():
        add(e)
    for a in schema.top_attributes.values():
        add(a)
    return seen


class _Transformer:
    def __init__(self, schema: XsdSchema, base_iri: str):
        self.schema = schema
        self.base = base_iri
        self.os = Ontology(base_iri)
        self.bc = Ontology(bc_base_iri(base_iri))
        self.group_hosts = self._group_hosts()
        self.ref_hosts = self._ref_hosts()
        self.roots = {e.name for e in root_elements(schema)}

    # -- hosts ------------------------------------------------------------

    def _groups_in(self, content, seen: tuple = ()) -> set[str]:
        out: set[str] = set()
        for p in iter_particles(content):
            if isinstance(p, GroupRef) and p.ref not in seen:
                out.add(p.ref)
                out |= self._groups_in(self.schema.model_groups[p.ref].content, seen + (p.ref,))
        return out

    def _group_hosts(self) -> dict[str, set[str]]:
        hosts: dict[str, set[str]] = {}
        for ct in self.schema.complex_types.values():
            for g in self._groups_in(ct.content):
                hosts.setdefault(g, set()).add(make_class_id(ct))
        return hosts

    def _ref_hosts(self) -> dict[str, set[str]]:
        """Top-level element/attribute name -> classes referencing it."""
        hosts: dict[str, set[str]] = {}
        for ct in self.schema.complex_types.values():
            cid = make_class_id(ct)
            for p in iter_particles(ct.content):
                if isinstance(p, ElementRef):
                    hosts.setdefault(p.ref, set()).add(cid)
            for a in ct.attributes:
                if isinstance(a, AttributeRef):
                    hosts.setdefault("@" + a.ref, set()).add(cid)
        for gname, g in self.schema.model_groups.items():
            for p in iter_particles(g.content):
                if isinstance(p, ElementRef):
                    for cid in self.group_hosts.get(gname, ()):
                        hosts.setdefault(p.ref, set()).add(cid)
        return hosts

    def heads_of(self, name: str) -> list[str]:
        return [head for head in self.schema.substitution_groups
                if name in substitution_members(self.schema, head)]

    def domains(self, decl: Union[ElementDecl, AttributeDecl]) -> frozenset:
        ctx = decl.context
        if ctx.kind == "type":
            found = {make_class_id(self.schema.complex_types[ctx.name])}
        elif ctx.kind == "group":
            found = set(self.group_hosts.get(ctx.name, ()))
        elif isinstance(decl, AttributeDecl):
            found = set(self.ref_hosts.get("@" + decl.name, ()))
        else:
            found = set(self.ref_hosts.get(decl.name, ()))
            for head in self.heads_of(decl.name):
                found |= self.ref_hosts.get(head, set())
            if decl.name in self.roots:
                found.add(OWL_THING)
        if not found:
            found = {OWL_THING}
        # a domain subsumed by another domain adds nothing
        minimal = {c for c in found
                   if not any(s in found for s in self.os_super_classes(c))}
        return frozenset(minimal or found)

    def os_super_classes(self, cid: str) -> list[str]:
        out = []
        for ct in self.schema.complex_types.values():
            if make_class_id(ct) == cid:
                cur = ct
                while cur.base is not None:
                    out.append(make_class_id(self.schema.complex_types[cur.base]))
                    cur = self.schema.complex_types[cur.base]
        return out

    # -- schema ontology ----------------------------------------------------

    def class_expr(self, particle) -> Optional[Union[ClassExpr, str]]:
        if isinstance(particle, (ElementDecl, ElementRef)):
            return property_id(self.schema, self.schema.resolve(particle))
        if isinstance(particle, GroupRef):
            return self.class_expr(self.schema.model_groups[particle.ref].content)
        if isinstance(particle, (Sequence, Choice, All)):
            ops = tuple(x for x in (self.class_expr(i) for i in particle.items) if x is not None)
            kind = "union" if isinstance(particle, Choice) else "intersection"
            note = {Sequence: "xs:sequence", Choice: "xs:choice", All: "xs:all"}[type(particle)]
            return ClassExpr(kind, ops, note)
        return None  # wildcards have no property

    def build_schema_ontology(self) -> None:
        s = self.schema
        for st in s.simple_types.values():
            add_construct(self.os, Datatype(st.name, st.base))
            if st.annotation:
                self.os.comments[st.name] = st.annotation
        for ct in s.complex_types.values():
            cid = make_class_id(ct)
            supers = (make_class_id(s.complex_types[ct.base]),) if ct.base else (OWL_THING,)
            definition = self.class_expr(ct.content) if ct.content is not None else None
            if isinstance(definition, str):
                definition = ClassExpr("intersection", (definition,), None)
            add_construct(self.os, OwlClass(cid, supers, definition))
            if ct.annotation:
                self.os.comments[cid] = ct.annotation
        for decl in _declarations(s):
            pid = property_id(s, decl)
            if isinstance(decl, ElementDecl):
                complex_range = decl.type_key in s.complex_types
                rng = _range(s, decl.type_key)
            else:
                complex_range = False
                rng = decl.type_name
            supers = frozenset()
            if isinstance(decl, ElementDecl) and decl.substitution_group:
                head = s.top_elements[decl.substitution_group]
                supers = frozenset({property_id(s, head)})
            prop = OwlProperty(pid, "object" if complex_range else "datatype",
                               self.domains(decl), frozenset({rng}), supers)
            add_construct(self.os, prop)
            if decl.annotation:
                self.os.comments[pid] = decl.annotation
        for ic in s.identity_constraints:
            if ic.kind == "keyref":
                continue
            cid, fields = self.resolve_identity(ic)
            add_construct(self.os, Axiom("hasKey", (cid,) + tuple(fields)))
            if ic.kind == "key":
                for f in fields:
                    add_construct(self.os, Axiom("exactCardinality", (cid, f), 1))

    def host_decl(self, ic) -> ElementDecl:
        s = self.schema
        if ic.context.kind == "top":
            return s.top_elements[ic.host]
        content = (s.complex_types[ic.context.name].content if ic.context.kind == "type"
                   else s.model_groups[ic.context.name].content)
        for p in iter_particles(content):
            if isinstance(p, ElementDecl) and p.name == ic.host:
                return p
        raise SchemaError("UNRESOLVED_REF", f"host element {ic.host!r} of {ic.name!r} not found",
                          f"line {ic.line}")

    def resolve_identity(self, ic) -> tuple[str, list[str]]:
        s = self.schema
        fail = SchemaError("UNRESOLVED_REF", f"cannot resolve selector/fields of {ic.kind} {ic.name!r}",
                           f"line {ic.line}")
        current = s.complex_types.get(self.host_decl(ic).type_key)
        if current is None:
            raise fail
        sel = ic.selector.strip()
        descendant = sel.startswith(".//")
        steps = [x for x in sel.replace(".//", "").split("/") if x not in ("", ".")]
        for i, step in enumerate(steps):
            target = None
            frontier = [current]
            seen = set()
            while frontier and target is None:
                ct = frontier.pop(0)
                if ct.key in seen:
                    continue
                seen.add(ct.key)
                for decl, _, _ in child_slots(s, ct):
                    if decl.name == step:
                        target = s.complex_types.get(decl.type_key)
                        break
                    if descendant and i == 0 and decl.type_key in s.complex_types:
                        frontier.append(s.complex_types[decl.type_key])
            if target is None:
                raise fail
            current = target
        fields = []
        for f in ic.fields:
            f = f.strip()
            if f.startswith("./"):
                f = f[2:]
            if f.startswith("@"):
                match = [a for a in attribute_decls(s, current) if a.name == f[1:]]
            else:
                match = [d for d, _, _ in child_slots(s, current) if d.name == f]
            if not match:
                raise fail
            fields.append(property_id(s, match[0]))
        return make_class_id(current), fields

    # -- backwards-compatibility ontology -------------------------------------

    def build_bc_vocabulary(self) -> None:
        for cid in BC_CLASSES:
            add_construct(self.bc, OwlClass(cid))
        for pid, rng in BC_DATATYPE_PROPERTIES.items():
            add_construct(self.bc, OwlProperty(pid, "datatype", frozenset({OWL_THING}),
                                               frozenset({rng})))
        for pid in BC_OBJECT_PROPERTIES:
            add_construct(self.bc, OwlProperty(pid, "object", frozenset({OWL_THING}),
                                               frozenset({OWL_THING})))

    def os_ref(self, ident: str) -> Ref:
        return Ref(expand(ident, self.base))

    def element_order(self) -> dict[int, tuple[int, str]]:
        """id(particle) -> (1-based order among element particles, context name)."""
        order: dict[int, tuple[int, str]] = {}
        containers = [(ct.key, ct.content) for ct in self.schema.complex_types.values()]
        containers += [(g.name, g.content) for g in self.schema.model_groups.values()]
        for name, content in containers:
            k = 0
            for p in iter_particles(content):
                if isinstance(p, (ElementDecl, ElementRef)):
                    k += 1
                    order[id(p)] = (k, name)
        return order

    def build_bc_individuals(self) -> None:
        s = self.schema
        order = self.element_order()
        for ct in s.complex_types.values():
            cid = make_class_id(ct)
            values = [("schemaConstruct", self.os_ref(cid)),
                      ("name", Literal(ct.name or ct.host or cid))]
            values += [("verbatim", Literal(a)) for a in ct.asserts]
            add_construct(self.bc, Individual(cid, COMPLEX_TYPE_INFO, tuple(values)))
        refs: dict[str, list[str]] = {}
        containers = [(ct.key, ct.content) for ct in s.complex_types.values()]
        containers += [(g.name, g.content) for g in s.model_groups.values()]
        for name, content in containers:
            for p in iter_particles(content):
                if isinstance(p, ElementRef):
                    k, _ = order[id(p)]
                    hi = "unbounded" if p.max_occurs is None else str(p.max_occurs)
                    refs.setdefault(p.ref, []).append(f"{name}#{k} [{p.min_occurs}..{hi}]")
        for decl in _declarations(s):
            pid = property_id(s, decl)
            iid = info_id(s, decl)
            prop = self.os.property(pid)
            cls = DATATYPE_PROPERTY_INFO if prop.kind == "datatype" else OBJECT_PROPERTY_INFO
            base_values = [("schemaConstruct", self.os_ref(pid)), ("name", Literal(decl.name))]
            if isinstance(decl, AttributeDecl):
                values = list(base_values) + [("use", Literal(decl.use))]
                if decl.default is not None:
                    values.append(("default", Literal(decl.default)))
                if decl.fixed is not None:
                    values.append(("fixed", Literal(decl.fixed)))
                add_construct(self.bc, Individual(iid, cls, tuple(values)))
                continue
            add_construct(self.bc, Individual(iid, cls, tuple(base_values)))
            ei = list(base_values)
            if decl.context.kind != "top":
                k, _ = order.get(id(decl), (0, ""))
                hi = "unbounded" if decl.max_occurs is None else str(decl.max_occurs)
                ei += [("order", Literal(str(k), "xs:integer")),
                       ("minOccurs", Literal(str(decl.min_occurs), "xs:integer")),
                       ("maxOccurs", Literal(hi))]
            ei += [("reference", Literal(r)) for r in refs.get(decl.name, ())
                   if decl.context.kind == "top"]
            if decl.default is not None:
                ei.append(("default", Literal(decl.default)))
            if decl.fixed is not None:
                ei.append(("fixed", Literal(decl.fixed)))
            for ic in s.identity_constraints:
                if ic.kind == "keyref" and ic.host == decl.name and ic.context == decl.context:
                    text = (f'<xs:keyref name="{ic.name}" refer="{ic.refer}" selector="{ic.selector}"'
                            f' fields="{" ".join(ic.fields)}"/>')
                    ei.append(("verbatim", Literal(text)))
            for x in s.xsd11_constructs:
                if x.kind == "alternative" and x.context == decl.name:
                    ei.append(("verbatim", Literal(x.text)))
            add_construct(self.bc, Individual(iid + NamingRule.ELEMENT_INFO_SUFFIX, ELEMENT_INFO,
                                              tuple(ei)))
        top_level = [x for x in s.xsd11_constructs if x.kind in ("redefine", "override")]
        if top_level:
            add_construct(self.bc, OwlClass(SCHEMA_INFO))
            add_construct(self.bc, Individual(
                "Schema", SCHEMA_INFO, tuple(("verbatim", Literal(x.text)) for x in top_level)))

    def run(self) -> tuple[Ontology, Ontology]:
        self.build_schema_ontology()
        self.build_bc_vocabulary()
        self.build_bc_individuals()
        return self.os, self.bc


def transform(schema: XsdSchema, base_iri: str = DEFAULT_BASE_IRI) -> tuple[Ontology, Ontology]:
    """Return ``(schema ontology, backwards-compatibility ontology)``."""
    return _Transformer(schema, base_iri).run()
