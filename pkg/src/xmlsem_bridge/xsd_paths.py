"""Absolute XPath enumeration over a parsed schema.

Every element or attribute that can occur in a conforming instance gets one
absolute path per place it can occur.  Complex types collect the paths of
elements they govern directly (derived types keep their own paths).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import SchemaError
from .xsd_model import (
    All, Any, AttributeDecl, AttributeRef, Choice, ComplexType, Context, ElementDecl,
    ElementRef, GroupRef, Sequence, XsdSchema, iter_particles,
)

DEFAULT_MAX_DEPTH = 16

# (context kind, context name, "element" | "attribute", local name)
DeclKey = tuple


def decl_key(decl: Union[ElementDecl, AttributeDecl]) -> DeclKey:
    kind = "attribute" if isinstance(decl, AttributeDecl) else "element"
    return (decl.context.kind, decl.context.name, kind, decl.name)


@dataclass(frozen=True)
class PathInfo:
    path: str
    parent: str  # "" for the document element
    decl: DeclKey
    type_key: str  # complex type key, or the simple type name
    is_attribute: bool
    min_occurs: int  # occurrences per parent node
    max_occurs: Optional[int]


@dataclass(frozen=True)
class PathCatalog:
    class_paths: dict = field(default_factory=dict)  # type key -> sorted paths
    decl_paths: dict = field(default_factory=dict)  # DeclKey -> sorted paths
    attachments: dict = field(default_factory=dict)  # parent path -> ((step, DeclKey), ...)
    paths: dict = field(default_factory=dict)  # path -> PathInfo

    def single_valued(self, path: str) -> bool:
        info = self.paths.get(path)
        return info is not None and info.max_occurs is not None and info.max_occurs <= 1


def root_elements(schema: XsdSchema) -> list[ElementDecl]:
    """Top-level elements that are neither referenced nor substitution members."""
    referenced = set()
    containers = [ct.content for ct in schema.complex_types.values()]
    containers += [g.content for g in schema.model_groups.values()]
    for content in containers:
        for p in iter_particles(content):
            if isinstance(p, ElementRef):
                referenced.add(p.ref)
    members = {m for ms in schema.substitution_groups.values() for m in ms}
    return [e for name, e in schema.top_elements.items()
            if name not in referenced and name not in members]


def substitution_members(schema: XsdSchema, head: str) -> list[str]:
    """Transitive substitution-group members of ``head``, sorted."""
    out: list[str] = []
    todo = list(schema.substitution_groups.get(head, ()))
    while todo:
        m = todo.pop(0)
        if m not in out:
            out.append(m)
            todo.extend(schema.substitution_groups.get(m, ()))
    return sorted(out)


class _Walker:
    def __init__(self, schema: XsdSchema, max_depth: int):
        self.schema = schema
        self.max_depth = max_depth
        self.class_paths: dict[str, list[str]] = {}
        self.decl_paths: dict[DeclKey, list[str]] = {}
        self.attachments: dict[str, list[tuple[str, DeclKey]]] = {}
        self.paths: dict[str, PathInfo] = {}

    def unsupported(self, what: str, line: int) -> SchemaError:
        return SchemaError("UNSUPPORTED_CONSTRUCT", f"{what} has no finite path set",
                           f"line {line}")

    # -- content models ----------------------------------------------------

    def content_of(self, ct: ComplexType) -> list:
        """Particles of ``ct`` including inherited extension content."""
        parts = []
        if ct.base is not None and ct.derivation == "extension":
            parts.extend(self.content_of(self.schema.complex_types[ct.base]))
        if ct.content is not None:
            parts.append(ct.content)
        return parts

    def attributes_of(self, ct: ComplexType) -> list[AttributeDecl]:
        own: list[AttributeDecl] = []
        for a in ct.attributes:
            own.append(self.schema.top_attributes[a.ref] if isinstance(a, AttributeRef) else a)
        if ct.base is None:
            return own
        inherited = self.attributes_of(self.schema.complex_types[ct.base])
        names = {a.name for a in own}
        return [a for a in inherited if a.name not in names] + own

    def child_slots(self, ct: ComplexType) -> list[tuple[ElementDecl, int, Optional[int]]]:
        """(declaration, min, max) for each child element name of ``ct``."""
        slots: list[tuple[ElementDecl, int, Optional[int]]] = []

        def mul(a: Optional[int], b: Optional[int]) -> Optional[int]:
            if a == 0 or b == 0:
                return 0
            return None if a is None or b is None else a * b

        def walk(p, lo: int, hi: Optional[int], seen_groups: tuple) -> None:
            if isinstance(p, (ElementDecl, ElementRef)):
                decl = self.schema.resolve(p)
                plo, phi = lo * p.min_occurs, mul(hi, p.max_occurs)
                members = substitution_members(self.schema, decl.name)
                if not decl.abstract:
                    slots.append((decl, 0 if members else plo, phi))
                for m in members:
                    mdecl = self.schema.top_elements[m]
                    if not mdecl.abstract:
                        slots.append((mdecl, 0, phi))
            elif isinstance(p, GroupRef):
                if p.ref in seen_groups:
                    raise SchemaError("RECURSION_LIMIT", f"group {p.ref!r} contains itself",
                                      f"line {p.line}")
                g = self.schema.model_groups[p.ref]
                walk(g.content, lo * p.min_occurs, mul(hi, p.max_occurs), seen_groups + (p.ref,))
            elif isinstance(p, (Sequence, Choice)):
                ilo = 0 if isinstance(p, Choice) and len(p.items) > 1 else lo * p.min_occurs
                ihi = mul(hi, p.max_occurs)
                for item in p.items:
                    walk(item, ilo, ihi, seen_groups)
            elif isinstance(p, All):
                raise self.unsupported("xs:all", 0)
            elif isinstance(p, Any):
                raise self.unsupported("xs:any", p.line)

        for part in self.content_of(ct):
            walk(part, 1, 1, ())
        merged: dict[str, tuple[ElementDecl, int, Optional[int]]] = {}
        for decl, lo, hi in slots:
            if decl.name in merged:
                prev, plo, phi = merged[decl.name]
                if prev != decl:
                    raise SchemaError(
                        "UNSUPPORTED_CONSTRUCT",
                        f"two declarations of element {decl.name!r} in content of {ct.key!r}",
                        f"line {decl.line}")
                merged[decl.name] = (decl, plo + lo, None if hi is None or phi is None else phi + hi)
            else:
                merged[decl.name] = (decl, lo, hi)
        return list(merged.values())

    # -- enumeration --------------------------------------------------------

    def record(self, info: PathInfo) -> None:
        if info.path in self.paths:
            raise SchemaError("UNSUPPORTED_CONSTRUCT", f"path {info.path} reached twice")
        self.paths[info.path] = info
        self.decl_paths.setdefault(info.decl, []).append(info.path)
        step = info.path.rsplit("/", 1)[1]
        self.attachments.setdefault(info.parent, []).append((step, info.decl))

    def visit(self, decl: ElementDecl, parent: str, lo: int, hi: Optional[int],
              stack: list[tuple[str, str]]) -> None:
        path = f"{parent}/{decl.name}"
        depth = len(stack) + 1
        type_key = decl.type_key
        if depth > self.max_depth:
            raise SchemaError("RECURSION_LIMIT",
                              f"path depth exceeds {self.max_depth}; cycle {self.cycle(stack, decl)}",
                              path)
        self.record(PathInfo(path, parent, decl_key(decl), type_key, False, lo, hi))
        ct = self.schema.complex_types.get(type_key)
        if ct is None:
            return
        self.class_paths.setdefault(ct.key, []).append(path)
        stack = stack + [(decl.name, ct.key)]
        for a in self.attributes_of(ct):
            self.record(PathInfo(f"{path}/@{a.name}", path, decl_key(a), a.type_name, True,
                                 1 if a.use == "required" else 0, 1))
        for child, clo, chi in self.child_slots(ct):
            self.visit(child, path, clo, chi, stack)

    @staticmethod
    def cycle(stack: list[tuple[str, str]], decl: ElementDecl) -> str:
        chain = stack + [(decl.name, decl.type_key)]
        last_type = chain[-1][1]
        for i in range(len(chain) - 2, -1, -1):
            if chain[i][1] == last_type:
                return " -> ".join(name for name, _ in chain[i:])
        return " -> ".join(name for name, _ in chain)

    def run(self) -> PathCatalog:
        for x in self.schema.xsd11_constructs:
            if x.kind in ("redefine", "override"):
                raise SchemaError("UNSUPPORTED_CONSTRUCT",
                                  f"xs:{x.kind} changes types and is not enumerated")
        for ct in self.schema.complex_types.values():
            if ct.any_attribute:
                raise self.unsupported(f"xs:anyAttribute in {ct.key!r}", ct.line)
        for root in root_elements(self.schema):
            self.visit(root, "", 1, 1, [])
        return PathCatalog(
            class_paths={k: tuple(sorted(v)) for k, v in sorted(self.class_paths.items())},
            decl_paths={k: tuple(sorted(v)) for k, v in sorted(self.decl_paths.items())},
            attachments={k: tuple(v) for k, v in sorted(self.attachments.items())},
            paths=dict(sorted(self.paths.items())),
        )


def child_slots(schema: XsdSchema, ct: ComplexType) -> list[tuple[ElementDecl, int, Optional[int]]]:
    """Child element declarations of ``ct`` (inherited content included) with
    their per-parent occurrence bounds; substitution members are expanded."""
    return _Walker(schema, DEFAULT_MAX_DEPTH).child_slots(ct)


def attribute_decls(schema: XsdSchema, ct: ComplexType) -> list[AttributeDecl]:
    """Attribute declarations of ``ct``, inherited ones included."""
    return _Walker(schema, DEFAULT_MAX_DEPTH).attributes_of(ct)


def enumerate_paths(schema: XsdSchema, max_depth: int = DEFAULT_MAX_DEPTH) -> PathCatalog:
    """Enumerate absolute element/attribute paths of ``schema``.

    Raises RECURSION_LIMIT when a recursive type would need paths deeper than
    ``max_depth`` and UNSUPPORTED_CONSTRUCT for wildcards and ``xs:all``.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    return _Walker(schema, max_depth).run()


__all__ = ["DeclKey", "PathCatalog", "PathInfo", "attribute_decls", "child_slots",
           "decl_key", "enumerate_paths", "root_elements", "substitution_members", "Context"]
