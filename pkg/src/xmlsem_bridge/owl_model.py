"""OWL ontology model with a deterministic Turtle writer and matching reader.

Identifiers are plain strings.  A bare name (``Video_Type``) is local to the
ontology's base IRI, a ``prefix:name`` string uses one of the fixed prefixes
below, and anything containing ``:/`` or starting with ``urn:`` is a full IRI.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import OntologyError, Warnings

PREFIXES = {
    "xs": "http://www.w3.org/2001/XMLSchema#",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "owl": "http://www.w3.org/2002/07/owl#",
}
OWL_THING = "owl:Thing"

_PN_LOCAL = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")
_INTEGER = re.compile(r"^[+-]?[0-9]+$")


def is_full_iri(term: str) -> bool:
    return ":/" in term or term.startswith("urn:")


def is_prefixed(term: str) -> bool:
    return not is_full_iri(term) and term.split(":", 1)[0] in PREFIXES and ":" in term


def expand(term: str, base_iri: str) -> str:
    """Full IRI for an identifier string."""
    if is_full_iri(term):
        return term
    if is_prefixed(term):
        prefix, local = term.split(":", 1)
        return PREFIXES[prefix] + local
    return base_iri + term


def compact(iri: str, base_iri: str) -> str:
    """Inverse of ``expand``: the shortest identifier string for ``iri``."""
    if base_iri and iri.startswith(base_iri) and _PN_LOCAL.match(iri[len(base_iri):]):
        return iri[len(base_iri):]
    for prefix, ns in PREFIXES.items():
        if iri.startswith(ns) and _PN_LOCAL.match(iri[len(ns):]):
            return f"{prefix}:{iri[len(ns):]}"
    return iri


# -- constructs --------------------------------------------------------------

@dataclass(frozen=True)
class ClassExpr:
    """Anonymous intersection/union over properties or nested expressions."""

    op: str  # intersection | union
    operands: tuple
    note: Optional[str] = None  # what the expression came from, e.g. "xs:sequence"


@dataclass(frozen=True)
class OwlClass:
    id: str
    super_classes: tuple = (OWL_THING,)
    definition: Optional[ClassExpr] = None

    def __post_init__(self):
        object.__setattr__(self, "super_classes", tuple(sorted(set(self.super_classes))))


@dataclass(frozen=True)
class OwlProperty:
    id: str
    kind: str  # datatype | object
    domains: frozenset = frozenset()
    ranges: frozenset = frozenset()
    super_properties: frozenset = frozenset()


@dataclass(frozen=True)
class Datatype:
    """A user-defined datatype restricting ``base``."""

    id: str
    base: str


@dataclass(frozen=True)
class Axiom:
    kind: str  # hasKey | exactCardinality
    operands: tuple  # hasKey: (class, prop, ...); exactCardinality: (class, prop)
    number: Optional[int] = None


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: Optional[str] = None  # identifier such as "xs:integer"


@dataclass(frozen=True)
class Ref:
    term: str


Value = Union[Literal, Ref]


@dataclass(frozen=True)
class Individual:
    id: str
    class_id: str
    property_values: tuple = ()  # ((property id, Value), ...)


Construct = Union[OwlClass, OwlProperty, Datatype, Axiom, Individual]


def _axiom_key(a: Axiom):
    return (a.operands[0], a.kind, a.operands[1:], a.number or 0)


@dataclass
class Ontology:
    base_iri: str
    classes: dict = field(default_factory=dict)
    datatype_properties: dict = field(default_factory=dict)
    object_properties: dict = field(default_factory=dict)
    datatypes: dict = field(default_factory=dict)
    axioms: tuple = ()
    individuals: dict = field(default_factory=dict)
    comments: dict = field(default_factory=dict)  # construct id -> text

    def kind_of(self, ident: str) -> Optional[str]:
        if ident in self.classes:
            return "class"
        if ident in self.datatype_properties:
            return "datatype property"
        if ident in self.object_properties:
            return "object property"
        if ident in self.datatypes:
            return "datatype"
        if ident in self.individuals:
            return "individual"
        return None

    def property(self, ident: str) -> Optional[OwlProperty]:
        return self.datatype_properties.get(ident) or self.object_properties.get(ident)

    def properties(self) -> list[OwlProperty]:
        return list(self.datatype_properties.values()) + list(self.object_properties.values())

    def add(self, construct: Construct) -> "Ontology":
        return add_construct(self, construct)

    def sub_properties(self, ident: str) -> list[str]:
        """Transitive sub-properties of ``ident`` (excluding itself), sorted."""
        found: set[str] = set()
        frontier = [ident]
        while frontier:
            cur = frontier.pop()
            for p in self.properties():
                if cur in p.super_properties and p.id not in found and p.id != ident:
                    found.add(p.id)
                    frontier.append(p.id)
        return sorted(found)

    def super_classes_of(self, ident: str) -> list[str]:
        """Transitive named super-classes (owl:Thing excluded)."""
        out: list[str] = []
        frontier = [ident]
        while frontier:
            cur = frontier.pop()
            cls = self.classes.get(cur)
            if cls is None:
                continue
            for s in cls.super_classes:
                if s != OWL_THING and s not in out:
                    out.append(s)
                    frontier.append(s)
        return out


def add_construct(ontology: Ontology, construct: Construct) -> Ontology:
    """Add ``construct``, merging with an existing construct of the same id.

    Properties merge by union of domains, ranges and super-properties.  An id
    already used for a different kind of construct is an ID_KIND_CONFLICT.
    """
    if isinstance(construct, Axiom):
        if construct not in ontology.axioms:
            ontology.axioms = tuple(sorted(ontology.axioms + (construct,), key=_axiom_key))
        return ontology

    if isinstance(construct, OwlClass):
        kind, table = "class", ontology.classes
    elif isinstance(construct, OwlProperty):
        kind = "datatype property" if construct.kind == "datatype" else "object property"
        table = (ontology.datatype_properties if construct.kind == "datatype"
                 else ontology.object_properties)
    elif isinstance(construct, Datatype):
        kind, table = "datatype", ontology.datatypes
    elif isinstance(construct, Individual):
        kind, table = "individual", ontology.individuals
    else:
        raise TypeError(f"not an ontology construct: {construct!r}")

    existing = ontology.kind_of(construct.id)
    if existing is not None and existing != kind:
        raise OntologyError("ID_KIND_CONFLICT",
                            f"{construct.id!r} is already a {existing}, cannot add it as a {kind}")
    old = table.get(construct.id)
    if old is None:
        table[construct.id] = construct
    elif isinstance(construct, OwlClass):
        supers = tuple(sorted(set(old.super_classes) | set(construct.super_classes)))
        if len(supers) > 1 and OWL_THING in supers:
            supers = tuple(s for s in supers if s != OWL_THING)
        table[construct.id] = OwlClass(construct.id, supers, old.definition or construct.definition)
    elif isinstance(construct, OwlProperty):
        table[construct.id] = OwlProperty(
            construct.id, construct.kind,
            old.domains | construct.domains,
            old.ranges | construct.ranges,
            old.super_properties | construct.super_properties,
        )
    elif isinstance(construct, Individual):
        if old.class_id != construct.class_id:
            raise OntologyError("ID_KIND_CONFLICT",
                                f"individual {construct.id!r} typed {old.class_id} and {construct.class_id}")
        extra = tuple(v for v in construct.property_values if v not in old.property_values)
        table[construct.id] = Individual(old.id, old.class_id, old.property_values + extra)
    elif old != construct:
        raise OntologyError("ID_KIND_CONFLICT", f"conflicting definitions of {construct.id!r}")
    return ontology


# -- Turtle writer -----------------------------------------------------------

def _escape_string(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"')
    return out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")


class _TurtleWriter:
    def __init__(self, ontology: Ontology):
        self.o = ontology

    def term(self, ident: str) -> str:
        if is_full_iri(ident):
            return f"<{ident}>"
        if is_prefixed(ident):
            return ident
        if _PN_LOCAL.match(ident):
            return f"ns:{ident}"
        return f"<{self.o.base_iri}{ident}>"

    def value(self, v: Value) -> str:
        if isinstance(v, Ref):
            return self.term(v.term)
        if v.datatype == "xs:integer" and _INTEGER.match(v.lexical):
            return v.lexical
        text = f'"{_escape_string(v.lexical)}"'
        if v.datatype is not None:
            text += "^^" + self.term(v.datatype)
        return text

    def expr(self, e: ClassExpr, depth: int, inline: bool) -> str:
        items = " ".join(self.expr(x, depth, True) if isinstance(x, ClassExpr) else self.term(x)
                         for x in e.operands)
        op = "owl:intersectionOf" if e.op == "intersection" else "owl:unionOf"
        parts = ["a owl:Class"]
        if e.note:
            parts.append(f'rdfs:comment "{_escape_string(e.note)}"')
        parts.append(f"{op} ( {items} )" if items else f"{op} ( )")
        if inline:
            return "[ " + " ; ".join(parts) + " ]"
        pad = "  " * (depth + 1)
        return "[\n" + " ;\n".join(pad + p for p in parts) + "\n" + "  " * depth + "]"

    def block(self, ident: str) -> list[str]:
        o = self.o
        s = self.term(ident)
        lines: list[str] = []
        if ident in o.classes:
            c = o.classes[ident]
            lines.append(f"{s} a owl:Class .")
            for sup in c.super_classes:
                lines.append(f"{s} rdfs:subClassOf {self.term(sup)} .")
            if c.definition is not None:
                lines.append(f"{s} owl:equivalentClass {self.expr(c.definition, 0, False)} .")
        elif ident in o.datatypes:
            d = o.datatypes[ident]
            lines.append(f"{s} a rdfs:Datatype .")
            lines.append(f"{s} owl:onDatatype {self.term(d.base)} .")
        elif ident in o.individuals:
            ind = o.individuals[ident]
            lines.append(f"{s} a {self.term(ind.class_id)} .")
            for prop, v in ind.property_values:
                lines.append(f"{s} {self.term(prop)} {self.value(v)} .")
        else:
            p = o.property(ident)
            kind = "owl:DatatypeProperty" if p.kind == "datatype" else "owl:ObjectProperty"
            lines.append(f"{s} a {kind} .")
            for d in sorted(p.domains):
                lines.append(f"{s} rdfs:domain {self.term(d)} .")
            for r in sorted(p.ranges):
                lines.append(f"{s} rdfs:range {self.term(r)} .")
            for sp in sorted(p.super_properties):
                lines.append(f"{s} rdfs:subPropertyOf {self.term(sp)} .")
        if ident in o.comments:
            lines.append(f'{s} rdfs:comment "{_escape_string(o.comments[ident])}" .')
        for a in o.axioms:
            if a.operands[0] == ident:
                lines.extend(self.axiom_lines(a))
        return lines

    def write(self) -> str:
        o = self.o
        out = [f"@prefix {p}: <{ns}> ." for p, ns in PREFIXES.items()]
        out.append(f"@prefix ns: <{o.base_iri}> .")
        ids = set(o.classes) | set(o.datatype_properties) | set(o.object_properties)
        ids |= set(o.datatypes) | set(o.individuals)
        for ident in sorted(ids):
            out.append("")
            out.extend(self.block(ident))
        orphans = sorted(set(o.comments) - ids)
        orphans_ax = [a for a in o.axioms if a.operands[0] not in ids]
        if orphans or orphans_ax:
            out.append("")
        for ident in orphans:
            out.append(f'{self.term(ident)} rdfs:comment "{_escape_string(o.comments[ident])}" .')
        for a in orphans_ax:
            out.extend(self.axiom_lines(a))
        return "\n".join(out) + "\n"

    def axiom_lines(self, a: Axiom) -> list[str]:
        s = self.term(a.operands[0])
        if a.kind == "hasKey":
            return [f"{s} owl:hasKey ( {' '.join(self.term(k) for k in a.operands[1:])} ) ."]
        return [f"{s} rdfs:subClassOf [\n  a owl:Restriction ;\n"
                f"  owl:onProperty {self.term(a.operands[1])} ;\n  owl:cardinality {a.number}\n] ."]


def serialize_turtle(ontology: Ontology) -> str:
    """Deterministic Turtle: fixed prefix block, then constructs sorted by id."""
    return _TurtleWriter(ontology).write()


# -- Turtle reader -------------------------------------------------------------

@dataclass(frozen=True)
class _Blank:
    props: tuple  # ((predicate, object), ...)


@dataclass(frozen=True)
class _Coll:
    items: tuple


@dataclass(frozen=True)
class _Lit:
    lexical: str
    datatype: Optional[str]


_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iri><[^>\s]*>)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<dt>\^\^)
  | (?P<num>[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)(?:[eE][+-]?[0-9]+)?)
  | (?P<directive>@prefix|@base)
  | (?P<pname>[A-Za-z][A-Za-z0-9_\-]*:[A-Za-z0-9_\-]*|:[A-Za-z0-9_\-]*)
  | (?P<kw>a\b|true\b|false\b)
  | (?P<punct>[.;,\[\]()])
""", re.VERBOSE)

_ESCAPES = {"n": "\n", "r": "\r", "t": "\t", '"': '"', "\\": "\\", "'": "'"}


def _unescape(body: str) -> str:
    out, i = [], 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            nxt = body[i + 1]
            if nxt in _ESCAPES:
                out.append(_ESCAPES[nxt])
                i += 2
                continue
            if nxt in "uU":
                width = 4 if nxt == "u" else 8
                out.append(chr(int(body[i + 2:i + 2 + width], 16)))
                i += 2 + width
                continue
        out.append(ch)
        i += 1
    return "".join(out)


class _TurtleReader:
    def __init__(self, text: str):
        self.tokens: list[tuple[str, str, int]] = []
        line = 1
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise OntologyError("SYNTAX", f"unexpected character {text[pos]!r}", f"line {line}")
            kind = m.lastgroup
            if kind != "ws":
                self.tokens.append((kind, m.group(), line))
            line += m.group().count("\n")
            pos = m.end()
        self.i = 0
        self.prefixes: dict[str, str] = {}

    def peek(self) -> Optional[tuple[str, str, int]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1][2] if self.tokens else 1
            raise OntologyError("SYNTAX", "unexpected end of input", f"line {last}")
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, text, line = self.next()
        if text != value:
            raise OntologyError("SYNTAX", f"expected {value!r}, found {text!r}", f"line {line}")

    def iri_of(self, kind: str, text: str, line: int) -> str:
        if kind == "iri":
            return text[1:-1]
        if kind == "pname":
            prefix, local = text.split(":", 1)
            if prefix not in self.prefixes:
                raise OntologyError("SYNTAX", f"undeclared prefix {prefix!r}", f"line {line}")
            return self.prefixes[prefix] + local
        if kind == "kw" and text == "a":
            return PREFIXES["rdf"] + "type"
        raise OntologyError("SYNTAX", f"expected an IRI, found {text!r}", f"line {line}")

    def obj(self):
        kind, text, line = self.next()
        if text == "[":
            props = self.pred_obj_list("]")
            self.expect("]")
            return _Blank(tuple(props))
        if text == "(":
            items = []
            while self.peek() is not None and self.peek()[1] != ")":
                items.append(self.obj())
            self.expect(")")
            return _Coll(tuple(items))
        if kind == "str":
            lexical = _unescape(text[1:-1])
            dt = None
            if self.peek() is not None and self.peek()[0] == "dt":
                self.next()
                k2, t2, l2 = self.next()
                dt = self.iri_of(k2, t2, l2)
            return _Lit(lexical, dt)
        if kind == "num":
            if re.match(r"^[+-]?[0-9]+$", text):
                return _Lit(text, PREFIXES["xs"] + "integer")
            if "e" in text.lower():
                return _Lit(text, PREFIXES["xs"] + "double")
            return _Lit(text, PREFIXES["xs"] + "decimal")
        if kind == "kw" and text in ("true", "false"):
            return _Lit(text, PREFIXES["xs"] + "boolean")
        return self.iri_of(kind, text, line)

    def pred_obj_list(self, closer: str) -> list:
        props = []
        while True:
            tok = self.peek()
            if tok is None or tok[1] in (closer, "."):
                return props
            k, t, l = self.next()
            pred = self.iri_of(k, t, l)
            while True:
                props.append((pred, self.obj()))
                if self.peek() is not None and self.peek()[1] == ",":
                    self.next()
                    continue
                break
            if self.peek() is not None and self.peek()[1] == ";":
                self.next()
                continue
            return props

    def statements(self) -> list[tuple[str, str, object, int]]:
        out = []
        while self.peek() is not None:
            kind, text, line = self.next()
            if kind == "directive":
                if text == "@base":
                    raise OntologyError("UNSUPPORTED_TRIPLE", "@base is not supported", f"line {line}")
                pk, pt, pl = self.next()
                if pk != "pname" or not pt.endswith(":"):
                    raise OntologyError("SYNTAX", "bad @prefix directive", f"line {pl}")
                ik, it, il = self.next()
                if ik != "iri":
                    raise OntologyError("SYNTAX", "bad @prefix directive", f"line {il}")
                self.prefixes[pt[:-1]] = it[1:-1]
                self.expect(".")
                continue
            if text == "[":
                raise OntologyError("UNSUPPORTED_TRIPLE", "blank-node subjects are not supported",
                                    f"line {line}")
            subject = self.iri_of(kind, text, line)
            for pred, obj in self.pred_obj_list("."):
                out.append((subject, pred, obj, line))
            self.expect(".")
        return out


_RDF_TYPE = PREFIXES["rdf"] + "type"


def parse_turtle(text: str, warnings: Optional[Warnings] = None) -> Ontology:
    """Read Turtle written by ``serialize_turtle`` (or hand-written equivalents).

    Triples outside the supported vocabulary raise UNSUPPORTED_TRIPLE, or are
    collected into ``warnings`` and skipped when a collector is given.
    """
    reader = _TurtleReader(text)
    stmts = reader.statements()
    base = reader.prefixes.get("ns", "")
    if not base:
        # hand-written ontologies may name their own namespace differently
        own = {v for k, v in reader.prefixes.items() if PREFIXES.get(k) != v and v not in PREFIXES.values()}
        if len(own) == 1:
            base = own.pop()
    o = Ontology(base)

    def ident(iri) -> str:
        if not isinstance(iri, str):
            raise OntologyError("UNSUPPORTED_TRIPLE", "expected an IRI")
        return compact(iri, base)

    def bad(msg: str, line: int) -> None:
        err = OntologyError("UNSUPPORTED_TRIPLE", msg, f"line {line}")
        if warnings is None:
            raise err
        warnings.add(err)

    types: dict[str, str] = {}
    for s, p, obj, line in stmts:
        if p == _RDF_TYPE and isinstance(obj, str):
            t = ident(obj)
            if t == "owl:Restriction":
                bad(f"named restriction {ident(s)}", line)
                continue
            types.setdefault(ident(s), t)

    def expr_of(node, line: int) -> Optional[ClassExpr]:
        if not isinstance(node, _Blank):
            return None
        op = note = None
        operands = ()
        for bp, bo in node.props:
            bp = ident(bp)
            if bp == "rdf:type" and bo == PREFIXES["owl"] + "Class":
                continue
            if bp == "rdfs:comment" and isinstance(bo, _Lit):
                note = bo.lexical
            elif bp in ("owl:intersectionOf", "owl:unionOf") and isinstance(bo, _Coll):
                op = "intersection" if bp == "owl:intersectionOf" else "union"
                items = []
                for it in bo.items:
                    if isinstance(it, _Blank):
                        sub = expr_of(it, line)
                        if sub is None:
                            return None
                        items.append(sub)
                    else:
                        items.append(ident(it))
                operands = tuple(items)
            else:
                return None
        if op is None:
            return None
        return ClassExpr(op, operands, note)

    def restriction_of(node) -> Optional[tuple[str, int]]:
        if not isinstance(node, _Blank):
            return None
        prop = card = None
        seen_type = False
        for bp, bo in node.props:
            bp = ident(bp)
            if bp == "rdf:type" and bo == PREFIXES["owl"] + "Restriction":
                seen_type = True
            elif bp == "owl:onProperty" and isinstance(bo, str):
                prop = ident(bo)
            elif bp == "owl:cardinality" and isinstance(bo, _Lit) and _INTEGER.match(bo.lexical):
                card = int(bo.lexical)
            else:
                return None
        if not seen_type or prop is None or card is None:
            return None
        return prop, card

    def literal(obj: _Lit) -> Literal:
        return Literal(obj.lexical, compact(obj.datatype, base) if obj.datatype else None)

    # declarations first so that ids are known regardless of statement order
    for subj, t in types.items():
        if t == "owl:Class":
            o.classes[subj] = OwlClass(subj, ())
        elif t in ("owl:DatatypeProperty", "owl:ObjectProperty"):
            kind = "datatype" if t == "owl:DatatypeProperty" else "object"
            add_construct(o, OwlProperty(subj, kind))
        elif t == "rdfs:Datatype":
            pass
        elif t == "owl:Ontology":
            continue
        else:
            add_construct(o, Individual(subj, t))

    supers: dict[str, list[str]] = {}
    for s, p, obj, line in stmts:
        subj, pred = ident(s), ident(p)
        if pred == "rdf:type":
            continue
        kind = o.kind_of(subj) or ("datatype" if types.get(subj) == "rdfs:Datatype" else None)
        if pred == "rdfs:comment" and isinstance(obj, _Lit) and kind != "individual":
            o.comments[subj] = obj.lexical
        elif kind == "class" and pred == "rdfs:subClassOf":
            r = restriction_of(obj)
            if r is not None:
                add_construct(o, Axiom("exactCardinality", (subj, r[0]), r[1]))
            elif isinstance(obj, str):
                supers.setdefault(subj, []).append(ident(obj))
            else:
                bad(f"unsupported subClassOf object for {subj}", line)
        elif kind == "class" and pred == "owl:equivalentClass":
            e = expr_of(obj, line)
            if e is None:
                bad(f"unsupported class expression for {subj}", line)
            else:
                c = o.classes[subj]
                o.classes[subj] = OwlClass(subj, c.super_classes, e)
        elif kind == "class" and pred == "owl:hasKey" and isinstance(obj, _Coll):
            add_construct(o, Axiom("hasKey", (subj,) + tuple(ident(x) for x in obj.items)))
        elif kind in ("datatype property", "object property") and pred in (
                "rdfs:domain", "rdfs:range", "rdfs:subPropertyOf") and isinstance(obj, str):
            prop = o.property(subj)
            target = ident(obj)
            field_name = {"rdfs:domain": "domains", "rdfs:range": "ranges",
                          "rdfs:subPropertyOf": "super_properties"}[pred]
            values = getattr(prop, field_name) | {target}
            kw = {"domains": prop.domains, "ranges": prop.ranges,
                  "super_properties": prop.super_properties, field_name: values}
            new = OwlProperty(prop.id, prop.kind, **kw)
            table = o.datatype_properties if prop.kind == "datatype" else o.object_properties
            table[subj] = new
        elif kind == "datatype" and pred == "owl:onDatatype" and isinstance(obj, str):
            o.datatypes[subj] = Datatype(subj, ident(obj))
        elif kind == "individual":
            if isinstance(obj, _Lit):
                v: Value = literal(obj)
            elif isinstance(obj, str):
                v = Ref(ident(obj))
            else:
                bad(f"unsupported value for {subj} {pred}", line)
                continue
            ind = o.individuals[subj]
            o.individuals[subj] = Individual(ind.id, ind.class_id, ind.property_values + ((pred, v),))
        else:
            bad(f"unsupported triple {subj} {pred}", line)

    for cid, c in list(o.classes.items()):
        sup = tuple(sorted(set(supers.get(cid, ())))) or ()
        o.classes[cid] = OwlClass(cid, sup, c.definition)
    for subj, t in types.items():
        if t == "rdfs:Datatype" and subj not in o.datatypes:
            bad(f"datatype {subj} has no owl:onDatatype", 0)
    return o
