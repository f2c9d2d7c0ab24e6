"""Seeded random corpus of (schema, instance, query) cases.

Schemas are small: a root element holding items of one complex type, with
optional nested parts, an extension of the item type and a substitution
group.  Instances are generated from the same model and checked against
the schema's path catalog.  Queries are assembled from the ontology and
mappings derived from the schema, and a rotating focus makes sure every
algebra operator and modifier shows up regularly.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from ..errors import EvaluationError
from ..mapping import MappingSet, generate_mappings
from ..rdf import datatype_iri, load_instance
from ..sparql.algebra import XSD
from ..xs2owl import transform
from ..xsd_model import parse_schema
from ..xsd_paths import PathCatalog, enumerate_paths

FEATURES = ("UNION", "OPT", "FILTER", "ORDER BY", "LIMIT", "OFFSET", "DISTINCT", "ASK", "CONSTRUCT")

MAX_ELEMENTS = 50
MAX_COMPLEX_TYPES = 4
MAX_ELEMENT_DECLS = 6  # besides the root element

_SIMPLE_NAMES = {
    "xs:string": ["Title", "Name", "Label", "Note"],
    "xs:integer": ["Count", "Year", "Size"],
    "xs:float": ["Score", "Weight"],
    "xs:decimal": ["Price", "Cost"],
    "xs:date": ["Released", "Due"],
    "xs:boolean": ["Active", "Public"],
}
_VALUES = {
    "xs:string": ["alpha", "beta", "gamma", "delta", "alpha beta", "Gamma ray"],
    "xs:integer": [str(i) for i in range(1, 13)],
    "xs:float": ["1.5", "2", "3.25", "4.5", "7", "0.5"],
    "xs:decimal": ["1.50", "2.25", "3", "10.5", "0.75"],
    "xs:date": ["2020-01-15", "2021-06-01", "2019-12-31", "2020-03-10"],
    "xs:boolean": ["true", "false"],
}
_ROOTS = ["Library", "Catalog", "Archive", "Store"]
_ITEMS = ["Book", "Record", "Entry", "Item"]
_PARTS = ["Part", "Chapter", "Track"]


@dataclass
class Case:
    case_id: str
    schema: str
    instance: str
    query: str
    seed: Optional[int] = None
    features: frozenset = frozenset()
    mappings: Optional[str] = None  # mapping document overriding the generated one


@dataclass
class Corpus:
    cases: list
    coverage: Counter = field(default_factory=Counter)

    def report(self) -> str:
        return ", ".join(f"{f}={self.coverage[f]}" for f in FEATURES)


# -- schema model ----------------------------------------------------------------

@dataclass
class _Child:
    name: str
    type: str  # xs:* or a complex type name
    lo: int
    hi: Optional[int]  # None = unbounded
    ref: bool = False


@dataclass
class _Type:
    name: str
    children: list
    attrs: list  # (name, xs type)
    base: Optional[str] = None


@dataclass
class _Model:
    root: str
    root_children: list
    types: dict
    globals_: dict  # global element name -> xs type
    members: dict  # substitution head -> [member names]


def _occurs(rng: random.Random) -> tuple[int, Optional[int]]:
    return rng.choice([(1, 1), (0, 1), (0, None), (1, None)])


def _schema_model(rng: random.Random) -> _Model:
    names_used: set = set()

    def simple_child() -> _Child:
        xs = rng.choice(list(_SIMPLE_NAMES))
        free = [n for n in _SIMPLE_NAMES[xs] if n not in names_used]
        if not free:
            xs = rng.choice([t for t, ns in _SIMPLE_NAMES.items() if set(ns) - names_used])
            free = [n for n in _SIMPLE_NAMES[xs] if n not in names_used]
        name = rng.choice(free)
        names_used.add(name)
        lo, hi = _occurs(rng)
        return _Child(name, xs, lo, hi)

    budget = MAX_ELEMENT_DECLS
    item_name = rng.choice(_ITEMS)
    budget -= 1
    item = _Type("Item_Type", [], [])
    for _ in range(rng.randint(1, 3)):
        item.children.append(simple_child())
        budget -= 1
    if rng.random() < 0.6:
        item.attrs.append(("id", "xs:integer"))
    if rng.random() < 0.4:
        item.attrs.append(("kind", "xs:string"))
    types = {"Item_Type": item}
    globals_: dict = {}
    members: dict = {}
    if budget >= 2 and rng.random() < 0.5:
        globals_["Author"] = "xs:string"
        globals_["Editor"] = "xs:string"
        members["Author"] = ["Editor"]
        item.children.append(_Child("Author", "xs:string", *rng.choice([(1, None), (0, None), (0, 1)]),
                                    ref=True))
        budget -= 2
    if budget >= 2 and rng.random() < 0.6:
        part = _Type("Part_Type", [], [])
        part_name = rng.choice(_PARTS)
        budget -= 1
        for _ in range(min(budget, rng.randint(1, 2))):
            part.children.append(simple_child())
            budget -= 1
        if rng.random() < 0.5:
            part.attrs.append(("no", "xs:integer"))
        types["Part_Type"] = part
        item.children.append(_Child(part_name, "Part_Type", *rng.choice([(0, None), (0, 1), (1, None)])))
    root_children = [_Child(item_name, "Item_Type", 0, None)]
    if budget >= 2 and rng.random() < 0.5:
        ext = _Type("Special_Type", [simple_child()], [], base="Item_Type")
        types["Special_Type"] = ext
        root_children.append(_Child("Special" + item_name, "Special_Type", 0, None))
    return _Model(rng.choice(_ROOTS), root_children, types, globals_, members)


def _occurs_attrs(lo: int, hi: Optional[int]) -> str:
    out = ""
    if lo != 1:
        out += f' minOccurs="{lo}"'
    if hi != 1:
        out += f' maxOccurs="{"unbounded" if hi is None else hi}"'
    return out


def _child_decl(c: _Child, indent: str) -> str:
    if c.ref:
        return f'{indent}<xs:element ref="{c.name}"{_occurs_attrs(c.lo, c.hi)}/>'
    return f'{indent}<xs:element name="{c.name}" type="{c.type}"{_occurs_attrs(c.lo, c.hi)}/>'


def schema_text(m: _Model) -> str:
    out = ['<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">']
    for t in m.types.values():
        out.append(f'  <xs:complexType name="{t.name}">')
        pad = "    "
        if t.base:
            out.append('    <xs:complexContent>')
            out.append(f'      <xs:extension base="{t.base}">')
            pad = "        "
        out.append(f"{pad}<xs:sequence>")
        out.extend(_child_decl(c, pad + "  ") for c in t.children)
        out.append(f"{pad}</xs:sequence>")
        for name, xs in t.attrs:
            out.append(f'{pad}<xs:attribute name="{name}" type="{xs}"/>')
        if t.base:
            out.append('      </xs:extension>')
            out.append('    </xs:complexContent>')
        out.append("  </xs:complexType>")
    out.append(f'  <xs:element name="{m.root}">')
    out.append("    <xs:complexType>")
    out.append("      <xs:sequence>")
    out.extend(_child_decl(c, "        ") for c in m.root_children)
    out.append("      </xs:sequence>")
    out.append("    </xs:complexType>")
    out.append("  </xs:element>")
    for name, xs in m.globals_.items():
        heads = [h for h, ms in m.members.items() if name in ms]
        sub = f' substitutionGroup="{heads[0]}"' if heads else ""
        out.append(f'  <xs:element name="{name}" type="{xs}"{sub}/>')
    out.append("</xs:schema>")
    return "\n".join(out) + "\n"


# -- instances ----------------------------------------------------------------------

class _Budget:
    def __init__(self, n: int):
        self.left = n

    def take(self) -> bool:
        if self.left <= 0:
            return False
        self.left -= 1
        return True


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace('"', "&quot;")


def _content(rng, m: _Model, t: _Type, budget: _Budget, counter: list, indent: str) -> list[str]:
    chain = []
    cur: Optional[_Type] = t
    while cur is not None:
        chain.append(cur)
        cur = m.types.get(cur.base) if cur.base else None
    lines = []
    for ty in reversed(chain):
        for c in ty.children:
            hi = c.lo + 2 if c.hi is None else c.hi
            # mostly present, so that patterns find something to match
            n = rng.randint(max(c.lo, 1), max(c.lo, hi, 1)) if rng.random() < 0.8 else c.lo
            for _ in range(n):
                if not budget.take():
                    if _ < c.lo:
                        budget.left -= 1  # required content may overdraw slightly
                    else:
                        break
                name = c.name
                if c.ref and m.members.get(c.name) and rng.random() < 0.4:
                    name = rng.choice(m.members[c.name])
                if c.type in m.types:
                    lines.extend(_element(rng, m, name, m.types[c.type], budget, counter, indent))
                else:
                    lines.append(f"{indent}<{name}>{_esc(rng.choice(_VALUES[c.type]))}</{name}>")
    return lines


def _element(rng, m: _Model, name: str, t: _Type, budget: _Budget, counter: list,
             indent: str) -> list[str]:
    attrs = ""
    chain_attrs = list(t.attrs)
    if t.base and t.base in m.types:
        chain_attrs = list(m.types[t.base].attrs) + chain_attrs
    for aname, xs in chain_attrs:
        if rng.random() < 0.85:
            if aname in ("id", "no"):
                counter[0] += 1
                value = str(counter[0])
            else:
                value = rng.choice(_VALUES[xs])
            attrs += f' {aname}="{_esc(value)}"'
    inner = _content(rng, m, t, budget, counter, indent + "  ")
    if not inner:
        return [f"{indent}<{name}{attrs}/>"]
    return [f"{indent}<{name}{attrs}>"] + inner + [f"{indent}</{name}>"]


def instance_text(rng: random.Random, m: _Model) -> str:
    # required content may overdraw the budget; retry with fewer items when it does
    for cap in range(5, 0, -1):
        text = _instance(rng, m, cap)
        if text.count("</") + text.count("/>") <= MAX_ELEMENTS:
            return text
    return _instance(rng, m, 1)


def _instance(rng: random.Random, m: _Model, cap: int) -> str:
    budget = _Budget(MAX_ELEMENTS - 1)
    counter = [0]
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', f"<{m.root}>"]
    for c in m.root_children:
        n = rng.randint(min(2, cap), cap) if c is m.root_children[0] else rng.randint(0, min(2, cap))
        for _ in range(n):
            if budget.left < 6:
                break
            budget.take()
            lines.extend(_element(rng, m, c.name, m.types[c.type], budget, counter, "  "))
    lines.append(f"</{m.root}>")
    return "\n".join(lines) + "\n"


def check_instance(text: str, catalog: PathCatalog) -> None:
    """Every element and attribute of the instance lies on a catalog path."""
    doc = load_instance(text)
    count = 0
    for n in doc.iter():
        if n.kind != "element":
            continue
        count += 1
        path = "/" + "/".join(n.name_path())
        if path not in catalog.paths:
            raise EvaluationError("INPUT", f"generated element outside the schema: {path}")
        for a in n.attributes:
            if path + "/@" + a.name not in catalog.paths:
                raise EvaluationError("INPUT", f"generated attribute outside the schema: {path}/@{a.name}")
    if count > MAX_ELEMENTS:
        raise EvaluationError("INPUT", f"generated instance has {count} elements")


# -- queries -------------------------------------------------------------------------

@dataclass
class _Prop:
    pid: str
    kind: str  # dtp | op
    datatype: Optional[str]  # dtp only
    target: Optional[str] = None  # op only: class of the object


def _vocabulary(ms: MappingSet, os) -> dict:
    """class id -> properties whose subjects are instances of that class."""
    class_paths = {c: set(ms.get(c).xpath_set.paths) for c in ms.ids("class")}
    out: dict = {c: [] for c in class_paths}
    for pid in ms.ids():
        m = ms.get(pid)
        if m.kind == "class":
            continue
        for c, paths in class_paths.items():
            parents = {p.rsplit("/", 1)[0] for p in m.xpath_set.paths}
            if parents & paths:
                target = None
                if m.kind == "op":
                    target = next((k for k, ps in class_paths.items() if set(m.xpath_set.paths) & ps), None)
                dt = datatype_iri(os, pid) if m.kind == "dtp" else None
                out[c].append(_Prop(pid, m.kind, dt, target))
    return out


def _literal(xs: Optional[str], lexical: str) -> str:
    if xs is None:
        return '"' + lexical + '"'
    return f'"{lexical}"^^<{xs}>'


def _values_for(dt: Optional[str]) -> list[str]:
    key = "xs:string" if dt is None else "xs:" + dt[len(XSD):]
    return _VALUES.get(key, _VALUES["xs:string"])


class _QueryBuilder:
    def __init__(self, rng: random.Random, vocab: dict, focus: str):
        self.rng = rng
        self.vocab = vocab
        self.focus = focus
        self.n = 0
        self.features: set = set()
        self.lits: dict = {}  # var -> datatype (literal variables)
        self.orderable: list = []

    def var(self, prefix: str) -> str:
        self.n += 1
        return f"?{prefix}{self.n}"

    def want(self, feature: str, p: float) -> bool:
        return self.focus == feature or self.rng.random() < p

    def dtps(self, c: str) -> list:
        return [p for p in self.vocab.get(c, []) if p.kind == "dtp"]

    def ops(self, c: str) -> list:
        return [p for p in self.vocab.get(c, []) if p.kind == "op" and p.target]

    def comparison(self, v: str, dt: Optional[str]) -> str:
        rng = self.rng
        values = _values_for(dt)
        if dt is None:
            kind = rng.random()
            if kind < 0.45:
                pat = rng.choice(["a", "^al", "ta$", "gam", "e"])
                flags = ', "i"' if rng.random() < 0.3 else ""
                return f'regex({v}, "{pat}"{flags})'
            op = rng.choice(["=", "!="])
            return f'{v} {op} "{rng.choice(values)}"'
        if dt == XSD + "boolean":
            return f"{v} = {rng.choice(['true', 'false'])}"
        op = rng.choice(["<", ">", "<=", ">=", "=", "!="])
        if dt == XSD + "date":
            return f'{v} {op} "{rng.choice(values)}"^^<{dt}>'
        if dt in (XSD + "integer",) and rng.random() < 0.5:
            return f"{v} {op} {rng.choice(values)}"
        return f"{v} {op} {_literal(dt, rng.choice(values))}"

    def filter_expr(self, candidates: list) -> Optional[str]:
        if not candidates:
            return None
        rng = self.rng
        v, dt = rng.choice(candidates)
        e = self.comparison(v, dt)
        r = rng.random()
        if r < 0.25 and len(candidates) > 1:
            w, wdt = rng.choice(candidates)
            e = f"({e} {rng.choice(['&&', '||'])} {self.comparison(w, wdt)})"
        elif r < 0.35:
            e = f"!({e})"
        elif r < 0.45:
            same = [(w, wdt) for w, wdt in candidates if wdt == dt and w != v]
            if same and dt is not None and dt != XSD + "boolean":
                e = f"{v} {rng.choice(['<', '=', '!=', '>='])} {same[0][0]}"
        return e

    def subject_block(self, c: str, x: str, min_props: int = 1) -> tuple[list, list]:
        """Triples about ``x`` of class ``c``; returns (lines, literal vars)."""
        rng = self.rng
        lines = []
        if rng.random() < 0.7:
            lines.append(f"{x} rdf:type ns:{c} .")
        props = self.dtps(c)
        lits = []
        k = min(len(props), rng.randint(min_props, 2))
        for p in rng.sample(props, k):
            if rng.random() < 0.15:
                lines.append(f"{x} ns:{p.pid} {_literal(p.datatype, rng.choice(_values_for(p.datatype)))} .")
                continue
            v = self.var("v")
            lines.append(f"{x} ns:{p.pid} {v} .")
            lits.append((v, p.datatype))
        if not lines:
            lines.append(f"{x} rdf:type ns:{c} .")
        return lines, lits

    def build(self) -> tuple[str, set]:
        rng = self.rng
        classes = [c for c in self.vocab if self.dtps(c)]
        c = rng.choice(classes)
        x = "?x"
        lines, lits = self.subject_block(c, x)
        node_vars = [x]
        ops = self.ops(c)
        if ops and rng.random() < 0.35:
            op = rng.choice(ops)
            y = "?y"
            lines.append(f"{x} ns:{op.pid} {y} .")
            node_vars.append(y)
            more, more_lits = self.subject_block(op.target, y, 0)
            lines += [ln for ln in more if not ln.endswith(f"rdf:type ns:{op.target} .")] \
                if rng.random() < 0.5 else more
            lits += more_lits
        body = "    " + "\n    ".join(lines)
        certain = list(lits)
        optional_lits: list = []

        if self.want("UNION", 0.15):
            self.features.add("UNION")
            others = [k for k in classes if k != c] or [c]
            c2 = rng.choice(others)
            lines2, lits2 = self.subject_block(c2, x)
            # the union variable names must line up for a useful join-free union
            body = "  {\n    " + body.strip() + "\n  }\n  UNION\n  {\n    " + "\n    ".join(lines2) + "\n  }"
            certain = []
            optional_lits = lits + lits2
        if self.want("OPT", 0.2):
            props = self.dtps(c)
            if props:
                self.features.add("OPT")
                p = rng.choice(props)
                w = self.var("w")
                inner = f"{x} ns:{p.pid} {w} ."
                if rng.random() < 0.3:
                    inner += f" FILTER ({self.comparison(w, p.datatype)})"
                body += f"\n  OPTIONAL {{ {inner} }}"
                optional_lits.append((w, p.datatype))
                if rng.random() < 0.3:
                    body += f"\n  FILTER (!bound({w}) || {self.comparison(w, p.datatype)})"
                    self.features.add("FILTER")
        if self.want("FILTER", 0.35):
            e = self.filter_expr(certain or optional_lits)
            if e:
                self.features.add("FILTER")
                body += f"\n  FILTER ({e})"

        all_vars = node_vars + [v for v, _ in certain + optional_lits]
        form = "SELECT"
        if self.focus == "ASK" or (self.focus not in FEATURES[:7] and rng.random() < 0.1):
            form = "ASK"
        elif self.focus == "CONSTRUCT" or rng.random() < 0.08:
            form = "CONSTRUCT"
        head = ""
        mods = []
        if form == "ASK":
            self.features.add("ASK")
            return "ASK\nWHERE {\n" + body + "\n}\n", self.features
        if form == "CONSTRUCT":
            self.features.add("CONSTRUCT")
            lits_all = certain + optional_lits
            tmpl = [f"{x} <http://example.com/out#about> {x} ."]
            if lits_all:
                v, _ = rng.choice(lits_all)
                tmpl = [f"{x} <http://example.com/out#value> {v} ."]
            head = "CONSTRUCT { " + " ".join(tmpl) + " }"
        else:
            distinct = ""
            if self.want("DISTINCT", 0.15):
                self.features.add("DISTINCT")
                distinct = "DISTINCT "
            proj = all_vars if rng.random() < 0.3 else rng.sample(all_vars, rng.randint(1, len(all_vars)))
            head = f"SELECT {distinct}" + " ".join(proj)
        orderable = [v for v, _ in certain] + [v for v, _ in optional_lits if "UNION" not in self.features]
        if self.want("ORDER BY", 0.25) and orderable:
            self.features.add("ORDER BY")
            keys = rng.sample(orderable, min(len(orderable), rng.randint(1, 2)))
            mods.append("ORDER BY " + " ".join(
                f"{'DESC' if rng.random() < 0.4 else 'ASC'}({k})" for k in keys))
        if self.want("LIMIT", 0.2):
            self.features.add("LIMIT")
            mods.append(f"LIMIT {rng.randint(0, 6)}")
        if self.want("OFFSET", 0.15):
            self.features.add("OFFSET")
            mods.append(f"OFFSET {rng.randint(1, 4)}")
        text = head + "\nWHERE {\n" + body + "\n}\n" + ("\n".join(mods) + "\n" if mods else "")
        return text, self.features


PREFIXES = "PREFIX ns: <{base}>\nPREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\n"


def generate_case(seed: int, index: int) -> Case:
    rng = random.Random(seed * 1_000_003 + index)
    model = _schema_model(rng)
    if len(model.types) + 1 > MAX_COMPLEX_TYPES:
        raise AssertionError("generator produced too many complex types")
    xsd = schema_text(model)
    schema = parse_schema(xsd)
    os, _ = transform(schema)
    catalog = enumerate_paths(schema)
    ms = generate_mappings(schema, os, catalog)
    xml = instance_text(rng, model)
    check_instance(xml, catalog)
    focus_cycle = FEATURES + ("plain", "plain")
    focus = focus_cycle[index % len(focus_cycle)]
    query, features = _QueryBuilder(rng, _vocabulary(ms, os), focus).build()
    return Case(f"{seed}-{index}", xsd, xml, PREFIXES.format(base=ms.ontology_iri) + query, seed,
                frozenset(features))


def generate_corpus(seed: int, cases: int) -> Corpus:
    """``cases`` deterministic cases for ``seed`` with an operator coverage count."""
    if cases < 1:
        raise ValueError("cases must be at least 1")
    out = [generate_case(seed, i) for i in range(cases)]
    coverage = Counter(f for c in out for f in c.features)
    return Corpus(out, coverage)


__all__ = ["Case", "Corpus", "FEATURES", "check_instance", "generate_case", "generate_corpus"]
