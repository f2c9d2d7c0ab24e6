"""Graph patterns to FLWOR expressions.

A normalized pattern is first expanded into flat branches: conjunctions of
triples with conditions attached.  OPTIONAL contributes two branches, one
where the right side matched and one guarded by ``not(exists(...))``, so
every branch binds a fixed set of variables.

For a flat branch each triple pattern is matched by one of a few
alternatives (a class membership, a datatype property, an object property
or a schema-level fact).  Every consistent choice is a case; binding its
node variables to instance paths gives one FLWOR expression per
assignment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional

from ..errors import TranslationError
from ..mapping import XPath
from ..rdf import iri_steps
from ..sparql.algebra import (
    BGP, BinOp as BinOpS, Call as CallS, Filter, IRI, Join, Lit, Optional_, RDF_TYPE, Triple, Union_, Var, conjuncts,
    expr_vars,
)
from ..sparql.evaluate import norm
from ..xquery.ast import (
    FLWOR, Comparison, ContextItem, Filter as XFilter, For, IfThenElse, Let, Path, Sequence,
    StringLit, VarRef, Where, and_, call, or_, seq,
)
from .context import SCHEMA_OBJECTS, TBOX_PREDICATES, TranslationContext
from .filters import ConstB, FilterCompiler, LitB, NodeB, b_and, b_not, b_or
from .paths import (
    DOCUMENT, ast_step, merge_overlapping, parent, plain_key, positional_path, predicate_ast,
    relative, unify, unify_sets,
)
from .types import process_schema_triples

MAX_ASSIGNMENTS = 4096


# -- flat branches -----------------------------------------------------------------

@dataclass(frozen=True)
class FilterCond:
    expr: object
    scope: frozenset


@dataclass(frozen=True)
class NotCond:
    """No solution of ``branches`` is compatible with the current one (and satisfies ``cond``)."""

    branches: tuple
    cond: object
    scope: frozenset


@dataclass(frozen=True)
class FlatBranch:
    triples: tuple
    conds: tuple = ()

    def vars(self) -> frozenset:
        return frozenset(v for t in self.triples for v in t.vars())


def flatten(p) -> list[FlatBranch]:
    """Expand UNION and OPTIONAL into conjunctive branches with conditions."""
    if isinstance(p, BGP):
        return [FlatBranch(tuple(p.triples))]
    if isinstance(p, Join):
        return [FlatBranch(a.triples + b.triples, a.conds + b.conds)
                for a in flatten(p.left) for b in flatten(p.right)]
    if isinstance(p, Union_):
        return flatten(p.left) + flatten(p.right)
    if isinstance(p, Filter):
        return [FlatBranch(b.triples, b.conds + (FilterCond(p.expr, b.vars()),))
                for b in flatten(p.inner)]
    if isinstance(p, Optional_):
        cond, right = (p.right.expr, p.right.inner) if isinstance(p.right, Filter) else (None, p.right)
        rights = flatten(right)
        out = []
        for x in flatten(p.left):
            for y in rights:
                extra = (FilterCond(cond, x.vars() | y.vars()),) if cond is not None else ()
                out.append(FlatBranch(x.triples + y.triples, x.conds + y.conds + extra))
            out.append(FlatBranch(x.triples, x.conds + (NotCond(tuple(rights), cond, x.vars()),)))
        return out
    raise TypeError(f"not a graph pattern: {p!r}")


# -- alternatives -------------------------------------------------------------------

@dataclass(frozen=True)
class Alt:
    kind: str  # type | dtp | op | fact
    construct: str = ""
    fact: Optional[Triple] = None


def _matches_fact(t: Triple, f: Triple) -> bool:
    return all(isinstance(x, Var) or norm(x) == norm(y) for x, y in zip((t.s, t.p, t.o), (f.s, f.p, f.o)))


def alternatives(t: Triple, ctx: TranslationContext) -> list[Alt]:
    """Ways an instance or schema triple can match ``t``."""
    facts = [Alt("fact", fact=f) for f in sorted(ctx.tbox(), key=str) if _matches_fact(t, f)]
    p = t.p
    if isinstance(p, Var):
        out = [Alt("type", c) for c in ctx.all_constructs("class")]
        out += [Alt(ctx.kind(pid), pid) for pid in ctx.mappings.ids() if ctx.kind(pid) != "class"]
        if ctx.subproperty_closure and ctx.ontology is not None:
            for prop in ctx.ontology.properties():
                if ctx.kind(prop.id) is None and ctx.property_kind(prop.id):
                    out.append(Alt(ctx.property_kind(prop.id), prop.id))
        return [a for a in out if _object_fits(a, t.o, ctx)] + facts
    if not isinstance(p, IRI):
        return []
    if p.value == RDF_TYPE:
        o = t.o
        if isinstance(o, Var):
            return [Alt("type", c) for c in ctx.all_constructs("class")] + facts
        if isinstance(o, IRI) and o.value in SCHEMA_OBJECTS:
            return facts
        if isinstance(o, IRI):
            cid = ctx.local(o.value)
            if cid is not None and ctx.kind(cid) == "class":
                return [Alt("type", cid)]
            ctx.problem("UNMAPPED_CLASS", f"class {o.value} has no mapping")
        return []
    if p.value in TBOX_PREDICATES:
        return facts
    pid = ctx.local(p.value)
    kind = ctx.property_kind(pid) if pid else None
    if kind is not None:
        return [Alt(kind, pid)] if _object_fits(Alt(kind, pid), t.o, ctx) else []
    if pid is not None and ctx.declared(pid) in ("dtp", "op"):
        ctx.problem("UNMAPPED_PROPERTY", f"property {p.value} has no mapping")
    else:
        ctx.problem("UNKNOWN_PREDICATE", f"{p.value} is neither rdf:type, a schema predicate "
                    "nor a mapped property")
    return []


def _object_fits(a: Alt, o, ctx: TranslationContext) -> bool:
    if a.kind == "type":
        return isinstance(o, Var) or (isinstance(o, IRI) and o == ctx.full(a.construct))
    if a.kind == "op":
        return not isinstance(o, Lit)
    if a.kind == "dtp":
        return not isinstance(o, IRI)
    return True


# -- cases ---------------------------------------------------------------------------

class _Infeasible(Exception):
    pass


@dataclass
class Case:
    """One choice of alternatives: variable roles, path constraints and data edges."""

    roles: dict = field(default_factory=dict)  # Var -> node | lit | const
    exact: dict = field(default_factory=dict)  # Var -> [list of XPath]
    subject: dict = field(default_factory=dict)  # Var -> [dict plain key -> plain XPath]
    literal: dict = field(default_factory=dict)  # Var -> (known, datatype)
    const: dict = field(default_factory=dict)  # Var -> term
    edges: list = field(default_factory=list)  # (dtp | op, s Var, property id, o Var | Lit)
    hidden: dict = field(default_factory=dict)  # resource IRI -> Var
    order: list = field(default_factory=list)  # variables in first-use order

    def see(self, v: Var) -> None:
        if v not in self.order:
            self.order.append(v)

    def role(self, v: Var, role: str) -> None:
        prev = self.roles.get(v)
        if prev is not None and prev != role:
            raise _Infeasible()
        self.roles[v] = role
        self.see(v)


def _node_term(case: Case, term, ctx: TranslationContext) -> Var:
    if isinstance(term, Var):
        case.role(term, "node")
        return term
    if isinstance(term, IRI):
        v = case.hidden.get(term.value)
        if v is None:
            steps = iri_steps(term.value, ctx.document_iri)
            if steps is None:
                raise _Infeasible()
            v = Var(f"#iri{len(case.hidden) + 1}", hidden=True)
            case.hidden[term.value] = v
            case.role(v, "node")
            case.exact.setdefault(v, []).append([positional_path(steps) if steps else DOCUMENT])
        case.see(v)
        return v
    raise _Infeasible()


def _const_term(case: Case, term, value) -> None:
    if isinstance(term, Var):
        case.role(term, "const")
        if term in case.const and norm(case.const[term]) != norm(value):
            raise _Infeasible()
        case.const[term] = value
    elif norm(term) != norm(value):
        raise _Infeasible()


def _literal_var(case: Case, v: Var, known: bool, dt) -> None:
    case.role(v, "lit")
    prev = case.literal.get(v)
    if prev is not None and prev[0] and known and prev[1] != dt:
        raise _Infeasible()
    if prev is None or (known and not prev[0]):
        case.literal[v] = (known, dt)


def _subject_keys(ctx: TranslationContext, pid: str) -> dict:
    out = {}
    for p in ctx.paths(pid):
        par = parent(p).plain()
        out[plain_key(par)] = par
    return out


def resolve_case(triples: tuple, alts: tuple, outer: dict, ctx: TranslationContext) -> Optional[Case]:
    case = Case()
    try:
        for v, b in outer.items():
            if isinstance(b, NodeB):
                case.role(v, "node")
                case.exact.setdefault(v, []).append([b.path])
            elif isinstance(b, LitB):
                _literal_var(case, v, b.known, b.datatype)
            else:
                _const_term(case, v, b.term)
        for t, a in zip(triples, alts):
            for x in t.vars():
                case.see(x)
            if a.kind == "fact":
                for x, y in zip((t.s, t.p, t.o), (a.fact.s, a.fact.p, a.fact.o)):
                    _const_term(case, x, y)
                continue
            prop = ctx.full(a.construct)
            s = _node_term(case, t.s, ctx)
            if a.kind == "type":
                _const_term(case, t.p, IRI(RDF_TYPE))
                _const_term(case, t.o, prop)
                case.exact.setdefault(s, []).append(ctx.paths(a.construct))
                continue
            _const_term(case, t.p, prop)
            case.subject.setdefault(s, []).append(_subject_keys(ctx, a.construct))
            if a.kind == "op":
                o = _node_term(case, t.o, ctx)
                case.exact.setdefault(o, []).append(ctx.paths(a.construct))
                case.edges.append(("op", s, a.construct, o))
            elif isinstance(t.o, Var):
                known, dt = ctx.datatype(a.construct)
                _literal_var(case, t.o, known, dt)
                case.edges.append(("dtp", s, a.construct, t.o))
            else:
                known, dt = ctx.datatype(a.construct)
                lit = norm(t.o)
                if lit.lang or (known and lit.datatype != dt):
                    raise _Infeasible()
                case.edges.append(("dtp", s, a.construct, lit))
    except _Infeasible:
        return None
    return case


def bind_variables(case: Case, ctx: TranslationContext) -> list[dict]:
    """Consistent assignments of instance paths to the node variables of ``case``."""
    domains: dict[Var, list[XPath]] = {}
    for v in case.order:
        if case.roles.get(v) != "node":
            continue
        cand: Optional[list[XPath]] = None
        for paths in case.exact.get(v, []):
            cand = unify_sets(cand, paths)
        for keys in case.subject.get(v, []):
            if cand is None:
                cand = list(keys.values())
            else:
                cand = [x for x in cand if plain_key(x) in keys]
        if not cand:
            return []
        domains[v] = merge_overlapping(cand)
    names = list(domains)
    ops = [(s, o) for kind, s, _, o in case.edges if kind == "op"]
    out = []
    for combo in itertools.product(*(domains[v] for v in names)):
        a = dict(zip(names, combo))
        if all(a[o].steps and plain_key(parent(a[o])) == plain_key(a[s]) for s, o in ops):
            out.append(a)
            if len(out) > MAX_ASSIGNMENTS:
                raise TranslationError("UNSUPPORTED_FEATURE", "too many path assignments")
    return out


# -- emission -----------------------------------------------------------------------------

RESERVED = frozenset({"doc", "Results", "Modified_Results", "Ordered_Results", "Projected_Results",
                      "Distinct_Results", "iter", "r", "i"})


class Namer:
    """XQuery variable names for query variables; fresh names for nested scopes."""

    def __init__(self):
        self.used: set[str] = set(RESERVED)
        self.top: dict[Var, str] = {}

    def _unique(self, base: str) -> str:
        name, n = base, 1
        while name in self.used:
            n += 1
            name = f"{base}_{n}"
        self.used.add(name)
        return name

    def name(self, v: Var) -> str:
        if v not in self.top:
            base = v.name
            if v.hidden:
                base = "b_" + base
            elif base in RESERVED or not (base[0].isalpha() or base[0] == "_"):
                base = "v_" + base
            base = "".join(c if c.isalnum() or c in "_-." else "_" for c in base)
            self.top[v] = self._unique(base)
        return self.top[v]

    def fresh(self, v: Var) -> str:
        return self._unique(self.name(v))


@dataclass
class CaseCode:
    clauses: tuple
    conds: tuple
    env: dict


class PatternTranslator:
    def __init__(self, ctx: TranslationContext, namer: Optional[Namer] = None,
                 projected: frozenset = frozenset()):
        self.ctx = ctx
        self.namer = namer or Namer()
        self.projected = projected

    # -- branches ---------------------------------------------------------------------

    def branch(self, fb: FlatBranch, outer: dict, nested: bool) -> list[CaseCode]:
        triples = process_schema_triples(fb.triples, self.ctx)
        if triples is None:
            return []
        options = [alternatives(t, self.ctx) for t in triples]
        out: list[CaseCode] = []
        for alts in itertools.product(*options):
            case = resolve_case(triples, alts, outer, self.ctx)
            if case is None:
                continue
            for a in bind_variables(case, self.ctx):
                code = self.emit(case, a, fb.conds, outer, nested)
                if code is not None:
                    out.append(code)
        return out

    def translate_bgp(self, triples: tuple, outer: Optional[dict] = None) -> list[CaseCode]:
        return self.branch(FlatBranch(tuple(triples)), outer or {}, nested=False)

    # -- one case --------------------------------------------------------------------------

    def emit(self, case: Case, a: dict, conds: tuple, outer: dict, nested: bool) -> Optional[CaseCode]:
        ctx = self.ctx
        env: dict = dict(outer)
        new = [v for v in case.order if v not in outer]
        for v in new:
            role = case.roles.get(v)
            name = self.namer.fresh(v) if nested or v.hidden else self.namer.name(v)
            if role == "node":
                env[v] = NodeB(name, a[v])
            elif role == "lit":
                known, dt = case.literal[v]
                env[v] = LitB(name, known, dt)
            elif role == "const":
                env[v] = ConstB(case.const[v])
        where: list = []

        # prebound nodes may be narrowed by predicates of this case
        for v, b in outer.items():
            if isinstance(b, NodeB) and a.get(v) is not None and a[v] != b.path:
                for x, y in zip(a[v].steps[:-1], b.path.steps[:-1]):
                    if not set(x.predicates) <= set(y.predicates):
                        raise TranslationError("UNSUPPORTED_FEATURE",
                                               f"predicate above {b.path.text} from a nested pattern")
                own = set(b.path.last.predicates)
                preds = [p for p in a[v].last.predicates if p not in own]
                if preds:
                    where.append(call("exists", XFilter(VarRef(b.xq), tuple(predicate_ast(p) for p in preds))))

        # navigation structure
        parent_of: dict[Var, tuple[Var, str]] = {}
        identity: list = []
        anchor: dict[Var, tuple[Var, str]] = {}
        lit_checks: list = []
        const_lits: list = []
        for kind, s, pid, o in case.edges:
            if kind == "op":
                if o not in outer and o not in parent_of:
                    parent_of[o] = (s, pid)
                else:
                    identity.append((s, pid, o))
            elif isinstance(o, Var):
                if o not in outer and o not in anchor:
                    anchor[o] = (s, pid)
                else:
                    lit_checks.append((s, pid, o))
            else:
                const_lits.append((s, pid, o))

        step_preds: dict[Var, list] = {v: [] for v in env}
        ctx_preds: dict[Var, list] = {v: [] for v in env}  # on the node itself

        for s, pid, lit in const_lits:
            alts_ = []
            for p in self.residuals(pid, a[s]):
                extra, last = relative(a[s], p)
                cmp = Comparison("=", Path(ContextItem(), (ast_step(last),)), StringLit(lit.lexical))
                alts_.append(and_(*[predicate_ast(x) for x in extra], cmp))
            pred = or_(*alts_)
            if s in outer:
                where.append(call("exists", XFilter(VarRef(env[s].xq), (pred,))))
            else:
                ctx_preds[s].append(pred)

        # filters: push single-variable conjuncts into the binding of that variable
        filter_vars: set = set()
        for c in conds:
            if isinstance(c, NotCond):
                continue
            scope_env = {v: env[v] for v in c.scope if v in env}
            for conj in conjuncts(c.expr):
                bound = [v for v in expr_vars(conj) if v in scope_env]
                filter_vars.update(bound)
                if (len(bound) == 1 and bound[0] in anchor and isinstance(env[bound[0]], LitB)
                        and pushable(conj, bound[0])):
                    v = bound[0]
                    t, _ = FilterCompiler({v: replace(env[v], xq=None)}, ctx.document_iri).condition(conj)
                    if t is False:
                        return None
                    if t is not True:
                        step_preds[v].append(t)
                    continue
                t, _ = FilterCompiler(scope_env, ctx.document_iri).condition(conj)
                if t is False:
                    return None
                if t is not True:
                    where.append(t)

        for c in conds:
            if isinstance(c, NotCond):
                t = self.not_condition(c, env)
                if t is False:
                    return None
                if t is not True:
                    where.append(t)

        # sources and clauses in dependency order
        def base(s: Var, extra: tuple):
            b = VarRef(env[s].xq)
            return XFilter(b, tuple(predicate_ast(x) for x in extra)) if extra else b

        def node_source(v: Var):
            path = a[v]
            own = tuple(ctx_preds[v])
            if v in parent_of:
                s, _ = parent_of[v]
                extra, last = relative(a[s], path)
                return Path(base(s, extra), (ast_step(last, own),))
            if not path.steps:
                src = VarRef("doc")
                return XFilter(src, own) if own else src
            steps = [ast_step(x) for x in path.steps[:-1]] + [ast_step(path.last, own)]
            return Path(VarRef("doc"), tuple(steps))

        def lit_source(v: Var):
            s, pid = anchor[v]
            items = []
            rs = self.residuals(pid, a[s])
            for p in rs:
                extra, last = relative(a[s], p)
                items.append(Path(base(s, extra), (ast_step(last, tuple(step_preds[v])),)))
            return seq(*items), len(rs) == 1 and ctx.is_single(rs[0])

        clauses: list = []
        lets: list = []
        done = set(outer)
        pending = [v for v in new if case.roles.get(v) in ("node", "lit")]
        while pending:
            for v in pending:
                dep = parent_of.get(v, anchor.get(v, (None,)))[0]
                if dep is None or dep in done:
                    break
            else:
                raise TranslationError("UNSUPPORTED_FEATURE", "cyclic variable dependencies")
            pending.remove(v)
            done.add(v)
            name = env[v].xq
            if case.roles[v] == "node":
                clauses.append(For(name, node_source(v)))
                continue
            src, single = lit_source(v)
            involved = any(o == v for _, _, o in lit_checks)
            if single and v not in self.projected and v in filter_vars and not involved and not nested:
                clauses.append(Let(name, src))
                lets.append(call("exists", VarRef(name)))
            elif single:
                clauses.append(For(name, src))
            else:
                clauses.append(For(name, call("distinct-values", src)))

        for s, pid, o in identity:
            items = []
            for p in self.residuals_op(pid, a[s], a[o]):
                extra, last = relative(a[s], p)
                is_o = Comparison("is", ContextItem(), VarRef(env[o].xq))
                items.append(Path(base(s, extra), (ast_step(last, (is_o,)),)))
            where.append(call("exists", seq(*items)) if items else call("false"))
        for s, pid, o in lit_checks:
            items = []
            for p in self.residuals(pid, a[s]):
                extra, last = relative(a[s], p)
                items.append(Path(base(s, extra), (ast_step(last),)))
            where.append(Comparison("=", seq(*items), VarRef(env[o].xq)))

        return CaseCode(tuple(clauses), tuple(lets) + tuple(where), env)

    def residuals(self, pid: str, subject: XPath) -> list[XPath]:
        key = plain_key(subject)
        return [p for p in self.ctx.paths(pid) if plain_key(parent(p)) == key]

    def residuals_op(self, pid: str, subject: XPath, obj: XPath) -> list[XPath]:
        out = []
        for p in self.residuals(pid, subject):
            u = unify(p, obj)
            if u is not None:
                out.append(u)
        return out

    # -- negation ----------------------------------------------------------------------------

    def not_condition(self, nc: NotCond, env: dict):
        outer = {v: env[v] for v in nc.scope if v in env}
        found = []
        for fb in nc.branches:
            extra = (FilterCond(nc.cond, nc.scope | fb.vars()),) if nc.cond is not None else ()
            sub = FlatBranch(fb.triples, fb.conds + extra)
            for code in self.branch(sub, outer, nested=True):
                found.append(exists_expr(code))
        return b_not(b_or(*found))


_PUSHABLE_OPS = ("=", "!=", "<", ">", "<=", ">=")


def pushable(conj, v: Var) -> bool:
    """A comparison of ``v`` with a constant, or a regex over ``v`` with constant arguments."""
    consts = (IRI, Lit)
    if isinstance(conj, BinOpS) and conj.op in _PUSHABLE_OPS:
        return ((conj.left == v and isinstance(conj.right, consts))
                or (conj.right == v and isinstance(conj.left, consts)))
    if isinstance(conj, CallS) and conj.name == "regex":
        return conj.args[0] == v and all(isinstance(x, Lit) for x in conj.args[1:])
    return False


def exists_expr(code: CaseCode):
    """True when the case has at least one solution."""
    if not code.clauses:
        return b_and(*code.conds)
    clauses = code.clauses + ((Where(and_(*code.conds)),) if code.conds else ())
    if len(clauses) == 1 and isinstance(clauses[0], For):
        return call("exists", clauses[0].source)
    return call("exists", FLWOR(clauses, _one()))


def _one():
    from ..xquery.ast import NumberLit

    return NumberLit("1")


def case_expr(code: CaseCode, ret) -> object:
    """The FLWOR (or conditional) producing ``ret`` once per solution of the case."""
    if not code.clauses:
        cond = b_and(*code.conds)
        if cond is True:
            return ret
        if cond is False:
            return Sequence(())
        return IfThenElse(cond, ret, Sequence(()))
    clauses = code.clauses + ((Where(and_(*code.conds)),) if code.conds else ())
    return FLWOR(clauses, ret)


def merge_root_sources(exprs: list) -> list:
    """Merge FLWORs that differ only in the absolute source of their first clause."""
    out: list = []
    keys: list = []
    for e in exprs:
        key = None
        if (isinstance(e, FLWOR) and isinstance(e.clauses[0], For)
                and _is_doc_path(e.clauses[0].source)):
            first = e.clauses[0]
            key = FLWOR((For(first.var, Sequence(())),) + e.clauses[1:], e.ret)
        if key is not None and key in keys:
            i = keys.index(key)
            prev = out[i]
            first = prev.clauses[0]
            out[i] = FLWOR((For(first.var, seq(first.source, e.clauses[0].source)),) + prev.clauses[1:],
                           prev.ret)
            continue
        out.append(e)
        keys.append(key)
    return out


def _is_doc_path(x) -> bool:
    if isinstance(x, Sequence):
        return all(_is_doc_path(i) for i in x.items)
    return isinstance(x, Path) and x.start == VarRef("doc")


__all__ = [
    "Alt", "Case", "CaseCode", "FilterCond", "FlatBranch", "Namer", "NotCond", "PatternTranslator",
    "RESERVED", "alternatives", "bind_variables", "case_expr", "exists_expr", "flatten",
    "merge_root_sources", "resolve_case",
]
