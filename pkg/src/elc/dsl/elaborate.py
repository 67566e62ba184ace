"""Resolve surface trees into languages, theories, structures and cones.

Symbols are looked up in the file's environment (plus its imports); every
arity mismatch is reported at the position of the offending node.  Axiom
families and indexed disjunctions are elaborated once at a sample parameter
value to type-check them and to collect the affine distance expressions that
determine their critical values.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .. import vbase as vb
from ..logic import syntax as S
from ..logic.schema import Affine, critical_values
from ..signature import (Cone, FunctionSymbol, Language, LStructure, RelationSymbol, StructureMorphism,
                         structure_from_tables, structure_morphism_violation)
from ..vbase import Base, VMorphism, VObject
from . import ast as A
from .lexer import DSLError
from .parser import parse
from .printer import fmt_formula, fmt_sequent

_IMPORTED: dict = {}

BASES = {"finset": Base.FINSET, "poset": Base.FINPOS, "metric": Base.FINMET, "abgroup": Base.FINAB}


class ElaborationError(DSLError):
    pass


class InvalidInstance(ValueError):
    """A parameter value turns an object literal into an invalid object."""


@dataclass
class Module:
    """Everything a source file (with its imports) defines."""

    path: str | None
    base: Base = Base.FINSET
    base_set: bool = False
    arities: dict = field(default_factory=dict)
    language: Language | None = None
    theories: dict = field(default_factory=dict)
    structures: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    cones: dict = field(default_factory=dict)
    document: A.Document | None = None

    def lang(self) -> Language:
        return self.language if self.language is not None else Language(self.base)

    def only(self, kind: str, name: str | None = None):
        table = getattr(self, kind)
        if name is not None:
            if name not in table:
                raise ElaborationError(f"no {kind[:-1]} named {name!r}", path=self.path)
            return table[name]
        if len(table) != 1:
            raise ElaborationError(f"expected exactly one {kind[:-1]}, found {len(table)}"
                                   + (f" ({', '.join(table)})" if table else ""), path=self.path)
        return next(iter(table.values()))


# ---------------------------------------------------------------------------
# parameters


class Collector:
    """Affine distance forms met while elaborating, grouped by parameter."""

    def __init__(self):
        self.distances: dict[str, list] = {}
        self.constraints: dict[str, list] = {}

    def add(self, param: str, distances, constraints):
        self.distances.setdefault(param, []).extend(distances)
        self.constraints.setdefault(param, []).extend(constraints)

    def critical(self, param: str):
        dists = tuple(self.distances.get(param, ()))
        cons = tuple(self.constraints.get(param, ()))
        return lambda A_: critical_values(dists, cons, A_)


@dataclass
class Scope:
    params: dict = field(default_factory=dict)
    collector: Collector | None = None
    check: bool = True  # validate object literals (off while collecting at a sample value)


# ---------------------------------------------------------------------------
# elaborator


class Elaborator:
    def __init__(self, module: Module, loading: tuple = ()):
        self.m = module
        self.loading = loading

    def fail(self, message: str, node=None):
        line, col = getattr(node, "pos", (None, None)) if node is not None else (None, None)
        if line == 0:
            line = col = None
        raise ElaborationError(message, line, col, self.m.path)

    # -- items -------------------------------------------------------------

    def run(self, doc: A.Document):
        self.m.document = doc
        for it in doc.items:
            if isinstance(it, A.IBase):
                b = BASES[it.name]
                if self.m.base_set and self.m.base is not b:
                    self.fail(f"base mismatch: {it.name} after {self.m.base.value}", it)
                if self.m.arities or self.m.language is not None:
                    if self.m.base is not b:
                        self.fail("the base must be declared before arities and languages", it)
                self.m.base, self.m.base_set = b, True
            elif isinstance(it, A.IImport):
                self.do_import(it)
            elif isinstance(it, A.IArity):
                self.define("arities", it.name, self.obj(it.obj, Scope()), it)
            elif isinstance(it, A.ILanguage):
                self.language(it)
            elif isinstance(it, A.ITheory):
                self.define("theories", it.name, self.theory(it), it)
            elif isinstance(it, A.IStructure):
                self.define("structures", it.name, self.structure(it), it)
            elif isinstance(it, A.IMorphism):
                self.define("morphisms", it.name, self.morphism(it), it)
            elif isinstance(it, A.ICone):
                self.define("cones", it.name, self.cone(it), it)
        return self.m

    def define(self, kind, name, value, node):
        table = getattr(self.m, kind)
        if name in table and table[name] is not value and table[name] != value:
            self.fail(f"{kind[:-1]} {name!r} is defined twice", node)
        table[name] = value

    def do_import(self, it: A.IImport):
        here = os.path.dirname(self.m.path) if self.m.path else "."
        target = os.path.normpath(os.path.join(here, it.path))
        if target in self.loading:
            self.fail(f"import cycle through {it.path}", it)
        try:
            with open(target, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            self.fail(f"cannot import {it.path}: {exc.strerror}", it)
        key = (target, text)
        sub = _IMPORTED.get(key)
        if sub is None:
            sub = _IMPORTED[key] = load_text(text, target, self.loading + (target,))
        if sub.base_set:
            if self.m.base_set and self.m.base is not sub.base:
                self.fail(f"base mismatch with imported file {it.path}", it)
            self.m.base, self.m.base_set = sub.base, True
        if sub.language is not None:
            if self.m.language is not None and self.m.language != sub.language:
                self.fail(f"imported file {it.path} declares a different language", it)
            self.m.language = sub.language
        for kind in ("arities", "theories", "structures", "morphisms", "cones"):
            for name, value in getattr(sub, kind).items():
                self.define(kind, name, value, it)

    def language(self, it: A.ILanguage):
        if self.m.language is not None:
            self.fail("a file may declare only one language", it)
        funs, rels, seen = [], [], set()
        for d in it.decls:
            if d.name in seen:
                self.fail(f"symbol {d.name!r} declared twice", d)
            seen.add(d.name)
            if isinstance(d, A.DFun):
                funs.append(FunctionSymbol(d.name, self.obj(d.dom, Scope()), self.obj(d.cod, Scope())))
            else:
                rels.append(RelationSymbol(d.name, self.obj(d.arity, Scope())))
        self.m.language = Language(self.m.base, tuple(funs), tuple(rels))

    # -- objects -------------------------------------------------------------

    def want_base(self, b: Base, node):
        if self.m.base is not b:
            self.fail(f"base mismatch: {b.value} object in a {self.m.base.value} file", node)

    def obj(self, o: A.Obj, scope: Scope) -> VObject:
        base = self.m.base
        if isinstance(o, A.OUnit):
            return vb.unit(base)
        if isinstance(o, A.OZero):
            return vb.initial(base)
        if isinstance(o, A.ORef):
            if o.name not in self.m.arities:
                self.fail(f"unknown arity {o.name!r}", o)
            return self.m.arities[o.name]
        if isinstance(o, A.OFinset):
            self.want_base(Base.FINSET, o)
            pts = range(o.size) if o.names is None else [point_value(p) for p in o.names]
            try:
                return vb.finset(list(pts))
            except ValueError as exc:
                self.fail(str(exc), o)
        if isinstance(o, A.OPoset):
            self.want_base(Base.FINPOS, o)
            try:
                return vb.poset([point_value(p) for p in o.points],
                                [(point_value(x), point_value(y)) for x, y in o.less])
            except ValueError as exc:
                self.fail(str(exc), o)
        if isinstance(o, A.OMetric):
            self.want_base(Base.FINMET, o)
            return self.metric(o, scope)
        if isinstance(o, A.OAb):
            self.want_base(Base.FINAB, o)
            return vb.abgroup(*o.moduli) if o.moduli else vb.zero_group()
        if isinstance(o, A.OSum):
            return vb.coproduct([self.obj(p, scope) for p in o.parts], base).obj
        if isinstance(o, A.OTensor):
            out = self.obj(o.parts[0], scope)
            for p in o.parts[1:]:
                out = vb.tensor(out, self.obj(p, scope))
            return out
        raise TypeError(o)

    def metric(self, o: A.OMetric, scope: Scope) -> VObject:
        pts = tuple(point_value(p) for p in o.points)
        if len(set(pts)) != len(pts):
            self.fail("duplicate points in metric literal", o)
        forms: dict = {}
        params = set()
        for x, y, d in o.dists:
            x, y = point_value(x), point_value(y)
            if x not in pts or y not in pts:
                self.fail(f"unknown point in d({x}, {y})", o)
            if d.inf:
                f = None
            else:
                if d.param is not None:
                    if d.param not in scope.params:
                        self.fail(f"unknown parameter {d.param!r}", o)
                    params.add(d.param)
                f = Affine(d.a, d.b)
            key = frozenset((x, y))
            if x == y:
                self.fail("distance of a point to itself is always 0", o)
            if key in forms and forms[key] != f:
                self.fail(f"conflicting distances for {x}, {y}", o)
            forms[key] = f
        if len(params) > 1:
            self.fail("a metric literal may use only one parameter", o)
        param = next(iter(params), None)
        value = scope.params.get(param, 0) if param else 0

        def form(x, y):
            return forms.get(frozenset((x, y)))

        if param is not None and scope.collector is not None:
            dists = [f for f in forms.values() if f is not None and f.a != 0]
            cons = []
            for x, y in itertools.combinations(pts, 2):
                f = form(x, y)
                if f is not None:
                    cons.append(f)
            for x, y, z in itertools.permutations(pts, 3):
                fxz, fxy, fyz = form(x, z), form(x, y), form(y, z)
                if fxz is not None and fxy is not None and fyz is not None:
                    cons.append(fxy + fyz - fxz)
            scope.collector.add(param, dists, [c for c in cons if c.a != 0])
        table = {}
        for key, f in forms.items():
            x, y = sorted(key, key=repr)
            table[(x, y)] = table[(y, x)] = vb.INF if f is None else f(value)
        dist = lambda x, y: Fraction(0) if x == y else table.get((x, y), vb.INF)  # noqa: E731
        try:
            return VObject(Base.FINMET, pts, dist=dist, check=scope.check)
        except ValueError as exc:
            if param is not None:
                raise InvalidInstance(f"{param} = {value}: {exc}") from None
            self.fail(f"invalid metric literal: {exc}", o)

    # -- terms and formulas --------------------------------------------------

    def term(self, t: A.RTerm, ctx: S.Context, scope: Scope) -> S.Term:
        L = self.m.lang()
        try:
            if isinstance(t, A.TVar):
                if t.name in ctx.names:
                    return S.var(ctx, t.name)
                if L.has_symbol(t.name):
                    self.fail(f"symbol {t.name!r} used without arguments; write {t.name}(...)", t)
                self.fail(f"unbound variable {t.name!r}", t)
            if isinstance(t, A.TProj):
                if t.name not in ctx.names:
                    self.fail(f"unbound variable {t.name!r}", t)
                return S.point_of(ctx, t.name, point_value(t.point))
            if isinstance(t, A.TTuple):
                return S.Pair(tuple(self.term(a, ctx, scope) for a in t.items), ctx.base)
            if isinstance(t, A.TApp):
                if not any(f.name == t.fun for f in L.functions):
                    if any(r.name == t.fun for r in L.relations):
                        self.fail(f"relation {t.fun!r} used as a term", t)
                    self.fail(f"unknown function symbol {t.fun!r}", t)
                f = L.function(t.fun)
                arg = self.args(t.args, ctx, scope)
                if arg.cod != f.dom:
                    self.fail(f"arity mismatch: argument of {t.fun} does not have the declared arity", t)
                return S.apply(f, arg)
        except S.ArityError as exc:
            self.fail(f"arity error: {exc}", t)
        raise TypeError(t)

    def args(self, items, ctx: S.Context, scope: Scope) -> S.Term:
        if not items:
            return S.Reindex(vb.initial_map(ctx.arity))
        return S.tuple_term([self.term(a, ctx, scope) for a in items], ctx.base)

    def formula(self, phi: A.RFormula, ctx: S.Context, scope: Scope) -> S.Formula:
        L = self.m.lang()
        try:
            if isinstance(phi, A.FTrue):
                return S.top(ctx)
            if isinstance(phi, A.FFalse):
                return S.bottom(ctx)
            if isinstance(phi, A.FEq):
                lhs, rhs = self.term(phi.lhs, ctx, scope), self.term(phi.rhs, ctx, scope)
                if lhs.cod != rhs.cod:
                    self.fail("arity mismatch: the two sides of the equation have different arities", phi)
                return S.Eq(ctx, lhs, rhs)
            if isinstance(phi, A.FRel):
                if not any(r.name == phi.name for r in L.relations):
                    if any(f.name == phi.name for f in L.functions):
                        self.fail(f"function {phi.name!r} used as a relation", phi)
                    self.fail(f"unknown relation symbol {phi.name!r}", phi)
                sym = L.relation(phi.name)
                arg = self.args(phi.args, ctx, scope)
                if phi.power is None:
                    if arg.cod != sym.arity:
                        self.fail(f"arity mismatch: argument of {phi.name} does not have the declared arity", phi)
                    return S.Rel(ctx, sym, arg)
                Y = self.obj(phi.power, scope)
                want = vb.tensor(sym.arity, Y)
                if arg.cod != want:
                    if arg.cod == Y and sym.arity == vb.unit(ctx.base):
                        # I (*) Y is identified with Y through the unit isomorphism
                        u = vb.compose(vb.tensor_unit_iso(Y), vb.tensor_symmetry(sym.arity, Y))
                        arg = S.Compose(S.Reindex(u), arg)
                    else:
                        self.fail(f"arity mismatch: argument of {phi.name}^Y does not have arity W (*) Y", phi)
                return S.Rel(ctx, sym, arg, Y)
            if isinstance(phi, A.FAnd):
                return S.And(ctx, tuple(self.formula(p, ctx, scope) for p in phi.parts))
            if isinstance(phi, A.FOr):
                return S.Or(ctx, tuple(self.formula(p, ctx, scope) for p in phi.parts))
            if isinstance(phi, A.FExists):
                binders = self.binders(phi.binders, ctx, scope, phi)
                inner = ctx.extend(binders)
                body = self.formula(phi.body, inner, scope)
                if phi.quantifier == "exists":
                    return S.Exists(ctx, binders, body)
                return S.Unique(ctx, binders, body, enriched=phi.quantifier == "exists!!")
            if isinstance(phi, A.FIndexed):
                return self.indexed(phi, ctx, scope)
        except S.ArityError as exc:
            self.fail(f"arity error: {exc}", phi)
        raise TypeError(phi)

    def binders(self, raw, ctx: S.Context, scope: Scope, node) -> tuple:
        out = []
        seen = set(ctx.names)
        for name, typ in raw:
            if name in seen:
                self.fail(f"variable {name!r} is already bound", node)
            seen.add(name)
            out.append((name, vb.unit(self.m.base) if typ is None else self.obj(typ, scope)))
        return tuple(out)

    def indexed(self, phi: A.FIndexed, ctx: S.Context, scope: Scope) -> S.OrSchema:
        if phi.param in scope.params:
            self.fail(f"parameter {phi.param!r} shadows an outer parameter", phi)
        collector = Collector()
        self.sample(lambda sc: self.formula(phi.body, ctx, sc), scope, phi.param, "N", phi.start, collector, phi)
        outer = dict(scope.params)

        def instance(n, _ctx=ctx, _outer=outer):
            sc = Scope({**_outer, phi.param: Fraction(n)}, None, True)
            try:
                return self.formula(phi.body, _ctx, sc)
            except InvalidInstance:
                return None

        key = (phi.body, tuple(sorted(outer.items())), phi.param)
        return S.OrSchema(ctx, phi.param, phi.start, instance, collector.critical(phi.param),
                          fmt_formula(phi.body), key)

    def sample(self, build, scope: Scope, param: str, domain: str, start: int, collector: Collector, node):
        """Elaborate once at a sample value: arity checks plus distance-form collection."""
        value = Fraction(max(start, 1))
        sc = Scope({**scope.params, param: value}, collector, False)
        try:
            return build(sc)
        except InvalidInstance as exc:
            self.fail(f"invalid object literal: {exc}", node)
        finally:
            if scope.collector is not None:
                # outer parameters seen inside this body also matter to the outer family
                for p in collector.distances:
                    if p != param:
                        scope.collector.add(p, collector.distances[p], collector.constraints.get(p, []))

    # -- sequents and theories ----------------------------------------------

    def sequent(self, s: A.RSequent, name: str, scope: Scope) -> S.Sequent:
        binders = self.binders(s.binders, S.empty_context(self.m.base), scope, s)
        ctx = S.context(self.m.base, binders)
        lhs = self.formula(s.lhs, ctx, scope)
        rhs = self.formula(s.rhs, ctx, scope)
        if isinstance(lhs, S.Unique) or _contains_unique(lhs) or _contains_unique(rhs, top=True):
            self.fail("exists! and exists!! may only occur as the whole conclusion of a sequent", s)
        try:
            return S.Sequent(ctx, lhs, rhs, name)
        except S.ArityError as exc:
            self.fail(str(exc), s)

    def theory(self, it: A.ITheory) -> S.Theory:
        axioms, names = [], set()
        for ax in it.axioms:
            if ax.name in names:
                self.fail(f"axiom {ax.name!r} appears twice", ax)
            names.add(ax.name)
            if isinstance(ax, A.AAxiom):
                axioms.append(self.sequent(ax.sequent, ax.name, Scope()))
            else:
                axioms.append(self.schema(ax))
        try:
            return S.Theory(it.name, self.m.lang(), axioms)
        except ValueError as exc:
            self.fail(str(exc), it)

    def schema(self, ax: A.ASchema) -> S.Schema:
        collector = Collector()
        self.sample(lambda sc: self.sequent(ax.sequent, ax.name, sc), Scope(), ax.param, ax.domain, ax.start,
                    collector, ax)

        def instance(value):
            try:
                return self.sequent(ax.sequent, ax.name, Scope({ax.param: Fraction(value)}, None, True))
            except InvalidInstance:
                return None

        return S.Schema(ax.name, ax.param, ax.domain, ax.start, instance, collector.critical(ax.param),
                        fmt_sequent(ax.sequent))

    # -- structures, morphisms, cones ----------------------------------------

    def structure(self, it: A.IStructure) -> LStructure:
        L = self.m.lang()
        carrier = self.obj(it.carrier, Scope())
        if carrier.rank:
            self.fail("a structure carrier must be a finite object", it)
        funs = {}
        for name, pairs in it.funs:
            if name in funs:
                self.fail(f"function {name!r} given twice", it)
            funs[name] = {point_value(a): point_value(b) for a, b in pairs}
        rels = {}
        for name, pts in it.rels:
            if name in rels:
                self.fail(f"relation {name!r} given twice", it)
            rels[name] = [point_value(p) for p in pts]
        for sym in L.relations:
            rels.setdefault(sym.name, [])
        try:
            return structure_from_tables(L, carrier, funs, rels, name=it.name)
        except (ValueError, KeyError) as exc:
            self.fail(f"structure {it.name}: {exc}", it)

    def carrier_map(self, A_: LStructure, B: LStructure, pairs, node) -> VMorphism:
        table = {}
        for a, b in pairs:
            a, b = point_value(a), point_value(b)
            if a not in A_.carrier.index:
                self.fail(f"{a!r} is not a point of {A_.name}", node)
            if b not in B.carrier.index:
                self.fail(f"{b!r} is not a point of {B.name}", node)
            if a in table and table[a] != b:
                self.fail(f"{a!r} is mapped twice", node)
            table[a] = b
        missing = [a for a in A_.carrier.points if a not in table]
        if missing:
            self.fail(f"map undefined at {missing[0]!r}", node)
        return VMorphism(A_.carrier, B.carrier, [table[a] for a in A_.carrier.points])

    def lookup_structure(self, name, node) -> LStructure:
        if name not in self.m.structures:
            self.fail(f"unknown structure {name!r}", node)
        return self.m.structures[name]

    def morphism(self, it: A.IMorphism) -> StructureMorphism:
        src, tgt = self.lookup_structure(it.src, it), self.lookup_structure(it.tgt, it)
        h = self.carrier_map(src, tgt, it.mapping, it)
        problem = structure_morphism_violation(h, src, tgt)
        if problem:
            self.fail(f"morphism {it.name}: {problem}", it)
        return StructureMorphism(src, tgt, h)

    def cone(self, it: A.ICone) -> Cone:
        apex = self.lookup_structure(it.apex, it)
        legs = []
        for tgt, pairs in it.legs:
            B = self.lookup_structure(tgt, it)
            h = self.carrier_map(apex, B, pairs, it)
            problem = structure_morphism_violation(h, apex, B)
            if problem:
                self.fail(f"cone {it.name}, leg to {tgt}: {problem}", it)
            legs.append(StructureMorphism(apex, B, h))
        return Cone(apex, tuple(legs), it.name)


def _contains_unique(phi, top: bool = False) -> bool:
    if isinstance(phi, S.Unique):
        return not top or _contains_unique(phi.body)
    if isinstance(phi, (S.And, S.Or)):
        return any(_contains_unique(p) for p in phi.parts)
    if isinstance(phi, S.Exists):
        return _contains_unique(phi.body)
    return False


def point_value(p):
    if isinstance(p, (A.Bracket, A.Tup)):
        return tuple(point_value(q) for q in p.items)
    return p


# ---------------------------------------------------------------------------
# entry points


def load_text(text: str, path: str | None = None, loading: tuple = ()) -> Module:
    doc = parse(text, path)
    return Elaborator(Module(path), loading or ((os.path.normpath(path),) if path else ())).run(doc)


def load(path: str) -> Module:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return load_text(text, path)
