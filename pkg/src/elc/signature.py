"""Languages, structures, structure morphisms and cones."""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from . import vbase as vb
from .subobject import Subobject, all_subobjects, image, join
from .vbase import Base, VMorphism, VObject


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, budget: int, what: str = "search space"):
        super().__init__(f"{what} of about {estimate} candidates exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


DEFAULT_BUDGET = 2_000_000


def search_budget(explicit: int | None = None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("ELC_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class FunctionSymbol:
    name: str
    dom: VObject  # input arity X
    cod: VObject  # output arity Y


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arity: VObject


@dataclass(frozen=True)
class Language:
    base: Base
    functions: tuple[FunctionSymbol, ...] = ()
    relations: tuple[RelationSymbol, ...] = ()

    def __post_init__(self):
        names = [s.name for s in self.functions] + [s.name for s in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate symbol names in language")
        for s in self.functions:
            vb.check_same_base(s.dom, s.cod, vb.unit(self.base))
        for r in self.relations:
            vb.check_same_base(r.arity, vb.unit(self.base))
        object.__setattr__(self, "functions", tuple(sorted(self.functions, key=lambda s: s.name)))
        object.__setattr__(self, "relations", tuple(sorted(self.relations, key=lambda s: s.name)))

    @property
    def is_relational(self) -> bool:
        return not self.functions

    def function(self, name: str) -> FunctionSymbol:
        for s in self.functions:
            if s.name == name:
                return s
        raise KeyError(f"unknown function symbol {name!r}")

    def relation(self, name: str) -> RelationSymbol:
        for s in self.relations:
            if s.name == name:
                return s
        raise KeyError(f"unknown relation symbol {name!r}")

    def has_symbol(self, name: str) -> bool:
        return any(s.name == name for s in self.functions + self.relations)


def empty_language(base: Base) -> Language:
    return Language(base)


class LStructure:
    """A carrier with interpretations ``f_A: A^X -> A^Y`` and ``r_A ↣ A^X``."""

    def __init__(self, language: Language, carrier: VObject, functions: Mapping[str, VMorphism] | None = None,
                 relations: Mapping[str, Subobject] | None = None, name: str | None = None,
                 check: bool = True):
        self.language = language
        self.carrier = carrier
        self.functions = dict(functions or {})
        self.relations = dict(relations or {})
        self.name = name
        self._memo: dict = {}
        if check:
            problems = validate_structure(self)
            if problems:
                raise ValueError("invalid structure: " + "; ".join(problems))

    @property
    def base(self) -> Base:
        return self.language.base

    def power(self, X: VObject) -> VObject:
        return vb.power(self.carrier, X)

    @property
    def key(self):
        """Exact identity of the structure (carrier plus interpretation tables)."""
        return (
            self.carrier,
            tuple((n, self.functions[n].images) for n in sorted(self.functions)),
            tuple((n, frozenset(self.relations[n].points)) for n in sorted(self.relations)),
        )

    def __eq__(self, other):
        if not isinstance(other, LStructure):
            return NotImplemented
        return self.language == other.language and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        label = self.name or "structure"
        return f"LStructure({label}, |A|={len(self.carrier)})"


def structure_from_tables(language: Language, carrier: VObject, functions: Mapping | None = None,
                          relations: Mapping | None = None, name: str | None = None) -> LStructure:
    """Build a structure from point-level tables.

    A function table maps points of ``A^X`` to points of ``A^Y``; for single-point
    arities (such as the unit) bare carrier points may be used on both sides.
    Relation tables list points of ``A^X``, again with bare points allowed for
    single-point arities.
    """
    functions = functions or {}
    relations = relations or {}
    fmaps = {}
    for sym in language.functions:
        table = functions.get(sym.name)
        if table is None:
            raise ValueError(f"missing table for function {sym.name}")
        AX, AY = vb.power(carrier, sym.dom), vb.power(carrier, sym.cod)
        norm = {_as_point(k, sym.dom): _as_point(v, sym.cod) for k, v in dict(table).items()}
        missing = [p for p in AX.points if p not in norm]
        if missing:
            raise ValueError(f"function {sym.name} undefined at {missing[0]!r}")
        fmaps[sym.name] = VMorphism(AX, AY, [norm[p] for p in AX.points])
    rsubs = {}
    for sym in language.relations:
        AX = vb.power(carrier, sym.arity)
        pts = [_as_point(p, sym.arity) for p in relations.get(sym.name, ())]
        bad = [p for p in pts if p not in AX.index]
        if bad:
            raise ValueError(f"relation {sym.name}: {bad[0]!r} is not a point of A^X")
        if carrier.base is Base.FINAB:
            pts = vb.subgroup_closure(AX, pts)
        rsubs[sym.name] = Subobject(AX, pts)
    extra = (set(functions) - {s.name for s in language.functions}) | (
        set(relations) - {s.name for s in language.relations})
    if extra:
        raise ValueError(f"tables for unknown symbols: {sorted(extra)}")
    return LStructure(language, carrier, fmaps, rsubs, name=name)


def _as_point(p, X: VObject):
    n = X.rank or len(X.points)
    if n == 1 and not (isinstance(p, tuple) and len(p) == 1):
        return (p,)
    return tuple(p) if isinstance(p, list) else p


def validate_structure(A: LStructure) -> list[str]:
    out = []
    L = A.language
    if A.carrier.rank:
        out.append("carrier must be a finite object")
        return out
    if A.carrier.base is not L.base:
        out.append("carrier base differs from the language base")
        return out
    for sym in L.functions:
        f = A.functions.get(sym.name)
        if f is None:
            out.append(f"function {sym.name} not interpreted")
            continue
        AX, AY = A.power(sym.dom), A.power(sym.cod)
        if f.dom != AX or f.cod != AY:
            out.append(f"function {sym.name} has the wrong domain or codomain")
        elif not vb.is_morphism(f.dom, f.cod, f.images):
            out.append(f"function {sym.name} is not a {L.base.value} morphism")
    for sym in L.relations:
        r = A.relations.get(sym.name)
        if r is None:
            out.append(f"relation {sym.name} not interpreted")
            continue
        if r.codomain != A.power(sym.arity):
            out.append(f"relation {sym.name} does not live over A^X")
        elif not vb.in_m(r.m):
            out.append(f"relation {sym.name} is not an M-subobject")
    extra = (set(A.functions) - {s.name for s in L.functions}) | (set(A.relations) - {s.name for s in L.relations})
    for name in sorted(extra):
        out.append(f"interpretation given for unknown symbol {name}")
    return out


# ---------------------------------------------------------------------------
# morphisms


def structure_morphism_violation(h: VMorphism, A: LStructure, B: LStructure) -> str | None:
    """First failing condition for ``h`` to be a structure morphism, or None."""
    if A.language != B.language:
        return "structures over different languages"
    if h.dom != A.carrier or h.cod != B.carrier:
        return "carrier map has the wrong domain or codomain"
    if not vb.is_morphism(h.dom, h.cod, h.images):
        return "carrier map is not a base morphism"
    for sym in A.language.functions:
        hX = vb.power_map(h, sym.dom)
        hY = vb.power_map(h, sym.cod)
        fA, fB = A.functions[sym.name], B.functions[sym.name]
        for p in hX.dom.points:
            if hY(fA(p)) != fB(hX(p)):
                return f"square for function {sym.name} does not commute at {p!r}"
    for sym in A.language.relations:
        hX = vb.power_map(h, sym.arity)
        rB = B.relations[sym.name].points
        for p in A.relations[sym.name].points:
            if hX(p) not in rB:
                return f"relation {sym.name} not preserved at {p!r}"
    return None


def is_structure_morphism(h: VMorphism, A: LStructure, B: LStructure, report: bool = False):
    problem = structure_morphism_violation(h, A, B)
    if report:
        return problem is None, problem
    return problem is None


@dataclass(frozen=True)
class StructureMorphism:
    dom: LStructure
    cod: LStructure
    h: VMorphism

    def __post_init__(self):
        problem = structure_morphism_violation(self.h, self.dom, self.cod)
        if problem:
            raise ValueError(f"not a structure morphism: {problem}")

    def then(self, other: "StructureMorphism") -> "StructureMorphism":
        return StructureMorphism(self.dom, other.cod, vb.compose(other.h, self.h))


def identity_morphism(A: LStructure) -> StructureMorphism:
    return StructureMorphism(A, A, vb.identity(A.carrier))


@dataclass(frozen=True)
class Cone:
    apex: LStructure
    legs: tuple[StructureMorphism, ...] = ()
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(self.legs))
        for g in self.legs:
            if g.dom != self.apex:
                raise ValueError("cone leg does not start at the apex")


class HomUnavailable(ValueError):
    """The structure morphisms between two group structures do not form a subgroup."""


def hom_morphisms(A: LStructure, B: LStructure) -> list[VMorphism]:
    """All structure morphisms ``A -> B``, in the order of ``B^A``."""
    P = vb.power(B.carrier, A.carrier)
    return [VMorphism(A.carrier, B.carrier, phi) for phi in P.points
            if structure_morphism_violation(VMorphism(A.carrier, B.carrier, phi), A, B) is None]


def hom_object(A: LStructure, B: LStructure) -> VObject:
    """Structure morphisms ``A -> B`` with the structure inherited from ``B^A``."""
    P = vb.power(B.carrier, A.carrier)
    keep = [h.images for h in hom_morphisms(A, B)]
    if A.base is Base.FINAB and frozenset(keep) != vb.subgroup_closure(P, keep):
        raise HomUnavailable("structure morphisms are not closed under addition")
    return vb.subspace(P, keep)[0]


# ---------------------------------------------------------------------------
# constructions


def _transpose_point(phi):
    """Swap the two indices of a nested tuple point: ``psi[x][w] = phi[w][x]``."""
    if not phi:
        return ()
    return tuple(zip(*phi)) if phi[0] else ()


def power_structure(A: LStructure, X: VObject) -> LStructure:
    """The structure on ``A^X`` with pointwise interpretations.

    A point of ``(A^X)^W`` is a tuple over ``W`` of tuples over ``X``; swapping
    the indices gives the canonical isomorphism with ``(A^W)^X``, along which
    ``(f_A)^X`` and ``(r_A)^X`` are transported.
    """
    C = vb.power(A.carrier, X)
    funcs = {}
    for sym in A.language.functions:
        src, tgt = vb.power(C, sym.dom), vb.power(C, sym.cod)
        fA = A.functions[sym.name]
        images = []
        for phi in src.points:
            swapped = _swap(phi, len(sym.dom.points) if not sym.dom.rank else sym.dom.rank, len(X.points))
            applied = tuple(fA(col) for col in swapped)
            images.append(_swap(applied, len(X.points), _width(sym.cod)))
        funcs[sym.name] = VMorphism(src, tgt, images)
    rels = {}
    for sym in A.language.relations:
        CW = vb.power(C, sym.arity)
        rA = A.relations[sym.name].points
        width = _width(sym.arity)
        keep = [phi for phi in CW.points if all(col in rA for col in _swap(phi, width, len(X.points)))]
        rels[sym.name] = Subobject(CW, keep)
    return LStructure(A.language, C, funcs, rels, name=f"{A.name or 'A'}^X")


def _width(W: VObject) -> int:
    return W.rank or len(W.points)


def _swap(phi, outer: int, inner: int):
    """Transpose an ``outer x inner`` nested tuple into ``inner x outer``."""
    return tuple(tuple(phi[w][x] for w in range(outer)) for x in range(inner))


def swap_subobject(s: Subobject, A: VObject, W: VObject, X: VObject) -> Subobject:
    """Move a subobject of ``A^W`` to the subobject ``s^X`` of ``(A^X)^W``."""
    C = vb.power(A, X)
    CW = vb.power(C, W)
    width = _width(W)
    n = len(X.points)
    return Subobject(CW, [phi for phi in CW.points if all(col in s.points for col in _swap(phi, width, n))])


def pushout_structures(f: StructureMorphism, g: StructureMorphism) -> tuple[LStructure, StructureMorphism, StructureMorphism]:
    """Pushout of a span of structures over a relational language."""
    L = f.dom.language
    if not L.is_relational:
        raise ValueError("structure pushouts need a relational language")
    if f.dom != g.dom:
        raise ValueError("pushout needs a common domain")
    Q, q1, q2 = vb.pushout(f.h, g.h)
    rels = {}
    for sym in L.relations:
        QX = vb.power(Q, sym.arity)
        parts = []
        for q, B in ((q1, f.cod), (q2, g.cod)):
            qX = vb.power_map(q, sym.arity)
            r = B.relations[sym.name]
            parts.append(image(vb.compose(qX, r.m)))
        rels[sym.name] = join(parts, QX)
    P = LStructure(L, Q, {}, rels)
    return P, StructureMorphism(f.cod, P, q1), StructureMorphism(g.cod, P, q2)


def free_structure(L: Language, X: VObject) -> LStructure:
    """``X`` with every relation empty (relational languages only)."""
    if not L.is_relational:
        raise ValueError("free structures need a relational language")
    return LStructure(L, X, {}, {r.name: Subobject(vb.power(X, r.arity), ()) for r in L.relations})


# ---------------------------------------------------------------------------
# enumeration


def structure_automorphism_action(A: LStructure, sigma: tuple):
    """Relabel the interpretation tables of ``A`` along a carrier automorphism."""
    C = A.carrier
    s = VMorphism(C, C, sigma)
    out_f = {}
    for sym in A.language.functions:
        sX = vb.power_map(s, sym.dom)
        sY = vb.power_map(s, sym.cod)
        fA = A.functions[sym.name]
        inv = {sX(p): p for p in sX.dom.points}
        out_f[sym.name] = tuple(sY(fA(inv[p])) for p in sX.dom.points)
    out_r = {}
    for sym in A.language.relations:
        sX = vb.power_map(s, sym.arity)
        out_r[sym.name] = frozenset(sX(p) for p in A.relations[sym.name].points)
    return out_f, out_r


def canonical_key(A: LStructure, automorphisms: Sequence[tuple] | None = None):
    """Invariant of ``A`` under carrier automorphisms: least relabelled encoding."""
    C = A.carrier
    autos = automorphisms if automorphisms is not None else vb.automorphisms(C)
    best = None
    for sigma in autos:
        funcs, rels = structure_automorphism_action(A, sigma)
        enc = []
        for sym in A.language.functions:
            cod = vb.power(C, sym.cod)
            enc.append(tuple(cod.index[v] for v in funcs[sym.name]))
        for sym in A.language.relations:
            dom = vb.power(C, sym.arity)
            enc.append(tuple(sorted(dom.index[p] for p in rels[sym.name])))
        enc = tuple(enc)
        if best is None or enc < best:
            best = enc
    return best


def _carrier_key(C: VObject):
    return (C.base.value, len(C.points), repr(C.structure_key))


def enumerate_structures(L: Language, size_bound: int, allow_empty: bool = False,
                         budget: int | None = None, distance_grid: Sequence = (1, 2, vb.INF),
                         min_size: int | None = None) -> Iterator[LStructure]:
    """Every structure with carrier size at most ``size_bound``, one per isomorphism class.

    The order is deterministic: by size, then carrier, then interpretation tables.
    Raises :class:`BudgetExceeded` before doing any work when the raw candidate
    count exceeds the budget.
    """
    budget = search_budget(budget)
    lo = (0 if allow_empty else 1) if min_size is None else min_size
    plan = []
    estimate = 0
    for n in range(lo, size_bound + 1):
        for C in vb.enumerate_carriers(L.base, n, distance_grid):
            fun_options = [vb.power(vb.power(C, s.cod), vb.power(C, s.dom)).points for s in L.functions]
            count = math.prod(len(o) for o in fun_options)
            for r in L.relations:
                count *= 2 ** len(vb.power(C, r.arity))
            estimate += count
            plan.append((C, fun_options))
    if estimate > budget:
        raise BudgetExceeded(estimate, budget, "structure enumeration")
    for C, fun_options in plan:
        rel_options = [all_subobjects(vb.power(C, r.arity)) for r in L.relations]
        autos = vb.automorphisms(C)
        seen = set()
        for ftables in itertools.product(*fun_options):
            funcs = {s.name: VMorphism(vb.power(C, s.dom), vb.power(C, s.cod), t)
                     for s, t in zip(L.functions, ftables)}
            for rsubs in itertools.product(*rel_options):
                rels = {r.name: s for r, s in zip(L.relations, rsubs)}
                A = LStructure(L, C, funcs, rels, check=False)
                key = canonical_key(A, autos)
                if key in seen:
                    continue
                seen.add(key)
                yield A
