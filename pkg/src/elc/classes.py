"""Injectivity and orthogonality classes, and the constructions linking them to sequents.

Over a relational language a conjunction of atomic formulas ``phi(x)`` is
presented by a finite structure ``A`` with a surjection ``e: X -> A`` such that
structure morphisms ``A -> K`` correspond to the points of ``phi_K``.  With
presentations in hand

* a basic sequent ``phi |- \\/_j exists y_j . psi_j`` becomes a cone out of
  the presentation of ``phi``, and a cone becomes a sequent whose left side
  lists every fact of the apex;
* a limit sequent ``phi |- exists!! y . psi`` becomes a single morphism, and a
  morphism ``h: A -> B`` becomes ``pi_A(x) |- exists!! y . pi_B(y) /\\ x = y.h``.

``run_bridge`` checks on every structure up to a size bound that the sequent
side and the class side agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import subobject as so
from . import vbase as vb
from .logic import syntax as S
from .logic.schema import is_model
from .logic.semantics import Options, interpret, satisfies_sequent
from .signature import (Cone, Language, LStructure, StructureMorphism, enumerate_structures, free_structure,
                        hom_morphisms, hom_object, pushout_structures)
from .subobject import Subobject
from .vbase import Base, VMorphism, VObject


class BridgeError(ValueError):
    """The input is outside the shapes the constructions handle."""


# ---------------------------------------------------------------------------
# class membership


@dataclass
class HomTest:
    """Outcome of an injectivity or orthogonality test, with the sizes involved."""

    verdict: bool
    source_sizes: tuple
    target_size: int
    image_size: int


def precomposition(h: StructureMorphism, K: LStructure) -> VMorphism:
    """``K(h, K): K(B, K) -> K(A, K)`` for ``h: A -> B``."""
    HB, HA = hom_object(h.cod, K), hom_object(h.dom, K)
    pos = [h.cod.carrier.index[h.h(a)] for a in h.dom.carrier.points]
    return VMorphism(HB, HA, [tuple(g[i] for i in pos) for g in HB.points])


def cone_injectivity(K: LStructure, cone: Cone) -> HomTest:
    HA = hom_object(cone.apex, K)
    parts = [hom_object(g.cod, K) for g in cone.legs]
    maps = [precomposition(g, K) for g in cone.legs]
    if maps:
        co = vb.coproduct(parts, K.base)
        induced = co.induced(maps)
    else:
        induced = vb.initial_map(HA)
    image = set(induced.images)
    return HomTest(vb.in_e(induced), tuple(len(p) for p in parts), len(HA), len(image))


def is_cone_injective(K: LStructure, cone: Cone) -> bool:
    """``sum_j K(B_j, K) -> K(A, K)`` is in E."""
    return cone_injectivity(K, cone).verdict


def orthogonality(K: LStructure, h: StructureMorphism) -> HomTest:
    pre = precomposition(h, K)
    return HomTest(vb.is_iso(pre), (len(pre.dom),), len(pre.cod), len(set(pre.images)))


def is_orthogonal(K: LStructure, h: StructureMorphism) -> bool:
    """``K(h, K)`` is an isomorphism."""
    return orthogonality(K, h).verdict


# ---------------------------------------------------------------------------
# fragments, elementary and pure morphisms


@dataclass
class Fragment:
    """Bounded positive formulas over contexts of ``I``-ary variables.

    Atoms are equations between terms and relation atoms whose argument is a
    tuple of terms; terms are variables and, when ``term_depth`` is 1,
    unary function symbols ``(I, I)`` applied to variables.  A positive-primitive
    formula is a conjunction of at most ``conjunct_bound`` atoms under at most
    ``depth`` existential variables; positive-existential formulas are
    disjunctions of at most ``disjunct_bound`` of those.
    """

    language: Language
    arity_bound: int = 1
    conjunct_bound: int = 2
    disjunct_bound: int = 2
    depth: int = 1
    term_depth: int = 1

    def contexts(self) -> list[S.Context]:
        I = vb.unit(self.language.base)
        names = ["x", "y", "z", "u", "v", "w"]
        return [S.context(self.language.base, [(names[k], I) for k in range(n)])
                for n in range(self.arity_bound + 1)]

    def terms(self, ctx: S.Context) -> list[S.Term]:
        I = vb.unit(ctx.base)
        out = [S.var(ctx, n) for n in ctx.names]
        if self.term_depth >= 1:
            for f in self.language.functions:
                if f.dom == I and f.cod == I:
                    out.extend(S.apply(f, S.var(ctx, n)) for n in ctx.names)
        return out

    def atoms(self, ctx: S.Context) -> list[S.Formula]:
        ts = self.terms(ctx)
        out = []
        for a, b in itertools.combinations(ts, 2):
            out.append(S.Eq(ctx, a, b))
        for r in self.language.relations:
            k = _unit_multiplicity(r.arity, ctx.base)
            if k is None:
                continue
            if k == 0:
                out.append(S.Rel(ctx, r, S.Reindex(vb.initial_map(ctx.arity))))
                continue
            for args in itertools.product(ts, repeat=k):
                term = args[0] if k == 1 else S.Pair(tuple(args), ctx.base)
                if term.cod == r.arity:
                    out.append(S.Rel(ctx, r, term))
        return out

    def conjunctions(self, ctx: S.Context) -> list[S.Formula]:
        atoms = self.atoms(ctx)
        out = [S.top(ctx)]
        for k in range(1, self.conjunct_bound + 1):
            for combo in itertools.combinations(atoms, k):
                out.append(S.conj(ctx, combo))
        return out

    def positive_primitive(self, ctx: S.Context) -> list[S.Formula]:
        out = list(self.conjunctions(ctx))
        I = vb.unit(ctx.base)
        fresh = [n for n in ("a", "b", "c") if n not in ctx.names]
        for d in range(1, self.depth + 1):
            binders = tuple((fresh[k], I) for k in range(d))
            inner = ctx.extend(binders)
            for body in self.conjunctions(inner):
                if _mentions_binder(body, len(ctx)):
                    out.append(S.Exists(ctx, binders, body))
        return out

    def positive_existential(self, ctx: S.Context) -> Iterator[S.Formula]:
        pp = self.positive_primitive(ctx)
        yield S.bottom(ctx)
        yield from pp
        for k in range(2, self.disjunct_bound + 1):
            for combo in itertools.combinations(pp, k):
                yield S.Or(ctx, combo)

    def formulas(self, positive_existential: bool = False) -> Iterator[S.Formula]:
        for ctx in self.contexts():
            if positive_existential:
                yield from self.positive_existential(ctx)
            else:
                yield from self.positive_primitive(ctx)


def _unit_multiplicity(W: VObject, base: Base):
    """``k`` when ``W`` is the coproduct of ``k`` copies of ``I`` (as the parser builds it)."""
    I = vb.unit(base)
    if W == I:
        return 1
    for k in range(0, 5):
        if vb.coproduct([I] * k, base).obj == W:
            return k
    return None


def _mentions_binder(phi: S.Formula, n_outer: int) -> bool:
    """Whether a conjunction over ``ctx + binders`` uses some bound variable."""
    names = set(phi.ctx.names[n_outer:])
    found = False

    def term(t):
        nonlocal found
        if isinstance(t, S.Reindex):
            found |= t.var in names
        elif isinstance(t, S.Compose):
            term(t.outer)
            term(t.inner)
        elif isinstance(t, S.Pair):
            for p in t.parts:
                term(p)

    for a in S.atoms(phi) if S.is_conjunction_of_atomics(phi) else []:
        if isinstance(a, S.Eq):
            term(a.lhs)
            term(a.rhs)
        else:
            term(a.term)
    return found


def pullback_square_holds(f: StructureMorphism, phi: S.Formula, opts: Options | None = None) -> bool:
    """``phi_K`` is the pullback of ``phi_L`` along ``f^X`` (for ``f: K -> L``)."""
    X = phi.ctx.arity
    fX = vb.power_map(f.h, X)
    return so.pull_back(interpret(phi, f.cod, opts), fX) == interpret(phi, f.dom, opts)


def is_elementary(f: StructureMorphism, frag: Fragment, opts: Options | None = None) -> bool:
    return all(pullback_square_holds(f, phi, opts) for phi in frag.formulas(False))


def is_pe_stable(f: StructureMorphism, frag: Fragment, opts: Options | None = None) -> bool:
    return all(pullback_square_holds(f, phi, opts) for phi in frag.formulas(True))


def postcomposition(P: LStructure, f: StructureMorphism) -> VMorphism:
    """``K(P, f): K(P, K) -> K(P, L)``."""
    HK, HL = hom_object(P, f.dom), hom_object(P, f.cod)
    return VMorphism(HK, HL, [tuple(f.h(a) for a in g) for g in HK.points])


def is_pure_quotient(f: StructureMorphism, probes: Iterable[LStructure]) -> bool:
    """Postcomposition with ``f`` is in E on the homs out of every probe."""
    return all(vb.in_e(postcomposition(P, f)) for P in probes)


# ---------------------------------------------------------------------------
# presentations


def _require_relational(L: Language, what: str):
    if not L.is_relational:
        raise BridgeError(f"{what} needs a relational language")
    if L.base is Base.FINAB:
        raise BridgeError(f"{what} is not available over abelian groups")


def term_map(t: S.Term) -> VMorphism:
    """The arity map ``u: Y -> X`` with ``t = A^u``, for terms without function symbols."""
    if isinstance(t, S.Reindex):
        return t.u
    if isinstance(t, S.Compose):
        return vb.compose(term_map(t.inner), term_map(t.outer))
    if isinstance(t, S.Pair):
        maps = [term_map(p) for p in t.parts]
        return vb.coproduct([m.dom for m in maps], maps[0].cod.base).induced(maps)
    raise BridgeError("function symbols cannot occur in a presentation")


def present_structure(phi: S.Formula, L: Language) -> tuple[LStructure, VMorphism]:
    """The structure presented by a conjunction of atomic formulas, with ``e: X -> A``.

    The carrier is the quotient of the arity ``X`` by the equations of ``phi``;
    each relation holds exactly on the images of the tuples ``phi`` asserts.
    """
    _require_relational(L, "a presentation")
    if not S.is_conjunction_of_atomics(phi):
        raise BridgeError("only conjunctions of atomic formulas have presentations")
    X = phi.ctx.arity
    atoms = S.atoms(phi)
    pairs = []
    for a in atoms:
        if isinstance(a, S.Eq):
            u, v = term_map(a.lhs), term_map(a.rhs)
            pairs.extend(zip(u.images, v.images))
    Q, e = vb.quotient(X, pairs)
    facts: dict = {r.name: [] for r in L.relations}
    for a in atoms:
        if isinstance(a, S.Rel):
            if a.power is not None:
                raise BridgeError("power atoms cannot occur in a presentation")
            u = term_map(a.term)
            facts[a.symbol.name].append(tuple(vb.compose(e, u).images))
    rels = {}
    for r in L.relations:
        QW = vb.power(Q, r.arity)
        rels[r.name] = Subobject(QW, facts[r.name])
    return LStructure(L, Q, {}, rels, name="presented"), e


def presentation_morphism(phi: S.Formula, L: Language) -> tuple[LStructure, StructureMorphism]:
    A, e = present_structure(phi, L)
    return A, StructureMorphism(free_structure(L, phi.ctx.arity), A, e)


def _disjuncts(rhs: S.Formula) -> list[tuple[tuple, S.Formula]]:
    """``rhs`` as a list of ``(binders, conjunction)``."""
    parts = rhs.parts if isinstance(rhs, S.Or) else (rhs,)
    out = []
    for p in parts:
        if isinstance(p, S.Exists) and S.is_conjunction_of_atomics(p.body):
            out.append((p.binders, p.body))
        elif S.is_conjunction_of_atomics(p):
            out.append(((), p))
        else:
            raise BridgeError("the conclusion must be a disjunction of existentially quantified conjunctions")
    return out


def _leg_for(phi: S.Formula, binders: tuple, psi: S.Formula, L: Language, eA: StructureMorphism):
    """Pushout of ``e`` along the presentation of ``psi /\\ phi`` restricted to ``X``."""
    ctx = phi.ctx
    body_ctx = ctx.extend(binders)
    both = S.And(body_ctx, (psi, S.weaken(phi, body_ctx))) if binders else S.And(ctx, (psi, phi))
    C, eC = presentation_morphism(both, L)
    FX = eA.dom
    incl = body_ctx.prefix_inclusion(len(ctx)) if binders else vb.identity(ctx.arity)
    Fi = StructureMorphism(FX, eC.dom, incl)
    P, q1, _ = pushout_structures(eA, Fi.then(eC))
    return q1


def cone_from_sequent(seq: S.Sequent, L: Language) -> Cone:
    _require_relational(L, "a cone")
    if seq.kind != S.BASIC:
        raise BridgeError("cones come from basic sequents")
    if not S.is_conjunction_of_atomics(seq.lhs):
        raise BridgeError("the premise must be a conjunction of atomic formulas")
    A, eA = presentation_morphism(seq.lhs, L)
    legs = [_leg_for(seq.lhs, binders, psi, L, eA) for binders, psi in _disjuncts(seq.rhs)]
    return Cone(A, tuple(legs), name=f"cone({seq.name})" if seq.name else "cone")


def orth_morphism_from_limit_sequent(seq: S.Sequent, L: Language) -> StructureMorphism:
    _require_relational(L, "an orthogonality morphism")
    if seq.kind != S.LIMIT:
        raise BridgeError("orthogonality morphisms come from limit sequents")
    A, eA = presentation_morphism(seq.lhs, L)
    return _leg_for(seq.lhs, seq.rhs.binders, seq.rhs.body, L, eA)


# -- structures to formulas ----------------------------------------------------


def presentation_formula(A: LStructure, ctx: S.Context, name: str) -> S.Formula:
    """``pi_A`` at the variable ``name`` of ``ctx``: every relational fact of ``A``."""
    L = A.language
    _require_relational(L, "a presentation formula")
    X = A.carrier
    inj = ctx.injection(name)
    parts = []
    for r in L.relations:
        for p in sorted(A.relations[r.name].points, key=repr):
            u = VMorphism(r.arity, X, p)
            parts.append(S.Rel(ctx, r, S.Reindex(vb.compose(inj, u), name)))
    return S.conj(ctx, parts) if parts else S.top(ctx)


def _chi(g: StructureMorphism, ctx: S.Context, x: str, y: str):
    body_ctx = ctx.extend([(y, g.cod.carrier)])
    along = S.Reindex(vb.compose(body_ctx.injection(y), g.h), y)
    eq = S.Eq(body_ctx, S.var(body_ctx, x), along)
    return body_ctx, S.And(body_ctx, (presentation_formula(g.cod, body_ctx, y), eq))


def sequent_from_cone(cone: Cone) -> S.Sequent:
    A = cone.apex
    L = A.language
    _require_relational(L, "a cone sequent")
    ctx = S.context(L.base, [("x", A.carrier)])
    disj = []
    for g in cone.legs:
        body_ctx, body = _chi(g, ctx, "x", "y")
        disj.append(S.Exists(ctx, (("y", g.cod.carrier),), body))
    rhs = disj[0] if len(disj) == 1 else S.Or(ctx, tuple(disj))
    return S.Sequent(ctx, presentation_formula(A, ctx, "x"), rhs, name=f"seq({cone.name})" if cone.name else "")


def limit_sequent_from_morphism(h: StructureMorphism, name: str = "") -> S.Sequent:
    L = h.dom.language
    _require_relational(L, "an orthogonality sequent")
    ctx = S.context(L.base, [("x", h.dom.carrier)])
    _, body = _chi(h, ctx, "x", "y")
    rhs = S.Unique(ctx, (("y", h.cod.carrier),), body, enriched=True)
    return S.Sequent(ctx, presentation_formula(h.dom, ctx, "x"), rhs, name=name)


# ---------------------------------------------------------------------------
# the cross-validation driver


@dataclass
class BridgeInstance:
    check: str
    structure: str
    sequent_verdict: bool
    class_verdict: bool

    @property
    def agree(self) -> bool:
        return self.sequent_verdict == self.class_verdict


@dataclass
class BridgeReport:
    size_bound: int
    checks: list = field(default_factory=list)  # names of the paired checks
    instances: list = field(default_factory=list)
    structures: int = 0
    witnesses: dict = field(default_factory=dict)  # label -> description, for disagreeing structures

    @property
    def disagreements(self) -> list:
        return [i for i in self.instances if not i.agree]

    @property
    def ok(self) -> bool:
        return not self.disagreements


@dataclass
class Check:
    """One pairing: a theory-side predicate against a class-side predicate."""

    name: str
    sequent_side: object  # callable K -> bool
    class_side: object  # callable K -> bool


def checks_for_sequent(seq: S.Sequent, L: Language, opts: Options | None = None) -> list[Check]:
    """Both constructions for one axiom: into a cone (or morphism) and back."""
    label = seq.name or "axiom"
    if seq.kind == S.BASIC:
        cone = cone_from_sequent(seq, L)
        back = sequent_from_cone(cone)
        return [
            Check(f"{label}: sequent vs cone_from_sequent", lambda K, s=seq: satisfies_sequent(K, s, opts),
                  lambda K, c=cone: is_cone_injective(K, c)),
            Check(f"{label}: sequent_from_cone vs cone", lambda K, s=back: satisfies_sequent(K, s, opts),
                  lambda K, c=cone: is_cone_injective(K, c)),
        ]
    if seq.kind == S.LIMIT:
        g = orth_morphism_from_limit_sequent(seq, L)
        back = limit_sequent_from_morphism(g, label)
        return [
            Check(f"{label}: limit sequent vs orth_morphism", lambda K, s=seq: satisfies_sequent(K, s, opts),
                  lambda K, h=g: is_orthogonal(K, h)),
            Check(f"{label}: limit_sequent_from_morphism vs morphism",
                  lambda K, s=back: satisfies_sequent(K, s, opts), lambda K, h=g: is_orthogonal(K, h)),
        ]
    raise BridgeError(f"axiom {label}: exists! sequents have no class counterpart here")


def checks_for_cone(cone: Cone, opts: Options | None = None) -> list[Check]:
    seq = sequent_from_cone(cone)
    return [Check(f"{cone.name or 'cone'}: sequent_from_cone vs cone",
                  lambda K: satisfies_sequent(K, seq, opts), lambda K: is_cone_injective(K, cone))]


def checks_for_morphism(h: StructureMorphism, name: str = "morphism", opts: Options | None = None) -> list[Check]:
    seq = limit_sequent_from_morphism(h, name)
    return [Check(f"{name}: limit_sequent_from_morphism vs morphism",
                  lambda K: satisfies_sequent(K, seq, opts), lambda K: is_orthogonal(K, h))]


def paired_check(T: S.Theory, cones: Sequence[Cone], morphisms: Sequence[StructureMorphism],
                 opts: Options | None = None) -> Check:
    """A theory claimed to axiomatize the class cut out by the given cones and morphisms."""
    def class_side(K):
        return all(is_cone_injective(K, c) for c in cones) and all(is_orthogonal(K, h) for h in morphisms)

    return Check(f"{T.name}: theory vs supplied cones/morphisms", lambda K: is_model(K, T, opts), class_side)


def run_bridge(checks: Sequence[Check], L: Language, size_bound: int, allow_empty: bool = True,
               budget: int | None = None, grid=(1, 2, vb.INF), structures: Iterable[LStructure] | None = None
               ) -> BridgeReport:
    """Evaluate every check on every structure up to ``size_bound`` (deterministic order)."""
    report = BridgeReport(size_bound, [c.name for c in checks])
    pool = structures if structures is not None else enumerate_structures(L, size_bound, allow_empty, budget, grid)
    for k, K in enumerate(pool):
        label = K.name or f"K{k}"
        report.structures += 1
        for c in checks:
            inst = BridgeInstance(c.name, label, bool(c.sequent_side(K)), bool(c.class_side(K)))
            report.instances.append(inst)
            if not inst.agree:
                report.witnesses[label] = describe_structure(K)
    return report


def describe_structure(K: LStructure) -> dict:
    """Plain-data description used to name structures in reports."""
    C = K.carrier
    out = {"size": len(C), "points": [repr(p) for p in C.points]}
    if C.base is Base.FINMET:
        out["distances"] = {f"{x!r},{y!r}": str(C.d(x, y)) for x, y in itertools.combinations(C.points, 2)}
    if C.base is Base.FINPOS:
        out["order"] = [f"{x!r}<{y!r}" for x in C.points for y in C.points if x != y and C.le(x, y)]
    out["relations"] = {n: sorted(repr(p) for p in s.points) for n, s in sorted(K.relations.items())}
    out["functions"] = {n: [repr(v) for v in f.images] for n, f in sorted(K.functions.items())}
    return out


def hom_count(A: LStructure, B: LStructure) -> int:
    return len(hom_morphisms(A, B))
