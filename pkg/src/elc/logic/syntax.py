"""Terms, formulas, sequents and theories.

A context is a list of typed variables ``x1:X1, ..., xk:Xk``; its arity is the
flat coproduct ``X1 + ... + Xk``.  Terms are built from

* ``Reindex(u)`` for a base map ``u: Y -> X`` (denoting ``A^u``), which covers
  variables and point projections,
* ``Apply(f)`` for a function symbol,
* ``Compose(outer, inner)`` and ``Pair(parts)`` (tupling into a coproduct arity).

Every node keeps the variable names it was written with so that formulas print
back in the surface syntax.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

from .. import vbase as vb
from ..signature import FunctionSymbol, Language, RelationSymbol
from ..vbase import Base, VMorphism, VObject


class ArityError(ValueError):
    pass


class _Node:
    """Frozen dataclass mixin caching the structural hash."""

    def __hash__(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = hash(tuple(getattr(self, f) for f in self.__dataclass_fields__))
            object.__setattr__(self, "_h", h)
            return h


# ---------------------------------------------------------------------------
# contexts


@dataclass(frozen=True, eq=True)
class Context(_Node):
    names: tuple[str, ...]
    arities: tuple[VObject, ...]
    base: Base

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ArityError(f"duplicate variable in context {self.names}")

    __hash__ = _Node.__hash__

    @property
    def arity(self) -> VObject:
        return _coproduct(self.arities, self.base)

    def extend(self, binders: Sequence[tuple[str, VObject]]) -> "Context":
        names = self.names + tuple(n for n, _ in binders)
        return Context(names, self.arities + tuple(Y for _, Y in binders), self.base)

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ArityError(f"unbound variable {name!r}") from None

    def injection(self, name: str) -> VMorphism:
        """The coproduct injection of variable ``name``'s arity."""
        i = self.index_of(name)
        return _legs(self.arities, self.base)[i]

    def prefix_inclusion(self, n: int) -> VMorphism:
        """``X1+...+Xn -> X1+...+Xk`` (the first-component inclusion)."""
        small = _coproduct(self.arities[:n], self.base)
        big = self.arity
        if self.base is Base.FINAB and big.rank and not small.rank:
            return VMorphism(small, big, [tuple(0 for _ in range(big.rank))] * len(small.points))
        if self.base is Base.FINAB and big.rank:
            images = []
            for k in range(small.rank):
                v = [0] * big.rank
                v[k] = 1
                images.append(tuple(v))
            return VMorphism(small, big, images)
        if self.base is Base.FINAB:
            # finite direct sums: pad with zeros
            return VMorphism(small, big, [tuple(x) + tuple(Y.zero for Y in self.arities[n:]) for x in small.points])
        return VMorphism(small, big, small.points)

    def __len__(self):
        return len(self.names)


def empty_context(base: Base) -> Context:
    return Context((), (), base)


def context(base: Base, binders: Sequence[tuple[str, VObject]]) -> Context:
    return empty_context(base).extend(binders)


_COPRODUCTS: dict = {}


def _coproduct_diagram(parts: tuple, base: Base):
    key = (parts, base)
    hit = _COPRODUCTS.get(key)
    if hit is None:
        hit = vb.coproduct(list(parts), base)
        _COPRODUCTS[key] = hit
    return hit


def _coproduct(parts: tuple, base: Base) -> VObject:
    return _coproduct_diagram(tuple(parts), base).obj


def _legs(parts: tuple, base: Base) -> list[VMorphism]:
    return _coproduct_diagram(tuple(parts), base).legs


def coproduct_of(parts: Sequence[VObject], base: Base) -> VObject:
    return _coproduct(tuple(parts), base)


# ---------------------------------------------------------------------------
# terms


class Term(_Node):
    dom: VObject
    cod: VObject


@dataclass(frozen=True, eq=True)
class Reindex(Term):
    """``A^u`` for ``u: Y -> X``; printed as ``var`` or ``var.point``."""

    u: VMorphism
    var: str | None = None
    point: object = None
    has_point: bool = False

    __hash__ = _Node.__hash__

    @property
    def dom(self) -> VObject:
        return self.u.cod

    @property
    def cod(self) -> VObject:
        return self.u.dom


@dataclass(frozen=True, eq=True)
class Apply(Term):
    symbol: FunctionSymbol

    __hash__ = _Node.__hash__

    @property
    def dom(self):
        return self.symbol.dom

    @property
    def cod(self):
        return self.symbol.cod


@dataclass(frozen=True, eq=True)
class Compose(Term):
    outer: Term
    inner: Term

    __hash__ = _Node.__hash__

    def __post_init__(self):
        if self.outer.dom != self.inner.cod:
            raise ArityError("composed terms have mismatched arities")

    @property
    def dom(self):
        return self.inner.dom

    @property
    def cod(self):
        return self.outer.cod


@dataclass(frozen=True, eq=True)
class Pair(Term):
    parts: tuple[Term, ...]
    base: Base

    __hash__ = _Node.__hash__

    def __post_init__(self):
        if not self.parts:
            raise ArityError("empty tuple term")
        d = self.parts[0].dom
        if any(p.dom != d for p in self.parts):
            raise ArityError("tuple components over different contexts")

    @property
    def dom(self):
        return self.parts[0].dom

    @property
    def cod(self):
        return _coproduct(tuple(p.cod for p in self.parts), self.base)


def var(ctx: Context, name: str) -> Reindex:
    return Reindex(ctx.injection(name), name)


def point_of(ctx: Context, name: str, point) -> Reindex:
    """The component ``name.point`` of a variable, an ``I``-ary term."""
    i = ctx.index_of(name)
    Y = ctx.arities[i]
    I = vb.unit(ctx.base)
    if ctx.base is Base.FINAB:
        raise ArityError("point projections are not available over abelian groups")
    if point not in Y.index:
        raise ArityError(f"{point!r} is not a point of the arity of {name}")
    pick = VMorphism(I, Y, [point])
    return Reindex(vb.compose(ctx.injection(name), pick), name, point, True)


def apply(f: FunctionSymbol, arg: Term) -> Compose:
    if arg.cod != f.dom:
        raise ArityError(f"argument of {f.name} has the wrong arity")
    return Compose(Apply(f), arg)


def tuple_term(parts: Sequence[Term], base: Base) -> Term:
    parts = tuple(parts)
    if len(parts) == 1:
        return parts[0]
    return Pair(parts, base)


# ---------------------------------------------------------------------------
# formulas


class Formula(_Node):
    ctx: Context

    @property
    def arity(self) -> VObject:
        return self.ctx.arity


@dataclass(frozen=True, eq=True)
class Eq(Formula):
    ctx: Context
    lhs: Term
    rhs: Term

    __hash__ = _Node.__hash__

    def __post_init__(self):
        X = self.ctx.arity
        if self.lhs.dom != X or self.rhs.dom != X:
            raise ArityError("equation terms are not over the context")
        if self.lhs.cod != self.rhs.cod:
            raise ArityError("equated terms have different output arities")


@dataclass(frozen=True, eq=True)
class Rel(Formula):
    """``R(t)`` or ``R^Y(t)``; ``t`` is ``(X, W)``-ary, resp. ``(X, W⊗Y)``-ary."""

    ctx: Context
    symbol: RelationSymbol
    term: Term
    power: VObject | None = None

    __hash__ = _Node.__hash__

    def __post_init__(self):
        if self.term.dom != self.ctx.arity:
            raise ArityError("relation argument is not over the context")
        want = self.symbol.arity if self.power is None else vb.tensor(self.symbol.arity, self.power)
        if self.term.cod != want:
            raise ArityError(f"argument of {self.symbol.name} has the wrong arity")


@dataclass(frozen=True, eq=True)
class And(Formula):
    ctx: Context
    parts: tuple[Formula, ...] = ()

    __hash__ = _Node.__hash__

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if any(p.ctx != self.ctx for p in self.parts):
            raise ArityError("conjuncts over different contexts")


@dataclass(frozen=True, eq=True)
class Or(Formula):
    ctx: Context
    parts: tuple[Formula, ...] = ()

    __hash__ = _Node.__hash__

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if any(p.ctx != self.ctx for p in self.parts):
            raise ArityError("disjuncts over different contexts")


@dataclass(frozen=True, eq=True)
class Exists(Formula):
    ctx: Context
    binders: tuple[tuple[str, VObject], ...]
    body: Formula

    __hash__ = _Node.__hash__

    def __post_init__(self):
        object.__setattr__(self, "binders", tuple(tuple(b) for b in self.binders))
        if self.body.ctx != self.ctx.extend(self.binders):
            raise ArityError("quantifier body is not over the extended context")


@dataclass(frozen=True, eq=True)
class Unique(Formula):
    """``exists!! y . body`` (enriched) or ``exists! y . body``; sequent conclusions only."""

    ctx: Context
    binders: tuple[tuple[str, VObject], ...]
    body: Formula
    enriched: bool = True

    __hash__ = _Node.__hash__

    def __post_init__(self):
        object.__setattr__(self, "binders", tuple(tuple(b) for b in self.binders))
        if self.body.ctx != self.ctx.extend(self.binders):
            raise ArityError("quantifier body is not over the extended context")


@dataclass(frozen=True, eq=True)
class OrSchema(Formula):
    """``\\/ n in start.. . body(n)``, an ℕ-indexed disjunction.

    ``instance`` produces the ``n``-th disjunct; ``critical`` returns, for a
    structure, the parameter values at which the family can change (see
    :mod:`elc.logic.schema`).  ``text`` is the printed body.
    """

    ctx: Context
    param: str
    start: int
    instance: Callable = field(compare=False)
    critical: Callable = field(compare=False)
    text: str = ""
    key: object = None

    def __hash__(self):  # the callables are excluded from the key
        return hash((self.ctx, self.param, self.start, self.text, self.key))


def top(ctx: Context) -> And:
    return And(ctx, ())


def bottom(ctx: Context) -> Or:
    return Or(ctx, ())


def conj(ctx: Context, parts: Sequence[Formula]) -> Formula:
    parts = list(parts)
    return parts[0] if len(parts) == 1 else And(ctx, tuple(parts))


def is_atomic(phi: Formula) -> bool:
    return isinstance(phi, (Eq, Rel))


def is_conjunction_of_atomics(phi: Formula) -> bool:
    if is_atomic(phi):
        return True
    return isinstance(phi, And) and all(is_conjunction_of_atomics(p) for p in phi.parts)


def is_positive_primitive(phi: Formula) -> bool:
    """Built from atoms with conjunction and existentials only (prenex form not required)."""
    if isinstance(phi, Exists):
        return is_positive_primitive(phi.body)
    if isinstance(phi, And):
        return all(is_positive_primitive(p) for p in phi.parts)
    return is_atomic(phi)


def is_positive_existential(phi: Formula) -> bool:
    if isinstance(phi, Unique):
        return False
    if isinstance(phi, (Eq, Rel)):
        return True
    if isinstance(phi, OrSchema):
        return True
    if isinstance(phi, Exists):
        return is_positive_existential(phi.body)
    return all(is_positive_existential(p) for p in phi.parts)


def atoms(phi: Formula) -> list[Formula]:
    """Atomic conjuncts of a conjunction of atomics."""
    if is_atomic(phi):
        return [phi]
    out = []
    for p in phi.parts:
        out.extend(atoms(p))
    return out


def symbols_of(phi) -> set[str]:
    out = set()

    def term(t):
        if isinstance(t, Apply):
            out.add(t.symbol.name)
        elif isinstance(t, Compose):
            term(t.outer)
            term(t.inner)
        elif isinstance(t, Pair):
            for p in t.parts:
                term(p)

    def walk(f):
        if isinstance(f, Eq):
            term(f.lhs)
            term(f.rhs)
        elif isinstance(f, Rel):
            out.add(f.symbol.name)
            term(f.term)
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                walk(p)
        elif isinstance(f, (Exists, Unique)):
            walk(f.body)

    walk(phi)
    return out


# ---------------------------------------------------------------------------
# substitution


def substitute(phi: Formula, v: VMorphism, new_ctx: Context, rename: dict | None = None) -> Formula:
    """``phi[v]`` over ``new_ctx`` for an arity map ``v: ctx.arity -> new_ctx.arity``.

    Its interpretation is the pullback of ``phi_A`` along ``A^v``.  ``rename``
    maps old variable names to the printed names of their images.
    """
    rename = rename or {}
    if v.dom != phi.ctx.arity or v.cod != new_ctx.arity:
        raise ArityError("substitution map does not match the contexts")
    return _subst(phi, v, new_ctx, rename)


def _subst_term(t: Term, v: VMorphism, rename: dict) -> Term:
    if isinstance(t, Reindex):
        return Reindex(vb.compose(v, t.u), rename.get(t.var, t.var), t.point, t.has_point)
    if isinstance(t, Compose):
        return Compose(t.outer, _subst_term(t.inner, v, rename))
    if isinstance(t, Pair):
        return Pair(tuple(_subst_term(p, v, rename) for p in t.parts), t.base)
    if isinstance(t, Apply):
        return Compose(t, Reindex(v))
    raise TypeError(t)


def _subst(phi, v, new_ctx, rename):
    if isinstance(phi, Eq):
        return Eq(new_ctx, _subst_term(phi.lhs, v, rename), _subst_term(phi.rhs, v, rename))
    if isinstance(phi, Rel):
        return Rel(new_ctx, phi.symbol, _subst_term(phi.term, v, rename), phi.power)
    if isinstance(phi, And):
        return And(new_ctx, tuple(_subst(p, v, new_ctx, rename) for p in phi.parts))
    if isinstance(phi, Or):
        return Or(new_ctx, tuple(_subst(p, v, new_ctx, rename) for p in phi.parts))
    if isinstance(phi, (Exists, Unique)):
        fresh = []
        taken = set(new_ctx.names)
        inner_rename = dict(rename)
        for name, Y in phi.binders:
            new_name = name
            k = 1
            while new_name in taken:
                new_name = f"{name}{k}"
                k += 1
            taken.add(new_name)
            inner_rename[name] = new_name
            fresh.append((new_name, Y))
        body_ctx = new_ctx.extend(fresh)
        w = extend_map(v, phi.ctx, new_ctx, phi.binders)
        body = _subst(phi.body, w, body_ctx, inner_rename)
        if isinstance(phi, Exists):
            return Exists(new_ctx, tuple(fresh), body)
        return Unique(new_ctx, tuple(fresh), body, phi.enriched)
    if isinstance(phi, OrSchema):
        return OrSchema(new_ctx, phi.param, phi.start,
                        lambda n, f=phi.instance: _subst(f(n), v, new_ctx, rename),
                        phi.critical, phi.text, ("subst", phi.key, v, new_ctx))
    raise TypeError(phi)


def context_map(src: Context, tgt: Context, legs: Sequence[VMorphism]) -> VMorphism:
    """Map ``src.arity -> tgt.arity`` given one map per variable of ``src``."""
    return _coproduct_diagram(src.arities, src.base).induced(list(legs)) if src.arities else _empty_map(src, tgt)


def _empty_map(src: Context, tgt: Context) -> VMorphism:
    X, T = src.arity, tgt.arity
    if src.base is Base.FINAB:
        zero = tuple(0 for _ in range(T.rank)) if T.rank else T.zero
        return VMorphism(X, T, [zero] * len(X.points))
    return VMorphism(X, T, [])


def rename_map(src: Context, tgt: Context, targets: Sequence[str]) -> VMorphism:
    """Send variable ``src.names[i]`` to variable ``targets[i]`` of ``tgt``."""
    return context_map(src, tgt, [tgt.injection(t) for t in targets])


def extend_map(v: VMorphism, old: Context, new: Context, binders) -> VMorphism:
    """``v + id``: ``old + binders -> new + binders``."""
    src = old.extend(binders)
    tgt = new.extend(binders)
    prefix = tgt.prefix_inclusion(len(new))
    legs = [vb.compose(prefix, vb.compose(v, old.injection(n))) for n in old.names]
    legs += [tgt.injection(tgt.names[len(new) + j]) for j in range(len(binders))]
    return context_map(src, tgt, legs)


def weaken(phi: Formula, new_ctx: Context) -> Formula:
    """``phi`` over a context that extends its own (first-component inclusion)."""
    if new_ctx.names[: len(phi.ctx)] != phi.ctx.names:
        raise ArityError("context does not extend the formula's context")
    return substitute(phi, new_ctx.prefix_inclusion(len(phi.ctx)), new_ctx)


# ---------------------------------------------------------------------------
# sequents and theories


BASIC, LIMIT, BANG = "basic", "limit", "bang"


@dataclass(frozen=True, eq=True)
class Sequent(_Node):
    ctx: Context
    lhs: Formula
    rhs: Formula
    name: str = ""

    __hash__ = _Node.__hash__

    def __post_init__(self):
        if self.lhs.ctx != self.ctx or self.rhs.ctx != self.ctx:
            raise ArityError("sequent sides are not over the quantified context")
        if isinstance(self.rhs, Unique):
            if not is_conjunction_of_atomics(self.lhs) or not is_conjunction_of_atomics(self.rhs.body):
                raise ArityError("unique-existence sequents need conjunctions of atomic formulas")

    @property
    def kind(self) -> str:
        if isinstance(self.rhs, Unique):
            return LIMIT if self.rhs.enriched else BANG
        return BASIC


@dataclass
class Schema:
    """An axiom family indexed by a rational or natural parameter.

    ``instance(value)`` returns the sequent for that value, or None when the
    value makes an object literal invalid.  ``critical(A)`` returns the values
    where the instance can change over structure ``A``.
    """

    name: str
    param: str
    domain: str  # "Q+" or "N"
    start: int
    instance: Callable
    critical: Callable
    text: str = ""


@dataclass
class Theory:
    name: str
    language: Language
    axioms: list = field(default_factory=list)  # Sequent | Schema

    def __post_init__(self):
        known = {s.name for s in self.language.functions} | {s.name for s in self.language.relations}
        for ax in self.axioms:
            if isinstance(ax, Sequent):
                missing = (symbols_of(ax.lhs) | symbols_of(ax.rhs)) - known
                if missing:
                    raise ValueError(f"axiom {ax.name} uses unknown symbols {sorted(missing)}")
