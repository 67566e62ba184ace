"""Interpretation of formulas as M-subobjects, and satisfaction."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .. import subobject as so
from .. import vbase as vb
from ..signature import LStructure
from ..subobject import Subobject
from ..vbase import Base, VMorphism, VObject
from .syntax import (BANG, BASIC, LIMIT, And, Apply, ArityError, Compose, Context, Eq, Exists, Formula,
                     Or, OrSchema, Pair, Reindex, Rel, Sequent, Term, Unique, rename_map, substitute,
                     tuple_term, var, weaken)

DEFAULT_MAX_N = 64
_MEMO_LIMIT = 20000


class SchemaTruncated(RuntimeError):
    """An indexed disjunction did not reach its saturation bound within ``max_n``."""

    def __init__(self, schema: OrSchema, needed: int, max_n: int):
        super().__init__(f"disjunction over {schema.param} needs n up to {needed}, max_n is {max_n}")
        self.needed = needed
        self.max_n = max_n


class Options:
    """Evaluation options shared by one interpretation run."""

    def __init__(self, max_n: int = DEFAULT_MAX_N):
        self.max_n = max_n
        self.schema_log: list = []


def _memo(A: LStructure, key, compute):
    memo = A._memo
    hit = memo.get(key)
    if hit is None:
        if len(memo) > _MEMO_LIMIT:
            memo.clear()
        hit = compute()
        memo[key] = hit
    return hit


# ---------------------------------------------------------------------------
# terms


@lru_cache(maxsize=4096)
def _reindex(A: VObject, u: VMorphism) -> VMorphism:
    return vb.reindex(A, u)


@lru_cache(maxsize=1024)
def _pairing(A: VObject, cods: tuple, base: Base):
    """Inverse of ``A^(Y1+...+Yk) -> A^Y1 x ... x A^Yk`` as a dict on tuples."""
    split = vb.split_power(A, list(cods))
    return {img: p for p, img in zip(split.dom.points, split.images)}


def interpret_term(t: Term, A: LStructure) -> VMorphism:
    """The map ``A^X -> A^Y`` denoted by an ``(X, Y)``-ary term."""
    return _memo(A, ("term", t), lambda: _term(t, A))


def _term(t: Term, A: LStructure) -> VMorphism:
    C = A.carrier
    if isinstance(t, Reindex):
        return _reindex(C, t.u)
    if isinstance(t, Apply):
        return A.functions[t.symbol.name]
    if isinstance(t, Compose):
        return vb.compose(interpret_term(t.outer, A), interpret_term(t.inner, A))
    if isinstance(t, Pair):
        maps = [interpret_term(p, A) for p in t.parts]
        src = maps[0].dom
        tgt = vb.power(C, t.cod)
        if C.base is Base.FINAB:
            back = _pairing(C, tuple(p.cod for p in t.parts), C.base)
            images = [back[tuple(m.images[i] for m in maps)] for i in range(len(src.points))]
        else:
            images = [sum((m.images[i] for m in maps), ()) for i in range(len(src.points))]
        return VMorphism(src, tgt, images)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# formulas


def interpret(phi: Formula, A: LStructure, opts: Options | None = None) -> Subobject:
    """The M-subobject ``phi_A`` of ``A^X``."""
    opts = opts or Options()
    return _memo(A, ("fml", phi, opts.max_n), lambda: _interpret(phi, A, opts))


def _interpret(phi: Formula, A: LStructure, opts: Options) -> Subobject:
    AX = vb.power(A.carrier, phi.ctx.arity)
    if isinstance(phi, Eq):
        s, t = interpret_term(phi.lhs, A), interpret_term(phi.rhs, A)
        eq = vb.equalizer(s, t)
        return Subobject(AX, eq.images)
    if isinstance(phi, Rel):
        r = A.relations[phi.symbol.name]
        if phi.power is not None:
            r = so.power_subobject(r, A.carrier, phi.symbol.arity, phi.power)
        return so.pull_back(r, interpret_term(phi.term, A))
    if isinstance(phi, And):
        if not phi.parts:
            return so.top(AX)
        return so.meet_pointwise([interpret(p, A, opts) for p in phi.parts])
    if isinstance(phi, Or):
        return so.join([interpret(p, A, opts) for p in phi.parts], AX)
    if isinstance(phi, Exists):
        body = interpret(phi.body, A, opts)
        restrict = _reindex(A.carrier, phi.body.ctx.prefix_inclusion(len(phi.ctx)))
        return so.image(vb.compose(restrict, body.m))
    if isinstance(phi, OrSchema):
        result = stabilize_disjunction(A, phi, opts.max_n, opts)
        if not result.exact:
            raise SchemaTruncated(phi, result.bound, opts.max_n)
        return result.subobject
    if isinstance(phi, Unique):
        raise ArityError("unique existence is only meaningful as a sequent conclusion")
    raise TypeError(f"not a formula: {phi!r}")


@dataclass
class Stabilization:
    subobject: Subobject
    n_stab: int
    bound: int
    exact: bool
    evaluated: int


def saturation_bound(schema: OrSchema, A: LStructure) -> int:
    """Index past which every disjunct has the same interpretation in ``A``."""
    crit = [c for c in schema.critical(A) if c != math.inf]
    top = max(crit, default=schema.start)
    return max(schema.start, math.ceil(top) + 1)


def stabilize_disjunction(A: LStructure, schema: OrSchema, max_n: int = DEFAULT_MAX_N,
                          opts: Options | None = None) -> Stabilization:
    """Join of the disjuncts ``n = start, start+1, ...`` evaluated up to saturation.

    Disjuncts only depend on ``n`` through comparisons with the finitely many
    critical values of ``A``, so all disjuncts beyond the saturation bound
    repeat one already seen and the join of the prefix up to the bound is the
    exact value.  ``n_stab`` is the first index at which the prefix join reaches
    that value.  If the bound exceeds ``max_n`` the result is marked inexact.
    """
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    opts = opts or Options(max_n)
    AX = vb.power(A.carrier, schema.ctx.arity)
    bound = saturation_bound(schema, A)
    last = min(bound, max_n)
    prefix = []
    current = so.bottom(AX)
    for n in range(schema.start, last + 1):
        disjunct = schema.instance(n)
        if disjunct is not None:
            current = so.join([current, interpret(disjunct, A, opts)])
        prefix.append(current)
    exact = bound <= max_n
    n_stab = schema.start
    for k, s in enumerate(prefix):
        if s == current:
            n_stab = schema.start + k
            break
    result = Stabilization(current, n_stab, bound, exact, len(prefix))
    opts.schema_log.append((schema.param, schema.text, result))
    return result


# ---------------------------------------------------------------------------
# satisfaction


def satisfies(A: LStructure, phi: Formula, opts: Options | None = None) -> bool:
    return so.is_iso(interpret(phi, A, opts))


def satisfies_at(A: LStructure, phi: Formula, a: VMorphism, opts: Options | None = None) -> bool:
    """Whether the transpose ``I -> A^X`` of ``a: X -> A`` factors through ``phi_A``."""
    if a.dom != phi.ctx.arity or a.cod != A.carrier:
        raise ArityError("generalized element has the wrong arity")
    point = vb.transpose(a).images[0]
    return point in interpret(phi, A, opts).points


def satisfies_sequent(A: LStructure, seq: Sequent, opts: Options | None = None) -> bool:
    if seq.kind == LIMIT:
        return satisfies_limit_sequent(A, seq, opts)
    if seq.kind == BANG:
        return satisfies_bang_sequent(A, seq, opts)
    return so.leq(interpret(seq.lhs, A, opts), interpret(seq.rhs, A, opts))


def satisfies_sequent_pointwise(A: LStructure, seq: Sequent, opts: Options | None = None) -> bool:
    """Every generalized element ``X -> A`` satisfying the lhs satisfies the rhs."""
    if seq.kind != BASIC:
        raise ArityError("pointwise satisfaction is defined for basic sequents")
    for a in vb.morphisms(seq.ctx.arity, A.carrier):
        if satisfies_at(A, seq.lhs, a, opts) and not satisfies_at(A, seq.rhs, a, opts):
            return False
    return True


def limit_parts(seq: Sequent):
    """``(body context, psi ∧ phi, restriction index)`` of a unique-existence sequent."""
    u = seq.rhs
    body_ctx = seq.ctx.extend(u.binders)
    both = And(body_ctx, (u.body, weaken(seq.lhs, body_ctx)))
    return body_ctx, both


def existence_sequent(seq: Sequent) -> Sequent:
    body_ctx, both = limit_parts(seq)
    return Sequent(seq.ctx, seq.lhs, Exists(seq.ctx, seq.rhs.binders, both), seq.name + ":existence")


def uniqueness_sequent(seq: Sequent) -> Sequent:
    """``phi(x) ∧ psi(x,y) ∧ psi(x,y') |- y = y'``."""
    u = seq.rhs
    body_ctx = seq.ctx.extend(u.binders)
    taken = set(body_ctx.names)
    primed = []
    for name, Y in u.binders:
        new = name + "'"
        while new in taken:
            new += "'"
        taken.add(new)
        primed.append((new, Y))
    ctx2 = body_ctx.extend(primed)
    keep = ctx2.prefix_inclusion(len(body_ctx))
    targets = list(seq.ctx.names) + [n for n, _ in primed]
    shift = rename_map(body_ctx, ctx2, targets)
    psi_y = substitute(u.body, keep, ctx2)
    psi_y2 = substitute(u.body, shift, ctx2, {old: new for (old, _), (new, _) in zip(u.binders, primed)})
    phi = weaken(seq.lhs, ctx2)
    ys = tuple_term([var(ctx2, n) for n, _ in u.binders], ctx2.base)
    ys2 = tuple_term([var(ctx2, n) for n, _ in primed], ctx2.base)
    lhs = And(ctx2, (phi, psi_y, psi_y2))
    return Sequent(ctx2, lhs, Eq(ctx2, ys, ys2), seq.name + ":uniqueness")


def _diagonal(seq: Sequent, A: LStructure, opts) -> tuple[Subobject, VMorphism]:
    body_ctx, both = limit_parts(seq)
    s = interpret(both, A, opts)
    restrict = _reindex(A.carrier, body_ctx.prefix_inclusion(len(seq.ctx)))
    return s, vb.compose(restrict, s.m)


def satisfies_limit_by_definition(A: LStructure, seq: Sequent, opts: Options | None = None) -> bool:
    """Existence sequent plus the M-uniqueness of ``(psi ∧ phi)_A -> A^X``."""
    if seq.kind != LIMIT:
        raise ArityError("not a limit sequent")
    if not satisfies_sequent(A, existence_sequent(seq), opts):
        return False
    _, diag = _diagonal(seq, A, opts)
    return vb.in_m(diag)


def satisfies_limit_by_pullback(A: LStructure, seq: Sequent, opts: Options | None = None) -> bool:
    """``phi_A`` with the identity is the pullback of ``phi_A -> A^X <- (psi ∧ phi)_A``."""
    if seq.kind != LIMIT:
        raise ArityError("not a limit sequent")
    phi = interpret(seq.lhs, A, opts)
    _, diag = _diagonal(seq, A, opts)
    P, p1, p2 = vb.pullback(phi.m, diag)
    return vb.is_iso(p1)


def satisfies_limit_sequent(A: LStructure, seq: Sequent, opts: Options | None = None,
                            cross_check: bool = True) -> bool:
    by_def = satisfies_limit_by_definition(A, seq, opts)
    if cross_check:
        by_pb = satisfies_limit_by_pullback(A, seq, opts)
        if by_def != by_pb:
            raise AssertionError(f"limit sequent routes disagree on {seq.name}")
    return by_def


def satisfies_bang_sequent(A: LStructure, seq: Sequent, opts: Options | None = None) -> bool:
    if seq.kind not in (LIMIT, BANG):
        raise ArityError("not a unique-existence sequent")
    return (satisfies_sequent(A, existence_sequent(seq), opts)
            and satisfies_sequent(A, uniqueness_sequent(seq), opts))


def as_bang(seq: Sequent) -> Sequent:
    u = seq.rhs
    return Sequent(seq.ctx, seq.lhs, Unique(seq.ctx, u.binders, u.body, False), seq.name)


def as_limit(seq: Sequent) -> Sequent:
    u = seq.rhs
    return Sequent(seq.ctx, seq.lhs, Unique(seq.ctx, u.binders, u.body, True), seq.name)
