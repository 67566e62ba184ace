"""Disjunctions as positive-primitive formulas over abelian groups.

With a sum symbol ``+ : (X ⊕ X, X)`` available, ``phi ∨ psi`` has the same
interpretation as ``exists y:X, z:X . phi(y) ∧ psi(z) ∧ y + z = x``.
"""
from __future__ import annotations

from .. import vbase as vb
from ..signature import FunctionSymbol, Language, LStructure
from ..vbase import Base, VMorphism, VObject
from .syntax import (And, Apply, Compose, Context, Eq, Exists, Formula, Or, Pair, Reindex, substitute,
                     var)

SUM = "plus"


def sum_symbol(X: VObject) -> FunctionSymbol:
    return FunctionSymbol(SUM, vb.coproduct([X, X], Base.FINAB).obj, X)


def with_sum(L: Language, X: VObject) -> Language:
    if L.base is not Base.FINAB:
        raise vb.BaseError("the additive rewrite needs the abelian group base")
    if L.has_symbol(SUM):
        return L
    return Language(L.base, L.functions + (sum_symbol(X),), L.relations)


def with_sum_interpretation(A: LStructure, L: Language) -> LStructure:
    """``A`` over the enlarged language, with ``plus`` the addition of ``A^X``."""
    sym = L.function(SUM)
    X = sym.cod
    AX = vb.power(A.carrier, X)
    split = vb.split_power(A.carrier, [X, X])
    images = [AX.plus(pair[0], pair[1]) for pair in split.images]
    funcs = dict(A.functions)
    funcs[SUM] = VMorphism(split.dom, AX, images)
    return LStructure(L, A.carrier, funcs, A.relations, name=A.name)


def rewrite_disjunction_additive(phi: Or, L: Language) -> Formula:
    """The positive-primitive form of a binary (or folded n-ary) disjunction."""
    ctx = phi.ctx
    if ctx.base is not Base.FINAB:
        raise vb.BaseError("the additive rewrite needs the abelian group base")
    parts = list(phi.parts)
    if not parts:
        return phi
    if len(parts) == 1:
        return parts[0]
    if len(parts) > 2:
        head = rewrite_disjunction_additive(Or(ctx, tuple(parts[:-1])), L)
        return rewrite_disjunction_additive(Or(ctx, (head, parts[-1])), L)
    left, right = parts
    X = ctx.arity
    plus = L.function(SUM)
    if plus.cod != X:
        raise ValueError("sum symbol arity differs from the formula arity")
    taken = set(ctx.names)
    y, z = _fresh("y", taken), _fresh("z", taken | {_fresh("y", taken)})
    body_ctx = ctx.extend([(y, X), (z, X)])
    x_term = Reindex(body_ctx.prefix_inclusion(len(ctx)), ",".join(ctx.names) or None)
    left_y = substitute(left, body_ctx.injection(y), body_ctx, {n: y for n in ctx.names})
    right_z = substitute(right, body_ctx.injection(z), body_ctx, {n: z for n in ctx.names})
    total = Compose(Apply(plus), Pair((var(body_ctx, y), var(body_ctx, z)), Base.FINAB))
    body = And(body_ctx, (left_y, right_z, Eq(body_ctx, total, x_term)))
    return Exists(ctx, ((y, X), (z, X)), body)


def _fresh(name: str, taken: set) -> str:
    k = 0
    out = name
    while out in taken:
        k += 1
        out = f"{name}{k}"
    return out
