"""M-subobjects of a finite object.

Every M-map in the four bases is, up to isomorphism, the inclusion of its image
with the induced structure, so a subobject is stored as ``(codomain, points)``.
Equality and ordering are then decidable by set comparison; the mutual
factorization test is still available through :func:`leq` with a witness.
"""
from __future__ import annotations

from functools import cached_property, reduce
from typing import Iterable, Sequence

from . import vbase as vb
from .vbase import Base, VMorphism, VObject


class Subobject:
    __slots__ = ("codomain", "points", "__dict__")

    def __init__(self, codomain: VObject, points: Iterable):
        self.codomain = codomain
        pts = frozenset(points)
        if not pts <= set(codomain.index):
            raise ValueError("subobject points outside the codomain")
        if codomain.base is Base.FINAB and pts != vb.subgroup_closure(codomain, pts):
            raise ValueError("FinAb subobjects must be subgroups")
        self.points = pts

    @classmethod
    def closed(cls, codomain: VObject, points: Iterable) -> "Subobject":
        """No subgroup check: for point sets that are subgroups by construction."""
        self = cls.__new__(cls)
        self.codomain = codomain
        self.points = frozenset(points)
        return self

    @classmethod
    def from_mono(cls, m: VMorphism) -> "Subobject":
        if not vb.in_m(m):
            raise ValueError("morphism is not in M")
        return cls(m.cod, m.images)

    @cached_property
    def _sub(self) -> tuple[VObject, VMorphism]:
        return vb.subspace(self.codomain, self.points, checked=True)

    @property
    def domain(self) -> VObject:
        return self._sub[0]

    @property
    def m(self) -> VMorphism:
        return self._sub[1]

    @property
    def fs(self) -> vb.FactorizationSystem:
        return vb.factorization_system(self.codomain.base)

    def sorted_points(self) -> list:
        return [p for p in self.codomain.points if p in self.points]

    def __contains__(self, p) -> bool:
        return p in self.points

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, Subobject):
            return NotImplemented
        return self.points == other.points and self.codomain == other.codomain

    def __hash__(self):
        return hash((self.codomain, self.points))

    def __le__(self, other: "Subobject") -> bool:
        return leq(self, other)

    def __repr__(self):
        return f"Subobject({self.sorted_points()!r} of {len(self.codomain)})"


def top(A: VObject) -> Subobject:
    return Subobject(A, A.points)


def bottom(A: VObject) -> Subobject:
    """Image of the initial map; ``{0}`` for groups, empty otherwise."""
    if A.base is Base.FINAB:
        return Subobject(A, [A.zero])
    return Subobject(A, ())


def _same_codomain(subs: Sequence[Subobject]) -> VObject:
    A = subs[0].codomain
    for s in subs[1:]:
        if s.codomain != A:
            raise ValueError("subobjects live over different codomains")
    return A


def leq(s: Subobject, t: Subobject, witness: bool = False):
    """``s <= t``; with ``witness=True`` returns the factorization ``k`` (or None)."""
    _same_codomain([s, t])
    ok = s.points <= t.points
    if not witness:
        return ok
    if not ok:
        return None
    back = dict(zip(t.m.images, t.m.dom.points))
    k = VMorphism(s.domain, t.domain, [back[p] for p in s.m.images])
    assert vb.compose(t.m, k) == s.m
    return k


def intersect(subs: Sequence[Subobject]) -> Subobject:
    """Meet, computed as the wide pullback of the monos."""
    subs = list(subs)
    if not subs:
        raise ValueError("empty intersection; use top() of the ambient object")
    A = _same_codomain(subs)
    if len(subs) == 1:
        return subs[0]
    P, legs = vb.wide_pullback([s.m for s in subs])
    diag = vb.compose(subs[0].m, legs[0])
    return Subobject(A, diag.images)


def meet_pointwise(subs: Sequence[Subobject]) -> Subobject:
    A = _same_codomain(subs)
    return Subobject.closed(A, reduce(frozenset.intersection, (s.points for s in subs)))


def image(f: VMorphism) -> Subobject:
    return Subobject.closed(f.cod, f.images)


def join(subs: Sequence[Subobject], ambient: VObject | None = None) -> Subobject:
    """Least upper bound: union of points, or the subgroup sum for groups."""
    subs = list(subs)
    if not subs:
        if ambient is None:
            raise ValueError("empty join needs the ambient object")
        return bottom(ambient)
    A = _same_codomain(subs)
    pts = frozenset().union(*(s.points for s in subs))
    if A.base is Base.FINAB:
        pts = vb.subgroup_closure(A, pts)
    return Subobject.closed(A, pts)


def join_via_coproduct(subs: Sequence[Subobject], ambient: VObject | None = None) -> Subobject:
    """Join as the image of the induced map out of the coproduct of the domains."""
    subs = list(subs)
    A = ambient if ambient is not None else subs[0].codomain
    if not subs:
        return image(vb.initial_map(A))
    co = vb.coproduct([s.domain for s in subs], A.base)
    return image(co.induced([s.m for s in subs]))


def pull_back(s: Subobject, f: VMorphism) -> Subobject:
    """Preimage of ``s`` along ``f``."""
    if f.cod != s.codomain:
        raise ValueError("pullback along a map with the wrong codomain")
    return Subobject.closed(f.dom, [x for x, y in zip(f.dom.points, f.images) if y in s.points])


def pull_back_via_square(s: Subobject, f: VMorphism) -> Subobject:
    """Same as :func:`pull_back`, through the base pullback construction."""
    P, p1, p2 = vb.pullback(f, s.m)
    return Subobject(f.dom, p1.images)


def power_subobject(s: Subobject, A: VObject, X: VObject, Y: VObject) -> Subobject:
    """``(s.m)^Y`` followed by the currying isomorphism into ``A^(X⊗Y)``."""
    AX = vb.power(A, X)
    if s.codomain != AX:
        raise ValueError("subobject does not live over A^X")
    cur = vb.curry(A, X, Y)
    lifted = vb.power_map(s.m, Y)
    return image(vb.compose(cur, lifted))


def is_iso(s: Subobject) -> bool:
    return len(s.points) == len(s.codomain.points)


def is_iso_morphism(s: Subobject) -> bool:
    """Isomorphism test on the mono itself rather than on the point count."""
    return vb.is_iso(s.m)


def all_subobjects(A: VObject) -> list[Subobject]:
    """Every subobject of a small object (subgroups for FinAb)."""
    import itertools

    out = []
    pts = A.points
    for r in range(len(pts) + 1):
        for combo in itertools.combinations(pts, r):
            if A.base is Base.FINAB:
                if A.zero not in combo or frozenset(combo) != vb.subgroup_closure(A, combo):
                    continue
            out.append(Subobject(A, combo))
    return out
