"""Finite bases of enrichment.

Four exact categories are provided: finite sets, finite posets, finite metric
spaces (rational distances plus infinity, nonexpanding maps) and finite abelian
groups.  Each one carries a single factorization system ``(E, M)``:

* FinSet: surjections / injections
* FinPos: surjective monotone maps / order embeddings
* FinMet: surjections / isometries (dense maps and closed isometries coincide
  with these on finite spaces)
* FinAb: surjective homomorphisms / injective homomorphisms

Objects are immutable.  Points are arbitrary hashable values; a morphism stores
the image of every domain point in domain order.  Points of a power ``A^X`` are
tuples of points of ``A`` aligned with ``X.points``.

The unit of FinAb is the (infinite) group of integers.  It is represented
formally: a *free* abelian object ``Z^r`` has ``rank == r`` and its ``points``
are generator labels.  Maps out of a free object are determined by the images of
the generators, so ``A^(Z^r)`` is ``A^r``.  Free objects may be used as arities
(powers, tensors, coproducts, reindexing) but not as carriers.
"""
from __future__ import annotations

import itertools
import math
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from typing import Callable, Iterable, Sequence

INF = math.inf


class BaseError(ValueError):
    """Base mismatch or an operation the given base does not support."""


class Base(Enum):
    FINSET = "finset"
    FINPOS = "poset"
    FINMET = "metric"
    FINAB = "abgroup"


def as_distance(value) -> Fraction | float:
    if value == INF or value == "inf":
        return INF
    d = Fraction(value)
    if d < 0:
        raise ValueError(f"negative distance {value}")
    return d


class VObject:
    """A finite object of one of the bases.

    ``leq``/``dist``/``add`` are callables on points supplying the poset order,
    the metric and the group law respectively; they are only consulted for the
    matching base.
    """

    def __init__(self, base: Base, points: Iterable, *, leq=None, dist=None, add=None,
                 zero=None, rank: int = 0, check: bool = False):
        self.base = base
        self.points = tuple(points)
        self._leq = leq
        self._dist = dist
        self._add = add
        self._zero = zero
        self.rank = rank
        if len(set(self.points)) != len(self.points):
            raise ValueError("duplicate points")
        if check:
            problems = self.violations()
            if problems:
                raise ValueError("; ".join(problems))

    # -- basic access -----------------------------------------------------
    @cached_property
    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return p in self.index

    @property
    def is_free(self) -> bool:
        return self.rank > 0

    def le(self, x, y) -> bool:
        if self.base is Base.FINPOS:
            return self._leq(x, y)
        return x == y

    def d(self, x, y):
        if self.base is not Base.FINMET:
            raise BaseError("distance only defined on metric objects")
        return self._dist(x, y)

    def plus(self, x, y):
        if self._add is None:
            self._require_group()
        return self._add(x, y)

    @property
    def zero(self):
        self._require_group()
        return self._zero

    def neg(self, x):
        for y in self.points:
            if self._add(x, y) == self._zero:
                return y
        raise ValueError("element without inverse")

    def multiple(self, k: int, x):
        """``k * x`` for an integer ``k`` (negative allowed)."""
        self._require_group()
        if k < 0:
            return self.multiple(-k, self.neg(x))
        acc = self._zero
        for _ in range(k):
            acc = self._add(acc, x)
        return acc

    def _require_group(self):
        # only finite groups carry an addition; free objects and other bases do not
        if self._add is None or self.base is not Base.FINAB or self.rank:
            raise BaseError("group operations need a finite abelian group")

    # -- equality ---------------------------------------------------------
    @cached_property
    def structure_key(self):
        pts = self.points
        if self.base is Base.FINPOS:
            return frozenset((x, y) for x in pts for y in pts if x != y and self._leq(x, y))
        if self.base is Base.FINMET:
            return tuple(self._dist(pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts)))
        if self.base is Base.FINAB and not self.rank:
            return (self._zero, tuple(self._add(x, y) for x in pts for y in pts))
        return ()

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, VObject):
            return NotImplemented
        return (self.base is other.base and self.rank == other.rank and self.points == other.points
                and self.structure_key == other.structure_key)

    @cached_property
    def _hash(self):
        return hash((self.base, self.rank, self.points))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.rank:
            return f"VObject(abgroup, Z^{self.rank})"
        return f"VObject({self.base.value}, {list(self.points)!r})"

    # -- validation -------------------------------------------------------
    def violations(self) -> list[str]:
        pts = self.points
        out = []
        if self.base is Base.FINPOS:
            for x in pts:
                if not self._leq(x, x):
                    out.append(f"order not reflexive at {x!r}")
            for x, y in itertools.product(pts, repeat=2):
                if x != y and self._leq(x, y) and self._leq(y, x):
                    out.append(f"order not antisymmetric at {x!r},{y!r}")
            for x, y, z in itertools.product(pts, repeat=3):
                if self._leq(x, y) and self._leq(y, z) and not self._leq(x, z):
                    out.append(f"order not transitive at {x!r},{y!r},{z!r}")
        elif self.base is Base.FINMET:
            for x in pts:
                if self._dist(x, x) != 0:
                    out.append(f"d({x!r},{x!r}) != 0")
            for x, y in itertools.combinations(pts, 2):
                dxy = self._dist(x, y)
                if dxy != self._dist(y, x):
                    out.append(f"distance not symmetric at {x!r},{y!r}")
                if dxy == 0:
                    out.append(f"distinct points {x!r},{y!r} at distance 0")
            for x, y, z in itertools.product(pts, repeat=3):
                if self._dist(x, z) > self._dist(x, y) + self._dist(y, z):
                    out.append(f"triangle inequality fails at {x!r},{y!r},{z!r}")
        elif self.base is Base.FINAB and not self.rank:
            zero = self._zero
            if zero not in self.index:
                out.append("zero is not a point")
                return out
            for x in pts:
                if self._add(x, zero) != x:
                    out.append(f"{x!r} + 0 != {x!r}")
                if not any(self._add(x, y) == zero for y in pts):
                    out.append(f"{x!r} has no inverse")
            for x, y in itertools.product(pts, repeat=2):
                s = self._add(x, y)
                if s not in self.index:
                    out.append(f"{x!r} + {y!r} not a point")
                elif s != self._add(y, x):
                    out.append(f"addition not commutative at {x!r},{y!r}")
            if not out:
                for x, y, z in itertools.product(pts, repeat=3):
                    if self._add(self._add(x, y), z) != self._add(x, self._add(y, z)):
                        out.append(f"addition not associative at {x!r},{y!r},{z!r}")
                        break
        return out


class VMorphism:
    """A base morphism, stored as the tuple of images of ``dom.points``."""

    def __init__(self, dom: VObject, cod: VObject, images: Sequence, check: bool = False):
        if dom.base is not cod.base:
            raise BaseError(f"morphism between {dom.base.value} and {cod.base.value}")
        self.dom = dom
        self.cod = cod
        self.images = tuple(images)
        if len(self.images) != len(dom.points):
            raise ValueError("image list does not match domain")
        if check and not is_morphism(dom, cod, self.images):
            raise ValueError(f"not a {dom.base.value} morphism")

    @property
    def base(self) -> Base:
        return self.dom.base

    def __call__(self, x):
        return self.images[self.dom.index[x]]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, VMorphism):
            return NotImplemented
        return self.images == other.images and self.dom == other.dom and self.cod == other.cod

    @cached_property
    def _hash(self):
        return hash((self.dom, self.cod, self.images))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"VMorphism({dict(zip(self.dom.points, self.images))!r})"

    def after(self, other: "VMorphism") -> "VMorphism":
        """``self ∘ other``."""
        return compose(self, other)


# ---------------------------------------------------------------------------
# constructors


def finset(spec) -> VObject:
    """``finset(3)`` has points ``0, 1, 2``; ``finset(['a', 'b'])`` uses the names."""
    points = range(spec) if isinstance(spec, int) else spec
    return VObject(Base.FINSET, points)


def poset(points, relations=()) -> VObject:
    """Poset generated by ``relations`` (pairs ``(x, y)`` meaning ``x <= y``)."""
    points = tuple(points)
    le = {(x, x) for x in points}
    le.update((x, y) for x, y in relations)
    for x, y in le:
        if x not in points or y not in points:
            raise ValueError(f"unknown point in relation {x!r} <= {y!r}")
    changed = True
    while changed:
        changed = False
        for (x, y), (y2, z) in itertools.product(list(le), repeat=2):
            if y == y2 and (x, z) not in le:
                le.add((x, z))
                changed = True
    frozen = frozenset(le)
    return VObject(Base.FINPOS, points, leq=lambda x, y: (x, y) in frozen, check=True)


def metric(points, distances=None, default=INF) -> VObject:
    """Finite metric space; unspecified distances between distinct points default to ``inf``."""
    points = tuple(points)
    table = {}
    for (x, y), d in (distances or {}).items():
        if x not in points or y not in points:
            raise ValueError(f"unknown point in distance d({x!r},{y!r})")
        d = as_distance(d)
        for key in ((x, y), (y, x)):
            if key in table and table[key] != d:
                raise ValueError(f"conflicting distances for {x!r},{y!r}")
            table[key] = d
    default = as_distance(default)

    def dist(x, y):
        if x == y:
            return Fraction(0)
        return table.get((x, y), default)

    return VObject(Base.FINMET, points, dist=dist, check=True)


def _table_metric(points, dist_of_indices) -> VObject:
    pts = tuple(points)
    idx = {p: i for i, p in enumerate(pts)}
    return VObject(Base.FINMET, pts, dist=lambda x, y: dist_of_indices(idx[x], idx[y]))


def abgroup(*moduli: int) -> VObject:
    """``abgroup(2, 4)`` is Z/2 x Z/4; a single factor uses integer points."""
    moduli = tuple(m for m in moduli)
    if any(m < 1 for m in moduli):
        raise ValueError("moduli must be positive")
    if len(moduli) == 1:
        n = moduli[0]
        return VObject(Base.FINAB, range(n), add=lambda x, y: (x + y) % n, zero=0)
    points = list(itertools.product(*(range(m) for m in moduli)))
    return VObject(Base.FINAB, points,
                   add=lambda x, y: tuple((a + b) % m for a, b, m in zip(x, y, moduli)),
                   zero=tuple(0 for _ in moduli))


def free_abelian(rank: int, labels: Sequence | None = None) -> VObject:
    """The formal free abelian group ``Z^rank`` (generators are the points)."""
    labels = tuple(range(rank)) if labels is None else tuple(labels)
    if len(labels) != rank:
        raise ValueError("label count must equal rank")
    if rank == 0:
        return zero_group()
    return VObject(Base.FINAB, labels, rank=rank)


def zero_group() -> VObject:
    return VObject(Base.FINAB, [()], add=lambda x, y: (), zero=())


UNIT_POINT = "*"


@lru_cache(maxsize=None)
def unit(base: Base) -> VObject:
    if base is Base.FINAB:
        return free_abelian(1, [UNIT_POINT])
    if base is Base.FINMET:
        return metric([UNIT_POINT])
    if base is Base.FINPOS:
        return poset([UNIT_POINT])
    return finset([UNIT_POINT])


@lru_cache(maxsize=None)
def initial(base: Base) -> VObject:
    return coproduct([], base).obj


@lru_cache(maxsize=None)
def terminal(base: Base) -> VObject:
    return product([], base).obj


def identity(X: VObject) -> VMorphism:
    return VMorphism(X, X, X.points)


def compose(g: VMorphism, f: VMorphism) -> VMorphism:
    """``g ∘ f``."""
    if f.cod != g.dom:
        raise BaseError("composition of non-composable morphisms")
    if g.dom.rank:
        return VMorphism(f.dom, g.cod, [evaluate_free(g, v) for v in f.images])
    return VMorphism(f.dom, g.cod, [g(v) for v in f.images])


def constant(X: VObject, A: VObject, a) -> VMorphism:
    return VMorphism(X, A, [a] * len(X.points))


def check_same_base(*objs: VObject) -> Base:
    bases = {o.base for o in objs}
    if len(bases) > 1:
        raise BaseError("base mismatch: " + ", ".join(sorted(b.value for b in bases)))
    return next(iter(bases))


def _require_finite(*objs: VObject):
    for o in objs:
        if o.rank:
            raise BaseError("operation needs a finite object, got a free abelian arity")


# ---------------------------------------------------------------------------
# morphism predicates


def is_morphism(dom: VObject, cod: VObject, images: Sequence) -> bool:
    if len(images) != len(dom.points):
        return False
    base = check_same_base(dom, cod)
    if dom.rank:
        if cod.rank:
            return all(isinstance(v, tuple) and len(v) == cod.rank and all(isinstance(c, int) for c in v)
                       for v in images)
        return all(v in cod.index for v in images)
    if cod.rank:
        # the only homomorphism from a finite group into a free one is zero
        return all(v == tuple(0 for _ in range(cod.rank)) for v in images)
    if any(v not in cod.index for v in images):
        return False
    pts = dom.points
    if base is Base.FINPOS:
        return all(cod.le(images[i], images[j])
                   for i, j in itertools.product(range(len(pts)), repeat=2)
                   if dom.le(pts[i], pts[j]))
    if base is Base.FINMET:
        return all(cod.d(images[i], images[j]) <= dom.d(pts[i], pts[j])
                   for i, j in itertools.combinations(range(len(pts)), 2))
    if base is Base.FINAB:
        img = dict(zip(pts, images))
        return all(img[dom.plus(x, y)] == cod.plus(img[x], img[y])
                   for x, y in itertools.product(pts, repeat=2))
    return True


def in_e(f: VMorphism) -> bool:
    """Membership in the left class E (surjective point map in every base)."""
    _require_finite(f.dom, f.cod)
    return set(f.images) == set(f.cod.points)


def in_m(f: VMorphism) -> bool:
    """Membership in the right class M (injective and structure-reflecting)."""
    _require_finite(f.dom, f.cod)
    if len(set(f.images)) != len(f.images):
        return False
    pts, img = f.dom.points, f.images
    n = len(pts)
    if f.base is Base.FINPOS:
        return all(f.dom.le(pts[i], pts[j]) == f.cod.le(img[i], img[j])
                   for i, j in itertools.product(range(n), repeat=2))
    if f.base is Base.FINMET:
        return all(f.dom.d(pts[i], pts[j]) == f.cod.d(img[i], img[j])
                   for i, j in itertools.combinations(range(n), 2))
    return True


def is_iso(f: VMorphism) -> bool:
    return in_e(f) and in_m(f)


def inverse(f: VMorphism) -> VMorphism:
    if not is_iso(f):
        raise ValueError("not an isomorphism")
    back = dict(zip(f.images, f.dom.points))
    return VMorphism(f.cod, f.dom, [back[y] for y in f.cod.points])


# ---------------------------------------------------------------------------
# subobjects with induced structure


def subspace(A: VObject, keep: Iterable, checked: bool = False) -> tuple[VObject, VMorphism]:
    """The sub-object on ``keep`` with the induced structure, and its inclusion.

    ``checked=True`` skips the subgroup test when the caller already knows it.
    """
    _require_finite(A)
    keep = set(keep)
    pts = [p for p in A.points if p in keep]
    if len(pts) != len(keep):
        raise ValueError("subspace points must belong to the object")
    if A.base is Base.FINPOS:
        S = VObject(Base.FINPOS, pts, leq=A._leq)
    elif A.base is Base.FINMET:
        S = VObject(Base.FINMET, pts, dist=A._dist)
    elif A.base is Base.FINAB:
        if not checked and (A.zero not in keep or subgroup_closure(A, pts) != keep):
            raise ValueError("subset is not a subgroup")
        S = VObject(Base.FINAB, pts, add=A._add, zero=A.zero)
    else:
        S = VObject(Base.FINSET, pts)
    return S, VMorphism(S, A, pts)


def subgroup_closure(A: VObject, gens: Iterable) -> frozenset:
    """Subgroup of a finite abelian group generated by ``gens``."""
    span = {A.zero}
    for g in gens:
        if g in span:
            continue
        # add the cyclic group of g coset by coset; the span at least doubles
        multiples = [A.zero]
        x = g
        while x not in span:
            multiples.append(x)
            x = A.plus(x, g)
        span = {A.plus(s, m) for s in span for m in multiples}
    return frozenset(span)


# ---------------------------------------------------------------------------
# products and coproducts


class LimitDiagram:
    """An object with its legs (projections of a product, injections of a coproduct)."""

    def __init__(self, obj: VObject, legs: list[VMorphism], induced: Callable):
        self.obj = obj
        self.legs = legs
        self._induced = induced

    def induced(self, maps: Sequence[VMorphism]) -> VMorphism:
        """The map induced by the universal property."""
        if len(maps) != len(self.legs):
            raise ValueError("need one map per leg")
        return self._induced(list(maps))

    def __iter__(self):
        return iter((self.obj, self.legs))


def product(parts: Sequence[VObject], base: Base | None = None) -> LimitDiagram:
    parts = list(parts)
    if not parts and base is None:
        raise BaseError("empty product needs an explicit base")
    base = check_same_base(*parts) if parts else base
    _require_finite(*parts)
    points = list(itertools.product(*(p.points for p in parts)))
    if base is Base.FINPOS:
        obj = VObject(base, points, leq=lambda x, y: all(P.le(a, b) for P, a, b in zip(parts, x, y)))
    elif base is Base.FINMET:
        obj = VObject(base, points, dist=lambda x, y: max(
            (P.d(a, b) for P, a, b in zip(parts, x, y)), default=Fraction(0)))
    elif base is Base.FINAB:
        obj = VObject(base, points, add=lambda x, y: tuple(P.plus(a, b) for P, a, b in zip(parts, x, y)),
                      zero=tuple(P.zero for P in parts))
    else:
        obj = VObject(base, points)
    legs = [VMorphism(obj, P, [x[i] for x in points]) for i, P in enumerate(parts)]

    def induced(maps):
        dom = maps[0].dom if maps else None
        if dom is None:
            raise ValueError("induced map into an empty product needs a domain; use terminal_map")
        return VMorphism(dom, obj, [tuple(m(x) for m in maps) for x in dom.points])

    return LimitDiagram(obj, legs, induced)


def terminal_map(X: VObject) -> VMorphism:
    T = terminal(X.base)
    return VMorphism(X, T, [T.points[0]] * len(X.points))


def coproduct(parts: Sequence[VObject], base: Base | None = None) -> LimitDiagram:
    """Disjoint union; FinAb uses the direct sum (free parts add their ranks)."""
    parts = list(parts)
    if not parts and base is None:
        raise BaseError("empty coproduct needs an explicit base")
    base = check_same_base(*parts) if parts else base
    if base is Base.FINAB:
        return _ab_coproduct(parts)
    points = [(i, x) for i, P in enumerate(parts) for x in P.points]
    if base is Base.FINPOS:
        obj = VObject(base, points, leq=lambda x, y: x[0] == y[0] and parts[x[0]].le(x[1], y[1]))
    elif base is Base.FINMET:
        obj = VObject(base, points, dist=lambda x, y: parts[x[0]].d(x[1], y[1]) if x[0] == y[0] else INF)
    else:
        obj = VObject(base, points)
    legs = [VMorphism(P, obj, [(i, x) for x in P.points]) for i, P in enumerate(parts)]

    def induced(maps):
        cod = maps[0].cod if maps else None
        if cod is None:
            raise ValueError("induced map out of an empty coproduct needs a codomain; use initial_map")
        return VMorphism(obj, cod, [maps[i](x) for i, x in points])

    return LimitDiagram(obj, legs, induced)


def _ab_coproduct(parts):
    if parts and all(P.rank for P in parts):
        labels = [(i, g) for i, P in enumerate(parts) for g in P.points]
        obj = free_abelian(len(labels), labels)
        legs = []
        offset = 0
        for P in parts:
            imgs = []
            for k in range(P.rank):
                v = [0] * obj.rank
                v[offset + k] = 1
                imgs.append(tuple(v))
            legs.append(VMorphism(P, obj, imgs))
            offset += P.rank

        def induced_free(maps):
            cod = maps[0].cod
            return VMorphism(obj, cod, [img for m in maps for img in m.images])

        return LimitDiagram(obj, legs, induced_free)
    if any(P.rank for P in parts):
        raise BaseError("direct sums mixing free and finite abelian objects are not supported")
    diag = product(parts, Base.FINAB)
    obj = diag.obj
    legs = []
    for i, P in enumerate(parts):
        imgs = [tuple(x if j == i else Q.zero for j, Q in enumerate(parts)) for x in P.points]
        legs.append(VMorphism(P, obj, imgs))

    def induced(maps):
        cod = maps[0].cod if maps else None
        if cod is None:
            raise ValueError("induced map out of an empty coproduct needs a codomain; use initial_map")
        return VMorphism(obj, cod, [reduce(cod.plus, (m(c) for m, c in zip(maps, x)), cod.zero)
                                    for x in obj.points])

    return LimitDiagram(obj, legs, induced)


def initial_map(A: VObject) -> VMorphism:
    O = initial(A.base)
    if A.base is Base.FINAB:
        return VMorphism(O, A, [A.zero] * len(O.points))
    return VMorphism(O, A, [])


# ---------------------------------------------------------------------------
# limits and colimits


def equalizer(f: VMorphism, g: VMorphism) -> VMorphism:
    """Inclusion of ``{x | f x = g x}`` with the induced structure."""
    if f.dom != g.dom or f.cod != g.cod:
        raise BaseError("equalizer needs a parallel pair")
    keep = [x for x, a, b in zip(f.dom.points, f.images, g.images) if a == b]
    return subspace(f.dom, keep)[1]


def wide_pullback(maps: Sequence[VMorphism]) -> tuple[VObject, list[VMorphism]]:
    """Apex and legs of the wide pullback of a nonempty cospan family."""
    maps = list(maps)
    if not maps:
        raise ValueError("wide pullback of an empty family")
    cod = maps[0].cod
    if any(m.cod != cod for m in maps):
        raise BaseError("cospan legs must share a codomain")
    prod = product([m.dom for m in maps])
    keep = [x for x in prod.obj.points if len({m(c) for m, c in zip(maps, x)}) == 1]
    P, incl = subspace(prod.obj, keep)
    legs = [compose(leg, incl) for leg in prod.legs]
    return P, legs


def pullback(f: VMorphism, g: VMorphism) -> tuple[VObject, VMorphism, VMorphism]:
    P, (p1, p2) = wide_pullback([f, g])
    return P, p1, p2


def pullback_induced(P: VObject, legs: Sequence[VMorphism], maps: Sequence[VMorphism]) -> VMorphism:
    """Map into a (wide) pullback apex from a compatible cone ``maps``."""
    dom = maps[0].dom
    imgs = []
    for x in dom.points:
        key = tuple(m(x) for m in maps)
        hits = [p for p in P.points if tuple(leg(p) for leg in legs) == key]
        if len(hits) != 1:
            raise ValueError("cone does not factor through the pullback")
        imgs.append(hits[0])
    return VMorphism(dom, P, imgs, check=True)


def quotient(A: VObject, pairs: Iterable[tuple]) -> tuple[VObject, VMorphism]:
    """Universal quotient of ``A`` identifying each pair (coequalizer-style).

    FinSet: generated equivalence; FinPos: generated preorder collapsed to a
    poset; FinMet: shortest zig-zag pseudometric with the pairs at distance 0;
    FinAb: quotient by the subgroup generated by the differences.  Quotient
    points are labelled by the first member of their class in ``A`` order.
    """
    _require_finite(A)
    pairs = list(pairs)
    pts = A.points
    n = len(pts)
    idx = A.index
    if A.base is Base.FINAB:
        H = subgroup_closure(A, [A.plus(x, A.neg(y)) for x, y in pairs])
        classes = {}
        for p in pts:
            rep = min((A.plus(p, h) for h in H), key=idx.__getitem__)
            classes[p] = rep
        reps = [p for p in pts if classes[p] == p]
        Q = VObject(Base.FINAB, reps, add=lambda x, y: classes[A.plus(x, y)], zero=classes[A.zero])
        return Q, VMorphism(A, Q, [classes[p] for p in pts])

    if A.base is Base.FINMET:
        dist = [[A.d(pts[i], pts[j]) for j in range(n)] for i in range(n)]
        for x, y in pairs:
            i, j = idx[x], idx[y]
            dist[i][j] = dist[j][i] = Fraction(0)
        for k in range(n):
            for i in range(n):
                dik = dist[i][k]
                if dik == INF:
                    continue
                for j in range(n):
                    via = dik + dist[k][j]
                    if via < dist[i][j]:
                        dist[i][j] = via
        rep_of = {}
        for i in range(n):
            rep_of[i] = next(j for j in range(n) if dist[i][j] == 0)
        reps = sorted(set(rep_of.values()))
        labels = [pts[r] for r in reps]
        Q = _table_metric(labels, lambda a, b: dist[reps[a]][reps[b]])
        return Q, VMorphism(A, Q, [pts[rep_of[i]] for i in range(n)])

    # FinSet / FinPos: reachability closure
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        reach[i][i] = True
        if A.base is Base.FINPOS:
            for j in range(n):
                if A.le(pts[i], pts[j]):
                    reach[i][j] = True
    for x, y in pairs:
        i, j = idx[x], idx[y]
        reach[i][j] = reach[j][i] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    rep_of = {i: next(j for j in range(n) if reach[i][j] and reach[j][i]) for i in range(n)}
    reps = sorted(set(rep_of.values()))
    labels = [pts[r] for r in reps]
    if A.base is Base.FINPOS:
        label_idx = {pts[r]: r for r in reps}
        Q = VObject(Base.FINPOS, labels, leq=lambda x, y: reach[label_idx[x]][label_idx[y]])
    else:
        Q = VObject(Base.FINSET, labels)
    return Q, VMorphism(A, Q, [pts[rep_of[i]] for i in range(n)])


def coequalizer(u: VMorphism, v: VMorphism) -> tuple[VObject, VMorphism]:
    if u.dom != v.dom or u.cod != v.cod:
        raise BaseError("coequalizer needs a parallel pair")
    return quotient(u.cod, zip(u.images, v.images))


def pushout(f: VMorphism, g: VMorphism) -> tuple[VObject, VMorphism, VMorphism]:
    """Pushout of the span ``cod f <- dom f = dom g -> cod g``."""
    if f.dom != g.dom:
        raise BaseError("pushout needs a common domain")
    co = coproduct([f.cod, g.cod])
    i1, i2 = co.legs
    Q, q = quotient(co.obj, [(i1(f(c)), i2(g(c))) for c in f.dom.points])
    return Q, compose(q, i1), compose(q, i2)


def pushout_induced(Q: VObject, q1: VMorphism, q2: VMorphism, a: VMorphism, b: VMorphism) -> VMorphism:
    """Map out of a pushout induced by ``a: cod q1-side -> T`` and ``b``."""
    imgs = {}
    for x, y in zip(q1.images, a.images):
        if imgs.setdefault(x, y) != y:
            raise ValueError("cocone does not factor through the pushout")
    for x, y in zip(q2.images, b.images):
        if imgs.setdefault(x, y) != y:
            raise ValueError("cocone does not factor through the pushout")
    return VMorphism(Q, a.cod, [imgs[p] for p in Q.points], check=True)


# ---------------------------------------------------------------------------
# factorization


class FactorizationSystem:
    """The (E, M) system attached to a base; a thin named handle."""

    NAMES = {
        Base.FINSET: ("surjective", "injective"),
        Base.FINPOS: ("surjective", "order-embedding"),
        Base.FINMET: ("surjective", "isometry"),
        Base.FINAB: ("surjective", "injective"),
    }

    def __init__(self, base: Base):
        self.base = base
        self.e_name, self.m_name = self.NAMES[base]

    def __eq__(self, other):
        return isinstance(other, FactorizationSystem) and other.base is self.base

    def __hash__(self):
        return hash(self.base)

    def __repr__(self):
        return f"FactorizationSystem({self.base.value}: {self.e_name}/{self.m_name})"

    def factorize(self, f: VMorphism):
        return factorize(f, self)

    def in_e(self, f):
        return in_e(f)

    def in_m(self, f):
        return in_m(f)


def factorization_system(base: Base) -> FactorizationSystem:
    return FactorizationSystem(base)


def factorize(f: VMorphism, fs: FactorizationSystem | None = None) -> tuple[VMorphism, VMorphism]:
    """``f = m ∘ e`` with ``e`` in E and ``m`` in M; the middle object is the image."""
    if fs is not None and fs.base is not f.base:
        raise BaseError("factorization system from another base")
    _require_finite(f.dom, f.cod)
    S, m = subspace(f.cod, set(f.images))
    e = VMorphism(f.dom, S, f.images)
    return e, m


def diagonal_fill(e: VMorphism, m: VMorphism, u: VMorphism, v: VMorphism) -> VMorphism:
    """Unique ``d`` with ``d∘e = u`` and ``m∘d = v`` for a commuting square ``m∘u = v∘e``."""
    if not (in_e(e) and in_m(m)):
        raise ValueError("diagonal fill needs e in E and m in M")
    if compose(m, u) != compose(v, e):
        raise ValueError("square does not commute")
    imgs = {}
    for a, b in zip(e.dom.points, e.images):
        c = u(a)
        if imgs.setdefault(b, c) != c:
            raise ValueError("no diagonal: u not constant on fibres of e")
    d = VMorphism(e.cod, m.dom, [imgs[b] for b in e.cod.points])
    if not is_morphism(d.dom, d.cod, d.images):
        raise ValueError("diagonal is not a morphism")
    return d


# ---------------------------------------------------------------------------
# abelian group decomposition


def element_order(G: VObject, x) -> int:
    k, acc = 1, x
    while acc != G.zero:
        acc = G.plus(acc, x)
        k += 1
    return k


@lru_cache(maxsize=512)
def ab_basis(G: VObject) -> tuple[tuple, tuple, dict]:
    """A basis ``(gens, orders, coords)`` with ``G ≅ ⊕ Z/orders[i]``.

    ``coords`` maps every element to its coordinate tuple.  Found by depth-first
    search over independent cyclic subgroups, largest orders first.
    """
    _require_finite(G)
    size = len(G.points)
    elements = sorted((x for x in G.points if x != G.zero), key=lambda x: (-element_order(G, x), G.index[x]))

    def search(gens, orders, span):
        if len(span) == size:
            return gens, orders
        for g in elements:
            k = element_order(G, g)
            if orders and k > orders[-1]:
                continue
            multiples = [G.multiple(j, g) for j in range(k)]
            if any(mlt in span for mlt in multiples[1:]):
                continue
            new_span = {G.plus(s, mlt) for s in span for mlt in multiples}
            found = search(gens + [g], orders + [k], new_span)
            if found:
                return found
        return None

    gens, orders = search([], [], {G.zero}) or ([], [])
    coords = {}
    for c in itertools.product(*(range(k) for k in orders)):
        x = G.zero
        for ci, g in zip(c, gens):
            x = G.plus(x, G.multiple(ci, g))
        coords[x] = c
    if len(coords) != size:
        raise AssertionError("basis search failed")
    return tuple(gens), tuple(orders), coords


def evaluate_free(f: VMorphism, vector) -> object:
    """Value of ``f`` (out of a free abelian object) at an integer coordinate vector."""
    cod = f.cod
    if cod.rank:
        return tuple(sum(c * img[k] for c, img in zip(vector, f.images)) for k in range(cod.rank))
    acc = cod.zero
    for c, img in zip(vector, f.images):
        acc = cod.plus(acc, cod.multiple(c, img))
    return acc


def _hom_value(A: VObject, X: VObject, phi: tuple, x) -> object:
    """Value at ``x`` of the homomorphism ``phi`` (a point of ``A^X``)."""
    if X.rank:
        acc = A.zero
        for c, img in zip(x, phi):
            if c:
                acc = A.plus(acc, img if c == 1 else A.multiple(c, img))
        return acc
    return phi[X.index[x]]


# ---------------------------------------------------------------------------
# monoidal closed structure


def tensor(X: VObject, Y: VObject) -> VObject:
    """Cartesian product (FinSet, FinPos), sum metric (FinMet), tensor product (FinAb)."""
    base = check_same_base(X, Y)
    if base is Base.FINAB:
        return _ab_tensor(X, Y)
    points = list(itertools.product(X.points, Y.points))
    if base is Base.FINPOS:
        return VObject(base, points, leq=lambda a, b: X.le(a[0], b[0]) and Y.le(a[1], b[1]))
    if base is Base.FINMET:
        return VObject(base, points, dist=lambda a, b: X.d(a[0], b[0]) + Y.d(a[1], b[1]))
    return VObject(base, points)


def _ab_tensor(X, Y):
    if X.rank and Y.rank:
        return free_abelian(X.rank * Y.rank, [(a, b) for a in X.points for b in Y.points])
    if X.rank or Y.rank:
        finite, r = (Y, X.rank) if X.rank else (X, Y.rank)
        return product([finite] * r, Base.FINAB).obj
    gx, ox, _ = ab_basis(X)
    gy, oy, _ = ab_basis(Y)
    moduli = [math.gcd(a, b) for a in ox for b in oy]
    keep = [k for k, m in enumerate(moduli) if m > 1]
    mods = [moduli[k] for k in keep]
    points = list(itertools.product(*(range(m) for m in mods)))
    return VObject(Base.FINAB, points, add=lambda a, b: tuple((p + q) % m for p, q, m in zip(a, b, mods)),
                   zero=tuple(0 for _ in mods))


def _tensor_layout(X, Y):
    """For finite FinAb ``X ⊗ Y``: the (i, j) basis pairs that survive, in coordinate order."""
    _, ox, _ = ab_basis(X)
    _, oy, _ = ab_basis(Y)
    return [(i, j) for i in range(len(ox)) for j in range(len(oy)) if math.gcd(ox[i], oy[j]) > 1]


def power(A: VObject, X: VObject) -> VObject:
    """Internal hom ``A^X``: all morphisms ``X -> A`` with pointwise/sup/group structure."""
    return _power(A, X)


@lru_cache(maxsize=2048)
def _power(A: VObject, X: VObject) -> VObject:
    base = check_same_base(A, X)
    _require_finite(A)
    if base is Base.FINAB:
        if X.rank:
            points = list(itertools.product(A.points, repeat=X.rank))
        else:
            gens, orders, coords = ab_basis(X)
            points = []
            options = [[a for a in A.points if A.multiple(k, a) == A.zero] for k in orders]
            for imgs in itertools.product(*options):
                points.append(tuple(_combine(A, coords[x], imgs) for x in X.points))
        return VObject(base, points, add=lambda f, g: tuple(A.plus(a, b) for a, b in zip(f, g)),
                       zero=tuple(A.zero for _ in (X.points if not X.rank else range(X.rank))))
    candidates = itertools.product(A.points, repeat=len(X.points))
    if base is Base.FINSET:
        points = list(candidates)
        return VObject(base, points)
    points = [c for c in candidates if is_morphism(X, A, c)]
    if base is Base.FINPOS:
        return VObject(base, points, leq=lambda f, g: all(A.le(a, b) for a, b in zip(f, g)))
    return VObject(base, points, dist=lambda f, g: max((A.d(a, b) for a, b in zip(f, g)), default=Fraction(0)))


def _combine(A, coord, imgs):
    acc = A.zero
    for c, img in zip(coord, imgs):
        acc = A.plus(acc, A.multiple(c, img))
    return acc


def power_map(h: VMorphism, X: VObject) -> VMorphism:
    """Postcomposition ``h^X : A^X -> B^X``."""
    AX, BX = power(h.dom, X), power(h.cod, X)
    return VMorphism(AX, BX, [tuple(h(a) for a in phi) for phi in AX.points])


def reindex(A: VObject, u: VMorphism) -> VMorphism:
    """Precomposition ``A^u : A^X -> A^Y`` for ``u : Y -> X``."""
    X, Y = u.cod, u.dom
    AX, AY = power(A, X), power(A, Y)
    if A.base is Base.FINAB:
        images = [tuple(_hom_value(A, X, phi, u.images[k]) for k in range(len(Y.points))) for phi in AX.points]
        return VMorphism(AX, AY, images)
    positions = [X.index[v] for v in u.images]
    return VMorphism(AX, AY, [tuple(phi[p] for p in positions) for phi in AX.points])


def transpose(a: VMorphism) -> VMorphism:
    """``a : X -> A`` as a generalized element ``I -> A^X``."""
    AX = power(a.cod, a.dom)
    I = unit(a.base)
    return VMorphism(I, AX, [a.images])


def untranspose(A: VObject, X: VObject, phi: tuple) -> VMorphism:
    """Inverse of :func:`transpose`, from a point ``phi`` of ``A^X``."""
    return VMorphism(X, A, phi)


def power_unit_iso(A: VObject) -> VMorphism:
    """``A^I -> A``."""
    AI = power(A, unit(A.base))
    return VMorphism(AI, A, [phi[0] for phi in AI.points])


def tensor_unit_iso(X: VObject) -> VMorphism:
    """``X ⊗ I -> X``."""
    I = unit(X.base)
    XI = tensor(X, I)
    if X.base is Base.FINAB:
        if X.rank:
            return VMorphism(XI, X, [tuple(1 if k == i else 0 for k in range(X.rank)) for i in range(X.rank)])
        return VMorphism(XI, X, [x[0] for x in XI.points])
    return VMorphism(XI, X, [x for x, _ in XI.points])


def tensor_symmetry(X: VObject, Y: VObject) -> VMorphism:
    """``X ⊗ Y -> Y ⊗ X``."""
    XY, YX = tensor(X, Y), tensor(Y, X)
    if X.base is Base.FINAB:
        return _ab_tensor_symmetry(X, Y, XY, YX)
    return VMorphism(XY, YX, [(y, x) for x, y in XY.points])


def _ab_tensor_symmetry(X, Y, XY, YX):
    if X.rank and Y.rank:
        pos = {lab: k for k, lab in enumerate(YX.points)}
        out = []
        for a, b in XY.points:
            v = [0] * YX.rank
            v[pos[(b, a)]] = 1
            out.append(tuple(v))
        return VMorphism(XY, YX, out)
    if X.rank or Y.rank:
        return VMorphism(XY, YX, XY.points)
    lay_xy, lay_yx = _tensor_layout(X, Y), _tensor_layout(Y, X)
    pos = {(j, i): k for k, (j, i) in enumerate(lay_yx)}
    out = []
    for c in XY.points:
        v = [0] * len(lay_yx)
        for k, (i, j) in enumerate(lay_xy):
            v[pos[(j, i)]] = c[k]
        out.append(tuple(v))
    return VMorphism(XY, YX, out)


def tensor_associator(X: VObject, Y: VObject, Z: VObject) -> VMorphism:
    """``(X ⊗ Y) ⊗ Z -> X ⊗ (Y ⊗ Z)`` (set-like bases)."""
    base = check_same_base(X, Y, Z)
    if base is Base.FINAB:
        raise BaseError("associator is only materialized for FinSet/FinPos/FinMet")
    L = tensor(tensor(X, Y), Z)
    R = tensor(X, tensor(Y, Z))
    return VMorphism(L, R, [(x, (y, z)) for (x, y), z in L.points])


def curry(A: VObject, X: VObject, Y: VObject) -> VMorphism:
    """The canonical isomorphism ``(A^X)^Y -> A^(X ⊗ Y)``."""
    AX = power(A, X)
    AXY = power(AX, Y)
    target = power(A, tensor(X, Y))
    images = [_curry_point(A, X, Y, AX, phi) for phi in AXY.points]
    return VMorphism(AXY, target, images)


def _curry_point(A, X, Y, AX, phi):
    XY = tensor(X, Y)
    if A.base is not Base.FINAB:
        ypos = Y.index
        xpos = X.index
        return tuple(phi[ypos[y]][xpos[x]] for x, y in XY.points)
    # FinAb: phi is a hom Y -> A^X given on Y.points (or generators)
    if X.rank and Y.rank:
        xi = {g: k for k, g in enumerate(X.points)}
        yi = {g: k for k, g in enumerate(Y.points)}
        return tuple(phi[yi[b]][xi[a]] for a, b in XY.points)
    if X.rank:
        # X = Z^r, X ⊗ Y = Y^r; (y_1..y_r) -> sum_k phi(y_k)(e_k)
        return tuple(_sum(A, (_hom_value(AX, Y, phi, yk)[k] for k, yk in enumerate(v))) for v in XY.points)
    if Y.rank:
        # X ⊗ Z^s = X^s; (x_1..x_s) -> sum_k phi(e_k)(x_k)
        return tuple(_sum(A, (_hom_value(A, X, phi[k], xk) for k, xk in enumerate(v))) for v in XY.points)
    gx, _, _ = ab_basis(X)
    gy, _, _ = ab_basis(Y)
    layout = _tensor_layout(X, Y)
    out = []
    for c in XY.points:
        terms = []
        for k, (i, j) in enumerate(layout):
            psi = _hom_value(AX, Y, phi, gy[j])
            terms.append(A.multiple(c[k], _hom_value(A, X, psi, gx[i])))
        out.append(_sum(A, terms))
    return tuple(out)


def _sum(A, values):
    acc = A.zero
    for v in values:
        acc = A.plus(acc, v)
    return acc


def uncurry(A: VObject, X: VObject, Y: VObject) -> VMorphism:
    """Inverse of :func:`curry`."""
    return inverse(curry(A, X, Y))


def split_power(A: VObject, parts: Sequence[VObject]) -> VMorphism:
    """``A^(X1 + ... + Xk) -> A^X1 × ... × A^Xk`` by restriction along the injections."""
    co = coproduct(list(parts), A.base)
    restrictions = [reindex(A, inj) for inj in co.legs]
    target = product([r.cod for r in restrictions], A.base)
    src = power(A, co.obj)
    return VMorphism(src, target.obj, [tuple(r(phi) for r in restrictions) for phi in src.points])


def power_tensor_iso(A: VObject, X: VObject, Y: VObject) -> VMorphism:
    """Alias of :func:`curry` kept for readability at call sites."""
    return curry(A, X, Y)


# ---------------------------------------------------------------------------
# connectedness and E-stability


def is_connected(X: VObject) -> bool:
    """``(-)^X`` preserves coproducts, decided combinatorially.

    FinSet: exactly one point.  FinPos: nonempty with connected comparability
    graph.  FinMet: nonempty with connected finite-distance graph.  FinAb:
    always (coproducts are biproducts, so every hom functor preserves them).
    """
    if X.base is Base.FINAB:
        return True
    pts = X.points
    if not pts:
        return False
    if X.base is Base.FINSET:
        return len(pts) == 1
    if X.base is Base.FINPOS:
        linked = lambda a, b: X.le(a, b) or X.le(b, a)
    else:
        linked = lambda a, b: X.d(a, b) != INF
    seen = {pts[0]}
    stack = [pts[0]]
    while stack:
        a = stack.pop()
        for b in pts:
            if b not in seen and linked(a, b):
                seen.add(b)
                stack.append(b)
    return len(seen) == len(pts)


def preserves_coproduct(X: VObject, A: VObject, B: VObject) -> bool:
    """Definitional check: the comparison ``A^X + B^X -> (A+B)^X`` is an isomorphism."""
    co = coproduct([A, B])
    lhs = coproduct([power(A, X), power(B, X)])
    comparison = lhs.induced([power_map(co.legs[0], X), power_map(co.legs[1], X)])
    return is_iso(comparison)


class StabilityVerdict:
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNKNOWN = "unknown-up-to-witnesses"

    def __init__(self, status: str, witness: VMorphism | None = None, checked: int = 0):
        self.status = status
        self.witness = witness
        self.checked = checked

    def __repr__(self):
        return f"StabilityVerdict({self.status}, checked={self.checked})"


def is_e_stable(X: VObject, fs: FactorizationSystem | None = None,
                witnesses: Iterable[VMorphism] = ()) -> StabilityVerdict:
    """Whether ``e^X`` stays in E; a universal claim only for classified cases.

    ``X ≅ I`` and every finite set are stable outright.  Otherwise each witness
    ``e`` (which must lie in E) is tested and the verdict is either an explicit
    counterexample or "unknown up to the witnesses".
    """
    witnesses = list(witnesses)
    for e in witnesses:
        check_same_base(X, e.dom)
        if not in_e(e):
            raise ValueError("stability witness is not in E")
    if X.base is Base.FINSET or _is_unit_like(X):
        return StabilityVerdict(StabilityVerdict.STABLE, checked=len(witnesses))
    for e in witnesses:
        if not in_e(power_map(e, X)):
            return StabilityVerdict(StabilityVerdict.UNSTABLE, e, checked=len(witnesses))
    return StabilityVerdict(StabilityVerdict.UNKNOWN, checked=len(witnesses))


def _is_unit_like(X: VObject) -> bool:
    if X.base is Base.FINAB:
        return X.rank == 1
    return len(X.points) == 1


def metric_stability_witness(X: VObject, n: int = 1) -> VMorphism:
    """Finite truncation of the thickening witness for a metric ``X``.

    Each point ``x`` gets a twin ``x_n`` and twins sit at distance
    ``d(x, y) + 2/n``; the witness is the surjection sending ``x_n`` to ``x``.
    Powers by ``X`` fail to be surjective onto ``X^X`` as soon as ``X`` has two
    points at finite distance.
    """
    if X.base is not Base.FINMET:
        raise BaseError("metric witness needs a metric space")
    eps = Fraction(2, n)
    twins = [(x, n) for x in X.points]
    T = _table_metric(twins, lambda i, j: Fraction(0) if i == j else X.d(X.points[i], X.points[j]) + eps)
    return VMorphism(T, X, list(X.points), check=True)


# ---------------------------------------------------------------------------
# enumeration of small objects and morphisms


def morphisms(X: VObject, A: VObject) -> list[VMorphism]:
    """All base morphisms ``X -> A``."""
    return [VMorphism(X, A, phi) for phi in power(A, X).points]


def automorphisms(X: VObject) -> list[tuple]:
    """Point permutations (as image tuples) that are automorphisms of ``X``."""
    _require_finite(X)
    out = []
    if X.base is Base.FINAB:
        for phi in power(X, X).points:
            if len(set(phi)) == len(phi):
                out.append(phi)
        return out
    for perm in itertools.permutations(X.points):
        if X.base is Base.FINSET or in_m(VMorphism(X, X, perm)) and is_morphism(X, X, perm):
            out.append(perm)
    return out


def enumerate_carriers(base: Base, size: int, distance_grid: Sequence = (1, 2, INF)) -> list[VObject]:
    """One representative per isomorphism class of objects with ``size`` points."""
    pts = list(range(size))
    if base is Base.FINSET:
        return [finset(size)]
    if base is Base.FINAB:
        return [abgroup(*f) if f else zero_group() for f in _invariant_factor_lists(size)]
    found = {}
    if base is Base.FINPOS:
        pairs = [(a, b) for a in pts for b in pts if a != b]
        for mask in range(1 << len(pairs)):
            rel = {pairs[k] for k in range(len(pairs)) if mask >> k & 1}
            if any((b, a) in rel for a, b in rel):
                continue
            if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2 and a != c):
                continue
            P = VObject(Base.FINPOS, pts, leq=lambda x, y, rel=frozenset(rel): x == y or (x, y) in rel)
            key = _canonical_relation(pts, rel)
            found.setdefault(key, P)
        return [found[k] for k in sorted(found)]
    grid = [as_distance(g) for g in distance_grid]
    pairs = list(itertools.combinations(pts, 2))
    for values in itertools.product(grid, repeat=len(pairs)):
        table = dict(zip(pairs, values))
        dist = lambda x, y, table=table: Fraction(0) if x == y else table[(min(x, y), max(x, y))]
        M = VObject(Base.FINMET, pts, dist=dist)
        if M.violations():
            continue
        key = min(tuple(table[(min(p[a], p[b]), max(p[a], p[b]))] for a, b in pairs)
                  for p in itertools.permutations(pts)) if pairs else ()
        found.setdefault(key, M)
    return [found[k] for k in sorted(found, key=lambda k: tuple((v == INF, v) for v in k))]


def _canonical_relation(pts, rel):
    return min(tuple(sorted((p[a], p[b]) for a, b in rel)) for p in itertools.permutations(pts))


def _invariant_factor_lists(order: int) -> list[tuple]:
    """Invariant factor sequences ``d1 | d2 | ... | dk`` with product ``order``."""
    if order == 1:
        return [()]
    out = []

    def rec(remaining, prefix):
        if remaining == 1:
            out.append(tuple(prefix))
            return
        for d in range(2, remaining + 1):
            if remaining % d:
                continue
            if prefix and d % prefix[-1]:
                continue
            rest = remaining // d
            if rest != 1 and rest % d:
                # remaining factors must be multiples of d
                pass
            rec(rest, prefix + [d])

    rec(order, [])
    return [f for f in out if all(f[i + 1] % f[i] == 0 for i in range(len(f) - 1))]
