"""Random small objects, morphisms and structures for the property tests."""
import itertools
import random
from fractions import Fraction

from elc import vbase as vb
from elc.signature import LStructure
from elc.subobject import Subobject, all_subobjects
from elc.vbase import Base

BASES = (Base.FINSET, Base.FINPOS, Base.FINMET, Base.FINAB)
GRID = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3))


def random_object(base: Base, rng: random.Random, max_size: int = 5) -> vb.VObject:
    if base is Base.FINAB:
        moduli = rng.choice([(1,), (2,), (3,), (4,), (5,), (2, 2)])
        return vb.abgroup(*[m for m in moduli])
    n = rng.randint(0, max_size)
    pts = list(range(n))
    if base is Base.FINSET:
        return vb.finset(n)
    if base is Base.FINPOS:
        rel = [(a, b) for a, b in itertools.combinations(pts, 2) if rng.random() < 0.35]
        return vb.poset(pts, rel)
    # metric: shortest paths over random weighted edges, unreachable pairs at inf
    d = {(a, b): (Fraction(0) if a == b else vb.INF) for a in pts for b in pts}
    for a, b in itertools.combinations(pts, 2):
        if rng.random() < 0.6:
            w = rng.choice(GRID)
            d[a, b] = d[b, a] = w
    for k in pts:
        for a in pts:
            for b in pts:
                if d[a, k] + d[k, b] < d[a, b]:
                    d[a, b] = d[a, k] + d[k, b]
    return vb.metric(pts, {(a, b): d[a, b] for a, b in itertools.combinations(pts, 2)})


_HOMS: dict = {}


def all_morphisms(X, A):
    key = (id(X), id(A))
    if key not in _HOMS:
        _HOMS[key] = (X, A, vb.morphisms(X, A))
    return _HOMS[key][2]


def random_morphism(X, A, rng: random.Random):
    if X.base is Base.FINSET:
        if not A.points and X.points:
            return None
        return vb.VMorphism(X, A, [rng.choice(A.points) for _ in X.points])
    homs = all_morphisms(X, A)
    return rng.choice(homs) if homs else None


def random_structure(L, carrier, rng: random.Random, density: float = 0.5) -> LStructure:
    funcs = {}
    for s in L.functions:
        f = random_morphism(vb.power(carrier, s.dom), vb.power(carrier, s.cod), rng)
        funcs[s.name] = f
    rels = {}
    for r in L.relations:
        AX = vb.power(carrier, r.arity)
        if carrier.base is Base.FINAB:
            rels[r.name] = rng.choice(all_subobjects(AX))
        else:
            rels[r.name] = Subobject(AX, [p for p in AX.points if rng.random() < density])
    return LStructure(L, carrier, funcs, rels)


def midpoint_oracle(C) -> bool:
    """Every pair at finite positive distance ``d`` has exactly one point at ``d/2`` from both."""
    for x, y in itertools.combinations(C.points, 2):
        d = C.d(x, y)
        if d == vb.INF:
            continue
        mids = [m for m in C.points if C.d(x, m) == d / 2 and C.d(m, y) == d / 2]
        if len(mids) != 1:
            return False
    return True


def all_finite(C) -> bool:
    return all(C.d(x, y) != vb.INF for x, y in itertools.combinations(C.points, 2))
