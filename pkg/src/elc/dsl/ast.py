"""Surface syntax trees, before symbol resolution.

Nodes compare structurally; source positions are kept out of equality so that
``parse(print(tree)) == tree`` can be tested directly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

Pos = tuple  # (line, col)


def _pos():
    return field(default=(0, 0), compare=False, repr=False)


# -- points -----------------------------------------------------------------


@dataclass(frozen=True)
class Bracket:
    """A group element written ``[1, 2]``."""

    items: tuple


@dataclass(frozen=True)
class Tup:
    """A tuple of points written ``(a, b)``."""

    items: tuple


# -- distances ----------------------------------------------------------------


@dataclass(frozen=True)
class Dist:
    """``a * param + b``, or infinity."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    param: str | None = None
    inf: bool = False


# -- objects ------------------------------------------------------------------


class Obj:
    pass


@dataclass(frozen=True)
class OUnit(Obj):
    pos: Pos = _pos()


@dataclass(frozen=True)
class OZero(Obj):
    pos: Pos = _pos()


@dataclass(frozen=True)
class OFinset(Obj):
    size: int | None = None
    names: tuple | None = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class OPoset(Obj):
    points: tuple
    less: tuple  # pairs (x, y) meaning x < y
    pos: Pos = _pos()


@dataclass(frozen=True)
class OMetric(Obj):
    points: tuple
    dists: tuple  # triples (x, y, Dist)
    pos: Pos = _pos()


@dataclass(frozen=True)
class OAb(Obj):
    moduli: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class ORef(Obj):
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class OSum(Obj):
    parts: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class OTensor(Obj):
    parts: tuple
    pos: Pos = _pos()


# -- terms --------------------------------------------------------------------


class RTerm:
    pass


@dataclass(frozen=True)
class TVar(RTerm):
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class TProj(RTerm):
    name: str
    point: object
    pos: Pos = _pos()


@dataclass(frozen=True)
class TApp(RTerm):
    fun: str
    args: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class TTuple(RTerm):
    items: tuple
    pos: Pos = _pos()


# -- formulas -----------------------------------------------------------------


class RFormula:
    pass


@dataclass(frozen=True)
class FTrue(RFormula):
    pos: Pos = _pos()


@dataclass(frozen=True)
class FFalse(RFormula):
    pos: Pos = _pos()


@dataclass(frozen=True)
class FEq(RFormula):
    lhs: RTerm
    rhs: RTerm
    pos: Pos = _pos()


@dataclass(frozen=True)
class FRel(RFormula):
    name: str
    args: tuple
    power: Obj | None = None
    pos: Pos = _pos()


@dataclass(frozen=True)
class FAnd(RFormula):
    parts: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class FOr(RFormula):
    parts: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class FExists(RFormula):
    quantifier: str  # "exists", "exists!", "exists!!"
    binders: tuple  # (name, Obj | None)
    body: RFormula
    pos: Pos = _pos()


@dataclass(frozen=True)
class FIndexed(RFormula):
    """``\\/ n in start.. . body``."""

    param: str
    start: int
    body: RFormula
    pos: Pos = _pos()


@dataclass(frozen=True)
class RSequent:
    binders: tuple
    lhs: RFormula | None
    rhs: RFormula
    pos: Pos = _pos()


# -- top-level items ----------------------------------------------------------


@dataclass(frozen=True)
class IBase:
    name: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class IImport:
    path: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class IArity:
    name: str
    obj: Obj
    pos: Pos = _pos()


@dataclass(frozen=True)
class DFun:
    name: str
    dom: Obj
    cod: Obj
    pos: Pos = _pos()


@dataclass(frozen=True)
class DRel:
    name: str
    arity: Obj
    pos: Pos = _pos()


@dataclass(frozen=True)
class ILanguage:
    decls: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class AAxiom:
    name: str
    sequent: RSequent
    pos: Pos = _pos()


@dataclass(frozen=True)
class ASchema:
    name: str
    param: str
    domain: str  # "Q+" or "N"
    start: int
    sequent: RSequent
    pos: Pos = _pos()


@dataclass(frozen=True)
class ITheory:
    name: str
    axioms: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class IStructure:
    name: str
    carrier: Obj
    funs: tuple  # (name, ((src, dst), ...))
    rels: tuple  # (name, (point, ...))
    pos: Pos = _pos()


@dataclass(frozen=True)
class IMorphism:
    name: str
    src: str
    tgt: str
    mapping: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class ICone:
    name: str
    apex: str
    legs: tuple  # (target structure, mapping)
    pos: Pos = _pos()


@dataclass(frozen=True)
class Document:
    items: tuple
