"""Parametric axiom families and model checking against whole theories.

Parameters only occur as affine distance expressions ``a*d + b`` (``a >= 0``)
inside metric object literals.  Over a finite metric structure an instance can
only change where such an expression crosses a distance realized in the
structure, or where the literal itself stops being a metric space.  Checking one
value per critical point and per open interval between them therefore decides
the whole family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ..signature import LStructure
from ..vbase import Base
from .semantics import Options, satisfies_sequent, satisfies_sequent_pointwise
from .syntax import BASIC, Schema, Sequent, Theory


@dataclass(frozen=True)
class Affine:
    a: Fraction
    b: Fraction

    def __call__(self, value):
        return self.a * value + self.b

    def __add__(self, other: "Affine") -> "Affine":
        return Affine(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "Affine") -> "Affine":
        return Affine(self.a - other.a, self.b - other.b)

    def scale(self, k) -> "Affine":
        return Affine(self.a * k, self.b * k)

    @property
    def is_constant(self) -> bool:
        return self.a == 0


def realized_distances(A: LStructure) -> set:
    """Finite positive distances between carrier points (empty off FinMet)."""
    C = A.carrier
    if C.base is not Base.FINMET:
        return set()
    pts = C.points
    return {C.d(x, y) for i, x in enumerate(pts) for y in pts[i + 1:] if C.d(x, y) != math.inf}


def roots(forms: Iterable[Affine]) -> set:
    out = set()
    for f in forms:
        if f.a != 0:
            out.add(-f.b / f.a)
    return out


def critical_values(distances: Sequence[Affine], constraints: Sequence[Affine], A: LStructure) -> list:
    """Positive parameter values where some comparison can flip.

    ``distances`` are the parametric entries of object literals; each is
    compared with every realized distance ``δ`` of ``A`` (value ``(δ-b)/a``).
    ``constraints`` are the linear forms that must stay nonnegative (triangle
    inequalities) or positive (distinct points) for the literal to be valid.
    """
    crit = set(roots(constraints)) | roots(distances)
    for delta in realized_distances(A):
        for f in distances:
            if f.a != 0:
                crit.add((delta - f.b) / f.a)
    return sorted(c for c in crit if c > 0)


def representatives(crit: Sequence, domain: str, start: int = 1) -> list:
    """One parameter value per region cut out by the critical values."""
    crit = sorted(set(crit))
    if domain == "N":
        top = max(crit, default=start)
        return list(range(start, max(start, math.ceil(top) + 1) + 1))
    if not crit:
        return [Fraction(1)]
    out = [crit[0] / 2]
    for lo, hi in zip(crit, crit[1:]):
        out.extend([lo, (lo + hi) / 2])
    out.extend([crit[-1], crit[-1] + 1])
    return out


def instances(schema: Schema, A: LStructure) -> list[tuple[object, Sequent]]:
    """The instances of an axiom family that decide it over ``A`` (invalid literals skipped)."""
    out = []
    for value in representatives(schema.critical(A), schema.domain, schema.start):
        seq = schema.instance(value)
        if seq is not None:
            out.append((value, seq))
    return out


# ---------------------------------------------------------------------------
# theories


SATISFIED, POINTWISE_ONLY, FAILED = "satisfied", "pointwise-only", "failed"


@dataclass
class AxiomVerdict:
    name: str
    kind: str
    verdict: str
    instance: object = None
    checked_instances: int = 1

    @property
    def ok(self) -> bool:
        return self.verdict == SATISFIED


@dataclass
class ModelReport:
    structure: str
    verdicts: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    @property
    def failures(self) -> list:
        return [v for v in self.verdicts if not v.ok]


def check_sequent(A: LStructure, seq: Sequent, opts: Options | None = None) -> str:
    if satisfies_sequent(A, seq, opts):
        return SATISFIED
    if seq.kind == BASIC and satisfies_sequent_pointwise(A, seq, opts):
        return POINTWISE_ONLY
    return FAILED


def check_axiom(A: LStructure, axiom, opts: Options | None = None) -> AxiomVerdict:
    if isinstance(axiom, Sequent):
        return AxiomVerdict(axiom.name, axiom.kind, check_sequent(A, axiom, opts))
    insts = instances(axiom, A)
    kind = insts[0][1].kind if insts else BASIC
    for value, seq in insts:
        verdict = check_sequent(A, seq, opts)
        if verdict != SATISFIED:
            return AxiomVerdict(axiom.name, kind, verdict, value, len(insts))
    return AxiomVerdict(axiom.name, kind, SATISFIED, None, len(insts))


def model_report(A: LStructure, T: Theory, opts: Options | None = None) -> ModelReport:
    if A.language != T.language:
        raise ValueError("structure and theory use different languages")
    opts = opts or Options()
    report = ModelReport(A.name or "structure")
    for axiom in T.axioms:
        report.verdicts.append(check_axiom(A, axiom, opts))
    return report


def is_model(A: LStructure, T: Theory, opts: Options | None = None, report: bool = False):
    rep = model_report(A, T, opts)
    return (rep.ok, rep) if report else rep.ok
