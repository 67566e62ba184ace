"""Model search: all models of a theory up to isomorphism, by carrier size.

For every carrier and every choice of function tables (one per orbit of the
carrier's automorphisms) the axioms are grounded into propositional clauses
over relation-membership variables, and a SAT solver lists the relation
interpretations that satisfy them.  Each candidate is then re-checked with the
semantic model checker and deduplicated by canonical key.

Groundings are exact for the set-like bases because M-subobjects there are
determined by their point sets.  Over abelian groups relations must be
subgroups, which does not ground to clauses nicely, so that base falls back to
exhaustive enumeration.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator

from pysat.solvers import Solver

from . import vbase as vb
from .logic import syntax as S
from .logic.schema import instances, is_model
from .logic.semantics import Options, interpret_term, saturation_bound
from .signature import (BudgetExceeded, LStructure, canonical_key, enumerate_structures, search_budget)
from .subobject import Subobject
from .vbase import Base, VMorphism

log = logging.getLogger(__name__)


class CNF:
    """Clause store with Tseitin definitions and constant folding (True/False as Python bools)."""

    def __init__(self):
        self.nvars = 0
        self.clauses: list[list[int]] = []
        self.unsat = False
        self._and: dict = {}
        self._or: dict = {}

    def new(self) -> int:
        self.nvars += 1
        return self.nvars

    def add(self, lits):
        out = []
        for x in lits:
            if x is True:
                return
            if x is False:
                continue
            out.append(x)
        if not out:
            self.unsat = True
        self.clauses.append(out)

    def AND(self, xs):
        lits = set()
        for x in xs:
            if x is False:
                return False
            if x is True:
                continue
            lits.add(x)
        if not lits:
            return True
        if len(lits) == 1:
            return next(iter(lits))
        key = frozenset(lits)
        if key in self._and:
            return self._and[key]
        v = self.new()
        for x in lits:
            self.clauses.append([-v, x])
        self.clauses.append([v] + [-x for x in lits])
        self._and[key] = v
        return v

    def OR(self, xs):
        lits = set()
        for x in xs:
            if x is True:
                return True
            if x is False:
                continue
            lits.add(x)
        if not lits:
            return False
        if len(lits) == 1:
            return next(iter(lits))
        key = frozenset(lits)
        if key in self._or:
            return self._or[key]
        v = self.new()
        for x in lits:
            self.clauses.append([v, -x])
        self.clauses.append([-v] + list(lits))
        self._or[key] = v
        return v


def NOT(x):
    if x is True or x is False:
        return not x
    return -x


class Grounder:
    """Symbolic interpretation: each point of ``A^X`` gets a literal."""

    def __init__(self, frame: LStructure, cnf: CNF, relvars: dict, opts: Options):
        self.A = frame  # carrier and function tables; relations are placeholders
        self.cnf = cnf
        self.relvars = relvars  # name -> {point of A^W: var}
        self.opts = opts
        self._memo: dict = {}

    def formula(self, phi: S.Formula) -> dict:
        key = phi
        hit = self._memo.get(key)
        if hit is None:
            hit = self._formula(phi)
            self._memo[key] = hit
        return hit

    def _formula(self, phi):
        C = self.A.carrier
        AX = vb.power(C, phi.ctx.arity)
        cnf = self.cnf
        if isinstance(phi, S.Eq):
            s, t = interpret_term(phi.lhs, self.A), interpret_term(phi.rhs, self.A)
            return {p: s(p) == t(p) for p in AX.points}
        if isinstance(phi, S.Rel):
            t = interpret_term(phi.term, self.A)
            table = self.relvars[phi.symbol.name]
            if phi.power is None:
                return {p: table[t(p)] for p in AX.points}
            un = vb.uncurry(C, phi.symbol.arity, phi.power)
            return {p: cnf.AND(table[col] for col in un(t(p))) for p in AX.points}
        if isinstance(phi, S.And):
            parts = [self.formula(q) for q in phi.parts]
            return {p: cnf.AND(part[p] for part in parts) for p in AX.points}
        if isinstance(phi, S.Or):
            parts = [self.formula(q) for q in phi.parts]
            return {p: cnf.OR(part[p] for part in parts) for p in AX.points}
        if isinstance(phi, S.Exists):
            body = self.formula(phi.body)
            restrict = vb.reindex(C, phi.body.ctx.prefix_inclusion(len(phi.ctx)))
            groups: dict = {p: [] for p in AX.points}
            for q, lit in body.items():
                groups[restrict(q)].append(lit)
            return {p: cnf.OR(lits) for p, lits in groups.items()}
        if isinstance(phi, S.OrSchema):
            bound = saturation_bound(phi, self.A)
            if bound > self.opts.max_n:
                raise SearchTruncated(phi.text, bound, self.opts.max_n)
            parts = []
            for n in range(phi.start, bound + 1):
                inst = phi.instance(n)
                if inst is not None:
                    parts.append(self.formula(inst))
            return {p: cnf.OR(part[p] for part in parts) for p in AX.points}
        raise TypeError(f"cannot ground {type(phi).__name__}")

    # -- sequents -------------------------------------------------------------

    def sequent(self, seq: S.Sequent):
        lhs = self.formula(seq.lhs)
        if seq.kind == S.BASIC:
            rhs = self.formula(seq.rhs)
            for p, lit in lhs.items():
                self.cnf.add([NOT(lit), rhs[p]])
            return
        u = seq.rhs
        body_ctx = u.body.ctx
        C = self.A.carrier
        body = self.formula(u.body)
        restrict = vb.reindex(C, body_ctx.prefix_inclusion(len(seq.ctx)))
        both = {q: self.cnf.AND([lit, lhs[restrict(q)]]) for q, lit in body.items()}
        groups: dict = {p: [] for p in lhs}
        for q, lit in both.items():
            groups[restrict(q)].append(lit)
        # existence
        for p, lit in lhs.items():
            self.cnf.add([NOT(lit), self.cnf.OR(groups[p])])
        # the diagonal must be in M: injective, and for limits also order/distance reflecting
        AXY = restrict.dom
        AX = restrict.cod
        enriched = u.enriched and C.base is not Base.FINSET
        pts = [q for q, lit in both.items() if lit is not False]
        for q1, q2 in itertools.combinations(pts, 2):
            p1, p2 = restrict(q1), restrict(q2)
            bad = p1 == p2
            if not bad and enriched:
                if C.base is Base.FINPOS:
                    bad = (AX.le(p1, p2) and not AXY.le(q1, q2)) or (AX.le(p2, p1) and not AXY.le(q2, q1))
                else:
                    bad = AXY.d(q1, q2) != AX.d(p1, p2)
            if bad:
                self.cnf.add([NOT(both[q1]), NOT(both[q2])])


class SearchTruncated(RuntimeError):
    def __init__(self, text, bound, max_n):
        self.text, self.bound, self.max_n = text, bound, max_n
        super().__init__(f"disjunction {text!r} needs {bound} disjuncts, more than max_n = {max_n}")


@dataclass
class SearchStats:
    carriers: int = 0
    function_tables: int = 0
    sat_calls: int = 0
    candidates: int = 0
    rejected: int = 0
    per_size: dict = field(default_factory=dict)


def _function_options(C, L):
    return [vb.morphisms(vb.power(C, s.dom), vb.power(C, s.cod)) if C.base is not Base.FINSET
            else [VMorphism(vb.power(C, s.dom), vb.power(C, s.cod), imgs)
                  for imgs in itertools.product(vb.power(C, s.cod).points, repeat=len(vb.power(C, s.dom)))]
            for s in L.functions]


def _table_orbit_min(C, L, funcs: dict, autos) -> bool:
    """True when ``funcs`` is the least relabelling of itself under ``autos``."""
    if not L.functions:
        return True
    probe = LStructure(L.__class__(L.base, L.functions, ()), C, funcs, {}, check=False)
    own = tuple(tuple(vb.power(C, s.cod).index[v] for v in funcs[s.name].images) for s in L.functions)
    return canonical_key(probe, autos) == own


def estimate(L, size_bound: int, allow_empty: bool, grid) -> int:
    total = 0
    for n in range(0 if allow_empty else 1, size_bound + 1):
        for C in vb.enumerate_carriers(L.base, n, grid):
            count = 1
            for s in L.functions:
                count *= len(vb.power(C, s.cod)) ** len(vb.power(C, s.dom))
            total += count
    return total


def find_models(T: S.Theory, size_bound: int, allow_empty: bool = False, opts: Options | None = None,
                budget: int | None = None, grid=(1, 2, vb.INF), stats: SearchStats | None = None
                ) -> Iterator[LStructure]:
    """Every model of ``T`` with at most ``size_bound`` points, one per isomorphism class.

    Order: by size, then carrier (enumeration order), then canonical key.
    """
    L = T.language
    opts = opts or Options()
    stats = stats if stats is not None else SearchStats()
    budget = search_budget(budget)
    if L.base is Base.FINAB:
        for A in enumerate_structures(L, size_bound, allow_empty, budget, grid):
            if is_model(A, T, opts):
                yield A
        return
    est = estimate(L, size_bound, allow_empty, grid)
    if est > budget:
        raise BudgetExceeded(est, budget, "function tables")
    for n in range(0 if allow_empty else 1, size_bound + 1):
        found = 0
        for C in vb.enumerate_carriers(L.base, n, grid):
            stats.carriers += 1
            models = {}
            autos = vb.automorphisms(C)
            for ftables in itertools.product(*_function_options(C, L)):
                funcs = {s.name: f for s, f in zip(L.functions, ftables)}
                if not _table_orbit_min(C, L, funcs, autos):
                    continue
                stats.function_tables += 1
                for A in _solve_relations(T, C, funcs, opts, stats):
                    key = canonical_key(A, autos)
                    if key in models:
                        continue
                    stats.candidates += 1
                    if not is_model(A, T, opts):
                        stats.rejected += 1
                        log.warning("grounded candidate rejected by the model checker: %r", A)
                        continue
                    models[key] = A
            for key in sorted(models):
                found += 1
                yield models[key]
        stats.per_size[n] = found


def _solve_relations(T, C, funcs, opts, stats) -> Iterator[LStructure]:
    L = T.language
    cnf = CNF()
    relvars = {r.name: {p: cnf.new() for p in vb.power(C, r.arity).points} for r in L.relations}
    placeholder = {r.name: Subobject(vb.power(C, r.arity), ()) for r in L.relations}
    frame = LStructure(L, C, funcs, placeholder, check=False)
    g = Grounder(frame, cnf, relvars, opts)
    for ax in T.axioms:
        if isinstance(ax, S.Sequent):
            g.sequent(ax)
        else:
            for _, seq in instances(ax, frame):
                g.sequent(seq)
        if cnf.unsat:
            return
    watched = [v for table in relvars.values() for v in table.values()]
    stats.sat_calls += 1
    with Solver(name="minisat22", bootstrap_with=cnf.clauses) as solver:
        while solver.solve():
            model = solver.get_model()
            true = {abs(x) for x in model if x > 0}
            rels = {}
            for r in L.relations:
                AX = vb.power(C, r.arity)
                rels[r.name] = Subobject(AX, [p for p, v in relvars[r.name].items() if v in true])
            yield LStructure(L, C, funcs, rels, check=False)
            if not watched:
                break
            solver.add_clause([-v if v in true else v for v in watched])


def count_models(T: S.Theory, size_bound: int, **kw) -> int:
    return sum(1 for _ in find_models(T, size_bound, **kw))
