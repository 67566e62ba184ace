"""Acceptance criteria 1-12.

Each test carries a ``criterion`` marker; the conftest prints one PASS/FAIL
line per criterion at the end of the run.  Oracles live in ``tests/oracles``
and ``tests/helpers.py`` and do not call into the code under test.
"""
import itertools
import json
import os
import random
import subprocess
import sys
import time

import pytest

from elc import vbase as vb
from elc import subobject as so
from elc.classes import Fragment, checks_for_sequent, cone_injectivity, run_bridge
from elc.cli import main as cli_main
from elc.dsl import load, load_text
from elc.logic import syntax as S
from elc.logic.additive import rewrite_disjunction_additive, with_sum, with_sum_interpretation
from elc.logic.schema import instances, is_model
from elc.logic.semantics import (Options, interpret, satisfies_bang_sequent, satisfies_limit_by_definition,
                                 satisfies_limit_by_pullback, satisfies_sequent)
from elc.search import find_models
from elc.signature import enumerate_structures, power_structure, swap_subobject
from elc.vbase import Base

from conftest import FIXTURES, ROOT, fixture
from helpers import BASES, all_finite, midpoint_oracle, random_morphism, random_object, random_structure
from oracles.category_enum import canonical_form, category_classes

UNARY = "language { fun f : I -> I; rel R : I; }"


def unary_language(base: str):
    return load_text(f"base {base}\n{UNARY}", "<unary>").lang()


# ---------------------------------------------------------------------------
# 1


@pytest.mark.criterion(1, "factorization exactness")
@pytest.mark.parametrize("base", BASES, ids=lambda b: b.value)
def test_factorization_exactness(base):
    start = time.perf_counter()
    rng = random.Random(1000 + BASES.index(base))
    pool = [random_object(base, rng) for _ in range(10)]
    pool = [X for X in pool if X.points] + [random_object(base, rng, 1)]
    checked = 0
    while checked < 500:
        X, A = rng.choice(pool), rng.choice(pool)
        f = random_morphism(X, A, rng)
        if f is None:
            continue
        e, m = vb.factorize(f)
        assert vb.compose(m, e) == f
        assert vb.in_e(e) and vb.in_m(m)
        checked += 1

    squares = 0
    while squares < 200:
        f = random_morphism(rng.choice(pool), rng.choice(pool), rng)
        g = random_morphism(rng.choice(pool), rng.choice(pool), rng)
        if f is None or g is None:
            continue
        e, _ = vb.factorize(f)
        _, m = vb.factorize(g)
        d = random_morphism(e.cod, m.dom, rng)
        if d is None:
            continue
        u, v = vb.compose(d, e), vb.compose(m, d)
        filled = vb.diagonal_fill(e, m, u, v)
        # brute force: every morphism cod(e) -> dom(m) making both triangles commute
        fills = [k for k in vb.morphisms(e.cod, m.dom) if vb.compose(k, e) == u and vb.compose(m, k) == v]
        assert fills == [filled]
        squares += 1
    assert time.perf_counter() - start < 10


# ---------------------------------------------------------------------------
# 2


def _by_mask(formulas, A):
    reps = {}
    for phi in formulas:
        reps.setdefault(interpret(phi, A).points, phi)
    return list(reps.values())


@pytest.mark.criterion(2, "interpretation soundness on the bounded fragment")
def test_interpretation_soundness():
    start = time.perf_counter()
    L = unary_language("finset")
    frag = Fragment(L, arity_bound=2, conjunct_bound=2, disjunct_bound=2, depth=1)
    structures = list(enumerate_structures(L, 2, allow_empty=True))
    assert len(structures) > 5
    exceptions = []
    for A in structures:
        for ctx in frag.contexts():
            AX = vb.power(A.carrier, ctx.arity)
            top, bottom = S.top(ctx), S.bottom(ctx)
            assert interpret(top, A) == so.top(AX)
            assert interpret(bottom, A) == so.bottom(AX)
            pe = list(frag.positive_existential(ctx))
            for phi in pe:
                s = interpret(phi, A)
                if not vb.in_m(s.m):
                    exceptions.append(("not in M", A, phi))
                if not satisfies_sequent(A, S.Sequent(ctx, phi, top)):
                    exceptions.append(("phi |- top", A, phi))
                if not satisfies_sequent(A, S.Sequent(ctx, bottom, phi)):
                    exceptions.append(("bottom |- phi", A, phi))
            reps = _by_mask(pe, A)
            for phi in reps:
                for k in range(0, 3):
                    for psis in itertools.combinations_with_replacement(reps, k):
                        lhs = S.Or(ctx, tuple(psis))
                        joint = satisfies_sequent(A, S.Sequent(ctx, lhs, phi))
                        each = all(satisfies_sequent(A, S.Sequent(ctx, p, phi)) for p in psis)
                        if joint != each:
                            exceptions.append(("adjunction", A, lhs, phi))
    assert exceptions == []
    assert time.perf_counter() - start < 60


# ---------------------------------------------------------------------------
# 3


def _category_form(A):
    """Model of the internal-category theory as the oracle's (src, tgt, ids, comp) tables."""
    n = len(A.carrier.points)
    idx = {p: k for k, p in enumerate(A.carrier.points)}
    # points of A^I are 1-tuples listed in carrier order
    src = {k: idx[v[0]] for k, v in enumerate(A.functions["s"].images)}
    tgt = {k: idx[v[0]] for k, v in enumerate(A.functions["t"].images)}
    ids = frozenset(idx[p[0]] for p in A.relations["Obj"].points)
    comp = {(idx[x], idx[y]): idx[z] for x, y, z in A.relations["Comp"].points}
    return n, canonical_form(n, src, tgt, ids, comp)


@pytest.mark.criterion(3, "internal categories match the brute-force category count")
def test_internal_categories(capsys):
    start = time.perf_counter()
    code = cli_main(["models", "--theory", fixture("internal_category.elth"), "--max-size", "3", "--json"])
    report = json.loads(capsys.readouterr().out)
    oracle = category_classes(3)
    assert code == 0
    assert report["result"]["count"] == len(oracle) == 15
    T = load(fixture("internal_category.elth")).only("theories")
    forms = [_category_form(A) for A in find_models(T, 3)]
    assert len(forms) == len(set(forms))
    assert set(forms) == oracle
    assert time.perf_counter() - start < 300


# ---------------------------------------------------------------------------
# 4


@pytest.mark.criterion(4, "metric standardness against a distance scan")
def test_metric_standardness():
    start = time.perf_counter()
    T = load(fixture("standard_metric.elth")).only("theories")
    files = sorted((FIXTURES / "standard").glob("*.elstruct"))
    verdicts = set()
    for path in files:
        A = load(str(path)).only("structures")
        opts = Options(max_n=128)
        verdict = is_model(A, T, opts)
        assert opts.schema_log and all(st.exact for _, _, st in opts.schema_log)
        assert verdict == all_finite(A.carrier), path.name
        verdicts.add(verdict)
    assert verdicts == {True, False}
    assert time.perf_counter() - start < 1


# ---------------------------------------------------------------------------
# 5


@pytest.mark.criterion(5, "unique midpoints against brute force; both limit routes agree")
def test_unique_midpoint():
    start = time.perf_counter()
    T = load(fixture("unique_midpoint.elth")).only("theories")
    files = sorted((FIXTURES / "midpoint").glob("*.elstruct"))
    assert len(files) == 10
    verdicts = []
    routes = 0
    for path in files:
        A = load(str(path)).only("structures")
        assert is_model(A, T) == midpoint_oracle(A.carrier), path.name
        verdicts.append(midpoint_oracle(A.carrier))
        for ax in T.axioms:
            for _, seq in instances(ax, A):
                assert satisfies_limit_by_definition(A, seq) == satisfies_limit_by_pullback(A, seq)
                routes += 1
    assert True in verdicts and False in verdicts
    assert routes >= 10
    assert time.perf_counter() - start < 10


# ---------------------------------------------------------------------------
# 6 and 7

BASIC_BRIDGES = ["exists_r", "r_or_s", "symmetric", "antisymmetric", "successor_poset", "neighbours_metric"]
LIMIT_BRIDGES = ["unique_r", "functional", "successor_unique_poset"]


def _bridge(name, kind):
    m = load(fixture("bridge", name + ".elth"))
    T = m.only("theories")
    checks = []
    for ax in T.axioms:
        assert ax.kind == kind
        checks.extend(checks_for_sequent(ax, T.language))
    report = run_bridge(checks, T.language, 3)
    seen = {(i.sequent_verdict) for i in report.instances}
    return report, seen


@pytest.mark.criterion(6, "cone-injectivity bridge, carriers <= 3")
@pytest.mark.parametrize("name", BASIC_BRIDGES)
def test_bridge_injectivity(name):
    report, seen = _bridge(name, S.BASIC)
    assert report.disagreements == []
    assert seen == {True, False}
    assert any("sequent_from_cone" in c for c in report.checks)


@pytest.mark.criterion(7, "orthogonality bridge, carriers <= 3")
@pytest.mark.parametrize("name", LIMIT_BRIDGES)
def test_bridge_orthogonality(name):
    report, seen = _bridge(name, S.LIMIT)
    assert report.disagreements == []
    assert seen == {True, False}


# ---------------------------------------------------------------------------
# 8


def _limit_sequents():
    out = []
    for name in LIMIT_BRIDGES:
        T = load(fixture("bridge", name + ".elth")).only("theories")
        out.extend((T.language, ax) for ax in T.axioms)
    T = load(fixture("internal_category.elth")).only("theories")
    out.extend((T.language, ax) for ax in T.axioms if isinstance(ax, S.Sequent) and ax.kind == S.LIMIT)
    return out


def _random_limit_sequent(L, rng):
    frag = Fragment(L, arity_bound=1, conjunct_bound=2)
    ctx = rng.choice(frag.contexts())
    I = vb.unit(L.base)
    binders = (("y", I),)
    inner = ctx.extend(binders)
    lhs = rng.choice(frag.conjunctions(ctx))
    body = rng.choice([c for c in frag.conjunctions(inner) if c != S.top(inner)])
    return S.Sequent(ctx, lhs, S.Unique(ctx, binders, body, True), "random")


@pytest.mark.criterion(8, "exists!! implies exists!, and they coincide over finite sets")
def test_unique_existence_variants():
    start = time.perf_counter()
    implications = 0
    for L, seq in _limit_sequents():
        # the internal-category language has too many structures on 3 points to list
        bound = 3 if L.is_relational and L.base is Base.FINSET else 2
        for A in enumerate_structures(L, bound):
            if satisfies_sequent(A, seq):
                assert satisfies_bang_sequent(A, seq)
                implications += 1
    # the midpoint instances live over metric spaces, where the converse can fail
    T = load(fixture("unique_midpoint.elth")).only("theories")
    for path in sorted((FIXTURES / "midpoint").glob("*.elstruct")):
        A = load(str(path)).only("structures")
        for ax in T.axioms:
            for _, seq in instances(ax, A):
                if satisfies_sequent(A, seq):
                    assert satisfies_bang_sequent(A, seq)
                    implications += 1
    assert implications > 0

    rng = random.Random(8)
    L = unary_language("finset")
    both = set()
    for _ in range(100):
        seq = _random_limit_sequent(L, rng)
        A = random_structure(L, vb.finset(rng.randint(0, 3)), rng)
        limit, bang = satisfies_sequent(A, seq), satisfies_bang_sequent(A, seq)
        assert limit == bang, seq
        both.add(limit)
    assert both == {True, False}
    assert time.perf_counter() - start < 60


# ---------------------------------------------------------------------------
# 9


def _commutes(A, X, formulas):
    P = power_structure(A, X)
    for phi in formulas:
        direct = interpret(phi, P)
        lifted = swap_subobject(interpret(phi, A), A.carrier, phi.ctx.arity, X)
        if direct != lifted:
            return phi
    return None


@pytest.mark.criterion(9, "interpretation commutes with powers by stable connected objects")
@pytest.mark.parametrize("base", BASES, ids=lambda b: b.value)
def test_power_commutation(base):
    start = time.perf_counter()
    L = unary_language({Base.FINSET: "finset", Base.FINPOS: "poset", Base.FINMET: "metric",
                        Base.FINAB: "abgroup"}[base])
    frag = Fragment(L, arity_bound=1, conjunct_bound=2, depth=1)
    formulas = list(frag.formulas(positive_existential=False))
    exponents = [vb.unit(base)]
    if base is Base.FINSET:
        exponents += [vb.finset(1), vb.finset(2)]
    size = 2 if base is not Base.FINAB else 4
    count = 0
    for A in enumerate_structures(L, size):
        for X in exponents:
            assert _commutes(A, X, formulas) is None, (A, X)
            count += 1
    assert count > 0
    assert time.perf_counter() - start < 60


# ---------------------------------------------------------------------------
# 10


@pytest.mark.criterion(10, "additive rewrite of disjunctions over abelian groups")
def test_additive_rewrite():
    start = time.perf_counter()
    rng = random.Random(10)
    L = load_text("base abgroup\nlanguage { fun f : I -> I; rel R : I; rel S : I; }", "<ab>").lang()
    groups = [G for n in range(1, 9) for G in vb.enumerate_carriers(Base.FINAB, n)]
    frag = Fragment(L, arity_bound=2, conjunct_bound=2, depth=1)
    pools = {len(ctx): list(frag.positive_primitive(ctx)) for ctx in frag.contexts() if len(ctx)}
    done = 0
    while done < 50:
        G = rng.choice(groups)
        A = random_structure(L, G, rng)
        # the rewritten formula over I + I lives in A^(I^6); keep that to small groups
        n = rng.choice([1, 2] if len(G.points) <= 4 else [1])
        phi, psi = rng.choice(pools[n]), rng.choice(pools[n])
        disj = S.Or(phi.ctx, (phi, psi))
        L2 = with_sum(L, phi.ctx.arity)
        A2 = with_sum_interpretation(A, L2)
        rewritten = rewrite_disjunction_additive(disj, L2)
        assert S.is_positive_primitive(rewritten)
        assert interpret(disj, A).points == interpret(rewritten, A2).points
        done += 1
    assert time.perf_counter() - start < 60


# ---------------------------------------------------------------------------
# 11


@pytest.mark.criterion(11, "R_n injectivity class equals its pointwise description")
def test_rn_class():
    start = time.perf_counter()
    m = load(fixture("bridge", "rn_cone.elcone"))
    cone = m.only("cones")
    L = m.lang()
    count = 0
    both = set()
    for K in enumerate_structures(L, 3, distance_grid=(1, 2, vb.INF)):
        described = all(any((a,) in K.relations[f"R{n}"].points for n in (1, 2, 3)) for a in K.carrier.points)
        assert cone_injectivity(K, cone).verdict == described
        both.add(described)
        count += 1
    assert count > 1000 and both == {True, False}
    assert time.perf_counter() - start < 60


# ---------------------------------------------------------------------------
# 12

COMMANDS = [
    ["check", "--theory", "fixtures/internal_category.elth", "--structure", "fixtures/one_morphism.elstruct",
     "--explain"],
    ["check", "--theory", "fixtures/unique_midpoint.elth", "--structure", "fixtures/midpoint/m04_half_path.elstruct"],
    ["check", "--theory", "fixtures/standard_metric.elth", "--structure", "fixtures/standard/s03_far.elstruct"],
    ["models", "--theory", "fixtures/internal_category.elth", "--max-size", "2"],
    ["models", "--theory", "fixtures/bridge/neighbours_metric.elth", "--max-size", "2", "--allow-empty"],
    ["inject", "--cone", "fixtures/bridge/rn_cone.elcone", "--structure", "fixtures/bridge/rn_cone.elcone#A2"],
    ["orth", "--theory", "fixtures/bridge/unique_r.elth", "--axiom", "unique", "--structure",
     "fixtures/bridge/rn_cone.elcone#One"],
    ["bridge", "fixtures/bridge/exists_r.elth", "--max-size", "2"],
    ["bridge", "fixtures/bridge/corrupted_cone.elcone", "--max-size", "2"],
    ["check", "--theory", "fixtures/missing.elth", "--structure", "fixtures/one_morphism.elstruct"],
]


def _run(args, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    env.pop("ELC_BUDGET", None)
    proc = subprocess.run([sys.executable, "-m", "elc.cli", *args, "--json"], cwd=ROOT, env=env,
                          capture_output=True)
    return proc.returncode, proc.stdout


@pytest.mark.criterion(12, "byte-identical --json output across runs")
@pytest.mark.parametrize("args", COMMANDS, ids=lambda a: "-".join(x.rsplit("/", 1)[-1] for x in a[:2]))
def test_cli_determinism(args):
    code1, out1 = _run(args, 1)
    code2, out2 = _run(args, 2)
    assert out1 and out1 == out2
    assert code1 == code2
    assert json.loads(out1)["exit_code"] == code1
