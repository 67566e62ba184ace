import glob
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from elc import subobject as so
from elc import vbase as vb
from elc.classes import Fragment
from elc.dsl import load, load_text, parse_sequent
from elc.logic import syntax as S
from elc.logic.additive import rewrite_disjunction_additive
from elc.logic.schema import (FAILED, POINTWISE_ONLY, SATISFIED, check_axiom, check_sequent, instances, is_model,
                              model_report)
from elc.logic.semantics import (Options, SchemaTruncated, interpret, satisfies, satisfies_at,
                                 satisfies_limit_by_definition, satisfies_limit_by_pullback, satisfies_sequent,
                                 satisfies_sequent_pointwise, stabilize_disjunction)
from elc.signature import enumerate_structures
from elc.vbase import Base

from conftest import fixture
from helpers import random_structure

SETS = load_text("base finset\nlanguage { fun f : I -> I; rel R : I; rel E : I + I; }", "<sets>")


def sets_structure(seed, size=None):
    rng = random.Random(seed)
    n = rng.randint(0, 3) if size is None else size
    return random_structure(SETS.lang(), vb.finset(n), rng)


def theory(text, base="finset", lang="language { fun f : I -> I; rel R : I; rel E : I + I; }"):
    return load_text(f"base {base}\n{lang}\ntheory T {{ {text} }}", "<t>").only("theories")


def test_interpretation_of_atoms():
    A = sets_structure(1, 3)
    ctx = S.context(Base.FINSET, [("x", vb.unit(Base.FINSET))])
    R = SETS.lang().relation("R")
    phi = S.Rel(ctx, R, S.var(ctx, "x"))
    assert interpret(phi, A).points == A.relations["R"].points
    f = SETS.lang().function("f")
    fixed = S.Eq(ctx, S.apply(f, S.var(ctx, "x")), S.var(ctx, "x"))
    expect = {p for p, q in zip(vb.power(A.carrier, ctx.arity).points, A.functions["f"].images) if p == q}
    assert interpret(fixed, A).points == expect


def test_arity_mismatch_is_rejected():
    ctx = S.context(Base.FINSET, [("x", vb.unit(Base.FINSET))])
    E = SETS.lang().relation("E")
    with pytest.raises(S.ArityError):
        S.Rel(ctx, E, S.var(ctx, "x"))


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_membership_and_generalized_elements_agree(seed):
    A = sets_structure(seed)
    frag = Fragment(SETS.lang(), arity_bound=1)
    rng = random.Random(seed)
    formulas = list(frag.formulas(positive_existential=True))
    for phi in rng.sample(formulas, 20):
        s = interpret(phi, A)
        assert vb.in_m(s.m)
        for a in vb.morphisms(phi.ctx.arity, A.carrier):
            assert satisfies_at(A, phi, a) == (vb.transpose(a).images[0] in s.points)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_pointwise_and_global_satisfaction_coincide_over_sets(seed):
    A = sets_structure(seed)
    frag = Fragment(SETS.lang(), arity_bound=1)
    rng = random.Random(seed)
    ctx = frag.contexts()[1]
    pool = list(frag.positive_existential(ctx))
    for _ in range(20):
        seq = S.Sequent(ctx, rng.choice(pool), rng.choice(pool))
        assert satisfies_sequent(A, seq) == satisfies_sequent_pointwise(A, seq)


def test_pointwise_and_global_satisfaction_coincide_over_metric_spaces():
    """Points of A^X are exactly the maps X -> A here, so the two notions agree."""
    T = load_text(
        "base metric\nlanguage { rel R : I; }\n"
        "theory T { axiom close: forall p : metric {u, v | d(u, v) = 1} . R(p.v) |- R(p.u); }", "<m>")
    seq = T.only("theories").axioms[0]
    verdicts = set()
    for A in enumerate_structures(T.lang(), 3):
        verdict = check_sequent(A, seq)
        assert verdict != POINTWISE_ONLY
        assert (verdict == SATISFIED) == satisfies_sequent_pointwise(A, seq)
        verdicts.add(verdict)
    assert verdicts == {SATISFIED, FAILED}


def test_sequent_verdicts_include_failures():
    T = theory("axiom total: forall x . true |- R(x);")
    A = sets_structure(3, 2)
    rep = model_report(A, T)
    assert rep.ok == (len(A.relations["R"].points) == 2)
    assert all(v.verdict in (SATISFIED, POINTWISE_ONLY, FAILED) for v in rep.verdicts)


def test_top_and_bottom():
    A = sets_structure(5, 2)
    for n in range(3):
        ctx = S.context(Base.FINSET, [(f"x{k}", vb.unit(Base.FINSET)) for k in range(n)])
        AX = vb.power(A.carrier, ctx.arity)
        assert interpret(S.top(ctx), A) == so.top(AX)
        assert interpret(S.bottom(ctx), A) == so.bottom(AX)
        assert satisfies(A, S.top(ctx))


def test_empty_disjunction_and_empty_carrier():
    T = theory("axiom never: true |- false;")
    empty = sets_structure(0, 0)
    # over the empty context true and false are the two subobjects of I
    assert not is_model(empty, T)
    one = sets_structure(0, 1)
    assert not is_model(one, T)
    vacuous = theory("axiom never: forall x . true |- false;")
    assert is_model(empty, vacuous) and not is_model(one, vacuous)


def test_limit_sequent_routes_agree_on_posets():
    T = load(fixture("bridge", "successor_unique_poset.elth")).only("theories")
    seen = set()
    for A in enumerate_structures(T.language, 2):
        for ax in T.axioms:
            by_def = satisfies_limit_by_definition(A, ax)
            assert by_def == satisfies_limit_by_pullback(A, ax)
            seen.add(by_def)
    assert seen == {True, False}


def test_enriched_uniqueness_is_stronger_over_metric_spaces():
    """exists!! also asks the witness to depend nonexpansively on x; here it doubles a distance."""
    m = load_text(
        "base metric\nlanguage { rel D : I; rel E : I + I; }\n"
        "theory T { axiom witness: forall x . D(x) |- exists!! y . E(x, y); }\n"
        "structure A { carrier metric {a, b, p, q | d(a, b) = 1, d(p, q) = 2}; rel D = {a, b};"
        " rel E = {(a, p), (b, q)}; }", "<m>")
    A = m.only("structures")
    seq = m.only("theories").axioms[0]
    bang = S.Sequent(seq.ctx, seq.lhs, S.Unique(seq.ctx, seq.rhs.binders, seq.rhs.body, False))
    assert satisfies_sequent(A, bang)
    assert not satisfies_limit_by_definition(A, seq)
    assert not satisfies_limit_by_pullback(A, seq)


def test_schema_instances_decide_the_family():
    """The representative instances give the same verdict as a dense scan of parameters."""
    T = load(fixture("unique_midpoint.elth")).only("theories")
    schema = T.axioms[0]
    scan = [Fraction(k, 8) for k in range(1, 41)]
    for path in sorted(glob.glob(fixture("midpoint", "*.elstruct"))):
        A = load(path).only("structures")
        by_instances = check_axiom(A, schema).ok
        dense = all(satisfies_sequent(A, seq) for seq in (schema.instance(v) for v in scan) if seq is not None)
        assert by_instances == dense, path


def test_stabilization_and_truncation():
    T = load(fixture("standard_metric.elth")).only("theories")
    A = load(fixture("standard", "s03_far.elstruct")).only("structures")
    ax = T.axioms[0]
    orschema = ax.rhs
    short = stabilize_disjunction(A, orschema, max_n=10)
    assert not short.exact and short.bound == 71
    with pytest.raises(SchemaTruncated):
        satisfies_sequent(A, ax, Options(max_n=10))
    full = stabilize_disjunction(A, orschema, max_n=100)
    assert full.exact and full.n_stab == 70
    assert satisfies_sequent(A, ax, Options(max_n=100))


def test_additive_rewrite_needs_groups():
    ctx = S.context(Base.FINSET, [("x", vb.unit(Base.FINSET))])
    phi = S.Or(ctx, (S.top(ctx), S.top(ctx)))
    with pytest.raises(vb.BaseError):
        rewrite_disjunction_additive(phi, SETS.lang())


def test_sequent_sides_must_share_context():
    one = S.context(Base.FINSET, [("x", vb.unit(Base.FINSET))])
    two = S.context(Base.FINSET, [("x", vb.unit(Base.FINSET)), ("y", vb.unit(Base.FINSET))])
    with pytest.raises(S.ArityError):
        S.Sequent(one, S.top(one), S.top(two))


def test_unique_needs_conjunctions_of_atoms():
    with pytest.raises(Exception):
        theory("axiom bad: forall x . R(x) \\/ R(f(x)) |- exists!! y . R(y);")
