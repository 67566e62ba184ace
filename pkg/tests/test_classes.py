import glob
import random

import pytest

from elc import vbase as vb
from elc.classes import (BridgeError, Fragment, checks_for_sequent, cone_from_sequent, is_cone_injective,
                         is_orthogonal, is_pe_stable, is_pure_quotient, orth_morphism_from_limit_sequent, paired_check,
                         present_structure, run_bridge, sequent_from_cone)
from elc.dsl import load, load_text
from elc.logic import syntax as S
from elc.logic.semantics import interpret, satisfies_sequent
from elc.signature import Cone, StructureMorphism, enumerate_structures, hom_morphisms, pushout_structures

from conftest import fixture


def extends(leg, h, K):
    """Structure morphisms g out of the leg's codomain with g . leg = h."""
    return [g for g in hom_morphisms(leg.cod, K) if vb.compose(g, leg.h) == h]


def injective_by_search(K, cone):
    return all(any(extends(g, h, K) for g in cone.legs) for h in hom_morphisms(cone.apex, K))


def orthogonal_by_search(K, g):
    return all(len(extends(g, h, K)) == 1 for h in hom_morphisms(g.dom, K))


def relational_theories():
    out = []
    for path in sorted(glob.glob(fixture("bridge", "*.elth"))):
        m = load(path)
        for T in m.theories.values():
            out.append((path, T))
    return out


def test_presented_structure_represents_the_formula():
    """Maps out of the presented structure are the points satisfying the formula."""
    T = load(fixture("bridge", "successor_poset.elth")).only("theories")
    L = T.language
    seq = T.axioms[0]
    body = seq.rhs.body
    A, e = present_structure(body, L)
    assert vb.in_e(e)
    for K in enumerate_structures(L, 2):
        sat = interpret(body, K).points
        via_maps = {tuple(vb.compose(h, e).images) for h in hom_morphisms(A, K)}
        assert {tuple(p) for p in sat} == via_maps


def test_presentation_rejects_disjunctions():
    T = load(fixture("bridge", "r_or_s.elth")).only("theories")
    with pytest.raises(BridgeError):
        present_structure(T.axioms[0].rhs, T.language)


@pytest.mark.parametrize("path, T", relational_theories(), ids=lambda v: v if isinstance(v, str) else v.name)
def test_constructed_classes_match_hom_search(path, T):
    """Cone injectivity and orthogonality checked against an explicit search for extensions."""
    L = T.language
    for seq in T.axioms:
        if seq.kind == S.BASIC:
            cone = cone_from_sequent(seq, L)
            for K in enumerate_structures(L, 2, allow_empty=True):
                assert is_cone_injective(K, cone) == injective_by_search(K, cone)
        elif seq.kind == S.LIMIT:
            g = orth_morphism_from_limit_sequent(seq, L)
            for K in enumerate_structures(L, 2, allow_empty=True):
                assert is_orthogonal(K, g) == orthogonal_by_search(K, g)


def test_pushout_commutes_and_glues_relations():
    m = load_text(
        "base finset\nlanguage { rel R : I; rel S : I; }\n"
        "structure A { carrier finset {a}; }\n"
        "structure B { carrier finset {a, b}; rel R = {a}; }\n"
        "structure C { carrier finset {a, c}; rel S = {a, c}; }", "<p>")
    A, B, C = (m.structures[n] for n in "ABC")
    f = StructureMorphism(A, B, vb.VMorphism(A.carrier, B.carrier, ["a"]))
    g = StructureMorphism(A, C, vb.VMorphism(A.carrier, C.carrier, ["a"]))
    P, q1, q2 = pushout_structures(f, g)
    assert len(P.carrier) == 3
    assert f.then(q1).h == g.then(q2).h
    glued = q1.h("a")
    assert (glued,) in P.relations["R"].points and (glued,) in P.relations["S"].points
    assert len(P.relations["S"].points) == 2


def test_cone_and_sequent_round_trip_on_rn():
    m = load(fixture("bridge", "rn_cone.elcone"))
    cone = m.cones["Rn"]
    seq = sequent_from_cone(cone)
    assert seq.kind == S.BASIC
    assert len(seq.rhs.parts) == 3
    report = run_bridge([c for c in checks_for_sequent(_named(seq), m.lang())], m.lang(), 2)
    assert report.ok


def _named(seq):
    return S.Sequent(seq.ctx, seq.lhs, seq.rhs, name="rn")


def test_corrupted_cone_is_caught():
    m = load(fixture("bridge", "corrupted_cone.elcone"))
    check = paired_check(m.only("theories"), [m.cones["Wrong"]], [])
    report = run_bridge([check], m.lang(), 2)
    assert not report.ok
    assert set(report.witnesses) == {i.structure for i in report.disagreements}
    # a structure with an R-point but no S-point satisfies the theory and fails the cone
    assert any(w["relations"]["R"] and not w["relations"]["S"] for w in report.witnesses.values())


def test_bridges_need_relational_languages_and_no_groups():
    fun = load_text("base finset\nlanguage { fun f : I -> I; rel R : I; }\n"
                    "theory T { axiom a: forall x . R(x) |- R(f(x)); }", "<f>").only("theories")
    with pytest.raises(BridgeError):
        cone_from_sequent(fun.axioms[0], fun.language)
    grp = load_text("base abgroup\nlanguage { rel R : I; }\n"
                    "theory T { axiom a: forall x . R(x) |- R(x); }", "<g>").only("theories")
    with pytest.raises(BridgeError):
        cone_from_sequent(grp.axioms[0], grp.language)


def test_exists_bang_sequents_have_no_class_side():
    T = load_text("base finset\nlanguage { rel E : I + I; }\n"
                  "theory T { axiom a: forall x . true |- exists! y . E(x, y); }", "<u>").only("theories")
    with pytest.raises(BridgeError):
        checks_for_sequent(T.axioms[0], T.language)


def test_fragment_formulas_are_well_formed():
    L = load_text("base finset\nlanguage { fun f : I -> I; rel R : I; }", "<l>").lang()
    frag = Fragment(L, arity_bound=1)
    assert [len(c.names) for c in frag.contexts()] == [0, 1]
    ctx = frag.contexts()[1]
    pp = frag.positive_primitive(ctx)
    assert pp and all(S.is_positive_primitive(phi) for phi in pp)
    assert len({repr(phi) for phi in pp}) == len(pp)
    pe = list(frag.positive_existential(ctx))
    assert len(pe) > len(pp)


def _maps(L, bound):
    structures = list(enumerate_structures(L, bound, allow_empty=True))
    for K in structures:
        for M in structures:
            for h in hom_morphisms(K, M):
                yield StructureMorphism(K, M, h)


def test_orthogonal_implies_injective_for_single_legs():
    for path, T in relational_theories():
        for seq in T.axioms:
            if seq.kind != S.LIMIT:
                continue
            g = orth_morphism_from_limit_sequent(seq, T.language)
            cone = Cone(g.dom, (g,))
            for K in enumerate_structures(T.language, 2, allow_empty=True):
                if is_orthogonal(K, g):
                    assert is_cone_injective(K, cone), path
    # an isomorphism leg is always injective
    A = load(fixture("bridge", "rn_cone.elcone")).structures["A1"]
    iso = Cone(A, (StructureMorphism(A, A, vb.identity(A.carrier)),))
    for K in enumerate_structures(A.language, 2):
        assert is_cone_injective(K, iso)


def test_pe_stable_maps_reflect_positive_existential_sequents():
    L = load_text("base finset\nlanguage { rel R : I; rel E : I + I; }", "<l>").lang()
    frag = Fragment(L, arity_bound=1, conjunct_bound=2, disjunct_bound=2, depth=1)
    ctx = frag.contexts()[1]
    pool = list(frag.positive_existential(ctx))
    rng = random.Random(11)
    sequents = [S.Sequent(ctx, rng.choice(pool), rng.choice(pool)) for _ in range(40)]
    stable = 0
    for f in _maps(L, 2):
        if not is_pe_stable(f, frag):
            continue
        stable += 1
        for s in sequents:
            if satisfies_sequent(f.cod, s):
                assert satisfies_sequent(f.dom, s)
    assert stable > 0


def test_cone_classes_are_closed_under_pure_quotients():
    for path, T in relational_theories():
        L = T.language
        cones = [cone_from_sequent(seq, L) for seq in T.axioms if seq.kind == S.BASIC]
        if not cones:
            continue
        probes = list(enumerate_structures(L, 2, allow_empty=True))
        proper = 0
        for f in _maps(L, 2):
            if not vb.in_e(f.h) or not is_pure_quotient(f, probes):
                continue
            proper += not vb.is_iso(f.h)
            for cone in cones:
                if is_cone_injective(f.dom, cone):
                    assert is_cone_injective(f.cod, cone), path
        assert proper > 0, path
