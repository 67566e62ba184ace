import pytest

from elc.dsl import load, load_text
from elc.logic.schema import is_model
from elc.search import SearchStats, count_models, find_models
from elc.signature import BudgetExceeded, canonical_key, enumerate_structures

from conftest import fixture
from oracles.category_enum import object_superset_classes
from test_acceptance import _category_form

THEORIES = {
    "sets_function_fixed": ("finset", "fun f : I -> I; rel R : I;",
                            "axiom fix: forall x . R(x) |- f(x) = x;"),
    "sets_symmetric": ("finset", "rel E : I + I;", "axiom sym: forall x, y . E(x, y) |- E(y, x);"),
    "poset_upward": ("poset", "rel R : I;",
                     "axiom up: forall p : poset {a, b | a < b} . R(p.a) |- R(p.b);"),
    "metric_isolated": ("metric", "rel R : I;",
                        "axiom near: forall p : metric {a, b | d(a, b) = 1} . R(p.a) |- R(p.b);"),
    "sets_exists": ("finset", "fun f : I -> I; rel R : I;",
                    "axiom hit: forall x . true |- exists y . R(y) /\\ f(y) = x;"),
}


def iso_key(A):
    # canonical_key is only meaningful among structures on one carrier
    C = A.carrier
    return len(C.points), repr(C.structure_key), canonical_key(A)


def _theory(base, lang, body):
    return load_text(f"base {base}\nlanguage {{ {lang} }}\ntheory T {{ {body} }}", "<t>").only("theories")


@pytest.mark.parametrize("name", sorted(THEORIES))
def test_search_matches_filtered_enumeration(name):
    T = _theory(*THEORIES[name])
    found = [iso_key(A) for A in find_models(T, 2)]
    expect = [iso_key(A) for A in enumerate_structures(T.language, 2) if is_model(A, T)]
    assert len(found) == len(set(found))
    assert sorted(found) == sorted(expect)


@pytest.mark.parametrize("base, plain, with_empty", [("finset", 2, 3), ("poset", 3, 4)])
def test_empty_theory_over_empty_language(base, plain, with_empty):
    T = load_text(f"base {base}\ntheory T {{ }}", "<t>").only("theories")
    assert count_models(T, 2) == plain
    assert count_models(T, 2, allow_empty=True) == with_empty


def test_inconsistent_theory_has_no_inhabited_models():
    T = load_text("base finset\ntheory T { axiom never: true |- false; }", "<t>").only("theories")
    assert count_models(T, 3) == 0
    assert count_models(T, 3, allow_empty=True) == 0
    vacuous = load_text("base finset\ntheory T { axiom never: forall x . true |- false; }", "<t>").only("theories")
    assert count_models(vacuous, 3) == 0
    assert count_models(vacuous, 3, allow_empty=True) == 1


def test_five_axiom_theory_counts_categories_with_extra_objects():
    T = load(fixture("internal_category_five_axioms.elth")).only("theories")
    stats = SearchStats()
    forms = [_category_form(A) for A in find_models(T, 3, stats=stats)]
    oracle = object_superset_classes(3)
    assert len(forms) == len(set(forms)) == len(oracle) == 38
    assert set(forms) == oracle
    assert stats.rejected == 0
    assert sum(stats.per_size.values()) == 38


def test_search_order_is_deterministic():
    T = _theory(*THEORIES["sets_symmetric"])
    first = [iso_key(A) for A in find_models(T, 3)]
    again = [iso_key(A) for A in find_models(T, 3)]
    assert first == again
    sizes = [len(A.carrier.points) for A in find_models(T, 3)]
    assert sizes == sorted(sizes)


def test_budget_is_enforced_before_search(monkeypatch):
    T = load(fixture("internal_category.elth")).only("theories")
    with pytest.raises(BudgetExceeded) as info:
        next(find_models(T, 3, budget=10))
    assert info.value.estimate > 10
    monkeypatch.setenv("ELC_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        next(find_models(T, 3))
