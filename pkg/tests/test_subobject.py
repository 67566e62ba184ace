import random

import pytest
from hypothesis import given, settings, strategies as st

from elc import subobject as so
from elc import vbase as vb
from elc.vbase import Base

from helpers import BASES, random_morphism, random_object


def random_sub(A, rng):
    subs = so.all_subobjects(A)
    return rng.choice(subs)


@given(st.sampled_from(BASES), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_lattice_operations_agree_with_their_second_construction(base, seed):
    rng = random.Random(seed)
    A = random_object(base, rng, 3)
    s, t = random_sub(A, rng), random_sub(A, rng)
    assert so.intersect([s, t]) == so.meet_pointwise([s, t])
    assert so.join([s, t]) == so.join_via_coproduct([s, t])
    assert s <= so.join([s, t]) and so.meet_pointwise([s, t]) <= s
    assert so.join([], A) == so.bottom(A) == so.join_via_coproduct([], A)
    assert vb.in_m(s.m) and s.m.cod == A


@given(st.sampled_from(BASES), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_pullback_routes_agree(base, seed):
    rng = random.Random(seed)
    A, B = random_object(base, rng, 3), random_object(base, rng, 3)
    f = random_morphism(A, B, rng)
    if f is None:
        return
    s = random_sub(B, rng)
    assert so.pull_back(s, f) == so.pull_back_via_square(s, f)
    assert so.pull_back(so.top(B), f) == so.top(A)


def test_leq_witness_factorizes():
    A = vb.finset(4)
    s, t = so.Subobject(A, [1]), so.Subobject(A, [1, 2])
    k = so.leq(s, t, witness=True)
    assert vb.compose(t.m, k) == s.m
    assert so.leq(t, s, witness=True) is None


def test_group_subobjects_are_subgroups():
    G = vb.abgroup(4)
    assert [sorted(s.points) for s in so.all_subobjects(G)] == [[0], [0, 2], [0, 1, 2, 3]]
    with pytest.raises(ValueError):
        so.Subobject(G, [0, 1])
    assert so.join([so.Subobject(G, [0, 2]), so.Subobject(G, [0])]).points == {0, 2}


def test_power_subobject_over_a_set():
    A = vb.finset(2)
    I = vb.unit(Base.FINSET)
    s = so.Subobject(vb.power(A, I), [(1,)])
    lifted = so.power_subobject(s, A, I, vb.finset(2))
    # pairs of points of A^I that both lie in s: only the constant one
    assert len(lifted.points) == 1


def test_subobject_iso_tests_agree():
    A = vb.poset("abc", [("a", "b")])
    for s in so.all_subobjects(A):
        assert so.is_iso(s) == so.is_iso_morphism(s)
