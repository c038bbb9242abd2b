import itertools
from math import comb

import pytest
from hypothesis import given, strategies as st

from minorkit import library
from minorkit.duality import alter_ego_dl, dualize, preserves_structure
from minorkit.dualspace import (
    Const,
    DualMorphism,
    MinorSequence,
    MorphismClass,
    Pt,
    canonical_class,
    class_le,
    classes_of_arity,
    co_essential_arity,
    copower,
    copower_morphisms,
    deck,
    enumerate_morphisms,
    extend_split,
    identification_minor,
    invariance_group_dual,
    is_co_minor,
    maximal_classes,
    minor_sequence,
    principal_ideal,
    termwise_identity,
    tilde_classes,
    weak_reconstruct_check,
)
from minorkit.errors import (
    ArityTooSmallError,
    CapExceededError,
    EmptySplitError,
    LimitExceededError,
    ParseError,
    PreconditionError,
)
from minorkit.oracle import census, minor_poset_bruteforce
from minorkit.posets import dual, partition_lattice, poset_iso

from conftest import boolean_dual, boolean_lattice_dual, median_dual


def test_copower_sizes(fig1_dual):
    assert copower(boolean_dual(2), 3).size == 6
    C = copower(fig1_dual, 2)
    assert C.size == 8
    labels = C.point_labels
    assert labels[:2] == (Const(0), Const(1))
    assert labels[2:] == tuple(Pt(i, x) for i in range(2) for x in (1, 2, 3))
    le = C.relation_sets["le"]
    # order inside each copy and through the bounds, never across copies
    assert (labels.index(Pt(0, 1)), labels.index(Pt(0, 3))) in le
    assert (labels.index(Pt(0, 1)), labels.index(Pt(1, 3))) not in le
    assert all((0, p) in le and (p, 1) in le for p in range(8))


def test_copower_of_one_is_the_space(fig1_dual, mv_dual):
    for X in (fig1_dual, mv_dual, median_dual(2)):
        C = copower(X, 1)
        to_x = [X.constant_point[p.value] if isinstance(p, Const) else p.point for p in C.point_labels]
        back = [to_x.index(x) for x in range(X.size)]
        assert preserves_structure(C, X, to_x) and preserves_structure(X, C, back)


@given(st.integers(1, 3).flatmap(lambda n: st.integers(1, 3).flatmap(
    lambda m: st.tuples(st.just(m), st.lists(st.integers(0, m - 1), min_size=n, max_size=n)))))
def test_termwise_identity_is_a_morphism(mt):
    m, tau = mt
    for X in (boolean_dual(2), boolean_lattice_dual(2), median_dual(2)):
        t = termwise_identity(tau, X, m)
        assert t.is_morphism()


def test_termwise_identity_examples(fig1_dual):
    ident = termwise_identity((0, 1), fig1_dual)
    assert ident.map == tuple(range(8))
    merge = termwise_identity((0, 0), fig1_dual)
    assert [merge.target.point_labels[i] for i in merge.map[2:]] == [Pt(0, x) for x in (1, 2, 3)] * 2
    embed = termwise_identity((1,), fig1_dual, 2)
    assert [embed.target.point_labels[i] for i in embed.map] == [Const(0), Const(1), Pt(1, 1), Pt(1, 2), Pt(1, 3)]


def test_direct_union_rule_matches_materialized_copower(fig1_dual):
    X = Y = fig1_dual
    C = copower(X, 2)
    for flat in itertools.product(range(C.size), repeat=Y.size):
        phi = DualMorphism.from_flat(Y, X, 2, flat)
        assert phi.is_morphism() == preserves_structure(Y, C, flat)


def test_morphism_counts(fig1_dual, mv_dual):
    assert len(enumerate_morphisms(fig1_dual, fig1_dual)) == 65
    assert len(enumerate_morphisms(boolean_dual(3), boolean_dual(3))) == 27
    assert len(enumerate_morphisms(mv_dual, mv_dual)) == 18


def test_mv_morphism_constraints(mv_dual):
    rel = {name: {t[0] for t in ts} for name, _, ts in mv_dual.relations}
    (u1,) = rel["r2"]
    u4 = (rel["r6"] - {u1}).pop()
    for m in enumerate_morphisms(mv_dual, mv_dual):
        assert m.map[u1] == u1
        assert m.map[u4] in {u1, u4}
        assert all(m.map[u] in rel["r4"] for u in rel["r4"])


def test_morphism_limit(fig1_dual):
    with pytest.raises(LimitExceededError):
        enumerate_morphisms(fig1_dual, fig1_dual, limit=10)


def test_tilde_classes(fig1_dual):
    assert tilde_classes(fig1_dual).classes == ((1, 3), (2,))
    assert tilde_classes(boolean_dual(3)).classes == ((0,), (1,), (2,))
    X = median_dual(2)
    c = dict(X.unary_ops)["c"]
    classes = tilde_classes(X).classes
    assert len(classes) == 2
    assert all(len(E) == 2 and c[E[0]] == E[1] for E in classes)


def test_tilde_property(fig1_dual, mv_dual):
    for X in (fig1_dual, mv_dual, median_dual(3), boolean_lattice_dual(3)):
        tp = tilde_classes(X)
        for t in X.graph_tuples():
            live = {tp.class_of(x) for x in t if x not in X.constant_points}
            assert len(live) <= 1


def _fig1_two_copy(X):
    # u_c, u_a in copy 0 and u_b in copy 1
    return DualMorphism(X, X, 2, (Const(0), Pt(0, 1), Pt(1, 2), Pt(0, 3), Const(1)))


def test_co_essential_arity(fig1_dual):
    X = fig1_dual
    const = DualMorphism(X, X, 1, (Const(0), Const(0), Const(1), Const(1), Const(1)))
    assert const.is_morphism() and co_essential_arity(const) == 0
    ident = DualMorphism(X, X, 1, (Const(0), Pt(0, 1), Pt(0, 2), Pt(0, 3), Const(1)))
    assert ident.is_morphism() and co_essential_arity(ident) == 1
    two = _fig1_two_copy(X)
    assert two.is_morphism() and co_essential_arity(two) == 2


def test_canonical_class_invariances(fig1_dual):
    X = fig1_dual
    phi = _fig1_two_copy(X)
    swapped = phi.after_tau((1, 0))
    assert canonical_class(phi) == canonical_class(swapped)
    other = DualMorphism(X, X, 2, (Const(0), Pt(0, 1), Const(0), Pt(0, 3), Const(1)))
    assert other.is_morphism() and canonical_class(other) != canonical_class(phi)
    cls = canonical_class(phi)
    assert cls.const_fiber == ((0, 0), (4, 1)) and cls.blocks == ((1, 3), (2,)) and cls.ess == 2


def test_stone_classes_are_determined_by_pr2():
    X = boolean_dual(2)
    a = DualMorphism(X, X, 2, (Pt(0, 0), Pt(1, 0)))
    b = DualMorphism(X, X, 2, (Pt(1, 0), Pt(0, 0)))
    assert a.pr2() == b.pr2() and canonical_class(a) == canonical_class(b)


def test_class_soundness_and_order(fig1_dual):
    X = fig1_dual
    phis = copower_morphisms(X, X, 2)
    classes = [canonical_class(p) for p in phis]
    for i, j in itertools.product(range(0, len(phis), 7), range(0, len(phis), 5)):
        down = is_co_minor(phis[i], phis[j]) is not None
        up = is_co_minor(phis[j], phis[i]) is not None
        assert (classes[i] == classes[j]) == (down and up)
        assert class_le(classes[i], classes[j]) == down


def test_is_co_minor_examples():
    X = boolean_dual(3)
    phi = DualMorphism(X, X, 3, (Pt(0, 0), Pt(1, 1), Pt(2, 2)))
    assert is_co_minor(phi, phi) == (0, 1, 2)
    psi = identification_minor(phi, (0, 1))
    assert is_co_minor(psi, phi) == (0, 0, 1)
    two = DualMorphism(X, X, 2, (Pt(0, 0), Pt(1, 1), Pt(1, 2)))
    three = DualMorphism(X, X, 3, (Pt(0, 0), Pt(1, 1), Pt(2, 2)))
    assert is_co_minor(three, two) is None
    assert is_co_minor(two, three) is not None


def test_identification_minors_and_decks():
    X = boolean_dual(3)
    phi = DualMorphism(X, X, 3, (Pt(0, 0), Pt(1, 1), Pt(2, 2)))
    m12, m13 = identification_minor(phi, (0, 1)), identification_minor(phi, (0, 2))
    assert canonical_class(m12) != canonical_class(m13)
    d = deck(phi)
    assert sum(d.values()) == 3 and len(d) == 3
    two = DualMorphism(X, X, 2, (Pt(0, 0), Pt(1, 1), Pt(0, 2)))
    assert co_essential_arity(identification_minor(two, (0, 1))) == 1
    assert sum(deck(two).values()) == 1
    F = boolean_lattice_dual(2)
    const = DualMorphism(F, F, 3, (Const(0), Const(0), Const(1), Const(1)))
    assert const.is_morphism()
    dc = deck(const)
    assert len(dc) == 1 and sum(dc.values()) == 3
    with pytest.raises(ArityTooSmallError):
        deck(DualMorphism(X, X, 1, (Pt(0, 0),) * 3))


def test_maximal_classes_examples(fig1_dual, mv_dual):
    stone = maximal_classes(boolean_dual(2), boolean_dual(2))
    assert len(stone) == 4 and {m.c for m in stone} == {2}
    fig = maximal_classes(fig1_dual, fig1_dual)
    assert len(fig) == 65
    assert sorted(m.c for m in fig).count(2) == 30 and sorted(m.c for m in fig).count(0) == 6
    mv = maximal_classes(mv_dual, mv_dual)
    assert len(mv) == 18 and {m.c for m in mv} == {4}


def test_decomposition_count(fig1_dual, mv_dual):
    for X in (fig1_dual, mv_dual, median_dual(2), boolean_lattice_dual(3)):
        parts = [len(enumerate_morphisms(X.substructure(E)[0], X)) for E in tilde_classes(X).classes]
        total = 1
        for p in parts:
            total *= p
        assert len(enumerate_morphisms(X, X)) == total == len(maximal_classes(X, X))
    assert [len(enumerate_morphisms(fig1_dual.substructure(E)[0], fig1_dual))
            for E in tilde_classes(fig1_dual).classes] == [13, 5]


def test_minor_sequence_examples(fig1_dual):
    assert minor_sequence(boolean_dual(3), boolean_dual(2)) == MinorSequence({3: 8})
    assert minor_sequence(fig1_dual, fig1_dual) == MinorSequence({1: 29, 2: 30}, 6)
    assert minor_sequence(boolean_lattice_dual(2), boolean_lattice_dual(2)) == MinorSequence({1: 8, 2: 4}, 4)


def test_maximal_classes_are_maximal(fig1_dual):
    X = fig1_dual
    tops = {m.to_class(X) for m in maximal_classes(X, X)}
    every = {canonical_class(p) for n in (1, 2, 3) for p in copower_morphisms(X, X, n)}
    assert tops <= every
    for cls in every:
        above = [t for t in tops if class_le(cls, t)]
        assert len(above) == 1  # each class lies below exactly one maximal class
        assert not any(class_le(t, cls) and t != cls for t in tops)


def test_refined_count_on_single_linked_class():
    # downsets of the poset a, b < c: the dual has one linked class of three points
    A = library.downset_lattice(3, [(0, 2), (1, 2)])
    X = dualize(A, alter_ego_dl())
    assert len(tilde_classes(X)) == 1
    seq = minor_sequence(X, X)
    assert seq == MinorSequence({1: 36, 2: 9}, 5)
    assert max(m.met_components for m in maximal_classes(X, X)) == 1
    P = minor_poset_bruteforce(A, A, 3)
    assert census(P)["maximal"] == {0: 5, 1: 36, 2: 9}


def test_largest_arity_equals_number_of_linked_classes(fig1_dual, mv_dual):
    for X in (fig1_dual, mv_dual, boolean_dual(3), median_dual(2), boolean_lattice_dual(3)):
        assert max(m.c for m in maximal_classes(X, X)) == len(tilde_classes(X))


@pytest.mark.parametrize("e,size", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15)])
def test_principal_ideal(e, size):
    cls = MorphismClass((), tuple((y, y) for y in range(e)), tuple((y,) for y in range(e)))
    P = principal_ideal(cls)
    assert P.size == size
    assert poset_iso(P, dual(partition_lattice(e)))


def test_principal_ideal_cap():
    cls = MorphismClass((), tuple((y, y) for y in range(6)), tuple((y,) for y in range(6)))
    with pytest.raises(CapExceededError):
        principal_ideal(cls)


def test_principal_ideals_are_disjoint(fig1_dual):
    X = fig1_dual
    seen = set()
    for m in maximal_classes(X, X):
        members = set(principal_ideal(m.to_class(X)).labels)
        assert not members & seen
        seen |= members


def test_extend_split():
    X = boolean_dual(2)
    phi = DualMorphism(X, X, 1, (Pt(0, 0), Pt(0, 1)))
    psi = extend_split(phi, (1,))
    assert psi.is_morphism() and co_essential_arity(psi) == 2
    assert is_co_minor(phi, psi) is not None and is_co_minor(psi, phi) is None
    F = boolean_lattice_dual(2)
    const = DualMorphism(F, F, 1, (Const(0), Const(0), Const(1), Const(1)))
    with pytest.raises(EmptySplitError):
        extend_split(const, tilde_classes(F).classes[0])


def test_extend_split_on_maximal_classes(fig1_dual, mv_dual):
    for X in (fig1_dual, mv_dual, median_dual(2)):
        for m in maximal_classes(X, X):
            phi = m.to_class(X).representative(X, X)
            for E in tilde_classes(X).classes:
                try:
                    psi = extend_split(phi, E)
                except (EmptySplitError, PreconditionError):
                    continue
                assert psi.is_morphism()
                assert canonical_class(psi) == canonical_class(phi)


def test_extend_split_majors(fig1_dual):
    X = fig1_dual
    for phi in copower_morphisms(X, X, 1):
        for E in tilde_classes(X).classes:
            try:
                psi = extend_split(phi, E)
            except EmptySplitError:
                continue
            assert psi.is_morphism() and is_co_minor(phi, psi) is not None
            shared = any(isinstance(phi.map[y], Pt) for y in range(X.size) if y not in E)
            assert (is_co_minor(psi, phi) is None) == shared


def test_weak_reconstruction(fig1_dual, mv_dual):
    r = weak_reconstruct_check(boolean_dual(3), boolean_dual(3), 3)
    assert r.class_count == 27 and r.ok
    assert weak_reconstruct_check(fig1_dual, fig1_dual, 3).class_count == 0
    r3 = weak_reconstruct_check(mv_dual, mv_dual, 3)
    assert r3.class_count == 108 and r3.ok
    with pytest.raises(ArityTooSmallError):
        weak_reconstruct_check(fig1_dual, fig1_dual, 2)


def test_invariance_group():
    for n in (1, 2, 3, 4):
        X = boolean_dual(n)
        for cls in classes_of_arity(X, X, n)[:: max(1, n ** n // 12)]:
            assert invariance_group_dual(cls.representative(X, X)) == [tuple(range(n))]
    X = boolean_dual(2)
    with pytest.raises(PreconditionError):
        invariance_group_dual(DualMorphism(X, X, 3, (Pt(0, 0), Pt(1, 1))))


def test_minor_sequence_json_round_trip():
    seq = MinorSequence({2: 30, 1: 29}, 6)
    assert seq.s1 == 35 and seq.total == 65
    assert MinorSequence.from_json(seq.to_json()) == seq
    assert seq.to_json() == '{"counts": {"1": 29, "2": 30}, "ess0": 6, "s1": 35}'
    with pytest.raises(ParseError):
        MinorSequence.from_json('{"counts": {"1": 2}, "ess0": 1, "s1": 5}')
    with pytest.raises(ParseError):
        MinorSequence.from_json("[]")
    with pytest.raises(ValueError):
        MinorSequence({0: 3})
