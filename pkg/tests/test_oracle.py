import itertools
from math import comb

import pytest

from minorkit import library
from minorkit.algebra import Hom, power
from minorkit.duality import alter_ego_boolean, alter_ego_dl, dual_of_hom, dualize
from minorkit.dualspace import canonical_class, co_essential_arity, dual_minor_poset, is_co_minor
from minorkit.errors import ArityTooSmallError
from minorkit.oracle import (
    OracleFunction,
    arity_gap_fn,
    census,
    class_key,
    compose_tau,
    deck_fn,
    enumerate_power_homs,
    essential_args,
    identification_minor_fn,
    invariance_group_fn,
    minor_le,
    minor_poset_bruteforce,
    minors_of,
    nondualizability_report,
)
from minorkit.posets import poset_iso

Z2 = library.boolean_group()
SUM3 = (0, 1, 1, 0, 1, 0, 0, 1)


def test_enumerate_power_homs():
    b2 = library.boolean_algebra(2)
    assert len(enumerate_power_homs(b2, b2, 2)) == 16
    ba = library.two_element_ba()
    assert [f.table for f in enumerate_power_homs(ba, ba, 2)] == [(0, 0, 1, 1), (0, 1, 0, 1)]
    sums = enumerate_power_homs(Z2, Z2, 3)
    assert SUM3 in [f.table for f in sums]
    assert all(f.is_homomorphism() for f in sums)


def test_essential_args():
    ba = library.two_element_ba()
    pr0 = OracleFunction(ba, 2, ba, (0, 1, 0, 1))
    assert essential_args(pr0) == (0,)
    assert essential_args(OracleFunction(Z2, 3, Z2, SUM3)) == (0, 1, 2)
    assert essential_args(OracleFunction(Z2, 2, Z2, (0, 0, 0, 0))) == ()


def test_minor_le():
    b2 = library.boolean_algebra(2)
    fs = enumerate_power_homs(b2, b2, 2)
    f = fs[5]
    assert minor_le(f, f) == (0, 1)
    g = identification_minor_fn(f, (0, 1))
    assert minor_le(g, f) == (0, 0)
    unary = enumerate_power_homs(b2, b2, 1)
    # the two projections of 2^2 onto its atoms are unary homs that are not minors of each other
    projections = [u for u in unary if len(set(u.table)) == 2 and u.table != (0, 1, 2, 3)]
    for a, b in itertools.permutations(projections, 2):
        if a.table != b.table:
            assert minor_le(a, b) is None


def test_sum_of_three():
    f = OracleFunction(Z2, 3, Z2, SUM3)
    d = deck_fn(f)
    assert sum(d.values()) == 3 and len(d) == 1
    assert arity_gap_fn(f) == 2
    assert len(invariance_group_fn(f)) == 6
    with pytest.raises(ArityTooSmallError):
        deck_fn(OracleFunction(Z2, 1, Z2, (0, 1)))


def test_three_essential_boolean_functions():
    b3 = library.boolean_algebra(3)
    for f in enumerate_power_homs(b3, b3, 3)[::37]:
        if len(essential_args(f)) != 3:
            continue
        assert len(deck_fn(f)) == 3
        assert arity_gap_fn(f) == 1
        assert invariance_group_fn(f) == [(0, 1, 2)]


def test_gap_with_inessential_argument():
    ba = library.two_element_ba()
    pr0 = OracleFunction(ba, 2, ba, (0, 1, 0, 1))
    assert arity_gap_fn(pr0) == 0


def test_class_key_matches_mutual_minors():
    fig1 = library.fig1_lattice()
    funcs = [f for n in (1, 2) for f in enumerate_power_homs(fig1, fig1, n)]
    minors = {f: minors_of(f, 2) for f in funcs}
    for f, g in itertools.combinations(funcs[::3], 2):
        assert (class_key(f) == class_key(g)) == (minors[f] == minors[g])


def test_minor_poset_examples():
    b2 = library.boolean_algebra(2)
    P = minor_poset_bruteforce(b2, b2, 2)
    assert P.size == 8 and len(P.components()) == 4
    assert all(P.restrict(c).size == 2 for c in P.components())
    ba = library.two_element_ba()
    assert minor_poset_bruteforce(ba, ba, 2).size == 1
    fig1 = library.fig1_lattice()
    assert census(minor_poset_bruteforce(fig1, fig1, 2))["maximal"] == {0: 6, 1: 29, 2: 30}


@pytest.mark.parametrize("A,ego,max_n", [
    (library.two_element_ba(), alter_ego_boolean(), 3),
    (library.boolean_algebra(2), alter_ego_boolean(), 2),
    (library.fig1_lattice(), alter_ego_dl(), 2),
])
def test_function_side_matches_dual_side(A, ego, max_n):
    """f -> class of its dual morphism is an order isomorphism preserving essential arity."""
    X = dualize(A, ego)
    P = minor_poset_bruteforce(A, A, max_n)
    D = dual_minor_poset(X, X, max_n)
    image = []
    for lab in P.labels:
        f = lab.representative
        phi = dual_of_hom(Hom(power(A, f.arity), A, f.table), A, f.arity, ego)
        assert phi.is_morphism()
        assert co_essential_arity(phi) == len(essential_args(f)) == lab.ess
        image.append(D.labels.index(canonical_class(phi)))
    assert sorted(image) == list(range(D.size))
    for i, j in itertools.product(range(P.size), repeat=2):
        assert P.le[i, j] == D.le[image[i], image[j]]
    assert poset_iso(P, D, cap=None, label_key=lambda c: c.ess)


def test_minor_witnesses_transfer():
    A, ego = library.fig1_lattice(), alter_ego_dl()
    fs = enumerate_power_homs(A, A, 2)[::9]
    gs = enumerate_power_homs(A, A, 1)[::4] + fs[:4]
    for f, g in itertools.product(fs, gs):
        fd = dual_of_hom(Hom(power(A, f.arity), A, f.table), A, f.arity, ego)
        gd = dual_of_hom(Hom(power(A, g.arity), A, g.table), A, g.arity, ego)
        tau = minor_le(g, f)
        assert (tau is None) == (is_co_minor(gd, fd) is None)
        if tau is not None:
            assert fd.after_tau(tau, g.arity).map == gd.map


def test_nondualizability():
    r = nondualizability_report(Z2, 3)
    hits = {v.criterion: v.detail for v in r.violations if v.function.table == SUM3}
    assert {"c", "d"} <= set(hits)
    assert hits["c"].startswith("1 distinct") and hits["d"] == "arity gap 2"
    assert not nondualizability_report(library.boolean_algebra(2), 3).flagged
    assert not nondualizability_report(library.fig1_lattice(), 2).flagged


def test_compose_tau_is_minor():
    b2 = library.boolean_algebra(2)
    f = enumerate_power_homs(b2, b2, 2)[7]
    g = compose_tau(f, (1, 0), 2)
    assert minor_le(g, f) is not None and class_key(g) == class_key(f)
