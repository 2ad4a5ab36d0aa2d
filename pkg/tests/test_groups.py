import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import bruteforce as bf
from haarrep.groups import (CATALOG, GroupError, automorphisms_of_group, c_value, catalog_groups,
                            classify_group, double_cosets, elements_of, enumerate_subgroups,
                            format_mask, generalized_dicyclic, make_group, mask_of, parse_mask,
                            popcount)

SMALL = [G for G in catalog_groups(32)]


def involutions(G):
    return [g for g in range(1, G.n) if G.m(g, g) == 0]


# -- construction -------------------------------------------------------------


def test_cyclic_inverse():
    G = make_group("C4")
    assert G.n == 4 and int(G.inv[1]) == 3


def test_q8_has_one_involution():
    # frozen from a direct scan of x*x == 1 over the table
    assert len(involutions(make_group("Q8"))) == 1


def test_elementary_abelian_squares_trivial():
    G = make_group("C2^3")
    assert G.n == 8 and all(G.m(g, g) == 0 for g in range(8))


@pytest.mark.parametrize("spec", CATALOG)
def test_catalog_tables_are_groups(spec):
    G = make_group(spec)
    assert G.name == spec
    if G.n <= 24:
        assert bf.table_is_group(G.mul)
    r = np.arange(G.n)
    assert np.array_equal(G.mul[r, G.inv], np.zeros(G.n, dtype=G.mul.dtype))
    assert np.array_equal(G.inv[G.inv], r)


@pytest.mark.parametrize("spec,order", [("D5", 10), ("S4", 24), ("A5", 60), ("C2^3xC3", 24),
                                         ("Dic(C6,3)", 12), ("Q8xC2", 16), ("C3xS3", 18)])
def test_orders(spec, order):
    assert make_group(spec).n == order


@pytest.mark.parametrize("bad", ["", "C0", "Foo", "S8", "C5000", "D", "C2^", "Dic(C4,1)", "Dic(S3,1)"])
def test_parse_errors(bad):
    with pytest.raises(GroupError):
        make_group(bad)


def test_dicyclic_from_c4_is_q8():
    D = generalized_dicyclic(make_group("C4"), 2)
    assert D.n == 8
    assert bf.isomorphic(D.mul, make_group("Q8").mul)


def test_dicyclic_structure_of_embedding():
    A = make_group("C6")
    D = generalized_dicyclic(A, 3)
    x = A.n
    assert D.m(x, x) == 3
    xi = int(D.inv[x])
    assert all(D.m(D.m(xi, a), x) == int(A.inv[a]) for a in range(A.n))
    assert np.array_equal(D.mul[:6, :6], A.mul)
    assert len(involutions(D)) == 1


@pytest.mark.parametrize("A,y", [("C4", 1), ("C2^2", 1), ("S3", 3), ("C4", 0)])
def test_dicyclic_rejects(A, y):
    with pytest.raises(GroupError):
        generalized_dicyclic(make_group(A), y)


# -- sets ---------------------------------------------------------------------


def test_c_value_examples():
    assert c_value(make_group("C4"), 0b1111) == 3
    assert c_value(make_group("C2^3"), 0xFF) == 8
    assert c_value(make_group("Q8"), 0) == 0
    with pytest.raises(GroupError):
        c_value(make_group("C4"), 0b0010)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_c_value_range(G, data):
    classes = sorted({min(g, int(G.inv[g])) for g in range(G.n)})
    pick = data.draw(st.lists(st.sampled_from(classes), unique=True))
    S = mask_of([g for c in pick for g in (c, int(G.inv[c]))])
    c = c_value(G, S)
    assert 0 <= c <= popcount(S)
    assert c == len(pick)


@given(st.integers(min_value=1, max_value=200), st.data())
def test_mask_round_trip(n, data):
    mask = data.draw(st.integers(min_value=0, max_value=(1 << n) - 1))
    assert parse_mask(format_mask(mask), n) == mask
    assert mask_of(elements_of(mask)) == mask


def test_mask_out_of_range():
    with pytest.raises(GroupError):
        parse_mask("0x10", 4)


def test_double_cosets_s3():
    G = make_group("S3")
    t = involutions(G)
    H, K = mask_of([0, t[0]]), mask_of([0, t[1]])
    sizes = sorted(popcount(b) for b in double_cosets(G, H, K))
    assert sizes == [2, 4]


def test_double_cosets_trivial_and_full():
    G = make_group("C4")
    assert double_cosets(G, 1, 1) == [1, 2, 4, 8]
    assert double_cosets(G, G.full_mask, G.full_mask) == [G.full_mask]
    with pytest.raises(GroupError):
        double_cosets(G, 0b11, 1)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([G for G in SMALL if G.n <= 24]), st.data())
def test_double_coset_partition(G, data):
    subs = enumerate_subgroups(G)
    H = data.draw(st.sampled_from(subs))
    K = data.draw(st.sampled_from(subs))
    blocks = double_cosets(G, H, K)
    acc = 0
    for b in blocks:
        assert acc & b == 0
        acc |= b
        for h in elements_of(H):
            for k in elements_of(K):
                assert (b >> G.m(G.m(h, elements_of(b)[0]), k)) & 1
    assert acc == G.full_mask
    assert [min(elements_of(b)) for b in blocks] == sorted(min(elements_of(b)) for b in blocks)


# -- subgroups and automorphisms ----------------------------------------------


@pytest.mark.parametrize("spec,count", [("C4", 3), ("Q8", 6), ("C2", 2)])
def test_subgroup_counts(spec, count):
    assert len(enumerate_subgroups(make_group(spec))) == count


@pytest.mark.parametrize("spec", ["C1", "C2", "C3", "C4", "C2^2", "S3", "C6", "C2^3", "D4", "Q8", "C4xC2"])
def test_subgroups_match_brute_force(spec):
    G = make_group(spec)
    assert sorted(enumerate_subgroups(G)) == bf.subgroups(G.mul, G.inv)


def test_subgroup_count_bound_on_catalog():
    for G in catalog_groups(64):
        L = math.log2(G.n) if G.n > 1 else 0
        assert math.log2(len(enumerate_subgroups(G))) < L * L / 4 + 3, G.name


def test_subgroup_cap():
    with pytest.raises(GroupError):
        enumerate_subgroups(make_group("C65"))


@pytest.mark.parametrize("spec,count", [("C4", 2), ("S3", 6), ("C2", 1)])
def test_automorphism_counts(spec, count):
    assert len(automorphisms_of_group(make_group(spec))) == count


@pytest.mark.parametrize("spec", ["C2^2", "C5", "C6", "S3", "D4", "Q8", "C2^3", "C4xC2"])
def test_automorphisms_match_brute_force(spec):
    G = make_group(spec)
    auts = automorphisms_of_group(G)
    assert auts == sorted(bf.group_automorphisms(G.mul))
    s = set(auts)
    for a in auts:
        for b in auts:
            assert tuple(b[x] for x in a) in s


def test_automorphism_bound_and_cap():
    for G in catalog_groups(24):
        L = math.log2(G.n) if G.n > 1 else 0
        assert math.log2(len(automorphisms_of_group(G))) <= L * L + 1e-12, G.name
    with pytest.raises(GroupError):
        automorphisms_of_group(make_group("C25"))


# -- classification -----------------------------------------------------------


def test_classify_q8():
    c = classify_group(make_group("Q8"))
    assert c.is_generalized_dicyclic and c.is_q8_times_e2
    assert c.q8_witness["ell"] == 0


def test_classify_dic12():
    c = classify_group(make_group("Dic(C6,3)"))
    assert c.is_generalized_dicyclic and not c.is_q8_times_e2


def test_classify_elementary_abelian():
    c = classify_group(make_group("C2^3"))
    assert c.is_elementary_abelian_2 and not c.is_abelian_exp_gt_2 and not c.is_generalized_dicyclic


@pytest.mark.parametrize("spec,dic,q8", [("D4", False, False), ("Q8xC2", True, True), ("Q8xC4", False, False),
                                         ("Q8xC2^2", True, True), ("Dic(C8,4)", True, False),
                                         ("C4xC2", False, False), ("S4", False, False)])
def test_classify_more(spec, dic, q8):
    c = classify_group(make_group(spec))
    assert (c.is_generalized_dicyclic, c.is_q8_times_e2) == (dic, q8)


def test_classification_consistent_on_catalog():
    for G in catalog_groups(64):
        c = classify_group(G)
        if c.is_q8_times_e2:
            assert c.is_generalized_dicyclic
        if c.is_elementary_abelian_2:
            assert c.is_abelian and c.exponent <= 2
        if c.is_generalized_dicyclic:
            assert not c.is_abelian
            w = c.dicyclic_witness
            A = parse_mask(w["A"], G.n)
            assert popcount(A) * 2 == G.n and G.m(w["x"], w["x"]) == w["y"] and w["y"] != 0
