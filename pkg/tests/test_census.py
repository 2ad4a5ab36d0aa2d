import csv
from math import comb

import pytest

import bruteforce as bf
from haarrep.autgroup import is_hgr
from haarrep.census import (FAMILY_KINDS, CensusError, FamilySpec, exhaustive_census, find_grr_witness,
                            monte_carlo_census, sample_family, sample_index, wilson_interval, write_trace_csv)
from haarrep.graphs import SetMatrix
from haarrep.groups import GroupError, c_value, make_group


def strip(report):
    d = report.to_dict()
    d.pop("wall_time")
    d.pop("workers")
    return d


# -- encodings ----------------------------------------------------------------


def test_inverse_closed_c4_enumeration():
    C4 = make_group("C4")
    F = FamilySpec("inverse-closed", C4)
    members = {F.decode(i) for i in range(F.size)}
    assert F.size == 8 and members == bf.inverse_closed_subsets(C4.inv)


def test_all_zero_bits_give_empty():
    for kind in FAMILY_KINDS:
        F = FamilySpec(kind, make_group("C3"), 1 if kind in ("subsets", "inverse-closed") else 2)
        obj = F.decode(0)
        if isinstance(obj, SetMatrix):
            assert all(obj[i, j] == 0 for i in range(F.m) for j in range(F.m))
        else:
            assert obj == 0


@pytest.mark.parametrize("spec", ["C4", "C2^2"])
@pytest.mark.parametrize("kind,m", [("subsets", 1), ("inverse-closed", 1), ("matrices", 2),
                                    ("inverse-closed-matrices", 2), ("skew", 2), ("skew", 3)])
def test_encoding_bijective(spec, kind, m):
    G = make_group(spec)
    F = FamilySpec(kind, G, m)
    members = [F.decode(i) for i in range(F.size)]
    assert len(set(members)) == F.size
    for obj in members:
        if kind == "inverse-closed":
            assert G.is_inverse_closed(obj)
        elif kind == "inverse-closed-matrices":
            assert obj.is_inverse_closed(G)
        elif kind == "skew":
            assert obj.is_skew(G)


def _brute_matrix_count(G, m, kind):
    ic = bf.inverse_closed_subsets(G.inv)
    diag = 1 if kind == "skew" else len(ic)
    # S_ij for i<j is free and S_ji is then forced
    return diag ** m * (1 << G.n) ** comb(m, 2)


@pytest.mark.parametrize("spec", ["C1", "C2", "C3", "C4", "C2^2"])
def test_family_cardinalities(spec):
    G = make_group(spec)
    c = c_value(G, G.full_mask)
    assert FamilySpec("inverse-closed", G).size == len(bf.inverse_closed_subsets(G.inv)) == 2 ** c
    for m in (1, 2):
        Fi = FamilySpec("inverse-closed-matrices", G, m)
        assert Fi.size == _brute_matrix_count(G, m, "ic") == 2 ** (comb(m, 2) * G.n + m * c)
        Fs = FamilySpec("skew", G, m)
        assert Fs.size == _brute_matrix_count(G, m, "skew") == 2 ** (comb(m, 2) * G.n)
        assert FamilySpec("matrices", G, m).size == 2 ** (m * m * G.n)


def test_family_spec_errors():
    G = make_group("C3")
    with pytest.raises(CensusError):
        FamilySpec("bogus", G)
    with pytest.raises(CensusError):
        FamilySpec("subsets", G, 2)
    with pytest.raises(CensusError):
        FamilySpec("skew", G, 0)
    with pytest.raises(CensusError):
        FamilySpec("subsets", G).decode(8)


def test_sampler_deterministic_and_in_range():
    F = FamilySpec("matrices", make_group("C5"), 3)
    a = [sample_index(F, 0x5EED, k) for k in range(50)]
    assert a == [sample_index(F, 0x5EED, k) for k in range(50)]
    assert all(0 <= x < F.size for x in a)
    assert len(set(a)) == 50
    assert a != [sample_index(F, 1, k) for k in range(50)]
    assert sample_family(F, 0x5EED, 3)[0] == a[3]
    assert sample_index(FamilySpec("skew", make_group("C3"), 1), 9, 0) == 0


def test_sampler_roughly_uniform():
    F = FamilySpec("subsets", make_group("C3"))
    counts = [0] * 8
    for k in range(8000):
        counts[sample_index(F, 42, k)] += 1
    assert all(850 < c < 1150 for c in counts)


# -- exhaustive ---------------------------------------------------------------


def test_exhaustive_q8_drr():
    r = exhaustive_census(FamilySpec("subsets", make_group("Q8")), "drr")
    assert (r.hits, r.total, r.misses) == (0, 256, 256)


def test_exhaustive_c3xc3_drr():
    r = exhaustive_census(FamilySpec("subsets", make_group("C3xC3")), "drr")
    assert (r.hits, r.total) == (0, 512)


def test_exhaustive_c3_drr():
    r = exhaustive_census(FamilySpec("subsets", make_group("C3")), "drr")
    assert r.hits == 4 and r.proportion == 0.5
    assert r.wilson_ci_95 == (0.5, 0.5)
    assert r.degenerate_count == 2


def test_exhaustive_deterministic_and_worker_independent():
    F = FamilySpec("subsets", make_group("D5"))
    a = exhaustive_census(F, "hgr", workers=1)
    b = exhaustive_census(F, "hgr", workers=2)
    assert strip(a) == strip(b)
    assert a.hits + a.misses == a.total == 1024


def test_exhaustive_cap():
    with pytest.raises(CensusError, match="Monte Carlo"):
        exhaustive_census(FamilySpec("subsets", make_group("C25")), "drr")
    with pytest.raises(CensusError):
        exhaustive_census(FamilySpec("subsets", make_group("C6")), "drr", max_bits=5)


def test_predicate_mismatch():
    with pytest.raises(CensusError):
        exhaustive_census(FamilySpec("subsets", make_group("C3")), "mpgsr")
    with pytest.raises(CensusError):
        exhaustive_census(FamilySpec("subsets", make_group("C3")), "nope")
    with pytest.raises(GroupError):
        exhaustive_census(FamilySpec("subsets", make_group("S3")), "haar-optimal")


def test_trace_rows(tmp_path):
    F = FamilySpec("inverse-closed", make_group("C4"))
    r = exhaustive_census(F, "grr", trace=True)
    assert [row[0] for row in r.trace] == list(range(8))
    assert all(order % 4 == 0 and order > 4 for _, _, order in r.trace)
    path = tmp_path / "t.csv"
    write_trace_csv(r, str(path))
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["family_index", "predicate", "aut_order"] and len(rows) == 9


# -- Monte Carlo --------------------------------------------------------------


@pytest.mark.parametrize("spec", ["C4", "C2^3", "C6"])
def test_mc_abelian_hgr_zero(spec):
    for seed in (0, 0x5EED, 2 ** 64 - 1):
        r = monte_carlo_census(FamilySpec("subsets", make_group(spec)), "hgr", 300, seed)
        assert r.hits == 0 and r.proportion == 0.0 and r.wilson_ci_95[0] == 0.0


def test_mc_s3_contains_exhaustive():
    F = FamilySpec("subsets", make_group("S3"))
    ex = exhaustive_census(F, "hgr")
    mc = monte_carlo_census(F, "hgr", 10000, 0x5EED)
    lo, hi = mc.wilson_ci_95
    assert lo <= ex.proportion <= hi
    assert mc.hits + mc.misses == mc.samples == 10000


def test_mc_d5_drr_contains_exhaustive():
    F = FamilySpec("subsets", make_group("D5"))
    ex = exhaustive_census(F, "drr")
    assert 0 < ex.hits < ex.total
    mc = monte_carlo_census(F, "drr", 4000, 0x5EED)
    lo, hi = mc.wilson_ci_95
    assert lo <= ex.proportion <= hi


def test_mc_single_sample_reproducible():
    F = FamilySpec("subsets", make_group("D4"))
    a = monte_carlo_census(F, "drr", 1, 123)
    b = monte_carlo_census(F, "drr", 1, 123)
    assert strip(a) == strip(b) and a.samples == 1


def test_mc_workers_independent():
    F = FamilySpec("skew", make_group("C3"), 3)
    a = monte_carlo_census(F, "mpgsr", 1500, 0x5EED, workers=1, trace=True)
    b = monte_carlo_census(F, "mpgsr", 1500, 0x5EED, workers=3, trace=True)
    assert strip(a) == strip(b) and a.trace == b.trace


def test_mc_hits_agree_with_direct_evaluation():
    G = make_group("D5")
    F = FamilySpec("subsets", G)
    r = monte_carlo_census(F, "hgr", 200, 77, trace=True)
    direct = sum(is_hgr(G, sample_family(F, 77, k)[1]) for k in range(200))
    assert r.hits == direct
    assert [row[0] for row in r.trace] == [sample_index(F, 77, k) for k in range(200)]


def test_mc_errors():
    F = FamilySpec("subsets", make_group("C3"))
    with pytest.raises(CensusError):
        monte_carlo_census(F, "drr", 0, 1)
    with pytest.raises(CensusError):
        monte_carlo_census(F, "drr", 5, -1)


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.03 < hi < 0.04
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and abs((lo + hi) / 2 - 0.5) < 1e-12
    assert wilson_interval(7, 7)[1] == 1.0
    with pytest.raises(CensusError):
        wilson_interval(0, 0)


def test_report_serialization():
    r = exhaustive_census(FamilySpec("subsets", make_group("C3")), "drr")
    d = r.to_dict()
    assert d["hits"] == "4" and d["total"] == "8" and d["mode"] == "exhaustive"
    assert d["bound_comparison"]["haar_bound_vacuous"] is True


# -- GRR witness --------------------------------------------------------------


def test_grr_witness():
    w = find_grr_witness()
    assert w is not None
    G = make_group(w["group"])
    assert w["aut_order"] == G.n
    assert not G.is_abelian
