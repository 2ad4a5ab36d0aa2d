"""Brute-force checks of the finitely checkable counting and orbit lemmas.

Each check has a stable id and returns :class:`OracleResult` records. Both
sides of every comparison are computed by direct enumeration where that is
feasible, so a check never trusts the formula it is testing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .graphs import coset_blocks, haar_graph, odd_quotient
from .groups import (GroupError, GroupTable, automorphisms_of_group, c_value, catalog_groups,
                     classify_group, double_cosets, elements_of, enumerate_subgroups, format_mask,
                     index_two_subgroups, make_group, popcount)
from .perm import Perm, PermGroup, cycle_notation, from_cycles, orbit_count_of_cycle, orbits_of

INVERSE_CLOSED_CAP = 20
PARITY_CAP = 20
BINOMIAL_CAP = 60
BIPARTITE_SIDE_CAP = 5
INVERSION_CAP = 24
FIBER_CAP = 16
ORBIT_CAP = 48
SIZE_BOUND_CAP = 24


class OracleError(ValueError):
    pass


@dataclass
class OracleResult:
    lemma: str
    params: dict
    passed: bool
    counts: dict = field(default_factory=dict)
    counterexample: dict | None = None

    def __post_init__(self):
        if not self.passed and not self.counterexample:
            raise OracleError("a failing result must carry a counterexample")

    def to_dict(self) -> dict:
        return {"lemma": self.lemma, "status": "PASS" if self.passed else "FAIL",
                "params": self.params, "counts": self.counts, "counterexample": self.counterexample}


def _permute_bits(masks: np.ndarray, perm: Iterable[int]) -> np.ndarray:
    """Apply a position permutation to every bitmask in ``masks``."""
    out = np.zeros_like(masks)
    one = masks.dtype.type(1)
    for p, q in enumerate(perm):
        out |= ((masks >> masks.dtype.type(p)) & one) << masks.dtype.type(q)
    return out


# ---------------------------------------------------------------------------
# subset counting


def check_inverse_closed_count(G: GroupTable, S: int) -> OracleResult:
    if not G.is_inverse_closed(S):
        raise GroupError("S must be inverse-closed")
    els = elements_of(S)
    k = len(els)
    if k > INVERSE_CLOSED_CAP:
        raise OracleError(f"|S| = {k} exceeds the cap {INVERSE_CLOSED_CAP}")
    pos = {g: i for i, g in enumerate(els)}
    perm = [pos[int(G.inv[g])] for g in els]
    masks = np.arange(1 << k, dtype=np.uint32)
    count = int(np.count_nonzero(_permute_bits(masks, perm) == masks))
    expected = 1 << c_value(G, S)
    params = {"group": G.name, "S": format_mask(S)}
    counts = {"inverse_closed_subsets": count, "two_to_c": expected}
    if count == expected:
        return OracleResult("L2.2", params, True, counts)
    return OracleResult("L2.2", params, False, counts, {"S": format_mask(S), "count": count})


def check_parity_counts(k: int) -> OracleResult:
    if not 1 <= k <= PARITY_CAP:
        raise OracleError(f"k must lie in 1..{PARITY_CAP}")
    sizes = np.bitwise_count(np.arange(1 << k, dtype=np.uint32))
    odd = int(np.count_nonzero(sizes & 1))
    even = (1 << k) - odd
    ok = odd == even == 1 << (k - 1)
    counts = {"odd": odd, "even": even}
    return OracleResult("L2.5", {"k": k}, ok, counts, None if ok else dict(counts))


def check_binomial_bound(k: int) -> OracleResult:
    if not 1 <= k <= BINOMIAL_CAP:
        raise OracleError(f"k must lie in 1..{BINOMIAL_CAP}")
    best = max(math.comb(k, j) for j in range(k + 1))
    # best <= 2^k / sqrt(k)  <=>  best^2 * k <= 4^k
    ok = best * best * k <= 4 ** k
    counts = {"max_binomial": best, "bound_squared_times_k": 4 ** k}
    return OracleResult("L2.6", {"k": k}, ok, counts, None if ok else {"k": k, "max_binomial": best})


# ---------------------------------------------------------------------------
# group structure


def check_group_size_bounds(G: GroupTable) -> OracleResult:
    if G.n > SIZE_BOUND_CAP:
        raise OracleError(f"order {G.n} exceeds the cap {SIZE_BOUND_CAP}")
    auts = len(automorphisms_of_group(G))
    subs = len(enumerate_subgroups(G))
    L = math.log2(G.n) if G.n > 1 else 0.0
    # exact for powers of two; otherwise the margins are far from float noise
    aut_ok = G.n == 1 or math.log2(auts) <= L * L + 1e-12
    sub_ok = math.log2(subs) < L * L / 4 + 3
    counts = {"automorphisms": auts, "aut_bound_log2": L * L,
              "subgroups": subs, "subgroup_bound_log2": L * L / 4 + 3}
    ok = aut_ok and sub_ok
    cex = None if ok else {"group": G.name, "aut_ok": aut_ok, "subgroup_ok": sub_ok}
    return OracleResult("L2.4bc", {"group": G.name}, ok, counts, cex)


def check_inversion_bounds(G: GroupTable) -> OracleResult:
    """Automorphisms of a nonabelian group invert at most 3/4 of it; dense involutions force C2^l;
    and for each nonabelian index-2 subgroup H of G, the outer coset has at most 3|H|/4 elements of order 2.
    """
    if G.n > INVERSION_CAP:
        raise OracleError(f"order {G.n} exceeds the cap {INVERSION_CAP}")
    n = G.n
    inv = G.inv
    counts: dict = {}
    cex: dict = {}
    if not G.is_abelian:
        best, worst = 0, None
        for phi in automorphisms_of_group(G):
            inverted = int(np.count_nonzero(np.asarray(phi) == inv))
            if inverted > best:
                best, worst = inverted, phi
        counts["max_inverted"] = best
        if 4 * best > 3 * n:
            cex["inverting_automorphism"] = list(worst)
    involutions = popcount(G.involution_mask) - 1
    counts["involutions"] = involutions
    if 4 * involutions > 3 * n and not (G.is_abelian and G.exponent <= 2):
        cex["dense_involutions"] = involutions
    cosets = []
    for H in index_two_subgroups(G):
        hs = elements_of(H)
        if all(G.m(a, b) == G.m(b, a) for a in hs for b in hs):
            continue
        outer = [g for g in range(n) if not (H >> g) & 1]
        inv_outer = sum(1 for g in outer if G.m(g, g) == 0)
        cosets.append({"H": format_mask(H), "involutions_outside": inv_outer, "bound": str(Fraction(3 * len(hs), 4))})
        if 4 * inv_outer > 3 * len(hs):
            cex.setdefault("coset", []).append(format_mask(H))
    counts["nonabelian_index_two"] = cosets
    return OracleResult("L2.7", {"group": G.name}, not cex, counts, cex or None)


def check_double_coset_bound(G: GroupTable, H: int, K: int) -> OracleResult:
    blocks = double_cosets(G, H, K)
    kappa = len(blocks)
    iH, iK = G.n // popcount(H), G.n // popcount(K)
    small = 4 * kappa <= 3 * max(iH, iK)
    normal = H == K and G.is_normal(H)
    params = {"group": G.name, "H": format_mask(H), "K": format_mask(K)}
    counts = {"double_cosets": kappa, "index_H": iH, "index_K": iK, "normal_branch": normal}
    ok = small or normal
    return OracleResult("L2.8", params, ok, counts, None if ok else dict(params, double_cosets=kappa))


def check_double_coset_bound_all(G: GroupTable) -> OracleResult:
    subs = enumerate_subgroups(G)
    failures = []
    for H in subs:
        for K in subs:
            r = check_double_coset_bound(G, H, K)
            if not r.passed:
                failures.append(r.counterexample)
    counts = {"subgroups": len(subs), "pairs": len(subs) ** 2}
    return OracleResult("L2.8", {"group": G.name}, not failures, counts,
                        {"pairs": failures} if failures else None)


# ---------------------------------------------------------------------------
# invariant bipartite graphs


def check_bipartite_double_coset(M: PermGroup, label: str = "") -> OracleResult:
    orbs = orbits_of(M.generators, M.degree)
    if len(orbs) != 2:
        raise OracleError(f"group has {len(orbs)} orbits, expected 2")
    U, W = orbs
    if max(len(U), len(W)) > BIPARTITE_SIDE_CAP:
        raise OracleError(f"orbit sizes exceed the cap {BIPARTITE_SIDE_CAP}")
    # brute force: every edge set between U and W fixed by all generators
    slot = {(u, w): i for i, (u, w) in enumerate(itertools.product(U, W))}
    perms = [[slot[(g[u], g[w])] for u, w in slot] for g in M.generators]
    nbits = len(slot)
    invariant = 0
    step = 1 << 20
    for start in range(0, 1 << nbits, step):
        masks = np.arange(start, min(start + step, 1 << nbits), dtype=np.uint32)
        keep = np.ones(len(masks), dtype=bool)
        for p in perms:
            keep &= _permute_bits(masks, p) == masks
        invariant += int(np.count_nonzero(keep))
    # kappa from the stabilizers inside the abstract group
    elems = list(M.elements())
    u, w = U[0], W[0]
    Mu = [g for g in elems if g[u] == u]
    Mw = [g for g in elems if g[w] == w]
    index = {g: i for i, g in enumerate(elems)}
    seen = [False] * len(elems)
    kappa = 0
    for i, x in enumerate(elems):
        if seen[i]:
            continue
        kappa += 1
        for h in Mw:
            hx = tuple(x[a] for a in h)  # h then x
            for k in Mu:
                seen[index[tuple(k[a] for a in hx)]] = True
    semiregular = all(len(o) == M.order for o in orbs)
    counts = {"invariant_graphs": invariant, "kappa": kappa, "order": M.order,
              "U": len(U), "W": len(W), "semiregular": semiregular}
    cex = {}
    if invariant != 1 << kappa:
        cex["count_mismatch"] = {"invariant_graphs": invariant, "two_to_kappa": 1 << kappa}
    if len(U) == len(W) and not semiregular and 4 * kappa > 3 * len(U):
        cex["kappa_bound"] = kappa
    if cex:
        cex["generators"] = [cycle_notation(g) for g in M.generators]
    params = {"group": label or "M", "degree": M.degree,
              "generators": [cycle_notation(g) for g in M.generators]}
    return OracleResult("L2.9", params, not cex, counts, cex or None)


def _perm_group(d: int, gens: list) -> PermGroup:
    return PermGroup.from_generators([from_cycles(d, c) for c in gens], d)


def default_bipartite_groups() -> list[tuple[str, PermGroup]]:
    from .graphs import right_regular_action
    out = [
        ("C3 twin", _perm_group(6, [[(0, 1, 2), (3, 4, 5)]])),
        ("trivial 1+1", _perm_group(2, [])),
        ("S3 diagonal", _perm_group(6, [[(0, 1), (3, 4)], [(0, 1, 2), (3, 4, 5)]])),
        ("C3 twisted", _perm_group(6, [[(0, 1, 2), (3, 5, 4)]])),
        ("S3 twin orientation", _perm_group(6, [[(0, 1), (4, 5)], [(0, 1, 2), (3, 4, 5)]])),
        ("C4 and C2", _perm_group(6, [[(0, 1, 2, 3), (4, 5)]])),
        ("D4 diagonal", _perm_group(8, [[(0, 1, 2, 3), (4, 5, 6, 7)], [(1, 3), (5, 7)]])),
        ("A4 diagonal", _perm_group(8, [[(0, 1, 2), (4, 5, 6)], [(0, 1), (2, 3), (4, 5), (6, 7)]])),
        ("S4 diagonal", _perm_group(8, [[(0, 1), (4, 5)], [(0, 1, 2, 3), (4, 5, 6, 7)]])),
        ("V4 twisted", _perm_group(8, [[(0, 1), (2, 3), (4, 5), (6, 7)], [(0, 2), (1, 3), (4, 6), (5, 7)]])),
        ("D4 on 4+2", _perm_group(6, [[(0, 1, 2, 3), (4, 5)], [(1, 3)]])),
        ("S3 on 3+2", _perm_group(5, [[(0, 1), (3, 4)], [(0, 1, 2)]])),
    ]
    for spec in ("C2", "C3", "C4", "C2^2"):
        G = make_group(spec)
        out.append((f"R({spec}) on two copies", PermGroup.from_generators(right_regular_action(G, 2), 2 * G.n)))
    return out


# ---------------------------------------------------------------------------
# odd quotients


def check_odd_quotient_fibers(G: GroupTable, C: int) -> OracleResult:
    if G.n > FIBER_CAP:
        raise OracleError(f"order {G.n} exceeds the cap {FIBER_CAP}")
    if not G.is_subgroup(C) or not G.is_normal(C):
        raise GroupError("C must be a normal subgroup")
    if C == 1:
        raise OracleError("C must be nontrivial")
    blocks = coset_blocks(G, C, 2)
    fibers: dict[bytes, int] = {}
    first: dict[bytes, int] = {}
    for S in range(1 << G.n):
        key = odd_quotient(haar_graph(G, S), blocks).adj.tobytes()
        fibers[key] = fibers.get(key, 0) + 1
        first.setdefault(key, S)
    expected = 1 << (G.n - G.n // popcount(C))
    sizes = sorted(set(fibers.values()))
    bad = [format_mask(first[k]) for k, v in fibers.items() if v != expected]
    params = {"group": G.name, "core": format_mask(C)}
    counts = {"fibers": len(fibers), "fiber_sizes": sizes, "expected_size": expected}
    return OracleResult("L5.1", params, not bad, counts, {"representatives": bad} if bad else None)


# ---------------------------------------------------------------------------
# orbit counts of the overgroups M(G)


def _right_mult(G: GroupTable, x: int) -> Perm:
    return tuple(int(v) for v in G.mul[:, x])


def _regular_gens(G: GroupTable) -> list[Perm]:
    return [_right_mult(G, x) for x in G.generating_set]


def overgroup(G: GroupTable, cls: str) -> tuple[PermGroup, dict]:
    """``M(G)`` on the points of ``G`` for the three classes handled by the orbit checks."""
    info = classify_group(G)
    n = G.n
    inv = tuple(int(v) for v in G.inv)
    if cls == "abelian-exp>2":
        if not info.is_abelian_exp_gt_2:
            raise OracleError(f"{G.name} is not abelian of exponent > 2")
        extra = [inv]
        witness = {}
    elif cls == "q8xE2":
        if not info.is_q8_times_e2:
            raise OracleError(f"{G.name} is not Q8 x C2^l")
        w = info.q8_witness
        E = elements_of(int(w["E"], 16))
        minus = w["minus_one"]
        extra = []
        for u in (w["i"], w["j"], w["k"]):
            p = list(range(n))
            for e in E:
                a = G.m(u, e)
                b = G.m(G.m(minus, u), e)
                p[a], p[b] = b, a
            extra.append(tuple(p))
        witness = w
    elif cls == "gen-dicyclic-not-q8e2":
        if not info.is_generalized_dicyclic or info.is_q8_times_e2:
            raise OracleError(f"{G.name} is not generalized dicyclic outside Q8 x C2^l")
        A = int(info.dicyclic_witness["A"], 16)
        extra = [tuple(g if (A >> g) & 1 else inv[g] for g in range(n))]
        witness = info.dicyclic_witness
    else:
        raise OracleError(f"unknown class {cls!r}")
    return PermGroup.from_generators(_regular_gens(G) + extra, n), witness


ORBIT_BOUNDS = {  # class -> (lemma id, bound as a fraction of |G|, index |M:G|)
    "abelian-exp>2": ("L7.2", Fraction(5, 6), 2),
    "q8xE2": ("L7.5", Fraction(7, 8), 8),
    "gen-dicyclic-not-q8e2": ("L7.8", Fraction(3, 4), 2),
}


def check_orbit_bound(G: GroupTable, cls: str) -> OracleResult:
    if G.n > ORBIT_CAP:
        raise OracleError(f"order {G.n} exceeds the cap {ORBIT_CAP}")
    lemma, frac, index = ORBIT_BOUNDS.get(cls, (None, None, None))
    if lemma is None:
        raise OracleError(f"unknown class {cls!r}")
    M, witness = overgroup(G, cls)
    worst, worst_elem, bad = 0, None, []
    ident = tuple(range(G.n))
    for s in M.elements():
        if s == ident:
            continue
        k = orbit_count_of_cycle(s)
        if k > worst:
            worst, worst_elem = k, s
        if k > frac * G.n:
            bad.append(cycle_notation(s))
    cex = {}
    if bad:
        cex["elements"] = bad[:10]
    if M.order != index * G.n:
        cex["order"] = M.order
    counts = {"order_M": M.order, "index": M.order // G.n, "max_orbits": worst,
              "bound": str(frac * G.n), "max_element": cycle_notation(worst_elem) if worst_elem else "()"}
    params = {"group": G.name, "class": cls, "witness": witness}
    return OracleResult(lemma, params, not cex, counts, cex or None)


# ---------------------------------------------------------------------------
# registry and default grid

ORACLE_IDS = ("L2.2", "L2.4bc", "L2.5", "L2.6", "L2.7", "L2.8", "L2.9", "L5.1", "L7.2", "L7.5", "L7.8")
CLASS_OF = {"L7.2": "abelian-exp>2", "L7.5": "q8xE2", "L7.8": "gen-dicyclic-not-q8e2"}


def _groups(max_order: int) -> list[GroupTable]:
    return list(catalog_groups(max_order))


def _fiber_cases(G: GroupTable) -> list[int]:
    return [C for C in enumerate_subgroups(G) if C != 1 and G.is_normal(C)]


def run_oracle(lemma: str, group: GroupTable | None = None, core: int | None = None,
               subset: int | None = None) -> list[OracleResult]:
    """Run one check, over its default grid or on ``group`` alone."""
    if lemma not in ORACLE_IDS:
        raise OracleError(f"unknown lemma id {lemma!r}; known: {', '.join(ORACLE_IDS)}")
    if lemma == "L2.2":
        gs = [group] if group else _groups(INVERSE_CLOSED_CAP)
        out = []
        for G in gs:
            if subset is not None:
                out.append(check_inverse_closed_count(G, subset))
            else:
                out.append(check_inverse_closed_count(G, 0))
                if G.n <= INVERSE_CLOSED_CAP:
                    out.append(check_inverse_closed_count(G, G.full_mask))
        return out
    if lemma == "L2.5":
        return [check_parity_counts(k) for k in range(1, PARITY_CAP + 1)]
    if lemma == "L2.6":
        return [check_binomial_bound(k) for k in range(1, BINOMIAL_CAP + 1)]
    if lemma == "L2.4bc":
        return [check_group_size_bounds(G) for G in ([group] if group else _groups(SIZE_BOUND_CAP))]
    if lemma == "L2.7":
        return [check_inversion_bounds(G) for G in ([group] if group else _groups(INVERSION_CAP))]
    if lemma == "L2.8":
        return [check_double_coset_bound_all(G) for G in ([group] if group else _groups(INVERSION_CAP))]
    if lemma == "L2.9":
        if group:
            from .graphs import right_regular_action
            M = PermGroup.from_generators(right_regular_action(group, 2), 2 * group.n)
            return [check_bipartite_double_coset(M, f"R({group.name}) on two copies")]
        return [check_bipartite_double_coset(M, name) for name, M in default_bipartite_groups()]
    if lemma == "L5.1":
        if group:
            cores = [core] if core is not None else _fiber_cases(group)
            return [check_odd_quotient_fibers(group, C) for C in cores]
        out = []
        for G in _groups(8):
            out.extend(check_odd_quotient_fibers(G, C) for C in _fiber_cases(G))
        for spec, C in (("D6", None), ("Dic(C6,3)", None), ("C2^4", 0b11)):
            G = make_group(spec)
            cases = [C] if C is not None else _fiber_cases(G)[:1]
            out.extend(check_odd_quotient_fibers(G, c) for c in cases)
        return out
    cls = CLASS_OF[lemma]
    if group:
        return [check_orbit_bound(group, cls)]
    out = []
    for G in _groups(ORBIT_CAP):
        info = classify_group(G)
        member = {"abelian-exp>2": info.is_abelian_exp_gt_2, "q8xE2": info.is_q8_times_e2,
                  "gen-dicyclic-not-q8e2": info.is_generalized_dicyclic and not info.is_q8_times_e2}[cls]
        if member:
            out.append(check_orbit_bound(G, cls))
    return out


def run_all(ids: Iterable[str] = ORACLE_IDS) -> list[OracleResult]:
    out = []
    for lemma in ids:
        out.extend(run_oracle(lemma))
    return out
