"""Exhaustive and Monte Carlo censuses over connection-set families.

Every family member is addressed by a ``d``-bit index. Exhaustive runs walk
``0 .. 2^d - 1``; Monte Carlo sample ``k`` draws its index from a Philox
stream keyed by the seed at counter ``k``, so the sample sequence does not
depend on how work is split between processes.
"""

from __future__ import annotations

import csv
import multiprocessing
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

import numpy as np
from scipy.stats import binomtest

from . import autgroup
from .bounds import eval_bounds
from .graphs import SetMatrix
from .groups import GroupError, GroupTable

EXHAUSTIVE_MAX_BITS = 24
DEFAULT_EPS = 0.1
CHUNK = 512  # fixed work unit; independent of the worker count


class CensusError(ValueError):
    pass


FAMILY_KINDS = ("subsets", "inverse-closed", "matrices", "inverse-closed-matrices", "skew")
SET_KINDS = ("subsets", "inverse-closed")


def inverse_classes(G: GroupTable) -> list[int]:
    """Masks ``{g, g^-1}``, ordered by least element; there are ``c(G)`` of them."""
    seen = 0
    out = []
    inv = G.inv.tolist()
    for g in range(G.n):
        if not (seen >> g) & 1:
            cls = (1 << g) | (1 << inv[g])
            seen |= cls
            out.append(cls)
    return out


@dataclass(frozen=True, eq=False)
class FamilySpec:
    kind: str
    group: GroupTable
    m: int = 1

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise CensusError(f"unknown family {self.kind!r}; expected one of {', '.join(FAMILY_KINDS)}")
        if self.m < 1:
            raise CensusError("m must be at least 1")
        if self.kind in SET_KINDS and self.m != 1:
            raise CensusError(f"family {self.kind!r} takes m = 1")
        object.__setattr__(self, "_classes", inverse_classes(self.group))

    @property
    def c(self) -> int:
        return len(self._classes)

    @property
    def bits(self) -> int:
        n, m, c = self.group.n, self.m, self.c
        return {
            "subsets": n,
            "inverse-closed": c,
            "matrices": m * m * n,
            "inverse-closed-matrices": comb(m, 2) * n + m * c,
            "skew": comb(m, 2) * n,
        }[self.kind]

    @property
    def size(self) -> int:
        return 1 << self.bits

    def _classes_to_mask(self, bits: int) -> int:
        out = 0
        for k, cls in enumerate(self._classes):
            if (bits >> k) & 1:
                out |= cls
        return out

    def decode(self, index: int):
        """Family member with the given index: a mask for set families, else a SetMatrix."""
        if not 0 <= index < self.size:
            raise CensusError(f"index {index} outside the family of size 2^{self.bits}")
        G, n, m = self.group, self.group.n, self.m
        full = (1 << n) - 1
        if self.kind == "subsets":
            return index
        if self.kind == "inverse-closed":
            return self._classes_to_mask(index)
        ent = [[0] * m for _ in range(m)]
        pos = 0

        def take(width):
            nonlocal pos
            val = (index >> pos) & ((1 << width) - 1)
            pos += width
            return val

        if self.kind == "matrices":
            for i in range(m):
                for j in range(m):
                    ent[i][j] = take(n) & full
        else:
            for i in range(m):
                for j in range(i, m):
                    if i == j:
                        if self.kind == "inverse-closed-matrices":
                            ent[i][i] = self._classes_to_mask(take(self.c))
                    else:
                        s = take(n)
                        ent[i][j] = s
                        ent[j][i] = G.inverse_mask(s)
        return SetMatrix(tuple(map(tuple, ent)), n)


def sample_index(F: FamilySpec, seed: int, k: int) -> int:
    """Index of Monte Carlo sample ``k``: uniform over ``2^d`` from the Philox stream (seed, k)."""
    d = F.bits
    if d == 0:
        return 0
    words = (d + 63) // 64
    gen = np.random.Philox(key=seed, counter=k << 128)
    raw = gen.random_raw(words)
    val = 0
    for w, x in enumerate(raw.tolist()):
        val |= int(x) << (64 * w)
    return val & ((1 << d) - 1)


def sample_family(F: FamilySpec, seed: int, k: int):
    idx = sample_index(F, seed, k)
    return idx, F.decode(idx)


# ---------------------------------------------------------------------------
# predicates


@dataclass(frozen=True)
class Predicate:
    name: str
    kinds: tuple[str, ...]
    test: Callable  # (G, obj) -> bool
    order: Callable  # (G, obj) -> int; test(G, obj) == (order(G, obj) == |G|)
    needs_abelian: bool = False


PREDICATES = {
    p.name: p for p in (
        Predicate("drr", SET_KINDS, autgroup.is_drr, autgroup.cayley_aut_order),
        Predicate("grr", ("inverse-closed",), autgroup.is_grr, autgroup.cayley_aut_order),
        Predicate("hgr", SET_KINDS, autgroup.is_hgr, autgroup.haar_aut_order),
        Predicate("haar-optimal", SET_KINDS, autgroup.is_haar_optimal_abelian,
                  autgroup.aut_plus_haar_order, needs_abelian=True),
        Predicate("dmsr", ("matrices", "inverse-closed-matrices", "skew"),
                  lambda G, SM: autgroup.is_msr(G, SM, "digraph"), autgroup.msr_aut_order),
        Predicate("gmsr", ("inverse-closed-matrices", "skew"),
                  lambda G, SM: autgroup.is_msr(G, SM, "graph"), autgroup.msr_aut_order),
        Predicate("mpgsr", ("skew",),
                  lambda G, SM: autgroup.is_msr(G, SM, "skew"), autgroup.msr_aut_order),
    )
}


def get_predicate(name: str, F: FamilySpec) -> Predicate:
    try:
        p = PREDICATES[name]
    except KeyError:
        raise CensusError(f"unknown predicate {name!r}; expected one of {', '.join(PREDICATES)}") from None
    if F.kind not in p.kinds:
        raise CensusError(f"predicate {name!r} does not apply to family {F.kind!r}")
    if p.needs_abelian and not F.group.is_abelian:
        raise GroupError(f"predicate {name!r} needs an abelian group")
    return p


# ---------------------------------------------------------------------------
# reports


@dataclass
class CensusReport:
    group: str
    family: str
    m: int
    bits: int
    predicate: str
    mode: str
    total: int
    samples: int
    hits: int
    misses: int
    proportion: float
    wilson_ci_95: tuple[float, float]
    degenerate_count: int  # members with every free bit 0 or every free bit 1
    bound_comparison: dict | None
    seed: int | None = None
    workers: int = 1
    wall_time: float = 0.0
    trace: list[tuple[int, str, int]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "group": self.group, "family": self.family, "m": self.m, "bits": self.bits,
            "predicate": self.predicate, "mode": self.mode,
            "total": str(self.total), "samples": str(self.samples),
            "hits": str(self.hits), "misses": str(self.misses),
            "proportion": self.proportion, "wilson_ci_95": list(self.wilson_ci_95),
            "degenerate_count": str(self.degenerate_count),
            "bound_comparison": self.bound_comparison,
            "seed": None if self.seed is None else str(self.seed),
            "workers": self.workers, "wall_time": self.wall_time,
        }


def wilson_interval(hits: int, trials: int) -> tuple[float, float]:
    if trials < 1:
        raise CensusError("need at least one trial")
    ci = binomtest(hits, trials).proportion_ci(0.95, method="wilson")
    lo = 0.0 if hits == 0 else float(ci.low)
    hi = 1.0 if hits == trials else float(ci.high)
    return lo, hi


def bound_comparison(F: FamilySpec, eps: float = DEFAULT_EPS) -> dict | None:
    n = F.group.n
    if n < 2:
        return None
    b = eval_bounds(n, eps, F.m)
    out = {"eps": eps, "msr_bound": b.msr_bound, "msr_bound_vacuous": b.msr_bound_vacuous}
    if F.kind in SET_KINDS:
        out.update(f_eps=b.f_eps, h_eps=b.h_eps, haar_bound_log2=b.haar_bound_log2,
                   haar_bound_vacuous=b.haar_bound_vacuous)
    return out


def write_trace_csv(report: CensusReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["family_index", "predicate", "aut_order"])
        for idx, name, order in report.trace:
            w.writerow([idx, name, order])


# ---------------------------------------------------------------------------
# workers


def _run_chunk(args) -> list[tuple[bool, int | None]]:
    F, pname, indices, trace = args
    p = PREDICATES[pname]
    G = F.group
    out = []
    for idx in indices:
        obj = F.decode(idx)
        if trace:
            order = p.order(G, obj)
            out.append((order == G.n, order))
        else:
            out.append((p.test(G, obj), None))
    return out


def _map_chunks(jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [_run_chunk(j) for j in jobs]
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        return list(pool.map(_run_chunk, jobs))


def _evaluate(F: FamilySpec, pname: str, distinct: Sequence[int], trace: bool,
              workers: int) -> dict[int, tuple[bool, int | None]]:
    """Predicate value (and order when tracing) for each distinct family index."""
    jobs = [(F, pname, distinct[a:a + CHUNK], trace) for a in range(0, len(distinct), CHUNK)]
    table = {}
    for job, res in zip(jobs, _map_chunks(jobs, workers)):
        table.update(zip(job[2], res))
    return table


def _tally(F: FamilySpec, pname: str, indices: Sequence[int], table: dict,
           trace: bool) -> tuple[int, int, list]:
    top = F.size - 1
    hits = sum(table[i][0] for i in indices)
    degenerate = sum(1 for i in indices if i == 0 or i == top)
    rows = [(i, pname, table[i][1]) for i in indices] if trace else []
    return hits, degenerate, rows


def exhaustive_census(F: FamilySpec, predicate: str, workers: int = 1, trace: bool = False,
                      max_bits: int = EXHAUSTIVE_MAX_BITS) -> CensusReport:
    p = get_predicate(predicate, F)
    d = F.bits
    if d > max_bits:
        raise CensusError(f"family has 2^{d} members, above the exhaustive cap 2^{max_bits}; "
                          "use a Monte Carlo census or raise the cap")
    t0 = time.perf_counter()
    total = F.size
    indices = range(total)
    table = _evaluate(F, p.name, indices, trace, workers)
    hits, degenerate, rows = _tally(F, p.name, indices, table, trace)
    prop = hits / total
    return CensusReport(
        group=F.group.name, family=F.kind, m=F.m, bits=d, predicate=p.name, mode="exhaustive",
        total=total, samples=total, hits=hits, misses=total - hits, proportion=prop,
        wilson_ci_95=(prop, prop), degenerate_count=degenerate, bound_comparison=bound_comparison(F),
        seed=None, workers=workers, wall_time=time.perf_counter() - t0, trace=rows)


def monte_carlo_census(F: FamilySpec, predicate: str, samples: int, seed: int, workers: int = 1,
                       trace: bool = False) -> CensusReport:
    """i.i.d. census; repeated draws are evaluated once and counted with multiplicity."""
    p = get_predicate(predicate, F)
    if samples < 1:
        raise CensusError("samples must be at least 1")
    if not 0 <= seed < 1 << 64:
        raise CensusError("seed must be a 64-bit unsigned integer")
    t0 = time.perf_counter()
    indices = [sample_index(F, seed, k) for k in range(samples)]
    table = _evaluate(F, p.name, sorted(set(indices)), trace, workers)
    hits, degenerate, rows = _tally(F, p.name, indices, table, trace)
    return CensusReport(
        group=F.group.name, family=F.kind, m=F.m, bits=F.bits, predicate=p.name, mode="monte-carlo",
        total=F.size, samples=samples, hits=hits, misses=samples - hits, proportion=hits / samples,
        wilson_ci_95=wilson_interval(hits, samples), degenerate_count=degenerate,
        bound_comparison=bound_comparison(F), seed=seed, workers=workers,
        wall_time=time.perf_counter() - t0, trace=rows)


def find_grr_witness(max_order: int = 32, seed: int = 0x5EED, tries: int = 256) -> dict | None:
    """First catalog group outside the abelian and generalized dicyclic classes with a GRR.

    Small families are searched exhaustively, larger ones by ``tries`` Philox samples.
    """
    from .groups import catalog_groups, classify_group, format_mask

    for G in catalog_groups(max_order):
        info = classify_group(G)
        if G.is_abelian or info.is_generalized_dicyclic:
            continue
        F = FamilySpec("inverse-closed", G)
        if F.bits <= 12:
            indices = range(F.size)
        else:
            indices = (sample_index(F, seed, k) for k in range(tries))
        for idx in indices:
            S = F.decode(idx)
            if autgroup.is_grr(G, S):
                return {"group": G.name, "order": G.n, "index": idx, "S": format_mask(S),
                        "aut_order": autgroup.cayley_aut_order(G, S)}
    return None
