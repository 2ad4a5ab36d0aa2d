"""Automorphism groups of coloured digraphs by individualization-refinement.

The search walks one path of the refinement tree down to a discrete
colouring. The vertices individualized along that path form a base of
``Aut``; for each level, from the deepest up, every other vertex of the
target cell is tested for membership in the base point's orbit by looking
for a leaf in its subtree that yields an automorphism. Automorphisms found
this way, together with any verified seed automorphisms, form a strong
generating set for that base, so the order is the product of the basic
orbit lengths and no Schreier-Sims pass is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from .graphs import (ColoredDigraph, SetMatrix, haar_graph, cayley_digraph, iota_permutation,
                     m_cayley_digraph, part_coloring, right_regular_action)
from .groups import GroupError, GroupTable
from .perm import Perm, PermGroup, orbit_of


@dataclass
class RefinementTrace:
    initial_colors: tuple[int, ...]
    decisions: list[tuple[int, int]] = field(default_factory=list)  # (target cell, vertex)
    generators: list[Perm] = field(default_factory=list)
    leaves_visited: int = 0


@dataclass
class AutResult:
    order: int
    base: list[int]
    strong_generators: list[Perm]
    trace: RefinementTrace
    complete: bool = True  # False when the search stopped early; ``order`` is then a lower bound


class _Refiner:
    def __init__(self, graph: ColoredDigraph):
        a = graph.adj.astype(np.int32)
        self.v = graph.v
        self.adj = a
        # out- and in-neighbour counts in one product
        self.both = a if graph.undirected else np.vstack([a, a.T])

    def refine(self, colors: np.ndarray) -> tuple[np.ndarray, bytes]:
        """Iterate the colour signature to a fixpoint; return colours and the cell quotient."""
        v = self.v
        k = int(colors.max()) + 1
        while True:
            onehot = np.zeros((v, k), dtype=np.int32)
            onehot[np.arange(v), colors] = 1
            cnt = self.both @ onehot
            if cnt.shape[0] != v:
                cnt = np.hstack([cnt[:v], cnt[v:]])
            sig = np.hstack([colors[:, None], cnt])
            uniq, new = np.unique(sig, axis=0, return_inverse=True)
            new = new.reshape(-1)
            if len(uniq) == k:
                return new, uniq.tobytes()
            colors, k = new, len(uniq)

    @staticmethod
    def individualize(colors: np.ndarray, w: int) -> np.ndarray:
        out = 2 * colors + 1
        out[w] -= 1
        _, ranks = np.unique(out, return_inverse=True)
        return ranks.reshape(-1)

    @staticmethod
    def target_cell(colors: np.ndarray) -> np.ndarray | None:
        sizes = np.bincount(colors)
        big = np.flatnonzero(sizes > 1)
        if len(big) == 0:
            return None
        c = big[np.argmin(sizes[big])]  # first of the smallest non-singleton cells
        return np.flatnonzero(colors == c)


def _initial_colors(colors: Sequence[int]) -> np.ndarray:
    _, ranks = np.unique(np.asarray(colors), return_inverse=True)
    return ranks.reshape(-1)


def search_automorphisms(graph: ColoredDigraph, seeds: Sequence[Perm] = (),
                         stop_above: int | None = None) -> AutResult:
    """Exact ``Aut(graph)`` as a base with strong generators and the group order.

    ``seeds`` are optional known automorphisms; each is verified and then
    used for orbit pruning. With ``stop_above`` set, the search returns as
    soon as the order is proven to exceed it (``complete`` is then False).
    """
    v = graph.v
    if v < 1:
        raise ValueError("graph must have at least one vertex")
    ref = _Refiner(graph)
    adj = graph.adj
    col0 = np.asarray(graph.colors)
    trace = RefinementTrace(tuple(graph.colors))

    def is_aut(p: np.ndarray) -> bool:
        return bool(np.array_equal(col0[p], col0)) and bool(np.array_equal(adj[np.ix_(p, p)], adj))

    gens: list[Perm] = []
    for s in seeds:
        s = tuple(int(x) for x in s)
        if not is_aut(np.asarray(s, dtype=np.intp)):
            raise ValueError("seed permutation is not an automorphism")
        if s != tuple(range(v)):
            gens.append(s)

    # first path
    colors, inv = ref.refine(_initial_colors(graph.colors))
    path_colors, path_inv, path_cells, path_pts = [colors], [inv], [], []
    while True:
        cell = ref.target_cell(colors)
        if cell is None:
            break
        w = int(cell[0])
        trace.decisions.append((int(colors[w]), w))
        path_cells.append(cell)
        path_pts.append(w)
        colors, inv = ref.refine(ref.individualize(colors, w))
        path_colors.append(colors)
        path_inv.append(inv)
    depth = len(path_pts)
    # leaf colouring -> vertex at each position
    first_leaf_pos = path_colors[-1]

    def leaf_perm(leaf: np.ndarray) -> np.ndarray:
        at = np.empty(v, dtype=np.intp)
        at[leaf] = np.arange(v)
        return at[first_leaf_pos]

    def explore(colors: np.ndarray, level: int) -> Perm | None:
        # colors: node at ``level`` (already refined, invariant checked)
        cell = ref.target_cell(colors)
        if cell is None:
            trace.leaves_visited += 1
            p = leaf_perm(colors)
            return tuple(p.tolist()) if is_aut(p) else None
        for x in cell.tolist():
            c, inv = ref.refine(ref.individualize(colors, x))
            if inv != path_inv[level + 1]:
                continue
            found = explore(c, level + 1)
            if found is not None:
                return found
        return None

    lengths = [1] * depth
    for i in range(depth - 1, -1, -1):
        prefix = path_pts[:i]
        usable = [g for g in gens if all(g[b] == b for b in prefix)]
        b = path_pts[i]
        orbit = set(orbit_of(b, usable))
        failed: set[int] = set()
        for w in path_cells[i].tolist():
            if w in orbit or w in failed:
                continue
            c, inv = ref.refine(ref.individualize(path_colors[i], w))
            g = explore(c, i + 1) if inv == path_inv[i + 1] else None
            if g is None:
                failed.update(orbit_of(w, usable))
            else:
                gens.append(g)
                trace.generators.append(g)
                usable.append(g)
                orbit = set(orbit_of(b, usable))
        lengths[i] = len(orbit)
        if stop_above is not None and i > 0:
            # the level-0 orbit is at least the orbit of the known automorphisms
            lower = prod(lengths[i:]) * len(orbit_of(path_pts[0], gens))
            if lower > stop_above:
                return AutResult(lower, list(path_pts), gens, trace, complete=False)
    return AutResult(prod(lengths), list(path_pts), gens, trace)


def automorphism_group(graph: ColoredDigraph, seeds: Sequence[Perm] = ()) -> PermGroup:
    res = search_automorphisms(graph, seeds)
    grp = PermGroup.from_bsgs(graph.v, res.base, res.strong_generators)
    assert grp.order == res.order
    return grp


def aut_order(graph: ColoredDigraph, seeds: Sequence[Perm] = ()) -> int:
    return search_automorphisms(graph, seeds).order


def aut_order_is(graph: ColoredDigraph, target: int, seeds: Sequence[Perm] = ()) -> bool:
    """``|Aut(graph)| == target``, stopping early once the order is known to be larger."""
    res = search_automorphisms(graph, seeds, stop_above=target)
    return res.complete and res.order == target


# ---------------------------------------------------------------------------
# representation predicates


def _haar_seeds(G: GroupTable) -> list[Perm]:
    seeds = right_regular_action(G, 2)
    if G.is_abelian:
        seeds.append(iota_permutation(G))
    return seeds


def haar_aut_order(G: GroupTable, S: int) -> int:
    return aut_order(haar_graph(G, S), _haar_seeds(G))


def aut_plus_haar(G: GroupTable, S: int) -> PermGroup:
    """Automorphisms of the Haar graph that fix both parts setwise."""
    graph = haar_graph(G, S).recolored(part_coloring(G.n, 2))
    return automorphism_group(graph, right_regular_action(G, 2))


def aut_plus_haar_order(G: GroupTable, S: int) -> int:
    graph = haar_graph(G, S).recolored(part_coloring(G.n, 2))
    return aut_order(graph, right_regular_action(G, 2))


def cayley_aut_order(G: GroupTable, S: int) -> int:
    return aut_order(cayley_digraph(G, S), right_regular_action(G, 1))


def is_drr(G: GroupTable, S: int) -> bool:
    return aut_order_is(cayley_digraph(G, S), G.n, right_regular_action(G, 1))


def is_grr(G: GroupTable, S: int) -> bool:
    if not G.is_inverse_closed(S):
        raise GroupError("GRR test needs an inverse-closed connection set")
    return aut_order_is(cayley_digraph(G, S), G.n, right_regular_action(G, 1))


def is_hgr(G: GroupTable, S: int) -> bool:
    return aut_order_is(haar_graph(G, S), G.n, _haar_seeds(G))


def is_haar_optimal_abelian(G: GroupTable, S: int) -> bool:
    """For abelian ``G``: true when the part-preserving automorphisms are just ``G``."""
    if not G.is_abelian:
        raise GroupError(f"{G.name} is not abelian")
    graph = haar_graph(G, S).recolored(part_coloring(G.n, 2))
    return aut_order_is(graph, G.n, right_regular_action(G, 2))


MSR_KINDS = ("digraph", "graph", "skew")


def msr_aut_order(G: GroupTable, SM: SetMatrix) -> int:
    return aut_order(m_cayley_digraph(G, SM), right_regular_action(G, SM.m))


def is_msr(G: GroupTable, SM: SetMatrix, kind: str) -> bool:
    """DmSR (``digraph``), GmSR (``graph``) or m-PGSR (``skew``) test."""
    if kind not in MSR_KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if kind == "graph" and not SM.is_inverse_closed(G):
        raise GroupError("GmSR test needs an inverse-closed set-matrix")
    if kind == "skew" and not SM.is_skew(G):
        raise GroupError("m-PGSR test needs a skew set-matrix")
    return aut_order_is(m_cayley_digraph(G, SM), G.n, right_regular_action(G, SM.m))
