"""Cayley digraphs, Haar graphs, m-Cayley digraphs and the maps between them.

Vertex ``(g, i)`` of any multi-orbit construction (blocks numbered from 1)
lives at index ``(i - 1) * n + g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .groups import GroupError, GroupTable, elements_of, format_mask, parse_mask
from .perm import Perm, check_perm


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ColoredDigraph:
    """Dense digraph with vertex colours.

    ``adj[u, w] == 1`` means there is an arc ``u -> w``. Loops are allowed.
    """

    adj: np.ndarray
    colors: tuple[int, ...]
    undirected: bool

    def __post_init__(self):
        adj = np.ascontiguousarray(self.adj, dtype=np.uint8)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise GraphError("adjacency matrix must be square")
        if len(self.colors) != adj.shape[0]:
            raise GraphError("one colour per vertex required")
        if self.undirected and not np.array_equal(adj, adj.T):
            raise GraphError("undirected graph with asymmetric adjacency")
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))

    @property
    def v(self) -> int:
        return self.adj.shape[0]

    def bitrows(self) -> list[int]:
        """Row ``u`` as an int with bit ``w`` set for each arc ``u -> w``."""
        weights = [1 << w for w in range(self.v)]
        return [sum(weights[w] for w in np.flatnonzero(row)) for row in self.adj]

    def has_arc(self, u: int, w: int) -> bool:
        return bool(self.adj[u, w])

    def out_degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)

    def same_as(self, other: "ColoredDigraph") -> bool:
        """Equality of labelled graphs (arcs and colours)."""
        return (self.colors == other.colors and self.adj.shape == other.adj.shape
                and bool(np.array_equal(self.adj, other.adj)))

    def recolored(self, colors: Sequence[int]) -> "ColoredDigraph":
        return ColoredDigraph(self.adj, tuple(colors), self.undirected)

    def relabeled(self, p: Perm) -> "ColoredDigraph":
        """Image under the vertex map ``u -> p[u]``."""
        q = np.empty(self.v, dtype=np.intp)
        q[np.asarray(p)] = np.arange(self.v)  # q = p^-1
        colors = tuple(self.colors[x] for x in q)
        return ColoredDigraph(self.adj[np.ix_(q, q)], colors, self.undirected)

    def is_automorphism(self, p: Perm) -> bool:
        idx = np.asarray(p, dtype=np.intp)
        if any(self.colors[i] != self.colors[int(x)] for i, x in enumerate(idx)):
            return False
        return bool(np.array_equal(self.adj[np.ix_(idx, idx)], self.adj))

    def edges(self) -> list[tuple[int, int]]:
        """Arcs in lexicographic order; an undirected graph lists each edge once as u <= w."""
        us, ws = np.nonzero(self.adj)
        pairs = zip(us.tolist(), ws.tolist())
        if self.undirected:
            return [(u, w) for u, w in pairs if u <= w]
        return list(pairs)

    def to_edge_list(self) -> str:
        return "".join(f"{u} {w}\n" for u, w in self.edges())

    def to_dot(self, name: str = "G") -> str:
        arrow = "--" if self.undirected else "->"
        lines = [f"{'graph' if self.undirected else 'digraph'} {name} {{"]
        for u in range(self.v):
            lines.append(f"  {u} [color={self.colors[u]}];")
        for u, w in self.edges():
            lines.append(f"  {u} {arrow} {w};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def from_edges(v: int, edges, undirected: bool = True, colors=None) -> ColoredDigraph:
    adj = np.zeros((v, v), dtype=np.uint8)
    for u, w in edges:
        adj[u, w] = 1
        if undirected:
            adj[w, u] = 1
    return ColoredDigraph(adj, tuple(colors) if colors is not None else (0,) * v, undirected)


# ---------------------------------------------------------------------------
# set-matrices


@dataclass(frozen=True)
class SetMatrix:
    """An ``m x m`` array of subsets (bitmasks) of a group of order ``n``."""

    entries: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        m = len(self.entries)
        if m < 1 or any(len(row) != m for row in self.entries):
            raise GraphError("set-matrix must be square and non-empty")
        if any(e < 0 or e >> self.n for row in self.entries for e in row):
            raise GraphError("set-matrix entry outside the group")

    @property
    def m(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.entries[i][j]

    def is_inverse_closed(self, G: GroupTable) -> bool:
        return all(self.entries[j][i] == G.inverse_mask(self.entries[i][j])
                   for i in range(self.m) for j in range(i, self.m))

    def is_skew(self, G: GroupTable) -> bool:
        return self.is_inverse_closed(G) and all(self.entries[i][i] == 0 for i in range(self.m))

    def to_json(self) -> list[list[str]]:
        return [[format_mask(e) for e in row] for row in self.entries]

    @classmethod
    def from_json(cls, rows, n: int) -> "SetMatrix":
        try:
            return cls(tuple(tuple(parse_mask(str(e), n) for e in row) for row in rows), n)
        except GroupError as exc:
            raise GraphError(str(exc)) from exc

    @classmethod
    def skew_from_pairs(cls, G: GroupTable, m: int, upper: dict) -> "SetMatrix":
        """Skew matrix from its entries above the diagonal, keyed by ``(i, j)``, i < j."""
        ent = [[0] * m for _ in range(m)]
        for (i, j), s in upper.items():
            ent[i][j] = s
            ent[j][i] = G.inverse_mask(s)
        return cls(tuple(map(tuple, ent)), G.n)


@dataclass(frozen=True)
class BlockPartition:
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        pts = sorted(x for b in self.blocks for x in b)
        if pts != list(range(len(pts))) or any(len(b) == 0 for b in self.blocks):
            raise GraphError("blocks must partition 0..v-1")

    @property
    def v(self) -> int:
        return sum(len(b) for b in self.blocks)


# ---------------------------------------------------------------------------
# constructions


def _indices(mask: int) -> np.ndarray:
    return np.array(elements_of(mask), dtype=np.intp)


def cayley_digraph(G: GroupTable, S: int) -> ColoredDigraph:
    """Arc ``g -> h`` exactly when ``h g^-1`` lies in ``S``."""
    n = G.n
    adj = np.zeros((n, n), dtype=np.uint8)
    s = _indices(S)
    if len(s):
        # h = s g
        adj[np.arange(n)[None, :].repeat(len(s), 0), G.mul[s, :]] = 1
    return ColoredDigraph(adj, (0,) * n, G.is_inverse_closed(S))


def haar_graph(G: GroupTable, S: int) -> ColoredDigraph:
    """Bipartite graph with ``(g,1) ~ (h,2)`` exactly when ``h g^-1`` lies in ``S``."""
    n = G.n
    adj = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    s = _indices(S)
    if len(s):
        rows = np.arange(n)[None, :].repeat(len(s), 0)
        cols = n + G.mul[s, :]
        adj[rows, cols] = 1
        adj[cols, rows] = 1
    return ColoredDigraph(adj, (0,) * (2 * n), True)


def m_cayley_digraph(G: GroupTable, SM: SetMatrix) -> ColoredDigraph:
    """Arcs ``(g,i) -> (sg,j)`` for every ``s`` in ``S[i][j]``."""
    n, m = G.n, SM.m
    if SM.n != n:
        raise GraphError("set-matrix belongs to a group of a different order")
    adj = np.zeros((m * n, m * n), dtype=np.uint8)
    base = np.arange(n)
    for i in range(m):
        for j in range(m):
            s = _indices(SM[i, j])
            if len(s):
                adj[i * n + base[None, :].repeat(len(s), 0), j * n + G.mul[s, :]] = 1
    return ColoredDigraph(adj, (0,) * (m * n), SM.is_inverse_closed(G))


def standard_double_cover(D: ColoredDigraph) -> ColoredDigraph:
    """Edge ``{(g,1),(h,2)}`` for every arc ``(g,h)`` of ``D``."""
    v = D.v
    adj = np.zeros((2 * v, 2 * v), dtype=np.uint8)
    adj[:v, v:] = D.adj
    adj[v:, :v] = D.adj.T
    return ColoredDigraph(adj, (0,) * (2 * v), True)


def coset_blocks(G: GroupTable, C: int, m: int = 2) -> BlockPartition:
    """Orbits of right multiplication by the subgroup ``C`` on ``m`` copies of ``G``."""
    if not G.is_subgroup(C):
        raise GroupError("coset blocks need a subgroup")
    c = _indices(C)
    blocks = []
    for i in range(m):
        seen = 0
        for g in range(G.n):
            if (seen >> g) & 1:
                continue
            coset = sorted(int(x) for x in G.mul[g, c])
            for x in coset:
                seen |= 1 << x
            blocks.append(tuple(i * G.n + x for x in coset))
    return BlockPartition(tuple(blocks))


def odd_quotient(Gr: ColoredDigraph, B: BlockPartition) -> ColoredDigraph:
    """Digraph on the blocks with ``B -> C`` when each vertex of ``B`` has an odd
    number of neighbours in ``C``.

    Every vertex of a block must see the same number of neighbours in each
    other block; otherwise :class:`GraphError` is raised.
    """
    if B.v != Gr.v:
        raise GraphError("partition does not cover the vertex set")
    k = len(B.blocks)
    member = np.zeros((Gr.v, k), dtype=np.int64)
    for c, block in enumerate(B.blocks):
        member[list(block), c] = 1
    counts = Gr.adj.astype(np.int64) @ member  # vertex -> neighbours in each block
    quot = np.zeros((k, k), dtype=np.uint8)
    for b, block in enumerate(B.blocks):
        rows = counts[list(block)]
        if not np.all(rows == rows[0]):
            raise GraphError(f"block {b} is not equitable")
        quot[b] = rows[0] % 2
    sizes = {len(b) for b in B.blocks}
    return ColoredDigraph(quot, (0,) * k, Gr.undirected and len(sizes) == 1)


# ---------------------------------------------------------------------------
# canonical actions


def right_mult_perm(G: GroupTable, x: int, m: int) -> Perm:
    """``R(x)``: ``(g, i) -> (gx, i)`` on ``m`` copies of ``G``."""
    col = G.mul[:, x]
    return tuple(int(i * G.n + col[g]) for i in range(m) for g in range(G.n))


def right_regular_action(G: GroupTable, m: int = 1) -> list[Perm]:
    """Generators ``R(x)`` for ``x`` in a generating set of ``G``."""
    if m < 1:
        raise GraphError("need at least one copy of the group")
    return [right_mult_perm(G, x, m) for x in G.generating_set]


def iota_permutation(G: GroupTable) -> Perm:
    """Swap the parts of a Haar vertex set, sending ``(g, e)`` to ``(g^-1, -e)``."""
    if not G.is_abelian:
        raise GroupError(f"{G.name} is not abelian")
    n = G.n
    inv = G.inv.tolist()
    return check_perm([n + inv[g] for g in range(n)] + [inv[g] for g in range(n)], 2 * n)


def part_coloring(n: int, m: int) -> tuple[int, ...]:
    return tuple(i for i in range(m) for _ in range(n))
