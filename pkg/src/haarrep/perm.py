"""Permutations and permutation groups given by a base and strong generating set.

A permutation on ``d`` points is a tuple ``p`` of images, ``p[i]`` being the
image of ``i``. Products act left to right: ``compose(p, q)`` applies ``p``
first, then ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterator, Sequence

Perm = tuple[int, ...]


def identity(d: int) -> Perm:
    return tuple(range(d))


def compose(p: Perm, q: Perm) -> Perm:
    return tuple(q[x] for x in p)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def is_identity(p: Perm) -> bool:
    return all(i == x for i, x in enumerate(p))


def check_perm(p: Sequence[int], d: int | None = None) -> Perm:
    p = tuple(int(x) for x in p)
    if d is not None and len(p) != d:
        raise ValueError(f"permutation has degree {len(p)}, expected {d}")
    if sorted(p) != list(range(len(p))):
        raise ValueError("not a permutation")
    return p


def from_cycles(d: int, cycles) -> Perm:
    out = list(range(d))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            out[a] = b
    return check_perm(out, d)


def cycles(p: Perm) -> list[tuple[int, ...]]:
    """Cycle decomposition, fixed points included, ordered by least point."""
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(tuple(cyc))
    return out


def cycle_notation(p: Perm) -> str:
    parts = ["(" + " ".join(map(str, c)) + ")" for c in cycles(p) if len(c) > 1]
    return "".join(parts) or "()"


def orbit_count_of_cycle(p: Perm) -> int:
    """Number of orbits of ``<p>``, i.e. cycles of ``p`` counting fixed points."""
    return len(cycles(p))


def fixed_points(p: Perm) -> list[int]:
    return [i for i, x in enumerate(p) if i == x]


def orbits_of(gens: Sequence[Perm], d: int) -> list[list[int]]:
    """Orbit partition of ``<gens>``, blocks sorted and ordered by least point."""
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, x in enumerate(g):
            a, b = find(i), find(x)
            if a != b:
                if a < b:
                    parent[b] = a
                else:
                    parent[a] = b
    blocks: dict[int, list[int]] = {}
    for i in range(d):
        blocks.setdefault(find(i), []).append(i)
    return [blocks[k] for k in sorted(blocks)]


def orbit_of(point: int, gens: Sequence[Perm]) -> list[int]:
    seen = {point}
    out = [point]
    for x in out:
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                out.append(y)
    return out


@dataclass
class _Level:
    point: int
    gens: list[Perm] = field(default_factory=list)
    transversal: dict[int, Perm] = field(default_factory=dict)


class PermGroup:
    """A permutation group with a stabilizer chain.

    Build with :meth:`from_generators` (deterministic Schreier-Sims) or
    :meth:`from_bsgs` when a base and strong generating set are already
    known. The group is treated as immutable once built.
    """

    def __init__(self, degree: int, generators: Sequence[Perm], levels: list[_Level]):
        self.degree = degree
        self.generators = tuple(generators)
        self._levels = levels

    # -- construction -------------------------------------------------------

    @classmethod
    def from_generators(cls, gens: Sequence[Sequence[int]], d: int) -> "PermGroup":
        gens = [check_perm(g, d) for g in gens]
        strong = [g for g in gens if not is_identity(g)]
        base: list[int] = []
        for g in strong:
            if all(g[b] == b for b in base):
                base.append(next(i for i in range(d) if g[i] != i))
        levels = [_Level(b) for b in base]

        def refresh(i):
            lv = levels[i]
            prefix = base[:i]
            lv.gens = [g for g in strong if all(g[b] == b for b in prefix)]
            lv.transversal = _transversal(lv.point, lv.gens, d)

        for i in range(len(levels)):
            refresh(i)
        i = len(levels) - 1
        while i >= 0:
            lv = levels[i]
            restart = None
            for beta in sorted(lv.transversal):
                u = lv.transversal[beta]
                for s in lv.gens:
                    us = compose(u, s)
                    h = compose(us, inverse(lv.transversal[us[lv.point]]))
                    if is_identity(h):
                        continue
                    residue, j = _sift(h, levels, i + 1)
                    if j < len(levels) or not is_identity(residue):
                        strong.append(residue)
                        if j == len(levels):
                            pt = next(x for x in range(d) if residue[x] != x)
                            base.append(pt)
                            levels.append(_Level(pt))
                        for l in range(i + 1, j + 1):
                            refresh(l)
                        restart = j
                        break
                if restart is not None:
                    break
            if restart is None:
                i -= 1
            else:
                i = restart
        return cls(d, gens, levels)

    @classmethod
    def from_bsgs(cls, d: int, base: Sequence[int], strong: Sequence[Perm],
                  generators: Sequence[Perm] | None = None) -> "PermGroup":
        """Trust ``strong`` to be a strong generating set relative to ``base``."""
        strong = [check_perm(g, d) for g in strong]
        levels = []
        for i, b in enumerate(base):
            gens = [g for g in strong if all(g[x] == x for x in base[:i])]
            levels.append(_Level(b, gens, _transversal(b, gens, d)))
        return cls(d, strong if generators is None else generators, levels)

    # -- queries ------------------------------------------------------------

    @property
    def base(self) -> list[int]:
        return [lv.point for lv in self._levels]

    @property
    def strong_generators(self) -> list[Perm]:
        return list(self._levels[0].gens) if self._levels else []

    @property
    def transversal_lengths(self) -> list[int]:
        return [len(lv.transversal) for lv in self._levels]

    @property
    def order(self) -> int:
        return prod(self.transversal_lengths)

    def __contains__(self, p) -> bool:
        p = check_perm(p, self.degree)
        residue, j = _sift(p, self._levels, 0)
        return j == len(self._levels) and is_identity(residue)

    def orbits(self) -> list[list[int]]:
        return orbits_of(self.generators, self.degree)

    def is_semiregular(self) -> bool:
        order = self.order
        return all(len(b) == order for b in self.orbits())

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def elements(self) -> Iterator[Perm]:
        """Every element, as products of transversal representatives."""
        def rec(i, acc):
            if i < 0:
                yield acc
                return
            for beta in sorted(self._levels[i].transversal):
                yield from rec(i - 1, compose(acc, self._levels[i].transversal[beta]))

        yield from rec(len(self._levels) - 1, identity(self.degree))

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order})"


def _transversal(point: int, gens: Sequence[Perm], d: int) -> dict[int, Perm]:
    trans = {point: identity(d)}
    queue = [point]
    for x in queue:
        ux = trans[x]
        for g in gens:
            y = g[x]
            if y not in trans:
                trans[y] = compose(ux, g)
                queue.append(y)
    return trans


def _sift(h: Perm, levels: list[_Level], start: int) -> tuple[Perm, int]:
    for j in range(start, len(levels)):
        lv = levels[j]
        beta = h[lv.point]
        u = lv.transversal.get(beta)
        if u is None:
            return h, j
        h = compose(h, inverse(u))
    return h, len(levels)
