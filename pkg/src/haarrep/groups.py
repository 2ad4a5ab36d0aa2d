"""Finite groups as dense multiplication tables.

Elements are the indices ``0..n-1`` and the identity is always index 0.
Subsets of a group are plain Python ints used as bitmasks (bit ``i`` set
means element ``i`` is in the set).
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

MAX_ORDER = 4096
SUBGROUP_CAP = 64
AUTOMORPHISM_CAP = 24
FULL_ASSOC_CHECK = 64


class GroupError(ValueError):
    """Raised for malformed group specs or violated group preconditions."""


# ---------------------------------------------------------------------------
# bitmask helpers


def mask_of(elements) -> int:
    m = 0
    for e in elements:
        m |= 1 << int(e)
    return m


def elements_of(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def parse_mask(text: str, n: int | None = None) -> int:
    """Parse a hex bitmask such as ``0x1f`` (LSB is element 0)."""
    t = text.strip().lower()
    if t.startswith("0x"):
        t = t[2:]
    if not t or not re.fullmatch(r"[0-9a-f]+", t):
        raise GroupError(f"bad hex element-set mask {text!r}")
    m = int(t, 16)
    if n is not None and m >> n:
        raise GroupError(f"mask {text!r} has bits at or above the group order {n}")
    return m


def format_mask(mask: int) -> str:
    return hex(mask)


# ---------------------------------------------------------------------------
# the group table


@dataclass(frozen=True, eq=False)
class GroupTable:
    """A finite group given by its full multiplication table.

    ``mul[a, b]`` is the index of the product ``ab``. Products are read left
    to right, so right multiplication by ``x`` maps ``g`` to ``mul[g, x]``.
    """

    mul: np.ndarray
    inv: np.ndarray
    name: str = "G"
    id: int = field(default=0, init=False)

    def __post_init__(self):
        mul = np.ascontiguousarray(self.mul, dtype=np.int32)
        inv = np.ascontiguousarray(self.inv, dtype=np.int32)
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "inv", inv)
        _validate(self)

    @property
    def n(self) -> int:
        return self.mul.shape[0]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"GroupTable({self.name!r}, n={self.n})"

    @cached_property
    def _rows(self) -> list[list[int]]:
        return self.mul.tolist()

    def m(self, a: int, b: int) -> int:
        return self._rows[a][b]

    def power(self, g: int, k: int) -> int:
        r = 0
        for _ in range(k):
            r = self._rows[r][g]
        return r

    @cached_property
    def orders(self) -> tuple[int, ...]:
        out = []
        for g in range(self.n):
            k, x = 1, g
            while x != 0:
                x = self._rows[x][g]
                k += 1
            out.append(k)
        return tuple(out)

    @cached_property
    def exponent(self) -> int:
        return reduce(math.lcm, self.orders, 1)

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    @cached_property
    def involution_mask(self) -> int:
        """Elements of order at most 2 (identity included)."""
        return mask_of(g for g, o in enumerate(self.orders) if o <= 2)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def inverse_mask(self, mask: int) -> int:
        inv = self.inv
        return mask_of(int(inv[g]) for g in elements_of(mask))

    def is_inverse_closed(self, mask: int) -> bool:
        return self.inverse_mask(mask) == mask

    def left_translate(self, mask: int, x: int) -> int:
        """The set ``xS``."""
        row = self._rows[x]
        return mask_of(row[s] for s in elements_of(mask))

    def right_translate(self, mask: int, x: int) -> int:
        """The set ``Sx``."""
        rows = self._rows
        return mask_of(rows[s][x] for s in elements_of(mask))

    def is_subgroup(self, mask: int) -> bool:
        if not mask & 1:
            return False
        els = elements_of(mask)
        rows = self._rows
        for a in els:
            if not (mask >> int(self.inv[a])) & 1:
                return False
            ra = rows[a]
            for b in els:
                if not (mask >> ra[b]) & 1:
                    return False
        return True

    def generated(self, gens) -> int:
        """Mask of the subgroup generated by ``gens``."""
        gens = [int(g) for g in gens if int(g) != 0]
        seen = 1
        frontier = [0]
        rows = self._rows
        while frontier:
            nxt = []
            for a in frontier:
                ra = rows[a]
                for s in gens:
                    b = ra[s]
                    if not (seen >> b) & 1:
                        seen |= 1 << b
                        nxt.append(b)
            frontier = nxt
        return seen

    @cached_property
    def generating_set(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily by element order."""
        by_order = sorted(range(1, self.n), key=lambda g: (-self.orders[g], g))
        gens: list[int] = []
        cur = 1
        for g in by_order:
            if cur == self.full_mask:
                break
            if not (cur >> g) & 1:
                gens.append(g)
                cur = self.generated(gens)
        return tuple(gens)

    def is_normal(self, mask: int) -> bool:
        rows = self._rows
        els = elements_of(mask)
        for g in self.generating_set:
            gi = int(self.inv[g])
            for h in els:
                if not (mask >> rows[rows[gi][h]][g]) & 1:
                    return False
        return True

    def commutes(self, mask: int) -> bool:
        idx = np.array(elements_of(mask), dtype=np.intp)
        sub = self.mul[np.ix_(idx, idx)]
        return bool(np.array_equal(sub, sub.T))


def _validate(G: GroupTable) -> None:
    mul, inv = G.mul, G.inv
    n = mul.shape[0]
    if mul.shape != (n, n) or inv.shape != (n,):
        raise GroupError("table shapes are inconsistent")
    if n < 1 or n > MAX_ORDER:
        raise GroupError(f"group order {n} outside 1..{MAX_ORDER}")
    ar = np.arange(n)
    if not (np.array_equal(mul[0], ar) and np.array_equal(mul[:, 0], ar)):
        raise GroupError("element 0 is not the identity")
    s = np.sort(mul, axis=1)
    if not (np.all(s == ar) and np.all(np.sort(mul, axis=0) == ar[:, None])):
        raise GroupError("multiplication table is not a Latin square")
    if not np.all(mul[ar, inv] == 0) or not np.array_equal(inv[inv], ar):
        raise GroupError("inverse table is inconsistent")
    if n <= FULL_ASSOC_CHECK:
        left = mul[mul[:, :, None], ar[None, None, :]]  # (ab)c
        right = mul[ar[:, None, None], mul[None, :, :]]  # a(bc)
        ok = np.array_equal(left, right)
    else:
        rng = np.random.default_rng(n)
        t = rng.integers(0, n, size=(3, 10 * n * n))
        ok = np.array_equal(mul[mul[t[0], t[1]], t[2]], mul[t[0], mul[t[1], t[2]]])
    if not ok:
        raise GroupError("multiplication is not associative")


def _from_mul(mul, name: str) -> GroupTable:
    mul = np.asarray(mul, dtype=np.int32)
    inv = np.argmin(mul, axis=1).astype(np.int32)  # column where the product is 0
    return GroupTable(mul, inv, name)


# ---------------------------------------------------------------------------
# constructors


def cyclic(n: int) -> GroupTable:
    ar = np.arange(n)
    return _from_mul((ar[:, None] + ar[None, :]) % n, f"C{n}")


def elementary_abelian(ell: int) -> GroupTable:
    ar = np.arange(1 << ell)
    return _from_mul(ar[:, None] ^ ar[None, :], f"C2^{ell}")


def dihedral(n: int) -> GroupTable:
    """Dihedral group of order ``2n``; index ``k + n*e`` is ``r^k s^e``."""
    out = np.empty((2 * n, 2 * n), dtype=np.int32)
    for a in range(2 * n):
        ka, ea = a % n, a // n
        for b in range(2 * n):
            kb, eb = b % n, b // n
            k = (ka + (kb if ea == 0 else -kb)) % n
            out[a, b] = k + n * ((ea + eb) % 2)
    return _from_mul(out, f"D{n}")


# quaternion units as (sign, unit) with unit in 1,i,j,k -> 0..3
_QUNIT = {(0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
          (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
          (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
          (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0)}


def quaternion() -> GroupTable:
    """Q8 with indices ordered 1, -1, i, -i, j, -j, k, -k."""
    out = np.empty((8, 8), dtype=np.int32)
    for a in range(8):
        ua, sa = a // 2, (-1) ** (a % 2)
        for b in range(8):
            ub, sb = b // 2, (-1) ** (b % 2)
            s, u = _QUNIT[(ua, ub)]
            sign = s * sa * sb
            out[a, b] = 2 * u + (0 if sign == 1 else 1)
    return _from_mul(out, "Q8")


def symmetric(k: int, alternating: bool = False) -> GroupTable:
    perms = list(itertools.permutations(range(k)))
    if alternating:
        perms = [p for p in perms if _parity(p) == 0]
    if len(perms) > MAX_ORDER:
        raise GroupError(f"group order {len(perms)} exceeds {MAX_ORDER}")
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    out = np.empty((n, n), dtype=np.int32)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            # apply p first, then q
            out[i, j] = index[tuple(q[x] for x in p)]
    return _from_mul(out, f"{'A' if alternating else 'S'}{k}")


def _parity(p) -> int:
    seen = [False] * len(p)
    par = 0
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        par ^= (length - 1) & 1
    return par


def direct_product(A: GroupTable, B: GroupTable) -> GroupTable:
    """Index ``a * |B| + b`` is the pair ``(a, b)``."""
    n = A.n * B.n
    if n > MAX_ORDER:
        raise GroupError(f"group order {n} exceeds {MAX_ORDER}")
    mul = (A.mul[:, None, :, None] * B.n + B.mul[None, :, None, :]).reshape(n, n)
    return _from_mul(mul, f"{A.name}x{B.name}")


def generalized_dicyclic(A: GroupTable, y: int) -> GroupTable:
    """The group generated by ``A`` and ``x`` with ``x^2 = y`` and ``a^x = a^-1``.

    ``A`` sits at indices ``0..|A|-1`` and ``a*x`` is index ``|A| + a``, so
    ``x`` itself is index ``|A|``.
    """
    if not A.is_abelian:
        raise GroupError(f"{A.name} is not abelian")
    if A.exponent <= 2:
        raise GroupError(f"{A.name} has exponent at most 2")
    if not (0 < y < A.n) or A.orders[y] != 2:
        raise GroupError(f"element {y} is not an involution of {A.name}")
    k = A.n
    if 2 * k > MAX_ORDER:
        raise GroupError(f"group order {2 * k} exceeds {MAX_ORDER}")
    am, ai = A.mul, A.inv
    out = np.empty((2 * k, 2 * k), dtype=np.int32)
    out[:k, :k] = am
    out[:k, k:] = am + k  # a (b x) = (ab) x
    bx = am[:, ai]  # a x b = a b^-1 x
    out[k:, :k] = bx + k
    out[k:, k:] = am[bx, y]  # a x b x = a b^-1 y
    return _from_mul(out, f"Dic({A.name},{y})")


# ---------------------------------------------------------------------------
# spec grammar


def make_group(spec: str) -> GroupTable:
    """Build a group from a spec such as ``C4``, ``C2^3``, ``Dic(C6,3)``, ``Q8xC2``."""
    if not spec or any(c.isspace() for c in spec):
        raise GroupError(f"bad group spec {spec!r}")
    parts = _split_product(spec)
    groups = [_atom(p) for p in parts]
    G = groups[0]
    for H in groups[1:]:
        G = direct_product(G, H)
    return _rename(G, spec)


def _rename(G: GroupTable, name: str) -> GroupTable:
    if G.name == name:
        return G
    out = object.__new__(GroupTable)
    object.__setattr__(out, "mul", G.mul)
    object.__setattr__(out, "inv", G.inv)
    object.__setattr__(out, "name", name)
    object.__setattr__(out, "id", 0)
    return out


def _split_product(spec: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in spec:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise GroupError(f"unbalanced parentheses in {spec!r}")
        if ch == "x" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if depth:
        raise GroupError(f"unbalanced parentheses in {spec!r}")
    parts.append(cur)
    if any(not p for p in parts):
        raise GroupError(f"empty factor in {spec!r}")
    return parts


def _atom(s: str) -> GroupTable:
    if s.startswith("Dic(") and s.endswith(")"):
        inner = s[4:-1]
        depth, cut = 0, -1
        for i, ch in enumerate(inner):
            depth += ch == "("
            depth -= ch == ")"
            if ch == "," and depth == 0:
                cut = i
        if cut < 0 or not inner[cut + 1:].isdigit():
            raise GroupError(f"bad dicyclic spec {s!r}")
        return generalized_dicyclic(make_group(inner[:cut]), int(inner[cut + 1:]))
    if s == "Q8":
        return quaternion()
    m = re.fullmatch(r"C2\^(\d+)", s)
    if m:
        ell = int(m.group(1))
        if (1 << ell) > MAX_ORDER:
            raise GroupError(f"group order 2^{ell} exceeds {MAX_ORDER}")
        return elementary_abelian(ell)
    m = re.fullmatch(r"([CDSA])(\d+)", s)
    if not m:
        raise GroupError(f"bad group spec {s!r}")
    kind, k = m.group(1), int(m.group(2))
    if k < 1:
        raise GroupError(f"bad group spec {s!r}")
    if kind == "C":
        if k > MAX_ORDER:
            raise GroupError(f"group order {k} exceeds {MAX_ORDER}")
        return cyclic(k)
    if kind == "D":
        if k < 1 or 2 * k > MAX_ORDER:
            raise GroupError(f"bad dihedral order in {s!r}")
        return dihedral(k)
    if k > 7:
        raise GroupError(f"{s}: symmetric/alternating degree must be at most 7")
    return symmetric(k, alternating=(kind == "A"))


# ---------------------------------------------------------------------------
# set-level operations


def c_value(G: GroupTable, S: int) -> int:
    """``(|S| + |I(S)|) / 2`` where ``I(S)`` are the elements of order <= 2 in S."""
    if not G.is_inverse_closed(S):
        raise GroupError("c_value needs an inverse-closed set")
    return (popcount(S) + popcount(S & G.involution_mask)) // 2


def double_cosets(G: GroupTable, H: int, K: int) -> list[int]:
    """Partition of ``G`` into double cosets ``HxK``, ordered by least element."""
    if not G.is_subgroup(H) or not G.is_subgroup(K):
        raise GroupError("double_cosets needs two subgroups")
    hs = np.array(elements_of(H), dtype=np.intp)
    ks = np.array(elements_of(K), dtype=np.intp)
    mul = G.mul
    left = G.full_mask
    blocks = []
    while left:
        x = (left & -left).bit_length() - 1
        block = mask_of(np.unique(mul[mul[hs, x][:, None], ks[None, :]]).tolist())
        blocks.append(block)
        left &= ~block
    return blocks


def enumerate_subgroups(G: GroupTable) -> list[int]:
    """All subgroups as masks, sorted by (order, mask)."""
    if G.n > SUBGROUP_CAP:
        raise GroupError(f"subgroup enumeration capped at order {SUBGROUP_CAP}")
    cyclic_subs: dict[int, int] = {}
    for g in range(G.n):
        cyclic_subs.setdefault(G.generated([g]), g)
    found: dict[int, list[int]] = {1: []}
    queue = [1]
    while queue:
        nxt = []
        for H in queue:
            gens = found[H]
            for Z, z in cyclic_subs.items():
                if Z & ~H == 0:
                    continue
                K = G.generated(gens + [z])
                if K not in found:
                    found[K] = gens + [z]
                    nxt.append(K)
        queue = nxt
    return sorted(found, key=lambda m: (popcount(m), m))


def index_two_subgroups(G: GroupTable) -> list[int]:
    """Subgroups of index 2, found as kernels of maps onto C2."""
    if G.n % 2:
        return []
    sq = sorted({G.m(g, g) for g in range(G.n)})
    squares = G.generated(sq)
    # G / <squares> is elementary abelian; pick coset representatives forming a basis
    basis: list[int] = []
    span = squares
    for g in range(G.n):
        if not (span >> g) & 1:
            basis.append(g)
            span = G.generated(sq + basis)
    # label each element by its coordinates over the basis
    label = [-1] * G.n
    coords = {0: squares}
    for mask_bits in range(1, 1 << len(basis)):
        rep = 0
        for i, b in enumerate(basis):
            if (mask_bits >> i) & 1:
                rep = G.m(rep, b)
        coords[mask_bits] = G.right_translate(squares, rep)
    for vec, coset in coords.items():
        for g in elements_of(coset):
            label[g] = vec
    out = []
    for func in range(1, 1 << len(basis)):
        kernel = mask_of(g for g in range(G.n) if bin(label[g] & func).count("1") % 2 == 0)
        out.append(kernel)
    return sorted(out)


def automorphisms_of_group(G: GroupTable) -> list[tuple[int, ...]]:
    """Every automorphism of ``G`` as an image tuple, identity first."""
    if G.n > AUTOMORPHISM_CAP:
        raise GroupError(f"automorphism enumeration capped at order {AUTOMORPHISM_CAP}")
    gens = list(G.generating_set)
    orders = G.orders
    mul = G.mul
    rows = G._rows
    # words: each element as (parent element, generator) in a BFS tree
    parent: dict[int, tuple[int, int]] = {}
    order_bfs = [0]
    seen = {0}
    for a in order_bfs:
        for gi, s in enumerate(gens):
            b = rows[a][s]
            if b not in seen:
                seen.add(b)
                parent[b] = (a, gi)
                order_bfs.append(b)
    gens_arr = np.array(gens, dtype=np.intp)
    out = []
    candidates = [[h for h in range(G.n) if orders[h] == orders[s]] for s in gens]
    for images in itertools.product(*candidates):
        phi = [0] * G.n
        for b in order_bfs[1:]:
            a, gi = parent[b]
            phi[b] = rows[phi[a]][images[gi]]
        if len(set(phi)) != G.n:
            continue
        p = np.array(phi, dtype=np.intp)
        # phi(x s) == phi(x) phi(s) for generators s makes phi a homomorphism
        if np.array_equal(p[mul[:, gens_arr]], mul[p[:, None], p[gens_arr][None, :]]):
            out.append(tuple(phi))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class GroupClass:
    is_abelian: bool
    exponent: int
    is_elementary_abelian_2: bool
    is_abelian_exp_gt_2: bool
    is_generalized_dicyclic: bool
    is_q8_times_e2: bool
    involution_count: int
    dicyclic_witness: dict | None = None
    q8_witness: dict | None = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def find_dicyclic_structure(G: GroupTable) -> dict | None:
    """Abelian index-2 ``A`` of exponent > 2 with ``x`` inverting it and ``x^2`` an involution."""
    if G.n % 4:
        return None
    inv = G.inv
    for A in index_two_subgroups(G):
        if not G.commutes(A):
            continue
        els = elements_of(A)
        if reduce(math.lcm, (G.orders[a] for a in els), 1) <= 2:
            continue
        x = next(g for g in range(G.n) if not (A >> g) & 1)
        y = G.m(x, x)
        if y == 0:
            continue
        xi = int(inv[x])
        if all(G.m(G.m(xi, a), x) == inv[a] for a in els):
            return {"A": format_mask(A), "x": x, "y": y}
    return None


def find_q8_decomposition(G: GroupTable) -> dict | None:
    """Witness ``G = Q x E`` with ``Q`` quaternion and ``E`` elementary abelian."""
    n = G.n
    if n < 8 or n & (n - 1):
        return None
    rows = G._rows
    center = mask_of(g for g in range(n) if all(rows[g][h] == rows[h][g] for h in G.generating_set))
    zs = elements_of(center)
    if popcount(center) != n // 4 or any(G.orders[z] > 2 for z in zs):
        return None
    fours = [g for g in range(n) if G.orders[g] == 4]
    for i in fours:
        ii = rows[i][i]
        ii_inv = int(G.inv[i])
        for j in fours:
            if rows[j][j] != ii or rows[i][j] == rows[j][i]:
                continue
            if rows[rows[int(G.inv[j])][i]][j] != ii_inv:
                continue
            Q = G.generated([i, j])
            if popcount(Q) != 8:
                continue
            # complement of <i^2> inside the (elementary abelian) center
            basis: list[int] = []
            span = 1
            for z in zs:
                if (span >> z) & 1 or (G.right_translate(span, ii) >> z) & 1:
                    continue
                basis.append(z)
                span = G.generated(basis)
            if popcount(span) * 8 != n:
                continue
            return {"i": i, "j": j, "k": rows[i][j], "minus_one": ii, "E": format_mask(span),
                    "E_basis": basis, "ell": len(basis)}
    return None


def classify_group(G: GroupTable) -> GroupClass:
    dic = find_dicyclic_structure(G)
    q8 = find_q8_decomposition(G)
    return GroupClass(
        is_abelian=G.is_abelian,
        exponent=G.exponent,
        is_elementary_abelian_2=G.is_abelian and G.exponent <= 2,
        is_abelian_exp_gt_2=G.is_abelian and G.exponent > 2,
        is_generalized_dicyclic=dic is not None,
        is_q8_times_e2=q8 is not None,
        involution_count=popcount(G.involution_mask) - 1,
        dicyclic_witness=dic,
        q8_witness=q8,
    )


# groups used as default fixtures; every entry has order <= 64
CATALOG = (
    "C1", "C2", "C3", "C4", "C2^2", "C5", "C6", "S3", "C7", "C8", "C4xC2", "C2^3",
    "D4", "Q8", "C9", "C3xC3", "C10", "D5", "C12", "C6xC2", "D6", "A4", "Dic(C6,3)",
    "C14", "D7", "C15", "C16", "C2^4", "C4xC4", "C8xC2", "D8", "Q8xC2", "Dic(C8,4)",
    "Dic(C4xC2,1)", "C18", "D9", "C3xS3", "C20", "D10", "Dic(C10,5)", "C21", "S4",
    "Dic(C12,6)", "C4xS3", "C2^5", "Q8xC2^2", "D16", "C32", "A5", "D30", "Q8xC4", "C64",
)


def catalog_groups(max_order: int = 64):
    for spec in CATALOG:
        G = make_group(spec)
        if G.n <= max_order:
            yield G


def random_inverse_closed(G: GroupTable, rng: random.Random) -> int:
    out = 0
    for g in range(G.n):
        gi = int(G.inv[g])
        if gi < g:
            continue
        if rng.random() < 0.5:
            out |= (1 << g) | (1 << gi)
    return out
