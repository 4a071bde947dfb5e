"""Cycle invariant, principal cycles, X/H type, rank and the Arf sign.

Arc tracing runs along the doubled diagram: leaving bottom arc b we cross
to the top through edge b+1 and continue on the top arc to its right, and
symmetrically from the top back to the bottom.  When the crossing lands on
a corner point the walk takes the bottom path (top point n to bottom point
1) or the top path (bottom point n to top point 1).
"""

from __future__ import annotations

import functools
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .perm_core import BOTTOM, TOP, ArcRef, Permutation, PermError, d_map, is_irreducible_tuple

ARF_LIMIT = 24

# sign of the hyperelliptic class by n mod 8
_ID_SIGN = (1, 0, -1, -1, -1, 0, 1, 1)

# non-hyperelliptic (lambda, sign) pairs for small n, lambda without 1-parts
_SMALL_TABLE: dict[int, list[tuple[tuple[int, ...], int]]] = {
    4: [],
    5: [],
    6: [((5,), -1)],
    7: [((4, 2), 0), ((3, 3), -1)],
}


class NotIrreducible(PermError):
    pass


class NotStandard(PermError):
    pass


class TooLarge(PermError):
    pass


class UnsupportedCycleOne(PermError):
    pass


class ArfValueError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Cycle:
    """Arcs of one cycle in traversal order: bottoms[k] is followed by tops[k]."""

    bottoms: tuple[int, ...]
    tops: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.tops)


@dataclass(frozen=True)
class CycleInvariant:
    lam: tuple[int, ...]  # sorted decreasingly
    top_principal: int
    bottom_principal: int
    cycles: tuple[Cycle, ...]
    # position of the path crossings inside the principal cycles: the top path
    # leads from tops[k] to bottoms[k+1] of its cycle, the bottom path from
    # bottoms[k] to tops[k]
    top_path_step: int
    bottom_path_step: int

    @property
    def ell(self) -> int:
        return len(self.lam) - 1

    @property
    def rank(self) -> int:
        return len(self.cycles[self.top_principal])

    def cycle_of(self, arc: ArcRef) -> int:
        table = self._bottom_index if arc.side == BOTTOM else self._top_index
        return table[arc.position][0]

    @property
    def _bottom_index(self) -> dict[int, tuple[int, int]]:
        return {b: (c, k) for c, cy in enumerate(self.cycles) for k, b in enumerate(cy.bottoms)}

    @property
    def _top_index(self) -> dict[int, tuple[int, int]]:
        return {t: (c, k) for c, cy in enumerate(self.cycles) for k, t in enumerate(cy.tops)}

    def arc_table(self) -> tuple[dict[int, tuple[int, int]], dict[int, tuple[int, int]]]:
        """(bottom arc -> (cycle, step), top arc -> (cycle, step))."""
        return self._bottom_index, self._top_index

    def lambda_without_rank(self) -> tuple[int, ...]:
        c = Counter(self.lam)
        c[self.rank] -= 1
        return tuple(sorted(c.elements(), reverse=True))


@dataclass(frozen=True)
class PermType:
    kind: str  # "X" or "H"
    params: tuple[int, int]

    def __str__(self) -> str:
        return f"{self.kind}({self.params[0]},{self.params[1]})"


@dataclass(frozen=True)
class ClassFingerprint:
    lam: tuple[int, ...]
    rank: int | None
    sign: int
    hyperelliptic: bool
    # only meaningful with a rank: the hyperelliptic class with a marked point
    marked: bool = False

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(sorted(self.lam, reverse=True)))


# -- arc tracing -------------------------------------------------------------


def top_after_bottom(t: Sequence[int], b: int) -> tuple[int, bool]:
    """Top arc following bottom arc b, and whether the bottom path was used."""
    n = len(t)
    v = t[b]
    if v < n:
        return v, False
    return t[0], True


def bottom_after_top(t: Sequence[int], inv: Sequence[int], a: int) -> tuple[int, bool]:
    """Bottom arc following top arc a, and whether the top path was used."""
    n = len(t)
    u = inv[a]
    if u < n:
        return u, False
    return inv[0], True


def _inverse(t: Sequence[int]) -> list[int]:
    inv = [0] * len(t)
    for i, v in enumerate(t, 1):
        inv[v - 1] = i
    return inv


def cycle_invariant_tuple(t: Sequence[int]) -> CycleInvariant:
    n = len(t)
    if n < 2 or not is_irreducible_tuple(t):
        raise NotIrreducible(f"{tuple(t)} is not irreducible of size >= 2")
    inv = _inverse(t)
    seen = [False] * n
    cycles: list[Cycle] = []
    top_pr = bot_pr = -1
    top_step = bot_step = -1
    for start in range(1, n):
        if seen[start]:
            continue
        bottoms: list[int] = []
        tops: list[int] = []
        b = start
        while True:
            seen[b] = True
            bottoms.append(b)
            a, via_bottom = top_after_bottom(t, b)
            if via_bottom:
                bot_pr, bot_step = len(cycles), len(tops)
            tops.append(a)
            b, via_top = bottom_after_top(t, inv, a)
            if via_top:
                top_pr, top_step = len(cycles), len(tops) - 1
            if b == start:
                break
        cycles.append(Cycle(tuple(bottoms), tuple(tops)))
    lam = tuple(sorted((len(c) for c in cycles), reverse=True))
    return CycleInvariant(lam, top_pr, bot_pr, tuple(cycles), top_step, bot_step)


def cycle_invariant(p: Permutation) -> CycleInvariant:
    return cycle_invariant_tuple(p.mapping)


def doubled_diagram_cycles(t: Sequence[int]) -> list[tuple[frozenset, frozenset, bool, bool]]:
    """Cycles of the explicit doubled-endpoint graph.

    Nodes are (row, side, point) with row 0 bottom / 1 top and side 0 left /
    1 right.  Every node meets one half-edge and one connector (an arc or a
    boundary path), so walking alternately along both kinds closes up into
    cycles.  Returns, per cycle, its bottom arcs, its top arcs and whether it
    holds the top path and the bottom path.  Used to cross-check the tracing
    above.
    """
    n = len(t)
    half: dict[tuple, tuple] = {}
    conn: dict[tuple, tuple] = {}

    def join(table, u, v, label=None):
        table[u] = (v, label)
        table[v] = (u, label)

    for i, v in enumerate(t, 1):
        join(half, (0, 0, i), (1, 1, v))
        join(half, (0, 1, i), (1, 0, v))
    for i in range(1, n):
        join(conn, (0, 1, i), (0, 0, i + 1), ("b", i))
        join(conn, (1, 1, i), (1, 0, i + 1), ("t", i))
    join(conn, (1, 1, n), (0, 0, 1), ("bottom-path", 0))
    join(conn, (1, 0, 1), (0, 1, n), ("top-path", 0))
    done: set = set()
    out = []
    for node in sorted(conn):
        if node in done:
            continue
        bots, tops = set(), set()
        paths = set()
        cur = node
        while True:
            done.add(cur)
            nxt, (kind, pos) = conn[cur]
            done.add(nxt)
            if kind == "b":
                bots.add(pos)
            elif kind == "t":
                tops.add(pos)
            else:
                paths.add(kind)
            cur = half[nxt][0]
            if cur == node:
                break
        out.append((frozenset(bots), frozenset(tops), "top-path" in paths, "bottom-path" in paths))
    return out


# -- type ----------------------------------------------------------------------


def perm_type_from_invariant(inv: CycleInvariant) -> PermType:
    top = inv.cycles[inv.top_principal]
    if inv.top_principal != inv.bottom_principal:
        return PermType("X", (len(top), len(inv.cycles[inv.bottom_principal])))
    r = len(top)
    # arcs strictly after the top path up to the bottom path, counted with
    # bottoms[k] preceding tops[k]
    start = 2 * (inv.top_path_step + 1)
    stop = 2 * inv.bottom_path_step
    seg = (stop - start) % (2 * r) + 1
    return PermType("H", ((seg + 1) // 2, r + 1 - (seg + 1) // 2))


def perm_type(p: Permutation) -> PermType:
    return perm_type_from_invariant(cycle_invariant(p))


def x_params_via_reduction(p: Permutation) -> tuple[int, int] | None:
    """Solve lambda' = lambda minus {i}, r' = r + i - 1 from d(p).

    Returns None when no (r, i) fits, which happens on the single shared
    principal cycle.
    """
    if p(1) != 1 or not is_irreducible_tuple(p.mapping):
        raise NotStandard(f"{p} is not standard")
    inv = cycle_invariant(p)
    tau = d_map(p)
    if not is_irreducible_tuple(tau.mapping) or tau.n < 2:
        return None
    inv2 = cycle_invariant(tau)
    r = inv.rank
    lam = Counter(inv.lam)
    lam[r] -= 1
    for i in sorted(set(lam.elements())):
        rest = lam.copy()
        rest[i] -= 1
        rest[r + i - 1] += 1
        if +rest == Counter(inv2.lam) and inv2.rank == r + i - 1:
            return (r, i)
    return None


# -- Arf ---------------------------------------------------------------------


def _noncrossing_masks(t: Sequence[int]) -> list[int]:
    """Bit a of mask k is set when a < k and edges a, k do not cross."""
    n = len(t)
    return [sum(1 << a for a in range(k) if t[a] < t[k]) for k in range(n)]


def _parity32(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> 16)
    x = x ^ (x >> 8)
    x = x ^ (x >> 4)
    x &= 0xF
    return ((0x6996 >> x) & 1).astype(np.uint8)


def arf_tuple(t: Sequence[int], limit: int = ARF_LIMIT) -> int:
    n = len(t)
    if n > limit:
        raise TooLarge(f"subset scan for n={n} exceeds limit {limit}")
    masks = _noncrossing_masks(t)
    par = np.zeros(1, dtype=np.uint8)
    for k in range(n):
        idx = np.arange(1 << k, dtype=np.uint32)
        add = _parity32(idx & np.uint32(masks[k])) ^ np.uint8(1)
        par = np.concatenate([par, par ^ add])
    odd = int(par.sum())
    return (1 << n) - 2 * odd


def arf(p: Permutation, limit: int = ARF_LIMIT) -> int:
    """Abar = sum over edge subsets I of (-1)^(|I| + #non-crossing pairs in I)."""
    return arf_tuple(p.mapping, limit)


def chi(p: Permutation, subset: Sequence[int]) -> int:
    s = sorted(subset)
    return sum(
        1
        for x in range(len(s))
        for y in range(x + 1, len(s))
        if (s[x] - s[y]) * (p(s[x]) - p(s[y])) > 0
    )


def quadratic_sum(lin: Sequence[int], adj: Sequence[int]) -> int:
    """Sum of (-1)^Q(x) over GF(2)^n for Q = sum lin_i x_i + sum_{i<j in adj} x_i x_j.

    Variables are eliminated in pairs, so this is cubic in n.
    """
    n = len(lin)
    lin = [x & 1 for x in lin]
    adj = list(adj)
    alive = (1 << n) - 1
    const = 0
    factor = 1
    for k in range(n):
        if not alive >> k & 1:
            continue
        alive &= ~(1 << k)
        nb = adj[k] & alive
        if nb == 0:
            if lin[k]:
                return 0
            factor *= 2
            continue
        # summing over x_k forces x_j = lin_k + sum of the other neighbours
        factor *= 2
        j = (nb & -nb).bit_length() - 1
        rest = nb & ~(1 << j)
        c = lin[k]
        alive &= ~(1 << j)
        rest_list = [p for p in range(n) if rest >> p & 1]
        if lin[j]:
            const ^= c
            for p in rest_list:
                lin[p] ^= 1
        for m in range(n):
            if not (adj[j] >> m & 1) or not (alive >> m & 1):
                continue
            lin[m] ^= c
            for p in rest_list:
                if p == m:
                    lin[m] ^= 1
                else:
                    adj[p] ^= 1 << m
                    adj[m] ^= 1 << p
    return -factor if const else factor


def arf_fast_tuple(t: Sequence[int]) -> int:
    n = len(t)
    adj = [0] * n
    for a in range(n):
        for b in range(a + 1, n):
            if t[a] < t[b]:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
    return quadratic_sum([1] * n, adj)


def arf_fast(p: Permutation) -> int:
    return arf_fast_tuple(p.mapping)


def sign_from(abar: int, n: int, ell: int) -> int:
    if abar == 0:
        return 0
    e2 = n + ell
    if e2 % 2 or abs(abar) != 1 << (e2 // 2):
        raise ArfValueError(f"Abar={abar} is not 0 or +-2^((n+l)/2) for n={n}, l={ell}")
    return 1 if abar > 0 else -1


def sign_tuple(t: Sequence[int], fast: bool = True) -> int:
    inv = cycle_invariant_tuple(t)
    abar = arf_fast_tuple(t) if fast else arf_tuple(t)
    return sign_from(abar, len(t), inv.ell)


def sign(p: Permutation, fast: bool = False) -> int:
    return sign_tuple(p.mapping, fast)


# -- exceptional class and classification ------------------------------------


def id_form(n: int, i: int) -> tuple[int, ...]:
    """id_i = L^i(id_n) = (1, i+2, ..., n, 2, ..., i+1)."""
    i %= n - 1
    return (1,) + tuple(range(i + 2, n + 1)) + tuple(range(2, i + 2))


def exceptional_invariants(n: int) -> tuple[tuple[int, ...], int]:
    lam = (n - 1,) if n % 2 == 0 else ((n - 1) // 2, (n - 1) // 2)
    return lam, _ID_SIGN[n % 8]


def is_exceptional(p: Permutation) -> bool:
    from .pathfinder import standardize

    if p.n < 2:
        return True
    std, _ = standardize(p)
    return std.mapping in _id_forms(p.n)


@functools.lru_cache(maxsize=None)
def _id_forms(n: int) -> frozenset:
    return frozenset(id_form(n, i) for i in range(n - 1))


def expected_signs(lam: Sequence[int], n: int) -> list[int]:
    """Signs of the non-hyperelliptic extended classes with cycle invariant lam."""
    lam = tuple(sorted(lam, reverse=True))
    if 1 in lam:
        raise UnsupportedCycleOne("cycle invariants with parts equal to 1 are not classified")
    if n <= 7:
        return sorted(s for l2, s in _SMALL_TABLE.get(n, []) if l2 == lam)
    even = sum(1 for x in lam if x % 2 == 0)
    if even % 2:
        return []
    if even:
        return [0]
    return [-1, 1]


def classify(fp: ClassFingerprint, n: int) -> int:
    """Predicted number of extended classes carrying this fingerprint."""
    if 1 in fp.lam:
        raise UnsupportedCycleOne("cycle invariants with parts equal to 1 are not classified")
    if n < 4:
        raise PermError("classification starts at n = 4")
    if fp.hyperelliptic:
        return int((fp.lam, fp.sign) == exceptional_invariants(n))
    return expected_signs(fp.lam, n).count(fp.sign)


def fingerprint_tuple(t: Sequence[int], with_rank: bool = False, sign_value: int | None = None) -> ClassFingerprint:
    inv = cycle_invariant_tuple(t)
    s = sign_value if sign_value is not None else sign_from(arf_fast_tuple(t), len(t), inv.ell)
    hyp = is_exceptional(Permutation(tuple(t)))
    if with_rank:
        return ClassFingerprint(inv.lambda_without_rank(), inv.rank, s, hyp)
    return ClassFingerprint(inv.lam, None, s, hyp)


def genus(inv: CycleInvariant, n: int) -> float:
    """Genus of the associated stratum, (n - number of cycles + 1) / 2."""
    return (n - len(inv.lam) + 1) / 2
