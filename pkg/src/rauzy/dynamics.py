"""Generators of the Rauzy-type dynamics and the words built from them.

All generators act on bare tuples in one-line form; `Permutation` wrappers
sit on top.  The four classical moves are written as rotations of a block
of values (acting on the left) or of a block of positions (acting on the
right):

    L  = rotate values above sigma(1) up by one
    L' = rotate positions after sigma^-1(1) right by one
    R  = rotate positions before sigma^-1(n) left by one
    R' = rotate values below sigma(n) down by one

L and R keep the edge sigma(1) of the bottom-left corner and the length of
the top principal cycle; L and L' keep standard permutations standard.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .perm_core import (
    EdgeColoring,
    Permutation,
    PermError,
    insert_raw,
    is_irreducible_tuple,
    prepend_one_tuple,
    remove_edge,
    restrict,
    rotate_tuple,
)


class RangeError(PermError):
    pass


class EdgeIsAnchor(PermError):
    pass


class RankMismatch(PermError):
    pass


class WordError(ValueError):
    pass


class BoundaryState(PermError):
    """The slid edge touches position n; such a state is never revisited."""


Perm = tuple[int, ...]


# -- block rotations --------------------------------------------------------


def rotate_values_above(t: Sequence[int], a: int, j: int) -> Perm:
    """gamma acting on values: a+1..n cycled upward j times."""
    n = len(t)
    size = n - a
    if size <= 1 or j % size == 0:
        return tuple(t)
    return tuple(v if v <= a else a + 1 + (v - a - 1 + j) % size for v in t)


def rotate_values_below(t: Sequence[int], c: int, j: int) -> Perm:
    """gamma acting on values: 1..c-1 cycled downward j times."""
    size = c - 1
    if size <= 1 or j % size == 0:
        return tuple(t)
    return tuple(v if v >= c else 1 + (v - 1 - j) % size for v in t)


def rotate_positions_before(t: Sequence[int], i: int, j: int) -> Perm:
    """Entries at positions 1..i-1 shifted left j times (cyclically)."""
    size = i - 1
    if size <= 1 or j % size == 0:
        return tuple(t)
    s = j % size
    head = tuple(t[:size])
    return head[s:] + head[:s] + tuple(t[size:])


def rotate_positions_after(t: Sequence[int], p: int, j: int) -> Perm:
    """Entries at positions p+1..n shifted right j times (cyclically)."""
    n = len(t)
    size = n - p
    if size <= 1 or j % size == 0:
        return tuple(t)
    s = j % size
    tail = tuple(t[p:])
    return tuple(t[:p]) + tail[size - s:] + tail[: size - s]


# -- classical moves ----------------------------------------------------------


def op_L(t: Sequence[int], k: int = 1) -> Perm:
    return rotate_values_above(t, t[0], k)


def op_Lp(t: Sequence[int], k: int = 1) -> Perm:
    return rotate_positions_after(t, t.index(1) + 1, k)


def op_R(t: Sequence[int], k: int = 1) -> Perm:
    return rotate_positions_before(t, t.index(len(t)) + 1, k)


def op_Rp(t: Sequence[int], k: int = 1) -> Perm:
    return rotate_values_below(t, t[-1], k)


EXTENDED = {"L": op_L, "L'": op_Lp, "R": op_R, "R'": op_Rp}


def apply_extended(g: str, p: Permutation, k: int = 1) -> Permutation:
    try:
        f = EXTENDED[g]
    except KeyError:
        raise WordError(f"unknown classical generator {g!r}") from None
    return Permutation(f(p.mapping, k))


def order_of(g: str, t: Sequence[int]) -> int:
    """Size of the rotated block, i.e. the order of g at t."""
    n = len(t)
    if g == "L":
        return max(n - t[0], 1)
    if g == "L'":
        return max(n - t.index(1) - 1, 1)
    if g == "R":
        return max(t.index(n), 1)
    if g == "R'":
        return max(t[-1] - 1, 1)
    raise WordError(g)


# -- pivotless moves ------------------------------------------------------------


def pivotless_L(t: Sequence[int], i: int, j: int) -> Perm:
    """L^{i,j}: values above i rotated up j times; i = sigma(1) gives L^j."""
    if not 0 <= i <= len(t):
        raise RangeError(f"pivot value {i} outside 0..{len(t)}")
    return rotate_values_above(t, i, j)


def pivotless_R(t: Sequence[int], i: int, j: int) -> Perm:
    """R^{i,j}: positions before i rotated j times; sigma(i) = n gives R^j."""
    if not 1 <= i <= len(t) + 1:
        raise RangeError(f"pivot position {i} outside 1..{len(t) + 1}")
    return rotate_positions_before(t, i, j)


def apply_pivotless(g: str, i: int, j: int, p: Permutation) -> Permutation:
    if g == "Lp":
        return Permutation(pivotless_L(p.mapping, i, j))
    if g == "Rp":
        return Permutation(pivotless_R(p.mapping, i, j))
    raise WordError(f"unknown pivotless generator {g!r}")


def bonds(t: Sequence[int]) -> int:
    """Number of i with sigma(i+1) = sigma(i) + 1."""
    return sum(1 for a, b in zip(t, t[1:]) if b == a + 1)


# -- sliding ----------------------------------------------------------------------


def slide(t: Sequence[int], i: int) -> tuple[Perm, int]:
    """One step of S_e for the edge at bottom position i of a standard permutation.

    The edge is removed; its bottom endpoint goes just right of the bottom of
    the edge whose top is right-adjacent to it, and its top endpoint just
    right of the top of the edge whose bottom is right-adjacent to it.
    Landing past the last point wraps to the second position (the walk goes
    around through the boundary path).  Returns the new permutation and the
    new position of the moved edge.
    """
    n = len(t)
    if t[0] != 1:
        raise PermError(f"{tuple(t)} is not standard")
    if i == 1:
        raise EdgeIsAnchor("the edge (1,1) does not slide")
    if not 2 <= i <= n:
        raise RangeError(f"edge position {i} outside 2..{n}")
    j = t[i - 1]
    m = n - 1
    tau = remove_edge(t, i)
    tb = t[i] if i < n else t[1]
    alpha = tb - (tb > j)
    if alpha == m:
        alpha = 1
    top_next = j + 1 if j < n else 2
    bt = t.index(top_next) + 1
    beta = bt - (bt > i)
    if beta == m:
        beta = 1
    return insert_raw(tau, 1, alpha, beta), beta + 1


def slide_power(t: Sequence[int], i: int, k: int) -> tuple[Perm, int]:
    """S_e^k with the moved edge tracked; negative k runs the orbit backwards."""
    if k < 0:
        per = slide_period(t, i)
        k %= per
    cur, pos = tuple(t), i
    for _ in range(k):
        cur, pos = slide(cur, pos)
    return cur, pos


def is_boundary_state(t: Sequence[int], i: int) -> bool:
    return i == len(t) or t[i - 1] == len(t)


def slide_period(t: Sequence[int], i: int) -> int:
    if is_boundary_state(t, i):
        raise BoundaryState(f"edge {i} of {tuple(t)} has an endpoint at n; its orbit is not periodic")
    start = (tuple(t), i)
    cur, pos = slide(*start)
    k = 1
    while (cur, pos) != start:
        cur, pos = slide(cur, pos)
        k += 1
    return k


def slide_predecessors(t: Sequence[int], f: int) -> list[tuple[Perm, int]]:
    """All (x, i) with slide(x, i) == (t, f).

    One preimage comes from stepping the edge backwards along its cycles of
    the reduction; the others, if any, have the edge touching position n.
    """
    from .invariants import cycle_invariant_tuple

    t = tuple(t)
    n = len(t)
    if f in (1, n) or t[f - 1] in (1, n):
        return []
    tau = remove_edge(t, f)
    m = n - 1
    cands = set()
    if is_irreducible_tuple(tau):
        inv = cycle_invariant_tuple(tau)
        bidx, tidx = inv.arc_table()
        cb, y = tidx[t[f - 1] - 1]
        ca, x1 = bidx[f - 1]
        beta = inv.cycles[cb].bottoms[y]
        alpha = inv.cycles[ca].tops[(x1 - 1) % len(inv.cycles[ca])]
        cands.add((alpha, beta))
    for a in range(m + 1):
        cands.add((a, m))
        cands.add((m, a))
    out = []
    for alpha, beta in sorted(cands):
        x = insert_raw(tau, 1, alpha, beta)
        if x[0] != 1 or beta == 0:
            continue
        if slide(x, beta + 1) == (t, f):
            out.append((x, beta + 1))
    return out


def apply_sliding(e: int, p: Permutation, k: int = 1) -> Permutation:
    return Permutation(slide_power(p.mapping, e, k)[0])


# -- T, TS and q -------------------------------------------------------------------


def T_tuple(t: Sequence[int], i: int) -> Perm:
    """Add the edges (i+1, 1) and (i+2, sigma(i)+1) right of edge i.

    Edge i is lifted to top value sigma(i)+2, so the second new edge crosses
    it; this is the placement that raises the top principal cycle by two.
    """
    n = len(t)
    if not 1 <= i <= n:
        raise RangeError(f"T index {i} outside 1..{n}")
    s = t[i - 1]

    def v(y: int) -> int:
        return y + 1 if y < s else y + 2

    return tuple(v(y) for y in t[:i]) + (1, s + 1) + tuple(v(y) for y in t[i:])


def TS_tuple(t: Sequence[int], i: int) -> Perm:
    """T conjugated by the half-turn of the diagram."""
    n = len(t)
    if not 1 <= i <= n:
        raise RangeError(f"TS index {i} outside 1..{n}")
    return rotate_tuple(T_tuple(rotate_tuple(t), n + 1 - t[i - 1]))


def T_min_tuple(t: Sequence[int]) -> Perm:
    return T_tuple(t, t.index(1) + 1)


def apply_T(i: int, p: Permutation) -> Permutation:
    return Permutation(T_tuple(p.mapping, i))


def apply_TS(i: int, p: Permutation) -> Permutation:
    return Permutation(TS_tuple(p.mapping, i))


def q_tuple(k: int, t: Sequence[int]) -> Perm:
    from .invariants import cycle_invariant_tuple

    s = prepend_one_tuple(t)
    r = cycle_invariant_tuple(s).rank
    if r != k:
        raise RankMismatch(f"prepend_one({tuple(t)}) has rank {r}, not {k}")
    return op_R(s)


def apply_q(k: int, tau: Permutation) -> Permutation:
    if k not in (1, 2):
        raise RangeError("q is defined for ranks 1 and 2")
    return Permutation(q_tuple(k, tau.mapping))


# -- words ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    gen: str  # L L' R R' S Lp Rp T TS q
    params: tuple[int, ...] = ()
    exp: int = 1

    def letter(self) -> tuple:
        return (self.gen, self.params[:1] if self.gen in ("Lp", "Rp") else self.params)

    def __str__(self) -> str:
        if self.gen == "S":
            head = f"S@{self.params[0]}"
        elif self.gen in ("Lp", "Rp"):
            head = f"{self.gen}{self.params[0]},{self.params[1]}"
        elif self.gen in ("T", "TS"):
            head = f"{self.gen}{self.params[0]}"
        elif self.gen == "q":
            head = f"q{self.params[0]}"
        else:
            head = self.gen
        return head if self.exp == 1 else f"{head}^{self.exp}"


_TOKEN = re.compile(r"^(L'|R'|L|R|S@(\d+)|Lp(\d+),(\d+)|Rp(\d+),(\d+)|TS(\d+)|T(\d+)|q([12]))(?:\^(-?\d+))?$")


def parse_step(tok: str) -> Step:
    m = _TOKEN.match(tok)
    if not m:
        raise WordError(f"bad word token {tok!r}")
    head = m.group(1)
    exp = int(m.group(10)) if m.group(10) is not None else 1
    if head in ("L", "L'", "R", "R'"):
        return Step(head, (), exp)
    if m.group(2):
        return Step("S", (int(m.group(2)),), exp)
    if m.group(3):
        return Step("Lp", (int(m.group(3)), int(m.group(4))), exp)
    if m.group(5):
        return Step("Rp", (int(m.group(5)), int(m.group(6))), exp)
    if m.group(7):
        return Step("TS", (int(m.group(7)),), exp)
    if m.group(8):
        return Step("T", (int(m.group(8)),), exp)
    return Step("q", (int(m.group(9)),), exp)


def apply_step(step: Step, t: Sequence[int]) -> Perm:
    g, k = step.gen, step.exp
    if g in EXTENDED:
        return EXTENDED[g](t, k)
    if g == "S":
        return slide_power(t, step.params[0], k)[0]
    if g == "Lp":
        return pivotless_L(t, step.params[0], step.params[1] * k)
    if g == "Rp":
        return pivotless_R(t, step.params[0], step.params[1] * k)
    if k < 0:
        raise WordError(f"{g} is not invertible as a word letter")
    cur = tuple(t)
    for _ in range(k):
        if g == "T":
            cur = T_tuple(cur, step.params[0])
        elif g == "TS":
            cur = TS_tuple(cur, step.params[0])
        elif g == "q":
            cur = q_tuple(step.params[0], cur)
        else:
            raise WordError(f"unknown generator {g!r}")
    return cur


@dataclass(frozen=True)
class OperatorWord:
    steps: tuple[Step, ...] = ()
    source: Permutation | None = field(default=None, compare=False)
    target: Permutation | None = field(default=None, compare=False)

    @classmethod
    def parse(cls, text: str) -> "OperatorWord":
        return cls(tuple(parse_step(tok) for tok in text.split()))

    def __str__(self) -> str:
        return " ".join(map(str, self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def __add__(self, other: "OperatorWord") -> "OperatorWord":
        return OperatorWord(self.steps + other.steps).normalized()

    @property
    def graph_length(self) -> int:
        return sum(abs(s.exp) for s in self.steps)

    @property
    def alternation_length(self) -> int:
        runs = 0
        prev = None
        for s in self.steps:
            if s.exp == 0:
                continue
            key = s.letter()
            if key != prev:
                runs += 1
            prev = key
        return runs

    def apply(self, p: Permutation | Sequence[int]) -> Permutation:
        t = p.mapping if isinstance(p, Permutation) else tuple(p)
        for s in self.steps:
            t = apply_step(s, t)
        return Permutation(t)

    def verify(self) -> bool:
        if self.source is None or self.target is None:
            raise WordError("word has no recorded source/target")
        return self.apply(self.source) == self.target

    def normalized(self) -> "OperatorWord":
        """Merge adjacent powers of the same classical generator and drop zero powers."""
        out: list[Step] = []
        for s in self.steps:
            if s.exp == 0:
                continue
            if out and s.gen in EXTENDED and out[-1].gen == s.gen:
                e = out[-1].exp + s.exp
                out.pop()
                if e:
                    out.append(Step(s.gen, (), e))
                continue
            out.append(s)
        return OperatorWord(tuple(out), self.source, self.target)

    def with_ends(self, source: Permutation, target: Permutation | None = None) -> "OperatorWord":
        tgt = target if target is not None else self.apply(source)
        return OperatorWord(self.steps, source, tgt)

    def inverse(self, source: Sequence[int]) -> "OperatorWord":
        """Word undoing self when started from `source` (sliding steps need the state).

        A slide started with the edge at a corner has no inverse slide, since
        the corner state is not on the edge's periodic orbit; BoundaryState is
        raised then.
        """
        states = [tuple(source)]
        for s in self.steps:
            states.append(apply_step(s, states[-1]))
        inv: list[Step] = []
        for s, before in zip(reversed(self.steps), reversed(states[:-1])):
            if s.gen in EXTENDED or s.gen in ("Lp", "Rp"):
                inv.append(Step(s.gen, s.params, -s.exp))
            elif s.gen == "S":
                cur, pos = slide_power(before, s.params[0], s.exp)
                per = slide_period(before, s.params[0])
                inv.append(Step("S", (pos,), (-s.exp) % per))
            else:
                raise WordError(f"{s.gen} has no inverse in the word alphabet")
        return OperatorWord(tuple(inv))


def word(*steps: Step | str) -> OperatorWord:
    return OperatorWord(tuple(parse_step(s) if isinstance(s, str) else s for s in steps))


def power_word(gen: str, k: int) -> OperatorWord:
    return OperatorWord((Step(gen, (), k),)) if k else OperatorWord()




# -- edge tracking -----------------------------------------------------------------


class LiftFailure(PermError):
    pass


def position_map(step: Step, t: Sequence[int]) -> list[int]:
    """new_pos[p-1] for every bottom position p under a classical or pivotless step."""
    n = len(t)
    ident = list(range(1, n + 1))
    g, k = step.gen, step.exp
    if g in ("L", "R'", "Lp"):
        block = ident
    elif g == "L'":
        block = list(rotate_positions_after(ident, t.index(1) + 1, k))
    elif g == "R":
        block = list(rotate_positions_before(ident, t.index(n) + 1, k))
    elif g == "Rp":
        block = list(rotate_positions_before(ident, step.params[0], step.params[1] * k))
    else:
        raise WordError(f"no position map for {g}")
    # block[q-1] is the old position now sitting at q
    out = [0] * n
    for q, old in enumerate(block, 1):
        out[old - 1] = q
    return out


def track(step: Step, t: Sequence[int], marked: Iterable[int]) -> tuple[Perm, list[int]]:
    """Apply step and report where the edges at the marked positions went."""
    marked = list(marked)
    if step.gen == "S":
        if step.exp < 0:
            raise WordError("track needs a nonnegative sliding exponent")
        cur, pos = tuple(t), step.params[0]
        for _ in range(step.exp):
            nxt, npos = slide(cur, pos)
            marked = [npos if g == pos else _shift_after_slide(pos, npos, g) for g in marked]
            cur, pos = nxt, npos
        return cur, marked
    pm = position_map(step, t)
    return apply_step(step, t), [pm[g - 1] for g in marked]


def _shift_after_slide(pos: int, npos: int, g: int) -> int:
    # removing the edge at pos and reinserting it at npos shifts the others
    h = g - (g > pos)
    return h + (h >= npos)


def black_reduction(t: Sequence[int], gray: Iterable[int]) -> Perm:
    gray = set(gray)
    return restrict(t, [i for i in range(1, len(t) + 1) if i not in gray])


# -- boosted dynamics ----------------------------------------------------------------


def _interior(t: Sequence[int], g: int) -> bool:
    n = len(t)
    return g not in (1, n) and t[g - 1] not in (1, n)


def boost_step(step: Step, t: Sequence[int], g: int) -> tuple[list[Step], Perm, int]:
    """Lift one unit letter acting on the reduction to the host with gray edge g.

    L and L' are doubled when the gray edge would sit at the corner
    (top value n for L, bottom position n for L').  A slide of black edge f
    first moves the gray edge along its own orbit as often as needed so that
    it is not adjacent to f; usually zero or one extra step.
    """
    tau = remove_edge(t, g)
    if step.gen in ("L", "L'"):
        if step.exp != 1:
            raise WordError("boost_step takes unit letters")
        want = apply_step(step, tau)
        after, (g1,) = track(step, t, [g])
        corner = (t[g - 1] == len(t) or after[g1 - 1] == len(t)) if step.gen == "L" else (g == len(t) or g1 == len(t))
        k = 2 if corner else 1
        if k == 2:
            after, (g1,) = track(Step(step.gen, (), 2), t, [g])
        if remove_edge(after, g1) != want:
            raise LiftFailure(f"boosted {step.gen}^{k} does not reduce to {step.gen}")
        return [Step(step.gen, (), k)], after, g1
    if step.gen != "S":
        raise WordError(f"boost handles L, L' and S letters, got {step.gen}")
    f = step.params[0]
    out: list[Step] = []
    for _ in range(step.exp):
        want, _ = slide(tau, f)
        cur, cg = tuple(t), g
        found = None
        limit = 4 * len(t) * len(t)
        for k in range(limit):
            fh = f if f < cg else f + 1
            nxt, (g1,) = track(Step("S", (fh,)), cur, [cg])
            if remove_edge(nxt, g1) == want and _interior(nxt, g1):
                found = (k, fh, nxt, g1)
                break
            cur, cg = slide(cur, cg)
        if found is None:
            # happens only when f touches the corner of the reduction
            path, nxt, g1 = _host_detour(tuple(t), g, want)
            out.extend(path)
        else:
            k, fh, nxt, g1 = found
            if k:
                out.append(Step("S", (g,), k))
            out.append(Step("S", (fh,)))
        tau, f = want, slide(tau, f)[1]
        t, g = nxt, g1
    return out, t, g


def _host_detour(t: Perm, g: int, want: Perm, cap: int = 200_000) -> tuple[list[Step], Perm, int]:
    """Breadth-first search over host slides for a state reducing to want."""
    from collections import deque

    start = (t, g)
    prev: dict = {start: None}
    dq = deque([start])
    while dq:
        x, gx = dq.popleft()
        if remove_edge(x, gx) == want and _interior(x, gx):
            path = []
            node = (x, gx)
            while prev[node] is not None:
                node, i = prev[node]
                path.append(Step("S", (i,)))
            return path[::-1], x, gx
        for i in range(2, len(x) + 1):
            y, (gy,) = track(Step("S", (i,)), x, [gx])
            if (y, gy) not in prev:
                prev[(y, gy)] = ((x, gx), i)
                dq.append((y, gy))
        if len(prev) > cap:
            break
    raise LiftFailure(f"no host word reduces to {want} from {t} with gray {g}")


def boost(seq: OperatorWord, colored: EdgeColoring) -> OperatorWord:
    """B(seq): a host word whose effect on the reduction is seq."""
    if len(colored.gray_set) != 1:
        raise PermError("boost needs exactly one gray edge")
    (g,) = colored.gray_set
    t = colored.host.mapping
    steps: list[Step] = []
    for s in seq.steps:
        units = [s] if s.gen == "S" else [Step(s.gen, s.params, 1)] * s.exp
        if s.exp < 0:
            raise WordError("boost expects nonnegative exponents")
        for u in units:
            lifted, t, g = boost_step(u, t, g)
            steps.extend(lifted)
    return OperatorWord(tuple(steps), colored.host, Permutation(t))


def _lift_range(gen: str, j: int, t: Sequence[int], gray: Sequence[int]) -> list[int] | None:
    """Host exponents k for which gen^k induces gen^j on the black edges.

    Each generator rotates one block (values above sigma(1) for L, values
    below sigma(n) for R', positions after the 1 for L', positions before
    the n for R).  If the pivot edge is black, rotating the host block by k
    turns the black elements by the number of them that wrap around, so the
    valid k form one interval (two when j is a multiple of the black count).
    None when the pivot is gray.
    """
    n = len(t)
    gs = set(gray)
    black = [p for p in range(1, n + 1) if p not in gs]
    if gen == "L":
        if 1 in gs:
            return None
        a = t[0]
        size, up = n - a, True
        coords = [t[p - 1] - a - 1 for p in black if t[p - 1] > a]
    elif gen == "R'":
        if n in gs:
            return None
        c = t[-1]
        size, up = c - 1, False
        coords = [t[p - 1] - 1 for p in black if t[p - 1] < c]
    elif gen == "L'":
        p1 = t.index(1) + 1
        if p1 in gs:
            return None
        size, up = n - p1, True
        coords = [p - p1 - 1 for p in black if p > p1]
    elif gen == "R":
        q = t.index(n) + 1
        if q in gs:
            return None
        size, up = q - 1, False
        coords = [p - 1 for p in black if p < q]
    else:
        return None
    m = len(coords)
    if m == 0 or size == 0:
        return None
    cs = sorted(coords, reverse=up)

    def interval(w: int) -> range:
        # exponents at which exactly w black elements have wrapped
        if up:
            lo = size - cs[w - 1] if w else 1
            hi = size - cs[w] - 1 if w < m else size
        else:
            lo = cs[w - 1] + 1 if w else 1
            hi = cs[w] if w < m else size
        return range(max(lo, 1), hi + 1)

    w = j % m
    return list(interval(0)) + list(interval(m)) if w == 0 else list(interval(w))


def lift_power(gen: str, j: int, t: Sequence[int], gray: Sequence[int], accept=None) -> tuple[int, Perm, list[int]]:
    """Smallest host exponent k >= 1 with gen^k reducing to gen^j on the black edges.

    accept(host, gray) can veto a candidate (for instance to keep a gray
    pattern intact).  Returns (k, new host, new gray positions).
    """
    want = apply_step(Step(gen, (), j), black_reduction(t, gray))
    window = _lift_range(gen, j, t, gray)
    if window is not None:
        for k in window:
            nxt, g1 = track(Step(gen, (), k), t, gray)
            if black_reduction(nxt, g1) == want and (accept is None or accept(nxt, g1)):
                return k, nxt, g1
    return lift_power_scan(gen, j, t, gray, accept, want)


def lift_power_scan(gen: str, j: int, t: Sequence[int], gray: Sequence[int], accept=None, want=None):
    """lift_power by trying every exponent up to the order."""
    if want is None:
        want = apply_step(Step(gen, (), j), black_reduction(t, gray))
    order = order_of(gen, t)
    for k in range(1, order + 1):
        nxt, g1 = track(Step(gen, (), k), t, gray)
        if black_reduction(nxt, g1) == want and (accept is None or accept(nxt, g1)):
            return k, nxt, g1
    raise LiftFailure(f"no power of {gen} on {tuple(t)} lifts {gen}^{j}")


# -- pivotless projection -------------------------------------------------------------


def pivotless_project_step(step: Step, t: Sequence[int], red: frozenset[int]) -> Step | None:
    """P of a single L^j or R^j on the host; None when it acts trivially on the red edges."""
    n = len(t)
    if step.gen == "L":
        a = t[0]
        size = n - a
        j = step.exp % size if size else 0
        i_red = sum(1 for p in red if t[p - 1] <= a)
        j_red = sum(1 for p in red if t[p - 1] > n - j)
        gen, i = "Lp", i_red
    elif step.gen == "R":
        q = t.index(n) + 1
        size = q - 1
        j = step.exp % size if size else 0
        i_red = 1 + sum(1 for p in red if p < q)
        j_red = sum(1 for p in red if p <= j)
        gen, i = "Rp", i_red
    else:
        raise WordError(f"pivotless projection takes L and R powers, got {step.gen}")
    if not red or j_red == 0:
        return None
    return Step(gen, (i, j_red), 1)


def pivotless_project(seq: OperatorWord, colored: EdgeColoring) -> OperatorWord:
    t = colored.host.mapping
    red = frozenset(colored.gray_set)
    out: list[Step] = []
    for s in seq.steps:
        p = pivotless_project_step(s, t, red)
        if p is not None:
            out.append(p)
        t, moved = track(s, t, sorted(red))
        red = frozenset(moved)
    src = Permutation(restrict(colored.host, colored.gray_set)) if colored.gray_set else None
    tgt = Permutation(restrict(t, red)) if red else None
    return OperatorWord(tuple(out), src, tgt)
