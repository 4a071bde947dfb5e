"""Explicit words between permutations of one class.

Three constructions live here: the greedy standardization, the exact BFS
oracle, and the two inductive constructions (sliding dynamics, and the
Rauzy dynamics with alternation accounting).  Every certificate is checked
by applying its word before it is returned.
"""

from __future__ import annotations

import bisect
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .dynamics import (
    EXTENDED,
    OperatorWord,
    Step,
    op_L,
    op_Lp,
    op_R,
    op_Rp,
    order_of,
    rotate_positions_after,
    rotate_positions_before,
    rotate_values_above,
    rotate_values_below,
    slide,
    slide_power,
    slide_predecessors,
)
from .perm_core import Permutation, PermError, is_irreducible_tuple, remove_edge, rotate_tuple

log = logging.getLogger(__name__)

Perm = tuple[int, ...]


class NotConnected(PermError):
    pass


class HelperFailure(RuntimeError):
    pass


class SearchBudgetExceeded(RuntimeError):
    pass


class BudgetExceeded(RuntimeError):
    pass


# -- standardization and zig-zag paths ------------------------------------------------


def standardize_tuple(t: Sequence[int]) -> tuple[Perm, list[Step]]:
    """Greedy standardization by powers of L and R.

    Writing p, q for the positions of the values 1 and n: if p < q one power
    of R finishes.  Otherwise an L power moves the value n onto a position
    right of p holding a value above sigma(1) when there is one; if there is
    none, n is sent as far right as possible and an R power lowers sigma(1).
    """
    t = tuple(t)
    n = len(t)
    if not is_irreducible_tuple(t):
        raise PermError(f"{t} is reducible")
    steps: list[Step] = []
    for _ in range(3 * n + 3):
        if t[0] == 1:
            return t, steps
        p, q = t.index(1) + 1, t.index(n) + 1
        if p < q:
            steps.append(Step("R", (), p - 1))
            t = op_R(t, p - 1)
            continue
        a = t[0]
        right = [x for x in range(p + 1, n + 1) if t[x - 1] > a]
        cand = right or [x for x in range(1, n + 1) if t[x - 1] > a]
        j = n - t[max(cand) - 1]
        if j:
            steps.append(Step("L", (), j))
            t = op_L(t, j)
        if right:
            continue
        q = t.index(n) + 1
        y = min(range(2, q), key=lambda y: t[y - 1])
        steps.append(Step("R", (), y - 1))
        t = op_R(t, y - 1)
    raise PermError(f"standardization of {t} did not terminate")  # irreducibility rules this out


def standardize(p: Permutation) -> tuple[Permutation, OperatorWord]:
    t, steps = standardize_tuple(p.mapping)
    return Permutation(t), OperatorWord(tuple(steps), p, Permutation(t)).normalized()


@dataclass(frozen=True)
class ZigZagPath:
    edges: tuple[tuple[int, int], ...]
    kind: str  # "L" or "R"

    def __len__(self) -> int:
        return len(self.edges)


def is_zigzag(edges: Sequence[tuple[int, int]], n: int) -> bool:
    """The L zig-zag inequality pattern, with the terminal condition."""
    if not edges or edges[0][0] != 1:
        return False
    for a in range(1, len(edges)):
        (i0, j0), (i1, j1) = edges[a - 1], edges[a]
        if a % 2 == 1:
            if not (j1 > j0 and i1 > n - j0 + 1):
                return False
        elif not (i1 < i0 and n - j1 + 1 > i0):
            return False
    i, j = edges[-1]
    return i == n or j == 1


def _shortest_l_zigzag(t: Perm) -> tuple[tuple[int, int], ...] | None:
    n = len(t)
    start = (1, t[0])
    if start[0] == n or start[1] == 1:
        return (start,)
    prev = {(start, 1): None}
    dq = deque([(start, 1)])
    edges = [(i, t[i - 1]) for i in range(1, n + 1)]
    while dq:
        node = dq.popleft()
        (i, j), k = node
        for e in edges:
            a, b = e
            ok = (b > j and a > n - j + 1) if k % 2 == 1 else (a < i and n - b + 1 > i)
            if not ok or (e, k + 1) in prev:
                continue
            prev[(e, k + 1)] = node
            if a == n or b == 1:
                path = [e]
                cur = node
                while cur is not None:
                    path.append(cur[0])
                    cur = prev[cur]
                return tuple(reversed(path))
            dq.append((e, k + 1))
    return None


def zigzag(p: Permutation | Sequence[int]) -> ZigZagPath:
    """A shortest zig-zag path; R paths are L paths of the half-turned diagram."""
    t = p.mapping if isinstance(p, Permutation) else tuple(p)
    n = len(t)
    best = None
    lp = _shortest_l_zigzag(t)
    if lp is not None:
        best = ZigZagPath(lp, "L")
    rp = _shortest_l_zigzag(rotate_tuple(t))
    if rp is not None and (best is None or len(rp) < len(best)):
        best = ZigZagPath(tuple((n + 1 - j, n + 1 - i) for i, j in rp), "R")
    if best is None:
        raise PermError(f"{t} has no zig-zag path")
    return best


def zigzag_length(p) -> int:
    return len(zigzag(p))


# -- lower bound witnesses ---------------------------------------------------------


def longest_increasing_subsequence(p: Permutation | Sequence[int]) -> int:
    t = p.mapping if isinstance(p, Permutation) else p
    tails: list[int] = []
    for v in t:
        k = bisect.bisect_left(tails, v)
        if k == len(tails):
            tails.append(v)
        else:
            tails[k] = v
    return len(tails)


def check_decreasing_partition(p: Permutation | Sequence[int], parts: Sequence[Iterable[int]]) -> bool:
    """Four parts decreasing along positions plus one leftover part of size at most 6.

    parts lists bottom positions; together they must cover every edge once.
    """
    t = p.mapping if isinstance(p, Permutation) else tuple(p)
    parts = [sorted(set(x)) for x in parts]
    if len(parts) != 5:
        return False
    flat = sorted(x for part in parts for x in part)
    if flat != list(range(1, len(t) + 1)):
        return False
    sizes_ok = [len(x) <= 6 for x in parts]

    def decreasing(part):
        vals = [t[i - 1] for i in part]
        return all(a > b for a, b in zip(vals, vals[1:]))

    # any one part may play the small leftover
    for k in range(5):
        if sizes_ok[k] and all(decreasing(parts[m]) for m in range(5) if m != k):
            return True
    return False


# -- certificates ---------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectCertificate:
    word: OperatorWord
    source: Permutation
    target: Permutation
    dynamics: str
    bound_ok: bool | None = None
    core_alternation: int | None = None
    notes: tuple[str, ...] = field(default=(), compare=False)
    search_seconds: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.word.apply(self.source) != self.target:
            raise AssertionError(f"certificate word {self.word} does not map {self.source} to {self.target}")

    @property
    def graph_length(self) -> int:
        return self.word.graph_length

    @property
    def alternation_length(self) -> int:
        return self.word.alternation_length


# -- moves for search ---------------------------------------------------------------------


def _unit_steps(dynamics: str) -> list[str]:
    if dynamics == "extended":
        return ["L", "L'", "R", "R'"]
    if dynamics == "rauzy":
        return ["L", "R"]
    raise ValueError(dynamics)


_INVERSE = {
    "L": lambda t: rotate_values_above(t, t[0], -1),
    "L'": lambda t: rotate_positions_after(t, t.index(1) + 1, -1),
    "R": lambda t: rotate_positions_before(t, t.index(len(t)) + 1, -1),
    "R'": lambda t: rotate_values_below(t, t[-1], -1),
}


def forward_edges(dynamics: str, t: Perm) -> list[tuple[Step, Perm]]:
    if dynamics == "sliding":
        return [(Step(g), EXTENDED[g](t, 1)) for g in ("L", "L'")] + [
            (Step("S", (i,)), slide(t, i)[0]) for i in range(2, len(t) + 1)
        ]
    return [(Step(g), EXTENDED[g](t, 1)) for g in _unit_steps(dynamics)]


def backward_edges(dynamics: str, t: Perm) -> list[tuple[Step, Perm]]:
    """(step, x) with step(x) = t."""
    if dynamics == "sliding":
        out = [(Step(g), _INVERSE[g](t)) for g in ("L", "L'")]
        for f in range(2, len(t) + 1):
            for x, i in slide_predecessors(t, f):
                out.append((Step("S", (i,)), x))
        return out
    return [(Step(g), _INVERSE[g](t)) for g in _unit_steps(dynamics)]


def run_edges(dynamics: str, t: Perm) -> list[tuple[Step, Perm]]:
    """Alternation-metric moves: every nontrivial power of L and R (and L', R' when extended)."""
    out = []
    for g in _unit_steps(dynamics):
        f = EXTENDED[g]
        for k in range(1, order_of(g, t)):
            out.append((Step(g, (), k), f(t, k)))
    return out


def _same_class_fingerprint(a: Perm, b: Perm, dynamics: str) -> bool:
    from .classes import fingerprint

    return fingerprint(a, with_rank=dynamics == "rauzy") == fingerprint(b, with_rank=dynamics == "rauzy")


def connect_bfs(
    p: Permutation, q: Permutation, dynamics: str = "rauzy", max_states: int = 2_000_000, check_fingerprint: bool = True
) -> ConnectCertificate | None:
    """Shortest word in the graph metric by bidirectional breadth-first search.

    Returns None when the fingerprints differ or the orbit is exhausted
    without meeting the target.
    """
    a, b = p.mapping, q.mapping
    if len(a) != len(b):
        return None
    if dynamics == "sliding" and (a[0] != 1 or b[0] != 1):
        raise PermError("sliding dynamics acts on standard permutations")
    if a == b:
        return ConnectCertificate(OperatorWord((), p, q), p, q, dynamics)
    if check_fingerprint and not _same_class_fingerprint(a, b, dynamics):
        return None
    fwd: dict[Perm, tuple | None] = {a: None}
    bwd: dict[Perm, tuple | None] = {b: None}
    ff, bf = [a], [b]
    meet = None
    while ff and bf and meet is None:
        if len(ff) <= len(bf):
            nxt = []
            for t in ff:
                for step, u in forward_edges(dynamics, t):
                    if u in fwd:
                        continue
                    fwd[u] = (t, step)
                    if u in bwd:
                        meet = u
                        break
                    nxt.append(u)
                if meet is not None:
                    break
            ff = nxt
        else:
            nxt = []
            for t in bf:
                for step, x in backward_edges(dynamics, t):
                    if x in bwd:
                        continue
                    bwd[x] = (t, step)
                    if x in fwd:
                        meet = x
                        break
                    nxt.append(x)
                if meet is not None:
                    break
            bf = nxt
        if len(fwd) + len(bwd) > max_states:
            raise BudgetExceeded(f"bidirectional search passed {max_states} states")
    if meet is None:
        return None
    head: list[Step] = []
    cur = meet
    while fwd[cur] is not None:
        cur, step = fwd[cur]
        head.append(step)
    head.reverse()
    tail: list[Step] = []
    cur = meet
    while bwd[cur] is not None:
        cur, step = bwd[cur]
        tail.append(step)
    w = OperatorWord(tuple(head + tail), p, q)
    return ConnectCertificate(w, p, q, dynamics)


# -- bounded searches in the alternation metric ----------------------------------------------


def _path_to(prev: dict, node: Perm) -> list[Step]:
    out = []
    while prev[node] is not None:
        node, step = prev[node]
        out.append(step)
    return out[::-1]


def search_runs(
    start: Perm, accept: Callable[[Perm], bool], max_alt: int, dynamics: str = "rauzy", max_states: int = 400_000
) -> tuple[Perm, list[Step]] | None:
    """Breadth-first over alternation layers for the first state passing accept.

    Candidates are tested in a fixed order so the result is deterministic.
    None means no such state within max_alt runs; running out of states
    raises SearchBudgetExceeded.
    """
    if accept(start):
        return start, []
    prev: dict = {start: None}
    layer = [start]
    for _ in range(max_alt):
        nxt = []
        for t in layer:
            for step, u in run_edges(dynamics, t):
                if u in prev:
                    continue
                prev[u] = (t, step)
                if accept(u):
                    return u, _path_to(prev, u)
                nxt.append(u)
            if len(prev) > max_states:
                raise SearchBudgetExceeded(f"search from {start} passed {max_states} states")
        layer = nxt
    return None


def meet_runs(a: Perm, b: Perm, max_alt: int, dynamics: str = "rauzy", max_states: int = 400_000) -> list[Step] | None:
    """Word of at most max_alt runs from a to b, searched from both ends."""
    if a == b:
        return []
    fa: dict = {a: None}
    fb: dict = {b: None}
    la, lb = [a], [b]
    da = db = 0
    while da + db < max_alt and la and lb:
        grow_a = len(la) <= len(lb)
        mine, other, layer = (fa, fb, la) if grow_a else (fb, fa, lb)
        nxt = []
        for t in layer:
            for step, u in run_edges(dynamics, t):
                if u in mine:
                    continue
                mine[u] = (t, step)
                if u in other:
                    head = _path_to(fa, u)
                    back = _path_to(fb, u)
                    # fb stores steps leading away from b; undo them in reverse
                    tail = [Step(s.gen, (), -s.exp) for s in reversed(back)]
                    return head + tail
                nxt.append(u)
            if len(fa) + len(fb) > max_states:
                raise SearchBudgetExceeded(f"meeting search {a} -> {b} passed {max_states} states")
        if grow_a:
            la, da = nxt, da + 1
        else:
            lb, db = nxt, db + 1
    return None


# -- class atlases for the base cases -----------------------------------------------------------


class _Atlas:
    """Breadth-first trees of whole classes, reused between calls.

    Rauzy classes use the alternation metric, where moves are symmetric, so
    one tree from a hub gives words both ways.  Sliding classes keep a
    forward tree from the hub and a tree of paths into it.
    """

    def __init__(self, dynamics: str, max_size: int):
        self.dynamics = dynamics
        self.max_size = max_size
        self.hub_of: dict[Perm, Perm] = {}
        self.out_tree: dict[Perm, dict] = {}
        self.in_tree: dict[Perm, dict] = {}

    def _grow(self, start: Perm) -> None:
        # root every class at its minimal member so words do not depend on
        # which member was looked up first
        self._build(start)
        members = [t for t, h in self.hub_of.items() if h == start]
        hub = min(members)
        if hub != start:
            for t in members:
                del self.hub_of[t]
            del self.out_tree[start]
            self.in_tree.pop(start, None)
            self._build(hub)

    def _build(self, start: Perm) -> None:
        prev: dict = {start: None}
        dq = deque([start])
        radj: dict[Perm, list] = {}
        while dq:
            t = dq.popleft()
            moves = run_edges("rauzy", t) if self.dynamics == "rauzy" else forward_edges("sliding", t)
            for step, u in moves:
                if self.dynamics == "sliding":
                    radj.setdefault(u, []).append((t, step))
                if u not in prev:
                    prev[u] = (t, step)
                    dq.append(u)
            if len(prev) > self.max_size:
                raise SearchBudgetExceeded(f"class of {start} is larger than {self.max_size}")
        self.out_tree[start] = prev
        if self.dynamics == "rauzy":
            for t in prev:
                self.hub_of[t] = start
        else:
            into: dict = {start: None}
            dq = deque([start])
            while dq:
                t = dq.popleft()
                for x, step in radj.get(t, ()):
                    if x not in into:
                        into[x] = (t, step)
                        dq.append(x)
            self.in_tree[start] = into
            # the class is the strongly connected component of the hub
            for t in prev:
                if t in into:
                    self.hub_of[t] = start

    def grow_all(self, n: int) -> None:
        """Build the trees of every class of size n up front."""
        from .classes import state_space

        for t in state_space(n, self.dynamics):
            if t not in self.hub_of:
                self._grow(t)

    def word(self, a: Perm, b: Perm) -> list[Step]:
        if a not in self.hub_of:
            self._grow(a)
        hub = self.hub_of[a]
        if self.hub_of.get(b) != hub:
            raise NotConnected(f"{b} is not in the class of {a}")
        to_b = _path_to(self.out_tree[hub], b)
        if self.dynamics == "rauzy":
            to_a = _path_to(self.out_tree[hub], a)
            back = [Step(s.gen, (), -s.exp) for s in reversed(to_a)]
        else:
            back = []
            into = self.in_tree[hub]
            cur = a
            while into[cur] is not None:
                nxt, step = into[cur]
                back.append(step)
                cur = nxt
        return back + to_b


_ATLASES: dict[tuple[str, int], _Atlas] = {}


def atlas(dynamics: str, n: int, max_size: int = 500_000) -> _Atlas:
    key = (dynamics, n)
    if key not in _ATLASES:
        _ATLASES[key] = _Atlas(dynamics, max_size)
    return _ATLASES[key]


def clear_atlases() -> None:
    _ATLASES.clear()


# -- Rauzy construction ----------------------------------------------------------------------


DEFAULT_N0 = 9


def _rfp(t: Perm):
    from .classes import fingerprint

    return fingerprint(t, with_rank=True)


def _class_key(t: Perm, ctx: "_Ctx"):
    """Exact class below the atlas threshold, fingerprint above it."""
    if len(t) <= ctx.n0:
        a = atlas("rauzy", len(t))
        if t not in a.hub_of:
            a._grow(t)
        return a.hub_of[t]
    return _rfp(t)


def _invert_runs(steps: Sequence[Step]) -> list[Step]:
    return [Step(s.gen, s.params, -s.exp) for s in reversed(steps)]


def t_structures(x: Perm) -> list[tuple[int, Perm]]:
    """All i with x = T_i(tau), tau irreducible, as (i, tau)."""
    from .dynamics import black_reduction

    out = []
    for i in range(1, len(x) - 1):
        if x[i] == 1 and x[i + 1] == x[i - 1] - 1:
            tau = black_reduction(x, (i + 1, i + 2))
            if is_irreducible_tuple(tau):
                out.append((i, tau))
    return out


def _is_t_pattern(host: Perm, gray: Sequence[int]) -> bool:
    g1, g2 = sorted(gray)
    return g2 == g1 + 1 and g1 >= 2 and host[g1 - 1] == 1 and host[g2 - 1] == host[g1 - 2] - 1


def _is_q_pattern(host: Perm, gray: Sequence[int]) -> bool:
    # the gray edge keeps value 1 and stays off the L pivot; then L lifts to
    # itself and an R run always has a lift avoiding position 1
    (g,) = gray
    return g >= 2 and host[g - 1] == 1


def lift_runs(
    steps: Sequence[Step], host: Perm, gray: Sequence[int], pattern: Callable | None, notes: list
) -> tuple[list[Step], Perm, list[int]]:
    """Lift L/R runs acting on the black reduction to runs on the host.

    Each run keeps its letter; only the exponent grows, so the alternation
    length is unchanged.  The exponent is the smallest one reproducing the
    run on the reduction while keeping the gray pattern, if that exists.
    """
    from .dynamics import LiftFailure, lift_power

    out: list[Step] = []
    gray = list(gray)
    for s in steps:
        if s.exp == 0:
            continue
        try:
            k, host, gray = lift_power(s.gen, s.exp, host, gray, pattern)
        except LiftFailure as exc:
            if pattern is None:
                raise HelperFailure(str(exc)) from exc
            notes.append(f"{s} lifted without keeping the gray pattern")
            try:
                k, host, gray = lift_power(s.gen, s.exp, host, gray, None)
            except LiftFailure as exc:
                raise HelperFailure(str(exc)) from exc
            pattern = None
        order = order_of(s.gen, host)
        if 2 * k > order:
            k -= order
        out.append(Step(s.gen, (), k))
    return out, host, gray


def _exceptional_shift(a: Perm, b: Perm, forms: list[Perm]) -> list[Step]:
    i, j = forms.index(a), forms.index(b)
    k = (j - i) % len(forms)
    return [Step("L", (), k)] if k else []


class _Ctx:
    def __init__(self, n0: int, notes: list, fix_cap: int, search_cap: int):
        self.n0 = n0
        self.notes = notes
        self.fix_cap = fix_cap
        self.search_cap = search_cap
        self.search_seconds = 0.0
        self.direct_cap = 4 * n0
        self.direct_states = 2_000_000


def _timed(ctx: _Ctx, fn, *args, **kw):
    import time

    t0 = time.perf_counter()
    try:
        return fn(*args, **kw)
    finally:
        ctx.search_seconds += time.perf_counter() - t0


def _fix(ctx: _Ctx, a: Perm, b: Perm, branch: str) -> list[Step]:
    if a == b:
        return []
    w = _timed(ctx, meet_runs, a, b, ctx.fix_cap)
    if w is None:
        raise SearchBudgetExceeded(f"{branch}: no word of at most {ctx.fix_cap} runs from {a} to {b}")
    return w


def _rauzy_std(s: Perm, s2: Perm, fp, ctx: _Ctx) -> list[Step]:
    from .classes import marked_form
    from .invariants import id_form

    n = len(s)
    if s == s2:
        return []
    if n <= ctx.n0:
        try:
            return atlas("rauzy", n).word(s, s2)
        except NotConnected as exc:
            raise HelperFailure(f"reductions fell into different classes: {exc}") from exc
    if fp.hyperelliptic:
        return _exceptional_shift(s, s2, [id_form(n, i) for i in range(n - 1)])
    if fp.marked:
        return _exceptional_shift(s, s2, [marked_form(n, i) for i in range(n - 1)])
    try:
        if fp.rank > 2:
            return _rauzy_t_branch(s, s2, ctx)
        return _rauzy_q_branch(s, s2, fp.rank, ctx)
    except (SearchBudgetExceeded, HelperFailure) as exc:
        if 1 not in fp.lam:
            raise
        # cycles of length 1 besides the rank are outside the construction
        ctx.notes.append(f"n={n}: {exc}; falling back to a direct search")
        w = _timed(ctx, meet_runs, s, s2, ctx.direct_cap, max_states=ctx.direct_states)
        if w is None:
            raise SearchBudgetExceeded(f"direct search {s} -> {s2} found nothing within {ctx.direct_cap} runs")
        return w


def _good_t(x: Perm, exceptional_ok: bool, ctx: _Ctx, want=None) -> tuple[int, Perm] | None:
    for i, tau in t_structures(x):
        f = _rfp(tau)
        if not exceptional_ok and (f.hyperelliptic or f.marked):
            continue
        if want is None or _class_key(tau, ctx) == want:
            return i, tau
    return None


def _t_entry(s: Perm, ctx: _Ctx, want=None) -> tuple[list[Step], Perm, int, Perm]:
    for cap, exc in ((6, False), (ctx.search_cap, False), (6, True), (ctx.search_cap, True)):
        r = _timed(ctx, search_runs, s, lambda x: _good_t(x, exc, ctx, want) is not None, cap)
        if r is not None:
            x, steps = r
            i, tau = _good_t(x, exc, ctx, want)
            if cap != 6 or exc:
                ctx.notes.append(f"T entry for {s} needed cap {cap}, exceptional={exc}")
            return steps, x, i, tau
    raise SearchBudgetExceeded(f"rank>2 branch: no T structure near {s}")


def _rauzy_t_branch(s: Perm, s2: Perm, ctx: _Ctx) -> list[Step]:
    w1, x1, i1, tau1 = _t_entry(s, ctx)
    v1, y1, j1, sig1 = _t_entry(s2, ctx, _class_key(tau1, ctx))
    tau2, w2 = standardize_tuple(tau1)
    sig2, v2 = standardize_tuple(sig1)
    b2, h2, gr = lift_runs(w2, x1, (i1 + 1, i1 + 2), _is_t_pattern, ctx.notes)
    c2, k2, gr2 = lift_runs(v2, y1, (j1 + 1, j1 + 2), _is_t_pattern, ctx.notes)
    w3 = _rauzy_std(tau2, sig2, _rfp(tau2), ctx)
    b3, h3, gr = lift_runs(w3, h2, gr, _is_t_pattern, ctx.notes)
    fix = _fix(ctx, h3, k2, "rank>2 branch")
    return w1 + b2 + b3 + fix + _invert_runs(c2) + _invert_runs(v1)


def _q_candidates(s: Perm, r: int, ctx: _Ctx) -> list[tuple[tuple, int, Perm, object]]:
    from .invariants import cycle_invariant_tuple
    from .perm_core import d_map_tuple

    n = len(s)
    out = []
    for k in range(n - 1):
        x = op_L(s, k)
        inv = cycle_invariant_tuple(x)
        if inv.top_principal == inv.bottom_principal:
            continue
        tau = d_map_tuple(x)
        if not is_irreducible_tuple(tau):
            continue
        f = _rfp(tau)
        pref = (x.index(2) > x.index(n), f.hyperelliptic or f.marked, k)
        out.append((pref, k, tau, _class_key(tau, ctx)))
    out.sort()
    return out


def _rauzy_q_branch(s: Perm, s2: Perm, r: int, ctx: _Ctx) -> list[Step]:
    ca, cb = _q_candidates(s, r, ctx), _q_candidates(s2, r, ctx)
    keys_b = {}
    for pref, k, tau, f in cb:
        keys_b.setdefault(f, (pref, k, tau))
    choice = None
    for pref, k, tau, f in ca:
        if f in keys_b:
            choice = (k, tau, keys_b[f][1], keys_b[f][2])
            break
    if choice is None:
        raise HelperFailure(f"rank-{r} branch: no common reduction type for {s} and {s2}")
    k, tau1, k2, sig1 = choice
    x1, y1 = op_L(s, k), op_L(s2, k2)
    n = len(s)

    def enter(x):
        q = x.index(n) + 1
        host = op_R(x, 1)
        # the edge (1,1) ends just left of the value n
        return host, [q - 1]

    h1, gr = enter(x1)
    k1, gr2 = enter(y1)
    tau2, w2 = standardize_tuple(tau1)
    sig2, v2 = standardize_tuple(sig1)
    b2, h2, gr = lift_runs(w2, h1, gr, _is_q_pattern, ctx.notes)
    c2, k2h, gr2 = lift_runs(v2, k1, gr2, _is_q_pattern, ctx.notes)
    w3 = _rauzy_std(tau2, sig2, _rfp(tau2), ctx)
    b3, h3, gr = lift_runs(w3, h2, gr, _is_q_pattern, ctx.notes)
    fix = _fix(ctx, h3, k2h, f"rank-{r} branch")
    head = ([Step("L", (), k)] if k else []) + [Step("R")]
    tail = [Step("R", (), -1)] + ([Step("L", (), -k2)] if k2 else [])
    return head + b2 + b3 + fix + _invert_runs(c2) + tail


def connect_rauzy(
    p: Permutation, q: Permutation, n0: int = DEFAULT_N0, fix_cap: int = 5, search_cap: int = 19
) -> ConnectCertificate:
    """Word of L and R runs from p to q following the inductive construction.

    Raises NotConnected when the class fingerprints differ.
    """
    a, b = p.mapping, q.mapping
    n = len(a)
    if len(b) != n:
        raise NotConnected("sizes differ")
    fa, fb = _rfp(a), _rfp(b)
    if fa != fb:
        raise NotConnected(f"fingerprints differ: {fa} / {fb}")
    notes: list[str] = []
    ctx = _Ctx(n0, notes, fix_cap, search_cap)
    sa, wa = standardize_tuple(a)
    sb, wb = standardize_tuple(b)
    if n <= n0 and _class_key(sa, ctx) != _class_key(sb, ctx):
        raise NotConnected(f"{a} and {b} share a fingerprint but lie in different classes")
    core = OperatorWord(tuple(_rauzy_std(sa, sb, fa, ctx))).normalized()
    full = OperatorWord(tuple(wa) + core.steps + tuple(_invert_runs(wb)), p, q).normalized()
    for line in notes:
        log.info(line)
    return ConnectCertificate(
        full, p, q, "rauzy", core.alternation_length <= 26 * n, core.alternation_length, tuple(notes), ctx.search_seconds
    )


# -- sliding construction ---------------------------------------------------------------------


def _sfp(t: Perm):
    from .classes import fingerprint

    return fingerprint(t, with_rank=False)


def _sliding_key(t: Perm, n0: int):
    if len(t) <= n0:
        a = atlas("sliding", len(t))
        if t not in a.hub_of:
            a._grow(t)
        return a.hub_of[t]
    return _sfp(t)


def slide_exponent(t: Perm, i: int, target: Perm, j: int) -> int | None:
    """Exponent m with S_e^m(t) = target when both put edge e on the same arcs' cycle.

    e is the edge at position i of t and position j of target, and both
    must have the same reduction.  Moving e once sends the top index 2x+1
    to 2y+1 and the bottom index 2y to 2x+2, so even powers shift both
    indices together.  Returns None when the edge sits on two cycles.
    """
    from .dynamics import is_boundary_state
    from .invariants import cycle_invariant_tuple

    tau = remove_edge(t, i)
    if remove_edge(target, j) != tau:
        raise PermError("different reductions")
    if is_boundary_state(t, i) or is_boundary_state(target, j):
        return None
    inv = cycle_invariant_tuple(tau)
    bidx, tidx = inv.arc_table()
    ca, x = tidx[t[i - 1] - 1]
    cb, y = bidx[i - 1]
    ca2, x2 = tidx[target[j - 1] - 1]
    cb2, y2 = bidx[j - 1]
    if not ca == cb == ca2 == cb2:
        return None
    m2 = 2 * len(inv.cycles[ca])
    top, bot = 2 * x + 1, 2 * y
    top2, bot2 = 2 * x2 + 1, 2 * y2
    d, d2 = (bot - top) % m2, (bot2 - top2) % m2
    if d2 == d:
        return (top2 - top) % m2
    if d2 == (-d) % m2:
        return 1 + (top2 - (bot + 1)) % m2
    return None


def _entries(start: Perm, backward: bool, depth: int, n0: int, max_states: int, per_key: int = 64) -> dict:
    """Reachable (state, gray) pairs keyed by the class of the reduction.

    Forward search records the word start -> state; backward search the
    word state -> start.
    """
    from .dynamics import _interior

    found: dict = {}
    prev: dict = {start: None}
    layer = [start]
    for level in range(depth + 1):
        for x in layer:
            for g in range(2, len(x) + 1):
                if not _interior(x, g):
                    continue
                tau = remove_edge(x, g)
                if not is_irreducible_tuple(tau):
                    continue
                f = _sfp(tau)
                if f.hyperelliptic or f.marked:
                    continue
                key = _sliding_key(tau, n0)
                bucket = found.setdefault(key, [])
                if len(bucket) < per_key:
                    bucket.append((not _gray_cycles_unique(x, g, tau), level, x, g, tau))
        if level == depth:
            break
        nxt = []
        for x in layer:
            for step, u in (backward_edges if backward else forward_edges)("sliding", x):
                if u not in prev:
                    prev[u] = (x, step)
                    nxt.append(u)
        if len(prev) > max_states:
            raise SearchBudgetExceeded(f"entry search from {start} passed {max_states} states")
        layer = nxt
    out: dict = {}
    for key, bucket in found.items():
        bucket.sort(key=lambda e: e[:2])
        for shared, level, x, g, tau in bucket:
            path = []
            cur = x
            while prev[cur] is not None:
                par, step = prev[cur]
                path.append(step)
                cur = par
            out.setdefault(key, []).append((shared, level, x, g, tau, path if backward else path[::-1]))
    return out


def _gray_cycles_unique(x: Perm, g: int, tau: Perm) -> bool:
    """No cycle of tau other than the ones holding the gray arcs has their length.

    The gray edge only travels along its own cycles, so a second cycle of
    the same length could hold the target position out of reach.
    """
    from .invariants import cycle_invariant_tuple

    inv = cycle_invariant_tuple(tau)
    bidx, tidx = inv.arc_table()
    held = {tidx[x[g - 1] - 1][0], bidx[g - 1][0]}
    lengths = {len(inv.cycles[c]) for c in held}
    return sum(len(c) in lengths for c in inv.cycles) == len(held)


def _key_rank(key, ea: dict, eb: dict) -> tuple:
    lam = key.lam if hasattr(key, "lam") else (0,)
    a, b = ea[key][0], eb[key][0]
    return (a[0] or b[0], 1 in lam, a[1] + b[1])


def _orbit_hit(h: Perm, g: int, y: Perm, gy: int) -> list[Step] | None:
    if h == y:
        return []
    m = slide_exponent(h, g, y, gy)
    if m is not None and slide_power(h, g, m)[0] == y:
        return [Step("S", (g,), m)] if m else []
    cur, pos = h, g
    for k in range(1, 4 * len(h) * len(h)):
        cur, pos = slide(cur, pos)
        if cur == y:
            return [Step("S", (g,), k)]
        if (cur, pos) == (h, g):
            break
    return None


def _reduction_loops(tau: Perm) -> list[list[Step]]:
    from .dynamics import BoundaryState, slide_period

    loops = [[Step("L", (), 1)] * (order_of("L", tau) or 1), [Step("L'", (), 1)] * (order_of("L'", tau) or 1)]
    for f in range(2, len(tau) + 1):
        try:
            loops.append([Step("S", (f,), slide_period(tau, f))])
        except BoundaryState:
            continue
    return loops


def _loop_fix(h: Perm, g: int, targets: list, max_pairs: int = 400):
    from .dynamics import LiftFailure, boost
    from .perm_core import EdgeColoring

    if not targets:
        return None
    tau = remove_edge(h, g)
    loops = _reduction_loops(tau)
    seqs = [[a] for a in loops] + [[a, b] for a in loops for b in loops][:max_pairs]
    for seq in seqs:
        steps = [s for loop in seq for s in loop]
        try:
            lifted = boost(OperatorWord(tuple(steps)), EdgeColoring(Permutation(h), frozenset({g})))
        except LiftFailure:
            continue
        h2 = lifted.target.mapping
        (g2,) = _tracked_gray(lifted, h, g)
        for _, _, y, gy, _, wb in targets:
            w = _orbit_hit(h2, g2, y, gy)
            if w is not None:
                return list(lifted.steps) + w, wb
    return None


def _sliding_fix(ctx: _Ctx, h: Perm, g: int, targets: list) -> tuple[list[Step], list[Step]]:
    """Move the gray edge of h onto one of the side-two entries.

    Returns the fixing word and the word from the chosen entry to the goal.
    """
    same = [e for e in targets if e[4] == remove_edge(h, g)]
    for _, _, y, gy, _, wb in same:
        w = _orbit_hit(h, g, y, gy)
        if w is not None:
            return w, wb
    # loops on the reduction move the gray edge relative to its cycles
    w = _loop_fix(h, g, same)
    if w is not None:
        return w
    _, _, y, gy, _, wb = targets[0]
    ctx.notes.append(f"edge orbit of {h} misses the entries; direct search")
    c = _timed(ctx, connect_bfs, Permutation(h), Permutation(y), "sliding", ctx.direct_states, False)
    if c is None:
        raise SearchBudgetExceeded(f"sliding fix {h} -> {y} not found")
    return list(c.word.steps), wb


def _sliding_std(s: Perm, s2: Perm, fp, ctx: _Ctx) -> list[Step]:
    from .classes import marked_form
    from .dynamics import boost
    from .invariants import id_form

    n = len(s)
    if s == s2:
        return []
    if n <= ctx.n0:
        try:
            return atlas("sliding", n).word(s, s2)
        except NotConnected as exc:
            raise HelperFailure(f"reductions fell into different classes: {exc}") from exc
    if fp.hyperelliptic:
        return _exceptional_shift(s, s2, [id_form(n, i) for i in range(n - 1)])
    if fp.marked:
        return _exceptional_shift(s, s2, [marked_form(n, i) for i in range(n - 1)])
    for depth in range(0, 4):
        ea = _timed(ctx, _entries, s, False, depth, ctx.n0, ctx.direct_states)
        eb = _timed(ctx, _entries, s2, True, depth, ctx.n0, ctx.direct_states)
        common = [k for k in ea if k in eb]
        if common:
            break
    else:
        raise SearchBudgetExceeded(f"sliding: no common reduction near {s} and {s2}")
    common.sort(key=lambda k: _key_rank(k, ea, eb))
    key = common[0]
    _, _, x, gx, tau, wa = ea[key][0]
    # every side-two entry with this reduction is a candidate for the final alignment
    sig = eb[key][0][4]
    inner = _sliding_std(tau, sig, _sfp(tau), ctx)
    from .perm_core import EdgeColoring

    try:
        lifted = boost(OperatorWord(tuple(inner)), EdgeColoring(Permutation(x), frozenset({gx})))
    except PermError as exc:
        raise HelperFailure(f"boost failed: {exc}") from exc
    h = lifted.target.mapping
    (gh,) = _tracked_gray(lifted, x, gx)
    fix, wb = _sliding_fix(ctx, h, gh, eb[key])
    return wa + list(lifted.steps) + fix + wb


def _tracked_gray(w: OperatorWord, t: Perm, g: int) -> list[int]:
    from .dynamics import track

    marked = [g]
    for step in w.steps:
        t, marked = track(step, t, marked)
    return marked


def connect_sliding(p: Permutation, q: Permutation, n0: int = DEFAULT_N0) -> ConnectCertificate:
    """Word of L, L' and S_e letters from p to q, both standard.

    Raises NotConnected when the class fingerprints differ.
    """
    from .perm_core import is_standard

    a, b = p.mapping, q.mapping
    n = len(a)
    if len(b) != n:
        raise NotConnected("sizes differ")
    if not (is_standard(p) and is_standard(q)):
        raise PermError("sliding acts on standard permutations")
    fa, fb = _sfp(a), _sfp(b)
    if fa != fb:
        raise NotConnected(f"fingerprints differ: {fa} / {fb}")
    notes: list[str] = []
    ctx = _Ctx(n0, notes, 5, 19)
    if n <= n0 and _sliding_key(a, n0) != _sliding_key(b, n0):
        raise NotConnected(f"{a} and {b} share a fingerprint but lie in different classes")
    w = OperatorWord(tuple(_sliding_std(a, b, fa, ctx)), p, q).normalized()
    for line in notes:
        log.info(line)
    return ConnectCertificate(w, p, q, "sliding", None, w.alternation_length, tuple(notes), ctx.search_seconds)
