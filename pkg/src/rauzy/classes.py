"""Orbit enumeration for the four dynamics and the checks built on it."""

from __future__ import annotations

import functools
import itertools
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components, shortest_path

from .dynamics import op_L, op_Lp, op_R, op_Rp, order_of, pivotless_L, pivotless_R, slide
from .invariants import (
    ClassFingerprint,
    cycle_invariant_tuple,
    exceptional_invariants,
    expected_signs,
    fingerprint_tuple,
    sign_tuple,
)
from .perm_core import PermError, Permutation, is_irreducible_tuple

DYNAMICS = ("extended", "sliding", "rauzy", "pivotless")
DEFAULT_MAX_N = {"extended": 9, "sliding": 9, "rauzy": 9, "pivotless": 8}

Perm = tuple[int, ...]


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OrbitReport:
    dynamics: str
    representative: Permutation
    size: int
    fingerprint: ClassFingerprint | None
    diameter_graph: int | None = None
    diameter_alternation: int | None = None
    members: frozenset = field(default=frozenset(), compare=False, repr=False)


# -- state spaces and moves ----------------------------------------------------


def irreducibles(n: int) -> Iterator[Perm]:
    for t in itertools.permutations(range(1, n + 1)):
        if is_irreducible_tuple(t):
            yield t


def standards(n: int) -> Iterator[Perm]:
    for rest in itertools.permutations(range(2, n + 1)):
        t = (1,) + rest
        if is_irreducible_tuple(t):
            yield t


def unit_moves(dynamics: str, n: int) -> Callable[[Perm], list[Perm]]:
    """Successors of a state under one unit generator."""
    if dynamics == "extended":
        return lambda t: [op_L(t), op_Lp(t), op_R(t), op_Rp(t)]
    if dynamics == "rauzy":
        return lambda t: [op_L(t), op_R(t)]
    if dynamics == "sliding":
        # L and L' keep (1,1) in place, so they act on standards too
        return lambda t: [op_L(t), op_Lp(t)] + [slide(t, i)[0] for i in range(2, len(t) + 1)]
    if dynamics == "pivotless":
        return lambda t: [pivotless_L(t, i, 1) for i in range(n + 1)] + [pivotless_R(t, i, 1) for i in range(1, n + 2)]
    raise ValueError(f"unknown dynamics {dynamics!r}")


def run_moves(dynamics: str, n: int) -> Callable[[Perm], list[Perm]]:
    """Successors in the alternation metric: every power of every generator counts once."""
    gens = {"extended": (("L", op_L), ("L'", op_Lp), ("R", op_R), ("R'", op_Rp)), "rauzy": (("L", op_L), ("R", op_R))}
    if dynamics not in gens:
        raise ValueError(f"alternation metric is defined for extended and rauzy, not {dynamics!r}")
    pairs = gens[dynamics]

    def succ(t: Perm) -> list[Perm]:
        out = []
        for name, f in pairs:
            for k in range(1, order_of(name, t)):
                out.append(f(t, k))
        return out

    return succ


def state_space(n: int, dynamics: str) -> list[Perm]:
    if dynamics == "sliding":
        return list(standards(n))
    if dynamics == "pivotless":
        return list(itertools.permutations(range(1, n + 1)))
    return list(irreducibles(n))


def _check_budget(n: int, dynamics: str, max_n: int | None) -> None:
    limit = DEFAULT_MAX_N[dynamics] if max_n is None else max_n
    if n > limit:
        raise BudgetExceeded(f"{dynamics} enumeration at n={n} exceeds the budget n<={limit}")


# -- fingerprints ----------------------------------------------------------------


def fingerprint(p: Permutation | Sequence[int], with_rank: bool = False) -> ClassFingerprint:
    t = p.mapping if isinstance(p, Permutation) else tuple(p)
    fp = fingerprint_tuple(t, with_rank=with_rank)
    if with_rank and is_marked_hyperelliptic(t):
        fp = ClassFingerprint(fp.lam, fp.rank, fp.sign, fp.hyperelliptic, True)
    return fp


def marked_form(n: int, i: int = 0) -> Perm:
    """L^i of (1, 2, 4, 5, ..., n, 3): the identity of size n-1 with one edge added."""
    base = (1, 2) + tuple(range(4, n + 1)) + (3,)
    return op_L(base, i)


def is_marked_hyperelliptic(t: Sequence[int]) -> bool:
    """Rauzy class of the marked-point hyperelliptic form, detected on a standardization."""
    from .pathfinder import standardize

    n = len(t)
    if n < 4:
        return False
    std, _ = standardize(Permutation(tuple(t)))
    return std.mapping in _marked_forms(n)


@functools.lru_cache(maxsize=None)
def _marked_forms(n: int) -> frozenset:
    return frozenset(marked_form(n, i) for i in range(n - 1))


def _fingerprint_for(dynamics: str, rep: Perm) -> ClassFingerprint | None:
    if dynamics == "pivotless" or not is_irreducible_tuple(rep) or len(rep) < 2:
        return None
    return fingerprint(rep, with_rank=dynamics == "rauzy")


# -- enumeration -------------------------------------------------------------------


def _closure(start: Perm, succ, seen: set) -> list[Perm]:
    comp = [start]
    seen.add(start)
    dq = deque([start])
    while dq:
        t = dq.popleft()
        for u in succ(t):
            if u not in seen:
                seen.add(u)
                comp.append(u)
                dq.append(u)
    return comp


def _sliding_components(states: list[Perm]) -> list[list[Perm]]:
    index = {t: k for k, t in enumerate(states)}
    rows, cols = [], []
    succ = unit_moves("sliding", len(states[0]) if states else 0)
    for k, t in enumerate(states):
        for u in succ(t):
            rows.append(k)
            cols.append(index[u])
    g = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(len(states), len(states)))
    _, labels = connected_components(g, directed=True, connection="strong")
    groups: dict[int, list[Perm]] = {}
    for k, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(states[k])
    return list(groups.values())


def orbits(n: int, dynamics: str, max_n: int | None = None) -> list[list[Perm]]:
    """Raw orbits as member lists, sorted by their minimal member."""
    if dynamics not in DYNAMICS:
        raise ValueError(f"unknown dynamics {dynamics!r}")
    _check_budget(n, dynamics, max_n)
    states = state_space(n, dynamics)
    if dynamics == "sliding":
        # S_e is not injective, so orbits are taken as strongly connected components
        comps = _sliding_components(states)
    else:
        succ = unit_moves(dynamics, n)
        seen: set = set()
        comps = [_closure(t, succ, seen) for t in states if t not in seen]
    comps = [sorted(c) for c in comps]
    comps.sort(key=lambda c: c[0])
    return comps


def enumerate_classes(n: int, dynamics: str, max_n: int | None = None, keep_members: bool = False) -> list[OrbitReport]:
    out = []
    for comp in orbits(n, dynamics, max_n):
        rep = comp[0]
        out.append(
            OrbitReport(
                dynamics,
                Permutation(rep),
                len(comp),
                _fingerprint_for(dynamics, rep),
                members=frozenset(comp) if keep_members else frozenset(),
            )
        )
    return out


def class_index(reports: Iterable[OrbitReport]) -> dict[Perm, int]:
    """Member -> position of its report; needs keep_members=True."""
    out = {}
    for k, r in enumerate(reports):
        for t in r.members:
            out[t] = k
    return out


# -- checks against the classification ------------------------------------------------


def small_table(n: int) -> list[tuple[tuple[int, ...], int, bool]]:
    """Observed (lambda, sign, hyperelliptic) triples at size n, cycles of length 1 dropped."""
    rows = []
    for r in enumerate_classes(n, "extended"):
        fp = r.fingerprint
        if fp is None or 1 in fp.lam:
            continue
        rows.append((fp.lam, fp.sign, fp.hyperelliptic))
    return sorted(rows)


def predicted_table(n: int) -> list[tuple[tuple[int, ...], int, bool]]:
    """Predicted triples for the invariants seen at size n (the Id class counted apart)."""
    lams = sorted({tuple(sorted(cycle_invariant_tuple(t).lam, reverse=True)) for t in standards(n)})
    rows = []
    for lam in lams:
        if 1 in lam:
            continue
        rows.extend((lam, s, False) for s in expected_signs(lam, n))
    lam_id, s_id = exceptional_invariants(n)
    rows.append((lam_id, s_id, True))
    return sorted(rows)


def parity_rule_counts(n: int) -> dict[tuple[int, ...], tuple[Counter, Counter]]:
    """lambda -> (observed sign counts, predicted sign counts), non-hyperelliptic classes only."""
    obs: dict[tuple[int, ...], Counter] = {}
    for r in enumerate_classes(n, "extended"):
        fp = r.fingerprint
        if fp is None or fp.hyperelliptic or 1 in fp.lam:
            continue
        obs.setdefault(fp.lam, Counter())[fp.sign] += 1
    lams = {tuple(sorted(cycle_invariant_tuple(t).lam, reverse=True)) for t in standards(n)}
    out = {}
    for lam in sorted(lams):
        if 1 in lam:
            continue
        out[lam] = (obs.get(lam, Counter()), Counter(expected_signs(lam, n)))
    return out


@dataclass(frozen=True)
class ExceptionalRow:
    n: int
    lam: tuple[int, ...]
    sign: int
    expected_lam: tuple[int, ...]
    expected_sign: int

    @property
    def ok(self) -> bool:
        return self.lam == self.expected_lam and self.sign == self.expected_sign


def verify_exceptional_table(n_range: Iterable[int]) -> list[ExceptionalRow]:
    rows = []
    for n in n_range:
        t = tuple(range(1, n + 1))
        inv = cycle_invariant_tuple(t)
        lam_e, s_e = exceptional_invariants(n)
        rows.append(ExceptionalRow(n, inv.lam, sign_tuple(t), lam_e, s_e))
    return rows


# -- diameters -----------------------------------------------------------------------


def _adjacency(members: Sequence[Perm], succ) -> csr_matrix:
    index = {t: k for k, t in enumerate(members)}
    rows, cols = [], []
    for k, t in enumerate(members):
        for u in succ(t):
            j = index.get(u)
            if j is None:
                raise PermError(f"{u} escapes the orbit")
            if j != k:
                rows.append(k)
                cols.append(j)
    m = len(members)
    return csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(m, m))


def _bfs_dist(adj: csr_matrix, src: int) -> np.ndarray:
    return shortest_path(adj, method="D", unweighted=True, directed=True, indices=src)


def directed_diameter(adj: csr_matrix, chunk: int = 256) -> int:
    m = adj.shape[0]
    best = 0
    for lo in range(0, m, chunk):
        d = shortest_path(adj, unweighted=True, directed=True, indices=range(lo, min(m, lo + chunk)))
        if np.isinf(d).any():
            raise PermError("graph is not strongly connected")
        best = max(best, int(d.max()))
    return best


def undirected_diameter(adj: csr_matrix) -> int:
    """Exact diameter of a connected symmetric graph by eccentricity bounding."""
    m = adj.shape[0]
    if m == 1:
        return 0
    lower = np.zeros(m)
    upper = np.full(m, np.inf)
    alive = np.ones(m, dtype=bool)
    lo_d, hi_d = 0.0, np.inf
    pick_high = True
    v = 0
    while alive.any() and lo_d < hi_d:
        d = _bfs_dist(adj, v)
        if np.isinf(d).any():
            raise PermError("graph is not connected")
        e = d.max()
        lo_d = max(lo_d, e)
        lower = np.maximum(lower, np.maximum(e - d, d))
        upper = np.minimum(upper, e + d)
        alive &= ~((upper <= lo_d) | (lower == upper))
        alive[v] = False
        if not alive.any():
            break
        hi_d = upper[alive].max()
        cand = np.flatnonzero(alive)
        v = int(cand[np.argmax(upper[cand])] if pick_high else cand[np.argmin(lower[cand])])
        pick_high = not pick_high
    return int(lo_d)


def measure_diameter(report: OrbitReport, metric: str = "alternation", max_size: int = 200_000) -> int:
    """Exact diameter of one orbit; the orbit must have been kept (keep_members=True)."""
    members = sorted(report.members)
    if not members:
        raise PermError("report carries no members; enumerate with keep_members=True")
    if len(members) > max_size:
        raise BudgetExceeded(f"orbit of size {len(members)} above {max_size}")
    n = report.representative.n
    if metric == "graph":
        return directed_diameter(_adjacency(members, unit_moves(report.dynamics, n)))
    if metric == "alternation":
        return undirected_diameter(_adjacency(members, run_moves(report.dynamics, n)))
    raise ValueError(f"unknown metric {metric!r}")


def with_diameters(report: OrbitReport) -> OrbitReport:
    import dataclasses

    return dataclasses.replace(
        report,
        diameter_graph=measure_diameter(report, "graph"),
        diameter_alternation=measure_diameter(report, "alternation"),
    )


# -- pivotless distance -------------------------------------------------------------------


def pivotless_moves(t: Perm) -> Iterator[Perm]:
    """One application of each L^{i,j} and R^{i,j} that changes t."""
    n = len(t)
    for i in range(n - 1):
        for j in range(1, n - i):
            yield pivotless_L(t, i, j)
    for i in range(3, n + 2):
        for j in range(1, i - 1):
            yield pivotless_R(t, i, j)


def pivotless_distance(a: Sequence[int], b: Sequence[int], max_states: int = 5_000_000) -> int:
    """Exact distance under the pivotless generators (a symmetric move set) by meeting in the middle."""
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0
    dist = [{a: 0}, {b: 0}]
    front = [[a], [b]]
    while front[0] and front[1]:
        side = 0 if len(front[0]) <= len(front[1]) else 1
        mine, other = dist[side], dist[1 - side]
        nxt = []
        best = None
        for t in front[side]:
            d = mine[t] + 1
            for u in pivotless_moves(t):
                if u in other:
                    best = d + other[u] if best is None else min(best, d + other[u])
                if u in mine:
                    continue
                mine[u] = d
                nxt.append(u)
        if best is not None:
            return best
        front[side] = nxt
        if len(dist[0]) + len(dist[1]) > max_states:
            raise BudgetExceeded("pivotless search exceeded its state budget")
    raise PermError("no pivotless path")
