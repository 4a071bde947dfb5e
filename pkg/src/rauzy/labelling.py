"""Consistent labellings of arcs and the one-edge insertion calculus.

Along a cycle of length l the arcs alternate bottom, top, bottom, ...  and
receive the indices 0, 1, 2, ..., 2l-1: bottom arcs carry even indices and
top arcs odd ones.  The canonical labelling starts each cycle at its
leftmost bottom arc; cycles of equal length are told apart by a copy number
ordered the same way.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .invariants import (
    CycleInvariant,
    bottom_after_top,
    cycle_invariant_tuple,
    top_after_bottom,
)
from .perm_core import BOTTOM, TOP, ArcRef, GrayAtBoundary, Permutation, PermError, insert_raw, remove_edge


class SameCycle(PermError):
    pass


class DistinctCycles(PermError):
    pass


@dataclass(frozen=True, order=True)
class ArcLabel:
    side: str
    index: int
    cycle_length: int
    copy: int

    def __post_init__(self):
        want = 1 if self.side == TOP else 0
        if self.index % 2 != want or not 0 <= self.index < 2 * self.cycle_length:
            raise PermError(f"index {self.index} invalid for a {self.side} label of a {self.cycle_length}-cycle")

    @property
    def cycle(self) -> tuple[int, int]:
        return (self.cycle_length, self.copy)

    def __str__(self) -> str:
        return f"{self.side[0]}_{{{self.index},{self.cycle_length},{self.copy}}}"


@dataclass(frozen=True)
class ConsistentLabelling:
    n: int
    pi_b: dict[int, ArcLabel]
    pi_t: dict[int, ArcLabel]

    def arc_with(self, label: ArcLabel) -> ArcRef:
        table = self.pi_t if label.side == TOP else self.pi_b
        for pos, lab in table.items():
            if lab == label:
                return ArcRef(label.side, pos)
        raise KeyError(label)

    def label(self, arc: ArcRef) -> ArcLabel:
        return (self.pi_t if arc.side == TOP else self.pi_b)[arc.position]


def q_mod(n: int, x: int, y: int) -> int:
    """Smallest q >= 0 with x + q = y (mod n)."""
    return y - x if y >= x else n - x + y


def consecutive_bottom(p: Permutation, beta: int) -> int:
    """Next bottom arc on the cycle of bottom arc beta."""
    t = p.mapping
    inv = p.inverse_mapping
    a, _ = top_after_bottom(t, beta)
    return bottom_after_top(t, inv, a)[0]


def consecutive_top(p: Permutation, alpha: int) -> int:
    """Next top arc on the cycle of top arc alpha."""
    t = p.mapping
    b, _ = bottom_after_top(t, p.inverse_mapping, alpha)
    return top_after_bottom(t, b)[0]


def _copies(inv: CycleInvariant) -> list[int]:
    seen: Counter = Counter()
    out = []
    # cycles are already ordered by their leftmost bottom arc
    for c in inv.cycles:
        seen[len(c)] += 1
        out.append(seen[len(c)])
    return out


def labelling_from_invariant(n: int, inv: CycleInvariant) -> ConsistentLabelling:
    copies = _copies(inv)
    pi_b: dict[int, ArcLabel] = {}
    pi_t: dict[int, ArcLabel] = {}
    for c, cy in enumerate(inv.cycles):
        ell = len(cy)
        for k, (b, a) in enumerate(zip(cy.bottoms, cy.tops)):
            pi_b[b] = ArcLabel(BOTTOM, 2 * k, ell, copies[c])
            pi_t[a] = ArcLabel(TOP, 2 * k + 1, ell, copies[c])
    return ConsistentLabelling(n, pi_b, pi_t)


def build_labelling(p: Permutation) -> ConsistentLabelling:
    return labelling_from_invariant(p.n, cycle_invariant_tuple(p.mapping))


def top_from_bottom(p: Permutation, pi_b: dict[int, ArcLabel]) -> dict[int, ArcLabel]:
    """The unique top labelling compatible with a bottom labelling."""
    t, inv = p.mapping, p.inverse_mapping
    out = {}
    for a in range(1, p.n):
        b, _ = bottom_after_top(t, inv, a)
        lb = pi_b[b]
        out[a] = ArcLabel(TOP, (lb.index - 1) % (2 * lb.cycle_length), lb.cycle_length, lb.copy)
    return out


def check_rules(p: Permutation, lab: ConsistentLabelling) -> tuple[bool, bool, bool]:
    """Machine check of the alphabet, consecutive-index and edge-coupling rules."""
    t, inv = p.mapping, p.inverse_mapping
    n = p.n
    rule1 = rule2 = rule3 = True
    for b in range(1, n):
        a, _ = top_after_bottom(t, b)
        b2, _ = bottom_after_top(t, inv, a)
        lb, la, lb2 = lab.pi_b[b], lab.pi_t[a], lab.pi_b[b2]
        if not lb.cycle == la.cycle == lb2.cycle:
            rule1 = False
        m = 2 * lb.cycle_length
        if (lb.index + 2) % m != lb2.index or (lb.index + 1) % m != la.index:
            rule2 = False
    for i in range(1, n):
        j = t[i - 1]
        if j == 1:
            continue
        la, lb = lab.pi_t[j - 1], lab.pi_b[i]
        if la.cycle != lb.cycle or (la.index + 1) % (2 * la.cycle_length) != lb.index:
            rule3 = False
    return rule1, rule2, rule3


# -- predictions ---------------------------------------------------------------


def _multiset_replace(lam: Sequence[int], out: Sequence[int], add: Sequence[int]) -> tuple[int, ...]:
    c = Counter(lam)
    for x in out:
        if c[x] <= 0:
            raise PermError(f"{x} not in {tuple(lam)}")
        c[x] -= 1
    for x in add:
        c[x] += 1
    return tuple(sorted(c.elements(), reverse=True))


def predict_insert_two_cycles(inv: CycleInvariant, alpha_label: ArcLabel, beta_label: ArcLabel) -> tuple[int, ...]:
    if alpha_label.cycle == beta_label.cycle:
        raise SameCycle("both arcs lie on one cycle")
    l1, l2 = alpha_label.cycle_length, beta_label.cycle_length
    return _multiset_replace(inv.lam, (l1, l2), (l1 + l2 + 1,))


def split_lengths(ell: int, top_index: int, bottom_index: int) -> tuple[int, int]:
    m = 2 * ell
    return (q_mod(m, top_index, bottom_index) + 1) // 2, (q_mod(m, bottom_index, top_index) + 1) // 2


def predict_insert_one_cycle(inv: CycleInvariant, alpha_label: ArcLabel, beta_label: ArcLabel) -> tuple[int, ...]:
    if alpha_label.cycle != beta_label.cycle:
        raise DistinctCycles("arcs lie on two cycles")
    ell = alpha_label.cycle_length
    a, b = split_lengths(ell, alpha_label.index, beta_label.index)
    return _multiset_replace(inv.lam, (ell,), (a, b))


def predict_insert(p: Permutation, alpha: int, beta: int) -> tuple[int, ...]:
    """Predicted cycle invariant of insert(p, 1, top arc alpha, bottom arc beta)."""
    inv = cycle_invariant_tuple(p.mapping)
    lab = labelling_from_invariant(p.n, inv)
    la, lb = lab.pi_t[alpha], lab.pi_b[beta]
    if la.cycle == lb.cycle:
        return predict_insert_one_cycle(inv, la, lb)
    return predict_insert_two_cycles(inv, la, lb)


def _in_open(m: int, lo: int, hi: int, i: int) -> bool:
    """i strictly inside the oriented interval ]lo, hi[ mod m."""
    return 0 < q_mod(m, lo, i) < q_mod(m, lo, hi)


def arc_correspondence(
    tau: Permutation, labelling: ConsistentLabelling, alpha: int, beta: int
) -> dict[tuple[str, int], tuple]:
    """Which cycle of insert(tau, 1, alpha, beta) each arc of tau goes to.

    Values are tags: ("old", length, copy) for untouched cycles, ("merged",)
    for the joined cycle, ("first",) / ("second",) for the two halves of a
    split cycle.  The two host arcs map to a pair (left part, right part).
    """
    la, lb = labelling.pi_t[alpha], labelling.pi_b[beta]
    out: dict[tuple[str, int], tuple] = {}
    same = la.cycle == lb.cycle
    m = 2 * la.cycle_length
    x1, y2 = la.index, lb.index

    def tag(lab: ArcLabel) -> tuple:
        if lab.cycle not in (la.cycle, lb.cycle):
            return ("old", lab.cycle_length, lab.copy)
        if not same:
            return ("merged",)
        return ("first",) if _in_open(m, x1, y2, lab.index) else ("second",)

    for side, table in ((TOP, labelling.pi_t), (BOTTOM, labelling.pi_b)):
        for pos, lab in table.items():
            out[(side, pos)] = tag(lab)
    if same:
        out[(TOP, alpha)] = (("second",), ("first",))
        out[(BOTTOM, beta)] = (("first",), ("second",))
    else:
        out[(TOP, alpha)] = (("merged",), ("merged",))
        out[(BOTTOM, beta)] = (("merged",), ("merged",))
    return out


def arc_images(tau_n: int, alpha: int, beta: int) -> dict[tuple[str, int], tuple[int, ...]]:
    """Arcs of the enlarged permutation that each arc of tau becomes."""
    out = {}
    for side, host in ((TOP, alpha), (BOTTOM, beta)):
        for a in range(1, tau_n):
            if a < host:
                out[(side, a)] = (a,)
            elif a > host:
                out[(side, a)] = (a + 1,)
            else:
                out[(side, a)] = (a, a + 1)
    return out


def predict_remove_edge(p: Permutation, edge: int) -> tuple[int, ...]:
    """Predicted cycle invariant after deleting the edge at bottom position `edge`."""
    n = p.n
    j = p(edge)
    if edge in (1, n) or j in (1, n):
        raise GrayAtBoundary(f"edge ({edge},{j}) has an endpoint at a corner")
    lab = build_labelling(p)
    left, right = lab.pi_t[j - 1], lab.pi_t[j]
    inv = cycle_invariant_tuple(p.mapping)
    if left.cycle != right.cycle:
        return _multiset_replace(inv.lam, (left.cycle_length, right.cycle_length), (left.cycle_length + right.cycle_length - 1,))
    ell = left.cycle_length
    x = q_mod(2 * ell, left.index, right.index) // 2
    return _multiset_replace(inv.lam, (ell,), tuple(v for v in (x - 1, ell - x) if v > 0))


# -- labelled sliding --------------------------------------------------------------


def slide_labelled(t: Sequence[int], i: int) -> tuple[tuple[int, ...], int]:
    """S_e via the labelling of the reduction: the edge steps along its cycle(s).

    Needs the edge to avoid the corners, as the arc pair is undefined otherwise.
    """
    n = len(t)
    j = t[i - 1]
    if i in (1, n) or j in (1, n):
        raise GrayAtBoundary(f"edge ({i},{j}) has an endpoint at a corner")
    tau = remove_edge(t, i)
    inv = cycle_invariant_tuple(tau)
    bidx, tidx = inv.arc_table()
    alpha, beta = j - 1, i - 1
    ca, x = tidx[alpha]
    cb, y = bidx[beta]
    new_alpha = inv.cycles[cb].tops[y]
    new_beta = inv.cycles[ca].bottoms[(x + 1) % len(inv.cycles[ca])]
    return insert_raw(tau, 1, new_alpha, new_beta), new_beta + 1
