"""Acceptance batteries shared by the `verify` command and the test suite.

Each check returns a CheckResult; none of them raises on a mismatch.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from math import lcm
from typing import Callable

import numpy as np

from .classes import (
    enumerate_classes,
    irreducibles,
    measure_diameter,
    orbits,
    parity_rule_counts,
    pivotless_distance,
    small_table,
    standards,
    verify_exceptional_table,
)
from .dynamics import (
    EXTENDED,
    LiftFailure,
    OperatorWord,
    Step,
    apply_step,
    black_reduction,
    boost,
    is_boundary_state,
    order_of,
    pivotless_project,
    slide,
    slide_power,
    track,
)
from .invariants import arf_tuple, cycle_invariant_tuple
from .labelling import (
    arc_correspondence,
    arc_images,
    labelling_from_invariant,
    predict_insert,
    predict_remove_edge,
)
from .perm_core import BOTTOM, TOP, EdgeColoring, Permutation, insert_raw, is_irreducible_tuple, remove_edge, restrict

# (lambda, sign, hyperelliptic) for every extended class without cycles of
# length 1, Id included; signs 0 where the table omits them
SMALL_N_TABLE = {
    4: [((3,), -1, True)],
    5: [((2, 2), 0, True)],
    6: [((5,), -1, False), ((5,), 1, True)],
    7: [((3, 3), -1, False), ((3, 3), 1, True), ((4, 2), 0, False)],
}

# Id_n: lambda {n-1} for n even and {(n-1)/2, (n-1)/2} for n odd; sign by n mod 8
ID_SIGN_BY_N_MOD_8 = (1, 0, -1, -1, -1, 0, 1, 1)


@dataclass(frozen=True)
class CheckResult:
    number: str
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} [{self.number}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: str, name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    t0 = time.perf_counter()
    ok, detail = fn()
    return CheckResult(number, name, ok, detail, time.perf_counter() - t0)


def _random_irreducible(rng: random.Random, n: int) -> tuple[int, ...]:
    while True:
        t = tuple(rng.sample(range(1, n + 1), n))
        if is_irreducible_tuple(t):
            return t


def _random_standard(rng: random.Random, n: int) -> tuple[int, ...]:
    while True:
        t = (1,) + tuple(x + 1 for x in rng.sample(range(1, n), n - 1))
        if is_irreducible_tuple(t):
            return t


# -- 1, 2: classification ------------------------------------------------------------------------


def check_small_table(ns=range(4, 8)) -> CheckResult:
    def run():
        bad = [n for n in ns if small_table(n) != sorted(SMALL_N_TABLE[n])]
        return not bad, "all rows match" if not bad else f"mismatch at n={bad}"

    return _timed("1", "classification table n=4..7", run)


def check_parity_rule(ns=(8, 9)) -> CheckResult:
    def run():
        bad = []
        rows = 0
        for n in ns:
            for lam, (obs, pred) in parity_rule_counts(n).items():
                rows += 1
                if obs != pred:
                    bad.append((n, lam, dict(obs), dict(pred)))
        return not bad, f"{rows} cycle invariants checked" if not bad else f"mismatches {bad[:3]}"

    return _timed("2", "parity rule n=8,9", run)


# -- 3: sliding orbits -------------------------------------------------------------------------


def check_sliding_orbits(ns=range(5, 9)) -> CheckResult:
    def run():
        bad = []
        for n in ns:
            st = set(standards(n))
            sl = sorted(tuple(c) for c in orbits(n, "sliding"))
            ex = sorted(tuple(x for x in c if x in st) for c in orbits(n, "extended"))
            ex = [c for c in ex if c]
            if sl != ex:
                bad.append(n)
        return not bad, "orbits coincide" if not bad else f"differ at n={bad}"

    return _timed("3", "sliding orbits = extended orbits on standards, n=5..8", run)


# -- 4: Arf values -----------------------------------------------------------------------------


def _arf_ok(t) -> bool:
    n = len(t)
    inv = cycle_invariant_tuple(t)
    a = arf_tuple(t)
    even = sum(1 for x in inv.lam if x % 2 == 0)
    if sum(inv.lam) != n - 1 or even % 2:
        return False
    if even:
        return a == 0
    return (n + inv.ell) % 2 == 0 and abs(a) == 1 << ((n + inv.ell) // 2)


def check_arf_values(max_n: int = 8, big_n: int = 12, samples: int = 1000, seed: int = 0) -> CheckResult:
    def run():
        rng = random.Random(seed)
        count = 0
        bad = []
        for n in range(2, max_n + 1):
            for t in irreducibles(n):
                count += 1
                if not _arf_ok(t):
                    bad.append(t)
        for _ in range(samples):
            t = _random_irreducible(rng, big_n)
            count += 1
            if not _arf_ok(t):
                bad.append(t)
        return not bad, f"{count} permutations" if not bad else f"{len(bad)} failures, e.g. {bad[0]}"

    return _timed("4", f"Arf values n<={max_n} and {samples} samples at n={big_n}", run)


# -- 5: exceptional class ------------------------------------------------------------------------


def check_exceptional_table(ns=range(4, 17)) -> CheckResult:
    def run():
        bad = []
        for row in verify_exceptional_table(ns):
            n = row.n
            lam = (n - 1,) if n % 2 == 0 else ((n - 1) // 2,) * 2
            if row.lam != lam or row.sign != ID_SIGN_BY_N_MOD_8[n % 8] or not row.ok:
                bad.append(n)
        return not bad, "lambda and sign rows match" if not bad else f"mismatch at n={bad}"

    return _timed("5", "exceptional class n=4..16", run)


# -- 6: invariance -------------------------------------------------------------------------------


def labelled_state(tau, top: tuple[int, int, int], bottom: tuple[int, int, int]):
    """Host with one edge added at arcs of the given labels (index, length, copy).

    Returns (host, position of the added edge).
    """
    from .labelling import ArcLabel

    inv = cycle_invariant_tuple(tau)
    lab = labelling_from_invariant(len(tau), inv)
    alpha = lab.arc_with(ArcLabel(TOP, *top)).position
    beta = lab.arc_with(ArcLabel(BOTTOM, *bottom)).position
    return insert_raw(tau, 1, alpha, beta), beta + 1


def _first_with_cycles(lengths: tuple[int, ...], max_n: int = 10):
    for n in range(3, max_n + 1):
        for tau in standards(n):
            lam = cycle_invariant_tuple(tau).lam
            if all(lam.count(x) >= lengths.count(x) for x in lengths):
                return tau
    raise LookupError(lengths)


def lcm_fixtures() -> list[tuple[tuple[int, ...], int, int]]:
    """(host, edge, expected period) for a one-cycle case with 5-cycles and a 2/3 two-cycle case."""
    tau5 = _first_with_cycles((5,))
    s1, e1 = labelled_state(tau5, (1, 5, 1), (4, 5, 1))
    tau23 = _first_with_cycles((3, 2))
    s2, e2 = labelled_state(tau23, (1, 2, 1), (0, 3, 1))
    return [(s1, e1, lcm(10, 10)), (s2, e2, lcm(6, 4))]


def _orbit_period(t, e, cap):
    cur, pos = t, e
    for k in range(1, cap + 1):
        cur, pos = slide(cur, pos)
        if (cur, pos) == (t, e):
            return k
    return None


def check_invariance(trials: int = 10_000, configs: int = 1000, seed: int = 0) -> CheckResult:
    def run():
        rng = random.Random(seed)
        bad = []
        for _ in range(trials):
            n = rng.randint(4, 10)
            g = rng.choice(["L", "L'", "R", "R'", "S"])
            if g == "S":
                t = _random_standard(rng, n)
                u = slide(t, rng.randint(2, n))[0]
            else:
                t = _random_irreducible(rng, n)
                u = EXTENDED[g](t, 1)
            if cycle_invariant_tuple(t).lam != cycle_invariant_tuple(u).lam or arf_tuple(t) != arf_tuple(u):
                bad.append((g, t))
        fixtures = []
        for host, e, want in lcm_fixtures():
            fixtures.append(slide_power(host, e, want) == (host, e) and _orbit_period(host, e, want) == want)
        periods_bad = 0
        for _ in range(configs):
            n = rng.randint(4, 10)
            tau = _random_standard(rng, n)
            inv = cycle_invariant_tuple(tau)
            bidx, tidx = inv.arc_table()
            alpha, beta = rng.randint(1, n - 1), rng.randint(1, n - 1)
            host = insert_raw(tau, 1, alpha, beta)
            e = beta + 1
            l1, l2 = len(inv.cycles[tidx[alpha][0]]), len(inv.cycles[bidx[beta][0]])
            if is_boundary_state(host, e) or slide_power(host, e, lcm(2 * l1, 2 * l2)) != (host, e):
                periods_bad += 1
        ok = not bad and all(fixtures) and periods_bad == 0
        return ok, f"{len(bad)} invariance failures, fixtures {fixtures}, {periods_bad} period failures"

    return _timed("6", "invariance under L, L', R, R', S_e and S_e periods", run)


# -- 7: edge calculus ----------------------------------------------------------------------------


def _correspondence_ok(tau, alpha, beta) -> bool:
    inv = cycle_invariant_tuple(tau)
    lab = labelling_from_invariant(len(tau), inv)
    corr = arc_correspondence(Permutation(tau), lab, alpha, beta)
    images = arc_images(len(tau), alpha, beta)
    host = insert_raw(tau, 1, alpha, beta)
    hinv = cycle_invariant_tuple(host)
    hb, ht = hinv.arc_table()
    where = {}
    for key, tags in corr.items():
        side, _ = key
        imgs = images[key]
        tags = tags if isinstance(tags[0], tuple) else (tags,) * len(imgs)
        for a, tag in zip(imgs, tags):
            c = (ht if side == TOP else hb)[a][0]
            if where.setdefault(tag, c) != c:
                return False
            if tag[0] == "old" and len(hinv.cycles[c]) != tag[1]:
                return False
    return len(set(where.values())) == len(where)


def _edge_trial(tau, alpha, beta) -> bool:
    host = insert_raw(tau, 1, alpha, beta)
    lam = cycle_invariant_tuple(host).lam
    if predict_insert(Permutation(tau), alpha, beta) != lam:
        return False
    if not _correspondence_ok(tau, alpha, beta):
        return False
    e = beta + 1
    return predict_remove_edge(Permutation(host), e) == cycle_invariant_tuple(tau).lam


def check_edge_calculus(max_n: int = 7, samples: int = 1000, big_n: int = 20, seed: int = 0) -> CheckResult:
    def run():
        rng = random.Random(seed)
        count = 0
        bad = []
        for n in range(2, max_n):
            for tau in irreducibles(n):
                for alpha in range(1, n):
                    for beta in range(1, n):
                        count += 1
                        if not _edge_trial(tau, alpha, beta):
                            bad.append((tau, alpha, beta))
        for _ in range(samples):
            n = rng.randint(3, big_n - 1)
            tau = _random_irreducible(rng, n)
            alpha, beta = rng.randint(1, n - 1), rng.randint(1, n - 1)
            count += 1
            if not _edge_trial(tau, alpha, beta):
                bad.append((tau, alpha, beta))
        return not bad, f"{count} insertions" if not bad else f"{len(bad)} failures, e.g. {bad[0]}"

    return _timed("7", f"edge calculus exhaustive n<={max_n}, {samples} samples n<={big_n}", run)


# -- 8: connect certificates ---------------------------------------------------------------------


def check_connect(max_n: int = 8, pairs: int = 300, seed: int = 0, low_n0: int = 5) -> CheckResult:
    """Both constructions against exact classes.

    Connectivity of all standard pairs follows from certificates to a
    representative of each class plus NotConnected across classes; sampled
    pairs and runs with the base case lowered exercise the recursion itself.
    """
    from .pathfinder import NotConnected, connect_bfs, connect_rauzy, connect_sliding

    def run():
        rng = random.Random(seed)
        bad = []
        certs = 0
        worst = 0.0
        worst_end = 0.0

        def rauzy_cert(a, b, **kw):
            nonlocal worst, worst_end, certs
            c = connect_rauzy(Permutation(a), Permutation(b), **kw)
            certs += 1
            n = len(a)
            worst = max(worst, c.core_alternation / n)
            worst_end = max(worst_end, c.alternation_length / n)
            if not c.bound_ok or c.alternation_length > 27 * n:
                bad.append(("bound", a, b))

        for n in range(3, max_n + 1):
            for dyn in ("rauzy", "sliding"):
                reports = enumerate_classes(n, dyn, keep_members=True)
                st = set(standards(n))
                reps = []
                for r in reports:
                    mem = sorted(x for x in r.members if x in st)
                    if not mem:
                        continue
                    reps.append(mem[0])
                    for x in mem:
                        if dyn == "rauzy":
                            rauzy_cert(x, mem[0])
                        else:
                            connect_sliding(Permutation(x), Permutation(mem[0]))
                            certs += 1
                # representatives of different classes must be refused
                for i in range(len(reps)):
                    for j in range(i + 1, len(reps)):
                        fn = connect_rauzy if dyn == "rauzy" else connect_sliding
                        try:
                            fn(Permutation(reps[i]), Permutation(reps[j]))
                            bad.append(("claimed", dyn, reps[i], reps[j]))
                        except NotConnected:
                            pass
                all_st = sorted(st)
                for _ in range(pairs // (max_n - 2)):
                    a, b = rng.choice(all_st), rng.choice(all_st)
                    oracle = connect_bfs(Permutation(a), Permutation(b), dyn) is not None
                    fn = connect_rauzy if dyn == "rauzy" else connect_sliding
                    try:
                        fn(Permutation(a), Permutation(b))
                        got = True
                    except NotConnected:
                        got = False
                    if got != oracle:
                        bad.append(("disagree", dyn, a, b))
        # recursion with the base case lowered
        for n in range(low_n0 + 1, max_n + 1):
            for _ in range(20):
                a = _random_standard(rng, n)
                b = _random_walk(rng, a, 30)
                try:
                    rauzy_cert(a, b, n0=low_n0)
                    connect_sliding(Permutation(a), Permutation(_sliding_walk(rng, a, 30)), n0=low_n0)
                    certs += 2
                except Exception as exc:  # noqa: BLE001 - reported below
                    bad.append(("recursion", type(exc).__name__, a))
        detail = f"{certs} certificates, {len(bad)} problems, worst core {worst:.2f}n, end-to-end {worst_end:.2f}n"
        if bad:
            detail += f", e.g. {bad[0]}"
        return not bad, detail

    return _timed("8", f"connect certificates n<={max_n}", run)


def _random_walk(rng, t, k):
    for _ in range(k):
        g = rng.choice(["L", "R"])
        t = EXTENDED[g](t, rng.randint(1, len(t)))
    return t


def _sliding_walk(rng, t, k):
    n = len(t)
    for _ in range(k):
        g = rng.choice(["L", "L'", "S"])
        t = slide(t, rng.randint(2, n))[0] if g == "S" else EXTENDED[g](t, 1)
    return t


def check_runtime_slope(ns=range(8, 13), reps: int = 60, seed: int = 0, n0: int = 5) -> CheckResult:
    """log-log slope of connect_rauzy time against n, bounded searches excluded.

    Per-call times are heavy tailed (a few calls need long structural
    searches), so each size contributes the median over `reps` calls; the
    slope of the means is reported next to it.  The base-case atlases are a
    fixed table, so they are built before timing starts, and the collector
    is paused while a size is timed.
    """
    import gc
    import statistics

    from .pathfinder import atlas, connect_rauzy

    def run():
        rng = random.Random(seed)
        for k in range(2, n0 + 1):
            atlas("rauzy", k).grow_all(k)
        xs, med, mean, raw = [], [], [], []
        for n in ns:
            cases = []
            for _ in range(reps):
                a = _random_irreducible(rng, n)
                cases.append((a, _random_walk(rng, a, 40)))
            own, total = [], []
            gc.collect()
            gc.disable()
            try:
                for a, b in cases:
                    t0 = time.perf_counter()
                    c = connect_rauzy(Permutation(a), Permutation(b), n0=n0)
                    dt = time.perf_counter() - t0
                    total.append(dt)
                    own.append(max(dt - c.search_seconds, 1e-7))
            finally:
                gc.enable()
            xs.append(math.log(n))
            med.append(math.log(statistics.median(own)))
            mean.append(math.log(statistics.fmean(own)))
            raw.append(math.log(statistics.median(total)))
        slope = float(np.polyfit(xs, med, 1)[0])
        s_mean = float(np.polyfit(xs, mean, 1)[0])
        s_raw = float(np.polyfit(xs, raw, 1)[0])
        detail = f"slope {slope:.2f} without searches (means {s_mean:.2f}), {s_raw:.2f} with them"
        return abs(slope - 2.0) <= 0.6, detail

    return _timed("8t", "connect_rauzy runtime scaling n=8..12", run)


# -- 9: diameters --------------------------------------------------------------------------------


def check_diameters(max_n: int = 8, max_k: int = 9) -> CheckResult:
    def run():
        bad = []
        classes = 0
        for n in range(3, max_n + 1):
            for r in enumerate_classes(n, "rauzy", keep_members=True):
                classes += 1
                d = measure_diameter(r, "alternation")
                if not n / 16 <= d <= 27 * n:
                    bad.append((n, r.representative.mapping, d))
        piv = []
        for k in range(2, max_k + 1):
            d = pivotless_distance(tuple(range(1, k + 1)), tuple(range(k, 0, -1)))
            piv.append(d)
            if d < (k - 1) / 2:
                bad.append(("pivotless", k, d))
        if bad:
            return False, f"{bad[:3]}"
        return True, f"{classes} class diameters in range, pivotless id->reverse {piv}"

    return _timed("9", "diameter bracket", run)


# -- 10: commuting squares -----------------------------------------------------------------------


def check_squares(trials: int = 1000, seed: int = 0) -> CheckResult:
    def run():
        rng = random.Random(seed)
        boost_bad = lift_fail = 0
        for _ in range(trials):
            n = rng.randint(5, 10)
            t = _random_standard(rng, n)
            gray = [g for g in range(2, n) if t[g - 1] not in (1, n) and is_irreducible_tuple(remove_edge(t, g))]
            if not gray:
                continue
            g = rng.choice(gray)
            tau = remove_edge(t, g)
            steps = []
            for _ in range(rng.randint(1, 6)):
                kind = rng.choice(["L", "L'", "S"])
                steps.append(Step("S", (rng.randint(2, n - 1),)) if kind == "S" else Step(kind))
            w = OperatorWord(tuple(steps))
            try:
                lifted = boost(w, EdgeColoring(Permutation(t), frozenset({g})))
            except LiftFailure:
                lift_fail += 1
                continue
            cur, marked = t, [g]
            for s in lifted.steps:
                cur, marked = track(s, cur, marked)
            if black_reduction(cur, marked) != w.apply(tau).mapping:
                boost_bad += 1
        piv_bad = 0
        for _ in range(trials):
            n = rng.randint(4, 10)
            t = _random_irreducible(rng, n)
            red = frozenset(rng.sample(range(1, n + 1), rng.randint(2, n)))
            steps = []
            cur = t
            for _ in range(rng.randint(1, 6)):
                gname = rng.choice(["L", "R"])
                s = Step(gname, (), rng.randint(1, max(1, order_of(gname, cur))))
                steps.append(s)
                cur = apply_step(s, cur)
            w = OperatorWord(tuple(steps))
            proj = pivotless_project(w, EdgeColoring(Permutation(t), red))
            _, moved = _track_all(steps, t, red)
            if proj.apply(proj.source).mapping != restrict(w.apply(t).mapping, moved):
                piv_bad += 1
        fixture = check_pivotless_fixture()
        ok = boost_bad == 0 and lift_fail == 0 and piv_bad == 0 and fixture
        return ok, f"boost {boost_bad} bad / {lift_fail} unliftable, pivotless {piv_bad} bad, P(L^2)=L^(2,2) fixture {fixture}"

    return _timed("10", "commuting squares", run)


def _track_all(steps, t, red):
    marked = sorted(red)
    for s in steps:
        t, marked = track(s, t, marked)
    return t, marked


def pivotless_fixture():
    """Host with two red edges among the values <= sigma(1) and two among the top j=2 values."""
    t = (2, 4, 7, 1, 3, 6, 5)
    red = frozenset(i for i, v in enumerate(t, 1) if v in (1, 2, 6, 7))
    return t, red, 2


def check_pivotless_fixture() -> bool:
    t, red, j = pivotless_fixture()
    w = OperatorWord((Step("L", (), j),))
    proj = pivotless_project(w, EdgeColoring(Permutation(t), red))
    _, moved = _track_all(w.steps, t, red)
    return proj.steps == (Step("Lp", (2, 2), 1),) and proj.apply(proj.source).mapping == restrict(
        w.apply(t).mapping, moved
    )


ALL_CHECKS = {
    "1": check_small_table,
    "2": check_parity_rule,
    "3": check_sliding_orbits,
    "4": check_arf_values,
    "5": check_exceptional_table,
    "6": check_invariance,
    "7": check_edge_calculus,
    "8": check_connect,
    "8t": check_runtime_slope,
    "9": check_diameters,
    "10": check_squares,
}
