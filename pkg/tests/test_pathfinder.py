import random
from collections import deque

import pytest

from rauzy.classes import orbits, standards, unit_moves
from rauzy.dynamics import OperatorWord, is_boundary_state, op_L, slide, slide_period, slide_power
from rauzy.invariants import id_form
from rauzy.labelling import q_mod
from rauzy.pathfinder import (
    NotConnected,
    check_decreasing_partition,
    connect_bfs,
    connect_rauzy,
    connect_sliding,
    is_zigzag,
    longest_increasing_subsequence,
    slide_exponent,
    standardize,
    zigzag,
)
from rauzy.perm_core import PermError, insert_raw, is_irreducible_tuple, remove_edge
from rauzy.perm_core import Permutation as P

from conftest import random_irreducible, random_standard


def lis_dp(t):
    best = [1] * len(t)
    for k in range(len(t)):
        for m in range(k):
            if t[m] < t[k]:
                best[k] = max(best[k], best[m] + 1)
    return max(best, default=0)


# -- standardization and zig-zags ---------------------------------------------------------


def test_standardize_standard_is_empty():
    s, w = standardize(P([1, 3, 2, 4]))
    assert s == P([1, 3, 2, 4]) and w.steps == ()


def test_standardize_random(rng):
    for _ in range(1000):
        n = rng.randint(2, 12)
        p = P(random_irreducible(rng, n))
        s, w = standardize(p)
        assert s(1) == 1 and is_irreducible_tuple(s.mapping)
        assert w.apply(p) == s
        assert {st.gen for st in w.steps} <= {"L", "R"}
        assert w.alternation_length <= n + 1


def test_zigzag_paths(rng):
    for _ in range(300):
        n = rng.randint(2, 10)
        t = random_irreducible(rng, n)
        z = zigzag(t)
        assert len(z) <= n
        if z.kind == "L":
            assert is_zigzag(z.edges, n)
        assert all(t[i - 1] == j for i, j in z.edges)


# -- lower-bound helpers --------------------------------------------------------------


def test_lis_examples():
    for n in range(1, 12):
        assert longest_increasing_subsequence(list(range(1, n + 1))) == n
        assert longest_increasing_subsequence(list(range(n, 0, -1))) == 1


def test_lis_against_dp(rng):
    for _ in range(1000):
        n = rng.randint(0, 30)
        t = rng.sample(range(1, n + 1), n)
        assert longest_increasing_subsequence(t) == lis_dp(t)


def test_decreasing_partition():
    t = (9, 8, 7, 6, 5, 4, 3, 2, 1, 10)
    assert check_decreasing_partition(t, [range(1, 10), [], [], [], [10]])
    assert check_decreasing_partition(t, [[1, 2], [3, 4], [5, 6], [7, 8], [9, 10]])
    # a small increasing part may be the leftover
    assert check_decreasing_partition(t, [[9, 10], [1], [2], [3], range(4, 9)])
    ident = tuple(range(1, 11))
    assert not check_decreasing_partition(ident, [[1, 2], [3, 4], [5, 6], [7, 8], [9, 10]])
    assert not check_decreasing_partition(t, [[1], [2], [3], [4]])


# -- exact search ------------------------------------------------------------------------


def bfs_distances(src, succ):
    dist = {src: 0}
    dq = deque([src])
    while dq:
        t = dq.popleft()
        for u in succ(t):
            if u not in dist:
                dist[u] = dist[t] + 1
                dq.append(u)
    return dist


def test_bfs_trivial_and_disconnected():
    p = P([1, 3, 2, 4])
    c = connect_bfs(p, p)
    assert c.word.steps == ()
    assert connect_bfs(P([1, 2, 3, 4, 5]), P([1, 2, 3, 5, 4]), "extended") is None


@pytest.mark.parametrize("dyn", ["extended", "rauzy"])
def test_bfs_distance_is_exact(dyn, rng):
    for n in (5, 6, 7):
        states = [c[0] for c in orbits(n, dyn)]
        for src in rng.sample(states, min(4, len(states))):
            dist = bfs_distances(src, unit_moves(dyn, n))
            for dst in rng.sample(sorted(dist), min(15, len(dist))):
                c = connect_bfs(P(src), P(dst), dyn)
                assert c.graph_length == dist[dst]


def test_bfs_sliding_distance():
    succ = unit_moves("sliding", 6)
    for src in [c[0] for c in orbits(6, "sliding")]:
        dist = bfs_distances(src, succ)
        for dst in sorted(dist)[::7]:
            assert connect_bfs(P(src), P(dst), "sliding").graph_length == dist[dst]


# -- sliding exponents ------------------------------------------------------------------


def test_slide_exponent_on_labelled_orbits(rng):
    checked = 0
    while checked < 500:
        tau = random_standard(rng, rng.randint(3, 10))
        n = len(tau)
        a, b = rng.randint(1, n - 1), rng.randint(1, n - 1)
        host, e = insert_raw(tau, 1, a, b), b + 1
        if is_boundary_state(host, e):
            continue
        per = slide_period(host, e)
        k = rng.randint(0, per - 1)
        tgt, f = slide_power(host, e, k)
        if remove_edge(tgt, f) != tau:
            continue
        m = slide_exponent(host, e, tgt, f)
        if m is None:
            continue
        assert slide_power(host, e, m)[0] == tgt
        checked += 1


def test_slide_exponent_even_shift_is_q():
    # both indices moved by the same amount: the exponent is q(2x+1, 2x'+1)
    from rauzy.checks import lcm_fixtures
    from rauzy.invariants import cycle_invariant_tuple

    host, e, _ = lcm_fixtures()[0]
    tau = remove_edge(host, e)
    tgt, f = slide_power(host, e, 4)
    inv = cycle_invariant_tuple(tau)
    _, tidx = inv.arc_table()
    x, x2 = tidx[host[e - 1] - 1][1], tidx[tgt[f - 1] - 1][1]
    assert slide_exponent(host, e, tgt, f) == q_mod(10, 2 * x + 1, 2 * x2 + 1) == 4


# -- constructions ---------------------------------------------------------------------------


def test_rauzy_connect_small(rng):
    for n in (4, 5, 6, 7):
        comps = orbits(n, "rauzy")
        for comp in comps:
            for _ in range(3):
                a, b = rng.choice(comp), rng.choice(comp)
                c = connect_rauzy(P(a), P(b))
                assert c.word.apply(P(a)) == P(b)
                assert c.bound_ok and c.alternation_length <= 27 * n
        if len(comps) > 1:
            with pytest.raises(NotConnected):
                connect_rauzy(P(comps[0][0]), P(comps[1][0]))


def test_rauzy_recursion_below_exact_size(rng):
    # lowering n0 forces the inductive branches at n = 8
    comps = [c for c in orbits(8, "rauzy") if len(c) > 50]
    for comp in rng.sample(comps, 6):
        a, b = rng.choice(comp), rng.choice(comp)
        c = connect_rauzy(P(a), P(b), n0=5)
        assert c.word.apply(P(a)) == P(b)
        assert c.core_alternation <= 26 * 8


def test_rauzy_larger_sizes(rng):
    for n in (11, 14):
        for _ in range(2):
            a = random_standard(rng, n)
            w = OperatorWord.parse(" ".join(rng.choice(["L", "R"]) + f"^{rng.randint(1, 4)}" for _ in range(30)))
            b = w.apply(a)
            c = connect_rauzy(P(a), b)
            assert c.word.apply(P(a)) == b and c.bound_ok


def test_sliding_connect_small(rng):
    for n in (4, 5, 6, 7):
        comps = orbits(n, "sliding")
        for comp in comps:
            for _ in range(3):
                a, b = rng.choice(comp), rng.choice(comp)
                c = connect_sliding(P(a), P(b))
                assert c.word.apply(P(a)) == P(b)
                assert {s.gen for s in c.word.steps} <= {"L", "L'", "S"}
        for x, y in zip(comps, comps[1:]):
            with pytest.raises(NotConnected):
                connect_sliding(P(x[0]), P(y[0]))


def test_sliding_connect_larger(rng):
    for n in (11, 13):
        a = random_standard(rng, n)
        b = a
        for _ in range(40):
            b = slide(b, rng.randint(2, n))[0] if rng.random() < 0.7 else op_L(b)
        c = connect_sliding(P(a), P(b))
        assert c.word.apply(P(a)) == P(b)


def test_sliding_exceptional_forms():
    n = 8
    c = connect_sliding(P(id_form(n, 0)), P(id_form(n, 3)))
    assert str(c.word) == "L^3"
    with pytest.raises(NotConnected):
        connect_sliding(P(id_form(n, 0)), P(random_standard(random.Random(0), n)))


def test_sliding_needs_standards():
    with pytest.raises(PermError):
        connect_sliding(P([2, 1, 3]), P([1, 3, 2]))
