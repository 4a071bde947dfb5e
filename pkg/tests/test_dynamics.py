import random
from math import lcm

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rauzy.checks import check_pivotless_fixture, lcm_fixtures
from rauzy.dynamics import (
    EXTENDED,
    EdgeIsAnchor,
    OperatorWord,
    RangeError,
    RankMismatch,
    T_min_tuple,
    Step,
    WordError,
    apply_extended,
    apply_pivotless,
    apply_q,
    apply_sliding,
    apply_T,
    apply_TS,
    black_reduction,
    bonds,
    boost,
    is_boundary_state,
    op_L,
    op_Lp,
    order_of,
    pivotless_L,
    pivotless_project,
    pivotless_R,
    slide,
    slide_period,
    slide_power,
    slide_predecessors,
    track,
)
from rauzy.invariants import cycle_invariant_tuple, id_form, sign_tuple
from rauzy.labelling import slide_labelled
from rauzy.perm_core import EdgeColoring, d_map_tuple, is_irreducible_tuple, remove_edge, restrict
from rauzy.perm_core import Permutation as P

from conftest import random_irreducible, random_standard


def seeds():
    return st.integers(0, 2**32 - 1)


# -- extended generators ---------------------------------------------------------------


def test_L_on_identity_gives_id_forms():
    for n in range(3, 10):
        ident = tuple(range(1, n + 1))
        t = ident
        for i in range(n - 1):
            assert t == id_form(n, i)
            assert op_Lp(ident, (n - i - 1) % (n - 1)) == id_form(n, i)
            t = op_L(t)
        assert t == ident  # L has order n-1 on id


def test_cli_example_L3_at_four():
    assert apply_extended("L", P([1, 2, 3, 4]), 3) == P([1, 2, 3, 4])
    assert apply_extended("L", P([1, 2, 3, 4]), 1) == P([1, 3, 4, 2])


@given(seeds(), st.integers(2, 12), st.sampled_from(sorted(EXTENDED)))
def test_group_operators(seed, n, g):
    t = random_irreducible(random.Random(seed), n)
    f = EXTENDED[g]
    d = order_of(g, t)
    u = f(t, 1)
    assert is_irreducible_tuple(u)
    assert f(t, d) == t
    assert f(u, d - 1) == t
    assert f(t, -1) == f(t, d - 1)


def test_unknown_generator():
    with pytest.raises(WordError):
        apply_extended("X", P([1, 2]))


# -- sliding ---------------------------------------------------------------------------


def test_lcm_fixtures():
    (s1, e1, p1), (s2, e2, p2) = lcm_fixtures()
    assert (p1, p2) == (10, 12)
    assert slide_period(s1, e1) == 10
    assert slide_period(s2, e2) == 12
    assert apply_sliding(e1, P(s1), 10) == P(s1)


def test_slide_anchor_and_standardness():
    with pytest.raises(EdgeIsAnchor):
        slide((1, 3, 2), 1)
    r = random.Random(3)
    for _ in range(500):
        t = random_standard(r, r.randint(3, 12))
        u, pos = slide(t, r.randint(2, len(t)))
        assert u[0] == 1 and is_irreducible_tuple(u)
        assert cycle_invariant_tuple(u).lam == cycle_invariant_tuple(t).lam
        # one application moves the edge off the corners
        assert not is_boundary_state(u, pos)


def test_direct_and_labelled_slides_agree(rng):
    done = 0
    while done < 1000:
        t = random_standard(rng, rng.randint(3, 14))
        i = rng.randint(2, len(t))
        if is_boundary_state(t, i) or not is_irreducible_tuple(remove_edge(t, i)):
            continue
        assert slide(t, i) == slide_labelled(t, i)
        done += 1


def test_periods_follow_lcm(rng):
    for _ in range(300):
        tau = random_standard(rng, rng.randint(3, 10))
        inv = cycle_invariant_tuple(tau)
        bidx, tidx = inv.arc_table()
        n = len(tau)
        a, b = rng.randint(1, n - 1), rng.randint(1, n - 1)
        host = tuple(P(tau).mapping)
        from rauzy.perm_core import insert_raw

        host = insert_raw(tau, 1, a, b)
        l1, l2 = len(inv.cycles[tidx[a][0]]), len(inv.cycles[bidx[b][0]])
        assert slide_power(host, b + 1, lcm(2 * l1, 2 * l2)) == (host, b + 1)


def test_predecessors(rng):
    for _ in range(300):
        t = random_standard(rng, rng.randint(4, 11))
        i = rng.randint(2, len(t))
        u, f = slide(t, i)
        assert (t, i) in slide_predecessors(u, f)
        for x, j in slide_predecessors(u, f):
            assert slide(x, j) == (u, f)


def test_slide_power_negative():
    (s, e, per) = lcm_fixtures()[0]
    fwd = slide_power(s, e, 3)
    assert slide_power(*fwd, -3) == (s, e)


# -- pivotless ---------------------------------------------------------------------------


@given(seeds(), st.integers(3, 10), st.integers(1, 9))
def test_pivotless_consistency(seed, n, j):
    t = random_irreducible(random.Random(seed), n)
    assert pivotless_L(t, t[0], j) == EXTENDED["L"](t, j)
    i = t.index(n) + 1
    assert pivotless_R(t, i, j) == EXTENDED["R"](t, j)


def test_pivotless_breaks_few_bonds(rng):
    for _ in range(10_000):
        n = rng.randint(3, 12)
        t = tuple(rng.sample(range(1, n + 1), n))
        i, j = rng.randint(0, n), rng.randint(1, n)
        for u in (pivotless_L(t, i, j), pivotless_R(t, min(i + 1, n + 1), j)):
            assert bonds(u) >= bonds(t) - 2


def test_pivotless_ranges():
    with pytest.raises(RangeError):
        pivotless_L((1, 2, 3), 5, 1)
    with pytest.raises(RangeError):
        pivotless_R((1, 2, 3), 0, 1)
    assert apply_pivotless("Lp", 1, 1, P([1, 2, 3])) == P([1, 3, 2])


def test_pivotless_fixture():
    assert check_pivotless_fixture()


def test_all_red_projection_reproduces_word(rng):
    for _ in range(200):
        n = rng.randint(3, 9)
        t = random_irreducible(rng, n)
        w = OperatorWord(tuple(Step(rng.choice("LR"), (), rng.randint(1, n)) for _ in range(4)))
        proj = pivotless_project(w, EdgeColoring(P(t), frozenset(range(1, n + 1))))
        assert proj.apply(t) == w.apply(t)
        assert proj.alternation_length <= w.alternation_length


def test_projection_square(rng):
    for _ in range(500):
        n = rng.randint(3, 10)
        t = random_irreducible(rng, n)
        red = frozenset(rng.sample(range(1, n + 1), rng.randint(1, n)))
        w = OperatorWord(tuple(Step(rng.choice("LR"), (), rng.randint(1, n)) for _ in range(5)))
        proj = pivotless_project(w, EdgeColoring(P(t), red))
        after, moved = t, sorted(red)
        for s in w.steps:
            after, moved = track(s, after, moved)
        assert proj.apply(restrict(t, red)) == P(restrict(after, moved))
        assert proj.alternation_length <= w.alternation_length


# -- T, TS and q -------------------------------------------------------------------------


def test_T_raises_rank_by_two(rng):
    for _ in range(1000):
        t = random_standard(rng, rng.randint(2, 10))
        i = rng.randint(1, len(t))
        u = apply_T(i, P(t)).mapping
        a, b = cycle_invariant_tuple(t), cycle_invariant_tuple(u)
        lam = list(a.lam)
        lam.remove(a.rank)
        assert b.rank == a.rank + 2
        assert sorted(lam + [a.rank + 2]) == sorted(b.lam)
        assert sign_tuple(u) == sign_tuple(t)
        # the two new edges are i+1 and i+2
        assert u[i] == 1
        assert black_reduction(u, [i + 1, i + 2]) == t


def test_TS_is_T_under_half_turn(rng):
    for _ in range(300):
        t = random_standard(rng, rng.randint(2, 9))
        i = rng.randint(1, len(t))
        u = apply_TS(i, P(t)).mapping
        a, b = cycle_invariant_tuple(t), cycle_invariant_tuple(u)
        lam = list(a.lam)
        lam.remove(a.rank)
        assert len(u) == len(t) + 2
        assert b.rank == a.rank + 2 and sorted(lam + [a.rank + 2]) == sorted(b.lam)
        assert sign_tuple(u) == sign_tuple(t)


def test_T_index_range():
    with pytest.raises(RangeError):
        apply_T(0, P([1, 2]))
    assert apply_T(1, P([1, 2])).mapping == T_min_tuple((1, 2))


def test_Ti_connected_to_T():
    from rauzy.pathfinder import connect_bfs

    r = random.Random(5)
    for _ in range(40):
        t = random_standard(r, r.randint(3, 6))
        base = apply_T(1, P(t))
        for i in range(2, len(t) + 1):
            assert connect_bfs(base, apply_T(i, P(t)), "rauzy") is not None


def test_q_round_trip_and_rank():
    from rauzy.classes import standards

    for n in range(3, 8):
        for s in standards(n):
            r = cycle_invariant_tuple(s).rank
            tau = P(d_map_tuple(s))
            if r in (1, 2):
                q = apply_q(r, tau)
                assert q == P(EXTENDED["R"](s, 1))
                assert cycle_invariant_tuple(q.mapping).rank == r
                if s.index(n) > 1:  # R is trivial when n sits at position 2
                    assert q(1) != 1
            else:
                with pytest.raises(RankMismatch):
                    apply_q(1, tau)


# -- boost -------------------------------------------------------------------------------


def test_boost_square(rng):
    done = 0
    while done < 300:
        n = rng.randint(5, 10)
        t = random_standard(rng, n)
        g = rng.randint(2, n - 1)
        if t[g - 1] in (1, n):
            continue
        tau = remove_edge(t, g)
        if not is_irreducible_tuple(tau) or tau[0] != 1:
            continue
        steps = []
        for _ in range(rng.randint(1, 10)):
            c = rng.choice(["L", "L'", "S"])
            steps.append(Step("S", (rng.randint(2, n - 1),)) if c == "S" else Step(c))
        w = OperatorWord(tuple(steps))
        b = boost(w, EdgeColoring(P(t), {g}))
        after, (g1,) = t, [g]
        for s in b.steps:
            after, (g1,) = track(s, after, [g1])
        assert P(remove_edge(after, g1)) == w.apply(tau)
        done += 1


def test_boost_of_classical_letters_at_most_doubles(rng):
    for _ in range(300):
        n = rng.randint(5, 10)
        t = random_standard(rng, n)
        g = rng.randint(2, n - 1)
        if t[g - 1] in (1, n):
            continue
        w = OperatorWord(tuple(Step(rng.choice(["L", "L'"])) for _ in range(6)))
        b = boost(w, EdgeColoring(P(t), {g}))
        assert b.graph_length <= 2 * w.graph_length


# -- words -------------------------------------------------------------------------------


def test_word_text_round_trip():
    text = "L R' L'^3 S@4 Lp2,1 Rp3,2^2 T2 TS1 q1 q2 R^-1"
    w = OperatorWord.parse(text)
    assert str(w) == text
    with pytest.raises(WordError):
        OperatorWord.parse("S4")


def test_lengths_and_normalization():
    w = OperatorWord.parse("L L L R L' L'")
    assert w.graph_length == 6
    assert w.alternation_length == 3
    assert str(w.normalized()) == "L^3 R L'^2"
    assert OperatorWord.parse("L L^-1").normalized().steps == ()


def test_inverse_word(rng):
    for _ in range(200):
        t = random_standard(rng, rng.randint(4, 9))
        n = len(t)
        steps, cur = [], t
        for _ in range(5):
            # slides out of a corner state cannot be undone by slides
            i = rng.randint(2, n)
            if rng.random() < 0.5 and not is_boundary_state(cur, i):
                st_ = Step("S", (i,), rng.randint(1, 3))
            else:
                st_ = Step(rng.choice(["L", "L'"]), (), 2)
            steps.append(st_)
            cur = OperatorWord((st_,)).apply(cur).mapping
        w = OperatorWord(tuple(steps))
        u = w.apply(t)
        assert w.inverse(t).apply(u) == P(t)


def test_verify_needs_ends():
    w = OperatorWord.parse("L")
    with pytest.raises(WordError):
        w.verify()
    assert w.with_ends(P([1, 2, 3])).verify()
