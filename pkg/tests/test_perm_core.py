from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rauzy.perm_core import (
    BOTTOM,
    TOP,
    ArcOutOfRange,
    ArcRef,
    EdgeColoring,
    GrayAtBoundary,
    NotSingleGray,
    ParseError,
    Permutation,
    d_map,
    insert,
    is_irreducible,
    is_standard,
    parse,
    parse_colored,
    prepend_one,
    reduce,
    render,
    render_colored,
    render_grid,
    report,
)

from conftest import random_irreducible, random_standard

P = Permutation


def perms(max_n=7):
    return st.integers(1, max_n).flatmap(lambda n: st.permutations(range(1, n + 1))).map(P)


def brute_irreducible(t):
    n = len(t)
    return all(set(t[:k]) != set(range(n - k + 1, n + 1)) for k in range(1, n))


# -- predicates ------------------------------------------------------------------


def test_irreducible_examples():
    assert is_irreducible(P([1]))
    assert not is_irreducible(P([2, 3, 1]))
    assert is_irreducible(P([1, 2, 7, 8, 9, 6, 3, 4, 5]))


def test_standard_examples():
    assert is_standard(P.identity(5))
    assert not is_standard(P([2, 1]))
    assert is_standard(P([1, 2, 7, 8, 9, 6, 3, 4, 5]))


def test_irreducible_matches_brute_force():
    for n in range(1, 8):
        for t in permutations(range(1, n + 1)):
            assert is_irreducible(P(t)) == brute_irreducible(t), t


def test_not_a_bijection():
    with pytest.raises(ValueError):
        P([1, 1])


# -- reduce / insert ----------------------------------------------------------------


def test_reduce_middle_of_identity():
    tau, a, b = reduce(EdgeColoring(P([1, 2, 3]), {2}))
    assert tau == P([1, 2])
    assert (a, b) == (ArcRef(TOP, 1), ArcRef(BOTTOM, 1))
    assert insert(tau, 1, a, b) == P([1, 2, 3])


def test_reduce_errors():
    s = P([4, 1, 5, 8, 3, 6, 2, 7])
    with pytest.raises(GrayAtBoundary):
        reduce(EdgeColoring(s, {8}))
    with pytest.raises(GrayAtBoundary):
        reduce(EdgeColoring(s, {4}))  # top endpoint n
    with pytest.raises(NotSingleGray):
        reduce(EdgeColoring(s, {2, 3}))
    with pytest.raises(NotSingleGray):
        reduce(EdgeColoring(s, set()))


def test_insert_examples():
    assert insert(P([1, 2]), 1, ArcRef(TOP, 1), ArcRef(BOTTOM, 1)) == P([1, 2, 3])
    # two parallel edges between 2 and 1 of (2,1)
    assert insert(P([2, 1]), 2, ArcRef(TOP, 1), ArcRef(BOTTOM, 1)) == P([4, 2, 3, 1])
    with pytest.raises(ArcOutOfRange):
        insert(P([1, 2]), 1, ArcRef(TOP, 2), ArcRef(BOTTOM, 1))
    with pytest.raises(ArcOutOfRange):
        insert(P([1, 2]), 1, ArcRef(BOTTOM, 1), ArcRef(BOTTOM, 1))


def test_insert_reduce_round_trip(rng):
    for _ in range(1000):
        n = rng.randint(2, 12)
        tau = P(random_irreducible(rng, n))
        a, b = rng.randint(1, n - 1), rng.randint(1, n - 1)
        s = insert(tau, 1, ArcRef(TOP, a), ArcRef(BOTTOM, b))
        assert s(b + 1) == a + 1
        assert reduce(EdgeColoring(s, {b + 1})) == (tau, ArcRef(TOP, a), ArcRef(BOTTOM, b))


@given(perms(8), st.data())
def test_insert_many_then_reduce_one_by_one(tau, data):
    if tau.n < 2:
        return
    m = data.draw(st.integers(1, 3))
    a = data.draw(st.integers(1, tau.n - 1))
    b = data.draw(st.integers(1, tau.n - 1))
    s = insert(tau, m, ArcRef(TOP, a), ArcRef(BOTTOM, b))
    assert [s(b + k) for k in range(1, m + 1)] == [a + k for k in range(1, m + 1)]
    for _ in range(m):
        s, _, _ = reduce(EdgeColoring(s, {b + 1}))
    assert s == tau


# -- d and its inverse ----------------------------------------------------------------


def test_d_map_examples():
    assert d_map(P([1, 3, 2])) == P([2, 1])
    for n in range(2, 8):
        assert d_map(P.identity(n)) == P.identity(n - 1)


def test_prepend_one_examples():
    assert prepend_one(P([1])) == P([1, 2])
    assert prepend_one(P([2, 1])) == P([1, 3, 2])


def test_d_map_is_reduction_at_corner(rng):
    # graying (1,1) is outside reduce's domain, so compare against restriction
    from rauzy.perm_core import restrict

    for _ in range(1000):
        s = random_standard(rng, rng.randint(2, 12))
        assert d_map(P(s)).mapping == restrict(s, range(2, len(s) + 1))
        assert prepend_one(d_map(P(s))) == P(s)


@given(perms(9))
def test_d_prepend_inverse(tau):
    assert d_map(prepend_one(tau)) == tau


# -- text formats -----------------------------------------------------------------------


def test_parse_example():
    assert parse("4 1 5 8 3 6 2 7").mapping == (4, 1, 5, 8, 3, 6, 2, 7)
    with pytest.raises(ParseError):
        parse("1 1")
    with pytest.raises(ParseError):
        parse("1 x")


@given(perms(12))
def test_render_parse_round_trip(p):
    assert parse(render(p)) == p


def test_colored_round_trip():
    c = parse_colored("g:3 | 4 1 5 8 3 6 2 7")
    assert c.gray_set == {3}
    assert parse_colored(render_colored(c)) == c
    assert parse_colored("2 1").gray_set == frozenset()


def test_grid_has_one_bullet_per_column():
    p = parse("4 1 5 8 3 6 2 7")
    rows = render_grid(p).splitlines()
    assert sum(r.count("*") + r.count("o") for r in rows) == 8


def test_report_fields():
    text = report(parse_colored("g:3 | 4 1 5 8 3 6 2 7"))
    keys = [line.split(":")[0] for line in text.splitlines()]
    assert keys == ["n", "mapping", "gray"]
