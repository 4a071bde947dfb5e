from collections import Counter
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rauzy.classes import irreducibles, standards
from rauzy.dynamics import EXTENDED, op_L, op_Lp
from rauzy.invariants import (
    ClassFingerprint,
    NotStandard,
    TooLarge,
    UnsupportedCycleOne,
    arf,
    arf_fast,
    arf_tuple,
    chi,
    classify,
    cycle_invariant,
    doubled_diagram_cycles,
    exceptional_invariants,
    genus,
    id_form,
    is_exceptional,
    perm_type,
    sign,
    x_params_via_reduction,
)
from rauzy.perm_core import Permutation as P

from conftest import random_irreducible

FIG_LAMBDA = P([1, 2, 7, 8, 9, 6, 3, 4, 5])


@st.composite
def irreducible_perms(draw, min_n=2, max_n=9):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    import random

    return P(random_irreducible(random.Random(seed), n))


def arf_by_definition(t):
    n = len(t)
    total = 0
    for k in range(n + 1):
        for sub in combinations(range(1, n + 1), k):
            total += (-1) ** (k + chi(P(t), sub))
    return total


# -- cycle invariant ---------------------------------------------------------------------


def test_figure_lambda():
    inv = cycle_invariant(FIG_LAMBDA)
    assert inv.lam == (2, 2, 2, 2)
    assert inv.rank == 2
    assert inv.ell == 3


def test_identity_two():
    inv = cycle_invariant(P([1, 2]))
    assert inv.lam == (1,)
    assert inv.top_principal == inv.bottom_principal == 0


def test_cycles_cover_every_arc_once():
    for t in irreducibles(7):
        inv = cycle_invariant(P(t))
        bots = sorted(b for c in inv.cycles for b in c.bottoms)
        tops = sorted(a for c in inv.cycles for a in c.tops)
        assert bots == tops == list(range(1, 7))


def test_doubled_graph_agrees_with_arc_tracing():
    # the explicit 4n-node construction is an independent oracle
    for n in range(2, 8):
        for t in irreducibles(n):
            inv = cycle_invariant(P(t))
            cyc = doubled_diagram_cycles(t)
            assert sorted(len(tops) for _, tops, _, _ in cyc) == sorted(inv.lam)
            top_cycle = [set(tops) for _, tops, tp, _ in cyc if tp][0]
            assert top_cycle == set(inv.cycles[inv.top_principal].tops)


@given(irreducible_perms())
def test_dimension_formula_and_even_parts(p):
    inv = cycle_invariant(p)
    assert sum(inv.lam) == p.n - 1
    assert sum(1 for x in inv.lam if x % 2 == 0) % 2 == 0


@given(irreducible_perms(), st.sampled_from(sorted(EXTENDED)))
def test_cycle_invariant_is_invariant(p, g):
    q = P(EXTENDED[g](p.mapping, 1))
    assert cycle_invariant(q).lam == cycle_invariant(p).lam


# -- type --------------------------------------------------------------------------------


def test_type_counts_on_L_standard_families():
    # i*m_i members of type X(r, i) and one H(r-j+1, j) for each j <= r
    for n in range(3, 9):
        for s in standards(n):
            inv = cycle_invariant(P(s))
            r = inv.rank
            fam, t = {s}, s
            for _ in range(n):
                t = op_L(t)
                fam.add(t)
            assert len(fam) == n - 1
            got = Counter((pt.kind, pt.params) for pt in (perm_type(P(f)) for f in fam))
            rest = Counter(inv.lam)
            rest[r] -= 1
            want = Counter({("X", (r, i)): i * m for i, m in rest.items() if m})
            want.update(("H", (r - j + 1, j)) for j in range(1, r + 1))
            assert got == want, s


def test_L_prime_family_is_standard_and_distinct():
    for s in standards(7):
        fam, t = {s}, s
        for _ in range(7):
            t = op_Lp(t)
            fam.add(t)
        assert len(fam) == 6 and all(f[0] == 1 for f in fam)


def test_x_params_from_reduction():
    # when d(p) stays irreducible the parameters solve the reduction invariant
    checked = 0
    for n in range(4, 9):
        for s in standards(n):
            pt = perm_type(P(s))
            got = x_params_via_reduction(P(s))
            if pt.kind == "X" and got is not None:
                assert got == pt.params
                checked += 1
    assert checked > 1000


def test_x_params_need_standard():
    with pytest.raises(NotStandard):
        x_params_via_reduction(P([2, 3, 1, 4]))


def test_distinct_principals_give_X():
    for t in irreducibles(6):
        inv = cycle_invariant(P(t))
        assert (perm_type(P(t)).kind == "X") == (inv.top_principal != inv.bottom_principal)


# -- Arf and sign -------------------------------------------------------------------------


def test_chi_figure():
    s = P([2, 5, 1, 4, 7, 8, 3, 9, 6])
    assert chi(s, [1, 2, 6, 8, 9]) == 8


def test_arf_matches_definition():
    for n in range(2, 7):
        for t in irreducibles(n):
            assert arf_tuple(t) == arf_by_definition(t)


@given(irreducible_perms(max_n=12))
def test_fast_arf_agrees(p):
    assert arf_fast(p) == arf(p)


@given(irreducible_perms(max_n=10))
def test_arf_value_set(p):
    inv = cycle_invariant(p)
    a = arf_fast(p)
    has_even = any(x % 2 == 0 for x in inv.lam)
    if has_even:
        assert a == 0
    else:
        assert abs(a) == 2 ** ((p.n + inv.ell) // 2)


@given(irreducible_perms(max_n=10), st.sampled_from(sorted(EXTENDED)))
def test_arf_invariant(p, g):
    assert arf_fast(P(EXTENDED[g](p.mapping, 1))) == arf_fast(p)


def test_arf_limit():
    with pytest.raises(TooLarge):
        arf(P.identity(30))


def test_sign_examples():
    assert sign(P(id_form(6, 0))) == 1
    assert sign(FIG_LAMBDA) == 0
    p = P([1, 4, 3, 2, 6, 5])
    assert sign(p) == sign(P(op_L(p.mapping)))


# -- classification oracle ----------------------------------------------------------------


def fp(lam, s, hyp=False):
    return ClassFingerprint(tuple(lam), None, s, hyp)


def test_classify_small_table():
    # (3,3)+ at n=7 is the Id class only
    assert classify(fp((3, 3), 1), 7) == 0
    assert classify(fp((4, 2), 0), 7) == 1
    assert classify(fp((3, 3), -1), 7) == 1
    assert classify(fp((3, 3), 1, True), 7) == 1
    # lambda {5} at n=6: two classes, Id carries the + sign
    assert classify(fp((5,), 1), 6) == 0
    assert classify(fp((5,), -1), 6) == 1
    assert classify(fp((5,), 1, True), 6) == 1


def test_classify_parity_rule():
    assert classify(fp((4, 2, 2), 0), 9) == 0  # odd number of even parts
    assert classify(fp((4, 2), 0), 7) == 1
    assert classify(fp((4, 4, 3), 0), 12) == 1
    assert classify(fp((3, 3, 3), 1), 10) == 1
    assert classify(fp((3, 3, 3), -1), 10) == 1
    assert classify(fp((3, 3, 3), 0), 10) == 0


def test_classify_rejects_unit_parts():
    with pytest.raises(UnsupportedCycleOne):
        classify(fp((3, 1), 0), 5)


def test_exceptional_rows():
    assert exceptional_invariants(6) == ((5,), 1)
    assert exceptional_invariants(9) == ((4, 4), 0)
    assert exceptional_invariants(12) == ((11,), -1)


def test_is_exceptional():
    for n in range(3, 10):
        ident = tuple(range(1, n + 1))
        assert is_exceptional(P(ident))
        t = ident
        for i in range(n):
            assert is_exceptional(P(t))
            assert t == id_form(n, i)
            t = op_L(t)
        # the L' description of the same forms
        assert op_Lp(ident, n - 2) == id_form(n, 1)


def test_non_exceptional_at_five():
    from rauzy.classes import enumerate_classes

    non_id = [r for r in enumerate_classes(5, "extended") if not r.fingerprint.hyperelliptic]
    for r in non_id:
        assert not is_exceptional(r.representative)
    # at n=5 the only class with lambda {2,2} is Id itself
    assert sorted(r.fingerprint.lam for r in non_id) == [(1, 1, 1, 1), (3, 1)]


def test_genus():
    assert genus(cycle_invariant(P.identity(6)), 6) == 3
    assert genus(cycle_invariant(FIG_LAMBDA), 9) == 3
