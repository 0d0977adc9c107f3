import itertools

import pytest

from rankscope.errors import BudgetExceeded
from rankscope.matrix_ft import (
    census, count_rank_k, count_rank_k_orthogonal, e11, exhaustive_counts, ft_brute_force,
    ft_rank_one_closed_form, ft_report, gamma_recursion_holds, gl_cardinality,
    grassmannian_cardinality, plancherel_check, positivity_report,
)

SMALL = [(m, n, q) for q in (2, 3) for m, n in itertools.combinations_with_replacement(range(1, 4), 2)
         if q ** (m * n) <= 3**6]


def test_small_cardinalities():
    assert gl_cardinality(2, 2) == 6 and gl_cardinality(3, 3) == 11232 and gl_cardinality(0, 5) == 1
    assert grassmannian_cardinality(4, 2, 2) == 35
    assert grassmannian_cardinality(3, 4, 2) == 0
    for n, k, q in itertools.product(range(1, 6), range(0, 6), (2, 3, 4)):
        assert gamma_recursion_holds(n, k, q)


@pytest.mark.parametrize("m,n,q", SMALL)
def test_rank_counts_partition_the_space(m, n, q):
    hist, _ = census(m, n, q)
    total = 0
    for k in range(min(m, n) + 1):
        c = count_rank_k(m, n, k, q)
        assert int(hist[k].sum()) == c
        total += c
    assert total == q ** (m * n)


@pytest.mark.parametrize("m,n,q", SMALL)
def test_orthogonal_counts_match_enumeration(m, n, q):
    for k in range(min(m, n) + 1):
        assert count_rank_k_orthogonal(m, n, k, q) == exhaustive_counts(m, n, k, q)


@pytest.mark.parametrize("m,n,q", [(m, n, q) for m, n, q in SMALL if m <= n])
def test_closed_form_matches_brute_force(m, n, q):
    for k in range(m + 1):
        assert ft_rank_one_closed_form(m, n, k, q) == ft_brute_force(m, n, k, q, e11(m, n))


def test_worked_examples():
    assert ft_rank_one_closed_form(2, 2, 2, 2) == -2
    assert ft_rank_one_closed_form(2, 2, 1, 2) == 1
    rep = ft_report(2, 2, 2, 2, brute=True)
    assert rep.brute_force == rep.closed_form == -2 and rep.sign == -1
    assert rep.count == 6


def test_ft_at_zero_is_the_count():
    for m, n, q in SMALL:
        for k in range(min(m, n) + 1):
            assert ft_brute_force(m, n, k, q) == count_rank_k(m, n, k, q)


def test_sign_law():
    for q in (2, 3, 4, 5, 7):
        for m in range(1, 5):
            for n in range(m, 6):
                for k in range(1, m + 1):
                    v = ft_rank_one_closed_form(m, n, k, q)
                    assert (v > 0) if k < m else (v < 0)


def test_scaled_character_gives_same_value():
    # FT at a rank-one matrix is invariant under scaling the additive character
    for a in (1, 2):
        assert ft_brute_force(2, 2, 1, 3, e11(2, 2), scale=a) == ft_rank_one_closed_form(2, 2, 1, 3)


@pytest.mark.parametrize("m,n,q", [(1, 2, 2), (2, 2, 2), (2, 3, 2), (2, 2, 3)])
def test_plancherel(m, n, q):
    for k in range(min(m, n) + 1):
        lhs, rhs = plancherel_check(m, n, k, q)
        assert lhs == rhs


def test_plancherel_budget():
    with pytest.raises(BudgetExceeded):
        plancherel_check(3, 3, 1, 3)


def test_positivity_n4_q3():
    rows = positivity_report(4, 3)
    assert [(r.r, r.orbit_size, r.value) for r in rows] == [(0, 1, 1), (1, 32, 5), (2, 48, -6)]
    assert all(r.in_window for r in rows[:-1])


def test_bad_ranges():
    with pytest.raises(ValueError):
        ft_rank_one_closed_form(3, 2, 1, 2)
    with pytest.raises(ValueError):
        count_rank_k(2, 2, 3, 2)
    with pytest.raises(BudgetExceeded):
        census(6, 5, 2)
