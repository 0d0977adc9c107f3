from fractions import Fraction

import pytest

from rankscope.atlas import boundary_regular_classes, get_atlas
from rankscope.chartable import get_table
from rankscope.errors import BudgetExceeded, InvalidClass
from rankscope.gencount import (
    auto_regular_class, convolution_oracle, frobenius_count, rank_one_sum_check, rank_split_sums,
    sts_deviation_table,
)


@pytest.mark.parametrize("key", [("SL", 3, 2), ("GL", 3, 2), ("GL", 2, 3), ("SL", 3, 3)])
def test_frobenius_matches_oracle(key):
    T = get_table(get_atlas(*key))
    A = T.atlas
    orc = convolution_oracle(A, 5)
    for ell in range(1, 6):
        for c in range(A.K):
            assert frobenius_count(T, ell, c) == int(orc[ell][c])


def test_oracle_mass_and_class_functions():
    A = get_atlas("GL", 3, 2)
    orc = convolution_oracle(A, 3)
    csize = int(A.sizes[A.transvection_class_id])
    for ell, f in enumerate(orc):
        assert int((f * A.sizes).sum()) == csize**ell
    assert orc[0][0] == 1 and orc[0][1:].sum() == 0
    with pytest.raises(BudgetExceeded):
        convolution_oracle(A, 8, cap=10**4)


def test_short_words_miss_boundary_classes():
    T = get_table(get_atlas("SL", 3, 3))
    g = auto_regular_class(T.atlas)
    # a product of l transvections fixes a subspace of dimension >= n - l
    assert frobenius_count(T, 1, g) == frobenius_count(T, 2, g) == 0
    assert frobenius_count(T, 3, g) > 0


def test_sts_deviation_sl3_3():
    T = get_table(get_atlas("SL", 3, 3))
    tab = sts_deviation_table(T, auto_regular_class(T.atlas), ell_max=6, oracle=True)
    assert [r.deviation for r in tab.rows] == [
        1, 1, Fraction(61, 169), Fraction(253, 2197), Fraction(1021, 28561), Fraction(4093, 371293)]
    assert all(r.oracle == r.frobenius for r in tab.rows)
    assert tab.rows[2].rank_sums == {1: Fraction(-64, 169), 2: Fraction(3, 169), 3: 0}
    js = tab.to_json()
    assert js["rows"][2]["deviation"] == {"num": 61, "den": 169, "value": 61 / 169}


def test_rank_split_reassembles():
    T = get_table(get_atlas("GL", 3, 3))
    g = auto_regular_class(T.atlas)
    for ell in range(3, 6):
        parts = rank_split_sums(T, ell, g)
        count = frobenius_count(T, ell, g)
        A = T.atlas
        lhs = Fraction(count * A.order, int(A.sizes[A.transvection_class_id]) ** ell)
        assert sum(parts.values()) + 1 == lhs


def test_invalid_class():
    T = get_table(get_atlas("SL", 3, 2))
    with pytest.raises(InvalidClass):
        sts_deviation_table(T, T.atlas.transvection_class_id)
    assert auto_regular_class(T.atlas) in boundary_regular_classes(T.atlas)


@pytest.mark.parametrize("key", [("SL", 3, 2), ("SL", 3, 3), ("SL", 4, 2)])
def test_rank_one_sum(key):
    rep = rank_one_sum_check(get_table(get_atlas(*key)))
    assert rep.omega_decomposition_ok and rep.identity_holds
    assert rep.free_rows
    # on classes without eigenvalue 1 the rank-one characters sum to q^0 - 2 = -1
    assert all(r.total == -1 for r in rep.free_rows)
    assert not rep.stated_holds


def test_rank_one_sum_needs_sl():
    with pytest.raises(ValueError):
        rank_one_sum_check(get_table(get_atlas("GL", 3, 2)))
