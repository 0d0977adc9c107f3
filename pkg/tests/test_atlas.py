import numpy as np
import pytest

from rankscope.atlas import (
    boundary_regular_classes, build_group, get_atlas, gl_order, group_order, parse_group,
)
from rankscope.errors import BudgetExceeded, UnsupportedField
from rankscope.gf import MatFq, build_field, inverse, matmul, pack, unpack

# class numbers: GL_2 q^2-1, GL_3 q^3-q, SL_2 q+1 (q even) / q+4 (q odd),
# SL_3 q^2+q when 3 does not divide q-1 and q^2+q+8 when it does
KNOWN_K = {
    ("GL", 2, 2): 3, ("GL", 2, 3): 8, ("GL", 2, 4): 15, ("GL", 2, 5): 24, ("GL", 2, 9): 80,
    ("SL", 2, 2): 3, ("SL", 2, 3): 7, ("SL", 2, 4): 5, ("SL", 2, 5): 9, ("SL", 2, 7): 11,
    ("GL", 3, 2): 6, ("GL", 3, 3): 24, ("SL", 3, 2): 6, ("SL", 3, 3): 12, ("SL", 3, 4): 28,
    ("GL", 4, 2): 14,
}


@pytest.mark.parametrize("key", sorted(KNOWN_K))
def test_class_numbers(key):
    A = get_atlas(*key)
    assert A.K == KNOWN_K[key]
    assert A.order == group_order(*key) == int(A.sizes.sum()) == A.elements.shape[0]


def test_gl_order():
    assert gl_order(3, 2) == 168
    assert gl_order(4, 3) == 24261120
    assert group_order("SL", 3, 3) == 5616


def test_parse_group():
    assert parse_group("GL(4,3)") == ("GL", 4, 3)
    assert parse_group(" sl( 3 , 2 ) ") == ("SL", 3, 2)
    for bad in ("GL4,3", "PGL(2,3)", "GL(2)", ""):
        with pytest.raises(ValueError):
            parse_group(bad)


def test_budgets_and_fields():
    with pytest.raises(BudgetExceeded):
        build_group("GL", 6, 3)
    with pytest.raises(UnsupportedField):
        build_group("GL", 2, 6)


@pytest.mark.parametrize("key", [("GL", 2, 3), ("SL", 3, 2), ("GL", 3, 3), ("SL", 2, 9)])
def test_classes_are_conjugation_orbits(key):
    A = get_atlas(*key)
    F = build_field(A.q)
    rng = np.random.default_rng(0)
    for c in range(A.K):
        x = A.rep_matrix(c)
        for code in A.elements[rng.integers(A.order, size=5)]:
            h = unpack(int(code), A.n, A.n, A.q)
            y = matmul(F, matmul(F, h, x), inverse(F, h))
            assert A.class_of(y) == c
    # class sizes agree with member lists and members are pairwise disjoint
    seen = np.concatenate([A.members(c) for c in range(A.K)])
    assert np.unique(seen).shape[0] == A.order


def test_class_order_and_representatives():
    A = get_atlas("GL", 3, 3)
    keys = [(int(A.orders[c]), int(A.sizes[c]), int(A.reps[c])) for c in range(A.K)]
    assert keys == sorted(keys)
    assert A.reps[0] == pack(np.eye(3, dtype=np.int64), 3)
    for c in range(A.K):
        assert A.reps[c] == A.members(c).min()


def test_inverse_and_power_maps():
    A = get_atlas("GL", 3, 3)
    F = A.field
    for c in range(A.K):
        x = A.rep_matrix(c)
        assert A.class_of(inverse(F, x)) == A.inverse_class[c]
        y = np.eye(3, dtype=np.int64)
        for k in range(int(A.orders[c]) + 1):
            assert A.class_of(y) == A.power(c, k)
            y = matmul(F, y, x)
        assert A.power(c, int(A.orders[c])) == 0


def test_transvection_class_sizes():
    # (q^n - 1)(q^{n-1} - 1)/(q - 1) transvections
    assert int(get_atlas("SL", 3, 2).sizes[get_atlas("SL", 3, 2).transvection_class_id]) == 21
    assert int(get_atlas("SL", 3, 3).sizes[get_atlas("SL", 3, 3).transvection_class_id]) == 104
    A = get_atlas("GL", 4, 2)
    assert int(A.sizes[A.transvection_class_id]) == 15 * 7
    T = MatFq.identity(4, 2).entries.copy()
    T[0, 1] = 1
    assert A.class_of(T) == A.transvection_class_id


def test_flags():
    A = get_atlas("SL", 3, 2)
    # elements of order 7 are the regular semisimple classes without eigenvalue 1
    assert sorted(int(A.orders[c]) for c in boundary_regular_classes(A)) == [7, 7]
    assert A.kernel_dims[0] == 3
    assert A.kernel_dims[A.transvection_class_id] == 2
    flags = A.flags
    assert flags[0].regular_semisimple is False and flags[0].fixes_no_vector is False


def test_sl_is_gl_for_q2():
    a, b = get_atlas("GL", 3, 2), get_atlas("SL", 3, 2)
    assert np.array_equal(a.elements, b.elements)
    assert np.array_equal(a.sizes, b.sizes)
