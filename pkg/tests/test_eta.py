import numpy as np
import pytest

from rankscope.atlas import get_atlas, gl_order
from rankscope.chartable import get_table, induced_character, inner_product
from rankscope.errors import ConsistencyFailure, NotInDomain
from rankscope.eta import (
    corank_fact_check, dominance, eta_of, eta_report, flag_permutation_character, flag_space,
    isotypic_completeness, joint_character, multiplicity_space_character, parabolic_codes,
    parse_partition, partitions, split_series_character, sps_constituent, subspaces,
)
from rankscope.matrix_ft import grassmannian_cardinality


def test_partitions():
    assert partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert len(partitions(7)) == 15
    assert parse_partition("[2,1,1]") == (2, 1, 1)
    for bad in ("2,1", "[1,2]", "[0,3]", "[]"):
        with pytest.raises(ValueError):
            parse_partition(bad)


def test_dominance():
    for D in partitions(5):
        assert dominance(D, D)
        assert dominance((1,) * 5, D) and dominance(D, (5,))
    assert dominance((2, 2), (3, 1)) and not dominance((3, 1), (2, 2))
    # (3,1,1,1) and (2,2,2) are incomparable
    assert not dominance((3, 1, 1, 1), (2, 2, 2)) and not dominance((2, 2, 2), (3, 1, 1, 1))


def test_joint_character_examples():
    G, K = get_atlas("GL", 3, 2), get_atlas("GL", 1, 2)
    J = joint_character(G, K)
    assert J[0, 0] == 2 ** 3
    assert J[G.transvection_class_id, 0] == 2 ** 2
    G2 = get_atlas("GL", 2, 2)
    J2 = joint_character(G2, K)
    c3 = next(c for c in range(G2.K) if G2.orders[c] == 3)
    assert J2[c3, 0] == 1


@pytest.mark.parametrize("n,q", [(3, 2), (2, 3), (3, 3)])
def test_multiplicity_spaces_k1(n, q):
    T, Tk = get_table(get_atlas("GL", n, q)), get_table(get_atlas("GL", 1, q))
    for tau in range(Tk.R):
        M = multiplicity_space_character(T, Tk, tau)
        if tau == 0:
            assert M.decomposition[0] == 2
            assert M.dim == (q**n - 1) // (q - 1) + 1
        else:
            assert M.dim == (q**n - 1) // (q - 1)
    assert isotypic_completeness(T, Tk) < 1e-9


def test_eta_injective_gl4_2():
    T = get_table(get_atlas("GL", 4, 2))
    for k in (1, 2):
        rep = eta_report(T, k)
        assert rep.injective and rep.completeness_error < 1e-9
        assert len(rep.eta) == get_table(get_atlas("GL", k, 2)).R
    with pytest.raises(NotInDomain):
        eta_of(T, get_table(get_atlas("GL", 3, 2)), 0, "u_rank")


def test_eta_strict_mode():
    T = get_table(get_atlas("GL", 3, 3))
    Tk = get_table(get_atlas("GL", 1, 3))
    u_mode = [eta_of(T, Tk, t, "u_rank") for t in range(Tk.R)]
    s_mode = [eta_of(T, Tk, t, "strict") for t in range(Tk.R)]
    assert len(set(s_mode)) == Tk.R and len(set(u_mode)) == Tk.R


def test_subspaces_counts():
    for n, q in [(3, 2), (4, 2), (3, 3)]:
        for d in range(n + 1):
            assert subspaces(n, d, q).shape[0] == grassmannian_cardinality(n, d, q)


def test_flag_space_counts():
    from rankscope.eta import FLAG_CAP

    for D in partitions(4):
        fs = flag_space(4, 2, D)
        P = parabolic_codes(get_atlas("GL", 4, 2), D).shape[0]
        assert fs.count == gl_order(4, 2) // P
    assert FLAG_CAP == 1_000_000


def test_flag_character_examples():
    A = get_atlas("GL", 2, 3)
    assert flag_permutation_character(A, (1, 1)).values[0] == 4
    assert np.allclose(flag_permutation_character(A, (2,)).values, 1)
    B = get_atlas("GL", 3, 2)
    for D in partitions(3):
        f = flag_permutation_character(B, D)
        g = induced_character(B, parabolic_codes(B, D))
        assert np.allclose(f.values, g.values)


def test_sps_constituents():
    T = get_table(get_atlas("GL", 3, 2))
    assert sps_constituent(T, (3,)) == 0
    assert T.dims[sps_constituent(T, (2, 1))] == 6
    st = sps_constituent(T, (1, 1, 1))
    assert T.dims[st] == 8 == max(T.dims)
    T4 = get_table(get_atlas("GL", 4, 2))
    dims = {D: int(T4.dims[sps_constituent(T4, D)]) for D in partitions(4)}
    assert dims == {(4,): 1, (3, 1): 14, (2, 2): 20, (2, 1, 1): 56, (1, 1, 1, 1): 64}


def test_split_series():
    A = get_atlas("GL", 2, 3)
    T = get_table(A)
    f = split_series_character(A, (1, 1), [(1,), (1,)], [0, 1])
    assert f.values[0] == 4
    assert any(np.allclose(f.values, T.values[i]) for i in range(T.R))
    single = split_series_character(A, (2,), [(1, 1)], [0])
    assert np.allclose(single.values, T.values[sps_constituent(T, (1, 1))])
    # equal characters are not a split series datum
    with pytest.raises(ValueError):
        split_series_character(A, (1, 1), [(1,), (1,)], [1, 1])
    with pytest.raises(ValueError):
        split_series_character(A, (1, 1), [(1,)], [0, 1])


def test_corank_fact():
    for key, expected in [(("GL", 3, 2), [0, 1, 2]), (("GL", 3, 3), [0, 1, 2]), (("GL", 4, 2), [0, 1, 2, 2, 3])]:
        rows = corank_fact_check(get_table(get_atlas(*key)))
        assert [r.tensor_rank for r in rows] == expected
        assert all(r.holds for r in rows)


def test_decompose_rejects_garbage():
    from rankscope.chartable import ClassFunction
    from rankscope.errors import NumericalGuard
    from rankscope.eta import decompose

    T = get_table(get_atlas("GL", 2, 2))
    with pytest.raises((NumericalGuard, ConsistencyFailure)):
        decompose(T, ClassFunction(T.atlas, np.array([0.5, 0, 0])))
    assert inner_product(T.character(0), T.character(0)).value == 1
