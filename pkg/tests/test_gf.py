import itertools

import numpy as np
import pytest

from rankscope.errors import UnsupportedField
from rankscope.gf import (
    SUPPORTED_Q, MatFq, PolyFq, build_field, char_poly, determinant, f_basis_over_prime, inverse,
    matmul, nullspace, pack, pack_many, row_reduce, transvection, unpack, unpack_many,
)


@pytest.mark.parametrize("q", SUPPORTED_Q)
def test_field_axioms(q):
    F = build_field(q)
    e = np.arange(q)
    assert np.array_equal(F.add[0], e) and np.array_equal(F.mul[1], e)
    assert np.all(F.add[e, F.neg] == 0)
    assert np.all(F.mul[e[1:], F.inv[1:]] == 1)
    # associativity and distributivity over every triple
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    assert np.array_equal(F.mul[F.mul[a, b], c], F.mul[a, F.mul[b, c]])
    assert np.array_equal(F.mul[a, F.add[b, c]], F.add[F.mul[a, b], F.mul[a, c]])
    assert np.array_equal(F.sub[a, b], F.add[a, F.neg[b]])


@pytest.mark.parametrize("q", SUPPORTED_Q)
def test_generator_and_log(q):
    F = build_field(q)
    powers = {F.power(F.generator, k) for k in range(q - 1)}
    assert powers == set(range(1, q))
    for x in range(1, q):
        assert F.power(F.generator, int(F.log[x])) == x


@pytest.mark.parametrize("q", SUPPORTED_Q)
def test_trace_and_additive_character(q):
    F = build_field(q)
    # trace is additive and hits F_p surjectively
    for x, y in itertools.product(range(q), repeat=2):
        assert F.trace[F.add[x, y]] == (F.trace[x] + F.trace[y]) % F.p
    assert set(F.trace.tolist()) == set(range(F.p))
    assert abs(F.psi.sum()) < 1e-12
    assert abs(F.psi[0] - 1) < 1e-15
    for a in range(1, q):
        assert abs(F.psi_scaled(a).sum()) < 1e-12
    if q == 2:
        assert np.allclose(F.psi, [1, -1])


def test_unsupported_field():
    for q in (1, 6, 10, 11):
        with pytest.raises(UnsupportedField):
            build_field(q)


def test_f_basis_spans():
    for q in (4, 8, 9):
        F = build_field(q)
        basis = f_basis_over_prime(F)
        assert len(basis) == F.degree
        span = {0}
        for b in basis:
            span = {F.add[s, F.mul[c, b]] for s in span for c in range(F.p)}
        assert span == set(range(q))


def test_pack_roundtrip():
    rng = np.random.default_rng(1)
    for q, (m, n) in [(2, (3, 3)), (3, (2, 4)), (9, (2, 2))]:
        mats = rng.integers(0, q, size=(50, m, n))
        codes = pack_many(mats, q)
        assert np.array_equal(unpack_many(codes, m, n, q), mats)
        for M, c in zip(mats[:5], codes[:5]):
            assert pack(M, q) == c and np.array_equal(unpack(int(c), m, n, q), M)
    # digit at position i*n + j is entry (i, j)
    assert np.array_equal(unpack(3 ** 5, 2, 3, 3), [[0, 0, 0], [0, 0, 1]])


def _leibniz(F, a):
    n = a.shape[0]
    tot = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = 1
        for i in range(n):
            term = F.mul[term, a[i, perm[i]]]
        tot = F.add[tot, term if sign > 0 else F.neg[term]]
    return int(tot)


@pytest.mark.parametrize("q", [2, 3, 4, 5, 9])
def test_linear_algebra(q):
    F = build_field(q)
    rng = np.random.default_rng(q)
    for _ in range(40):
        a = rng.integers(0, q, size=(3, 3))
        d = determinant(F, a)
        assert d == _leibniz(F, a)
        rref, piv = row_reduce(F, a)
        ns = nullspace(F, a)
        assert len(piv) + ns.shape[0] == 3
        for v in ns:
            assert not matmul(F, a, v.reshape(3, 1)).any()
        if d:
            assert np.array_equal(matmul(F, a, inverse(F, a)), np.eye(3, dtype=np.int64))
        else:
            assert len(piv) < 3


def test_gl_count_by_determinant():
    for q in (2, 3):
        F = build_field(q)
        mats = unpack_many(np.arange(q ** 4), 2, 2, q)
        inv = sum(determinant(F, m) != 0 for m in mats)
        assert inv == (q**2 - 1) * (q**2 - q)


def test_char_poly_cayley_hamilton():
    rng = np.random.default_rng(7)
    for q in (2, 3, 4, 5):
        F = build_field(q)
        for _ in range(10):
            a = rng.integers(0, q, size=(3, 3))
            cp = char_poly(F, a)
            assert cp.degree == 3 and cp.coeffs[-1] == 1
            acc = np.zeros((3, 3), dtype=np.int64)
            pw = np.eye(3, dtype=np.int64)
            for c in cp.coeffs:
                acc = F.add[acc, F.mul[c, pw]]
                pw = matmul(F, pw, a)
            assert not acc.any()


def test_poly_gcd_and_squarefree():
    # (x+1)^2 over F_3 is not squarefree; x^2+1 is irreducible over F_3
    p = PolyFq.make(3, [1, 2, 1])
    assert not p.is_squarefree()
    assert PolyFq.make(3, [1, 0, 1]).is_squarefree()
    g = PolyFq.make(3, [1, 2, 1]).gcd(PolyFq.make(3, [1, 1]))
    assert g.degree == 1
    qt, r = PolyFq.make(3, [1, 2, 1]).divmod(PolyFq.make(3, [1, 1]))
    assert r.degree <= 0 and r(0) == 0 and qt.degree == 1


def test_matfq_basics():
    T = transvection(3, 2)
    I = MatFq.identity(3, 2)
    assert (T - I).rank() == 1 and (T - I).kernel_dim() == 2
    assert T.det() == 1 and (T @ T) == I  # order 2 in characteristic 2
    c = MatFq.from_code(T.code, 3, 3, 2)
    assert c == T
    # companion matrix of x^3 + x + 1 over F_2: regular semisimple, no eigenvalue 1
    comp = MatFq(2, np.array([[0, 0, 1], [1, 0, 1], [0, 1, 0]]))
    assert comp.is_regular_semisimple() and comp.fixes_no_vector()
    assert not T.is_regular_semisimple()
