"""Arithmetic in F_q (q <= 9) and dense matrices over it.

Field elements are integer codes ``0..q-1``.  For q = p^d the code of
``c_0 + c_1 x + ... + c_{d-1} x^{d-1}`` is ``sum c_i p^i``, reduced modulo a
fixed irreducible polynomial.  Matrices are packed row-major in base q, entry
``(i, j)`` being the digit of weight ``q**(i*ncols + j)``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NotSquare, UnsupportedField

SUPPORTED_Q = (2, 3, 4, 5, 7, 8, 9)

# low-to-high coefficients of the defining polynomial, monic
_MODULI = {
    4: (2, (1, 1, 1)),  # x^2 + x + 1
    8: (2, (1, 1, 0, 1)),  # x^3 + x + 1
    9: (3, (2, 1, 1)),  # x^2 + x + 2  (x^2 + 1 is reducible mod 3)
}


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FieldTable:
    q: int
    p: int
    degree: int
    modulus: tuple
    add: np.ndarray = field(repr=False)
    sub: np.ndarray = field(repr=False)
    mul: np.ndarray = field(repr=False)
    neg: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)  # inv[0] = 0 (unused)
    trace: np.ndarray = field(repr=False)  # absolute trace, values in 0..p-1
    psi: np.ndarray = field(repr=False)  # complex additive character
    generator: int = 1  # a generator of the multiplicative group
    log: np.ndarray = field(repr=False, default=None)  # discrete log base generator

    def psi_scaled(self, a: int) -> np.ndarray:
        """The additive character x -> psi(a*x); nontrivial for a != 0."""
        return self.psi[self.mul[a]]

    def power(self, x: int, e: int) -> int:
        r = 1
        for _ in range(e % (self.q - 1) if x else e):
            r = int(self.mul[r, x])
        return r if (x or e == 0) else 0


def _poly_mulmod(a, b, p, mod):
    d = len(mod) - 1
    prod = [0] * (2 * d - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for i in range(d + 1):
                prod[k - d + i] = (prod[k - d + i] - c * mod[i]) % p
    return prod[:d]


@lru_cache(maxsize=None)
def build_field(q: int) -> FieldTable:
    if q not in SUPPORTED_Q:
        raise UnsupportedField(f"q={q} not in {SUPPORTED_Q}")
    if q in _MODULI:
        p, mod = _MODULI[q]
    else:
        p, mod = q, (0, 1)
    d = len(mod) - 1

    def digits(x):
        return [(x // p**i) % p for i in range(d)]

    def undigits(ds):
        return sum(c * p**i for i, c in enumerate(ds))

    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    for x in range(q):
        dx = digits(x)
        for y in range(q):
            dy = digits(y)
            add[x, y] = undigits([(a + b) % p for a, b in zip(dx, dy)])
            mul[x, y] = undigits(_poly_mulmod(dx, dy, p, mod)) if d > 1 else (x * y) % p
    neg = np.array([int(np.flatnonzero(add[x] == 0)[0]) for x in range(q)], dtype=np.int64)
    sub = np.array([[add[x, neg[y]] for y in range(q)] for x in range(q)], dtype=np.int64)
    inv = np.zeros(q, dtype=np.int64)
    for x in range(1, q):
        inv[x] = int(np.flatnonzero(mul[x] == 1)[0])

    # absolute trace x + x^p + ... + x^{p^{d-1}}
    trace = np.zeros(q, dtype=np.int64)
    for x in range(q):
        t, y = 0, x
        for _ in range(d):
            t = add[t, y]
            z = 1
            for _ in range(p):
                z = mul[z, y]
            y = z
        assert t < p, "trace must land in the prime field"
        trace[x] = t
    psi = np.array([cmath.exp(2j * cmath.pi * int(trace[x]) / p) for x in range(q)])

    gen = None
    for g in range(2, q) if q > 2 else [1]:
        y, order = g, 1
        while y != 1:
            y = mul[y, g]
            order += 1
        if order == q - 1:
            gen = g
            break
    if gen is None:
        gen = 1
    log = np.full(q, -1, dtype=np.int64)
    y = 1
    for e in range(q - 1):
        log[y] = e
        y = mul[y, gen]

    return FieldTable(
        q=q, p=p, degree=d, modulus=tuple(mod),
        add=_readonly(add), sub=_readonly(sub), mul=_readonly(mul), neg=_readonly(neg),
        inv=_readonly(inv), trace=_readonly(trace), psi=_readonly(psi),
        generator=int(gen), log=_readonly(log),
    )


def f_basis_over_prime(F: FieldTable) -> list[int]:
    """Codes of 1, x, ..., x^{d-1}: an F_p-basis of F_q."""
    return [F.p**i for i in range(F.degree)]


# ----------------------------------------------------------------------------
# packing

def pack(entries: np.ndarray, q: int) -> int:
    flat = np.asarray(entries, dtype=np.int64).ravel()
    code = 0
    for d in flat[::-1]:
        code = code * q + int(d)
    return code


def unpack(code: int, m: int, n: int, q: int) -> np.ndarray:
    out = np.empty(m * n, dtype=np.int64)
    for i in range(m * n):
        code, out[i] = divmod(code, q)
    return out.reshape(m, n)


def unpack_many(codes: np.ndarray, m: int, n: int, q: int) -> np.ndarray:
    """Vectorised unpack: shape (N,) -> (N, m, n)."""
    codes = np.asarray(codes, dtype=np.int64).copy()
    out = np.empty((codes.shape[0], m * n), dtype=np.int64)
    for i in range(m * n):
        out[:, i] = codes % q
        codes //= q
    return out.reshape(-1, m, n)


def pack_many(mats: np.ndarray, q: int) -> np.ndarray:
    N = mats.shape[0]
    flat = mats.reshape(N, -1)
    code = np.zeros(N, dtype=np.int64)
    for i in range(flat.shape[1] - 1, -1, -1):
        code = code * q + flat[:, i]
    return code


# ----------------------------------------------------------------------------
# dense linear algebra on small matrices

def row_reduce(F: FieldTable, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = np.array(a, dtype=np.int64, copy=True)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = F.mul[F.inv[a[r, c]], a[r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] = F.sub[a[i], F.mul[a[i, c], a[r]]]
        pivots.append(c)
        r += 1
    return a, pivots


def matmul(F: FieldTable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, k = a.shape
    k2, n = b.shape
    assert k == k2
    out = np.zeros((m, n), dtype=np.int64)
    for t in range(k):
        out = F.add[out, F.mul[a[:, t][:, None], b[t][None, :]]]
    return out


def determinant(F: FieldTable, a: np.ndarray) -> int:
    a = np.array(a, dtype=np.int64, copy=True)
    n = a.shape[0]
    if a.shape[1] != n:
        raise NotSquare(a.shape)
    det = 1
    for c in range(n):
        nz = np.flatnonzero(a[c:, c])
        if nz.size == 0:
            return 0
        piv = c + int(nz[0])
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
            det = int(F.neg[det])
        det = int(F.mul[det, a[c, c]])
        ic = F.inv[a[c, c]]
        for i in range(c + 1, n):
            if a[i, c]:
                a[i] = F.sub[a[i], F.mul[F.mul[a[i, c], ic], a[c]]]
    return det


def inverse(F: FieldTable, a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if a.shape[1] != n:
        raise NotSquare(a.shape)
    aug = np.concatenate([np.asarray(a, dtype=np.int64), np.eye(n, dtype=np.int64)], axis=1)
    red, piv = row_reduce(F, aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return red[:, n:]


def nullspace(F: FieldTable, a: np.ndarray) -> np.ndarray:
    """Basis (as rows) of {x : a x = 0}."""
    a = np.asarray(a, dtype=np.int64)
    red, piv = row_reduce(F, a)
    n = a.shape[1]
    free = [c for c in range(n) if c not in piv]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        for r, pc in enumerate(piv):
            basis[t, pc] = F.neg[red[r, f]]
    return basis


# ----------------------------------------------------------------------------
# polynomials

@dataclass(frozen=True)
class PolyFq:
    q: int
    coeffs: tuple  # low -> high, trailing zeros stripped

    @classmethod
    def make(cls, q: int, coeffs) -> "PolyFq":
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        return cls(q, tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    @property
    def field(self) -> FieldTable:
        return build_field(self.q)

    def __call__(self, x: int) -> int:
        F = self.field
        r = 0
        for c in reversed(self.coeffs):
            r = int(F.add[F.mul[r, x], c])
        return r

    def derivative(self) -> "PolyFq":
        F = self.field
        out = []
        for i, c in enumerate(self.coeffs[1:], start=1):
            s = 0
            for _ in range(i % F.p):
                s = int(F.add[s, c])
            out.append(s)
        return PolyFq.make(self.q, out)

    def divmod(self, other: "PolyFq") -> tuple["PolyFq", "PolyFq"]:
        F = self.field
        if other.degree < 0:
            raise ZeroDivisionError
        r = list(self.coeffs)
        quot = [0] * max(0, len(r) - len(other.coeffs) + 1)
        lead_inv = int(F.inv[other.coeffs[-1]])
        for k in range(len(r) - len(other.coeffs), -1, -1):
            c = int(F.mul[r[k + other.degree], lead_inv])
            quot[k] = c
            if c:
                for i, oc in enumerate(other.coeffs):
                    r[k + i] = int(F.sub[r[k + i], F.mul[c, oc]])
        return PolyFq.make(self.q, quot), PolyFq.make(self.q, r)

    def gcd(self, other: "PolyFq") -> "PolyFq":
        a, b = self, other
        while b.degree >= 0:
            a, b = b, a.divmod(b)[1]
        if a.degree < 0:
            return a
        F = self.field
        li = int(F.inv[a.coeffs[-1]])
        return PolyFq.make(self.q, [F.mul[li, c] for c in a.coeffs])

    def is_squarefree(self) -> bool:
        return self.gcd(self.derivative()).degree == 0


def char_poly(F: FieldTable, a: np.ndarray) -> PolyFq:
    """det(xI - a) via the division-free Berkowitz recursion."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise NotSquare(a.shape)

    def vmat(M, v):  # M @ v
        return [_dot(F, row, v) for row in M]

    # Berkowitz: build Toeplitz products; coefficients of det(xI - A), high -> low
    vec = [1]
    for k in range(n):
        # leading principal (k+1)x(k+1) block
        akk = int(a[k, k])
        R = [int(x) for x in a[k, :k]]  # row
        C = [int(a[i, k]) for i in range(k)]  # column
        Akk = a[:k, :k]
        # column of the Toeplitz matrix: 1, -a_kk, -R C, -R A C, -R A^2 C, ...
        col = [1, int(F.neg[akk])]
        w = C
        for _ in range(k):
            col.append(int(F.neg[_dot(F, R, w)]))
            w = vmat(Akk, w)
        # multiply Toeplitz (k+2 x k+1) with vec (length k+1)
        new = []
        for i in range(k + 2):
            s = 0
            for j in range(k + 1):
                if 0 <= i - j < len(col) and j < len(vec):
                    s = int(F.add[s, F.mul[col[i - j], vec[j]]])
            new.append(s)
        vec = new
    return PolyFq.make(F.q, list(reversed(vec)))


def _dot(F: FieldTable, u, v) -> int:
    s = 0
    for x, y in zip(u, v):
        s = int(F.add[s, F.mul[x, y]])
    return s


# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MatFq:
    """Immutable dense matrix over F_q."""

    q: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.int64, copy=True)
        if e.ndim != 2:
            raise ValueError("matrix must be 2-d")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @classmethod
    def from_code(cls, code: int, m: int, n: int, q: int) -> "MatFq":
        return cls(q, unpack(code, m, n, q))

    @classmethod
    def identity(cls, n: int, q: int) -> "MatFq":
        return cls(q, np.eye(n, dtype=np.int64))

    @property
    def field(self) -> FieldTable:
        return build_field(self.q)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def code(self) -> int:
        return pack(self.entries, self.q)

    def __eq__(self, other):
        return isinstance(other, MatFq) and self.q == other.q and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.q, self.shape, self.code))

    def __matmul__(self, other: "MatFq") -> "MatFq":
        return MatFq(self.q, matmul(self.field, self.entries, other.entries))

    def __sub__(self, other: "MatFq") -> "MatFq":
        return MatFq(self.q, self.field.sub[self.entries, other.entries])

    def __add__(self, other: "MatFq") -> "MatFq":
        return MatFq(self.q, self.field.add[self.entries, other.entries])

    @property
    def T(self) -> "MatFq":
        return MatFq(self.q, self.entries.T)

    def rank(self) -> int:
        return mat_rank(self)

    def kernel_dim(self) -> int:
        return self.shape[1] - mat_rank(self)

    def det(self) -> int:
        return determinant(self.field, self.entries)

    def inverse(self) -> "MatFq":
        return MatFq(self.q, inverse(self.field, self.entries))

    def char_poly(self) -> PolyFq:
        return char_poly(self.field, self.entries)

    def is_regular_semisimple(self) -> bool:
        return self.char_poly().is_squarefree()

    def fixes_no_vector(self) -> bool:
        return self.char_poly()(1) != 0


def mat_rank(M: MatFq) -> int:
    if M.entries.size == 0:
        return 0
    return len(row_reduce(M.field, M.entries)[1])


def transvection(n: int, q: int) -> MatFq:
    """I + E_{12}."""
    e = np.eye(n, dtype=np.int64)
    e[0, 1] = 1
    return MatFq(q, e)
