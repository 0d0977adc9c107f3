"""Counting and Fourier transforms of fixed-rank matrix sets in M_{m,n}(F_q).

Closed forms are exact integer/Fraction arithmetic; every one has an
exhaustive counterpart built on :func:`kernels.rank_census`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .chartable import GuardedInteger
from .errors import BudgetExceeded, ConsistencyFailure
from .gf import build_field
from .kernels import rank_census

BRUTE_CAP = 1 << 26


def gl_cardinality(k: int, q: int) -> int:
    if k < 0:
        raise ValueError("k must be nonnegative")
    r = q ** (k * (k - 1) // 2)
    for a in range(1, k + 1):
        r *= q**a - 1
    return r


def grassmannian_cardinality(n: int, k: int, q: int) -> int:
    """Number of k-dim subspaces of F_q^n (0 outside 0 <= k <= n)."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for a in range(1, k + 1):
        num *= q ** (n - k + a) - 1
        den *= q**a - 1
    return num // den


def gamma_recursion_holds(n: int, k: int, q: int) -> bool:
    """#Γ_{n-1,k} = (q^{n-k}-1)/(q^n-1) · #Γ_{n,k}."""
    if n < 1 or not 0 <= k <= n:
        return True
    return Fraction(grassmannian_cardinality(n - 1, k, q)) == Fraction(
        q ** (n - k) - 1, q**n - 1) * grassmannian_cardinality(n, k, q)


def count_rank_k(m: int, n: int, k: int, q: int) -> int:
    if not 0 <= k <= min(m, n):
        raise ValueError("rank out of range")
    return grassmannian_cardinality(n, k, q) * grassmannian_cardinality(m, k, q) * gl_cardinality(k, q)


@dataclass(frozen=True)
class OrthoCounts:
    total: int
    a: int  # A v = 0
    b: int  # im A in ker(lambda)
    c: int  # both
    d: int  # lambda(A v) = 0, neither


def _exact(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise ConsistencyFailure(f"{what} is not an integer: {x}")
    return int(x)


def count_rank_k_orthogonal(m: int, n: int, k: int, q: int) -> OrthoCounts:
    """Rank-k m×n matrices A with lambda(A v) = 0 (v = e_1, lambda = e_1^*)."""
    if not 0 <= k <= min(m, n):
        raise ValueError("rank out of range")
    G = grassmannian_cardinality
    gk = gl_cardinality(k, q)
    for nn in (n, m):
        if not gamma_recursion_holds(nn, k, q):
            raise ConsistencyFailure("Grassmannian recursion failed")
    total = _exact(Fraction(((q ** (m - 1) - 1) * (q**n - 1) + (q ** (n - k) - 1) * (q - 1) * q ** (m - 1))
                            * G(n, k, q) * G(m, k, q) * gk, (q**n - 1) * (q**m - 1)), "orthogonal count")
    a = G(n - 1, k, q) * G(m, k, q) * gk
    b = G(n, k, q) * G(m - 1, k, q) * gk
    c = G(n - 1, k, q) * G(m - 1, k, q) * gk
    d = _exact((G(n, k, q) - G(n - 1, k, q))
               * (Fraction(q ** (m - 1) - 1, q**m - 1) * G(m, k, q) - G(m - 1, k, q)) * gk, "count (d)")
    if total != a + b - c + d:
        raise ConsistencyFailure(f"total {total} != a + b - c + d = {a + b - c + d}")
    return OrthoCounts(total, a, b, c, d)


def ft_rank_one_closed_form(m: int, n: int, k: int, q: int) -> int:
    """FT of the rank-k indicator on M_{m,n} at a rank-one matrix (k <= m <= n)."""
    if not 0 <= k <= m <= n:
        raise ValueError("need 0 <= k <= m <= n")
    v = _exact(Fraction((q ** (n + m - k) - q**n - q**m + 1) * count_rank_k(m, n, k, q),
                        (q**n - 1) * (q**m - 1)), "rank-one Fourier value")
    if k >= 1 and ((k < m and v <= 0) or (k == m and v >= 0)):
        raise ConsistencyFailure(f"sign law fails at (m,n,k,q)=({m},{n},{k},{q}): {v}")
    return v


# ----------------------------------------------------------------------------
# exhaustive side

@lru_cache(maxsize=64)
def _census(m: int, n: int, q: int, bkey: tuple):
    if q ** (m * n) > BRUTE_CAP:
        raise BudgetExceeded("brute_force_codes", q ** (m * n), BRUTE_CAP)
    b = np.array(bkey, dtype=np.int64).reshape(m, n)
    return rank_census(m, n, q, b)


def census(m: int, n: int, q: int, B: np.ndarray | None = None):
    B = np.zeros((m, n), dtype=np.int64) if B is None else np.asarray(B, dtype=np.int64)
    return _census(m, n, q, tuple(B.ravel().tolist()))


def e11(m: int, n: int) -> np.ndarray:
    b = np.zeros((m, n), dtype=np.int64)
    b[0, 0] = 1
    return b


def exhaustive_counts(m: int, n: int, k: int, q: int) -> OrthoCounts:
    """The four proof categories, counted by exhaustive classification."""
    _, cats = census(m, n, q, e11(m, n))
    z, col0, row0, both = (int(x) for x in cats[k])
    return OrthoCounts(total=z, a=col0, b=row0, c=both, d=z - col0 - row0 + both)


def ft_brute_force(m: int, n: int, k: int, q: int, B: np.ndarray | None = None,
                   scale: int = 1) -> int:
    """sum over rank-k A of psi(scale · tr(B^t A)), cross-checked against the orthogonal count."""
    F = build_field(q)
    hist, _ = census(m, n, q, B)
    psi = F.psi[F.mul[scale]]
    v = GuardedInteger(complex(np.dot(hist[k], psi))).value
    total = int(hist[k].sum())
    ortho = int(hist[k, 0])
    alt = Fraction(-total, q - 1) + Fraction(q * ortho, q - 1)
    if B is not None and np.any(B) and alt != v:
        raise ConsistencyFailure(f"brute FT {v} disagrees with count formula {alt}")
    return v


def plancherel_check(m: int, n: int, k: int, q: int) -> tuple[int, int]:
    """(sum_B |FT(1_{O_k})(B)|^2, |M| · #O_k) by full enumeration."""
    from .gf import unpack_many
    from .kernels import _np_batched_rank

    F = build_field(q)
    size = q ** (m * n)
    if size > 4096:
        raise BudgetExceeded("plancherel_codes", size, 4096)
    mats = unpack_many(np.arange(size), m, n, q)
    ranks = _np_batched_rank(mats, F)
    flat = mats.reshape(size, -1)
    O = flat[ranks == k]
    t = np.zeros((size, O.shape[0]), dtype=np.int64)
    for j in range(m * n):
        t = F.add[t, F.mul[flat[:, j][:, None], O[:, j][None, :]]]
    ft = F.psi[t].sum(axis=1)
    lhs = GuardedInteger(complex(np.sum(np.abs(ft) ** 2))).value
    return lhs, size * int(O.shape[0])


@dataclass
class FTReport:
    m: int
    n: int
    k: int
    q: int
    count: int
    count_orthogonal: int
    a: int
    b: int
    c: int
    d: int
    closed_form: int
    brute_force: int | None
    sign: int

    def to_json(self) -> dict:
        return asdict(self)


def ft_report(m: int, n: int, k: int, q: int, brute: bool = False) -> FTReport:
    oc = count_rank_k_orthogonal(m, n, k, q)
    cf = ft_rank_one_closed_form(m, n, k, q)
    bf = None
    if brute:
        bf = ft_brute_force(m, n, k, q, e11(m, n))
        if bf != cf:
            raise ConsistencyFailure(f"closed form {cf} != brute force {bf}")
    return FTReport(m, n, k, q, count_rank_k(m, n, k, q), oc.total, oc.a, oc.b, oc.c, oc.d,
                    cf, bf, (cf > 0) - (cf < 0))


@dataclass
class PositivityRow:
    r: int
    orbit_size: int
    value: int
    ratio: float
    window: tuple
    in_window: bool | None


def positivity_report(n: int, q: int, brute: bool = True) -> list[PositivityRow]:
    """FT of the rank-r indicator on U = M_{⌊n/2⌋,⌈n/2⌉} at a rank-one matrix."""
    m, w = n // 2, n - n // 2
    rows = []
    for r in range(m + 1):
        v = ft_rank_one_closed_form(m, w, r, q)
        if brute and q ** (m * w) <= BRUTE_CAP:
            bv = ft_brute_force(m, w, r, q, e11(m, w))
            if bv != v:
                raise ConsistencyFailure(f"closed form {v} != brute force {bv} at r={r}")
        size = count_rank_k(m, w, r, q)
        if r < m:
            if v <= 0:
                raise ConsistencyFailure(f"FT of O_{r} at T is not positive: {v}")
            lo, hi = (1 - 5 / q) / q**r, (1 + 5 / q) / q**r
            rows.append(PositivityRow(r, size, v, v / size, (lo, hi), lo <= v / size <= hi))
        else:
            if v >= 0:
                raise ConsistencyFailure(f"FT of O_{r} at T is not negative: {v}")
            rows.append(PositivityRow(r, size, v, v / size, (None, None), None))
    return rows
