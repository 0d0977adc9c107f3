"""Exact arithmetic in Q(zeta_N) and prime-field helpers for modular lifting."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    return all(n % f for f in range(17, isqrt(n) + 1, 2))


def dixon_prime(exponent: int, order: int) -> int:
    """Smallest prime p = 1 (mod exponent) with p > 2*sqrt(order)."""
    bound = 2 * isqrt(order) + 1
    p = exponent + 1
    if p <= bound:
        p += ((bound - p) // exponent + 1) * exponent
    while not is_prime(p):
        p += exponent
    return p


def _factor(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root(p: int) -> int:
    fs = _factor(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in fs):
            return g
    return 1


# ----------------------------------------------------------------------------
# cyclotomic fields

@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_N, low to high."""
    num = [-1] + [0] * (N - 1) + [1]  # x^N - 1
    for d in range(1, N):
        if N % d == 0:
            num = _exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = a[k + len(b) - 1] // b[-1]
        out[k] = c
        for i, bc in enumerate(b):
            a[k + i] -= c * bc
    assert not any(a), "inexact cyclotomic division"
    return out


class CycField:
    """Q(zeta_N) with elements stored as length-phi(N) tuples of Fractions."""

    _cache: dict = {}

    def __new__(cls, N: int):
        if N not in cls._cache:
            obj = super().__new__(cls)
            obj._setup(N)
            cls._cache[N] = obj
        return cls._cache[N]

    def _setup(self, N: int):
        self.N = N
        phi = list(cyclotomic_poly(N))
        self.phi = len(phi) - 1
        # x^j mod Phi_N for j < N
        red = []
        cur = [0] * self.phi
        cur[0] = 1
        for _ in range(N):
            red.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                cur = [c - top * pc for c, pc in zip(cur, phi[:-1])]
        self.red = red

    def zero(self):
        return (Fraction(0),) * self.phi

    def rational(self, r) -> tuple:
        return (Fraction(r),) + (Fraction(0),) * (self.phi - 1)

    def root_power(self, j: int) -> tuple:
        return tuple(Fraction(c) for c in self.red[j % self.N])

    def from_multiplicities(self, mult, order: int) -> tuple:
        """sum_k mult[k] * zeta_order^k."""
        step = self.N // order
        acc = [0] * self.phi
        for k, m in enumerate(mult):
            if m:
                for i, c in enumerate(self.red[(k * step) % self.N]):
                    if c:
                        acc[i] += m * c
        return tuple(Fraction(a) for a in acc)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def scale(self, a, r):
        return tuple(x * r for x in a)

    def mul(self, a, b):
        prod = [Fraction(0)] * (2 * self.phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = list(prod[: self.phi])
        for j in range(self.phi, len(prod)):
            c = prod[j]
            if c:
                for i, r in enumerate(self.red[j % self.N]):
                    if r:
                        out[i] += c * r
        return tuple(out)

    def pow(self, a, e: int):
        r = self.rational(1)
        base = a
        while e:
            if e & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            e >>= 1
        return r

    def as_rational(self, a):
        """The Fraction value of ``a`` if it lies in Q, else None."""
        if any(a[1:]):
            return None
        return a[0]

    def to_complex(self, a) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self.N)
        return sum(float(c) * z**i for i, c in enumerate(a))
