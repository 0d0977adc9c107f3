"""Exact character tables by Dixon–Schneider, and class-function utilities."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .atlas import GroupAtlas
from .cyclotomic import CycField, dixon_prime, primitive_root
from .errors import BudgetExceeded, ConsistencyFailure, NumericalGuard

log = logging.getLogger(__name__)

TOL = 1e-6
MAX_CLASSES = 4096
INDUCTION_CAP = 1_000_000


@dataclass(frozen=True)
class GuardedInteger:
    """A complex accumulator that must finalise to an integer."""

    raw: complex
    tol: float = TOL

    @property
    def value(self) -> int:
        r = round(self.raw.real)
        if abs(self.raw - r) > self.tol:
            raise NumericalGuard(f"{self.raw!r} is not within {self.tol} of an integer")
        return int(r)

    @property
    def residual(self) -> float:
        return abs(self.raw - round(self.raw.real))

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value


@dataclass(eq=False)
class ClassFunction:
    atlas: GroupAtlas
    values: np.ndarray  # complex, one per class
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.atlas.K,):
            raise ValueError(f"class function needs {self.atlas.K} values, got shape {self.values.shape}")

    def __mul__(self, other):
        if isinstance(other, ClassFunction):
            return ClassFunction(self.atlas, self.values * other.values)
        return ClassFunction(self.atlas, self.values * other)

    __rmul__ = __mul__

    def __add__(self, other):
        return ClassFunction(self.atlas, self.values + other.values)

    def __sub__(self, other):
        return ClassFunction(self.atlas, self.values - other.values)

    def conj(self):
        return ClassFunction(self.atlas, self.values.conj())

    def __call__(self, c: int) -> complex:
        return complex(self.values[c])


def inner_product(f: ClassFunction, g: ClassFunction, tol: float = TOL) -> GuardedInteger:
    A = f.atlas
    if g.atlas is not A:
        raise ValueError("class functions live on different atlases")
    s = np.sum(A.sizes * f.values * np.conj(g.values)) / A.order
    return GuardedInteger(complex(s), tol)


def inner_product_raw(f: ClassFunction, g: ClassFunction) -> complex:
    A = f.atlas
    return complex(np.sum(A.sizes * f.values * np.conj(g.values)) / A.order)


# ----------------------------------------------------------------------------
# linear algebra mod p (p < 2^31, so products fit in int64)

def _rref_mod(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    M = np.array(M, dtype=np.int64, copy=True) % p
    rows, cols = M.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = M[r] * pow(int(M[r, c]), -1, p) % p
        f = M[:, c].copy()
        f[r] = 0
        M = (M - np.outer(f, M[r])) % p
        piv.append(c)
        r += 1
    return M, piv


def _matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    if A.shape[1] * (p - 1) ** 2 < 1 << 63:
        return A @ B % p
    return (A.astype(object) @ B.astype(object) % p).astype(np.int64)


def _nullspace_mod(M: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning {x : M x = 0}."""
    R, piv = _rref_mod(M, p)
    n = M.shape[1]
    free = [c for c in range(n) if c not in piv]
    N = np.zeros((n, len(free)), dtype=np.int64)
    for t, f in enumerate(free):
        N[f, t] = 1
        for r, pc in enumerate(piv):
            N[pc, t] = (-R[r, f]) % p
    return N


def _solve_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    d = A.shape[0]
    R, piv = _rref_mod(np.concatenate([A, B], axis=1), p)
    if piv[:d] != list(range(d)):
        raise ConsistencyFailure("singular restriction while splitting eigenspaces")
    return R[:d, d:]


def _charpoly_mod(A: np.ndarray, p: int) -> list[int]:
    """det(xI - A) mod p, low to high, via Hessenberg reduction."""
    H = np.array(A, dtype=np.int64, copy=True) % p
    n = H.shape[0]
    for j in range(n - 2):
        nz = np.flatnonzero(H[j + 1:, j])
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            H[[i, j + 1]] = H[[j + 1, i]]
            H[:, [i, j + 1]] = H[:, [j + 1, i]]
        inv = pow(int(H[j + 1, j]), -1, p)
        for k in range(j + 2, n):
            u = H[k, j] * inv % p
            if u:
                H[k] = (H[k] - u * H[j + 1]) % p
                H[:, j + 1] = (H[:, j + 1] + u * H[:, k]) % p
    polys = [[1]]
    for m in range(n):
        nxt = _pmul([(-int(H[m, m])) % p, 1], polys[m], p)
        prod = 1
        for i in range(m - 1, -1, -1):
            prod = prod * int(H[i + 1, i]) % p
            if prod == 0:
                break
            c = prod * int(H[i, m]) % p
            if c:
                nxt = _padd(nxt, [(-c * x) % p for x in polys[i]], p)
        polys.append(nxt)
    return polys[n]


def _ptrim(a):
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _padd(a, b, p):
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = (out[i] + x) % p
    return _ptrim(out)


def _pmul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pdivmod(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(1, len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv % p
        q[k] = c
        if c:
            for i, y in enumerate(b):
                a[k + i] = (a[k + i] - c * y) % p
    return _ptrim(q), _ptrim(a[: len(b) - 1] or [0])


def _pgcd(a, b, p):
    while not (len(b) == 1 and b[0] == 0):
        a, b = b, _pdivmod(a, b, p)[1]
    inv = pow(a[-1], -1, p)
    return [x * inv % p for x in a]


def _ppowmod(base, e, mod, p):
    r = [1]
    b = _pdivmod(base, mod, p)[1]
    while e:
        if e & 1:
            r = _pdivmod(_pmul(r, b, p), mod, p)[1]
        b = _pdivmod(_pmul(b, b, p), mod, p)[1]
        e >>= 1
    return r


def _roots_mod(f: list[int], p: int) -> list[int]:
    """Distinct roots in F_p of f (p odd), deterministic Cantor–Zassenhaus."""
    xp = _ppowmod([0, 1], p, f, p)
    g = _pgcd(f, _padd(xp, [0, p - 1], p), p)
    out: list[int] = []

    def split(h):
        if len(h) == 1:
            return
        if len(h) == 2:
            out.append((-h[0]) * pow(h[1], -1, p) % p)
            return
        a = 0
        while True:
            t = _ppowmod([a, 1], (p - 1) // 2, h, p)
            d = _pgcd(h, _padd(t, [p - 1], p), p)
            if 1 < len(d) < len(h):
                split(d)
                split(_pdivmod(h, d, p)[0])
                return
            a += 1

    split(g)
    return sorted(out)


# ----------------------------------------------------------------------------

@dataclass(eq=False)
class CharTable:
    atlas: GroupAtlas
    values: np.ndarray  # (R, K) complex
    dims: np.ndarray
    mults: list  # mults[i][c]: multiplicities of zeta_{o_c}^k in chi_i(c)
    prime: int
    root: int  # primitive e-th root mod prime, identified with exp(2 pi i / e)
    residues: np.ndarray = field(repr=False, default=None)  # chi mod prime

    @property
    def R(self) -> int:
        return self.values.shape[0]

    def character(self, i: int) -> ClassFunction:
        return ClassFunction(self.atlas, self.values[i], label=f"chi{i}")

    def cyclotomic_value(self, i: int, c: int, N: int | None = None):
        o = int(self.atlas.orders[c])
        K = CycField(N or o)
        return K, K.from_multiplicities(self.mults[i][c], o)

    def rational_value(self, i: int, c: int) -> Fraction | None:
        K, v = self.cyclotomic_value(i, c)
        return K.as_rational(v)

    def real_value(self, i: int, c: int) -> float:
        """Exact-real value as float; NumericalGuard if it has imaginary part."""
        v = complex(self.values[i, c])
        if abs(v.imag) > TOL:
            raise NumericalGuard(f"chi{i} at class {c} is not real: {v}")
        return v.real

    def orthogonality_residuals(self) -> tuple[float, float]:
        A = self.atlas
        X = self.values
        rows = (X * A.sizes) @ X.conj().T / A.order - np.eye(self.R)
        cols = X.conj().T @ X / A.centralizer_orders[None, :] - np.eye(A.K)
        return float(np.abs(rows).max()), float(np.abs(cols).max())

    def to_json(self) -> dict:
        A = self.atlas
        flags = A.flags
        return {
            "group": A.name,
            "order": A.order,
            "classes": [
                {"id": c, "size": int(A.sizes[c]), "order": int(A.orders[c]),
                 "representative": int(A.reps[c]),
                 "flags": {"regular_semisimple": flags[c].regular_semisimple,
                           "fixes_no_vector": flags[c].fixes_no_vector,
                           "transvection": c == A.transvection_class_id}}
                for c in range(A.K)
            ],
            "irreps": [
                {"id": i, "dim": int(self.dims[i]),
                 "values": [[_clean(v.real), _clean(v.imag)] for v in self.values[i]]}
                for i in range(self.R)
            ],
        }

    def to_csv(self) -> str:
        A = self.atlas
        head = "irrep,dim," + ",".join(f"c{c}" for c in range(A.K))
        lines = [head]
        for i in range(self.R):
            cells = []
            for v in self.values[i]:
                if abs(v.imag) < 1e-12:
                    cells.append(_fmt(v.real))
                else:
                    cells.append(f"{_fmt(v.real)}{'+' if v.imag >= 0 else '-'}{_fmt(abs(v.imag))}i")
            lines.append(f"{i},{int(self.dims[i])}," + ",".join(cells))
        return "\n".join(lines) + "\n"


def _clean(x: float) -> float:
    r = round(x)
    return float(r) if abs(x - r) < 1e-12 else float(x)


def _fmt(x: float) -> str:
    r = round(x)
    return str(int(r)) if abs(x - r) < 1e-12 else repr(float(x))


def _class_matrix(atlas: GroupAtlas, j: int, reps: list[np.ndarray]) -> np.ndarray:
    """M[l, k] = #{w in C_{inv j} : w·z_k in C_l}."""
    members = atlas.members(int(atlas.inverse_class[j]))
    counts = kernels.class_coefficients(atlas.tables, members, reps, atlas.class_map, atlas.K)
    return counts.T


def dixon_table(atlas: GroupAtlas) -> CharTable:
    A = atlas
    K = A.K
    if K > MAX_CLASSES:
        raise BudgetExceeded("classes", K, MAX_CLASSES)
    e = A.exponent
    p = dixon_prime(e, A.order)
    if p >= 1 << 31:
        raise BudgetExceeded("dixon_prime", p, 1 << 31)
    z = pow(primitive_root(p), (p - 1) // e, p)
    reps = [A.rep_matrix(c) for c in range(K)]

    spaces = [np.eye(K, dtype=np.int64)]
    for j in range(1, K):
        if all(B.shape[1] == 1 for B in spaces):
            break
        M = _class_matrix(A, j, reps) % p
        nxt = []
        for B in spaces:
            d = B.shape[1]
            if d == 1:
                nxt.append(B)
                continue
            _, piv = _rref_mod(B.T, p)
            MB = _matmul_mod(M, B, p)
            R = _solve_mod(B[piv], MB[piv], p)
            roots = _roots_mod(_charpoly_mod(R, p), p)
            if len(roots) == 1:
                nxt.append(B)
                continue
            got = 0
            for lam in roots:
                N = _nullspace_mod((R - lam * np.eye(d, dtype=np.int64)) % p, p)
                got += N.shape[1]
                nxt.append(_matmul_mod(B, N, p))
            if got != d:
                raise ConsistencyFailure(f"class-sum action not diagonalisable mod {p}")
        spaces = nxt
    if any(B.shape[1] != 1 for B in spaces) or len(spaces) != K:
        raise ConsistencyFailure("class sums failed to separate the irreducible characters")

    sizes_inv = np.array([pow(int(s) % p, -1, p) for s in A.sizes], dtype=np.int64)
    inv_cls = A.inverse_class
    root_tables: dict[int, np.ndarray] = {}
    rows, dims, mults, residues = [], [], [], []
    for B in spaces:
        v = B[:, 0] % p
        if v[0] == 0:
            raise ConsistencyFailure("central character vanishes at the identity")
        omega = v * pow(int(v[0]), -1, p) % p
        s = int(np.sum(omega * omega[inv_cls] % p * sizes_inv % p) % p)
        target = A.order % p * pow(s, -1, p) % p
        d = next((t for t in range(1, math.isqrt(A.order) + 1) if t * t % p == target), None)
        if d is None or A.order % d:
            raise NumericalGuard("no integral degree matches the central character")
        chi = omega * d % p * sizes_inv % p
        row_m = []
        vals = np.empty(K, dtype=np.complex128)
        for c in range(K):
            o = int(A.orders[c])
            if o not in root_tables:
                zeta = pow(z, e // o, p)
                root_tables[o] = np.array(
                    [[pow(zeta, (-j * k) % o, p) for j in range(o)] for k in range(o)], dtype=np.int64)
            seq = chi[A.power_class[c]]
            m = (root_tables[o] @ seq) % p * pow(o, -1, p) % p
            if np.any(m > d):
                raise NumericalGuard(f"character lift failed at class {c} (mod {p})")
            row_m.append(m.astype(np.int64))
            vals[c] = np.sum(m * np.exp(2j * np.pi * np.arange(o) / o))
        rows.append(vals)
        dims.append(d)
        mults.append(row_m)
        residues.append(chi)

    def key(i):
        return (dims[i], tuple((-round(v.real, 9), -round(v.imag, 9)) for v in rows[i]))

    order = sorted(range(K), key=key)
    table = CharTable(
        atlas=A,
        values=np.array([rows[i] for i in order]),
        dims=np.array([dims[i] for i in order], dtype=np.int64),
        mults=[mults[i] for i in order],
        prime=p,
        root=z,
        residues=np.array([residues[i] for i in order], dtype=np.int64),
    )
    _validate(table)
    return table


def _validate(t: CharTable) -> None:
    A = t.atlas
    if t.R != A.K:
        raise ConsistencyFailure("number of irreps differs from number of classes")
    if int(np.sum(t.dims.astype(object) ** 2)) != A.order:
        raise ConsistencyFailure("sum of squared degrees differs from |G|")
    r, c = t.orthogonality_residuals()
    if max(r, c) > 1e-9:
        raise NumericalGuard(f"orthogonality residuals {r:.2e}, {c:.2e}")
    if not np.allclose(t.values[0], 1):
        raise ConsistencyFailure("first row is not the trivial character")


_TABLES: dict = {}


def get_table(atlas: GroupAtlas) -> CharTable:
    """Memoised :func:`dixon_table` (one table per atlas object)."""
    key = id(atlas)
    hit = _TABLES.get(key)
    if hit is None or hit.atlas is not atlas:
        hit = dixon_table(atlas)
        _TABLES[key] = hit
    return hit


# ----------------------------------------------------------------------------
# particular class functions

def linear_characters(atlas: GroupAtlas) -> list[ClassFunction]:
    """lambda∘det for GL; the degree-one rows of the table for SL."""
    A = atlas
    if A.kind == "SL":
        t = get_table(A)
        return [t.character(i) for i in range(t.R) if t.dims[i] == 1]
    F = A.field
    from .gf import determinant

    dets = np.array([determinant(F, A.rep_matrix(c)) for c in range(A.K)])
    logs = F.log[dets]
    out = []
    for t in range(A.q - 1):
        out.append(ClassFunction(A, np.exp(2j * np.pi * t * logs / (A.q - 1)), label=f"det^{t}"))
    return out


def det_log(atlas: GroupAtlas) -> np.ndarray:
    """Discrete log (base the field generator) of det of each class."""
    from .gf import determinant

    F = atlas.field
    return F.log[np.array([determinant(F, atlas.rep_matrix(c)) for c in range(atlas.K)])]


def omega_power_character(atlas: GroupAtlas, k: int) -> ClassFunction:
    if k < 0:
        raise ValueError("k must be nonnegative")
    vals = np.array([float(atlas.q) ** (k * int(d)) for d in atlas.kernel_dims])
    return ClassFunction(atlas, vals, label=f"omega^{k}")


def regular_character(atlas: GroupAtlas) -> ClassFunction:
    v = np.zeros(atlas.K)
    v[0] = atlas.order
    return ClassFunction(atlas, v, label="regular")


def trivial_character(atlas: GroupAtlas) -> ClassFunction:
    return ClassFunction(atlas, np.ones(atlas.K), label="trivial")


def induced_character(atlas: GroupAtlas, subgroup: np.ndarray, chi_h: np.ndarray | None = None,
                      cap: int = INDUCTION_CAP) -> ClassFunction:
    """Ind_H^G(chi_H) from an explicit element set H (codes) and per-element values."""
    A = atlas
    if A.order > cap:
        raise BudgetExceeded("induction_group_order", A.order, cap)
    H = np.asarray(subgroup, dtype=np.int64)
    vals_h = np.ones(H.shape[0], dtype=np.complex128) if chi_h is None else np.asarray(chi_h, dtype=np.complex128)
    cls = A.class_map[H]
    if np.any(cls < 0):
        raise ValueError("subgroup contains non-members")
    sums = np.zeros(A.K, dtype=np.complex128)
    np.add.at(sums, cls, vals_h)
    out = A.order * sums / (H.shape[0] * A.sizes)
    return ClassFunction(A, out, label="induced")


def unipotent_radical_codes(n: int, q: int, parts) -> np.ndarray:
    """Codes of the block upper-unitriangular group for block sizes ``parts``."""
    from .gf import pack

    starts = np.cumsum([0] + list(parts))
    free = [(i, j) for b in range(len(parts)) for i in range(starts[b], starts[b + 1])
            for j in range(starts[b + 1], n)]
    base = np.eye(n, dtype=np.int64)
    base_code = pack(base, q)
    codes = np.full(q ** len(free), base_code, dtype=np.int64)
    idx = np.arange(q ** len(free), dtype=np.int64)
    for t, (i, j) in enumerate(free):
        codes += ((idx // q**t) % q) * q ** (i * n + j)
    return np.sort(codes)


def _compositions_proper(n: int):
    from .eta import partitions

    return [D for D in partitions(n) if len(D) > 1]


def radical_fixed_dims(table: CharTable, irrep: int) -> dict:
    """Per proper partition D: dim of N_D-fixed vectors of the irrep."""
    A = table.atlas
    out = {}
    for D in _compositions_proper(A.n):
        codes = unipotent_radical_codes(A.n, A.q, D)
        hist = np.bincount(A.class_map[codes], minlength=A.K)
        s = np.sum(hist * table.values[irrep]) / codes.shape[0]
        out[D] = GuardedInteger(complex(s)).value
    return out


def is_cuspidal(table: CharTable, irrep: int) -> bool:
    return all(v == 0 for v in radical_fixed_dims(table, irrep).values())


def char_ratio_at_transvection(table: CharTable, irrep: int) -> Fraction:
    A = table.atlas
    if A.n < 2:
        raise ValueError("n must be at least 2")
    t = A.transvection_class_id
    v = complex(table.values[irrep, t])
    if abs(v.imag) > TOL:
        raise NumericalGuard(f"chi{irrep}(T) = {v} is not real")
    r = table.rational_value(irrep, t)
    if r is None:
        raise NumericalGuard(f"chi{irrep}(T) = {v.real} is real but irrational")
    return Fraction(r) / int(table.dims[irrep])


def char_ratio_complex(table: CharTable, irrep: int) -> complex:
    return complex(table.values[irrep, table.atlas.transvection_class_id]) / int(table.dims[irrep])


def write_table(table: CharTable, path: str, fmt: str = "json") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fmt == "json":
            json.dump(table.to_json(), fh, indent=1)
            fh.write("\n")
        else:
            fh.write(table.to_csv())
