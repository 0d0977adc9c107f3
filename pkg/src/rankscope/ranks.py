"""U-rank, tensor rank and strict tensor rank of irreducible characters."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .atlas import GroupAtlas
from .chartable import (
    CharTable, ClassFunction, GuardedInteger, det_log, inner_product, omega_power_character,
)
from .errors import BudgetExceeded, ConsistencyFailure, NumericalGuard
from .gf import build_field, f_basis_over_prime, pack, unpack_many

U_CAP = 10_000_000


@dataclass(eq=False)
class UOrbitStructure:
    """Orbits of the Levi (intersected with G) on the abelian radical U_j ≅ M_{j, n-j}."""

    n: int
    q: int
    j: int  # block size: U_j = {I + [[0, A], [0, 0]]}, A of shape j x (n-j)
    kind: str
    codes: np.ndarray  # all A in M_{j,n-j}, as codes of the j x (n-j) matrix
    ranks: np.ndarray  # rank per code
    orbit_of: np.ndarray  # orbit id per code
    orbit_reps: np.ndarray  # smallest code per orbit
    orbit_sizes: np.ndarray
    orbit_ranks: np.ndarray

    @property
    def m(self) -> int:
        return self.j

    @property
    def size(self) -> int:
        return int(self.codes.shape[0])

    @property
    def max_rank(self) -> int:
        return min(self.j, self.n - self.j)

    @property
    def rank_sizes(self) -> np.ndarray:
        """#(O_r) for r = 0..max_rank (rank sets, merged over split orbits)."""
        return np.bincount(self.ranks, minlength=self.max_rank + 1).astype(np.int64)

    def matrices(self) -> np.ndarray:
        return unpack_many(self.codes, self.j, self.n - self.j, self.q)

    def embed(self, a: np.ndarray) -> np.ndarray:
        g = np.eye(self.n, dtype=np.int64)
        g[: self.j, self.j:] = a
        return g

    def rank_rep(self, r: int) -> np.ndarray:
        a = np.zeros((self.j, self.n - self.j), dtype=np.int64)
        for i in range(r):
            a[i, i] = 1
        return a

    def group_code(self, a: np.ndarray) -> int:
        return pack(self.embed(a), self.q)

    @cached_property
    def orbit_ft(self) -> np.ndarray:
        """F[o', o] = sum_{B in o} psi(tr(u_{o'}^t B)), exact integers when real."""
        mats = self.matrices()
        reps = mats[np.searchsorted(self.codes, self.orbit_reps)]
        return _ft_matrix(mats, reps, self.orbit_of, len(self.orbit_reps), self.q)


def _pairing(F, a: np.ndarray, mats: np.ndarray) -> np.ndarray:
    t = np.zeros(mats.shape[0], dtype=np.int64)
    for (i, jj), v in np.ndenumerate(a):
        if v:
            t = F.add[t, F.mul[v, mats[:, i, jj]]]
    return t


def _ft_matrix(mats, reps, labels, L, q) -> np.ndarray:
    F = build_field(q)
    out = np.zeros((reps.shape[0], L), dtype=np.complex128)
    for r, a in enumerate(reps):
        psi = F.psi[_pairing(F, a, mats)]
        out[r] = np.bincount(labels, weights=psi.real, minlength=L) + 1j * np.bincount(
            labels, weights=psi.imag, minlength=L)
    return out


def _batched_rank(mats: np.ndarray, q: int) -> np.ndarray:
    from .kernels import _np_batched_rank

    return _np_batched_rank(mats, build_field(q))


def _levi_generators(j: int, w: int, q: int, kind: str):
    """Maps A -> g A h^{-1} generating the Levi action, as (row_op, col_op) matrices."""
    F = build_field(q)
    gens = []

    def el(k, a, b, c):
        e = np.eye(k, dtype=np.int64)
        e[a, b] = c
        return e

    basis = f_basis_over_prime(F)
    for c in basis:
        for i in range(j - 1):
            gens.append((el(j, i, i + 1, c), np.eye(w, dtype=np.int64)))
            gens.append((el(j, i + 1, i, c), np.eye(w, dtype=np.int64)))
        for i in range(w - 1):
            gens.append((np.eye(j, dtype=np.int64), el(w, i, i + 1, c)))
            gens.append((np.eye(j, dtype=np.int64), el(w, i + 1, i, c)))
    t = F.generator
    if q > 2:
        if kind == "GL":
            gens.append((el(j, 0, 0, t), np.eye(w, dtype=np.int64)))
            gens.append((np.eye(j, dtype=np.int64), el(w, 0, 0, t)))
        else:
            # diag(t,1..) on the left block, diag(t^{-1},1..) on the right: A -> D_t A D_t
            gens.append((el(j, 0, 0, t), el(w, 0, 0, t)))
    return gens


def build_u_structure(n: int, q: int, kind: str = "GL", j: int | None = None,
                      cap: int = U_CAP) -> UOrbitStructure:
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    if n < 2:
        raise ValueError("n must be at least 2")
    j = n // 2 if j is None else j
    if not 1 <= j <= n - 1:
        raise ValueError("block size out of range")
    w = n - j
    size = q ** (j * w)
    if size > cap:
        raise BudgetExceeded("u_size", size, cap)
    F = build_field(q)
    codes = np.arange(size, dtype=np.int64)
    mats = unpack_many(codes, j, w, q)
    ranks = _batched_rank(mats, q)
    src, dst = [], []
    wts = q ** np.arange(j * w, dtype=np.int64)
    for g, h in _levi_generators(j, w, q, kind.upper()):
        # g·A·h (h stands for the inverse acting on the right; generators are closed under the group)
        ga = np.zeros_like(mats)
        for k in range(j):
            ga = F.add[ga, F.mul[g[:, k][None, :, None], mats[:, k, :][:, None, :]]]
        gah = np.zeros_like(mats)
        for k in range(w):
            gah = F.add[gah, F.mul[ga[:, :, k][:, :, None], h[k, :][None, None, :]]]
        src.append(codes)
        dst.append((gah.reshape(size, -1) * wts).sum(-1))
    if src:
        graph = coo_matrix((np.ones(size * len(src), dtype=np.int8),
                            (np.concatenate(src), np.concatenate(dst))), shape=(size, size))
        _, labels = connected_components(graph, directed=True, connection="weak")
    else:
        labels = np.arange(size)
    _, first = np.unique(labels, return_index=True)
    # order orbits by (rank, smallest code)
    order = sorted(range(first.shape[0]), key=lambda o: (int(ranks[first[o]]), int(first[o])))
    remap = np.empty(len(order), dtype=np.int64)
    remap[np.array(order)] = np.arange(len(order))
    orbit_of = remap[labels]
    reps = np.array([first[o] for o in order], dtype=np.int64)
    sizes = np.bincount(orbit_of, minlength=len(order)).astype(np.int64)
    if kind.upper() == "GL" and len(order) != min(j, w) + 1:
        raise ConsistencyFailure("GL Levi orbits on U are not the rank sets")
    return UOrbitStructure(n=n, q=q, j=j, kind=kind.upper(), codes=codes, ranks=ranks,
                           orbit_of=orbit_of, orbit_reps=reps, orbit_sizes=sizes,
                           orbit_ranks=ranks[reps])


def orbit_ft_matrix(u: UOrbitStructure) -> np.ndarray:
    """F[r][s] over rank sets: FT of the indicator of O_s at the rank-r representative."""
    mats = u.matrices()
    reps = np.stack([u.rank_rep(r) for r in range(u.max_rank + 1)])
    F = _ft_matrix(mats, reps, u.ranks, u.max_rank + 1, u.q)
    out = np.empty(F.shape, dtype=object)
    for idx, v in np.ndenumerate(F):
        out[idx] = GuardedInteger(complex(v)).value
    return out


# ----------------------------------------------------------------------------

def _exact_solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(x)] for row, x in zip(A, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            raise ConsistencyFailure("orbit Fourier matrix is singular")
        M[c], M[piv] = M[piv], M[c]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c] / M[c][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


@dataclass
class URankResult:
    m_orbit: list  # multiplicity per Levi orbit (ints)
    m: list  # per rank: Fraction average over the rank set (int for GL)
    u_rank: int
    residual: float = 0.0


def u_rank_profile(table: CharTable, irrep: int, u: UOrbitStructure) -> URankResult:
    A = table.atlas
    if (A.n, A.q) != (u.n, u.q):
        raise ValueError("table and U structure are for different groups")
    L = len(u.orbit_reps)
    mats = u.matrices()
    rep_mats = mats[np.searchsorted(u.codes, u.orbit_reps)]
    cls = [int(A.class_map[u.group_code(a)]) for a in rep_mats]
    if min(cls) < 0:
        raise ConsistencyFailure("radical element outside the group")
    Fm = u.orbit_ft
    rhs = [complex(table.values[irrep, c]) for c in cls]
    # Gauss periods make Fm real but irrational for some SL orbits
    exact_ok = np.allclose(Fm, np.round(Fm.real), atol=1e-9) and all(
        table.rational_value(irrep, c) is not None for c in cls)
    if exact_ok:
        Fi = [[Fraction(GuardedInteger(complex(v)).value) for v in row] for row in Fm]
        sol = _exact_solve(Fi, [table.rational_value(irrep, c) for c in cls])
        for s in sol:
            if s.denominator != 1:
                raise NumericalGuard(f"non-integral multiplicity {s} for irrep {irrep}")
        mo = [int(s) for s in sol]
        resid = 0.0
    else:
        x = np.linalg.solve(Fm, np.array(rhs))
        mo = [GuardedInteger(complex(v)).value for v in x]
        resid = float(np.abs(Fm @ np.array(mo) - np.array(rhs)).max())
        if resid > 1e-6:
            raise NumericalGuard(f"U-restriction not reproduced for irrep {irrep}")
    if min(mo) < 0:
        raise NumericalGuard(f"negative multiplicity for irrep {irrep}: {mo}")
    rs = u.rank_sizes
    m = []
    for r in range(u.max_rank + 1):
        tot = sum(mo[o] * int(u.orbit_sizes[o]) for o in range(L) if u.orbit_ranks[o] == r)
        f = Fraction(tot, int(rs[r]))
        m.append(int(f) if f.denominator == 1 else f)
    if sum(mo[o] * int(u.orbit_sizes[o]) for o in range(L)) != int(table.dims[irrep]):
        raise ConsistencyFailure(f"restriction to U loses dimension for irrep {irrep}")
    ur = max(int(u.orbit_ranks[o]) for o in range(L) if mo[o] != 0)
    return URankResult(m_orbit=mo, m=m, u_rank=ur, residual=resid)


# ----------------------------------------------------------------------------
# tensor ranks

class _OmegaCache:
    def __init__(self, atlas: GroupAtlas):
        self.atlas = atlas
        self.powers = [omega_power_character(atlas, k) for k in range(atlas.n + 1)]


_OMEGA: dict = {}


def _omegas(atlas: GroupAtlas) -> list[ClassFunction]:
    c = _OMEGA.get(id(atlas))
    if c is None or c.atlas is not atlas:
        c = _OmegaCache(atlas)
        _OMEGA[id(atlas)] = c
    return c.powers


def omega_multiplicities(table: CharTable, irrep: int) -> list[int]:
    """<chi, omega^l> for l = 0..n."""
    chi = table.character(irrep)
    return [inner_product(chi, w).value for w in _omegas(table.atlas)]


def twist_partners(table: CharTable) -> np.ndarray:
    """twist[i, t] = index of det^t ⊗ chi_i (GL only)."""
    A = table.atlas
    lg = det_log(A)
    R = table.R
    out = np.empty((R, A.q - 1), dtype=np.int64)
    keyed = {}
    for i in range(R):
        keyed.setdefault(_row_key(table.values[i]), []).append(i)
    for i in range(R):
        for t in range(A.q - 1):
            lam = np.exp(2j * np.pi * t * lg / (A.q - 1))
            hits = keyed.get(_row_key(table.values[i] * lam), [])
            if len(hits) != 1:
                raise ConsistencyFailure("twist by a linear character is not a table row")
            out[i, t] = hits[0]
    return out


def _row_key(v: np.ndarray) -> tuple:
    return tuple(np.round(v.real, 6) + 0.0) + tuple(np.round(v.imag, 6) + 0.0)


def tensor_rank(table: CharTable, irrep: int, mode: str = "plain") -> int:
    A = table.atlas
    if mode in ("strict", "sl") or A.kind == "SL":
        if mode == "plain" and A.kind == "SL":
            mode = "sl"
        mults = omega_multiplicities(table, irrep)
        for l, v in enumerate(mults):
            if v >= 1:
                return l
        raise ConsistencyFailure(f"irrep {irrep} missing from omega^n")
    if mode != "plain":
        raise ValueError(f"unknown mode {mode}")
    tw = twist_partners(table)
    return min(tensor_rank(table, int(j), "strict") for j in tw[irrep])


@dataclass
class RankProfile:
    irrep: int
    dim: int
    cr: Fraction | None  # exact when rational
    cr_value: complex
    m: list
    u_rank: int
    tensor_rank: int
    strict_tensor_rank: int
    twist_orbit: int
    m_orbit: list = field(default_factory=list)

    @property
    def cr_float(self) -> float:
        return float(self.cr) if self.cr is not None else float(self.cr_value.real)


def rank_profiles(table: CharTable, u: UOrbitStructure | None = None) -> list[RankProfile]:
    A = table.atlas
    if u is None:
        u = build_u_structure(A.n, A.q, A.kind)
    t = A.transvection_class_id
    strict = []
    for i in range(table.R):
        mults = omega_multiplicities(table, i)
        strict.append(next(l for l, v in enumerate(mults) if v >= 1))
    if A.kind == "GL":
        tw = twist_partners(table)
        plain = [min(strict[int(j)] for j in tw[i]) for i in range(table.R)]
        orbit = [int(tw[i].min()) for i in range(table.R)]
    else:
        plain = list(strict)
        orbit = list(range(table.R))
    out = []
    for i in range(table.R):
        ur = u_rank_profile(table, i, u)
        r = table.rational_value(i, t)
        d = int(table.dims[i])
        out.append(RankProfile(
            irrep=i, dim=d, cr=None if r is None else Fraction(r) / d,
            cr_value=complex(table.values[i, t]) / d, m=ur.m, u_rank=ur.u_rank,
            tensor_rank=plain[i], strict_tensor_rank=strict[i], twist_orbit=orbit[i],
            m_orbit=ur.m_orbit,
        ))
    return out


def profiles_to_csv(profiles: list[RankProfile]) -> str:
    width = max(len(p.m) for p in profiles)
    head = ["irrep", "dim", "cr_num", "cr_den"] + [f"m_{r}" for r in range(width)] + [
        "u_rank", "tensor_rank", "strict_rank"]
    lines = [",".join(head)]
    for p in profiles:
        if p.cr is not None:
            num, den = str(p.cr.numerator), str(p.cr.denominator)
        else:
            # irrational ratio: decimal real part, empty denominator
            num, den = repr(p.cr_value.real), ""
        cells = [str(p.irrep), str(p.dim), num, den] + [str(x) for x in p.m] + [
            str(p.u_rank), str(p.tensor_rank), str(p.strict_tensor_rank)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


_PROFILES: dict = {}


def get_profiles(table: CharTable) -> list[RankProfile]:
    hit = _PROFILES.get(id(table))
    if hit is None or hit[0] is not table:
        hit = (table, rank_profiles(table))
        _PROFILES[id(table)] = hit
    return hit[1]


def filtration_chain(table: CharTable) -> list[set]:
    A = table.atlas
    if A.kind != "GL":
        raise ValueError("filtration is defined for GL atlases")
    prof = get_profiles(table)
    chain = [{p.irrep for p in prof if p.strict_tensor_rank <= k} for k in range(A.n + 1)]
    for k in range(1, A.n + 1):
        if not chain[k - 1] < chain[k]:
            raise ConsistencyFailure(f"filtration step {k - 1} -> {k} is not strict")
    if len(chain[A.n]) != table.R:
        raise ConsistencyFailure("omega^n does not exhaust the dual")
    return chain


@dataclass
class AgreementRow:
    k: int
    tensor_set: list
    u_set: list
    equal: bool
    only_tensor: list
    only_u: list
    contained: bool


def agreement_check(table: CharTable) -> list[AgreementRow]:
    A = table.atlas
    if A.kind != "GL":
        raise ValueError("agreement is stated for GL atlases")
    prof = get_profiles(table)
    rows = []
    for k in range(A.n // 2):
        ts = sorted(p.irrep for p in prof if p.tensor_rank == k)
        us = sorted(p.irrep for p in prof if p.u_rank == k)
        only_t = sorted(set(ts) - set(us))
        rows.append(AgreementRow(k, ts, us, ts == us, only_t, sorted(set(us) - set(ts)), not only_t))
        if only_t:
            raise ConsistencyFailure(f"tensor-rank {k} irreps {only_t} have a different U-rank")
    return rows


def rank_independence_check(table: CharTable, irrep: int) -> dict:
    """U-rank of one irrep computed against every radical U_j with min(j, n-j) > rank."""
    A = table.atlas
    base = u_rank_profile(table, irrep, build_u_structure(A.n, A.q, A.kind)).u_rank
    out = {}
    for j in range(1, A.n):
        if min(j, A.n - j) > base:
            out[j] = u_rank_profile(table, irrep, build_u_structure(A.n, A.q, A.kind, j=j)).u_rank
    return {"u_rank": base, "per_radical": out, "consistent": all(v == base for v in out.values())}


def count_windows(table: CharTable) -> dict:
    """Raw counts per rank next to the leading terms q^{k+1} / q^n and dimension windows."""
    A = table.atlas
    n, q = A.n, A.q
    prof = get_profiles(table)
    out = {"tensor": [], "u": []}
    for k in range(n + 1):
        ds = [p.dim for p in prof if p.tensor_rank == k]
        lead = q ** (k + 1) if k <= n - 2 else None
        out["tensor"].append({"k": k, "count": len(ds), "lead": lead, "dims": sorted(ds)})
    for k in range(n // 2 + 1):
        ds = [p.dim for p in prof if p.u_rank == k]
        lead = q ** (k + 1) if k < n // 2 else q**n
        out["u"].append({"k": k, "count": len(ds), "lead": lead, "dims": sorted(ds)})
    return out
