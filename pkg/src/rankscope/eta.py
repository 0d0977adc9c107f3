"""Dual-pair multiplicity spaces, the eta correspondence, and parabolic inductions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .atlas import GroupAtlas, get_atlas
from .chartable import (
    CharTable, ClassFunction, GuardedInteger, INDUCTION_CAP, det_log, get_table, induced_character,
    inner_product, omega_power_character,
)
from .errors import BudgetExceeded, ConsistencyFailure, NotInDomain
from .gf import build_field, row_reduce, unpack_many
from .kernels import _np_batched_rank

FLAG_CAP = 1_000_000


# ----------------------------------------------------------------------------
# partitions

def partitions(n: int, largest: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of n as nonincreasing tuples, in reverse lexicographic order."""
    largest = n if largest is None else largest
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return out


def parse_partition(text: str) -> tuple[int, ...]:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"bad partition literal {text!r}; expected [d1,d2,...]")
    parts = tuple(int(x) for x in body[1:-1].split(",") if x.strip())
    if not parts or any(p < 1 for p in parts) or list(parts) != sorted(parts, reverse=True):
        raise ValueError(f"partition parts must be positive and nonincreasing: {text!r}")
    return parts


def dominance(D, Dp) -> bool:
    """True iff D' dominates D (D ⪯ D')."""
    if sum(D) != sum(Dp):
        raise ValueError("partitions of different integers")
    if len(Dp) > len(D):
        return False
    sa = sb = 0
    for j in range(len(Dp)):
        sa += D[j]
        sb += Dp[j]
        if sa > sb:
            return False
    return True


# ----------------------------------------------------------------------------
# dual pair GL_n x GL_k on M_{n,k}

def joint_character(atlas_n: GroupAtlas, atlas_k: GroupAtlas) -> np.ndarray:
    """J[c, c'] = #{m in M_{n,k} : g m = m h} for class reps g, h."""
    n, k, q = atlas_n.n, atlas_k.n, atlas_n.q
    F = build_field(q)
    J = np.zeros((atlas_n.K, atlas_k.K), dtype=np.int64)
    In, Ik = np.eye(n, dtype=np.int64), np.eye(k, dtype=np.int64)
    for c in range(atlas_n.K):
        g = atlas_n.rep_matrix(c)
        left = _kron(F, Ik, g)
        for c2 in range(atlas_k.K):
            h = atlas_k.rep_matrix(c2)
            right = _kron(F, h.T, In)
            op = F.sub[left, right]
            r = len(row_reduce(F, op)[1])
            J[c, c2] = q ** (n * k - r)
    return J


def _kron(F, a, b):
    out = np.zeros((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=np.int64)
    for (i, j), v in np.ndenumerate(a):
        out[i * b.shape[0]:(i + 1) * b.shape[0], j * b.shape[1]:(j + 1) * b.shape[1]] = F.mul[v, b]
    return out


@dataclass(eq=False)
class MultiplicitySpaceChar:
    tau: int
    character: ClassFunction
    decomposition: list  # multiplicity of each GL_n irrep

    @property
    def dim(self) -> int:
        return GuardedInteger(complex(self.character.values[0])).value

    def constituents(self) -> list[tuple[int, int]]:
        return [(i, m) for i, m in enumerate(self.decomposition) if m]


def decompose(table: CharTable, f: ClassFunction) -> list[int]:
    out = []
    for i in range(table.R):
        v = inner_product(f, table.character(i)).value
        if v < 0:
            raise ConsistencyFailure(f"negative multiplicity {v} of irrep {i}")
        out.append(v)
    return out


def multiplicity_space_character(tn: CharTable, tk: CharTable, tau: int,
                                 J: np.ndarray | None = None) -> MultiplicitySpaceChar:
    An, Ak = tn.atlas, tk.atlas
    if Ak.n > An.n or An.q != Ak.q or An.kind != "GL" or Ak.kind != "GL":
        raise ValueError("need GL_n and GL_k tables over the same field with k <= n")
    if J is None:
        J = joint_character(An, Ak)
    vals = (J * (Ak.sizes * np.conj(tk.values[tau]))[None, :]).sum(axis=1) / Ak.order
    f = ClassFunction(An, vals, label=f"M(tau{tau})")
    return MultiplicitySpaceChar(tau, f, decompose(tn, f))


def isotypic_completeness(tn: CharTable, tk: CharTable, J: np.ndarray | None = None) -> float:
    """Max deviation of sum_tau dim(tau) M(tau) from omega_{n,k} on GL_n."""
    An, Ak = tn.atlas, tk.atlas
    if J is None:
        J = joint_character(An, Ak)
    total = np.zeros(An.K, dtype=np.complex128)
    for t in range(tk.R):
        total += tk.dims[t] * multiplicity_space_character(tn, tk, t, J).character.values
    return float(np.abs(total - omega_power_character(An, Ak.n).values).max())


def eta_of(tn: CharTable, tk: CharTable, tau: int, mode: str = "u_rank",
           J: np.ndarray | None = None) -> int:
    from .ranks import get_profiles, tensor_rank

    n, k = tn.atlas.n, tk.atlas.n
    prof = get_profiles(tn)
    if mode == "u_rank":
        if k > n // 2:
            raise NotInDomain(f"u_rank mode needs k <= floor(n/2), got k={k}, n={n}")
        rank_of = [p.u_rank for p in prof]
    elif mode == "strict":
        if tensor_rank(tk, tau, "strict") < 2 * k - n:
            raise NotInDomain("strict tensor rank of tau is below 2k - n")
        rank_of = [p.strict_tensor_rank for p in prof]
    else:
        raise ValueError(f"unknown mode {mode}")
    M = multiplicity_space_character(tn, tk, tau, J)
    top = [(i, m) for i, m in M.constituents() if rank_of[i] == k]
    if len(top) != 1 or top[0][1] != 1:
        raise ConsistencyFailure(f"M(tau{tau}) has rank-{k} constituents {top}, expected exactly one once")
    above = [i for i, _ in M.constituents() if rank_of[i] > k]
    if above:
        raise ConsistencyFailure(f"M(tau{tau}) has constituents {above} of rank above {k}")
    return top[0][0]


@dataclass
class EtaReport:
    n: int
    k: int
    q: int
    mode: str
    eta: dict  # tau -> irrep of GL_n
    injective: bool
    dim_ratios: dict  # tau -> dim eta / (dim tau q^{k(n-k)})
    exhaustion_missing: list  # U-rank-k irreps not a twist of any eta(tau)
    completeness_error: float


def eta_report(tn: CharTable, k: int, mode: str = "u_rank") -> EtaReport:
    from .ranks import get_profiles, twist_partners

    An = tn.atlas
    Ak = get_atlas("GL", k, An.q)
    tk = get_table(Ak)
    J = joint_character(An, Ak)
    eta = {t: eta_of(tn, tk, t, mode, J) for t in range(tk.R)}
    injective = len(set(eta.values())) == len(eta)
    if not injective:
        raise ConsistencyFailure("eta is not injective")
    ratios = {t: tn.dims[i] / (tk.dims[t] * An.q ** (k * (An.n - k))) for t, i in eta.items()}
    missing = []
    if k < An.n // 2:
        tw = twist_partners(tn)
        reach = {int(j) for i in eta.values() for j in tw[i]}
        missing = [p.irrep for p in get_profiles(tn) if p.u_rank == k and p.irrep not in reach]
    return EtaReport(An.n, k, An.q, mode, eta, injective, ratios, missing, isotypic_completeness(tn, tk, J))


# ----------------------------------------------------------------------------
# flags and parabolic permutation characters

@lru_cache(maxsize=None)
def subspaces(n: int, d: int, q: int) -> np.ndarray:
    """Every d-dim subspace of F_q^n as its RREF basis, shape (S, d, n)."""
    out = []
    for piv in combinations(range(n), d):
        free = [(r, c) for r in range(d) for c in range(piv[r] + 1, n) if c not in piv]
        for vals in product(range(q), repeat=len(free)):
            m = np.zeros((d, n), dtype=np.int64)
            for r, c in enumerate(piv):
                m[r, c] = 1
            for (r, c), v in zip(free, vals):
                m[r, c] = v
            out.append(m)
    return np.array(out, dtype=np.int64).reshape(len(out), d, n)


def _contains(F, small: np.ndarray, big: np.ndarray) -> np.ndarray:
    """C[i, j] = subspace small[i] lies in big[j]."""
    a, b = small.shape[0], big.shape[0]
    d = big.shape[1]
    stack = np.concatenate([np.repeat(small, b, axis=0), np.tile(big, (a, 1, 1))], axis=1)
    return (_np_batched_rank(stack, F) == d).reshape(a, b)


@dataclass(eq=False)
class FlagSpace:
    n: int
    q: int
    D: tuple
    dims: tuple  # partial sums, the proper subspace dimensions
    flags: np.ndarray  # (count, len(dims)) subspace indices per level

    @property
    def count(self) -> int:
        return int(self.flags.shape[0])


@lru_cache(maxsize=None)
def flag_space(n: int, q: int, D: tuple, cap: int = FLAG_CAP) -> FlagSpace:
    from .matrix_ft import gl_cardinality

    dims = tuple(int(x) for x in np.cumsum(D)[:-1])
    P = q ** sum(D[i] * D[j] for i in range(len(D)) for j in range(i + 1, len(D)))
    for d in D:
        P *= gl_cardinality(d, q)
    expected = gl_cardinality(n, q) // P
    if expected > cap:
        raise BudgetExceeded("flags", expected, cap)
    F = build_field(q)
    if not dims:
        return FlagSpace(n, q, D, dims, np.zeros((1, 0), dtype=np.int64))
    levels = [subspaces(n, d, q) for d in dims]
    flags = np.arange(levels[-1].shape[0])[:, None]
    for lv in range(len(dims) - 2, -1, -1):
        C = _contains(F, levels[lv], levels[lv + 1])
        parts = []
        for row in flags:
            below = np.flatnonzero(C[:, row[0]])
            parts.append(np.column_stack([below, np.repeat(row[None, :], below.shape[0], axis=0)]))
        flags = np.concatenate(parts)
    if flags.shape[0] != expected:
        raise ConsistencyFailure(f"flag count {flags.shape[0]} != |G/P_D| = {expected}")
    return FlagSpace(n, q, D, dims, flags)


def _invariant_mask(F, subs: np.ndarray, g: np.ndarray) -> np.ndarray:
    d = subs.shape[1]
    img = np.zeros_like(subs)
    # rows v -> v g^T, i.e. column vectors x -> g x
    for k in range(g.shape[0]):
        img = F.add[img, F.mul[subs[:, :, k][:, :, None], g.T[k][None, None, :]]]
    return _np_batched_rank(np.concatenate([subs, img], axis=1), F) == d


def flag_permutation_character(atlas: GroupAtlas, D) -> ClassFunction:
    """I_D: the number of D-flags fixed by each class representative."""
    D = tuple(D)
    if sum(D) != atlas.n:
        raise ValueError("partition does not match n")
    fs = flag_space(atlas.n, atlas.q, D)
    F = atlas.field
    if not fs.dims:
        return ClassFunction(atlas, np.ones(atlas.K), label=f"I{list(D)}")
    levels = [subspaces(atlas.n, d, atlas.q) for d in fs.dims]
    vals = np.zeros(atlas.K)
    for c in range(atlas.K):
        g = atlas.rep_matrix(c)
        ok = np.ones(fs.count, dtype=bool)
        for lv, subs in enumerate(levels):
            ok &= _invariant_mask(F, subs, g)[fs.flags[:, lv]]
        vals[c] = ok.sum()
    return ClassFunction(atlas, vals, label=f"I{list(D)}")


def parabolic_codes(atlas: GroupAtlas, S) -> np.ndarray:
    """Elements of the standard block upper-triangular parabolic with block sizes S."""
    n, q = atlas.n, atlas.q
    mats = unpack_many(atlas.elements, n, n, q)
    starts = np.cumsum([0] + list(S))
    keep = np.ones(atlas.order, dtype=bool)
    for b in range(len(S)):
        keep &= ~mats[:, starts[b + 1]:, starts[b]:starts[b + 1]].any(axis=(1, 2))
    return atlas.elements[keep]


def sps_constituent(table: CharTable, D) -> int:
    A = table.atlas
    if A.kind != "GL":
        raise ValueError("SPS constituents are defined on GL atlases")
    D = tuple(D)
    I = decompose(table, flag_permutation_character(A, D))
    banned = set()
    for Dp in partitions(A.n):
        if Dp != D and dominance(D, Dp):
            banned |= {i for i, m in enumerate(decompose(table, flag_permutation_character(A, Dp))) if m}
    cands = [i for i, m in enumerate(I) if m == 1 and i not in banned]
    if len(cands) != 1:
        raise ConsistencyFailure(f"SPS constituent for {list(D)} not unique: {cands}")
    return cands[0]


def split_series_character(atlas: GroupAtlas, S, Ds, chis, cap: int = INDUCTION_CAP) -> ClassFunction:
    """Ind_{P_S}(⊗_j lambda_{chis[j]}(det) ⊗ rho_{D_j}); ``chis`` are exponents t of det^t."""
    S, Ds, chis = tuple(S), [tuple(d) for d in Ds], list(chis)
    if sum(S) != atlas.n or len(Ds) != len(S) or len(chis) != len(S):
        raise ValueError("block data does not match n")
    if any(sum(d) != s for d, s in zip(Ds, S)):
        raise ValueError("each D_j must partition s_j")
    if len(set(chis)) != len(chis):
        raise ValueError("characters of F_q^* must be pairwise distinct")
    if atlas.order > cap:
        raise BudgetExceeded("induction_group_order", atlas.order, cap)
    n, q = atlas.n, atlas.q
    H = parabolic_codes(atlas, S)
    mats = unpack_many(H, n, n, q)
    vals = np.ones(H.shape[0], dtype=np.complex128)
    starts = np.cumsum([0] + list(S))
    for b, (s, Dj, t) in enumerate(zip(S, Ds, chis)):
        blk = mats[:, starts[b]:starts[b + 1], starts[b]:starts[b + 1]]
        ab = get_atlas("GL", s, q)
        tb = get_table(ab)
        rho = sps_constituent(tb, Dj) if s > 0 else 0
        w = q ** np.arange(s * s, dtype=np.int64)
        codes = (blk.reshape(H.shape[0], -1) * w).sum(-1)
        cls = ab.class_map[codes]
        lg = det_log(ab)[cls]
        vals *= tb.values[rho][cls] * np.exp(2j * np.pi * t * lg / (q - 1))
    f = induced_character(atlas, H, vals, cap=cap)
    norm = inner_product(f, f).value
    if norm != 1:
        raise ConsistencyFailure(f"split series character has norm {norm}, expected 1")
    return f


@dataclass
class CorankRow:
    D: tuple
    rho: int
    dim: int
    expected: int
    tensor_rank: int
    strict_tensor_rank: int

    @property
    def holds(self) -> bool:
        return self.tensor_rank == self.expected and self.strict_tensor_rank == self.expected


def corank_fact_check(table: CharTable) -> list[CorankRow]:
    from .ranks import get_profiles

    prof = get_profiles(table)
    out = []
    for D in partitions(table.atlas.n):
        i = sps_constituent(table, D)
        out.append(CorankRow(D, i, int(table.dims[i]), table.atlas.n - D[0],
                             prof[i].tensor_rank, prof[i].strict_tensor_rank))
    return out
