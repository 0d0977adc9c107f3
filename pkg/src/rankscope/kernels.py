"""Hot loops over packed matrix codes.

Every public kernel has two bodies: a numba loop (``_nb_*``) and a
vectorised numpy path (``_np_*``).  ``_accel.USE_NUMBA`` picks one at call
time; both return bit-identical results.

A square matrix over F_q of size n is handled as n row-vectors, each a code
in ``[0, q**n)``; row i of a matrix code ``x`` is ``(x // N**i) % N`` with
``N = q**n``.  Row-vector arithmetic goes through the ``VecTables`` lookup
tables, so a product costs n or n^2 table reads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _accel
from ._accel import njit, prange
from .gf import FieldTable, build_field


@dataclass(frozen=True, eq=False)
class VecTables:
    n: int
    q: int
    N: int  # q**n
    vadd: np.ndarray  # (N, N)
    vscal: np.ndarray  # (q, N)
    digit_w: np.ndarray  # q**j for j < n
    row_w: np.ndarray  # N**i for i < n
    mul: np.ndarray
    add: np.ndarray
    sub: np.ndarray
    inv: np.ndarray


@lru_cache(maxsize=None)
def vec_tables(n: int, q: int) -> VecTables:
    F = build_field(q)
    N = q**n
    digits = np.zeros((N, n), dtype=np.int64)
    c = np.arange(N, dtype=np.int64)
    for j in range(n):
        digits[:, j] = c % q
        c = c // q
    w = q ** np.arange(n, dtype=np.int64)
    vadd = (F.add[digits[:, None, :], digits[None, :, :]] * w).sum(-1)
    vscal = (F.mul[np.arange(q)[:, None, None], digits[None, :, :]] * w).sum(-1)
    return VecTables(
        n=n, q=q, N=N, vadd=vadd, vscal=vscal, digit_w=w,
        row_w=N ** np.arange(n, dtype=np.int64),
        mul=np.ascontiguousarray(F.mul), add=np.ascontiguousarray(F.add),
        sub=np.ascontiguousarray(F.sub), inv=np.ascontiguousarray(F.inv),
    )


def rows_of(mat: np.ndarray, q: int) -> np.ndarray:
    """Row-vector codes of a dense (n, n) matrix."""
    w = q ** np.arange(mat.shape[1], dtype=np.int64)
    return (np.asarray(mat, dtype=np.int64) * w).sum(-1)


def right_table(T: VecTables, h: np.ndarray) -> np.ndarray:
    """rt[v] = code of the row vector v·h."""
    hr = rows_of(h, T.q)
    v = np.arange(T.N, dtype=np.int64)
    acc = np.zeros(T.N, dtype=np.int64)
    for k in range(T.n):
        d = (v // T.digit_w[k]) % T.q
        acc = T.vadd[acc, T.vscal[d, hr[k]]]
    return acc


# ----------------------------------------------------------------------------
# products and conjugation

@njit
def _nb_right_mul(xs, rt, N, n):
    out = np.empty_like(xs)
    for t in range(xs.shape[0]):
        x = xs[t]
        r = 0
        w = 1
        for i in range(n):
            r += rt[x % N] * w
            x //= N
            w *= N
        out[t] = r
    return out


def _np_right_mul(xs, rt, N, n):
    xs = np.asarray(xs, dtype=np.int64)
    out = np.zeros_like(xs)
    w = 1
    for i in range(n):
        out += rt[(xs // w) % N] * w
        w *= N
    return out


def right_mul(T: VecTables, xs: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Codes of x·h for every code x in ``xs``."""
    rt = right_table(T, h)
    xs = np.ascontiguousarray(xs, dtype=np.int64)
    if _accel.USE_NUMBA:
        return _nb_right_mul(xs, rt, T.N, T.n)
    return _np_right_mul(xs, rt, T.N, T.n)


@njit
def _conj_one(x, g, rt_ginv, vadd, vscal, N, n, rows, ys):
    for i in range(n):
        rows[i] = rt_ginv[x % N]
        x //= N
    r = 0
    w = 1
    for i in range(n):
        acc = 0
        for k in range(n):
            c = g[i, k]
            if c != 0:
                acc = vadd[acc, vscal[c, rows[k]]]
        ys[i] = acc
        r += acc * w
        w *= N
    return r


@njit
def _nb_conjugate(xs, g, rt_ginv, vadd, vscal, N, n):
    out = np.empty_like(xs)
    rows = np.empty(n, dtype=np.int64)
    ys = np.empty(n, dtype=np.int64)
    for t in range(xs.shape[0]):
        out[t] = _conj_one(xs[t], g, rt_ginv, vadd, vscal, N, n, rows, ys)
    return out


def _np_conjugate(xs, g, rt_ginv, vadd, vscal, N, n):
    xs = np.asarray(xs, dtype=np.int64)
    rows = [rt_ginv[(xs // N**i) % N] for i in range(n)]
    out = np.zeros_like(xs)
    for i in range(n):
        acc = np.zeros_like(xs)
        for k in range(n):
            if g[i, k]:
                acc = vadd[acc, vscal[g[i, k], rows[k]]]
        out += acc * N**i
    return out


def conjugate(T: VecTables, xs: np.ndarray, g: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    """Codes of g·x·g^{-1}."""
    rt = right_table(T, ginv)
    xs = np.ascontiguousarray(xs, dtype=np.int64)
    g = np.ascontiguousarray(g, dtype=np.int64)
    if _accel.USE_NUMBA:
        return _nb_conjugate(xs, g, rt, T.vadd, T.vscal, T.N, T.n)
    return _np_conjugate(xs, g, rt, T.vadd, T.vscal, T.N, T.n)


# ----------------------------------------------------------------------------
# determinant scan

@njit
def _det_digits(a, n, mul, sub, inv):
    det = 1
    for c in range(n):
        piv = -1
        for i in range(c, n):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            return 0
        if piv != c:
            for j in range(n):
                tmp = a[c, j]
                a[c, j] = a[piv, j]
                a[piv, j] = tmp
            det = sub[0, det]
        det = mul[det, a[c, c]]
        ic = inv[a[c, c]]
        for i in range(c + 1, n):
            if a[i, c] != 0:
                f = mul[a[i, c], ic]
                for j in range(c, n):
                    a[i, j] = sub[a[i, j], mul[f, a[c, j]]]
    return det


@njit
def _nb_scan_group(total, n, q, want_sl, mul, sub, inv):
    # two passes: count, then fill (keeps memory at |G|)
    a = np.empty((n, n), dtype=np.int64)
    count = 0
    for code in range(total):
        x = code
        for i in range(n):
            for j in range(n):
                a[i, j] = x % q
                x //= q
        d = _det_digits(a, n, mul, sub, inv)
        if d != 0 and (not want_sl or d == 1):
            count += 1
    out = np.empty(count, dtype=np.int64)
    t = 0
    for code in range(total):
        x = code
        for i in range(n):
            for j in range(n):
                a[i, j] = x % q
                x //= q
        d = _det_digits(a, n, mul, sub, inv)
        if d != 0 and (not want_sl or d == 1):
            out[t] = code
            t += 1
    return out


def _np_batched_det(mats: np.ndarray, F: FieldTable) -> np.ndarray:
    a = np.array(mats, dtype=np.int64, copy=True)
    B, n, _ = a.shape
    det = np.ones(B, dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    idx = np.arange(B)
    for c in range(n):
        nz = a[:, c:, c] != 0
        has = nz.any(axis=1)
        alive &= has
        piv = c + np.argmax(nz, axis=1)
        swap = piv != c
        if swap.any():
            s = idx[swap]
            rc = a[s, c].copy()
            a[s, c] = a[s, piv[swap]]
            a[s, piv[swap]] = rc
            det[s] = F.neg[det[s]]
        pv = a[:, c, c]
        det = F.mul[det, pv]
        ic = F.inv[pv]
        for i in range(c + 1, n):
            f = F.mul[a[:, i, c], ic]
            a[:, i, :] = F.sub[a[:, i, :], F.mul[f[:, None], a[:, c, :]]]
    det[~alive] = 0
    return det


def determinants(codes: np.ndarray, n: int, q: int) -> np.ndarray:
    from .gf import unpack_many

    return _np_batched_det(unpack_many(codes, n, n, q), build_field(q))


def scan_group(n: int, q: int, want_sl: bool, chunk: int = 1 << 20) -> np.ndarray:
    """Sorted codes of GL_n(F_q) (or SL_n when ``want_sl``) by full code-space scan."""
    F = build_field(q)
    total = q ** (n * n)
    if _accel.USE_NUMBA:
        return _nb_scan_group(total, n, q, want_sl, np.ascontiguousarray(F.mul),
                              np.ascontiguousarray(F.sub), np.ascontiguousarray(F.inv))
    parts = []
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        d = determinants(codes, n, q)
        keep = (d == 1) if want_sl else (d != 0)
        parts.append(codes[keep])
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


# ----------------------------------------------------------------------------
# conjugacy classes by flood fill

@njit
def _nb_flood(elems, class_map, gens, rt_ginvs, vadd, vscal, N, n):
    # class_map: -1 non-member, -2 unassigned member; returns number of classes
    stack = np.empty(elems.shape[0], dtype=np.int64)
    rows = np.empty(n, dtype=np.int64)
    ys = np.empty(n, dtype=np.int64)
    ngen = gens.shape[0]
    cid = 0
    for t in range(elems.shape[0]):
        s = elems[t]
        if class_map[s] != -2:
            continue
        class_map[s] = cid
        top = 0
        stack[top] = s
        top += 1
        while top > 0:
            top -= 1
            x = stack[top]
            for k in range(ngen):
                y = _conj_one(x, gens[k], rt_ginvs[k], vadd, vscal, N, n, rows, ys)
                if class_map[y] == -2:
                    class_map[y] = cid
                    stack[top] = y
                    top += 1
        cid += 1
    return cid


def _np_flood(elems, index_of, gens, ginvs, T: VecTables):
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    G = elems.shape[0]
    src, dst = [], []
    for g, gi in zip(gens, ginvs):
        y = conjugate(T, elems, g, gi)
        src.append(np.arange(G))
        dst.append(index_of(y))
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    graph = coo_matrix((np.ones(src.shape[0], dtype=np.int8), (src, dst)), shape=(G, G))
    _, labels = connected_components(graph, directed=True, connection="weak")
    # relabel by first occurrence so ids follow the smallest member code
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[order] = np.arange(order.shape[0])
    return remap[labels]


def flood_classes(T: VecTables, elems: np.ndarray, class_map: np.ndarray,
                  gens: list[np.ndarray], ginvs: list[np.ndarray]) -> int:
    """Fill ``class_map`` (dense, -1 off-group) with provisional class ids.

    Ids are assigned in order of each class's smallest member code.
    """
    if not gens:
        # trivial group (GL_1(F_2)): nothing to conjugate by
        class_map[elems] = np.arange(elems.shape[0])
        return int(elems.shape[0])
    if _accel.USE_NUMBA:
        class_map[elems] = -2
        g = np.ascontiguousarray(np.stack(gens), dtype=np.int64)
        rts = np.ascontiguousarray(np.stack([right_table(T, gi) for gi in ginvs]))
        return int(_nb_flood(elems, class_map, g, rts, T.vadd, T.vscal, T.N, T.n))
    lookup = np.full(class_map.shape[0], -1, dtype=np.int64)
    lookup[elems] = np.arange(elems.shape[0])
    labels = _np_flood(elems, lambda y: lookup[y], gens, ginvs, T)
    class_map[elems] = labels
    return int(labels.max()) + 1 if labels.size else 0


# ----------------------------------------------------------------------------
# class-algebra structure constants

@njit(parallel=True)
def _nb_class_coeffs(members, rep_rts, class_map, K, N, n):
    # out[l, k] = #{w in members : class(w * z_l) = k}
    L = rep_rts.shape[0]
    out = np.zeros((L, K), dtype=np.int64)
    for l in prange(L):
        rt = rep_rts[l]
        for t in range(members.shape[0]):
            x = members[t]
            r = 0
            w = 1
            for i in range(n):
                r += rt[x % N] * w
                x //= N
                w *= N
            out[l, class_map[r]] += 1
    return out


def class_coefficients(T: VecTables, members: np.ndarray, reps: list[np.ndarray],
                       class_map: np.ndarray, K: int) -> np.ndarray:
    """Counts ``out[l, k] = #{w in members : w·reps[l] in class k}``."""
    members = np.ascontiguousarray(members, dtype=np.int64)
    rts = np.ascontiguousarray(np.stack([right_table(T, z) for z in reps]))
    if _accel.USE_NUMBA:
        return _nb_class_coeffs(members, rts, class_map, K, T.N, T.n)
    out = np.zeros((len(reps), K), dtype=np.int64)
    for l in range(len(reps)):
        prod = _np_right_mul(members, rts[l], T.N, T.n)
        out[l] = np.bincount(class_map[prod], minlength=K)
    return out


# ----------------------------------------------------------------------------
# convolution by a class indicator

@njit
def _nb_conv_step(f, mult):
    out = np.zeros_like(f)
    G, C = mult.shape
    for x in range(G):
        v = f[x]
        if v != 0:
            for c in range(C):
                out[mult[x, c]] += v
    return out


def conv_step(f: np.ndarray, mult: np.ndarray) -> np.ndarray:
    """One step f -> f * 1_C, with ``mult[x, c]`` the index of x·c."""
    if _accel.USE_NUMBA:
        return _nb_conv_step(f, mult)
    out = np.zeros_like(f)
    np.add.at(out, mult.ravel(), np.repeat(f, mult.shape[1]))
    return out


# ----------------------------------------------------------------------------
# exhaustive rank census of M_{m,n}

@njit
def _nb_rank_census(m, n, q, bw, mul, add, sub, inv, lo, hi):
    # hist[r, t]: rank r, pairing value t = sum B_ij A_ij
    # cats[r, :]: (A_11 = 0, first column zero, first row zero, both)
    hist = np.zeros((min(m, n) + 1, q), dtype=np.int64)
    cats = np.zeros((min(m, n) + 1, 4), dtype=np.int64)
    a = np.empty((m, n), dtype=np.int64)
    for code in range(lo, hi):
        x = code
        t = 0
        for i in range(m):
            for j in range(n):
                d = x % q
                x //= q
                a[i, j] = d
                if d != 0 and bw[i, j] != 0:
                    t = add[t, mul[bw[i, j], d]]
        col0 = True
        for i in range(m):
            if a[i, 0] != 0:
                col0 = False
        row0 = True
        for j in range(n):
            if a[0, j] != 0:
                row0 = False
        a11 = a[0, 0] == 0
        r = 0
        for c in range(n):
            if r == m:
                break
            piv = -1
            for i in range(r, m):
                if a[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(n):
                    tmp = a[r, j]
                    a[r, j] = a[piv, j]
                    a[piv, j] = tmp
            ic = inv[a[r, c]]
            for i in range(r + 1, m):
                if a[i, c] != 0:
                    f = mul[a[i, c], ic]
                    for j in range(c, n):
                        a[i, j] = sub[a[i, j], mul[f, a[r, j]]]
            r += 1
        hist[r, t] += 1
        if a11:
            cats[r, 0] += 1
        if col0:
            cats[r, 1] += 1
        if row0:
            cats[r, 2] += 1
        if col0 and row0:
            cats[r, 3] += 1
    return hist, cats


def _np_batched_rank(a: np.ndarray, F: FieldTable) -> np.ndarray:
    a = np.array(a, dtype=np.int64, copy=True)
    B, m, n = a.shape
    r = np.zeros(B, dtype=np.int64)
    idx = np.arange(B)
    rows = np.arange(m)
    for c in range(n):
        nz = (a[:, :, c] != 0) & (rows[None, :] >= r[:, None])
        has = nz.any(axis=1)
        if not has.any():
            continue
        piv = np.argmax(nz, axis=1)
        s = idx[has]
        pr, rr = piv[has], r[has]
        tmp = a[s, rr].copy()
        a[s, rr] = a[s, pr]
        a[s, pr] = tmp
        pivrow = a[s, rr]  # (b, n)
        ic = F.inv[pivrow[:, c]]
        below = rows[None, :] > rr[:, None]
        f = F.mul[a[s, :, c], ic[:, None]] * below
        a[s] = F.sub[a[s], F.mul[f[:, :, None], pivrow[:, None, :]]]
        r[s] += 1
    return r


def rank_census(m: int, n: int, q: int, bmat: np.ndarray | None = None,
                chunk: int = 1 << 18) -> tuple[np.ndarray, np.ndarray]:
    """Exhaustive census of all m×n matrices A by rank.

    Returns ``hist[r, t]`` counting rank-r matrices with sum_ij B_ij A_ij = t
    (field code t), and ``cats[r]`` = counts of (A_11 = 0, first column zero,
    first row zero, both zero).
    """
    F = build_field(q)
    bw = np.zeros((m, n), dtype=np.int64) if bmat is None else np.ascontiguousarray(bmat, dtype=np.int64)
    total = q ** (m * n)
    if _accel.USE_NUMBA:
        return _nb_rank_census(m, n, q, bw, np.ascontiguousarray(F.mul), np.ascontiguousarray(F.add),
                               np.ascontiguousarray(F.sub), np.ascontiguousarray(F.inv), 0, total)
    from .gf import unpack_many

    R = min(m, n) + 1
    hist = np.zeros((R, q), dtype=np.int64)
    cats = np.zeros((R, 4), dtype=np.int64)
    for lo in range(0, total, chunk):
        a = unpack_many(np.arange(lo, min(total, lo + chunk), dtype=np.int64), m, n, q)
        t = np.zeros(a.shape[0], dtype=np.int64)
        for i in range(m):
            for j in range(n):
                if bw[i, j]:
                    t = F.add[t, F.mul[bw[i, j], a[:, i, j]]]
        r = _np_batched_rank(a, F)
        np.add.at(hist, (r, t), 1)
        col0 = ~a[:, :, 0].any(axis=1)
        row0 = ~a[:, 0, :].any(axis=1)
        for k, flag in enumerate((a[:, 0, 0] == 0, col0, row0, col0 & row0)):
            cats[:, k] += np.bincount(r[flag], minlength=R)
    return hist, cats
