"""Counting words c_1···c_l = g with every c_i in the transvection class."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .atlas import GroupAtlas, boundary_regular_classes
from .chartable import CharTable
from .cyclotomic import CycField, lcm
from .errors import BudgetExceeded, ConsistencyFailure, InvalidClass, NumericalGuard
from .gf import unpack

ORACLE_CAP = 10**10


def _cyc(table: CharTable, i: int, c: int, K: CycField):
    return K.from_multiplicities(table.mults[i][c], int(table.atlas.orders[c]))


def _field_for(table: CharTable, g_class: int) -> CycField:
    A = table.atlas
    return CycField(lcm(int(A.orders[A.transvection_class_id]), int(A.orders[g_class])))


def character_sum_terms(table: CharTable, ell: int, g_class: int, use_inverse: bool = True):
    """Per irrep: dim · (chi(T)/dim)^ell · chi(g^{±1}) as exact cyclotomic numbers."""
    A = table.atlas
    t = A.transvection_class_id
    gc = int(A.inverse_class[g_class]) if use_inverse else g_class
    K = _field_for(table, g_class)
    out = []
    for i in range(table.R):
        d = int(table.dims[i])
        term = K.mul(K.pow(_cyc(table, i, t, K), ell), _cyc(table, i, gc, K))
        out.append(K.scale(term, Fraction(1, d ** (ell - 1))))
    return K, out


def frobenius_count(table: CharTable, ell: int, g_class: int) -> int:
    """Exact #M_{l,g} from the character sum."""
    if ell < 1:
        raise ValueError("ell must be positive")
    A = table.atlas
    csize = int(A.sizes[A.transvection_class_id])
    K, terms = character_sum_terms(table, ell, g_class)
    acc = K.zero()
    for term in terms:
        acc = K.add(acc, term)
    val = K.as_rational(acc)
    if val is None:
        raise NumericalGuard("character sum is not rational")
    count = Fraction(csize**ell, A.order) * val
    if count.denominator != 1 or count < 0:
        raise NumericalGuard(f"Frobenius count {count} is not a nonnegative integer")
    return int(count)


def _mult_table(atlas: GroupAtlas) -> np.ndarray:
    T = atlas.tables
    members = atlas.members(atlas.transvection_class_id)
    cols = []
    for code in members:
        m = unpack(int(code), atlas.n, atlas.n, atlas.q)
        cols.append(atlas.index_of(kernels.right_mul(T, atlas.elements, m)))
    return np.ascontiguousarray(np.stack(cols, axis=1))


def convolution_oracle(atlas: GroupAtlas, ell_max: int, cap: int = ORACLE_CAP) -> list[np.ndarray]:
    """f_l per class (l = 0..ell_max) by iterated convolution with 1_C over the group."""
    csize = int(atlas.sizes[atlas.transvection_class_id])
    cost = atlas.order * csize * ell_max
    if cost > cap:
        raise BudgetExceeded("convolution_cost", cost, cap)
    mult = _mult_table(atlas)
    cls = atlas.class_map[atlas.elements]
    rep_idx = atlas.index_of(atlas.reps)
    f = np.zeros(atlas.order, dtype=np.int64)
    f[rep_idx[0]] = 1
    out = [f[rep_idx].copy()]
    for ell in range(1, ell_max + 1):
        f = kernels.conv_step(f, mult)
        per_class = f[rep_idx]
        if not np.array_equal(f, per_class[cls]):
            raise ConsistencyFailure(f"f_{ell} is not a class function")
        if int(f.sum(dtype=object)) != csize**ell:
            raise ConsistencyFailure(f"f_{ell} lost mass")
        out.append(per_class.copy())
    return out


def _as_number(K: CycField, v):
    r = K.as_rational(v)
    return r if r is not None else K.to_complex(v)


def rank_split_sums(table: CharTable, ell: int, g_class: int, ranks: list[int] | None = None) -> dict:
    """(S_{l,g})_k for k = 1..n, split by the tensor rank of the nontrivial irreps."""
    from .ranks import get_profiles

    A = table.atlas
    if ranks is None:
        ranks = [p.tensor_rank for p in get_profiles(table)]
    K, terms = character_sum_terms(table, ell, g_class)
    parts = {k: K.zero() for k in range(1, A.n + 1)}
    for i, term in enumerate(terms):
        if i == 0:
            continue
        k = ranks[i]
        if k == 0:
            parts.setdefault(0, K.zero())
        parts[k] = K.add(parts.get(k, K.zero()), term)
    total = K.zero()
    for v in parts.values():
        total = K.add(total, v)
    count = frobenius_count(table, ell, g_class)
    csize = int(A.sizes[A.transvection_class_id])
    lhs = Fraction(count * A.order, csize**ell)
    if K.as_rational(total) is None or K.as_rational(total) + 1 != lhs:
        raise ConsistencyFailure("rank split does not reassemble the character sum")
    return {k: _as_number(K, v) for k, v in sorted(parts.items())}


@dataclass
class RankOneRow:
    g_class: int
    kernel_dim: int
    total: object
    identity_value: int  # q^{dim ker(g - I)} - 2
    stated_value: int = -2


@dataclass
class RankOneReport:
    group: str
    omega_decomposition_ok: bool
    rank_one_irreps: list
    rows: list = field(default_factory=list)

    @property
    def identity_holds(self) -> bool:
        return all(r.total == r.identity_value for r in self.rows)

    @property
    def stated_holds(self) -> bool:
        return all(r.total == r.stated_value for r in self.free_rows)

    @property
    def free_rows(self) -> list:
        """Rows for classes with no eigenvalue 1."""
        return [r for r in self.rows if r.kernel_dim == 0]


def rank_one_sum_check(table: CharTable) -> RankOneReport:
    """Sum of rank-one characters against the fixed-point count of L^2(F_q^n)."""
    from .chartable import inner_product, omega_power_character
    from .ranks import get_profiles

    A = table.atlas
    if A.kind != "SL" or A.n < 3:
        raise ValueError("needs an SL atlas with n >= 3")
    prof = get_profiles(table)
    r1 = [p.irrep for p in prof if p.tensor_rank == 1]
    om = omega_power_character(A, 1)
    decomp = [inner_product(om, table.character(i)).value for i in range(table.R)]
    ok = decomp[0] == 2 and all(decomp[i] == 1 for i in r1) and all(
        decomp[i] == 0 for i in range(1, table.R) if i not in r1)
    rows = []
    for c in range(A.K):
        K = CycField(int(A.orders[c]))
        s = K.zero()
        for i in r1:
            s = K.add(s, _cyc(table, i, c, K))
        val = K.as_rational(s)
        rows.append(RankOneRow(c, int(A.kernel_dims[c]), val if val is not None else K.to_complex(s),
                               A.q ** int(A.kernel_dims[c]) - 2))
    rep = RankOneReport(A.name, ok, r1, rows)
    if not ok or not rep.identity_holds:
        raise ConsistencyFailure("L^2(F_q^n) decomposition / fixed-point identity violated")
    return rep


@dataclass
class GenerationRow:
    ell: int
    frobenius: int
    oracle: int | None
    deviation: Fraction
    rank_sums: dict
    ratio: Fraction | None  # deviation(l) / deviation(l-1)


@dataclass
class GenerationTable:
    group: str
    g_class: int
    rows: list

    def to_json(self) -> dict:
        def num(x):
            if isinstance(x, Fraction):
                return {"num": x.numerator, "den": x.denominator, "value": float(x)}
            if isinstance(x, complex):
                return {"re": x.real, "im": x.imag}
            return x

        return {
            "group": self.group,
            "g_class": self.g_class,
            "rows": [
                {"ell": r.ell, "frobenius": r.frobenius, "oracle": r.oracle,
                 "deviation": num(r.deviation), "ratio": num(r.ratio),
                 "rank_sums": {str(k): num(v) for k, v in r.rank_sums.items()}}
                for r in self.rows
            ],
        }


def sts_deviation_table(table: CharTable, g_class: int, ell_max: int = 8,
                        oracle: bool = False, require_boundary: bool = True) -> GenerationTable:
    A = table.atlas
    if require_boundary and g_class not in boundary_regular_classes(A):
        raise InvalidClass(f"class {g_class} is not regular semisimple without eigenvalue 1")
    orc = convolution_oracle(A, ell_max) if oracle else None
    csize = int(A.sizes[A.transvection_class_id])
    rows = []
    prev = None
    for ell in range(1, ell_max + 1):
        cnt = frobenius_count(table, ell, g_class)
        dev = 1 - Fraction(cnt * A.order, csize**ell)
        o = int(orc[ell][g_class]) if orc is not None else None
        if o is not None and o != cnt:
            raise ConsistencyFailure(f"Frobenius {cnt} != oracle {o} at ell={ell}")
        ratio = dev / prev if prev not in (None, 0) else None
        rows.append(GenerationRow(ell, cnt, o, dev, rank_split_sums(table, ell, g_class), ratio))
        prev = dev
    return GenerationTable(A.name, g_class, rows)


def auto_regular_class(atlas: GroupAtlas) -> int:
    cands = boundary_regular_classes(atlas)
    if not cands:
        raise InvalidClass(f"{atlas.name} has no regular semisimple class without eigenvalue 1")
    return cands[0]
