"""Fully enumerated GL_n(F_q) / SL_n(F_q) with conjugacy-class data."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache, cached_property

import numpy as np

from . import kernels
from .errors import BudgetExceeded, InvalidClass, UnsupportedField
from .gf import (
    SUPPORTED_Q, MatFq, build_field, char_poly, f_basis_over_prime, inverse, pack, transvection, unpack,
)

CODE_SPACE_CAP = 1 << 28
ELEMENT_CAP = 30_000_000

ROSTER = (
    [("GL", 2, q) for q in SUPPORTED_Q] + [("SL", 2, q) for q in SUPPORTED_Q]
    + [(k, n, q) for (n, q) in ((3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (5, 2)) for k in ("GL", "SL")]
)


def gl_order(n: int, q: int) -> int:
    r = q ** (n * (n - 1) // 2)
    for a in range(1, n + 1):
        r *= q**a - 1
    return r


def group_order(kind: str, n: int, q: int) -> int:
    o = gl_order(n, q)
    return o if kind == "GL" else o // (q - 1)


_SPEC = re.compile(r"^\s*(GL|SL)\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$", re.IGNORECASE)


def parse_group(text: str) -> tuple[str, int, int]:
    """``"GL(3,2)"`` -> ``("GL", 3, 2)``."""
    m = _SPEC.match(text)
    if not m:
        raise ValueError(f"bad group spec {text!r}; expected GL(n,q) or SL(n,q)")
    return m.group(1).upper(), int(m.group(2)), int(m.group(3))


@dataclass(frozen=True)
class ClassFlags:
    regular_semisimple: bool
    fixes_no_vector: bool


@dataclass(eq=False)
class GroupAtlas:
    kind: str
    n: int
    q: int
    elements: np.ndarray  # sorted codes
    class_map: np.ndarray  # dense over code space, -1 off-group
    reps: np.ndarray  # representative code per class (smallest member)
    sizes: np.ndarray
    orders: np.ndarray
    inverse_class: np.ndarray
    power_class: list  # power_class[c][k] = class of rep_c^k, k mod order
    transvection_class_id: int
    _members: dict = field(default_factory=dict, repr=False)

    @property
    def name(self) -> str:
        return f"{self.kind}({self.n},{self.q})"

    @property
    def order(self) -> int:
        return int(self.elements.shape[0])

    @property
    def K(self) -> int:
        return int(self.reps.shape[0])

    @cached_property
    def exponent(self) -> int:
        return int(np.lcm.reduce(self.orders))

    @property
    def field(self):
        return build_field(self.q)

    @property
    def tables(self) -> kernels.VecTables:
        return kernels.vec_tables(self.n, self.q)

    def rep(self, c: int) -> MatFq:
        return MatFq.from_code(int(self.reps[c]), self.n, self.n, self.q)

    def rep_matrix(self, c: int) -> np.ndarray:
        return unpack(int(self.reps[c]), self.n, self.n, self.q)

    def class_of(self, m) -> int:
        code = m.code if isinstance(m, MatFq) else pack(m, self.q)
        c = int(self.class_map[code])
        if c < 0:
            raise InvalidClass(f"matrix is not in {self.name}")
        return c

    @cached_property
    def _class_sort(self):
        cls = self.class_map[self.elements]
        order = np.argsort(cls, kind="stable")
        bounds = np.searchsorted(cls[order], np.arange(self.K + 1))
        return order, bounds

    def members(self, c: int) -> np.ndarray:
        """Sorted codes of every element in class c."""
        if c not in self._members:
            order, bounds = self._class_sort
            self._members[c] = self.elements[order[bounds[c]:bounds[c + 1]]]
        return self._members[c]

    def power(self, c: int, k: int) -> int:
        pc = self.power_class[c]
        return int(pc[k % len(pc)])

    def index_of(self, codes: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.elements, codes)

    @cached_property
    def flags(self) -> list[ClassFlags]:
        return classify_elements(self)

    @cached_property
    def kernel_dims(self) -> np.ndarray:
        """dim ker(rep(c) - I) for every class."""
        I = MatFq.identity(self.n, self.q)
        return np.array([(self.rep(c) - I).kernel_dim() for c in range(self.K)], dtype=np.int64)

    @cached_property
    def centralizer_orders(self) -> np.ndarray:
        return self.order // self.sizes

    def check_code_space(self):
        return self.q ** (self.n * self.n)


def _elementary(n: int, i: int, j: int, a: int) -> np.ndarray:
    e = np.eye(n, dtype=np.int64)
    e[i, j] = a
    return e


def _generators(kind: str, n: int, q: int) -> list[np.ndarray]:
    F = build_field(q)
    gens = []
    for a in f_basis_over_prime(F):
        for i in range(n - 1):
            gens.append(_elementary(n, i, i + 1, a))
            gens.append(_elementary(n, i + 1, i, a))
    if kind == "GL" and q > 2:
        d = np.eye(n, dtype=np.int64)
        d[0, 0] = F.generator
        gens.append(d)
    return gens


def _element_order(T: kernels.VecTables, code: int, mat: np.ndarray, ident: int) -> list[int]:
    """Codes of mat^0, mat^1, ..., mat^{o-1}."""
    seq = [ident]
    x = np.array([code], dtype=np.int64)
    while int(x[0]) != ident:
        seq.append(int(x[0]))
        x = kernels.right_mul(T, x, mat)
    return seq


def build_group(kind: str, n: int, q: int, code_space_cap: int = CODE_SPACE_CAP,
                element_cap: int = ELEMENT_CAP) -> GroupAtlas:
    kind = kind.upper()
    if kind not in ("GL", "SL"):
        raise ValueError(f"kind must be GL or SL, got {kind}")
    if q not in SUPPORTED_Q:
        raise UnsupportedField(f"q={q} not in {SUPPORTED_Q}")
    if n < 1:
        raise ValueError("n must be positive")
    space = q ** (n * n)
    if space > code_space_cap:
        raise BudgetExceeded("code_space", space, code_space_cap)
    size = group_order(kind, n, q)
    if size > element_cap:
        raise BudgetExceeded("elements", size, element_cap)

    F = build_field(q)
    T = kernels.vec_tables(n, q)
    elems = kernels.scan_group(n, q, want_sl=(kind == "SL"))
    assert elems.shape[0] == size, (elems.shape[0], size)

    class_map = np.full(space, -1, dtype=np.int32)
    gens = _generators(kind, n, q)
    ginvs = [inverse(F, g) for g in gens]
    K = kernels.flood_classes(T, elems, class_map, gens, ginvs)

    prov = class_map[elems]
    sizes = np.bincount(prov, minlength=K).astype(np.int64)
    first = np.full(K, -1, dtype=np.int64)
    # elems sorted, so the first hit is the smallest member
    idx = np.unique(prov, return_index=True)[1]
    first[np.arange(K)] = elems[idx]

    ident = pack(np.eye(n, dtype=np.int64), q)
    powers = []
    for c in range(K):
        powers.append(_element_order(T, int(first[c]), unpack(int(first[c]), n, n, q), ident))
    orders = np.array([len(p) for p in powers], dtype=np.int64)

    perm = sorted(range(K), key=lambda c: (int(orders[c]), int(sizes[c]), int(first[c])))
    new_id = np.empty(K, dtype=np.int32)
    new_id[perm] = np.arange(K, dtype=np.int32)
    live = class_map >= 0
    class_map[live] = new_id[class_map[live]]

    reps = first[perm]
    sizes = sizes[perm]
    orders = orders[perm]
    power_class = [class_map[np.array(powers[c], dtype=np.int64)].astype(np.int64) for c in perm]
    inv_codes = np.array([pack(inverse(F, unpack(int(r), n, n, q)), q) for r in reps], dtype=np.int64)
    inverse_class = class_map[inv_codes].astype(np.int64)
    t_id = int(class_map[transvection(n, q).code]) if n >= 2 else -1

    return GroupAtlas(
        kind=kind, n=n, q=q, elements=elems, class_map=class_map, reps=reps, sizes=sizes,
        orders=orders, inverse_class=inverse_class, power_class=power_class,
        transvection_class_id=t_id,
    )


@lru_cache(maxsize=8)
def get_atlas(kind: str, n: int, q: int) -> GroupAtlas:
    """Memoised :func:`build_group` with default budgets."""
    return build_group(kind.upper(), n, q)


def transvection_class(atlas: GroupAtlas) -> tuple[int, int]:
    c = atlas.transvection_class_id
    return c, int(atlas.sizes[c])


def classify_elements(atlas: GroupAtlas) -> list[ClassFlags]:
    F = atlas.field
    out = []
    for c in range(atlas.K):
        cp = char_poly(F, atlas.rep_matrix(c))
        out.append(ClassFlags(cp.is_squarefree(), cp(1) != 0))
    return out


def boundary_regular_classes(atlas: GroupAtlas) -> list[int]:
    """Classes that are regular semisimple with no eigenvalue 1."""
    return [c for c, f in enumerate(atlas.flags) if f.regular_semisimple and f.fixes_no_vector]


def power_and_inverse_maps(atlas: GroupAtlas) -> tuple[np.ndarray, list]:
    return atlas.inverse_class, atlas.power_class
