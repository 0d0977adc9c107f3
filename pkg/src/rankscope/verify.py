"""Invariant suite for one group: every module's checks, collected into a report."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .atlas import GroupAtlas, boundary_regular_classes, get_atlas
from .chartable import CharTable, get_table, is_cuspidal
from .errors import BudgetExceeded, ConsistencyFailure, NumericalGuard

FAILURES = (ConsistencyFailure, NumericalGuard)


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    finding: bool = False  # reported observation, never a failure
    seconds: float = 0.0


@dataclass
class VerifyReport:
    group: str
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks if not c.finding)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.ok and not c.finding]

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "ok": self.ok,
            "checks": [vars(c) for c in self.checks],
        }


class _Runner:
    def __init__(self, report: VerifyReport):
        self.report = report

    def run(self, name, fn):
        t = time.perf_counter()
        try:
            res = fn()
        except FAILURES as e:
            self.report.checks.append(Check(name, False, f"{type(e).__name__}: {e}",
                                            seconds=time.perf_counter() - t))
            return None
        if isinstance(res, Check):
            res.seconds = time.perf_counter() - t
            self.report.checks.append(res)
        else:
            ok, detail = res
            self.report.checks.append(Check(name, bool(ok), detail, seconds=time.perf_counter() - t))
        return res

    def finding(self, name, detail):
        self.report.checks.append(Check(name, True, detail, finding=True))


def _table_checks(r: _Runner, T: CharTable):
    A = T.atlas
    r.run("sum_dim_squared", lambda: (sum(int(d) ** 2 for d in T.dims) == A.order,
                                     f"sum dim^2 vs |G| = {A.order}"))

    def orth():
        rr, cr = T.orthogonality_residuals()
        return rr < 1e-9 and cr < 1e-9, f"row {rr:.2e}, column {cr:.2e}"

    r.run("orthogonality", orth)

    def bound():
        lim = math.factorial(A.n)
        reg = [c for c, f in enumerate(A.flags) if f.regular_semisimple]
        worst = float(np.abs(T.values[:, reg]).max()) if reg else 0.0
        return worst <= lim + 1e-9, f"max |chi| on regular semisimple classes {worst:.3f} <= {lim}"

    r.run("regular_semisimple_bound", bound)


def _rank_checks(r: _Runner, T: CharTable):
    from .ranks import build_u_structure, get_profiles, orbit_ft_matrix

    A = T.atlas

    def ustruct():
        u = build_u_structure(A.n, A.q, A.kind)
        F = orbit_ft_matrix(u)
        ok = int(u.rank_sizes.sum()) == u.size and np.array_equal(F[0], u.rank_sizes) and np.all(F[:, 0] == 1)
        return ok, f"orbit sizes {u.rank_sizes.tolist()}"

    r.run("u_structure", ustruct)
    prof = r.run("profiles", lambda: Check("profiles", True, f"{len(get_profiles(T))} irreps"))
    if prof is None:
        return None
    P = get_profiles(T)
    r.run("trivial_ranks", lambda: (P[0].u_rank == 0 and P[0].tensor_rank == 0
                                    and P[0].strict_tensor_rank == 0, "trivial irrep has rank 0"))
    r.run("rank_bounds", lambda: (all(0 <= p.tensor_rank <= p.strict_tensor_rank <= A.n for p in P),
                                  "0 <= tensor rank <= strict rank <= n"))
    if A.kind == "GL":
        def twist():
            from .ranks import twist_partners

            tw = twist_partners(T)
            bad = [i for i in range(T.R) for j in tw[i]
                   if P[int(j)].u_rank != P[i].u_rank or P[int(j)].tensor_rank != P[i].tensor_rank]
            return not bad, f"{len(bad)} twist pairs disagree"

        r.run("twist_invariance", twist)
        r.run("integral_multiplicities", lambda: (
            all(isinstance(x, int) and x >= 0 for p in P for x in p.m), "m_r are nonnegative integers"))
    return P


def _gl_checks(r: _Runner, T: CharTable, P):
    from .eta import corank_fact_check, eta_report
    from .ranks import agreement_check, count_windows, filtration_chain

    A = T.atlas
    n, q = A.n, A.q
    r.run("filtration", lambda: (True, "sizes " + str([len(s) for s in filtration_chain(T)])))

    def agreement():
        rows = agreement_check(T)
        for row in rows:
            if not row.equal:
                r.finding(f"agreement_k{row.k}", f"tensor-only {row.only_tensor}, U-only {row.only_u}")
        return True, f"containment holds for k < {n // 2}"

    r.run("agreement_containment", agreement)

    def top_cr():
        bad = [p.irrep for p in P if p.tensor_rank == n and p.cr != Fraction(-1, q ** (n - 1) - 1)]
        return not bad, f"tensor-rank-{n} irreps off -1/(q^(n-1)-1): {bad}"

    r.run("top_rank_cr", top_cr)

    def cusp():
        c = [i for i in range(T.R) if is_cuspidal(T, i)]
        bad = [i for i in c if P[i].tensor_rank != n]
        return not bad, f"cuspidal {c}, not of tensor rank n: {bad}"

    r.run("cuspidal_top_rank", cusp)

    def corank():
        rows = corank_fact_check(T)
        bad = [list(x.D) for x in rows if not x.holds]
        if bad:
            r.finding("corank_deviation", f"partitions off n - d_1: {bad}")
        return True, f"{len(rows)} partitions, {len(bad)} deviations"

    r.run("sps_corank", corank)
    for k in range(1, n // 2 + 1):
        r.run(f"eta_k{k}", lambda k=k: _eta(eta_report(T, k)))
    win = count_windows(T)
    r.finding("count_windows", str({"tensor": [(w["k"], w["count"], w["lead"]) for w in win["tensor"]],
                                    "u": [(w["k"], w["count"], w["lead"]) for w in win["u"]]}))


def _eta(rep):
    ok = rep.injective and rep.completeness_error < 1e-6
    return ok, f"eta {rep.eta}, missing {rep.exhaustion_missing}, completeness {rep.completeness_error:.1e}"


def _count_checks(r: _Runner, T: CharTable, ell_max: int):
    from .gencount import convolution_oracle, frobenius_count, rank_one_sum_check

    A = T.atlas

    def oracle():
        f = convolution_oracle(A, ell_max)
        bad = [(l, c) for l in range(1, ell_max + 1) for c in range(A.K)
               if frobenius_count(T, l, c) != int(f[l][c])]
        return not bad, f"Frobenius vs convolution, l <= {ell_max}: {len(bad)} mismatches"

    try:
        r.run("frobenius_oracle", oracle)
    except BudgetExceeded as e:
        r.finding("frobenius_oracle", f"skipped: {e}")

    def short_words():
        bad = [(l, c) for c in boundary_regular_classes(A) for l in range(1, A.n)
               if frobenius_count(T, l, c) != 0]
        return not bad, f"nonzero counts below length n: {bad}"

    r.run("short_words_vanish", short_words)
    if A.kind == "SL" and A.n >= 3:
        def rank_one():
            rep = rank_one_sum_check(T)
            vals = sorted({str(x.total) for x in rep.free_rows})
            if not rep.stated_holds:
                r.finding("rank_one_sum_minus_two",
                          f"sum over rank-one irreps at eigenvalue-1-free classes is {vals}, not -2")
            return True, f"fixed-point identity holds on {len(rep.rows)} classes"

        r.run("rank_one_sum", rank_one)


def _ft_checks(r: _Runner, n: int, q: int):
    from .matrix_ft import exhaustive_counts, count_rank_k_orthogonal, ft_report, positivity_report

    def grid():
        top = min(n, 4)
        cnt = 0
        for nn in range(1, top + 1):
            for m in range(1, nn + 1):
                for k in range(1, m + 1):
                    brute = q ** (m * nn) <= 1 << 20
                    ft_report(m, nn, k, q, brute=brute)
                    if brute and exhaustive_counts(m, nn, k, q) != count_rank_k_orthogonal(m, nn, k, q):
                        raise ConsistencyFailure(f"orthogonal counts differ at {(m, nn, k, q)}")
                    cnt += 1
        return True, f"{cnt} (m,n,k) cells"

    r.run("ft_grid", grid)
    if n >= 2:
        r.run("positivity", lambda: (all(x.in_window in (True, None) for x in positivity_report(n, q)),
                                     "rank-r Fourier values at a rank-one matrix"))


def verify_group(kind: str, n: int, q: int, ell_max: int = 8) -> VerifyReport:
    """Run everything that applies to GL/SL(n, q). BudgetExceeded propagates."""
    A: GroupAtlas = get_atlas(kind, n, q)
    rep = VerifyReport(A.name)
    r = _Runner(rep)
    T = get_table(A)
    _table_checks(r, T)
    P = _rank_checks(r, T)
    if A.kind == "GL" and P is not None:
        _gl_checks(r, T, P)
    if P is not None:
        _count_checks(r, T, ell_max)
    _ft_checks(r, n, q)
    return rep
