"""Time the hot kernels on both backends and check they agree.

    python benchmarks/bench_kernels.py --group "GL(3,3)" --repeat 3

The backend flag is flipped in-process; each kernel is warmed up once so
numba compile time is not counted.
"""

import argparse
import json
import time

import numpy as np

from rankscope import _accel, kernels
from rankscope.atlas import build_group, parse_group
from rankscope.chartable import dixon_table
from rankscope.gencount import _mult_table


def _best(fn, repeat):
    out, best = None, float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if hasattr(a, "values"):  # CharTable
        return np.allclose(a.values, b.values)
    if hasattr(a, "sizes"):  # GroupAtlas
        return np.array_equal(a.reps, b.reps) and np.array_equal(a.sizes, b.sizes)
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--group", default="GL(3,3)")
    p.add_argument("--census", default="3,4,3", help="m,n,q for the rank census")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", action="store_true")
    a = p.parse_args(argv)

    kind, n, q = parse_group(a.group)
    cm, cn, cq = (int(x) for x in a.census.split(","))
    A = build_group(kind, n, q)
    mult = _mult_table(A)
    f0 = np.zeros(A.order, dtype=np.int64)
    f0[0] = 1
    f1 = kernels.conv_step(f0, mult)

    cases = {
        "scan_group": lambda: kernels.scan_group(n, q, kind == "SL"),
        "build_group (scan + flood)": lambda: build_group(kind, n, q),
        "dixon_table (class_coefficients)": lambda: dixon_table(A),
        "conv_step": lambda: kernels.conv_step(f1, mult),
        f"rank_census {cm}x{cn} q={cq}": lambda: kernels.rank_census(cm, cn, cq),
    }
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rows = []
    for name, fn in cases.items():
        res = {}
        for flag in (True, False):
            _accel.USE_NUMBA = flag
            fn()  # warm-up / JIT
            res[flag] = _best(fn, a.repeat)
        rows.append({"kernel": name, "numba_s": res[True][0], "numpy_s": res[False][0],
                     "speedup": res[False][0] / max(res[True][0], 1e-9),
                     "agree": bool(_same(res[True][1], res[False][1]))})
    _accel.USE_NUMBA = _accel.HAVE_NUMBA

    if a.json:
        print(json.dumps({"group": A.name, "rows": rows}, indent=1))
        return
    print(f"{A.name}  |G|={A.order}  K={A.K}")
    print(f"{'kernel':36s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}  agree")
    for r in rows:
        print(f"{r['kernel']:36s} {r['numba_s']:10.4f} {r['numpy_s']:10.4f} {r['speedup']:8.1f}  {r['agree']}")


if __name__ == "__main__":
    main()
