"""CSV datasets for the plot families, at whatever (n, q) fits in memory."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from collections import Counter
from dataclasses import dataclass, field

from .ranks import RankProfile

KINDS = ("cr_vs_dim", "cr_vs_urank", "cr_vs_trank", "dim_vs_urank", "dim_vs_trank",
         "count_by_rank", "sts_deviation")

HEADER = ("x", "y", "count", "raw_x", "raw_y")
INF = "inf"


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def log_base(x: float, base: float) -> float:
    # rounded so equal exact inputs aggregate into one row
    return round(math.log(x) / math.log(base), 12)


def neg_log_q(x: float, q: int) -> float | str:
    """log_{1/q}|x|, with ``inf`` for x = 0."""
    a = abs(x)
    if a < 1e-12:
        return INF
    return 0.0 - log_base(a, q)  # avoids -0.0 at |x| = 1


@dataclass
class FigureDataset:
    kind: str
    group: str
    rows: list  # (x, y, count, raw_x, raw_y)
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(HEADER)
        for x, y, c, rx, ry in self.rows:
            w.writerow([x, y, c, _fmt(rx), _fmt(ry)])
        return buf.getvalue()

    def write(self, outdir: str) -> list[str]:
        os.makedirs(outdir, exist_ok=True)
        base = os.path.join(outdir, self.kind)
        with open(base + ".csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())
        with open(base + ".json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.meta, fh, indent=2)
            fh.write("\n")
        return [base + ".csv", base + ".json"]


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def parse_csv(text: str) -> list[tuple]:
    """Inverse of :meth:`FigureDataset.to_csv` on the raw columns."""
    def num(s):
        if s == INF:
            return INF
        try:
            return int(s)
        except ValueError:
            return float(s)

    rows = list(csv.reader(io.StringIO(text)))
    if tuple(rows[0]) != HEADER:
        raise ValueError(f"unexpected header {rows[0]}")
    return [(num(x), num(y), int(c), num(rx), num(ry)) for x, y, c, rx, ry in rows[1:]]


def _aggregate(points: list[tuple]) -> list[tuple]:
    """points are (x, y, raw_x, raw_y); identical raw pairs collapse into one counted row."""
    counts = Counter(points)
    return [(x, y, c, rx, ry) for (x, y, rx, ry), c in
            sorted(counts.items(), key=lambda kv: (kv[0][0], _sort_y(kv[0][1]), _sort_y(kv[0][3]), kv[0][2]))]


def _sort_y(y):
    return math.inf if y == INF else y


def _y_of(raw):
    return INF if raw == INF else round_half_away(raw)


def _cr_abs(p: RankProfile) -> float:
    return abs(float(p.cr)) if p.cr is not None else abs(p.cr_value)


def emit_figure(profiles: list[RankProfile], kind: str, q: int, group: str, sts=None) -> FigureDataset:
    """Dataset for one figure kind. ``sts`` is a GenerationTable for the deviation plot."""
    if kind not in KINDS:
        raise ValueError(f"unknown figure kind {kind}")
    pts = []
    if kind == "sts_deviation":
        if sts is None:
            raise ValueError("sts_deviation needs a generation table")
        for r in sts.rows:
            ry = neg_log_q(float(r.deviation), q)
            pts.append((r.ell, _y_of(ry), r.ell, ry))
    elif kind == "count_by_rank":
        # y is log_q of the count; ranks with no irreps are omitted
        per = Counter(p.tensor_rank for p in profiles)
        for k, c in sorted(per.items()):
            pts.extend([(k, round_half_away(log_base(c, q)), k, log_base(c, q))] * c)
    else:
        for p in profiles:
            lq_dim = log_base(p.dim, q)
            lcr = neg_log_q(_cr_abs(p), q)
            if kind == "cr_vs_dim":
                pts.append((round_half_away(lq_dim), _y_of(lcr), lq_dim, lcr))
            elif kind == "cr_vs_urank":
                pts.append((p.u_rank, _y_of(lcr), p.u_rank, lcr))
            elif kind == "cr_vs_trank":
                pts.append((p.tensor_rank, _y_of(lcr), p.tensor_rank, lcr))
            elif kind == "dim_vs_urank":
                pts.append((p.u_rank, round_half_away(lq_dim), p.u_rank, lq_dim))
            elif kind == "dim_vs_trank":
                pts.append((p.tensor_rank, round_half_away(lq_dim), p.tensor_rank, lq_dim))
    meta = {
        "kind": kind,
        "group": group,
        "q": q,
    }
    if kind == "count_by_rank":
        meta["rank"] = "tensor"
        meta["u_rank_counts"] = dict(sorted(Counter(str(p.u_rank) for p in profiles).items()))
    if kind == "sts_deviation":
        meta["sl_group"] = sts.group
        meta["g_class"] = sts.g_class
        meta["deviation_exact"] = [str(r.deviation) for r in sts.rows]
    return FigureDataset(kind, group, _aggregate(pts), meta)


def write_all(table, outdir: str, ell_max: int = 8) -> list[str]:
    """All seven datasets for the group of ``table``; the deviation plot uses SL of the same (n, q)."""
    from .atlas import get_atlas
    from .chartable import get_table
    from .gencount import auto_regular_class, sts_deviation_table
    from .ranks import get_profiles

    A = table.atlas
    prof = get_profiles(table)
    sl = table if A.kind == "SL" else get_table(get_atlas("SL", A.n, A.q))
    sts = sts_deviation_table(sl, auto_regular_class(sl.atlas), ell_max)
    paths = []
    for kind in KINDS:
        ds = emit_figure(prof, kind, A.q, A.name, sts=sts if kind == "sts_deviation" else None)
        paths += ds.write(outdir)
    return paths
