import json
import math

import pytest

from rankscope.atlas import get_atlas
from rankscope.chartable import get_table
from rankscope.figures import (
    HEADER, INF, KINDS, FigureDataset, emit_figure, log_base, neg_log_q, parse_csv,
    round_half_away, write_all,
)
from rankscope.ranks import get_profiles


def test_helpers():
    assert round_half_away(2.5) == 3 and round_half_away(-2.5) == -3 and round_half_away(1.49) == 1
    assert log_base(27, 3) == 3.0
    assert neg_log_q(0, 3) == INF
    assert neg_log_q(1, 3) == 0.0 and math.copysign(1, neg_log_q(1, 3)) == 1
    assert neg_log_q(-1 / 9, 3) == 2.0


@pytest.fixture(scope="module")
def gl33_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig")
    write_all(get_table(get_atlas("GL", 3, 3)), str(out), ell_max=6)
    return out


def test_all_kinds_written(gl33_dir):
    for kind in KINDS:
        text = (gl33_dir / f"{kind}.csv").read_text()
        assert text.splitlines()[0] == ",".join(HEADER)
        meta = json.loads((gl33_dir / f"{kind}.json").read_text())
        assert meta["kind"] == kind and meta["group"] == "GL(3,3)"


def test_counts_sum_to_irreps(gl33_dir):
    T = get_table(get_atlas("GL", 3, 3))
    for kind in KINDS:
        if kind == "sts_deviation":
            continue
        rows = parse_csv((gl33_dir / f"{kind}.csv").read_text())
        assert sum(r[2] for r in rows) == T.R


def test_trivial_irrep_at_origin(gl33_dir):
    rows = parse_csv((gl33_dir / "cr_vs_dim.csv").read_text())
    assert rows[0][:2] == (0, 0) and rows[0][3:] == (0.0, 0.0)


def test_top_rank_ratio(gl33_dir):
    # tensor rank n is the cuspidal family, with |CR| = 1/(q^{n-1} - 1)
    rows = parse_csv((gl33_dir / "cr_vs_trank.csv").read_text())
    top = [r for r in rows if r[0] == 3]
    assert top and all(abs(r[4] - math.log(8, 3)) < 1e-9 for r in top)


def test_sts_deviation_uses_sl(gl33_dir):
    meta = json.loads((gl33_dir / "sts_deviation.json").read_text())
    assert meta["sl_group"] == "SL(3,3)"
    assert meta["deviation_exact"][:3] == ["1", "1", "61/169"]
    rows = parse_csv((gl33_dir / "sts_deviation.csv").read_text())
    assert [r[0] for r in rows] == list(range(1, 7))
    assert rows[0][1] == 0 and rows[0][4] == 0.0


def test_infinite_ratio_sentinel():
    T = get_table(get_atlas("GL", 3, 2))
    ds = emit_figure(get_profiles(T), "cr_vs_urank", 2, "GL(3,2)")
    # the dimension-6 irrep vanishes at the transvection
    assert any(r[1] == INF and r[4] == INF for r in ds.rows)
    assert parse_csv(ds.to_csv()) == ds.rows


def test_roundtrip_and_unknown_kind(tmp_path):
    ds = FigureDataset("dim_vs_trank", "G", [(0, 0, 1, 0, 0.0), (1, 2, 3, 1, 1.892789260714)], {"a": 1})
    ds.write(str(tmp_path))
    assert parse_csv((tmp_path / "dim_vs_trank.csv").read_text()) == ds.rows
    with pytest.raises(ValueError):
        emit_figure([], "nope", 2, "G")
    with pytest.raises(ValueError):
        emit_figure([], "sts_deviation", 2, "G")
    with pytest.raises(ValueError):
        parse_csv("a,b\n1,2\n")
