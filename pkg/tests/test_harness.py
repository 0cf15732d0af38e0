from __future__ import annotations

import numpy as np
import pytest

from dynmatch.core import Color, MatcherConfig, Point, PointRecord
from dynmatch.errors import InstanceTooLargeError
from dynmatch.exact import hungarian
from dynmatch.harness import (
    SeriesRecord,
    TripFilter,
    emit_report,
    gen_gaussian,
    gen_uniform,
    load_points_csv,
    read_points,
    read_report,
    read_updates,
    run_drift,
    write_points,
)
from dynmatch.harness.io import write_scale
from dynmatch.harness.workloads import (
    bench_speedup,
    gen_hardness_line,
    line_matching,
    matcher_class,
    plateau,
    run_hardness,
)


def test_uniform_generator():
    assert gen_uniform(0) == []
    pts = gen_uniform(5000, seed=3)
    arr = np.asarray(pts)
    assert arr.min() >= 1 and arr.max() <= 500
    assert pts == gen_uniform(5000, seed=3)
    assert pts != gen_uniform(5000, seed=4)


def test_gaussian_generator_moments():
    arr = np.asarray(gen_gaussian(100_000, seed=0))
    assert arr.min() >= 0
    assert abs(arr[:, 0].mean() - 250) < 5
    assert abs(arr[:, 0].std() - 125) < 5
    assert gen_gaussian(10, 9) == gen_gaussian(10, 9)
    assert gen_gaussian(0) == []


HEADER = ("Trip_Pickup_DateTime,Trip_Dropoff_DateTime,Trip_Distance,"
          "Start_Lon,Start_Lat,End_Lon,End_Lat\n")


def test_load_trips(tmp_path):
    path = tmp_path / "trips.csv"
    path.write_text(
        HEADER
        + "2009-01-01 10:00:00,2009-01-01 10:10:00,2.0,-74.0,40.5,-73.9,40.6\n"   # kept
        + "2009-01-01 10:00:00,2009-01-01 10:01:00,0.2,-74.0,40.5,-73.9,40.6\n"   # too short
        + "2009-01-01 10:00:00,2009-01-01 10:05:00,20.0,-74.0,40.5,-73.9,40.6\n"  # 240 mph
        + "2009-01-01 10:00:00,2009-01-01 10:10:00,2.0,-75.0,40.5,-73.9,40.6\n"   # off the box
        + "2009-01-01 10:00:00,2009-01-01 10:10:00,abc,-74.0,40.5,-73.9,40.6\n"   # malformed
        + "garbage\n"
    )
    res = load_points_csv(path)
    assert res.filtered == 3 and res.skipped == 2
    assert res.pickups == [(5000, 5000)]
    assert len(res.dropoffs) == 1
    gx, gy = res.dropoffs[0]
    # un-scaling recovers the coordinates to within one grid unit
    assert abs(res.scale.lon_origin + gx * res.scale.lon_unit - (-73.9)) <= res.scale.lon_unit
    assert abs(res.scale.lat_origin + gy * res.scale.lat_unit - 40.6) <= res.scale.lat_unit
    meta = write_scale(tmp_path / "out.csv", res.scale)
    assert "lon_unit" in meta.read_text()


def test_load_trips_empty_and_custom_columns(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    res = load_points_csv(empty)
    assert (res.pickups, res.dropoffs, res.skipped) == ([], [], 0)
    other = tmp_path / "other.csv"
    other.write_text("a,b,d,x0,y0,x1,y1\n2015-01-01T00:00:00,2015-01-01T00:20:00,1,-74,40,-74,40\n")
    filt = TripFilter("a", "b", "d", "x0", "y0", "x1", "y1")
    assert len(load_points_csv(other, filt).pickups) == 1
    with pytest.raises(OSError):
        load_points_csv(tmp_path / "missing.csv")


def test_point_files_round_trip(tmp_path):
    pts = [(1, 2), (3, 4)]
    write_points(tmp_path / "plain.csv", pts)
    assert read_points(tmp_path / "plain.csv") == (pts, None)
    write_points(tmp_path / "col.csv", pts + [(5, 6)], [Color.RED, Color.BLUE, Color.RED])
    assert read_points(tmp_path / "col.csv") == ([(1, 2), (5, 6)], [(3, 4)])
    (tmp_path / "bad.csv").write_text("x,y,color\n1,1,G\n")
    with pytest.raises(ValueError, match="R or B"):
        read_points(tmp_path / "bad.csv")


def test_updates_file(tmp_path):
    path = tmp_path / "u.csv"
    path.write_text("# comment\nI,1,2,3,4\nD,0,1\n\n")
    assert read_updates(path) == [("I", (1, 2), (3, 4)), ("D", 0, 1)]
    path.write_text("I,1,2\n")
    with pytest.raises(ValueError, match=":1:"):
        read_updates(path)


def test_report_round_trip(tmp_path):
    path = tmp_path / "r.csv"
    emit_report([], path)
    assert path.read_text().strip() == "step,n,cost,wasserstein,update_us,recourse"
    series = [SeriesRecord(1, 1, 5.0, 5.0, 12.5, 1), SeriesRecord(2, 2, 1 / 3, 1 / 6, 0.1234567, 4)]
    emit_report(series, path)
    back = read_report(path)
    assert [r.step for r in back] == [1, 2]
    assert back[1].cost == pytest.approx(1 / 3, abs=1e-6)
    assert back[1].update_us == 0.123457
    assert "0.333333" in path.read_text()


@pytest.mark.parametrize("mode", ["basic", "advanced"])
def test_drift_window_semantics(mode):
    A = gen_uniform(60, 1)
    B = gen_uniform(60, 2)
    series = run_drift(A, B, 25, MatcherConfig(p=4, seed=0), mode)
    assert len(series) == 60
    assert [r.n for r in series] == [min(s, 25) for s in range(1, 61)]
    assert all(r.wasserstein == pytest.approx(r.cost / r.n) for r in series)


def test_drift_identical_streams_cost_nothing():
    A = gen_uniform(40, 5)
    series = run_drift(A, A, 10, MatcherConfig(p=4, seed=0))
    assert all(r.wasserstein == 0.0 for r in series)


def test_drift_short_stream_and_bad_window():
    series = run_drift(gen_uniform(5, 0), gen_uniform(8, 1), 100, MatcherConfig(p=4, seed=0))
    assert len(series) == 5 and series[-1].n == 5
    with pytest.raises(ValueError):
        run_drift([], [], 0)


def test_plateau():
    s = [SeriesRecord(i, 1, 0.0, float(i), 0.0) for i in range(1, 6)]
    assert plateau(s, 3) == 4.5
    assert plateau(s, 10) == 3.0


def test_matcher_class():
    assert matcher_class("advanced").mode == "advanced"
    with pytest.raises(ValueError, match="unknown mode"):
        matcher_class("fast")


def test_bench_speedup_small():
    rows = bench_speedup([200, 400], p=4, updates=20, warmup=2)
    assert [r.n for r in rows] == [200, 400]
    for r in rows:
        assert r.agree and r.update_us > 0 and r.static_us > 0
        assert r.speedup == pytest.approx(r.static_us / r.update_us)


def test_hardness_line_layout():
    inst = gen_hardness_line(4)
    off = inst.offset
    assert off == 9
    assert [a[0] - off for a in inst.A] == [-4, -2, 0, 2]
    assert [b[0] - off for b in inst.B] == [-3, -1, 1, 3]
    assert len(inst.updates) == 4
    with pytest.raises(ValueError):
        gen_hardness_line(1)
    with pytest.raises(InstanceTooLargeError):
        gen_hardness_line(300, D=1 << 10)


def _line_cost(reds, blues):
    rr = [PointRecord(i, Point(x, 0), Point(x, 0), Color.RED) for i, x in enumerate(reds)]
    bb = [PointRecord(100 + i, Point(x, 0), Point(x, 0), Color.BLUE) for i, x in enumerate(blues)]
    return hungarian(rr, bb).cost


def test_hardness_optimal_costs():
    # before extending with points -x and x-1 the optimum is x-1; after, it is x
    n = 4
    inst = gen_hardness_line(n)
    reds = [a[0] for a in inst.A]
    blues = [b[0] for b in inst.B]
    for k, (a, b) in enumerate(inst.updates, 1):
        x = n + k
        assert _line_cost(reds, blues) == pytest.approx(x - 1)
        reds.append(a[0])
        blues.append(b[0])
        assert _line_cost(reds, blues) == pytest.approx(x)
        # line stays contiguous and alternating
        xs = sorted((v, 0) for v in reds) + sorted((v, 1) for v in blues)
        xs.sort()
        assert all(b[0] - a[0] == 1 and a[1] != b[1] for a, b in zip(xs, xs[1:]))


def test_line_matching_flips_every_edge():
    before = line_matching([0, 2], [1, 3])
    after = line_matching([0, 2, 4], [-1, 1, 3])
    assert before == {(0, 1), (2, 3)}
    assert len(before ^ after) == 5


def test_run_hardness_small():
    rows = run_hardness(30, p=4, seed=0)
    assert len(rows) == 30
    assert all(r.exact_recourse == 2 * (30 + r.step) - 1 for r in rows)
    assert all(r.recourse <= r.bound for r in rows if not r.structural)
