"""Workload drivers: generators, ingestion, drift, speedup and hardness runs."""

from .generators import gen_gaussian, gen_uniform
from .io import (
    SeriesRecord,
    TripFilter,
    emit_report,
    load_points_csv,
    read_points,
    read_report,
    read_updates,
    write_points,
)
from .workloads import (
    BenchRow,
    bench_speedup,
    gen_hardness_line,
    line_matching,
    plateau,
    run_drift,
    run_hardness,
)

__all__ = [
    "BenchRow", "SeriesRecord", "TripFilter", "bench_speedup", "emit_report",
    "gen_gaussian", "gen_hardness_line", "gen_uniform", "line_matching",
    "load_points_csv", "plateau", "read_points", "read_report", "read_updates",
    "run_drift", "run_hardness", "write_points",
]
