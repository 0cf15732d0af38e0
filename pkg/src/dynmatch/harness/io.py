"""CSV ingestion and report emission."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from ..core import Color

REPORT_HEADER = ("step", "n", "cost", "wasserstein", "update_us", "recourse")


@dataclass(frozen=True)
class SeriesRecord:
    step: int
    n: int
    cost: float
    wasserstein: float
    update_us: float
    recourse: int = 0


@dataclass(frozen=True)
class TripFilter:
    """Column mapping and filter thresholds for trip records.

    Defaults follow the 2009 yellow-cab schema; override the column names for
    other layouts.
    """

    pickup_time: str = "Trip_Pickup_DateTime"
    dropoff_time: str = "Trip_Dropoff_DateTime"
    distance: str = "Trip_Distance"
    pickup_lon: str = "Start_Lon"
    pickup_lat: str = "Start_Lat"
    dropoff_lon: str = "End_Lon"
    dropoff_lat: str = "End_Lat"
    min_duration_s: float = 180.0
    max_speed_mph: float = 110.0
    lon_range: tuple[float, float] = (-74.5, -73.5)
    lat_range: tuple[float, float] = (40.0, 41.0)
    grid: int = 10_000  # integer cells per axis across the bounding box


@dataclass(frozen=True)
class AffineScale:
    """``coord = origin + unit * grid_index`` per axis (degrees per grid unit)."""

    lon_origin: float
    lat_origin: float
    lon_unit: float
    lat_unit: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class LoadResult:
    pickups: list[tuple[int, int]] = field(default_factory=list)
    dropoffs: list[tuple[int, int]] = field(default_factory=list)
    skipped: int = 0
    filtered: int = 0
    scale: AffineScale | None = None


def _parse_time(s: str) -> datetime:
    return datetime.fromisoformat(s.strip())


def load_points_csv(path: str | Path, filt: TripFilter | None = None) -> LoadResult:
    """Read trip rows, apply the duration/speed/box filters and snap to the grid.

    Malformed rows (missing or non-numeric fields, bad timestamps) are skipped
    and counted; rows failing a filter are counted separately.
    """
    filt = filt or TripFilter()
    lon0, lon1 = filt.lon_range
    lat0, lat1 = filt.lat_range
    scale = AffineScale(lon0, lat0, (lon1 - lon0) / filt.grid, (lat1 - lat0) / filt.grid)
    out = LoadResult(scale=scale)
    top = filt.grid - 1

    def snap(lon: float, lat: float) -> tuple[int, int]:
        gx = min(int((lon - lon0) / scale.lon_unit), top)
        gy = min(int((lat - lat0) / scale.lat_unit), top)
        return (gx, gy)

    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                t0 = _parse_time(row[filt.pickup_time])
                t1 = _parse_time(row[filt.dropoff_time])
                miles = float(row[filt.distance])
                coords = [float(row[c]) for c in (filt.pickup_lon, filt.pickup_lat,
                                                  filt.dropoff_lon, filt.dropoff_lat)]
            except (KeyError, TypeError, ValueError, AttributeError):
                out.skipped += 1
                continue
            if not all(math.isfinite(v) for v in (miles, *coords)):
                out.skipped += 1
                continue
            secs = (t1 - t0).total_seconds()
            plon, plat, dlon, dlat = coords
            ok = (
                secs >= filt.min_duration_s
                and miles / (secs / 3600.0) <= filt.max_speed_mph
                and lon0 <= plon <= lon1 and lon0 <= dlon <= lon1
                and lat0 <= plat <= lat1 and lat0 <= dlat <= lat1
            )
            if not ok:
                out.filtered += 1
                continue
            out.pickups.append(snap(plon, plat))
            out.dropoffs.append(snap(dlon, dlat))
    return out


def write_scale(path: str | Path, scale: AffineScale) -> Path:
    meta = Path(str(path) + ".meta.json")
    meta.write_text(json.dumps({"scale": scale.to_dict()}, indent=2) + "\n")
    return meta


def read_points(path: str | Path) -> tuple[list[tuple[int, int]], list[tuple[int, int]] | None]:
    """Read ``x,y`` rows. With a ``color`` column (R/B) return ``(reds, blues)``,
    otherwise ``(points, None)``.
    """
    reds: list[tuple[int, int]] = []
    blues: list[tuple[int, int]] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        has_color = reader.fieldnames is not None and "color" in reader.fieldnames
        for row in reader:
            pt = (int(row["x"]), int(row["y"]))
            if not has_color:
                reds.append(pt)
                continue
            c = row["color"].strip().upper()
            if c == "R":
                reds.append(pt)
            elif c == "B":
                blues.append(pt)
            else:
                raise ValueError(f"color must be R or B, got {row['color']!r}")
    return (reds, blues) if has_color else (reds, None)


def write_points(dest: str | Path | TextIO, points: Iterable[tuple[int, int]],
                 colors: Sequence[Color] | None = None) -> None:
    """Write ``x,y`` rows (plus ``color`` when given) to a path or open file."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_points(fh, points, colors)
        return
    w = csv.writer(dest)
    if colors is None:
        w.writerow(("x", "y"))
        w.writerows(points)
    else:
        w.writerow(("x", "y", "color"))
        for (x, y), c in zip(points, colors):
            w.writerow((x, y, c.code))


def read_updates(path: str | Path) -> list[tuple]:
    """Rows ``I,ax,ay,bx,by`` or ``D,idA,idB``."""
    ops: list[tuple] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or not row[0].strip() or row[0].startswith("#"):
                continue
            kind = row[0].strip().upper()
            try:
                if kind == "I" and len(row) == 5:
                    ax, ay, bx, by = (int(v) for v in row[1:])
                    ops.append(("I", (ax, ay), (bx, by)))
                elif kind == "D" and len(row) == 3:
                    ops.append(("D", int(row[1]), int(row[2])))
                else:
                    raise ValueError(row)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad update row {row!r}") from None
    return ops


def write_report(series: Iterable[SeriesRecord], fh: TextIO) -> None:
    w = csv.writer(fh)
    w.writerow(REPORT_HEADER)
    for r in series:
        w.writerow((r.step, r.n, f"{r.cost:.6f}", f"{r.wasserstein:.6f}",
                    f"{r.update_us:.6f}", r.recourse))


def emit_report(series: Iterable[SeriesRecord], path: str | Path) -> None:
    """CSV with a fixed header and six-decimal reals."""
    with open(path, "w", newline="") as fh:
        write_report(series, fh)


def read_report(path: str | Path) -> list[SeriesRecord]:
    with open(path, newline="") as fh:
        return [
            SeriesRecord(int(r["step"]), int(r["n"]), float(r["cost"]), float(r["wasserstein"]),
                         float(r["update_us"]), int(r["recourse"]))
            for r in csv.DictReader(fh)
        ]
