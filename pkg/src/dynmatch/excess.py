"""Implicit, pointer-based representation of a node's excess set.

A descriptor is an ordered list of parts ``(source, skip, take)``. The source is
either a child's descriptor or a plain id list (leaves). The part contributes
``source[skip : skip + take]``. Descriptors are never mutated, so a parent's
old descriptor stays readable after its children have moved on.
"""

from __future__ import annotations

import bisect
from typing import Iterator, Sequence, Union

from .core import Color
from .errors import InvariantError

Source = Union["ExcessDescriptor", Sequence[int]]


class ExcessDescriptor:
    __slots__ = ("color", "total", "parts", "_cum")

    def __init__(self, color: Color, parts: Sequence[tuple[Source, int, int]] = ()) -> None:
        self.color = color
        self.parts = [pt for pt in parts if pt[2] > 0]
        cum = []
        acc = 0
        for source, skip, take in self.parts:
            if skip < 0 or skip + take > len(source):
                raise InvariantError(f"part window [{skip}, {skip + take}) exceeds source")
            acc += take
            cum.append(acc)
        self._cum = cum
        self.total = acc

    @classmethod
    def from_ids(cls, color: Color, ids: Sequence[int]) -> "ExcessDescriptor":
        return cls(color, [(list(ids), 0, len(ids))])

    @classmethod
    def empty(cls, color: Color = Color.RED) -> "ExcessDescriptor":
        return cls(color)

    def __len__(self) -> int:
        return self.total

    def __bool__(self) -> bool:
        return self.total > 0

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.total
        if not 0 <= i < self.total:
            raise IndexError(i)
        k = bisect.bisect_right(self._cum, i)
        source, skip, take = self.parts[k]
        before = self._cum[k] - take
        return source[skip + i - before]

    def slice(self, start: int, stop: int) -> list[int]:
        """Materialize positions ``[start, stop)`` (clamped)."""
        start = max(start, 0)
        stop = min(stop, self.total)
        out: list[int] = []
        if start >= stop:
            return out
        k = bisect.bisect_right(self._cum, start)
        pos = self._cum[k - 1] if k else 0
        while pos < stop:
            source, skip, take = self.parts[k]
            lo = max(start - pos, 0)
            hi = min(stop - pos, take)
            if isinstance(source, ExcessDescriptor):
                out.extend(source.slice(skip + lo, skip + hi))
            else:
                out.extend(source[skip + lo: skip + hi])
            pos += take
            k += 1
        return out

    def ids(self) -> list[int]:
        return self.slice(0, self.total)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ids())

    def __repr__(self) -> str:
        return f"ExcessDescriptor({self.color.name}, total={self.total}, parts={len(self.parts)})"
