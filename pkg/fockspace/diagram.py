"""Extended Young diagrams of arbitrary charge.

A diagram of charge ``n`` is a weakly increasing column-depth sequence
``y_0 <= y_1 <= ...`` that is eventually constant at ``n``.  Only the prefix
of columns strictly below the charge is stored; ``y_k = n`` for every later
column.

Corner sites
------------
Column ``k`` carries a concave corner on diagonal ``k + y_k`` when ``k == 0``
or ``y_{k-1} < y_k``, and a convex corner on diagonal ``k + y_k + 1`` when
``y_k < y_{k+1}``.  Adding a box at a concave corner decrements ``y_k``;
removing one at a convex corner increments it.

Occupation numbers follow the fermionic picture: ``m_i = 0`` exactly when
``i = k + y_k + 1`` for some column ``k``.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterator

from fockspace.errors import DiagramError

logger = logging.getLogger(__name__)


class CornerKind(str, Enum):
    CONCAVE = "concave"
    CONVEX = "convex"


class Direction(str, Enum):
    ADD = "add"
    REMOVE = "remove"


@dataclass(frozen=True)
class Corner:
    column: int
    diagonal: int
    kind: CornerKind


@dataclass(frozen=True)
class Diagram:
    """Canonical extended Young diagram (trailing columns equal to the charge trimmed)."""

    charge: int
    cols: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        cols = tuple(self.cols)
        object.__setattr__(self, "cols", cols)
        for k, depth in enumerate(cols):
            if depth >= self.charge:
                raise DiagramError(
                    f"column {k} has depth {depth}, not below the charge {self.charge}"
                )
            if k and cols[k - 1] > depth:
                raise DiagramError(f"columns are not weakly increasing at column {k}")

    @classmethod
    def vacuum(cls, charge: int) -> "Diagram":
        return cls(charge, ())

    @classmethod
    def from_columns(cls, charge: int, cols) -> "Diagram":
        """Build a diagram from any finite column prefix, trimming columns equal to the charge."""
        cols = list(cols)
        while cols and cols[-1] == charge:
            cols.pop()
        return cls(charge, tuple(cols))

    # -- basic data ---------------------------------------------------------

    def depth(self, k: int) -> int:
        return self.cols[k] if k < len(self.cols) else self.charge

    @property
    def box_count(self) -> int:
        return sum(self.charge - depth for depth in self.cols)

    @property
    def sort_key(self) -> tuple[int, int, tuple[int, ...]]:
        return (self.charge, self.box_count, self.cols)

    def boxes(self) -> Iterator[tuple[int, int]]:
        """Yield every box as ``(column, slot)`` with ``y_k < slot <= n``."""
        for k, depth in enumerate(self.cols):
            for p in range(depth + 1, self.charge + 1):
                yield k, p

    # -- corners and occupation ---------------------------------------------

    @cached_property
    def corners(self) -> tuple[Corner, ...]:
        found: list[Corner] = []
        width = len(self.cols)
        for k in range(width + 1):
            depth = self.depth(k)
            if k == 0 or self.depth(k - 1) < depth:
                found.append(Corner(k, k + depth, CornerKind.CONCAVE))
            if k < width and depth < self.depth(k + 1):
                found.append(Corner(k, k + depth + 1, CornerKind.CONVEX))
        found.sort(key=lambda corner: corner.diagonal)
        return tuple(found)

    @cached_property
    def _corner_index(self) -> dict[int, Corner]:
        return {corner.diagonal: corner for corner in self.corners}

    def corner_at(self, diagonal: int) -> Corner | None:
        return self._corner_index.get(diagonal)

    def status(self, diagonal: int) -> CornerKind | None:
        corner = self._corner_index.get(diagonal)
        return corner.kind if corner else None

    @cached_property
    def _holes(self) -> frozenset[int]:
        return frozenset(k + depth + 1 for k, depth in enumerate(self.cols))

    def occupation(self, i: int) -> int:
        if i >= len(self.cols) + self.charge + 1 or i in self._holes:
            return 0
        return 1

    def occupation_string(self, lo: int, hi: int) -> str:
        return "".join(str(self.occupation(i)) for i in range(lo, hi + 1))

    # -- mutation -----------------------------------------------------------

    def mutate(self, diagonal: int, direction: Direction) -> "Diagram | None":
        corner = self._corner_index.get(diagonal)
        if corner is None:
            return None
        cols = list(self.cols)
        k = corner.column
        if direction is Direction.ADD:
            if corner.kind is not CornerKind.CONCAVE:
                return None
            if k == len(cols):
                cols.append(self.charge - 1)
            else:
                cols[k] -= 1
        else:
            if corner.kind is not CornerKind.CONVEX:
                return None
            cols[k] += 1
        return Diagram.from_columns(self.charge, cols)

    # -- text ---------------------------------------------------------------

    def __str__(self) -> str:
        return f"{self.charge};" + ",".join(str(depth) for depth in self.cols)

    def to_dict(self, window: tuple[int, int] | None = None) -> dict:
        out = {
            "diagram": str(self),
            "boxes": self.box_count,
            "concave": [c.diagonal for c in self.corners if c.kind is CornerKind.CONCAVE],
            "convex": [c.diagonal for c in self.corners if c.kind is CornerKind.CONVEX],
        }
        if window is not None:
            out["occupation"] = self.occupation_string(*window)
        return out


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def corners(diagram: Diagram) -> list[Corner]:
    return list(diagram.corners)


def occupation(diagram: Diagram, i: int) -> int:
    return diagram.occupation(i)


def mutate_box(diagram: Diagram, diagonal: int, direction: Direction) -> Diagram | None:
    """Add or remove the box at ``diagonal``; ``None`` when the corner is absent."""
    return diagram.mutate(diagonal, direction)


def partitions(total: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield the partitions of ``total`` as non-increasing tuples."""
    if largest is None:
        largest = total
    if total == 0:
        yield ()
        return
    for part in range(min(total, largest), 0, -1):
        for rest in partitions(total - part, part):
            yield (part,) + rest


def enumerate_diagrams(charge: int, max_boxes: int) -> list[Diagram]:
    """All diagrams of ``charge`` with at most ``max_boxes`` boxes, ordered by (boxes, cols)."""
    if max_boxes < 0:
        raise DiagramError(f"max_boxes must be non-negative, got {max_boxes}")
    found: list[Diagram] = []
    for boxes in range(max_boxes + 1):
        level = [Diagram(charge, tuple(charge - part for part in shape)) for shape in partitions(boxes)]
        level.sort(key=lambda diagram: diagram.cols)
        found.extend(level)
    logger.debug("enumerated %d diagrams of charge %d with <= %d boxes", len(found), charge, max_boxes)
    return found


def fold_pi(j: int, l: int) -> int:
    """The 2l-periodic folding map Z -> {0, ..., l} with pi(i) = pi(2l - i) = i."""
    if l < 2:
        raise DiagramError(f"rank must be at least 2, got {l}")
    reduced = j % (2 * l)
    return reduced if reduced <= l else 2 * l - reduced


def color_counts(diagram: Diagram, l: int) -> tuple[int, ...]:
    """Number of boxes of each folded color; box ``(k, p)`` has color ``pi(k + p)``."""
    counts = Counter(fold_pi(k + p, l) for k, p in diagram.boxes())
    return tuple(counts.get(i, 0) for i in range(l + 1))


def color_character(charge: int, max_boxes: int, l: int) -> dict[tuple[int, ...], int]:
    """Multiplicity of each color vector among diagrams with at most ``max_boxes`` boxes.

    Keys are ordered by box count, then lexicographically.
    """
    counts = Counter(color_counts(diagram, l) for diagram in enumerate_diagrams(charge, max_boxes))
    return {vector: counts[vector] for vector in sorted(counts, key=lambda v: (sum(v), v))}


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def _read_int(text: str, start: int, end: int) -> int:
    token = text[start:end].strip()
    if not token:
        raise DiagramError("expected an integer", position=start)
    body = token[1:] if token[0] in "+-" else token
    if not body.isdigit():
        raise DiagramError(f"invalid integer {token!r}", position=start)
    return int(token)


def diagram_parse(text: str) -> Diagram:
    """Parse ``<charge>;<y_0>,<y_1>,...``."""
    sep = text.find(";")
    if sep < 0:
        raise DiagramError("expected ';' after the charge", position=len(text))
    charge = _read_int(text, 0, sep)
    cols: list[int] = []
    body_start = sep + 1
    if text[body_start:].strip():
        start = body_start
        while True:
            comma = text.find(",", start)
            end = len(text) if comma < 0 else comma
            depth = _read_int(text, start, end)
            if depth >= charge:
                raise DiagramError(
                    f"column depth {depth} is not below the charge {charge}", position=start
                )
            if cols and cols[-1] > depth:
                raise DiagramError("columns are not weakly increasing", position=start)
            cols.append(depth)
            if comma < 0:
                break
            start = comma + 1
    return Diagram(charge, tuple(cols))


def diagram_print(diagram: Diagram) -> str:
    return str(diagram)
