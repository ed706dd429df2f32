"""Training boards: random sampling, the pattern library, the symmetric fixed
board, patch-class coverage, and the plain-text board format.

Board files are ASCII, one row per line, each character ``0`` or ``1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gol import as_board, neighbor_counts, step_n

DEFAULT_DENSITY = 0.38
TRAIN_SIZE = 64
QUADRANT_SIZE = 32

CATEGORIES = ("still-life", "oscillator", "spaceship", "growth", "custom")


class BoardParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class PlacementError(ValueError):
    pass


# ---------------------------------------------------------------------------
# random boards


@dataclass(frozen=True)
class BoardSpec:
    height: int = TRAIN_SIZE
    width: int = TRAIN_SIZE
    density: float = DEFAULT_DENSITY
    seed: int = 0

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError("board dimensions must be positive")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must be in [0, 1], got {self.density}")


def sample_board(rng: np.random.Generator, height: int, width: int, p: float = DEFAULT_DENSITY) -> np.ndarray:
    """I.i.d. Bernoulli(p) cells drawn from ``rng``."""
    return (rng.random((height, width)) < p).astype(np.uint8)


def random_board(spec: BoardSpec) -> np.ndarray:
    return sample_board(np.random.default_rng(spec.seed), spec.height, spec.width, spec.density)


def make_pair(x, n: int) -> tuple[np.ndarray, np.ndarray]:
    x = as_board(x)
    return x, step_n(x, n)


# ---------------------------------------------------------------------------
# patterns


@dataclass(frozen=True, eq=False)
class Pattern:
    name: str
    cells: np.ndarray
    category: str = "custom"
    period: int | None = None

    def __post_init__(self):
        cells = as_board(self.cells)
        if not cells.any():
            raise ValueError(f"pattern {self.name!r} has no live cells")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        rows = np.flatnonzero(cells.any(axis=1))
        cols = np.flatnonzero(cells.any(axis=0))
        cells = cells[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1].copy()
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_rows(cls, name: str, rows, category: str = "custom", period: int | None = None) -> Pattern:
        return cls(name, np.array([[int(ch) for ch in r] for r in rows], dtype=np.uint8), category, period)

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    def rows(self) -> list[str]:
        return ["".join(str(int(c)) for c in row) for row in self.cells]

    def to_dict(self) -> dict:
        return {"name": self.name, "category": self.category, "rows": self.rows()}

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return (self.name, self.category) == (other.name, other.category) and np.array_equal(self.cells, other.cells)


# ring cells of a 3x3 patch in clockwise order starting top-left
_RING = ((0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0))


def _probe(k: int, center: int) -> np.ndarray:
    p = np.zeros((3, 3), dtype=np.uint8)
    p[1, 1] = center
    for i, j in _RING[:k]:
        p[i, j] = 1
    return p


def builtin_patterns() -> dict[str, Pattern]:
    """Named motifs used to compose the fixed board.

    Besides the classical still lifes, oscillators, glider and R-pentomino the
    library holds a lone ``dot`` and 3x3 probes: ``probe_k`` is a live center with ``k`` live ring
    cells (class (1, k)), ``hole_k`` a dead center with ``k`` live ring cells.
    """
    pats = [
        Pattern.from_rows("block", ["11", "11"], "still-life", 1),
        Pattern.from_rows("beehive", ["0110", "1001", "0110"], "still-life", 1),
        Pattern.from_rows("loaf", ["0110", "1001", "0101", "0010"], "still-life", 1),
        Pattern.from_rows("boat", ["110", "101", "010"], "still-life", 1),
        Pattern.from_rows("tub", ["010", "101", "010"], "still-life", 1),
        Pattern.from_rows("blinker", ["111"], "oscillator", 2),
        Pattern.from_rows("toad", ["0111", "1110"], "oscillator", 2),
        Pattern.from_rows("beacon", ["1100", "1100", "0011", "0011"], "oscillator", 2),
        Pattern.from_rows("glider", ["010", "001", "111"], "spaceship", 4),
        Pattern.from_rows("r_pentomino", ["011", "110", "010"], "growth"),
    ]
    pats.append(Pattern.from_rows("dot", ["1"], "custom"))
    for k in range(1, 9):
        pats.append(Pattern(f"probe_{k}", _probe(k, 1), "custom"))
    for k in range(4, 9):
        pats.append(Pattern(f"hole_{k}", _probe(k, 0), "custom"))
    return {p.name: p for p in pats}


def export_patterns(patterns=None) -> str:
    """JSON list of ``{"name", "category", "rows"}`` records."""
    if patterns is None:
        patterns = builtin_patterns()
    if isinstance(patterns, dict):
        patterns = patterns.values()
    return json.dumps([p.to_dict() for p in patterns], indent=2)


def import_patterns(text: str) -> dict[str, Pattern]:
    return {d["name"]: Pattern.from_rows(d["name"], d["rows"], d["category"]) for d in json.loads(text)}


# ---------------------------------------------------------------------------
# fixed board


def compose_quadrant(placements, size: int = QUADRANT_SIZE) -> np.ndarray:
    """Stamp ``(pattern, (row, col))`` placements onto a dead ``size`` x ``size`` board.

    Bounding boxes must lie inside the board and be separated from each
    other by at least one dead row or column.
    """
    board = np.zeros((size, size), dtype=np.uint8)
    boxes: list[tuple[str, int, int, int, int]] = []
    for pattern, (r, c) in placements:
        h, w = pattern.shape
        if r < 0 or c < 0 or r + h > size or c + w > size:
            raise PlacementError(f"pattern {pattern.name!r} at ({r}, {c}) does not fit in {size}x{size}")
        for name, r0, c0, r1, c1 in boxes:
            # boxes are half-open; require a gap of one cell on every side
            if r < r1 + 1 and r0 < r + h + 1 and c < c1 + 1 and c0 < c + w + 1:
                raise PlacementError(f"pattern {pattern.name!r} at ({r}, {c}) overlaps or touches {name!r}")
        boxes.append((pattern.name, r, c, r + h, c + w))
        board[r : r + h, c : c + w] = pattern.cells
    return board


def symmetrize(q) -> np.ndarray:
    """Reflect a quadrant into a ``2h`` x ``2w`` board symmetric about both axes."""
    q = as_board(q)
    top = np.hstack([q, q[:, ::-1]])
    return np.vstack([top, top[::-1, :]])


def default_layout() -> list[tuple[Pattern, tuple[int, int]]]:
    """Curated placement of library patterns in the 32x32 quadrant."""
    P = builtin_patterns()
    spots = [
        ("probe_1", (1, 1)),
        ("probe_2", (1, 5)),
        ("probe_3", (1, 9)),
        ("probe_4", (1, 13)),
        ("probe_5", (1, 17)),
        ("probe_6", (1, 21)),
        ("probe_7", (1, 25)),
        ("probe_8", (1, 29)),
        ("hole_4", (6, 1)),
        ("hole_5", (6, 5)),
        ("hole_6", (6, 9)),
        ("hole_7", (6, 13)),
        ("hole_8", (6, 17)),
        ("glider", (6, 21)),
        ("r_pentomino", (6, 25)),
        ("blinker", (6, 29)),
        ("block", (11, 1)),
        ("beehive", (11, 4)),
        ("loaf", (11, 9)),
        ("boat", (11, 14)),
        ("tub", (11, 18)),
        ("toad", (11, 22)),
        ("beacon", (11, 27)),
        ("glider", (17, 1)),
        ("beacon", (17, 5)),
        ("r_pentomino", (17, 10)),
        ("toad", (17, 14)),
        ("probe_3", (17, 19)),
        ("probe_4", (17, 23)),
        ("hole_5", (17, 27)),
        ("boat", (22, 1)),
        ("probe_2", (22, 5)),
        ("hole_4", (22, 9)),
        ("blinker", (23, 13)),
        ("loaf", (22, 17)),
        ("probe_5", (22, 22)),
        ("beehive", (22, 26)),
        ("r_pentomino", (27, 1)),
        ("toad", (27, 5)),
        ("glider", (27, 10)),
        ("probe_6", (27, 14)),
        ("block", (28, 18)),
        ("hole_6", (27, 21)),
        ("dot", (28, 26)),
        ("blinker", (29, 29)),
    ]
    return [(P[name], pos) for name, pos in spots]


def fixed_board(quadrant=None) -> np.ndarray:
    """The 64x64 symmetric training board; ``quadrant`` overrides the default layout."""
    if quadrant is None:
        quadrant = compose_quadrant(default_layout(), QUADRANT_SIZE)
    return symmetrize(quadrant)


# ---------------------------------------------------------------------------
# coverage


@dataclass(frozen=True, eq=False)
class CoverageReport:
    counts: np.ndarray  # shape (2, 9): [center, alive_neighbors]

    @property
    def covered_fraction(self) -> float:
        return float(np.count_nonzero(self.counts)) / 18.0

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def count(self, center: int, alive_neighbors: int) -> int:
        return int(self.counts[center, alive_neighbors])

    def missing(self) -> list[tuple[int, int]]:
        return [(c, n) for c in (0, 1) for n in range(9) if self.counts[c, n] == 0]

    def to_dict(self) -> dict:
        return {
            "counts": {f"{c},{n}": int(self.counts[c, n]) for c in (0, 1) for n in range(9)},
            "covered_fraction": self.covered_fraction,
        }


def coverage(b) -> CoverageReport:
    b = as_board(b)
    n = neighbor_counts(b)
    counts = np.zeros((2, 9), dtype=np.int64)
    np.add.at(counts, (b.ravel(), n.ravel()), 1)
    return CoverageReport(counts)


# ---------------------------------------------------------------------------
# text format


def format_board(b) -> str:
    b = as_board(b)
    return "".join("".join("1" if c else "0" for c in row) + "\n" for row in b)


def parse_board(text: str) -> np.ndarray:
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise BoardParseError("empty board", 1, 1)
    width = len(lines[0])
    rows = []
    for i, line in enumerate(lines, start=1):
        for j, ch in enumerate(line, start=1):
            if ch not in "01":
                raise BoardParseError(f"unexpected character {ch!r}", i, j)
        if len(line) != width or width == 0:
            raise BoardParseError(f"row has {len(line)} cells, expected {width or 'at least 1'}", i, len(line) + 1)
        rows.append([ch == "1" for ch in line])
    return np.array(rows, dtype=np.uint8)


def save_board(b, path) -> None:
    Path(path).write_text(format_board(b))


def load_board(path) -> np.ndarray:
    return parse_board(Path(path).read_text())
