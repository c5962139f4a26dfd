"""Points, combinatorial lines and 2-colorings of the grid [t]^n.

Points are plain tuples of coordinates in ``1..t``.  Coordinate 1 is the
least significant digit of a point's rank, so ``rank(x) = sum((x_i - 1) * t**(i-1))``.
A line is a :class:`LinePattern`: one cell per coordinate, each either a
constant value or :data:`VAR`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

VAR = 0
"""Cell value marking a varying coordinate of a line."""

MAX_MATERIALIZED_CELLS = 10**8

_HEADER_MAGIC = "HJC1"


class GridError(ValueError):
    """Invalid point, line or coloring input."""


def check_point(p: Sequence[int], t: int, n: int) -> tuple[int, ...]:
    p = tuple(int(x) for x in p)
    if len(p) != n:
        raise GridError(f"point {p} has {len(p)} coordinates, expected {n}")
    for x in p:
        if not 1 <= x <= t:
            raise GridError(f"coordinate {x} of {p} outside 1..{t}")
    return p


def point_rank(p: Sequence[int], t: int, n: int) -> int:
    p = check_point(p, t, n)
    r = 0
    for x in reversed(p):
        r = r * t + (x - 1)
    return r


def point_unrank(r: int, t: int, n: int) -> tuple[int, ...]:
    if not 0 <= r < t**n:
        raise GridError(f"rank {r} outside [0, {t}^{n})")
    out = []
    for _ in range(n):
        r, d = divmod(r, t)
        out.append(d + 1)
    return tuple(out)


@dataclass(frozen=True)
class LinePattern:
    """A combinatorial line template over [t]^n.

    ``cells[i]`` is the constant value of coordinate ``i + 1`` or ``VAR``.
    """

    cells: tuple[int, ...]
    t: int = 4

    def __post_init__(self):
        cells = tuple(int(c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise GridError("a line needs at least one coordinate")
        for c in cells:
            if c != VAR and not 1 <= c <= self.t:
                raise GridError(f"cell value {c} outside 1..{self.t}")
        if VAR not in cells:
            raise GridError("a line needs at least one varying coordinate")

    @classmethod
    def parse(cls, text: str, t: int = 4) -> "LinePattern":
        """Parse ``"3x1x4"`` or ``"(3, x, 1, x, 4)"``."""
        body = text.strip().strip("()").replace(",", " ").split()
        if len(body) == 1:
            body = list(body[0])
        return cls(tuple(VAR if c.lower() == "x" else int(c) for c in body), t)

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def length(self) -> int:
        return sum(1 for c in self.cells if c == VAR)

    @property
    def var_mask(self) -> int:
        return sum(1 << i for i, c in enumerate(self.cells) if c == VAR)

    @property
    def base_rank(self) -> int:
        """Rank of the line's first point (varying coordinates set to 1)."""
        return sum((c - 1) * self.t**i for i, c in enumerate(self.cells) if c != VAR)

    @property
    def step(self) -> int:
        """Rank difference between consecutive points of the line."""
        return mask_step(self.t, self.var_mask)

    def point(self, x: int) -> tuple[int, ...]:
        return tuple(x if c == VAR else c for c in self.cells)

    def ranks(self) -> list[int]:
        b, s = self.base_rank, self.step
        return [b + j * s for j in range(self.t)]

    def const_profile(self) -> tuple[int, ...]:
        """Number of constant cells holding each value ``1..t``."""
        return tuple(self.cells.count(v) for v in range(1, self.t + 1))

    def __str__(self) -> str:
        return "(" + ", ".join("x" if c == VAR else str(c) for c in self.cells) + ")"


def line_points(line: LinePattern) -> list[tuple[int, ...]]:
    return [line.point(x) for x in range(1, line.t + 1)]


def line_count(t: int, n: int, k: int | None = None) -> int:
    if k is None:
        return (t + 1) ** n - t**n
    if not 1 <= k <= n:
        return 0
    return math.comb(n, k) * t ** (n - k)


def _index_to_cells(index: int, t: int, n: int) -> tuple[int, ...]:
    # Cell 1 is the most significant digit; digit t maps to VAR so that
    # VAR sorts after every constant.
    digits = []
    for _ in range(n):
        index, d = divmod(index, t + 1)
        digits.append(d)
    return tuple(VAR if d == t else d + 1 for d in reversed(digits))


def line_index(line: LinePattern) -> int:
    """Position of ``line`` in the canonical (lexicographic) order."""
    idx = 0
    for c in line.cells:
        idx = idx * (line.t + 1) + (line.t if c == VAR else c - 1)
    return idx


def enumerate_lines(
    t: int,
    n: int,
    k: int | None = None,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[LinePattern]:
    """Yield every line of [t]^n once, in canonical order.

    The order is lexicographic over cells, with ``VAR`` after every constant.
    ``start``/``stop`` restrict the stream to a range of canonical indices in
    ``[0, (t+1)**n)`` so that disjoint ranges partition the stream.
    """
    if k is not None and not 1 <= k <= n:
        raise GridError(f"length {k} outside 1..{n}")
    total = (t + 1) ** n
    stop = total if stop is None else min(stop, total)
    for idx in range(max(start, 0), stop):
        cells = _index_to_cells(idx, t, n)
        nvar = cells.count(VAR)
        if nvar == 0 or (k is not None and nvar != k):
            continue
        yield LinePattern(cells, t)


@dataclass(frozen=True)
class CollinearPair:
    line: LinePattern
    a: int
    b: int

    def __post_init__(self):
        if not (1 <= self.a < self.b <= self.line.t):
            raise GridError(f"pair values must satisfy 1 <= a < b <= t, got {self.a}, {self.b}")

    def points(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.line.point(self.a), self.line.point(self.b)


def pair_type(pair: CollinearPair) -> int:
    """Number of coordinates where either point of the pair equals a or b."""
    ab = (pair.a, pair.b)
    return sum(1 for c in pair.line.cells if c == VAR or c in ab)


# -- vectorized plumbing -----------------------------------------------------


def mask_step(t: int, mask: int) -> int:
    s, i = 0, 0
    while mask:
        if mask & 1:
            s += t**i
        mask >>= 1
        i += 1
    return s


def masks_of_size(n: int, k: int) -> list[int]:
    return [sum(1 << i for i in combo) for combo in itertools.combinations(range(n), k)]


def mask_bases(t: int, n: int, mask: int) -> np.ndarray:
    """Ranks of all points whose coordinates in ``mask`` equal 1, ascending."""
    bases = np.zeros(1, dtype=np.int64)
    for i in reversed(range(n)):
        if mask >> i & 1:
            continue
        bases = (np.arange(t, dtype=np.int64)[:, None] * t**i + bases[None, :]).ravel()
    return np.sort(bases)


def rank_digits(t: int, n: int) -> np.ndarray:
    """Array of shape (t**n, n) holding ``x_i - 1`` for every point."""
    r = np.arange(t**n, dtype=np.int64)
    return np.stack([(r // t**i) % t for i in range(n)], axis=1)


# -- colorings ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Coloring:
    """An immutable 2-coloring of [t]^n, bit ``r`` is the color of the rank-r point."""

    t: int
    n: int
    bits: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size != self.t**self.n:
            raise GridError(f"expected {self.t**self.n} bits, got shape {bits.shape}")
        if bits.size and bits.max() > 1:
            raise GridError("colors must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def color(self, p: Sequence[int]) -> int:
        return int(self.bits[point_rank(p, self.t, self.n)])

    def __eq__(self, other):
        if not isinstance(other, Coloring):
            return NotImplemented
        return (self.t, self.n) == (other.t, other.n) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.t, self.n, self.bits.tobytes()))

    def to_bytes(self) -> bytes:
        header = f"{_HEADER_MAGIC} t={self.t} n={self.n} label={self.label}\n".encode("ascii")
        return header + np.packbits(self.bits, bitorder="little").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Coloring":
        nl = data.find(b"\n")
        if nl < 0:
            raise GridError("missing HJC1 header line")
        fields = data[:nl].decode("ascii").split(" ", 3)
        if len(fields) != 4 or fields[0] != _HEADER_MAGIC:
            raise GridError(f"bad header: {data[:nl]!r}")
        try:
            t = int(fields[1].removeprefix("t="))
            n = int(fields[2].removeprefix("n="))
        except ValueError as exc:
            raise GridError(f"bad header: {data[:nl]!r}") from exc
        label = fields[3].removeprefix("label=")
        size = t**n
        payload = np.frombuffer(data[nl + 1 :], dtype=np.uint8)
        if payload.size != (size + 7) // 8:
            raise GridError(f"expected {(size + 7) // 8} payload bytes, got {payload.size}")
        bits = np.unpackbits(payload, bitorder="little")[:size]
        return cls(t, n, bits, label)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "Coloring":
        return cls.from_bytes(Path(path).read_bytes())


def make_constant(t: int, n: int, color: int = 0) -> Coloring:
    return Coloring(t, n, np.full(t**n, color, dtype=np.uint8), f"constant-{color}")


def make_checkerboard(t: int, n: int) -> Coloring:
    """Color each point by the parity of its coordinate sum."""
    # sum of x_i = sum of digits + n
    r = np.arange(t**n, dtype=np.int64)
    s = np.full(t**n, n, dtype=np.int64)
    for i in range(n):
        s += (r // t**i) % t
    return Coloring(t, n, (s % 2).astype(np.uint8), "checkerboard")


def make_random(t: int, n: int, seed: int) -> Coloring:
    """Uniform random coloring from numpy's PCG64 ``default_rng(seed)``."""
    rng = np.random.default_rng(seed)
    return Coloring(t, n, rng.integers(0, 2, size=t**n, dtype=np.uint8), f"random-seed{seed}")


def random_bit_matrix(t: int, n: int, count: int, seed: int) -> np.ndarray:
    """``count`` random colorings as columns of a (t**n, count) uint8 array."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=(t**n, count), dtype=np.uint8)
