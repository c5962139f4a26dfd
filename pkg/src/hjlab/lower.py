"""Line-free colorings certifying lower bounds.

A 2-coloring of ``{1..N}`` with no monochromatic ``t``-term arithmetic
progression lifts to [t]^n (when ``N >= n(t-1) + 1``) by coloring a point
with the color of its coordinate sum minus ``n - 1``: the coordinate sums
along a combinatorial line form a ``t``-term progression.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .density import line_histogram
from .grid import Coloring, GridError, enumerate_lines, line_count, masks_of_size, rank_digits

VERIFY_LINE_LIMIT = 10**9


@dataclass(frozen=True)
class IntervalColoring:
    """Colors of the integers ``1..N``; ``bits[i - 1]`` is the color of ``i``."""

    N: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.N:
            raise GridError(f"expected {self.N} colors, got {len(self.bits)}")

    def color(self, i: int) -> int:
        return self.bits[i - 1]

    def to_string(self) -> str:
        return "".join(map(str, self.bits))

    @classmethod
    def from_string(cls, s: str) -> "IntervalColoring":
        s = s.strip()
        return cls(len(s), tuple(int(ch) for ch in s))


@dataclass(frozen=True)
class APConstraint:
    """Forbid monochromatic progressions of length ``t``."""

    t: int

    def __post_init__(self):
        if self.t < 3:
            raise GridError(f"progression length must be at least 3, got {self.t}")


def arithmetic_progressions(N: int, t: int):
    """All ``t``-term progressions with positive difference inside ``1..N``."""
    for d in range(1, (N - 1) // (t - 1) + 1):
        for a in range(1, N - (t - 1) * d + 1):
            yield tuple(a + j * d for j in range(t))


def mono_progressions(base: IntervalColoring, t: int) -> list[tuple[int, ...]]:
    return [ap for ap in arithmetic_progressions(base.N, t) if len({base.color(i) for i in ap}) == 1]


def search_ap_free(N: int, t: int, stats: dict | None = None) -> IntervalColoring | None:
    """Depth-first search for a coloring of ``1..N`` with no monochromatic ``t``-AP.

    Branches on the lowest uncolored integer, color 0 before color 1, and
    prunes as soon as the newest integer completes a monochromatic
    progression.  Returns ``None`` when the whole tree is refuted.
    """
    APConstraint(t)
    if N < 1:
        raise GridError(f"need N >= 1, got N={N}")
    colors = [0] * (N + 1)
    choice = [-1] * (N + 1)
    nodes = 0

    def closes_mono(i: int) -> bool:
        c = colors[i]
        for d in range(1, (i - 1) // (t - 1) + 1):
            for j in range(1, t):
                if colors[i - j * d] != c:
                    break
            else:
                return True
        return False

    i = 1
    while 1 <= i <= N:
        choice[i] += 1
        if choice[i] > 1:
            choice[i] = -1
            i -= 1
            continue
        colors[i] = choice[i]
        nodes += 1
        if not closes_mono(i):
            i += 1
    if stats is not None:
        stats["nodes"] = nodes
    if i == 0:
        return None
    return IntervalColoring(N, tuple(colors[1:]))


def lift_to_grid(base: IntervalColoring, t: int, n: int) -> Coloring:
    """Color ``x`` in [t]^n with ``base`` at ``sum(x) - (n - 1)``."""
    need = n * (t - 1) + 1
    if base.N < need:
        raise GridError(f"base coloring covers 1..{base.N}, need 1..{need} for t={t}, n={n}")
    # sum(x) - (n - 1) == sum of (x_i - 1) + 1
    idx = rank_digits(t, n).sum(axis=1) if t**n <= 1 << 16 else _digit_sums(t, n)
    table = np.array(base.bits, dtype=np.uint8)
    return Coloring(t, n, table[idx], f"lift(t={t},n={n},N={base.N})")


def _digit_sums(t: int, n: int) -> np.ndarray:
    r = np.arange(t**n, dtype=np.int64)
    s = np.zeros(t**n, dtype=np.int64)
    for i in range(n):
        s += (r // t**i) % t
    return s


def verify_line_free(
    c: Coloring, workers: int = 1, checkpoint: str | Path | None = None
) -> dict:
    """Exact number of monochromatic lines, streamed mask by mask.

    Work is split by the set of varying coordinates; partial counts are
    integers so the total does not depend on scheduling.  With a
    ``checkpoint`` path, finished masks are recorded and skipped on resume.
    """
    total_lines = line_count(c.t, c.n)
    if total_lines > VERIFY_LINE_LIMIT:
        raise GridError(f"{total_lines} lines exceed the verification limit")
    t0 = time.perf_counter()
    masks = [m for k in range(1, c.n + 1) for m in masks_of_size(c.n, k)]
    done: dict[str, int] = {}
    ckpt = Path(checkpoint) if checkpoint else None
    key = f"t={c.t};n={c.n};sha256={hashlib.sha256(c.bits.tobytes()).hexdigest()}"
    if ckpt and ckpt.exists():
        state = json.loads(ckpt.read_text())
        if state.get("key") == key:
            done = state["masks"]

    def run(mask: int) -> tuple[int, int]:
        h = line_histogram(c.bits, c.t, c.n, masks=[mask])
        return mask, int(h[0] + h[c.t])

    todo = [m for m in masks if str(m) not in done]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for i, (mask, mono) in enumerate(pool.map(run, todo)):
            done[str(mask)] = mono
            if ckpt and (i % 64 == 63 or i == len(todo) - 1):
                ckpt.write_text(json.dumps({"key": key, "masks": done}))
    per_length = [0] * (c.n + 1)
    for m, v in done.items():
        per_length[bin(int(m)).count("1")] += v
    return {
        "t": c.t,
        "n": c.n,
        "lines": total_lines,
        "mono_lines": sum(per_length),
        "mono_by_length": per_length[1:],
        "elapsed": time.perf_counter() - t0,
    }


def count_mono_lines_naive(c: Coloring) -> int:
    """Reference count: color every point of every line individually."""
    return sum(
        1 for line in enumerate_lines(c.t, c.n)
        if len({c.color(p) for p in (line.point(x) for x in range(1, c.t + 1))}) == 1
    )


def _line_free_backtrack(t: int, n: int) -> Coloring | None:
    size = t**n
    closing: list[list[list[int]]] = [[] for _ in range(size)]
    for line in enumerate_lines(t, n):
        ranks = line.ranks()
        closing[max(ranks)].append(ranks)
    colors = [0] * size
    choice = [-1] * size
    i = 0
    while 0 <= i < size:
        choice[i] += 1
        if choice[i] > 1:
            choice[i] = -1
            i -= 1
            continue
        colors[i] = choice[i]
        if all(len({colors[r] for r in ranks}) > 1 for ranks in closing[i]):
            i += 1
    if i < 0:
        return None
    return Coloring(t, n, np.array(colors, dtype=np.uint8), f"line-free(t={t},n={n})")


def hj32_witness() -> Coloring:
    """A 2-coloring of [3]^3 without a monochromatic line, by backtracking in rank order."""
    c = _line_free_backtrack(3, 3)
    if c is None:  # pragma: no cover - would contradict a known value
        raise RuntimeError("no line-free coloring of [3]^3 found")
    return c


def all_colorings_have_mono_line(t: int, n: int) -> bool:
    """Exhaustively check every 2-coloring of [t]^n (small grids only)."""
    size = t**n
    if size > 20:
        raise GridError(f"2^{size} colorings is too many for exhaustive checking")
    lines = [line.ranks() for line in enumerate_lines(t, n)]
    for code in range(2**size):
        if not any(len({code >> r & 1 for r in ranks}) == 1 for ranks in lines):
            return False
    return True


def line_free_coloring(t: int, n: int) -> Coloring | None:
    return _line_free_backtrack(t, n)


def hj2_instance_checks() -> dict:
    """Two-color instances of the pigeonhole value for t = 2."""
    return {
        "line_free_2_1": line_free_coloring(2, 1) is not None,
        "all_mono_2_2": all_colorings_have_mono_line(2, 2),
    }

