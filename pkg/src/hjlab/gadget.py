"""The 15-line parity gadget in [4]^4.

For each nonempty ``S`` of ``{1,2,3,4}`` the gadget line varies on ``S``
and holds coordinate ``i`` at the constant ``i`` elsewhere.  Every point of
[4]^4 lies on an even number of gadget lines, so the number of color-1
incidences summed over the lines is even and the 15 lines cannot all be
odd (3-1 split).
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from .grid import VAR, LinePattern, point_rank

GADGET_SUBSETS: tuple[tuple[int, ...], ...] = tuple(
    s for size in range(1, 5) for s in itertools.combinations((1, 2, 3, 4), size)
)
CENTER = (1, 2, 3, 4)
BLOCK_BITS = 24


def gadget_line(subset: Sequence[int]) -> LinePattern:
    return LinePattern(tuple(VAR if i in subset else i for i in range(1, 5)), 4)


@dataclass(frozen=True)
class GadgetLineSet:
    subsets: tuple[tuple[int, ...], ...]
    lines: tuple[LinePattern, ...]

    def __len__(self):
        return len(self.lines)


def build_gadget() -> GadgetLineSet:
    """The 15 lines ordered by subset size, then lexicographically."""
    return GadgetLineSet(GADGET_SUBSETS, tuple(gadget_line(s) for s in GADGET_SUBSETS))


def _incidence() -> dict[tuple[int, ...], list[int]]:
    inc: dict[tuple[int, ...], list[int]] = {p: [] for p in itertools.product(range(1, 5), repeat=4)}
    for j, line in enumerate(build_gadget().lines):
        for x in range(1, 5):
            inc[line.point(x)].append(j)
    return inc


def incidence_check() -> dict:
    inc = _incidence()
    counts = {p: len(v) for p, v in inc.items()}
    covered = [p for p, c in counts.items() if c and p != CENTER]
    return {
        "all_even": all(c % 2 == 0 for c in counts.values()),
        "center_count": counts[CENTER],
        "covered_non_center_all_two": all(counts[p] == 2 for p in covered),
        "per_point_counts": counts,
    }


@dataclass(frozen=True)
class GadgetSupport:
    """Covered points (ascending rank) and, per point, the gadget lines through it."""

    points: tuple[tuple[int, ...], ...]
    incidence: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.points)

    def index(self, p: Sequence[int]) -> int:
        return self.points.index(tuple(p))

    def line_members(self) -> np.ndarray:
        """Support indices of the 4 points of each line, shape (15, 4)."""
        lines = build_gadget().lines
        return np.array([[self.index(line.point(x)) for x in range(1, 5)] for line in lines])

    def incidence_masks(self) -> np.ndarray:
        """Per support point, the bitmask of gadget lines through it."""
        return np.array([sum(1 << j for j in inc) for inc in self.incidence], dtype=np.int64)


def gadget_support() -> GadgetSupport:
    inc = _incidence()
    pts = sorted((p for p, v in inc.items() if v), key=lambda p: point_rank(p, 4, 4))
    return GadgetSupport(tuple(pts), tuple(tuple(inc[p]) for p in pts))


def _assignment_bits(assignment, size: int) -> list[int]:
    if isinstance(assignment, (int, np.integer)):
        return [(int(assignment) >> i) & 1 for i in range(size)]
    bits = [int(b) for b in assignment]
    if len(bits) != size:
        raise ValueError(f"assignment must cover all {size} support points, got {len(bits)}")
    return bits


def count_odd_lines(assignment, support: GadgetSupport | None = None) -> int:
    """Number of gadget lines with an odd number of color-1 points.

    ``assignment`` is a bit sequence over the support points (in support
    order) or an int whose bit ``i`` colors support point ``i``.
    """
    support = support or gadget_support()
    bits = _assignment_bits(assignment, len(support))
    members = support.line_members()
    return sum(sum(bits[i] for i in row) % 2 for row in members)


def color_incidence_total(assignment, color: int, support: GadgetSupport | None = None) -> int:
    """Sum over the gadget lines of the number of points with ``color``."""
    support = support or gadget_support()
    bits = _assignment_bits(assignment, len(support))
    return sum(sum(1 for i in row if bits[i] == color) for row in support.line_members())


# -- exhaustive sweep ---------------------------------------------------------------


@njit(cache=True, nogil=True)
def _sweep_block(start_parity, inc_masks, low_bits, popcount):
    parity = start_parity
    best = popcount[parity]
    hits = 1
    for i in range(1, 1 << low_bits):
        j = 0
        while not (i >> j) & 1:
            j += 1
        parity ^= inc_masks[j]
        odd = popcount[parity]
        if odd > best:
            best = odd
            hits = 1
        elif odd == best:
            hits += 1
    return best, hits


def _popcount_table(bits: int) -> np.ndarray:
    t = np.zeros(1 << bits, dtype=np.int64)
    for i in range(1, 1 << bits):
        t[i] = t[i >> 1] + (i & 1)
    return t


def exhaustive_gadget_search(
    symmetry: bool = True,
    workers: int = 1,
    checkpoint: str | Path | None = None,
    block_bits: int = BLOCK_BITS,
) -> dict:
    """Maximum number of odd gadget lines over every support coloring.

    With ``symmetry`` the last support point is fixed to color 0 (complementing
    every color preserves oddness), halving the space.  The space is split
    into blocks by the high assignment bits; each block is a Gray-code sweep
    that flips one point per step.  Completed blocks are recorded in
    ``checkpoint`` (JSON) and skipped on resume.
    """
    t0 = time.perf_counter()
    support = gadget_support()
    inc = support.incidence_masks()
    free = len(support) - 1 if symmetry else len(support)
    low = min(block_bits, free)
    high = free - low
    popcount = _popcount_table(len(build_gadget()))

    done: dict[str, list[int]] = {}
    ckpt = Path(checkpoint) if checkpoint else None
    key = f"symmetry={symmetry};low={low}"
    if ckpt and ckpt.exists():
        state = json.loads(ckpt.read_text())
        if state.get("key") == key:
            done = state["blocks"]

    def run(block: int) -> tuple[int, int, int]:
        start = 0
        for i in range(high):
            if block >> i & 1:
                start ^= int(inc[low + i])
        best, hits = _sweep_block(start, inc[:low].copy(), low, popcount)
        return block, int(best), int(hits)

    todo = [b for b in range(1 << high) if str(b) not in done]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for block, best, hits in pool.map(run, todo):
            done[str(block)] = [best, hits]
            if ckpt:
                ckpt.write_text(json.dumps({"key": key, "blocks": done}))

    max_odd = max(v[0] for v in done.values())
    attaining = sum(v[1] for v in done.values() if v[0] == max_odd)
    return {
        "support_size": len(support),
        "symmetry": symmetry,
        "assignments": 1 << free,
        "max_odd": max_odd,
        "attaining_count": attaining,
        "elapsed": time.perf_counter() - t0,
    }
