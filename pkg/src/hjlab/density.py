"""Exact line-census statistics for 2-colorings of [t]^n.

For a length ``k`` every line is classified by how many of its points carry
color 1.  On [4]^n this gives the densities ``p2`` (2-2 split), ``p3`` (3-1
split) and ``p4`` (monochromatic), and ``q``, the fraction of monochromatic
collinear pairs.  All densities are :class:`~fractions.Fraction` values;
integer counts are accumulated first and divided once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .grid import Coloring, GridError, line_count, mask_bases, mask_step, masks_of_size

EXHAUSTIVE_LINE_LIMIT = 10**9
_CHUNK_CELLS = 1 << 22

THIRD = Fraction(1, 3)
HALF = Fraction(1, 2)


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    return Fraction(s)


# -- raw counting kernels -------------------------------------------------------


def _ones_on_lines(bits: np.ndarray, t: int, bases: np.ndarray, step: int) -> np.ndarray:
    ones = bits[bases].astype(np.int16)
    for j in range(1, t):
        ones += bits[bases + j * step]
    return ones


def _chunks(bases: np.ndarray, width: int):
    size = max(1, _CHUNK_CELLS // max(width, 1))
    for s in range(0, bases.size, size):
        yield bases[s : s + size]


def line_histogram(bits: np.ndarray, t: int, n: int, k: int | None = None, masks=None) -> np.ndarray:
    """Count lines by their number of color-1 points.

    ``bits`` is a single coloring (shape ``(t**n,)``) or a batch of colorings
    as columns (shape ``(t**n, B)``).  Returns int64 counts of shape
    ``(t+1,)`` or ``(t+1, B)``.  ``masks`` restricts the varying-coordinate
    sets; otherwise all lines of length ``k`` (or of every length) are used.
    """
    batch = bits.ndim == 2
    width = bits.shape[1] if batch else 1
    if masks is None:
        ks = range(1, n + 1) if k is None else [k]
        masks = [m for kk in ks for m in masks_of_size(n, kk)]
    hist = np.zeros((t + 1, width) if batch else t + 1, dtype=np.int64)
    for mask in masks:
        step = mask_step(t, mask)
        for chunk in _chunks(mask_bases(t, n, mask), width):
            ones = _ones_on_lines(bits, t, chunk, step)
            if batch:
                for v in range(t + 1):
                    hist[v] += np.count_nonzero(ones == v, axis=0)
            else:
                hist += np.bincount(ones, minlength=t + 1)
    return hist


def mono_pair_weights(t: int) -> np.ndarray:
    """Monochromatic pairs on a line with ``v`` points of color 1, v = 0..t."""
    return np.array([math.comb(v, 2) + math.comb(t - v, 2) for v in range(t + 1)], dtype=np.int64)


# -- density profiles ----------------------------------------------------------


@dataclass(frozen=True)
class DensityProfile:
    """Exact line densities of one length on a 2-colored [4]^n."""

    t: int
    n: int
    k: int
    line_count: int
    p2: Fraction
    p3: Fraction
    p4: Fraction
    q: Fraction

    @classmethod
    def from_histogram(cls, hist, n: int, k: int) -> "DensityProfile":
        h = [int(x) for x in hist]
        if len(h) != 5:
            raise GridError("density profiles are defined for t=4 only")
        total = sum(h)
        p2 = Fraction(h[2], total)
        p3 = Fraction(h[1] + h[3], total)
        p4 = Fraction(h[0] + h[4], total)
        return cls(4, n, k, total, p2, p3, p4, THIRD * p2 + HALF * p3 + p4)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "n": self.n,
            "k": self.k,
            "line_count": self.line_count,
            "p2": frac_str(self.p2),
            "p3": frac_str(self.p3),
            "p4": frac_str(self.p4),
            "q": frac_str(self.q),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DensityProfile":
        return cls(
            d["t"], d["n"], d["k"], d["line_count"],
            Fraction(d["p2"]), Fraction(d["p3"]), Fraction(d["p4"]), Fraction(d["q"]),
        )


def _check_length(c: Coloring, k: int) -> None:
    if not 1 <= k <= c.n:
        raise GridError(f"length {k} outside 1..{c.n}")
    if line_count(c.t, c.n, k) > EXHAUSTIVE_LINE_LIMIT:
        raise GridError(
            f"{line_count(c.t, c.n, k)} lines exceed the exhaustive limit; use sampled_census"
        )


def line_census(c: Coloring, k: int) -> DensityProfile:
    if c.t != 4:
        raise GridError(f"line_census needs t=4, got t={c.t}")
    _check_length(c, k)
    return DensityProfile.from_histogram(line_histogram(c.bits, 4, c.n, k), c.n, k)


def q_value(profile: DensityProfile) -> Fraction:
    return THIRD * profile.p2 + HALF * profile.p3 + profile.p4


def p4_from_identity(q: Fraction, p3: Fraction) -> Fraction:
    """Solve the q identity for the monochromatic density."""
    return Fraction(3, 2) * (Fraction(q) - Fraction(p3) / 6 - THIRD)


def mono_pair_fraction(c: Coloring, k: int) -> Fraction:
    """Fraction of monochromatic collinear pairs on lines of length ``k``, any t.

    On [4]^n this is ``q(k)``; on [2]^n it is the fraction of monochromatic lines.
    """
    _check_length(c, k)
    hist = line_histogram(c.bits, c.t, c.n, k)
    mono = int(mono_pair_weights(c.t) @ hist)
    return Fraction(mono, math.comb(c.t, 2) * int(hist.sum()))


def q_profile(c: Coloring, kmax: int) -> list[Fraction]:
    """``[q(1), ..., q(kmax)]``."""
    return [mono_pair_fraction(c, k) for k in range(1, kmax + 1)]


def mono_pair_counts_batch(bits: np.ndarray, t: int, n: int, kmax: int) -> np.ndarray:
    """Monochromatic collinear pair counts, shape ``(kmax, B)``, for a batch of colorings."""
    if t == 2:
        # two-point lines: compare endpoints directly
        out = np.zeros((kmax, bits.shape[1]), dtype=np.int64)
        for k in range(1, kmax + 1):
            for mask in masks_of_size(n, k):
                step = mask_step(2, mask)
                for chunk in _chunks(mask_bases(2, n, mask), bits.shape[1]):
                    out[k - 1] += np.count_nonzero(bits[chunk] == bits[chunk + step], axis=0)
        return out
    w = mono_pair_weights(t)
    return np.stack([w @ line_histogram(bits, t, n, k) for k in range(1, kmax + 1)])


# -- typed densities -----------------------------------------------------------


@dataclass(frozen=True)
class TypedDensity:
    """Monochromatic fraction among collinear pairs of type ``m`` on lines of length ``k``.

    ``q_km`` is ``None`` when no such pair exists.
    """

    k: int
    m: int
    pair_count: int
    mono_count: int

    @property
    def empty(self) -> bool:
        return self.pair_count == 0

    @property
    def q_km(self) -> Fraction | None:
        if self.empty:
            return None
        return Fraction(self.mono_count, self.pair_count)


def typed_counts(c: Coloring, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-type pair and monochromatic-pair counts on lines of length ``k``.

    Returns two int64 arrays indexed by ``m = 0..n``.
    """
    if c.t != 4:
        raise GridError(f"typed densities need t=4, got t={c.t}")
    _check_length(c, k)
    t, n = c.t, c.n
    r = np.arange(t**n, dtype=np.int64)
    digit_count = np.zeros((t, t**n), dtype=np.int16)
    for i in range(n):
        d = (r // t**i) % t
        for v in range(t):
            digit_count[v] += d == v
    pairs = np.zeros(n + 1, dtype=np.int64)
    mono = np.zeros(n + 1, dtype=np.int64)
    bits = c.bits
    for mask in masks_of_size(n, k):
        step = mask_step(t, mask)
        bases = mask_bases(t, n, mask)
        for a in range(1, t + 1):
            for b in range(a + 1, t + 1):
                # varying cells sit at digit 0 in the base point, so they are
                # counted as value 1 and must be removed when a == 1
                m = k + digit_count[a - 1, bases] + digit_count[b - 1, bases]
                if a == 1:
                    m -= k
                same = bits[bases + (a - 1) * step] == bits[bases + (b - 1) * step]
                pairs += np.bincount(m, minlength=n + 1)
                mono += np.bincount(m, weights=same, minlength=n + 1).astype(np.int64)
    return pairs, mono


def typed_census(c: Coloring, k: int, m: int) -> TypedDensity:
    if not k <= m <= c.n:
        raise GridError(f"need k <= m <= n, got k={k}, m={m}, n={c.n}")
    pairs, mono = typed_counts(c, k)
    return TypedDensity(k, m, int(pairs[m]), int(mono[m]))


def typed_census_all(c: Coloring, k: int) -> dict[int, TypedDensity]:
    pairs, mono = typed_counts(c, k)
    return {m: TypedDensity(k, m, int(pairs[m]), int(mono[m])) for m in range(k, c.n + 1)}


def type_weight(n: int, k: int, m: int) -> Fraction:
    """Fraction of collinear pairs on lines of length ``k`` that have type ``m``."""
    if not k <= m <= n:
        raise GridError(f"need k <= m <= n, got k={k}, m={m}, n={n}")
    return Fraction(math.comb(n - k, m - k), 2 ** (n - k))


def recombine_q(n: int, typed: dict[int, TypedDensity]) -> Fraction:
    """Weighted average of the typed densities; skips empty classes."""
    total = Fraction(0)
    for m, td in typed.items():
        if not td.empty:
            total += type_weight(n, td.k, m) * td.q_km
    return total


# -- sampling mode ---------------------------------------------------------------


@dataclass(frozen=True)
class SampledProfile:
    t: int
    n: int
    k: int
    samples: int
    seed: int
    p2: float
    p3: float
    p4: float
    q: float
    q_stderr: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def sampled_census(c: Coloring, k: int, samples: int, seed: int) -> SampledProfile:
    """Estimate the density profile from ``samples`` uniformly random lines of length ``k``."""
    if c.t != 4:
        raise GridError(f"sampled_census needs t=4, got t={c.t}")
    if not 1 <= k <= c.n:
        raise GridError(f"length {k} outside 1..{c.n}")
    t, n = c.t, c.n
    rng = np.random.default_rng(seed)
    order = np.argsort(rng.random((samples, n)), axis=1)
    is_var = np.zeros((samples, n), dtype=bool)
    np.put_along_axis(is_var, order[:, :k], True, axis=1)
    consts = rng.integers(0, t, size=(samples, n))
    weights = t ** np.arange(n, dtype=np.int64)
    base = ((np.where(is_var, 0, consts)) * weights).sum(axis=1)
    step = (is_var * weights).sum(axis=1)
    ones = sum(c.bits[base + j * step].astype(np.int64) for j in range(t))
    q_line = mono_pair_weights(t)[ones] / math.comb(t, 2)
    return SampledProfile(
        t, n, k, samples, seed,
        p2=float(np.mean(ones == 2)),
        p3=float(np.mean((ones == 1) | (ones == 3))),
        p4=float(np.mean((ones == 0) | (ones == 4))),
        q=float(q_line.mean()),
        q_stderr=float(q_line.std(ddof=1) / math.sqrt(samples)),
    )
