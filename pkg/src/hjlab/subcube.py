"""Lifting the hypercube bound to [4]^n.

Collinear pairs of [4]^n are grouped by type ``m``: each such pair lives in
an ``m``-dimensional two-valued subcube that behaves like [2]^m.  Replacing
the type weights by a ``k``-independent floor loses a binomial tail (bounded
by a Chernoff term) and ``kappa`` terms near the middle of the binomial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .chains import clique_mono_pairs_lower, sqrt_2_over_pi_n, weighted_q_sum
from .density import frac_str, mono_pair_counts_batch, mono_pair_fraction
from .grid import VAR, Coloring, GridError, enumerate_lines, line_count, random_bit_matrix
from .interval import DEFAULT_PRECISION, IntervalValue


def _check_kappa(n: int, kappa: int) -> None:
    if not 1 <= kappa or 4 * kappa > n:
        raise GridError(f"need 1 <= kappa <= n/4, got kappa={kappa}, n={n}")


def chernoff_tail(n: int, kappa: int, prec: int = DEFAULT_PRECISION) -> IntervalValue:
    """Enclosure of ``exp(-(n - kappa)/8)``."""
    if kappa > n:
        raise GridError(f"need kappa <= n, got kappa={kappa}, n={n}")
    return IntervalValue.exact(Fraction(-(n - kappa), 8), prec).exp()


def exact_lower_tail(n: int, kappa: int) -> Fraction:
    """``Pr[Bin(n - kappa, 1/2) < n/4 - kappa]``, exactly."""
    big = n - kappa
    hits = sum(math.comb(big, j) for j in range(big + 1) if 4 * j < n - 4 * kappa)
    return Fraction(hits, 2**big)


def midskip_loss(n: int, kappa: int, prec: int = DEFAULT_PRECISION) -> IntervalValue:
    """Enclosure of ``kappa * sqrt(2 / (pi (n - kappa)))``."""
    if kappa >= n:
        raise GridError(f"need kappa < n, got kappa={kappa}, n={n}")
    if kappa == 0:
        return IntervalValue.exact(0, prec)
    return sqrt_2_over_pi_n(n - kappa, prec) * kappa


def midskip_exact(n: int, kappa: int) -> Fraction:
    """``kappa * C(N, N//2) / 2^N`` with ``N = n - kappa``."""
    big = n - kappa
    return kappa * Fraction(math.comb(big, big // 2), 2**big)


def truncation_threshold(n: int, rounding: str = "ceil") -> int:
    """Smallest type ``m`` kept; ``"ceil"`` is the conservative default."""
    if rounding == "ceil":
        return -(-n // 4)
    if rounding == "floor":
        return n // 4
    raise ValueError(f"rounding must be 'ceil' or 'floor', got {rounding!r}")


def truncated_weight_floor(n: int, kappa: int, m: int, rounding: str = "ceil") -> Fraction:
    """A lower bound, valid for every length ``k <= kappa``, on the weight of type ``m``."""
    _check_kappa(n, kappa)
    if m < truncation_threshold(n, rounding):
        return Fraction(0)
    big = n - kappa
    return Fraction(min(math.comb(big, m - kappa) if m >= kappa else 0, math.comb(big, m)), 2**big)


def truncated_mass(n: int, kappa: int, rounding: str = "ceil") -> Fraction:
    return sum((truncated_weight_floor(n, kappa, m, rounding) for m in range(n + 1)), Fraction(0))


def truncated_mass_report(n: int, kappa: int) -> dict:
    """Both boundary conventions, plus the exact lower bound they must clear."""
    ceil_mass = truncated_mass(n, kappa, "ceil")
    floor_mass = truncated_mass(n, kappa, "floor")
    bound = 1 - exact_lower_tail(n, kappa) - midskip_exact(n, kappa)
    out = {"ceil": ceil_mass, "bound": bound, "ceil_ok": ceil_mass >= bound}
    if floor_mass != ceil_mass:
        out["floor"] = floor_mass
    return out


# -- the lifted inequality ------------------------------------------------------


def lemma2_terms(n: int, kappa: int, prec: int = DEFAULT_PRECISION):
    """``(chernoff, midskip, rhs)`` enclosures for the [4]^n bound."""
    _check_kappa(n, kappa)
    chern = chernoff_tail(n, kappa, prec)
    mid = midskip_loss(n, kappa, prec)
    rhs = (1 - chern - mid * 3) * clique_mono_pairs_lower(kappa)
    return chern, mid, rhs


@dataclass(frozen=True)
class Lemma2Report:
    n: int
    kappa: int
    lhs: Fraction
    chernoff_term: IntervalValue
    midskip_term: IntervalValue
    rhs: IntervalValue
    label: str = ""

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs.hi

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "label": self.label,
            "lhs": frac_str(self.lhs),
            "chernoff_term": self.chernoff_term.to_strings(),
            "midskip_term": self.midskip_term.to_strings(),
            "rhs": self.rhs.to_strings(),
            "holds": self.holds,
        }


def lemma2_check(c: Coloring, kappa: int, prec: int = DEFAULT_PRECISION) -> Lemma2Report:
    if c.t != 4:
        raise GridError(f"lemma2_check needs a coloring of [4]^n, got t={c.t}")
    _check_kappa(c.n, kappa)
    qs = [mono_pair_fraction(c, k) for k in range(1, kappa + 1)]
    chern, mid, rhs = lemma2_terms(c.n, kappa, prec)
    return Lemma2Report(c.n, kappa, weighted_q_sum(qs, kappa), chern, mid, rhs, c.label)


def lemma2_sweep(
    n: int, kappa: int, samples: int, seed: int, prec: int = DEFAULT_PRECISION, batch: int = 256
) -> list[Lemma2Report]:
    """Reports for ``samples`` random colorings of [4]^n, batched."""
    _check_kappa(n, kappa)
    chern, mid, rhs = lemma2_terms(n, kappa, prec)
    denoms = [6 * line_count(4, n, k) for k in range(1, kappa + 1)]
    reports = []
    for bi, start in enumerate(range(0, samples, batch)):
        size = min(batch, samples - start)
        counts = mono_pair_counts_batch(random_bit_matrix(4, n, size, seed + bi), 4, n, kappa)
        for col in range(size):
            qs = [Fraction(int(counts[k, col]), denoms[k]) for k in range(kappa)]
            label = f"random-seed{seed + bi}-col{col}"
            reports.append(Lemma2Report(n, kappa, weighted_q_sum(qs, kappa), chern, mid, rhs, label))
    return reports


# -- subcube structure ------------------------------------------------------------


def project_subcube(
    c: Coloring, coords: Sequence[int], a: int, b: int, fixed: Sequence[int]
) -> Coloring:
    """Restrict ``c`` to the two-valued subcube and relabel it as [2]^m.

    ``coords`` (1-based, ascending) vary over ``{a, b}``; every other
    coordinate takes the corresponding value from the full point ``fixed``.
    Value ``a`` maps to 1 and ``b`` to 2.
    """
    coords = sorted(coords)
    m = len(coords)
    bits = np.zeros(2**m, dtype=np.uint8)
    base = list(fixed)
    for r in range(2**m):
        p = list(base)
        for i, ci in enumerate(coords):
            p[ci - 1] = b if r >> i & 1 else a
        bits[r] = c.color(p)
    return Coloring(2, m, bits, f"subcube{tuple(coords)}:{a}{b}")


def subcube_pair_counts(
    c: Coloring, coords: Sequence[int], a: int, b: int, fixed: Sequence[int], k: int
) -> tuple[int, int]:
    """Collinear pairs ``l(a), l(b)`` of [4]^n with length ``k`` inside the subcube.

    Counted straight from [4]^n lines: the pair must vary exactly on
    ``coords`` and agree with ``fixed`` elsewhere.
    """
    coords = set(coords)
    pairs = mono = 0
    for line in enumerate_lines(c.t, c.n, k):
        ok = True
        for i, cell in enumerate(line.cells, start=1):
            if i in coords:
                if cell != VAR and cell not in (a, b):
                    ok = False
                    break
            elif cell == VAR or cell != fixed[i - 1]:
                ok = False
                break
        if not ok:
            continue
        pairs += 1
        mono += c.color(line.point(a)) == c.color(line.point(b))
    return pairs, mono
