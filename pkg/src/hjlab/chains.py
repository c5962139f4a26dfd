"""Chains, binomial chain weights and the collinear-pair bound on [2]^n.

A permutation ``sigma`` of ``1..n`` gives the chain ``C_0, ..., C_n`` where
``C_i`` has value 2 exactly on ``sigma(1..i)``.  Any two chain points are
collinear, and ``q(k)`` on [2]^n is the average over all chains of the
binomially weighted statistic :func:`q_k_sigma`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .density import frac_str, mono_pair_counts_batch
from .grid import Coloring, GridError, line_count, random_bit_matrix
from .interval import DEFAULT_PRECISION, IntervalValue

EXHAUSTIVE_WORK_LIMIT = 10**7


def check_permutation(sigma: Sequence[int], n: int) -> tuple[int, ...]:
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise GridError(f"{sigma} is not a permutation of 1..{n}")
    return sigma


def chain_points(sigma: Sequence[int], n: int) -> list[tuple[int, ...]]:
    sigma = check_permutation(sigma, n)
    p = [1] * n
    out = [tuple(p)]
    for s in sigma:
        p[s - 1] = 2
        out.append(tuple(p))
    return out


def chain_weight(n: int, i: int, j: int) -> Fraction:
    """Coefficient of the (i, j) chain indicator in ``q(j - i, sigma)``."""
    if not 0 <= i <= j <= n:
        raise GridError(f"need 0 <= i <= j <= n, got i={i}, j={j}, n={n}")
    d = n - (j - i)
    return Fraction(math.comb(d, i), 2**d)


@dataclass(frozen=True)
class WeightTable:
    """All chain weights of [2]^n, indexed as ``w[i][d]`` with ``d = j - i``."""

    n: int

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return chain_weight(self.n, *ij)

    def pascal_holds(self) -> bool:
        """``w(i,j) == (w(i-1,j) + w(i,j+1)) / 2`` wherever all three exist."""
        n = self.n
        for i in range(1, n + 1):
            for j in range(i, n):
                if self[i, j] != (self[i - 1, j] + self[i, j + 1]) / 2:
                    return False
        return True


def q_k_sigma(c: Coloring, sigma: Sequence[int], k: int) -> Fraction:
    if c.t != 2:
        raise GridError(f"chains live in [2]^n, got t={c.t}")
    n = c.n
    if not 1 <= k <= n:
        raise GridError(f"length {k} outside 1..{n}")
    colors = [c.color(p) for p in chain_points(sigma, n)]
    hits = sum(math.comb(n - k, i) for i in range(n - k + 1) if colors[i] == colors[i + k])
    return Fraction(hits, 2 ** (n - k))


def chain_average(c: Coloring, k: int) -> Fraction:
    """Average of :func:`q_k_sigma` over all ``n!`` permutations."""
    total = sum(q_k_sigma(c, s, k) for s in itertools.permutations(range(1, c.n + 1)))
    return total / math.factorial(c.n)


def co_membership_count(n: int, i: int, j: int, p: Sequence[int], q: Sequence[int]) -> int:
    """Number of permutations whose chain has ``C_i == p`` and ``C_j == q``."""
    p, q = tuple(p), tuple(q)
    count = 0
    for s in itertools.permutations(range(1, n + 1)):
        pts = chain_points(s, n)
        if pts[i] == p and pts[j] == q:
            count += 1
    return count


def w_star(n: int, kappa: int, h: int) -> Fraction:
    """Least chain weight over ``h <= i <= j <= h + kappa``, via the endpoint rule."""
    if not 0 <= h <= n - kappa:
        raise GridError(f"need 0 <= h <= n - kappa, got h={h}, n={n}, kappa={kappa}")
    return min(chain_weight(n, h, h), chain_weight(n, h + kappa, h + kappa))


def w_star_bruteforce(n: int, kappa: int, h: int) -> Fraction:
    return min(
        chain_weight(n, i, j)
        for i in range(h, h + kappa + 1)
        for j in range(i, h + kappa + 1)
    )


def clique_mono_pairs_lower(kappa: int) -> Fraction:
    """Lower bound on monochromatic pairs among ``kappa + 1`` points."""
    if kappa < 1:
        raise GridError("kappa must be at least 1")
    return Fraction(kappa * kappa - 1, 4)


def clique_min_mono_pairs(size: int) -> int:
    """Exact minimum over 2-colorings of ``size`` points of monochromatic pairs."""
    return min(math.comb(a, 2) + math.comb(size - a, 2) for a in range(size + 1))


def central_binomial_ratio(n: int) -> Fraction:
    return Fraction(math.comb(n, n // 2), 2**n)


def sqrt_2_over_pi_n(n, prec: int = DEFAULT_PRECISION) -> IntervalValue:
    """Enclosure of ``sqrt(2 / (pi * n))``."""
    return (IntervalValue.exact(2, prec) / (IntervalValue.pi(prec) * n)).sqrt()


def lemma1_rhs(n: int, kappa: int, prec: int = DEFAULT_PRECISION) -> IntervalValue:
    loss = sqrt_2_over_pi_n(n, prec) * kappa
    return (1 - loss) * clique_mono_pairs_lower(kappa)


def weighted_q_sum(qs: Sequence[Fraction], kappa: int) -> Fraction:
    """``sum_{k=1..kappa} (kappa - k + 1) q(k)`` from ``qs = [q(1), ...]``."""
    return sum(((kappa - k + 1) * qs[k - 1] for k in range(1, kappa + 1)), Fraction(0))


def per_sigma_lhs(c: Coloring, sigma: Sequence[int], kappa: int) -> Fraction:
    return weighted_q_sum([q_k_sigma(c, sigma, k) for k in range(1, kappa + 1)], kappa)


def per_sigma_rhs(n: int, kappa: int) -> Fraction:
    """``(kappa^2 - 1)/4 * sum_h w_star(n, kappa, h)``, exact."""
    return clique_mono_pairs_lower(kappa) * sum(w_star(n, kappa, h) for h in range(n - kappa + 1))


@dataclass(frozen=True)
class Lemma1Report:
    n: int
    kappa: int
    lhs: Fraction
    rhs: IntervalValue

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs.hi

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "lhs": frac_str(self.lhs),
            "rhs": self.rhs.to_strings(),
            "holds": self.holds,
        }


def lemma1_check(c: Coloring, kappa: int, prec: int = DEFAULT_PRECISION) -> Lemma1Report:
    if c.t != 2:
        raise GridError(f"lemma1_check needs a coloring of [2]^n, got t={c.t}")
    if not 1 <= kappa <= c.n:
        raise GridError(f"need 1 <= kappa <= n, got kappa={kappa}, n={c.n}")
    counts = mono_pair_counts_batch(c.bits[:, None], 2, c.n, kappa)[:, 0]
    qs = [Fraction(int(counts[k - 1]), line_count(2, c.n, k)) for k in range(1, kappa + 1)]
    return Lemma1Report(c.n, kappa, weighted_q_sum(qs, kappa), lemma1_rhs(c.n, kappa, prec))


def all_colorings_bits(t: int, n: int, start: int, stop: int) -> np.ndarray:
    """Colorings with indices ``start..stop-1`` as columns; bit r of the index is point r."""
    idx = np.arange(start, stop, dtype=np.uint64)
    r = np.arange(t**n, dtype=np.uint64)
    return ((idx[None, :] >> r[:, None]) & np.uint64(1)).astype(np.uint8)


def lemma1_sweep(
    n: int,
    kappa: int,
    exhaustive: bool = False,
    samples: int = 1000,
    seed: int = 0,
    prec: int = DEFAULT_PRECISION,
    batch: int = 1 << 12,
) -> dict:
    """Check the [2]^n bound on many colorings at once.

    Returns ``{checked, violations, min_slack}``; ``min_slack`` is the least
    ``lhs - upper(rhs)`` seen, as a decimal string.
    """
    if not 1 <= kappa <= n:
        raise GridError(f"need 1 <= kappa <= n, got kappa={kappa}, n={n}")
    size = 2**n
    if exhaustive:
        total = 2**size
        if total * size > EXHAUSTIVE_WORK_LIMIT * n:
            raise GridError(f"exhaustive sweep over 2^{size} colorings exceeds the work limit")
    else:
        total = samples
    rhs = lemma1_rhs(n, kappa, prec)
    line_counts = [line_count(2, n, k) for k in range(1, kappa + 1)]
    denom = math.lcm(*line_counts)
    factors = np.array([(kappa - k + 1) * (denom // line_counts[k - 1]) for k in range(1, kappa + 1)], dtype=object)
    threshold = math.ceil(rhs.hi * denom)
    checked = violations = 0
    min_num = None
    for bi, start in enumerate(range(0, total, batch)):
        stop = min(start + batch, total)
        if exhaustive:
            bits = all_colorings_bits(2, n, start, stop)
        else:
            bits = random_bit_matrix(2, n, stop - start, seed + bi)
        counts = mono_pair_counts_batch(bits, 2, n, kappa).astype(object)
        nums = factors @ counts
        violations += sum(1 for v in nums if v < threshold)
        lo = min(nums)
        min_num = lo if min_num is None else min(min_num, lo)
        checked += stop - start
    slack = Fraction(min_num, denom) - rhs.hi
    return {
        "n": n,
        "kappa": kappa,
        "mode": "exhaustive" if exhaustive else "sampled",
        "seed": None if exhaustive else seed,
        "checked": checked,
        "violations": violations,
        "min_lhs": frac_str(Fraction(min_num, denom)),
        "rhs": rhs.to_strings(),
        "min_slack": IntervalValue(slack, slack).to_strings(12)[0],
    }

