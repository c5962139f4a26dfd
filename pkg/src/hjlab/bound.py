"""Assembly of the final bound: combinators, coefficient ledger and certified margin.

The margin

    1/6 - 4/(3 kappa) - (4/3) eps(n, kappa) - (7/45) / (1 - kappa^2/n)

with ``eps(n, kappa) = exp(-(n-kappa)/8) + 3 kappa sqrt(2/(pi (n-kappa)))``
is evaluated as an :class:`IntervalValue`.  A positive lower endpoint
certifies that every 2-coloring of [4]^n has a monochromatic line.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .chains import sqrt_2_over_pi_n
from .embedding import P3_WEIGHTS, p3_plus
from .grid import GridError
from .interval import DEFAULT_PRECISION, MIN_PRECISION, IntervalValue

MAX_PRECISION = 4096
SEARCH_LIMIT = 2**63


def q_plus(values: Sequence[Fraction]) -> Fraction:
    """Weighted average of ``q(k), q(2k), q(3k), q(4k)`` with weights 4,6,4,1 over 15."""
    return p3_plus(values)


def _check_kappa(kappa: int) -> None:
    if kappa < 4 or kappa % 4:
        raise GridError(f"kappa must be a positive multiple of 4, got {kappa}")


def pulled_coefficient(kappa: int, k: int) -> Fraction:
    """Coefficient of ``q(k)`` in ``sum_{k'<=kappa/4} (kappa+1-2k') q_plus(k')``."""
    total = Fraction(0)
    for i, c in enumerate(P3_WEIGHTS, start=1):
        if k % i == 0 and 1 <= k // i <= kappa // 4:
            total += c * (kappa + 1 - 2 * (k // i))
    return total


@dataclass(frozen=True)
class RSeries:
    kappa: int
    R: tuple[Fraction, ...]

    @property
    def total(self) -> Fraction:
        return sum(self.R, Fraction(0))

    @property
    def all_positive(self) -> bool:
        return all(r > 0 for r in self.R)

    @property
    def expected_total(self) -> Fraction:
        return Fraction(5 * self.kappa**2 + 8 * self.kappa, 16)

    @property
    def nonpositive_indices(self) -> list[int]:
        return [k for k, r in enumerate(self.R, start=1) if r <= 0]

    @property
    def positive_total(self) -> Fraction:
        """Sum of the positive leftovers; a sound replacement when some ``R_k <= 0``."""
        return sum((r for r in self.R if r > 0), Fraction(0))


def r_series(kappa: int) -> RSeries:
    """Leftover coefficients ``R_k = (kappa+1-k) - pulled_coefficient(kappa, k)``."""
    _check_kappa(kappa)
    return RSeries(kappa, tuple(kappa + 1 - k - pulled_coefficient(kappa, k) for k in range(1, kappa + 1)))


def pull_out_sides(kappa: int, qs: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Both sides of the pull-out identity for ``qs = [q(1), ..., q(kappa)]``."""
    _check_kappa(kappa)
    lhs = sum(((kappa + 1 - k) * qs[k - 1] for k in range(1, kappa + 1)), Fraction(0))
    pulled = sum(
        (
            (kappa + 1 - 2 * kp) * q_plus([qs[i * kp - 1] for i in range(1, 5)])
            for kp in range(1, kappa // 4 + 1)
        ),
        Fraction(0),
    )
    rest = sum((r * q for r, q in zip(r_series(kappa).R, qs)), Fraction(0))
    return lhs, pulled + rest


def coefficient_cap_check(kappa: int) -> dict:
    """Every pulled coefficient stays below ``kappa+1-k``.

    The four-term value ``kappa + 1 - 103k/90`` bounds the coefficient only
    when every divisor term is present (``12 | k`` and ``k <= kappa/4``);
    ``cap_103_90_violations`` lists the ``k`` where the coefficient exceeds it.
    """
    _check_kappa(kappa)
    coeffs = [pulled_coefficient(kappa, k) for k in range(1, 2 * kappa + 1)]
    below = all(coeffs[k - 1] < kappa + 1 - k for k in range(1, kappa + 1))
    zero_above = all(c == 0 for c in coeffs[kappa:])
    cap = [
        k for k in range(12, kappa + 1, 12)
        if coeffs[k - 1] > kappa + 1 - Fraction(103 * k, 90)
    ]
    full_terms = [k for k in range(12, kappa // 4 + 1, 12)]
    return {
        "kappa": kappa,
        "all_below_cap": below,
        "zero_above_kappa": zero_above,
        "four_term_k": full_terms,
        "four_term_exact": all(coeffs[k - 1] == kappa + 1 - Fraction(103 * k, 90) for k in full_terms),
        "cap_103_90_violations": cap,
    }


# -- certified evaluation ------------------------------------------------------------


def epsilon(n: int, kappa: int, prec: int = DEFAULT_PRECISION) -> IntervalValue:
    if kappa >= n:
        raise GridError(f"need kappa < n, got kappa={kappa}, n={n}")
    chern = IntervalValue.exact(Fraction(-(n - kappa), 8), prec).exp()
    return chern + sqrt_2_over_pi_n(n - kappa, prec) * (3 * kappa)


@dataclass(frozen=True)
class BoundParams:
    n: int
    kappa: int

    def __post_init__(self):
        _check_kappa(self.kappa)
        if self.kappa**2 >= self.n:
            raise GridError(f"need kappa^2 < n, got kappa={self.kappa}, n={self.n}")

    def constraints(self) -> dict:
        """Side conditions for applying the odd-line bound at ``k* <= kappa/4``.

        The odd-line bound needs ``k* <= n/4`` and the final assembly needs
        ``4k* < sqrt(n)``; ``binding`` names the one admitting fewer ``k*``.
        """
        kstar = self.kappa // 4
        by_sqrt = (math.isqrt(self.n - 1) // 4) if self.n > 1 else 0  # largest k with 16k^2 < n
        by_quarter = self.n // 4
        return {
            "kstar_max": kstar,
            "four_kstar_lt_sqrt_n": 16 * kstar * kstar < self.n,
            "kstar_le_n_over_4": 4 * kstar <= self.n,
            "kappa_le_n_over_4": 4 * self.kappa <= self.n,
            "binding": "4k* < sqrt(n)" if by_sqrt <= by_quarter else "k* <= n/4",
        }


def final_margin(params: BoundParams, prec: int = DEFAULT_PRECISION) -> IntervalValue:
    n, kappa = params.n, params.kappa
    eps = epsilon(n, kappa, prec)
    one = IntervalValue.exact(1, prec)
    odd_term = (one - Fraction(kappa * kappa, n)).reciprocal() * Fraction(7, 45)
    return one * Fraction(1, 6) - Fraction(4, 3 * kappa) - eps * Fraction(4, 3) - odd_term


@dataclass(frozen=True)
class BoundReport:
    n: int
    kappa: int
    epsilon: IntervalValue
    margin: IntervalValue
    verdict: str
    precision: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "epsilon": self.epsilon.to_strings(),
            "margin": self.margin.to_strings(),
            "verdict": self.verdict,
            "precision": self.precision,
            "constraints": BoundParams(self.n, self.kappa).constraints(),
        }


def certify_positive(params: BoundParams, prec: int = 64, max_prec: int = MAX_PRECISION) -> BoundReport:
    """Refine precision until the margin's sign is certain.

    The verdict is ``"positive"`` only when the lower endpoint is above zero,
    ``"negative"`` when the upper endpoint is below zero, and ``"undecided"``
    if ``max_prec`` bits do not separate the interval from zero.
    """
    prec = max(prec, MIN_PRECISION)
    while True:
        margin = final_margin(params, prec)
        if margin.certainly_positive():
            verdict = "positive"
        elif margin.certainly_negative():
            verdict = "negative"
        elif prec * 2 <= max_prec:
            prec *= 2
            continue
        else:
            verdict = "undecided"
        return BoundReport(params.n, params.kappa, epsilon(params.n, params.kappa, prec), margin, verdict, prec)


def _verdict(n: int, kappa: int, prec: int) -> str:
    return certify_positive(BoundParams(n, kappa), prec).verdict


def minimal_n_for_kappa(kappa: int, prec: int = 64, limit: int = SEARCH_LIMIT) -> int | None:
    """Least ``n`` certified positive at this ``kappa``, or ``None`` below ``limit``.

    The margin is nondecreasing in ``n``, so an exponential bracket followed
    by bisection finds the threshold.  Probes that contradict monotonicity
    raise ``RuntimeError``.
    """
    _check_kappa(kappa)
    # as n -> infinity the margin tends to 1/6 - 4/(3 kappa) - 7/45
    if Fraction(1, 6) - Fraction(4, 3 * kappa) - Fraction(7, 45) <= 0:
        return None
    lo = kappa * kappa  # invalid, treated as not positive
    hi = lo + 1
    while _verdict(hi, kappa, prec) != "positive":
        lo = hi
        hi = lo * 2
        if hi >= limit:
            return None
    probes: list[tuple[int, bool]] = []
    while hi - lo > 1:
        mid = (lo + hi) // 2
        v = _verdict(mid, kappa, prec)
        if v == "undecided":
            raise RuntimeError(f"margin at n={mid}, kappa={kappa} undecided at max precision")
        pos = v == "positive"
        probes.append((mid, pos))
        if pos:
            hi = mid
        else:
            lo = mid
    for n_probe, pos in probes:
        if pos != (n_probe >= hi):
            raise RuntimeError(f"margin not monotone in n near n={n_probe}, kappa={kappa}")
    return hi


def optimize_kappa(kappas: Iterable[int], prec: int = 64, workers: int = 1) -> dict:
    """The ``kappa`` with the smallest certified ``n``; ties go to the smaller ``kappa``."""
    kappas = sorted(set(kappas))
    if not kappas:
        raise GridError("empty kappa range")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda k: (k, minimal_n_for_kappa(k, prec)), kappas))
    feasible = [(n, k) for k, n in results if n is not None]
    if not feasible:
        return {"kappa": None, "n": None, "per_kappa": dict(results), "feasible": False}
    n_best, k_best = min(feasible)
    return {"kappa": k_best, "n": n_best, "per_kappa": dict(results), "feasible": True}


def limit_margin(kappa: int) -> Fraction:
    """Margin as ``n -> infinity`` at fixed ``kappa``."""
    return Fraction(1, 6) - Fraction(4, 3 * kappa) - Fraction(7, 45)


def asymptotic_limit() -> Fraction:
    """Margin as ``n, kappa -> infinity`` with ``kappa^2/n -> 0``."""
    return Fraction(1, 6) - Fraction(7, 45)

