"""k-embeddings of [4]^4 into [4]^n and gadget-line multiplicities.

A k-embedding maps each of the ``n`` output coordinates either to a
constant or to one of the four source coordinates, with every source used
exactly ``k`` times.  Composing it with a gadget line of length ``s`` gives
a line of length ``s*k``.  The multiplicity of a line is the number of
(embedding, gadget line) pairs producing it; it depends only on the counts
``n1..n4`` of its constant cells.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .density import frac_str, line_census
from .gadget import build_gadget
from .grid import Coloring, GridError, LinePattern, enumerate_lines, point_rank

P3_WEIGHTS = (Fraction(4, 15), Fraction(6, 15), Fraction(4, 15), Fraction(1, 15))
ODD_CAP = Fraction(14, 15)


def multinomial(*parts: int) -> int:
    out, total = 1, 0
    for p in parts:
        total += p
        out *= math.comb(total, p)
    return out


def falling(r: int, s: int) -> int:
    """``r (r-1) ... (r-s+1)``."""
    out = 1
    for i in range(s):
        out *= r - i
    return out


@dataclass(frozen=True)
class EmbeddingSpec:
    """Output cells: ``v`` in 1..4 is a constant, ``-j`` copies source coordinate ``j``."""

    n: int
    k: int
    cells: tuple[int, ...]

    def __post_init__(self):
        if len(self.cells) != self.n:
            raise GridError(f"embedding needs {self.n} cells, got {len(self.cells)}")
        for j in range(1, 5):
            if self.cells.count(-j) != self.k:
                raise GridError(f"source {j} used {self.cells.count(-j)} times, expected {self.k}")

    def apply(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(c if c > 0 else x[-c - 1] for c in self.cells)

    def compose(self, line: LinePattern) -> LinePattern:
        return LinePattern(tuple(c if c > 0 else line.cells[-c - 1] for c in self.cells), 4)


def embedding_count(n: int, k: int) -> int:
    if 4 * k > n:
        raise GridError(f"need 4k <= n, got k={k}, n={n}")
    return multinomial(k, k, k, k, n - 4 * k) * 4 ** (n - 4 * k)


def enumerate_embeddings(n: int, k: int) -> Iterator[EmbeddingSpec]:
    if 4 * k > n:
        raise GridError(f"need 4k <= n, got k={k}, n={n}")
    coords = range(n)

    def place(j: int, free: tuple[int, ...], cells: list[int]):
        if j == 5:
            for consts in itertools.product(range(1, 5), repeat=len(free)):
                out = list(cells)
                for i, v in zip(free, consts):
                    out[i] = v
                yield EmbeddingSpec(n, k, tuple(out))
            return
        for chosen in itertools.combinations(free, k):
            out = list(cells)
            for i in chosen:
                out[i] = -j
            yield from place(j + 1, tuple(i for i in free if i not in chosen), out)

    yield from place(1, tuple(coords), [0] * n)


# -- multiplicities ------------------------------------------------------------------


def profile_multiplicity(profile: Sequence[int], k: int, s: int) -> int:
    """Multiplicity of a line of length ``s*k`` with constant counts ``profile``."""
    c = [math.comb(nv, k) for nv in profile]
    if s == 1:
        return sum(math.prod(c[v] for v in range(4) if v != j) for j in range(4))
    if s == 2:
        pairs = itertools.combinations(range(4), 2)
        return math.comb(2 * k, k) * sum(math.prod(c[v] for v in range(4) if v not in S) for S in pairs)
    if s == 3:
        return multinomial(k, k, k) * sum(c)
    if s == 4:
        return multinomial(k, k, k, k)
    raise GridError(f"gadget lines have length 1..4, got s={s}")


def line_multiplicity(line: LinePattern, k: int) -> int:
    if line.t != 4:
        raise GridError("multiplicities are defined on [4]^n")
    s, rem = divmod(line.length, k)
    if rem or not 1 <= s <= 4:
        raise GridError(f"line length {line.length} is not k, 2k, 3k or 4k for k={k}")
    return profile_multiplicity(line.const_profile(), k, s)


def multiplicity_oracle(n: int, k: int) -> Counter:
    """Brute force: compose every embedding with every gadget line and count results."""
    gadget = build_gadget().lines
    out: Counter = Counter()
    for emb in enumerate_embeddings(n, k):
        for g in gadget:
            out[emb.compose(g).cells] += 1
    return out


def compositions(total: int, parts: int = 4) -> Iterator[tuple[int, ...]]:
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for c in cuts:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def profile_extremes(n: int, k: int, s: int) -> dict:
    """Min and max multiplicity over all constant profiles of a length ``s*k`` line."""
    vals = {p: profile_multiplicity(p, k, s) for p in compositions(n - s * k)}
    lo = min(vals, key=vals.get)
    hi = max(vals, key=vals.get)
    return {"min": vals[lo], "argmin": lo, "max": vals[hi], "argmax": hi}


@dataclass(frozen=True)
class MultiplicityBounds:
    n: int
    k: int
    M1: int
    M2: int
    M3: int
    M4: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.M1, self.M2, self.M3, self.M4)


def min_multiplicity(n: int, k: int) -> MultiplicityBounds:
    """The four balanced-profile multiplicity formulas, with floored binomial tops."""
    if 4 * k > n:
        raise GridError(f"need 4k <= n, got k={k}, n={n}")
    return MultiplicityBounds(
        n,
        k,
        4 * math.comb((n - k) // 4, k) ** 3,
        6 * math.comb(2 * k, k) * math.comb((n - 2 * k) // 4, k) ** 2,
        4 * multinomial(k, k, k) * math.comb((n - 3 * k) // 4, k),
        multinomial(k, k, k, k),
    )


# -- the odd-line inequality ------------------------------------------------------------


def p3_plus(values: Sequence[Fraction]) -> Fraction:
    if len(values) != 4:
        raise ValueError("need the four values at k, 2k, 3k, 4k")
    return sum((w * Fraction(v) for w, v in zip(P3_WEIGHTS, values)), Fraction(0))


@dataclass(frozen=True)
class Lemma4Report:
    n: int
    k: int
    p3: tuple[Fraction, ...]
    factor: Fraction
    lhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs <= ODD_CAP

    @property
    def degenerate(self) -> bool:
        """``16k^2 >= n``: the factor is not positive and the bound says nothing."""
        return self.factor <= 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "p3": [frac_str(v) for v in self.p3],
            "factor": frac_str(self.factor),
            "lhs": frac_str(self.lhs),
            "holds": self.holds,
            "degenerate": self.degenerate,
        }


def lemma4_check(p3s: Sequence[Fraction], n: int, k: int) -> Lemma4Report:
    if 4 * k > n:
        raise GridError(f"need k <= n/4, got k={k}, n={n}")
    factor = 1 - Fraction(16 * k * k, n)
    return Lemma4Report(n, k, tuple(Fraction(v) for v in p3s), factor, factor * p3_plus(p3s))


def lemma4_from_coloring(c: Coloring, k: int) -> Lemma4Report:
    p3s = [line_census(c, i * k).p3 for i in range(1, 5)]
    return lemma4_check(p3s, c.n, k)


def weighted_odd_count_identity(c: Coloring, k: int = 1) -> dict:
    """Count odd composed gadget lines two ways and compare with ``14 |L_k|``."""
    if c.t != 4:
        raise GridError("needs a coloring of [4]^n")
    n = c.n
    gadget = build_gadget().lines
    color = c.bits

    def is_odd(line: LinePattern) -> bool:
        return sum(int(color[r]) for r in line.ranks()) % 2 == 1

    per_embedding = []
    for emb in enumerate_embeddings(n, k):
        per_embedding.append(sum(is_odd(emb.compose(g)) for g in gadget))
    direct = sum(per_embedding)
    weighted = 0
    for s in range(1, 5):
        for line in enumerate_lines(4, n, s * k):
            if is_odd(line):
                weighted += line_multiplicity(line, k)
    n_emb = embedding_count(n, k)
    return {
        "n": n,
        "k": k,
        "embeddings": n_emb,
        "direct_odd": direct,
        "weighted_odd": weighted,
        "identity_holds": direct == weighted,
        "max_per_embedding": max(per_embedding),
        "bound_holds": direct <= 14 * n_emb,
    }


def product_factor(n: int, k: int, s: int) -> Fraction:
    """Exact falling-power ratio for the length-``s*k`` term, divided by ``n^{4k}``."""
    factors = {
        1: ((n - k, k), (n - 5 * k, 3 * k)),
        2: ((n - 2 * k, 2 * k), (n - 6 * k, 2 * k)),
        3: ((n - 3 * k, 3 * k), (n - 7 * k, k)),
        4: ((n - 4 * k, 4 * k),),
    }[s]
    out = Fraction(1)
    for base, power in factors:
        out *= Fraction(base, n) ** power
    return out


def embedded_point_rank(emb: EmbeddingSpec, x: Sequence[int]) -> int:
    return point_rank(emb.apply(x), 4, emb.n)
