import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hjlab.density import (
    DensityProfile,
    frac_str,
    line_census,
    line_histogram,
    mono_pair_counts_batch,
    mono_pair_fraction,
    p4_from_identity,
    parse_frac,
    q_profile,
    q_value,
    recombine_q,
    sampled_census,
    type_weight,
    typed_census,
    typed_census_all,
)
from hjlab.grid import (
    CollinearPair,
    Coloring,
    GridError,
    enumerate_lines,
    make_checkerboard,
    make_constant,
    make_random,
    pair_type,
    random_bit_matrix,
)


def naive_profile(c, k):
    counts = [0] * 5
    pairs = mono = 0
    for ln in enumerate_lines(4, c.n, k):
        cols = [c.color(ln.point(x)) for x in range(1, 5)]
        counts[sum(cols)] += 1
        for u, v in itertools.combinations(cols, 2):
            pairs += 1
            mono += u == v
    total = sum(counts)
    return (
        Fraction(counts[2], total),
        Fraction(counts[1] + counts[3], total),
        Fraction(counts[0] + counts[4], total),
        Fraction(mono, pairs),
    )


def naive_typed(c, k):
    pairs, mono = {}, {}
    for ln in enumerate_lines(4, c.n, k):
        for a, b in itertools.combinations(range(1, 5), 2):
            m = pair_type(CollinearPair(ln, a, b))
            pairs[m] = pairs.get(m, 0) + 1
            mono[m] = mono.get(m, 0) + (c.color(ln.point(a)) == c.color(ln.point(b)))
    return pairs, mono


def test_checkerboard_profile():
    d = line_census(make_checkerboard(4, 5), 1)
    assert (d.p2, d.p3, d.p4, d.q) == (1, 0, 0, Fraction(1, 3))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_constant_coloring_profile(k):
    d = line_census(make_constant(4, 3, 1), k)
    assert d.p4 == 1 and d.q == 1


@pytest.mark.parametrize("seed,k", [(7, 1), (7, 2), (7, 4), (3, 3)])
def test_census_matches_naive_recount(seed, k):
    c = make_random(4, 4, seed)
    d = line_census(c, k)
    assert (d.p2, d.p3, d.p4, d.q) == naive_profile(c, k)


def test_q_value_examples():
    mk = lambda p2, p3, p4: DensityProfile(4, 1, 1, 1, Fraction(p2), Fraction(p3), Fraction(p4), Fraction(0))
    assert q_value(mk(1, 0, 0)) == Fraction(1, 3)
    assert q_value(mk(0, 1, 0)) == Fraction(1, 2)
    assert q_value(mk(0, 0, 1)) == 1


def test_p4_identity_examples():
    assert p4_from_identity(Fraction(1, 3), Fraction(0)) == 0
    assert p4_from_identity(Fraction(1), Fraction(0)) == 1
    d = line_census(make_random(4, 4, 7), 1)
    assert p4_from_identity(d.q, d.p3) == d.p4


@given(st.integers(0, 2**32), st.integers(1, 5))
def test_profile_invariants(seed, n):
    c = make_random(4, n, seed)
    for k in range(1, n + 1):
        d = line_census(c, k)
        assert d.p2 + d.p3 + d.p4 == 1
        assert all(0 <= p <= 1 for p in (d.p2, d.p3, d.p4))
        assert d.q == d.p2 / 3 + d.p3 / 2 + d.p4 == mono_pair_fraction(c, k)
        assert p4_from_identity(d.q, d.p3) == d.p4


def test_profile_dict_round_trip():
    d = line_census(make_random(4, 4, 1), 2)
    assert DensityProfile.from_dict(d.to_dict()) == d
    assert parse_frac(frac_str(Fraction(-7, 12))) == Fraction(-7, 12)


def test_census_rejects_bad_length():
    with pytest.raises(GridError):
        line_census(make_random(4, 3, 0), 4)
    with pytest.raises(GridError):
        line_census(make_random(4, 3, 0), 0)


@pytest.mark.parametrize("t,n", [(2, 6), (3, 4), (4, 4)])
def test_mono_pair_fraction_any_t(t, n):
    c = make_random(t, n, 5)
    for k in range(1, n + 1):
        pairs = mono = 0
        for ln in enumerate_lines(t, n, k):
            cols = [c.color(ln.point(x)) for x in range(1, t + 1)]
            for u, v in itertools.combinations(cols, 2):
                pairs += 1
                mono += u == v
        assert mono_pair_fraction(c, k) == Fraction(mono, pairs)


@pytest.mark.parametrize("t,n", [(2, 7), (4, 4)])
def test_batched_counts_match_single(t, n):
    bits = random_bit_matrix(t, n, 6, seed=2)
    batch = mono_pair_counts_batch(bits, t, n, n)
    for col in range(bits.shape[1]):
        c = Coloring(t, n, bits[:, col])
        for k in range(1, n + 1):
            per_line = (t * (t - 1)) // 2
            total = per_line * sum(1 for _ in enumerate_lines(t, n, k))
            assert Fraction(int(batch[k - 1, col]), total) == mono_pair_fraction(c, k)


def test_histogram_total():
    c = make_random(4, 5, 1)
    h = line_histogram(c.bits, 4, 5)
    assert int(np.sum(h)) == 5**5 - 4**5


def test_type_weight_examples():
    assert type_weight(4, 4, 4) == 1
    assert type_weight(5, 1, 3) == Fraction(3, 8)
    for n in range(1, 31):
        for k in range(1, n + 1):
            assert sum(type_weight(n, k, m) for m in range(k, n + 1)) == 1


@pytest.mark.parametrize("seed,k", [(7, 1), (7, 2), (1, 3)])
def test_typed_counts_match_naive(seed, k):
    c = make_random(4, 4, seed)
    pairs, mono = naive_typed(c, k)
    for m, td in typed_census_all(c, k).items():
        assert td.pair_count == pairs.get(m, 0)
        assert td.mono_count == mono.get(m, 0)


def test_typed_constant_coloring():
    c = make_constant(4, 4, 0)
    for k in range(1, 5):
        for m in range(k, 5):
            assert typed_census(c, k, m).q_km == 1


def test_typed_checkerboard_in_range():
    td = typed_census(make_checkerboard(4, 4), 1, 1)
    assert td.q_km is not None and 0 <= td.q_km <= 1


def test_empty_type_is_flagged():
    c = make_random(4, 2, 0)
    with pytest.raises(GridError):
        typed_census(c, 2, 1)
    td = typed_census_all(c, 1)
    assert all(not v.empty for v in td.values())


@pytest.mark.parametrize("n", [3, 4, 5, 6])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_recombination_identity(n, seed):
    c = make_random(4, n, seed)
    for k in range(1, n + 1):
        assert recombine_q(n, typed_census_all(c, k)) == mono_pair_fraction(c, k)


def test_q_profile_lengths():
    c = make_random(4, 4, 0)
    assert q_profile(c, 4) == [mono_pair_fraction(c, k) for k in range(1, 5)]


@pytest.mark.parametrize("k", [1, 3, 6])
def test_sampled_census_converges(k):
    c = make_random(4, 10, 4)
    exact = mono_pair_fraction(c, k)
    s = sampled_census(c, k, 20000, seed=1)
    assert abs(s.q - float(exact)) <= 3 * s.q_stderr
    assert s.samples == 20000
