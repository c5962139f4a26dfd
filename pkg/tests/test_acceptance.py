"""Acceptance gate: one pass/fail line per criterion.

Every criterion runs at its stated size and tolerance through the same
suite code the CLI uses.  Lines are printed as they finish and collected
for the terminal summary (see conftest.py).
"""

from fractions import Fraction

import pytest

from hjlab.density import type_weight
from hjlab.suites import RunConfig, run_suite

RESULTS: dict[str, str] = {}
_CACHE: dict[str, dict] = {}


def records(suite: str) -> dict:
    if suite not in _CACHE:
        rep = run_suite(RunConfig(suite, {}, workers=4, seed=0))
        _CACHE[suite] = {r.name: r for r in rep.records}
    return _CACHE[suite]


def verdict(label: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
    RESULTS[label] = line
    print(line)
    assert ok, line


def _all_pass(suite: str, names: list[str]) -> tuple[bool, str]:
    recs = records(suite)
    failing = [n for n in names if not recs[n].passed]
    return not failing, ("failing: " + ", ".join(failing)) if failing else ""


def test_c01_gadget_incidence():
    v = records("gadget")["gadget incidence"]
    verdict("C01 gadget incidence", v.passed, f"{v.values}")


@pytest.mark.slow
def test_c02_gadget_exhaustive():
    v = records("gadget")["gadget exhaustive"]
    ok = v.passed and v.values["assignments"] == 2**28 and v.values["max_odd"] == 14
    verdict("C02 gadget sweep over 2^28 assignments, max 14", ok,
            f"max_odd={v.values['max_odd']} attaining={v.values['attaining_count']}")


def test_c03_lemma1():
    names = [f"lemma1 exhaustive [2]^4 kappa={k}" for k in (2, 3, 4)]
    names += [f"lemma1 sampled [2]^12 kappa={k}" for k in (4, 8)]
    ok, detail = _all_pass("lemma1", names)
    recs = records("lemma1")
    ok &= all(recs[n].values["checked"] == 65536 for n in names[:3])
    ok &= all(recs[n].values["checked"] == 10**4 for n in names[3:])
    verdict("C03 chain bound on [2]^4 (exhaustive) and [2]^12 (10^4 samples)", ok, detail)


def test_c04_chain_identity():
    v = records("lemma1")["chain average identity [2]^5"]
    ok = v.passed and v.values["seeds"] == 10
    verdict("C04 chain average identity and co-membership on [2]^5", ok, f"{v.values}")


def test_c05_density_identities():
    v = records("lemma2")["density identities [4]^4"]
    verdict("C05 density identities on 100 colorings of [4]^4", v.passed)


def test_c06_checkerboard():
    v = records("lemma2")["checkerboard q(odd k) = 1/3"]
    verdict("C06 checkerboard on [4]^6 has q = 1/3 at odd k", v.passed)


def test_c07_recombination_and_mass():
    v = records("lemma2")["type recombination [4]^5"]
    mass = all(
        sum(type_weight(n, k, m) for m in range(k, n + 1)) == 1
        for n in range(1, 31) for k in range(1, n + 1)
    )
    verdict("C07 type recombination on [4]^5 and unit type mass for n <= 30", v.passed and mass)


def test_c08_multiplicity():
    recs = records("multiplicity")
    oracle_ok, detail = _all_pass(
        "multiplicity", ["multiplicity oracle [4]^4 k=1", "multiplicity oracle [4]^6 k=1, 50 lines"]
    )
    v = recs["min length-1 multiplicity [4]^9"]
    minimum = v.values["min_multiplicity"]
    ok = oracle_ok and minimum == 32
    verdict("C08 multiplicity oracle and min length-1 multiplicity on [4]^9 equal to 32", ok,
            f"{detail + '; ' if detail else ''}observed min={minimum} at {v.values['argmin_profile']}, max={v.values['max_multiplicity']} at {v.values['argmax_profile']}")


def test_c09_lemma4():
    ok, detail = _all_pass("lemma4", ["lemma4 [4]^5 k=1, 20 colorings", "per-embedding odd lines [4]^4"])
    verdict("C09 odd-line bound on 20 colorings of [4]^5 and <= 14 odd lines per embedding", ok, detail)


def test_c10_certification():
    recs = records("bound")
    names = ["certify n=10^11 kappa=368", "certify n=19012590257 kappa=240", "certify n=10^9 kappa=240"]
    ok, detail = _all_pass("bound", names + ["minimal n for kappa=240"])
    slow = [n for n in names if recs[n].elapsed >= 1.0]
    ok &= not slow
    ok &= recs["minimal n for kappa=240"].values["minimal_n"] <= 19012590257
    verdict("C10 certified margins (each under 1 s) and minimal n for kappa=240", ok,
            detail or (f"slow: {slow}" if slow else ""))


def test_c11_r_series():
    recs = records("bound")
    parts = []
    ok = True
    for kappa in (4, 240):
        v = recs[f"R-series kappa={kappa}"].values
        ok &= v["all_positive"] and v["pull_out_identity"]
        ok &= Fraction(v["total"]) == Fraction(v["expected_total"])
        if v["nonpositive"]:
            bad = ", ".join(f"R_{k}={Fraction(r)}" for k, r in v["nonpositive"].items())
            parts.append(f"kappa={kappa} nonpositive: {bad}")
    verdict("C11 R-series positive with correct sums for kappa in {4, 240}", ok, "; ".join(parts))


def test_c12_lower_bounds():
    names = ["ap-free N=34 t=4", "ap-free N=35 t=4 refuted", "lifted [4]^11 line-free",
             "[3]^3 witness line-free", "t=2 instances"]
    ok, detail = _all_pass("lower", names)
    v = records("lower")["lifted [4]^11 line-free"].values
    ok &= v["mono_lines"] == 0 and v["lines"] == 5**11 - 4**11
    verdict("C12 line-free witnesses for [4]^11 and [3]^3, N=35 refuted, t=2 instances", ok, detail)


def test_c13_interval_soundness():
    v = records("bound")["interval soundness"].values
    ok = v["trials"] == 10**4 and v["failures"] == 0
    verdict("C13 interval soundness over 10^4 random expressions", ok, f"failures={v['failures']}")
