"""Verification suites run by the command line tool.

Every suite appends named checks to a :class:`SuiteReport`.  Given the same
seed and precision a suite produces the same values regardless of the
worker count.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bound import (
    BoundParams,
    certify_positive,
    coefficient_cap_check,
    minimal_n_for_kappa,
    optimize_kappa,
    pull_out_sides,
    r_series,
)
from .chains import chain_average, co_membership_count, lemma1_sweep
from .density import (
    line_census,
    mono_pair_fraction,
    p4_from_identity,
    recombine_q,
    type_weight,
    typed_census_all,
)
from .embedding import (
    embedding_count,
    lemma4_from_coloring,
    line_multiplicity,
    min_multiplicity,
    multiplicity_oracle,
    profile_extremes,
    weighted_odd_count_identity,
)
from .gadget import build_gadget, exhaustive_gadget_search, gadget_support, incidence_check
from .grid import Coloring, GridError, enumerate_lines, make_checkerboard, make_random
from .interval import MIN_PRECISION
from .lower import (
    IntervalColoring,
    hj2_instance_checks,
    hj32_witness,
    lift_to_grid,
    search_ap_free,
    verify_line_free,
)
from .report import SuiteReport
from .soundness import soundness_trials
from .subcube import (
    chernoff_tail,
    exact_lower_tail,
    lemma2_sweep,
    midskip_exact,
    midskip_loss,
    truncated_mass_report,
    truncated_weight_floor,
)

SUITES = ("lemma1", "lemma2", "gadget", "lemma4", "multiplicity", "bound", "lower", "all")


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)
    workers: int = 1
    seed: int = 0
    precision: int = 96
    out: str | None = None

    def __post_init__(self):
        if self.workers < 1:
            raise GridError(f"workers must be at least 1, got {self.workers}")
        if self.precision < MIN_PRECISION:
            raise GridError(f"precision must be at least {MIN_PRECISION}, got {self.precision}")

    def echo(self) -> dict:
        return {
            "command": self.command,
            "options": dict(sorted(self.options.items())),
            "workers": self.workers,
            "seed": self.seed,
            "precision": self.precision,
        }


# -- lemma1 ----------------------------------------------------------------------


def _lemma1_run(n: int, kappa: int, exhaustive: bool, samples: int, seed: int, prec: int):
    r = lemma1_sweep(n, kappa, exhaustive=exhaustive, samples=samples, seed=seed, prec=prec)
    return r["violations"] == 0, r


def _chain_identity(seeds: int, base_seed: int):
    n = 5
    mismatches = 0
    for s in range(seeds):
        c = make_random(2, n, base_seed + s)
        for k in range(1, n + 1):
            if chain_average(c, k) != mono_pair_fraction(c, k):
                mismatches += 1
    comember_bad = 0
    points = list(itertools.product((1, 2), repeat=n))
    for p in points:
        for q in points:
            if not all(a <= b for a, b in zip(p, q)):
                continue
            i, j = sum(x == 2 for x in p), sum(x == 2 for x in q)
            expected = math.factorial(i) * math.factorial(j - i) * math.factorial(n - j)
            if co_membership_count(n, i, j, p, q) != expected:
                comember_bad += 1
    ok = mismatches == 0 and comember_bad == 0
    return ok, {"n": n, "seeds": seeds, "average_mismatches": mismatches, "co_membership_mismatches": comember_bad}


def suite_lemma1(rep: SuiteReport, cfg: RunConfig) -> None:
    o = cfg.options
    if o.get("n") is not None:
        n, kappa = o["n"], o.get("kappa") or 2
        rep.run(
            f"lemma1 n={n} kappa={kappa}",
            lambda: _lemma1_run(n, kappa, o.get("exhaustive", False), o.get("samples") or 1000, cfg.seed, cfg.precision),
        )
        return
    for kappa in (2, 3, 4):
        rep.run(f"lemma1 exhaustive [2]^4 kappa={kappa}", lambda k=kappa: _lemma1_run(4, k, True, 0, 0, cfg.precision))
    for kappa in (4, 8):
        rep.run(
            f"lemma1 sampled [2]^12 kappa={kappa}",
            lambda k=kappa: _lemma1_run(12, k, False, 10**4, cfg.seed, cfg.precision),
        )
    rep.run("chain average identity [2]^5", lambda: _chain_identity(10, cfg.seed))


# -- lemma2 and the density identities -----------------------------------------------


def _density_identities(count: int, seed: int):
    bad = 0
    for s in range(count):
        c = make_random(4, 4, seed + s)
        for k in range(1, 5):
            d = line_census(c, k)
            ok = (
                d.p2 + d.p3 + d.p4 == 1
                and d.q == d.p2 / 3 + d.p3 / 2 + d.p4
                and p4_from_identity(d.q, d.p3) == d.p4
                and d.q == mono_pair_fraction(c, k)
            )
            bad += not ok
    return bad == 0, {"colorings": count, "grid": "[4]^4", "failures": bad}


def _checkerboard():
    c = make_checkerboard(4, 6)
    qs = {k: mono_pair_fraction(c, k) for k in range(1, 7, 2)}
    return all(q == Fraction(1, 3) for q in qs.values()), {"grid": "[4]^6", "q_odd_k": qs}


def _type_recombination(seeds: int, seed: int):
    bad = 0
    for s in range(seeds):
        c = make_random(4, 5, seed + s)
        for k in range(1, 6):
            if recombine_q(5, typed_census_all(c, k)) != mono_pair_fraction(c, k):
                bad += 1
    mass_bad = [
        (n, k) for n in range(1, 31) for k in range(1, n + 1)
        if sum(type_weight(n, k, m) for m in range(k, n + 1)) != 1
    ]
    return bad == 0 and not mass_bad, {"seeds": seeds, "recombination_failures": bad, "mass_failures": mass_bad}


def _truncation_bounds():
    dom_bad = []
    mass_bad = []
    for n in range(4, 41):
        for kappa in range(1, n // 4 + 1):
            for m in range(n + 1):
                f = truncated_weight_floor(n, kappa, m)
                if any(f > type_weight(n, k, m) for k in range(1, min(kappa, m) + 1)):
                    dom_bad.append((n, kappa, m))
            if not truncated_mass_report(n, kappa)["ceil_ok"]:
                mass_bad.append((n, kappa))
    return not dom_bad and not mass_bad, {"domination_failures": dom_bad[:10], "mass_failures": mass_bad[:10]}


def _tail_bounds(prec: int):
    tail_bad = [
        (n, kappa) for n in range(4, 45) for kappa in range(1, n // 4 + 1)
        if n - kappa <= 40 and exact_lower_tail(n, kappa) > chernoff_tail(n, kappa, prec).hi
    ]
    mid_bad = [
        (n, kappa) for n in range(4, 65) for kappa in range(1, n // 4 + 1)
        if n - kappa <= 60 and midskip_exact(n, kappa) > midskip_loss(n, kappa, prec).hi
    ]
    return not tail_bad and not mid_bad, {"chernoff_failures": tail_bad, "midskip_failures": mid_bad}


def _lemma2_run(n: int, kappa: int, samples: int, seed: int, prec: int):
    reports = lemma2_sweep(n, kappa, samples, seed, prec)
    fails = [r.to_dict() for r in reports if not r.holds]
    return not fails, {
        "n": n,
        "kappa": kappa,
        "samples": samples,
        "violations": len(fails),
        "rhs": reports[0].rhs if reports else None,
        "min_lhs": min((r.lhs for r in reports), default=None),
        "first_violations": fails[:5],
    }


def suite_lemma2(rep: SuiteReport, cfg: RunConfig) -> None:
    o = cfg.options
    if o.get("n") is not None:
        n, kappa, samples = o["n"], o.get("kappa") or 1, o.get("samples") or 100
        rep.run(f"lemma2 n={n} kappa={kappa}", lambda: _lemma2_run(n, kappa, samples, cfg.seed, cfg.precision))
        return
    rep.run("lemma2 sampled [4]^8 kappa=2", lambda: _lemma2_run(8, 2, 1000, cfg.seed, cfg.precision))
    rep.run("density identities [4]^4", lambda: _density_identities(100, cfg.seed))
    rep.run("checkerboard q(odd k) = 1/3", _checkerboard)
    rep.run("type recombination [4]^5", lambda: _type_recombination(10, cfg.seed))
    rep.run("truncated weight floors", _truncation_bounds)
    rep.run("chernoff and mid-skip enclosures", lambda: _tail_bounds(cfg.precision))


# -- gadget --------------------------------------------------------------------------


def _incidence():
    r = incidence_check()
    ok = r["all_even"] and r["center_count"] == 4 and r["covered_non_center_all_two"]
    return ok, {
        "all_even": r["all_even"],
        "center_count": r["center_count"],
        "covered_non_center_all_two": r["covered_non_center_all_two"],
        "support_size": len(gadget_support()),
        "lines": len(build_gadget()),
    }


def _exhaustive(workers: int, checkpoint: str | None):
    r = exhaustive_gadget_search(symmetry=True, workers=workers, checkpoint=checkpoint)
    return r["max_odd"] == 14 and r["assignments"] == 2**28, r


def suite_gadget(rep: SuiteReport, cfg: RunConfig) -> None:
    o = cfg.options
    both = not o.get("check_incidence") and not o.get("exhaustive")
    if both or o.get("check_incidence"):
        rep.run("gadget incidence", _incidence)
    if both or o.get("exhaustive"):
        rep.run("gadget exhaustive", lambda: _exhaustive(cfg.workers, o.get("checkpoint")))


# -- lemma4 and multiplicities ---------------------------------------------------------


def _lemma4_run(n: int, k: int, seeds: list[int]):
    reports = [lemma4_from_coloring(make_random(4, n, s), k) for s in seeds]
    return all(r.holds for r in reports), {
        "n": n,
        "k": k,
        "M": min_multiplicity(n, k).as_tuple(),
        "reports": reports,
    }


def _per_embedding(count: int, seed: int):
    worst = 0
    bad = 0
    for s in range(count):
        r = weighted_odd_count_identity(make_random(4, 4, seed + s), 1)
        worst = max(worst, r["max_per_embedding"])
        bad += not r["identity_holds"]
    return worst <= 14 and bad == 0, {
        "colorings": count,
        "embeddings": embedding_count(4, 1),
        "max_per_embedding": worst,
        "identity_failures": bad,
    }


def _oracle_match(n: int, k: int, sample: int | None, seed: int):
    oracle = multiplicity_oracle(n, k)
    lines = [ln for s in range(1, 5) for ln in enumerate_lines(4, n, s * k)]
    if sample is not None:
        lines = random.Random(seed).sample(lines, sample)
    bad = [str(ln) for ln in lines if line_multiplicity(ln, k) != oracle.get(ln.cells, 0)]
    return not bad, {
        "n": n,
        "k": k,
        "lines_checked": len(lines),
        "embeddings": embedding_count(n, k),
        "mismatches": bad[:10],
    }


def _min_length_one(n: int):
    ext = profile_extremes(n, 1, 1)
    M = min_multiplicity(n, 1)
    return ext["min"] == 32 and M.M1 == 32, {
        "n": n,
        "min_multiplicity": ext["min"],
        "argmin_profile": ext["argmin"],
        "max_multiplicity": ext["max"],
        "argmax_profile": ext["argmax"],
        "M1": M.M1,
    }


def _multiplicity_checks(rep: SuiteReport, cfg: RunConfig, oracle: bool) -> None:
    if oracle:
        rep.run("multiplicity oracle [4]^4 k=1", lambda: _oracle_match(4, 1, None, cfg.seed))
        rep.run("multiplicity oracle [4]^6 k=1, 50 lines", lambda: _oracle_match(6, 1, 50, cfg.seed))
    rep.run("min length-1 multiplicity [4]^9", lambda: _min_length_one(9))


def suite_lemma4(rep: SuiteReport, cfg: RunConfig) -> None:
    o = cfg.options
    if o.get("n") is not None:
        n, k = o["n"], o.get("k") or 1
        seeds = o.get("seeds") or list(range(cfg.seed, cfg.seed + 20))
        rep.run(f"lemma4 n={n} k={k}", lambda: _lemma4_run(n, k, seeds))
        return
    rep.run("lemma4 [4]^5 k=1, 20 colorings", lambda: _lemma4_run(5, 1, list(range(cfg.seed, cfg.seed + 20))))
    rep.run("per-embedding odd lines [4]^4", lambda: _per_embedding(20, cfg.seed))


def suite_multiplicity(rep: SuiteReport, cfg: RunConfig) -> None:
    o = cfg.options
    if o.get("n") is not None:
        n, k = o["n"], o.get("k") or 1
        if o.get("oracle"):
            rep.run(f"multiplicity oracle n={n} k={k}", lambda: _oracle_match(n, k, o.get("sample"), cfg.seed))
        rep.run(
            f"multiplicity extremes n={n} k={k}",
            lambda: (True, {s: profile_extremes(n, k, s) for s in range(1, 5) if s * k <= n}
                     | {"M": min_multiplicity(n, k).as_tuple()}),
        )
        return
    _multiplicity_checks(rep, cfg, oracle=o.get("oracle", True))


# -- bound -----------------------------------------------------------------------------


def _certify(n: int, kappa: int, expect: str, prec: int):
    r = certify_positive(BoundParams(n, kappa), prec)
    return r.verdict == expect, r.to_dict() | {"expected": expect}


def _r_series(kappa: int, seed: int):
    rs = r_series(kappa)
    rng = random.Random(seed)
    identity_ok = True
    for _ in range(5):
        qs = [Fraction(rng.randint(0, 1000), rng.randint(1, 1000)) for _ in range(kappa)]
        lhs, rhs = pull_out_sides(kappa, qs)
        identity_ok &= lhs == rhs
    ok = rs.all_positive and rs.total == rs.expected_total and identity_ok
    return ok, {
        "kappa": kappa,
        "all_positive": rs.all_positive,
        "nonpositive": {k: rs.R[k - 1] for k in rs.nonpositive_indices},
        "total": rs.total,
        "expected_total": rs.expected_total,
        "positive_total": rs.positive_total,
        "pull_out_identity": identity_ok,
        "coefficients": coefficient_cap_check(kappa),
    }


def _search(kappa: int, prec: int, at_most: int | None):
    n = minimal_n_for_kappa(kappa, prec)
    ok = n is not None and (at_most is None or n <= at_most)
    return ok, {"kappa": kappa, "minimal_n": n, "at_most": at_most}


def suite_bound(rep: SuiteReport, cfg: RunConfig) -> None:
    o = cfg.options
    action = o.get("action")
    prec = cfg.precision
    if action == "certify":
        n, kappa = o["n"], o["kappa"]
        rep.run(
            f"certify n={n} kappa={kappa}",
            lambda: (lambda r: (r.verdict == "positive", r.to_dict()))(certify_positive(BoundParams(n, kappa), prec)),
        )
        return
    if action == "search":
        lo, hi, step = o.get("kappa_min") or 4, o.get("kappa_max") or 400, o.get("kappa_step") or 4
        kappas = [k for k in range(lo, hi + 1, step) if k % 4 == 0]
        if not kappas:
            raise GridError("no multiple of 4 in the kappa range")
        rep.run(f"search kappa {lo}..{hi}", lambda: (lambda r: (r["feasible"], r))(optimize_kappa(kappas, prec, cfg.workers)))
        return
    rep.run("certify n=10^11 kappa=368", lambda: _certify(10**11, 368, "positive", prec))
    rep.run("certify n=19012590257 kappa=240", lambda: _certify(19012590257, 240, "positive", prec))
    rep.run("certify n=10^9 kappa=240", lambda: _certify(10**9, 240, "negative", prec))
    rep.run("minimal n for kappa=240", lambda: _search(240, prec, 19012590257))
    for kappa in (4, 240):
        rep.run(f"R-series kappa={kappa}", lambda k=kappa: _r_series(k, cfg.seed))
    rep.run(
        "interval soundness",
        lambda: (lambda r: (r["failures"] == 0, r))(soundness_trials(10**4, cfg.seed, prec)),
    )


# -- lower -----------------------------------------------------------------------------


def _ap_free(N: int, t: int):
    stats: dict = {}
    w = search_ap_free(N, t, stats)
    return w is not None, {"N": N, "t": t, "found": w is not None, "witness": w.to_string() if w else None} | stats


def _lift_verify(N: int, t: int, n: int, workers: int, checkpoint: str | None):
    base = search_ap_free(N, t)
    if base is None:
        return False, {"N": N, "t": t, "n": n, "error": "no base coloring"}
    r = verify_line_free(lift_to_grid(base, t, n), workers, checkpoint)
    return r["mono_lines"] == 0, r | {"base": base.to_string()}


def _hj32():
    c = hj32_witness()
    r = verify_line_free(c)
    return r["mono_lines"] == 0 and r["lines"] == 37, r | {"bits": "".join(map(str, c.bits.tolist()))}


def _hj2():
    r = hj2_instance_checks()
    return r["line_free_2_1"] and r["all_mono_2_2"], r


def _read_base(path: str) -> IntervalColoring:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise GridError(f"cannot read base coloring {path}: {e.strerror or e}") from e
    if not text.strip() or set(text.strip()) - {"0", "1"}:
        raise GridError(f"{path} is not a 0/1 string")
    return IntervalColoring.from_string(text)


def _read_coloring(path: str) -> Coloring:
    try:
        return Coloring.load(path)
    except (OSError, ValueError) as e:
        raise GridError(f"cannot read coloring {path}: {e}") from e


def suite_lower(rep: SuiteReport, cfg: RunConfig) -> None:
    o = cfg.options
    action = o.get("action")
    if action == "ap-free":
        N, t = o.get("N") or 34, o.get("t") or 4

        def ap():
            ok, values = _ap_free(N, t)
            if ok and o.get("save"):
                Path(o["save"]).write_text(values["witness"] + "\n")
            return ok, values

        rep.run(f"ap-free N={N} t={t}", ap)
        return
    if action == "lift":
        t, n = o.get("t") or 4, o.get("n") or 11
        if o.get("base"):
            base = _read_base(o["base"])
        else:
            base = search_ap_free(o.get("N") or n * (t - 1) + 1, t)
            if base is None:
                raise GridError("no AP-free base coloring exists for these parameters; pass --base")
        grid = lift_to_grid(base, t, n)

        def lift():
            if o.get("save"):
                grid.save(o["save"])
            r = verify_line_free(grid, cfg.workers, o.get("checkpoint"))
            return r["mono_lines"] == 0, r | {"base": base.to_string(), "saved": o.get("save")}

        rep.run(f"lift t={t} n={n}", lift)
        return
    if action == "verify":
        if not o.get("coloring"):
            raise GridError("lower verify needs --coloring")
        c = _read_coloring(o["coloring"])
        rep.run(
            f"verify {c.label or o['coloring']}",
            lambda: (lambda r: (r["mono_lines"] == 0, r))(verify_line_free(c, cfg.workers, o.get("checkpoint"))),
        )
        return
    rep.run("ap-free N=34 t=4", lambda: _ap_free(34, 4))
    rep.run("ap-free N=35 t=4 refuted", lambda: (lambda r: (not r[0], r[1]))(_ap_free(35, 4)))
    rep.run("lifted [4]^11 line-free", lambda: _lift_verify(34, 4, 11, cfg.workers, cfg.options.get("checkpoint")))
    rep.run("[3]^3 witness line-free", _hj32)
    rep.run("t=2 instances", _hj2)


# -- dispatch --------------------------------------------------------------------------

_RUNNERS = {
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "gadget": suite_gadget,
    "lemma4": suite_lemma4,
    "multiplicity": suite_multiplicity,
    "bound": suite_bound,
    "lower": suite_lower,
}


def run_suite(cfg: RunConfig) -> SuiteReport:
    if cfg.command not in SUITES:
        raise GridError(f"unknown suite {cfg.command!r}")
    rep = SuiteReport(cfg.command, __version__, cfg.echo())
    if cfg.command == "all":
        base = RunConfig("all", {}, cfg.workers, cfg.seed, cfg.precision)
        for name in ("gadget", "lemma1", "lemma2", "multiplicity", "lemma4", "bound", "lower"):
            _RUNNERS[name](rep, base)
    else:
        _RUNNERS[cfg.command](rep, cfg)
    return rep

