"""Random expression trees evaluated both as certified intervals and with mpmath.

Each expression is a nested tuple: ``("leaf", Fraction)``, ``("pi",)``,
``(op, a)`` for ``op`` in ``neg, sqrt, exp`` or ``(op, a, b)`` for
``add, sub, mul, div``.  Domains are guarded while building, so every
generated tree evaluates without error at any precision.
"""

from __future__ import annotations

import random
from fractions import Fraction

import mpmath

from .interval import DEFAULT_PRECISION, IntervalValue

REFERENCE_DPS = 80
EXP_ARG_LIMIT = 60


def _leaf(rng: random.Random):
    if rng.random() < 0.08:
        return ("pi",)
    return ("leaf", Fraction(rng.randint(-1000, 1000), rng.randint(1, 1000)))


def eval_interval(expr, prec: int = DEFAULT_PRECISION) -> IntervalValue:
    op = expr[0]
    if op == "leaf":
        return IntervalValue.exact(expr[1], prec)
    if op == "pi":
        return IntervalValue.pi(prec)
    a = eval_interval(expr[1], prec)
    if op == "neg":
        return -a
    if op == "sqrt":
        return a.sqrt()
    if op == "exp":
        return a.exp()
    b = eval_interval(expr[2], prec)
    return {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}[op](b)


def eval_reference(expr):
    """High-precision float value; call inside ``mpmath.workdps``."""
    op = expr[0]
    if op == "leaf":
        return mpmath.mpf(expr[1].numerator) / expr[1].denominator
    if op == "pi":
        return +mpmath.pi
    a = eval_reference(expr[1])
    if op == "neg":
        return -a
    if op == "sqrt":
        return mpmath.sqrt(a)
    if op == "exp":
        return mpmath.exp(a)
    b = eval_reference(expr[2])
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    return a / b


def random_expression(rng: random.Random, depth: int = 4, prec: int = DEFAULT_PRECISION):
    """Build a tree bottom-up, rejecting nodes whose interval leaves the domain."""
    if depth == 0 or rng.random() < 0.25:
        return _leaf(rng)
    while True:
        op = rng.choice(("add", "sub", "mul", "div", "neg", "sqrt", "exp"))
        a = random_expression(rng, depth - 1, prec)
        va = eval_interval(a, prec)
        if op == "neg":
            return (op, a)
        if op == "sqrt":
            if va.lo >= 0:
                return (op, a)
            continue
        if op == "exp":
            if abs(va.lo) <= EXP_ARG_LIMIT and abs(va.hi) <= EXP_ARG_LIMIT:
                return (op, a)
            continue
        b = random_expression(rng, depth - 1, prec)
        if op == "div":
            vb = eval_interval(b, prec)
            if vb.lo <= 0 <= vb.hi or min(abs(vb.lo), abs(vb.hi)) < Fraction(1, 10**6):
                continue
        return (op, a, b)


def soundness_trials(count: int, seed: int, prec: int = DEFAULT_PRECISION) -> dict:
    """Check that ``count`` random intervals enclose their reference values.

    The reference carries ``REFERENCE_DPS`` digits, so a slack of
    ``10^-(REFERENCE_DPS - 20)`` relative to the magnitude absorbs its own
    rounding without masking interval errors, which are far coarser.
    """
    rng = random.Random(seed)
    failures = []
    max_rel_width = Fraction(0)
    with mpmath.workdps(REFERENCE_DPS):
        slack = mpmath.mpf(10) ** -(REFERENCE_DPS - 20)
        for i in range(count):
            expr = random_expression(rng, prec=prec)
            v = eval_interval(expr, prec)
            ref = eval_reference(expr)
            tol = slack * (1 + abs(ref))
            lo = mpmath.mpf(v.lo.numerator) / v.lo.denominator
            hi = mpmath.mpf(v.hi.numerator) / v.hi.denominator
            if not (lo - tol <= ref <= hi + tol):
                failures.append({"index": i, "expr": repr(expr), "reference": mpmath.nstr(ref, 30)})
            scale = max(abs(v.lo), abs(v.hi), Fraction(1))
            max_rel_width = max(max_rel_width, v.width / scale)
    return {
        "trials": count,
        "seed": seed,
        "precision": prec,
        "failures": len(failures),
        "first_failures": failures[:5],
        "max_relative_width": float(max_rel_width),
    }
