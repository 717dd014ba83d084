"""Acceptance criteria 1-10, each at its stated tolerance.

Run with ``pytest tests/test_acceptance.py``; a pass/fail line per criterion
is printed in the terminal summary (and to stdout with ``-s``).
"""
import cmath
import math
import time

import numpy as np
import pytest

import oracles
from acceptance_log import record
from resum import analysis as an
from resum import cli
from resum import contour as ct
from resum import model as md
from resum import reconstruct as rc
from resum.specfun import reference_lngamma, stirling_density


def test_criterion_01_hurwitz_continuation():
    g = rc.GlobalFunction(md.density_hurwitz(1, 1))
    worst, slowest = 0.0, 0.0
    for z in (-3, 2 + 2j, 0.99 * cmath.exp(1j * math.pi / 4), -10):
        t0 = time.perf_counter()
        v = rc.eval_finite_radius(g, z, 1e-10)
        slowest = max(slowest, time.perf_counter() - t0)
        worst = max(worst, abs(v - (-1 - cmath.log(1 - z) / z)))
    ok = worst < 1e-8 and slowest < 1.0
    assert record(1, "hurwitz(1,1) continuation", ok,
                  f"max err {worst:.2e} (< 1e-8), slowest point {slowest * 1e3:.1f} ms (< 1 s)")


def test_criterion_02_in_disk_series():
    zs = [r * cmath.exp(2j * math.pi * (j + 0.5 * (r == 0.5)) / 10) for r in (0.25, 0.5) for j in range(10)]
    worst = {}
    for label, m, c in (("hurwitz(1,2)", md.density_hurwitz(1, 2), lambda k: (k + 1.0) ** -2),
                        ("logmix(2)", md.density_logmix(2.0), lambda k: 1 / (k * k + math.log(k)))):
        g = rc.GlobalFunction(m)
        worst[label] = max(abs(rc.eval_finite_radius(g, z, 1e-12) - oracles.series(c, z)) for z in zs)
    ok = max(worst.values()) < 1e-8
    assert record(2, "in-disk series agreement (20 points)", ok,
                  ", ".join(f"{k} {v:.2e}" for k, v in worst.items()) + " (< 1e-8)")


def test_criterion_03_borel_summed_stirling():
    worst = 0.0
    for n in range(1, 21):
        r = ct.integrate_segment(lambda p: np.exp(-n * p) * stirling_density(p),
                                 ct.ray(0.0, 1.0, singular_start=True), 1e-13)
        exact = math.exp(reference_lngamma(n + 1) - (n + 1) * math.log(n) + n)
        worst = max(worst, abs(r.value.real / exact - 1),
                    abs(exact / oracles.stirling_moment(n) - 1))
    ok = worst < 1e-9
    assert record(3, "Stirling moments n!n^(-n-1)e^n, n=1..20", ok, f"max rel err {worst:.2e} (< 1e-9)")


def test_criterion_04_lngamma():
    worst = max(abs(rc.lngamma_via_sum(n) - reference_lngamma(n)) for n in (0.5, 2, 5, 10, 50))
    mp_worst = max(abs(reference_lngamma(n) - oracles.lngamma(n)) for n in (0.5, 2, 5, 10, 50))
    ok = worst < 1e-10 and mp_worst < 1e-12
    assert record(4, "ln Gamma via Laplace integral", ok,
                  f"max err {worst:.2e} (< 1e-10); reference vs mpmath {mp_worst:.1e}")


def test_criterion_05_entire_f3():
    worst = max(abs(rc.eval_f3(z, 1e-10) - oracles.f3_series(z)) for z in (-20, -5, 1, 10))
    ok = worst < 1e-7
    assert record(5, "entire f3 vs direct series", ok, f"max err {worst:.2e} (< 1e-7)")


def test_criterion_06_exp_sqrt():
    m = md.density_exp_sqrt(-1)
    dens = m.terms[0].density
    worst = 0.0
    for n in (1, 4, 9, 25):
        raw = ct.integrate_custom(lambda p: np.exp(-1.5 * ct.c1_log(p) - 0.25 / p - n * p),
                                  ct.c1_contour(), 1e-12).value
        via_model = ct.integrate_custom(lambda p: np.exp(-n * p) * dens(p), dens.contour(), 1e-12).value
        exact = math.exp(math.sqrt(n))
        worst = max(worst, abs(-raw / (2 * math.sqrt(math.pi)) / exact - 1), abs(via_model / exact - 1))
    f4 = rc.eval_f4(-1.0, 1e-10)
    ref = oracles.f4_minus1()
    ok = worst < 1e-7 and abs(f4 - ref) < 1e-4
    assert record(6, "e^sqrt(n) by spiral quadrature; f4(-1)", ok,
                  f"max rel err {worst:.2e} (< 1e-7); |f4(-1) - Euler sum| = {abs(f4 - ref):.2e} (< 1e-4)")


CUT_MODELS = [("hurwitz", {"a": 1, "b": 1}), ("hurwitz", {"a": 1, "b": 2}), ("hurwitz", {"a": 2, "b": 0.5}),
              ("logmix", {"b": 2}), ("logmix", {"b": 1}), ("stirling_f3", {}),
              ("exp_sqrt", {"gamma": 1}), ("exp_sqrt", {"gamma": -1})]


def test_criterion_07_jump_relation():
    worst = {}
    for name, params in CUT_MODELS:
        m = md.builtin_model(name, **params)
        label = name + "(" + ",".join(f"{k}={v}" for k, v in params.items()) + ")"
        worst[label] = max(an.jump_check(m, 0, t).residual
                           for t in (1.2, 1.5, 2.0, 3.7, 8.0))
    label, top = max(worst.items(), key=lambda kv: kv[1])
    ok = top < 1e-5
    assert record(7, f"jump relation, 5 points x {len(worst)} models", ok,
                  f"max residual {top:.2e} at {label} (< 1e-5)")


def test_criterion_08_coefficient_round_trip():
    worst = 0.0
    for m in (md.density_hurwitz(1, 1), md.density_hurwitz(2, 0.5)):
        g = rc.GlobalFunction(m)
        spec = rc.FunctionSpec(lambda z, g=g: rc.eval_finite_radius(g, z, 1e-12), (1.0,))
        for k in range(1, 11):
            worst = max(worst, abs(rc.coefficients_from_function(spec, k) - m.closed_form(k)))
    ok = worst < 1e-6
    assert record(8, "coefficients from reconstructed f, k=1..10", ok, f"max err {worst:.2e} (< 1e-6)")


def test_criterion_09_borel_summation():
    m = md.CoefficientModel.from_dict(
        {"terms": [{"a": [-1, 0], "density": {"builtin": "hurwitz", "params": {"a": 1, "b": 1}}}]})
    g = rc.GlobalFunction(m, 1.0, "borel")
    gap = classical = 0.0
    for x in (5, 10, 20):
        ei = rc.borel_sum(g, x, 1e-10)
        lap = rc.borel_sum(g, x, 1e-10, form="laplace")
        ref = oracles.classical_borel_alternating(x)
        gap = max(gap, abs(ei - lap))
        classical = max(classical, abs(ei - ref), abs(lap - ref))
    ok = gap < 1e-8 and classical < 1e-8
    assert record(9, "Borel sum: Ei vs Laplace vs classical", ok,
                  f"form gap {gap:.2e}, classical gap {classical:.2e} (< 1e-8)")


def test_criterion_10_property_suites(tmp_path, capsys):
    t0 = time.perf_counter()
    checks = {}
    # epsilon independence of the Hankel integral
    eps_gap = 0.0
    tol = 1e-10
    for z, k in ((0.3, 1.0), (0.7, 2.5), (1.5, 1.0), (2.5, 0.7)):
        f = lambda s: ct.cut_power(s, -z) * np.exp(-k * s) / (1.0 + s * s) if z < 1 \
            else ct.cut_power(s, 1 - z) * np.exp(-k * s) * ct.cut_log(s)
        vals = [ct.oint(f, e, tol).value for e in (0.05, 0.125, 0.25, 0.5)]
        eps_gap = max(eps_gap, max(abs(v - vals[0]) for v in vals))
    checks["eps-independence"] = (eps_gap < 10 * tol, f"{eps_gap:.1e}")
    # Hankel-Gamma identity
    hg = 0.0
    for z in (0.5, 1 / 3, 1.5):
        r = ct.oint(lambda s: ct.cut_power(s, -z) * np.exp(-s), 0.25, 1e-11).value
        hg = max(hg, abs(-(1j * cmath.exp(-1j * math.pi * z) / (2 * math.pi)) * r - 1 / math.gamma(z)))
    checks["Hankel-Gamma"] = (hg < 1e-8, f"{hg:.1e}")
    # decay scan monotonicity
    mono = all(an.decay_scan(rc.GlobalFunction(md.builtin_model(n, **p)), (10, 100, 1000),
                             (math.pi, math.pi / 2, -2.0)).all_decreasing
               for n, p in CUT_MODELS if n not in ("logmix",))
    mono = mono and an.decay_scan(rc.GlobalFunction(md.density_logmix(2.0)), (10, 100, 1000),
                                  (math.pi,)).all_decreasing
    checks["decay monotone"] = (mono, str(mono))
    # deterministic CSV
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        code = cli.main(["eval", "--model", "hurwitz:a=2,b=0.5", "--grid", "-3:-0.5:5,-1:1:4",
                         "--output", str(path)])
        outs.append(path.read_bytes() if code == 0 else None)
    checks["CSV determinism"] = (outs[0] is not None and outs[0] == outs[1], "identical bytes")
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    ok = all(v[0] for v in checks.values()) and elapsed < 120
    detail = "; ".join(f"{k} {'ok' if v[0] else 'FAILED'} ({v[1]})" for k, v in checks.items())
    assert record(10, "property suites", ok, f"{detail}; {elapsed:.1f} s (< 120 s)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
