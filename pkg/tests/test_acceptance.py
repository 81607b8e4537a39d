"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import json
import math
import os
import subprocess
import sys
import time

import mpmath
import numpy as np
import pytest
from scipy import integrate

from decaylaw import (
    BreitWigner,
    Canonical,
    QuadratureConfig,
    TimeGrid,
    closed_form_curve,
    decay_law_by_quadrature,
    dominant_oscillation_frequency,
    e1,
    e1_scaled,
    effective_hamiltonian,
    fit_tail_exponent,
    isolated_zero_check,
)
from decaylaw.analysis import envelope_trend, extremum_frequency, window_maxima
from decaylaw.config import as_dict, dumps, loads

CLI = [sys.executable, "-m", "decaylaw.cli"]


def report(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return ok


def e1_scaled_oracle(z):
    # exp(z) E1(z) = int_0^inf exp(-t) / (z + t) dt, valid off the cut
    with mpmath.workdps(30):
        z = mpmath.mpc(z)
        pts = sorted({0, 1, 10, max(0.0, -float(z.real))} | {mpmath.inf})
        return mpmath.quad(lambda t: mpmath.exp(-t) / (z + t), pts)


def e1_oracle(z):
    """(E1(z) as mpc, its scaled form as complex)."""
    w = e1_scaled_oracle(z)
    with mpmath.workdps(30):
        return mpmath.exp(-mpmath.mpc(z)) * w, complex(w)


def test_c01_special_function():
    rng = np.random.default_rng(20261019)
    mods = 10 ** rng.uniform(-2, 3, 200)
    args = rng.uniform(-math.pi + 0.05, math.pi - 0.05, 200)
    z = mods * np.exp(1j * args)
    worst = worst_scaled = 0.0
    representable = 0
    for zk in z:
        ref, ref_scaled = e1_oracle(zk)
        worst_scaled = max(worst_scaled, abs(complex(e1_scaled(zk)) - ref_scaled) / abs(ref_scaled))
        if abs(ref) < 1e300:
            # beyond that E1 itself leaves double range and only the scaled form exists
            ref = complex(ref)
            worst = max(worst, abs(complex(e1(zk)) - ref) / abs(ref))
            representable += 1
    # derivative identity on a moderate sample, central differences
    dworst = 0.0
    for zk in z[:50]:
        if abs(zk) > 50:
            continue
        h = 1e-6 * abs(zk)
        fd = (complex(e1(zk + h)) - complex(e1(zk - h))) / (2 * h)
        exact = -np.exp(-zk) / zk
        dworst = max(dworst, abs(fd - exact) / abs(exact))
    ok = worst < 1e-11 and worst_scaled < 1e-11 and dworst < 1e-6
    detail = (
        f"max rel err {worst:.2e} ({representable} representable), scaled {worst_scaled:.2e}, "
        f"derivative {dworst:.2e}"
    )
    assert report("1 special functions", ok, detail)


@pytest.mark.parametrize("s_R", [10.0, 100.0, 1000.0])
def test_c02_normalization(s_R):
    m = BreitWigner(s_R)
    pts = [s_R - 10, s_R, s_R + 10]
    core, _ = integrate.quad(m, 0, s_R + 1e3, points=pts, limit=2000, epsabs=1e-13, epsrel=1e-12)
    tail, _ = integrate.quad(m, s_R + 1e3, np.inf, epsabs=1e-15, epsrel=1e-13)
    total = core + tail
    ok = abs(total - 1) < 1e-9
    assert report(f"2 normalization s_R={s_R:g}", ok, f"|int - 1| = {abs(total - 1):.2e}")


@pytest.mark.slow
def test_c03_dual_oracle():
    grid = TimeGrid.logarithmic(0.01, 30.0, 500)
    start = time.perf_counter()
    worst = {}
    for s_R in (10.0, 100.0, 1000.0):
        m = BreitWigner(s_R)
        closed = m.amplitude(grid.points)
        quad = decay_law_by_quadrature(grid, m, QuadratureConfig(), workers=os.cpu_count() or 1)
        assert not quad.failed.any()
        worst[s_R] = float(np.max(np.abs(closed - quad.a)))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) < 1e-6 and elapsed < 60
    detail = ", ".join(f"s_R={k:g}: {v:.1e}" for k, v in worst.items()) + f"; {elapsed:.1f} s"
    assert report("3 dual-oracle amplitude", ok, detail)


def test_c04_derivative_consistency():
    rng = np.random.default_rng(4)
    worst = 0.0
    for s_R in (10.0, 100.0):
        m = BreitWigner(s_R)
        for x in rng.uniform(0.1, 30.0, 50):
            h = 1e-5 * x
            # fourth-order central difference of zeta
            fd = (-m.zeta(x + 2 * h) + 8 * m.zeta(x + h) - 8 * m.zeta(x - h) + m.zeta(x - 2 * h)) / (12 * h)
            exact = m.dzeta_dx(x)
            worst = max(worst, abs(fd - exact) / abs(exact))
    ok = worst < 1e-6
    assert report("4 derivative consistency", ok, f"max rel diff {worst:.2e}")


@pytest.mark.parametrize("s_R", [10.0, 100.0, 1000.0])
def test_c05_isolated_zeros(s_R):
    x = np.linspace(0.01, 30.0, 100_000)
    d = np.abs(BreitWigner(s_R).dzeta_dx(x))
    rep = isolated_zero_check(x, d)
    ok = rep.passed and rep.max_run_length <= 2
    assert report(f"5 isolated zeros s_R={s_R:g}", ok, f"max low run {rep.max_run_length}, {rep.verdict}")


@pytest.mark.parametrize("s_R", [10.0, 100.0])
def test_c06_oscillation_frequency(s_R):
    expected = s_R / (2 * math.pi)
    x = np.linspace(0.0, 20.0, 40_001)
    f = closed_form_curve(x, BreitWigner(s_R)).f
    dom = dominant_oscillation_frequency(x, f, expected)
    ext = extremum_frequency(x, f)
    ok = abs(dom / expected - 1) < 0.05 and abs(ext / expected - 1) < 0.05
    assert report(
        f"6 oscillation frequency s_R={s_R:g}", ok, f"dominant {dom:.4f}, extrema {ext:.4f}, expected {expected:.4f}"
    )


def test_c07_envelope_growth():
    x = np.linspace(5.0, 25.0, 200_001)
    f = closed_form_curve(x, BreitWigner(1000.0)).f
    maxima = window_maxima(x, np.abs(f), 5.0, 25.0, 1.0)
    trend = envelope_trend(maxima, 0.9)
    ok = trend == "nondecreasing"
    ratio = float(np.min(maxima[1:] / maxima[:-1]))
    assert report("7 envelope growth", ok, f"{trend}, min window ratio {ratio:.3f}")


@pytest.mark.parametrize("s_R", [10.0, 100.0])
def test_c08_late_time_tail(s_R):
    grid = TimeGrid.logarithmic(100.0, 1000.0, 2000)
    curve = closed_form_curve(grid, BreitWigner(s_R), with_deviation=False)
    fit = fit_tail_exponent(curve, (100.0, 1000.0))
    ok = abs(fit.exponent + 2) < 0.05
    assert report(f"8 late-time tail s_R={s_R:g}", ok, f"exponent {fit.exponent:.5f}")


def test_c09_exponential_regime():
    x = np.linspace(0.5, 10.0, 20_000)
    curve = closed_form_curve(x, BreitWigner(1000.0))
    dev = float(np.max(np.abs(curve.P / curve.P_c - 1)))
    ok = dev < 0.05
    assert report("9 exponential regime", ok, f"max |P/P_c - 1| = {dev:.2e}")


def test_c10_effective_hamiltonian():
    s_R = 1000.0
    target = s_R - 0.5j
    can = max(abs(effective_hamiltonian(Canonical(s_R), x).h - target) for x in (0.1, 1.0, 5.0, 30.0))
    m = BreitWigner(s_R)
    h_bw = effective_hamiltonian(m, 1.0).h
    rel_bw = abs(h_bw - target) / abs(target)
    # analytic vs finite-difference path on the same amplitude
    fd_worst = 0.0
    for s, x in ((1000.0, 1.0), (100.0, 2.0), (10.0, 5.0)):
        mm = BreitWigner(s)
        analytic = effective_hamiltonian(mm, x).h
        numeric = effective_hamiltonian(mm.amplitude, x, step=1e-3 / s).h
        fd_worst = max(fd_worst, abs(analytic - numeric) / abs(analytic))
    ok = can < 1e-12 and rel_bw < 0.01 and fd_worst < 1e-6
    detail = f"canonical dev {can:.1e}, BW rel dev {rel_bw:.2e}, analytic vs FD {fd_worst:.1e}"
    assert report("10 effective Hamiltonian", ok, detail)


def _run(args, **kw):
    return subprocess.run(CLI + args, capture_output=True, text=True, **kw)


def test_c11_cli_contract(tmp_path):
    args = ["deviation", "--s-r", "100", "--x-max", "5", "--points", "300", "--format", "json"]
    first, second = _run(args), _run(args)
    deterministic = first.returncode == 0 and first.stdout == second.stdout and first.stdout != ""

    neg = _run(["compare", "--s-r", "10", "--points", "20", "--unnormalized"])
    pos = _run(["compare", "--s-r", "10", "--points", "20"])
    exit_ok = neg.returncode == 4 and pos.returncode == 0

    # config round-trip: the echoed config reproduces the run byte for byte
    echoed = json.loads(first.stdout)["meta"]["config"]
    cfg_text = dumps(loads("".join(f"{k} = {v}\n" for k, v in echoed.items())))
    path = tmp_path / "run.cfg"
    path.write_text(cfg_text)
    again = _run(["deviation", "--config", str(path)])
    roundtrip = again.returncode == 0 and again.stdout == first.stdout and dumps(loads(cfg_text)) == cfg_text
    roundtrip = roundtrip and as_dict(loads(cfg_text)) == {k: v for k, v in echoed.items()}

    ok = deterministic and exit_ok and roundtrip
    detail = f"deterministic={deterministic}, exit codes {neg.returncode}/{pos.returncode}, round-trip={roundtrip}"
    assert report("11 CLI contract", ok, detail)
