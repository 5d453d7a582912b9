"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (``-s`` is not needed; the
summary lines bypass output capture).
"""
import math
import time
import warnings

import numpy as np
import pytest

from platenet.analyticity import qn_coefficients, qn_residual, qn_roots, witness_sequence
from platenet.modal import batch_eigenvalues, build_mode_block, dissipation_rate, mode_eigenvalues, spectral_abscissa
from platenet.parameters import SystemParameters
from platenet.resolvent import TruncationWarning, geometric_grid, mode_norms, sweep
from platenet.simulation import initial_data, propagate_all, simulate
from platenet.spectrum import explicit_spectrum, interval_spectrum

pytestmark = pytest.mark.acceptance

DEFAULT = SystemParameters()
THETAS = (0.0, 0.25, 0.5, 0.75, 1.0)


@pytest.fixture
def report(capsys):
    """Print ``criterion k: PASS|FAIL`` with details and runtime, then assert."""
    start = time.perf_counter()

    def emit(number, ok, detail, budget=None):
        elapsed = time.perf_counter() - start
        timing = f"{elapsed:.2f}s" + (f" (budget {budget:g}s)" if budget else "")
        in_budget = budget is None or elapsed < budget
        status = "PASS" if ok and in_budget else "FAIL"
        with capsys.disabled():
            print(f"\ncriterion {number}: {status} | {detail} | {timing}")
        assert ok, detail
        assert in_budget, f"runtime {elapsed:.2f}s over budget {budget}s"

    return emit


def test_criterion_1_dissipation_identity(report):
    rng = np.random.default_rng(1)
    combos = [(th, s) for th in THETAS for s in (1.0, 1e2, 1e6)]
    blocks = {c: build_mode_block(DEFAULT.replace(theta=c[0]), c[1]) for c in combos}
    worst = naive = 0.0
    for k in range(1000):
        th, sigma = combos[k % len(combos)]
        blk = blocks[th, sigma]
        y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        y /= np.linalg.norm(y)
        state = y / blk.scale  # unit energy norm
        z = state[3]
        expected = -DEFAULT.delta * sigma**th * (z.real**2 + z.imag**2)
        worst = max(worst, abs(dissipation_rate(state, blk) - expected))
        # informational: the dense weighted product carries cancellation from the skew part
        dense = float(np.sum(blk.weights * (blk.matrix @ state) * np.conj(state)).real)
        naive = max(naive, abs(dense - expected))
    report(1, worst <= 1e-12, f"1000 states, max |Re<BU,U> + delta sigma^theta |z|^2| = {worst:.2e} "
                              f"(tol 1e-12); dense-product evaluation for reference: {naive:.2e}", 1.0)


def test_criterion_2_modal_stability(report):
    spec = interval_spectrum(math.pi, 256)
    parts, ok = [], True
    for th in THETAS:
        p = DEFAULT.replace(theta=th)
        re_max = batch_eigenvalues(p, spec.sigmas).real.max()
        a, mode = spectral_abscissa(p, spec)
        ok &= bool(re_max <= -1e-6) and a == re_max
        parts.append(f"theta={th}: abscissa={a:.9f} (mode {mode})")
    report(2, ok, "; ".join(parts), 5.0)


def test_criterion_3_bounded_resolvent(report):
    p = DEFAULT.replace(theta=0.5)
    grid = geometric_grid(1.0, 1e3, 61)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        coarse = sweep(p, interval_spectrum(math.pi, 256), grid)
        fine = sweep(p, interval_spectrum(math.pi, 512), grid)
    diffs = [abs(a.global_norm - b.global_norm) / b.global_norm
             for a, b in zip(coarse, fine) if a.error is None and a.attaining_mode < 128]
    sup = max(s.global_norm for s in coarse)
    ok = len(diffs) > 0 and max(diffs) <= 0.01 and all(s.error is None for s in coarse + fine)
    report(3, ok, f"{len(diffs)}/61 points compared, max rel diff {max(diffs):.2e} (tol 1e-2), "
                  f"sup ||R|| = {sup:.6g}", 30.0)


def test_criterion_4_coefficient_exponents(report):
    spec = interval_spectrum(math.pi, 200)
    parts, ok = [], True
    for th in (0.0, 0.5, 0.9):
        fit = witness_sequence(DEFAULT, spec, th).coefficient_fit
        ok &= abs(fit.exponent + 1 + th) <= 0.05 and fit.r_squared >= 0.999
        parts.append(f"theta={th}: slope {fit.exponent:.4f} (target {-1 - th}), r2 {fit.r_squared:.6f}")
    report(4, ok, "; ".join(parts), 5.0)


def test_criterion_5_amplified_growth(report):
    spec = interval_spectrum(math.pi, 200)
    parts, ok = [], True
    for th in (0.0, 0.5, 0.9):
        fit = witness_sequence(DEFAULT, spec, th).amplified_fit
        ok &= abs(fit.exponent - (1 - th)) <= 0.1
        parts.append(f"theta={th}: exponent {fit.exponent:.4f} (target {1 - th:.1f})")
    report(5, ok, "; ".join(parts), 5.0)


def test_criterion_6_theta_one_branch(report):
    rep = witness_sequence(DEFAULT, interval_spectrum(math.pi, 4096), 1.0)
    errs = [abs(pt.coefficient - pt.closed_form) / abs(pt.closed_form) for pt in rep.points]
    slope = rep.coefficient_fit.exponent
    ok = abs(slope) <= 0.05 and max(errs) <= 1e-8
    report(6, ok, f"|nu| slope {slope:.5f} (target 0 +- 0.05), max closed-form rel err {max(errs):.2e}; "
                  f"readings: norm-ratio exponent {rep.amplified_fit.exponent:.4f}, "
                  f"unit-forcing exponent {rep.unit_forcing_fit.exponent:.4f}")


def test_criterion_7_root_formulas(report):
    rng = np.random.default_rng(7)
    worst_res = worst_vieta = 0.0
    for _ in range(100):
        a, b, d = 10 ** rng.uniform(-2, 2, 3)
        g = 10 ** rng.uniform(-2, 2) * rng.choice([-1, 1])
        p = SystemParameters(a, b, g, d, rng.uniform(0, 1))
        sigma = 10 ** rng.uniform(-2, 6)
        s_plus, s_minus = qn_roots(p, sigma)
        bq, cq = qn_coefficients(p, sigma)
        worst_res = max(worst_res, qn_residual(p, sigma, s_plus), qn_residual(p, sigma, s_minus))
        worst_vieta = max(worst_vieta, abs(s_plus * s_minus - cq) / cq, abs(s_plus + s_minus - bq) / bq)
    s_plus, s_minus = qn_roots(DEFAULT, 1e8)
    al, be, g2 = DEFAULT.alpha, DEFAULT.beta, DEFAULT.gamma**2
    lim = max(abs(s_plus / 1e16 / (al + g2) - 1), abs(s_minus / 1e8 / (al * be / (al + g2)) - 1))
    ok = worst_res <= 1e-9 and worst_vieta <= 1e-12 and lim <= 1e-4
    report(7, ok, f"max scaled residual {worst_res:.2e}, max Vieta rel err {worst_vieta:.2e}, "
                  f"limit rel err at sigma=1e8 {lim:.2e}")


def test_criterion_8_energy_decay(report):
    parts, ok = [], True
    for th in (0.0, 0.5, 1.0):
        p = DEFAULT.replace(theta=th)
        for sigma in (1.0, 4.0):  # theta has no effect at sigma = 1
            spec = explicit_spectrum([sigma])
            a = mode_eigenvalues(build_mode_block(p, sigma)).real.max()
            traj = simulate(p, spec, initial_data("random-unit", p, spec, seed=11), 30 / abs(2 * a), 4001)
            ratio = traj.decay_fit[0] / (2 * a)
            ok &= abs(ratio - 1) <= 0.05
            parts.append(f"theta={th} sigma={sigma:g}: rate/2a={ratio:.5f}")
    spec = interval_spectrum(math.pi, 64)
    worst_inc = worst_comp = 0.0
    rng = np.random.default_rng(8)
    for th in THETAS:
        p = DEFAULT.replace(theta=th)
        for preset in ("plate-pluck", "network-kick", "random-unit"):
            traj = simulate(p, spec, initial_data(preset, p, spec, seed=3), 60.0, 601)
            worst_inc = max(worst_inc, traj.max_relative_increase())
        init = initial_data("random-unit", p, spec, seed=4)
        for t, s in rng.uniform(0, 10, (5, 2)):
            direct = propagate_all(p, spec, init, [t + s])[0]
            comp = propagate_all(p, spec, propagate_all(p, spec, init, [s])[0], [t])[0]
            worst_comp = max(worst_comp, np.linalg.norm(comp - direct) / np.linalg.norm(direct))
    ok &= worst_inc <= 1e-10 and worst_comp <= 1e-9
    parts.append(f"max energy increase {worst_inc:.2e} E0 (tol 1e-10), semigroup rel err {worst_comp:.2e} (tol 1e-9)")
    report(8, ok, "; ".join(parts), 10.0)


def test_criterion_9_zero_in_resolvent_set(report):
    spec = interval_spectrum(math.pi, 256)
    norms = mode_norms(0.0, DEFAULT, spec.sigmas)
    dets = np.array([np.linalg.det(build_mode_block(DEFAULT, s).matrix) for s in spec.sigmas])
    expected = DEFAULT.alpha * DEFAULT.beta * spec.sigmas**3
    det_err = float(np.max(np.abs(dets - expected) / expected))
    ok = bool(np.all(np.isfinite(norms))) and det_err <= 1e-10
    report(9, ok, f"max ||B_n^-1|| = {norms.max():.6g} over 256 modes, max det rel err {det_err:.2e} (tol 1e-10)")
