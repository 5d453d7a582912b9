import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from platenet.modal import (
    EigenSolverError,
    batch_eigenvalues,
    build_mode_block,
    dissipation_rate,
    mode_eigenvalues,
    mode_inner,
    spectral_abscissa,
)
from platenet.parameters import ParameterError, SystemParameters
from platenet.spectrum import explicit_spectrum, interval_spectrum


def quartic_coefficients(p, sigma):
    """det(lambda I - B_n) written out from the two coupled second-order modal equations."""
    d = p.delta * sigma**p.theta
    return [1.0, d, (p.alpha + p.gamma**2) * sigma**2 + p.beta * sigma, p.alpha * sigma**2 * d,
            p.alpha * p.beta * sigma**3]


def test_quartic_coefficients_symbolically():
    lam, a, b, g, d, s, th = sympy.symbols("lam alpha beta gamma delta sigma theta", positive=True)
    B = sympy.Matrix([[0, 0, 1, 0], [0, 0, 0, 1], [-a * s**2, 0, 0, -g * s], [0, -b * s, g * s, -d * s**th]])
    charpoly = sympy.Poly(sympy.expand((lam * sympy.eye(4) - B).det()), lam).all_coeffs()
    p = SystemParameters(0.3, 1.7, -0.8, 0.6, 0.4)
    subs = {a: p.alpha, b: p.beta, g: p.gamma, d: p.delta, s: 2.5, th: p.theta}
    np.testing.assert_allclose([float(c.subs(subs)) for c in charpoly], quartic_coefficients(p, 2.5), rtol=1e-14)


def test_block_unit_parameters():
    blk = build_mode_block(SystemParameters(1, 1, 1, 1, 0), 1.0)
    np.testing.assert_array_equal(blk.matrix, [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, -1], [0, -1, 1, -1]])
    np.testing.assert_array_equal(blk.weights, [1, 1, 1, 1])


@pytest.mark.parametrize("theta, expected", [(1.0, -4.0), (0.5, -2.0)])
def test_damping_entry(theta, expected):
    blk = build_mode_block(SystemParameters(1, 1, 1, 1, theta), 4.0)
    assert blk.matrix[3, 3] == expected


def test_scaled_is_similarity_of_raw():
    p = SystemParameters(0.2, 1.3, 0.7, 0.9, 0.3)
    blk = build_mode_block(p, 7.0)
    D = np.diag(np.sqrt(blk.weights))
    np.testing.assert_allclose(blk.scaled, D @ blk.matrix @ np.linalg.inv(D), rtol=1e-14, atol=1e-14)
    off = blk.scaled - np.diag(np.diag(blk.scaled))
    np.testing.assert_array_equal(off, -off.T)


def test_mode_inner_examples():
    blk = build_mode_block(SystemParameters(1, 1, 1, 1, 0), 2.0)
    assert mode_inner([0, 0, 0, 1], [0, 0, 0, 1], blk) == 1
    assert mode_inner([1, 0, 0, 0], [0, 1, 0, 0], blk) == 0
    assert mode_inner([1, 0, 0, 0], [1, 0, 0, 0], blk) == 4


def test_mode_inner_hermitian(rng):
    blk = build_mode_block(SystemParameters(), 3.0)
    a = rng.normal(size=4) + 1j * rng.normal(size=4)
    b = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert mode_inner(a, b, blk) == pytest.approx(np.conj(mode_inner(b, a, blk)))
    assert abs(mode_inner(a, a, blk).imag) <= 1e-15 * mode_inner(a, a, blk).real


def test_dissipation_examples(rng):
    blk = build_mode_block(SystemParameters(1, 1, 1, 1, 0), 1.0)
    assert dissipation_rate([0, 0, 0, 1], blk) == -1.0
    assert dissipation_rate([1, 1, 1, 0], blk) == 0.0
    blk = build_mode_block(SystemParameters(1, 1, 1, 2, 1), 4.0)
    U = rng.normal(size=4) + 1j * rng.normal(size=4)
    assert dissipation_rate(U, blk) == pytest.approx(-8 * abs(U[3]) ** 2, rel=1e-14, abs=1e-12)


def test_dissipation_matches_naive_product(rng):
    p = SystemParameters(0.4, 2.0, -1.3, 0.7, 0.6)
    for sigma in (0.5, 3.0, 80.0):
        blk = build_mode_block(p, sigma)
        U = rng.normal(size=4) + 1j * rng.normal(size=4)
        naive = mode_inner(blk.matrix @ U, U, blk).real
        scale = mode_inner(U, U, blk).real * np.linalg.norm(blk.scaled, 2)
        assert abs(naive - dissipation_rate(U, blk)) <= 1e-12 * scale


@given(
    st.floats(0.05, 5), st.floats(0.05, 5), st.floats(-5, 5).filter(lambda g: abs(g) > 1e-3),
    st.floats(0.01, 5), st.floats(0, 1), st.floats(1e-2, 1e6),
    st.lists(st.floats(-1, 1), min_size=8, max_size=8),
)
def test_dissipation_identity_property(a, b, g, d, th, sigma, coords):
    blk = build_mode_block(SystemParameters(a, b, g, d, th), sigma)
    U = (np.array(coords[:4]) + 1j * np.array(coords[4:])) / np.sqrt(blk.weights)
    z = U[3]
    expected = -d * sigma**th * (z.real**2 + z.imag**2)
    assert abs(dissipation_rate(U, blk) - expected) <= 1e-12


def test_eigenvalues_decoupled_undamped():
    ev = mode_eigenvalues(build_mode_block(SystemParameters(1, 1, 0, 0, 0), 1.0))
    np.testing.assert_allclose(ev, [-1j, -1j, 1j, 1j], atol=1e-8)


def test_eigenvalues_decoupled_damped():
    ev = mode_eigenvalues(build_mode_block(SystemParameters(1, 1, 0, 1, 0), 1.0))
    expected = sorted([1j, -1j, *np.roots([1, 1, 1])], key=lambda z: (z.real, z.imag))
    np.testing.assert_allclose(ev, expected, atol=1e-12)


@pytest.mark.parametrize("sigma", [1.0, math.pi**2, 1e3, 1e6])
def test_eigenvalues_against_companion_quartic(sigma):
    p = SystemParameters(1 / math.pi**2, 1, 1, 1, 0.5)
    ev = mode_eigenvalues(build_mode_block(p, sigma))
    oracle = sorted(np.roots(quartic_coefficients(p, sigma)), key=lambda z: (z.real, z.imag))
    scale = max(1.0, np.abs(oracle).max())
    np.testing.assert_allclose(ev, oracle, rtol=1e-9, atol=1e-9 * scale)


def test_eigenvalues_sorted_and_conjugate():
    ev = mode_eigenvalues(build_mode_block(SystemParameters(theta=0.3), 12.0))
    keys = [(z.real, z.imag) for z in ev]
    assert keys == sorted(keys)
    np.testing.assert_allclose(np.sort_complex(ev), np.sort_complex(np.conj(ev)), atol=1e-12)


def test_eigensolver_residual_failure_reports_matrix(monkeypatch):
    blk = build_mode_block(SystemParameters(), 2.0)
    monkeypatch.setattr(np.linalg, "eigvals", lambda m: np.zeros(m.shape[:-1], dtype=complex) + 5.0)
    with pytest.raises(EigenSolverError) as info:
        mode_eigenvalues(blk)
    assert info.value.matrix is not None


@given(
    st.floats(0.05, 5), st.floats(0.05, 5), st.floats(0.05, 3), st.floats(0.05, 3), st.floats(0, 1),
    st.floats(1e-2, 1e4),
)
def test_block_invariants(a, b, g, d, th, sigma):
    p = SystemParameters(a, b, g, d, th)
    blk = build_mode_block(p, sigma)
    ev = mode_eigenvalues(blk)
    assert np.all(ev.real < 0)
    assert ev.sum().real == pytest.approx(-d * sigma**th, rel=1e-9, abs=1e-9 * np.abs(ev).max())
    det = np.linalg.det(blk.scaled)
    assert det > 0
    assert det == pytest.approx(a * b * sigma**3, rel=1e-10)


def test_abscissa_negative_default():
    a, mode = spectral_abscissa(SystemParameters(theta=0.0), interval_spectrum(math.pi, 64))
    assert a < 0
    assert 1 <= mode <= 64


def test_abscissa_undamped_limit():
    a, _ = spectral_abscissa(SystemParameters(delta=1e-12), interval_spectrum(math.pi, 16))
    assert -1e-9 < a < 0


def test_abscissa_single_mode_matches_quartic():
    p = SystemParameters(theta=1.0)
    a, mode = spectral_abscissa(p, explicit_spectrum([1.0]))
    assert mode == 1
    assert a == pytest.approx(np.roots(quartic_coefficients(p, 1.0)).real.max(), rel=1e-10)


def test_abscissa_tie_breaks_to_lowest_mode():
    a, mode = spectral_abscissa(SystemParameters(), explicit_spectrum([2.0, 2.0, 2.0]))
    assert mode == 1


def test_abscissa_validates():
    with pytest.raises(ParameterError):
        spectral_abscissa(SystemParameters(gamma=0.0), interval_spectrum(1.0, 3))


def test_batch_matches_single_blocks():
    p = SystemParameters(theta=0.7)
    sig = interval_spectrum(1.3, 20).sigmas
    batch = batch_eigenvalues(p, sig)
    for s, row in zip(sig, batch):
        np.testing.assert_allclose(row, mode_eigenvalues(build_mode_block(p, s)), rtol=1e-12, atol=1e-12)
