"""Exact modal propagation of ``U(t) = exp(t B) U_0`` and energy trajectories."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fitting import fit_exponential
from .modal import ModalBlock, energy_scales, scaled_blocks
from .parameters import SystemParameters, validate
from .spectrum import Spectrum

EIGVEC_COND_LIMIT = 1e8
PRESETS = ("plate-pluck", "network-kick", "random-unit")


class PropagationError(RuntimeError):
    pass


def _expm_fallback(scaled, y0, times, sigma):
    out = np.empty((len(times), 4), dtype=complex)
    for k, t in enumerate(times):
        e = scipy.linalg.expm(t * scaled)
        if not np.all(np.isfinite(e)):
            raise PropagationError(f"matrix exponential failed for sigma={sigma!r}, t={t!r}")
        out[k] = e @ y0
    return out


def _propagate_scaled(scaled, y0, times, sigma):
    """``exp(t M) y0`` for every t, shape ``(len(times), 4)``."""
    w, v = np.linalg.eig(scaled)
    if np.linalg.cond(v) > EIGVEC_COND_LIMIT:
        return _expm_fallback(scaled, y0, times, sigma)
    c = np.linalg.solve(v, y0)
    return (np.exp(np.outer(times, w)) * c) @ v.T


def propagate_mode(block: ModalBlock, state, t: float) -> np.ndarray:
    """Evolve one modal state ``(u, v, w, z)`` by time ``t >= 0``."""
    if t < 0:
        raise ValueError(f"t must be nonnegative (got {t!r})")
    y0 = block.scale * np.asarray(state, dtype=complex)
    y = _propagate_scaled(block.scaled, y0, np.array([float(t)]), block.sigma)[0]
    return y / block.scale


def energy(states, blocks) -> float:
    """Half the squared energy norm summed over modes."""
    states = list(states)
    blocks = list(blocks)
    if len(states) != len(blocks):
        raise ValueError("states and blocks must be aligned")
    total = 0.0
    for u, b in zip(states, blocks):
        u = np.asarray(u, dtype=complex)
        total += float(np.sum(b.weights * np.abs(u) ** 2))
    return 0.5 * total


def initial_data(preset: str, params: SystemParameters, spectrum: Spectrum, seed: int = 0) -> np.ndarray:
    """Modal initial data of unit energy norm, shape ``(N, 4)``.

    ``plate-pluck``: displacement ``u`` in mode 1 only.
    ``network-kick``: equal network velocity ``z`` in every mode.
    ``random-unit``: complex Gaussian coefficients from ``seed``.
    """
    n = len(spectrum)
    scale = energy_scales(params, spectrum.sigmas)
    y = np.zeros((n, 4), dtype=complex)
    if preset == "plate-pluck":
        y[0, 0] = 1.0
    elif preset == "network-kick":
        y[:, 3] = 1.0
    elif preset == "random-unit":
        rng = np.random.default_rng(seed)
        y = rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))
    else:
        raise ValueError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
    y /= np.linalg.norm(y)
    return y / scale


@dataclass(frozen=True)
class EnergyTrajectory:
    times: np.ndarray
    energies: np.ndarray
    decay_fit: tuple[float, float] | None  # (slope of log E, r^2) over the final half

    def max_relative_increase(self) -> float:
        """Largest step-to-step increase of E, relative to E(0)."""
        if len(self.energies) < 2 or self.energies[0] == 0:
            return 0.0
        return float(max(0.0, np.max(np.diff(self.energies))) / self.energies[0])


def propagate_all(params: SystemParameters, spectrum: Spectrum, init, times) -> np.ndarray:
    """States at every time, shape ``(len(times), N, 4)``, in raw coordinates."""
    init = np.asarray(init, dtype=complex)
    if init.shape != (len(spectrum), 4):
        raise ValueError(f"initial data must have shape ({len(spectrum)}, 4), got {init.shape}")
    if not np.all(np.isfinite(init)):
        raise ValueError("initial data must be finite")
    times = np.asarray(times, dtype=float)
    scale = energy_scales(params, spectrum.sigmas)
    blocks = scaled_blocks(params, spectrum.sigmas)
    out = np.empty((len(times), len(spectrum), 4), dtype=complex)
    for i, sigma in enumerate(spectrum.sigmas):
        y0 = scale[i] * init[i]
        if not np.any(y0):
            out[:, i] = 0.0
            continue
        try:
            out[:, i] = _propagate_scaled(blocks[i], y0, times, sigma) / scale[i]
        except (np.linalg.LinAlgError, PropagationError) as exc:
            raise PropagationError(f"mode {i + 1} (sigma={sigma!r}): {exc}") from exc
    return out


def energies_of(params: SystemParameters, spectrum: Spectrum, states) -> np.ndarray:
    """Energy of each time slice of ``states`` (shape ``(T, N, 4)``)."""
    weights = energy_scales(params, spectrum.sigmas) ** 2
    return 0.5 * np.sum(weights * np.abs(states) ** 2, axis=(-2, -1))


def simulate(
    params: SystemParameters, spectrum: Spectrum, init, t_end: float, samples: int
) -> EnergyTrajectory:
    validate(params)
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    times = np.linspace(0.0, t_end, samples)
    e = energies_of(params, spectrum, propagate_all(params, spectrum, init, times))
    tail = slice(samples // 2, None)
    t_fit, e_fit = times[tail], e[tail]
    keep = e_fit > 0
    fit = fit_exponential(t_fit[keep], e_fit[keep]) if keep.sum() >= 2 else None
    return EnergyTrajectory(times, e, fit)
