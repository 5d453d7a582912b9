"""Resolvent norms on the imaginary axis.

Because the generator is block diagonal over the Laplacian eigenmodes, its
resolvent norm at ``i lambda`` is the largest of the per-mode norms, each of
which is ``1 / s_min`` of the scaled 4x4 block ``i lambda - D B_n D^-1``.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analyticity import qn_roots
from .fitting import GrowthFit, fit_growth  # noqa: F401  (re-exported)
from .modal import ModalBlock, scaled_blocks
from .parameters import SystemParameters, validate
from .spectrum import Spectrum

SINGULAR_TOL = 1e-14
TAIL_FACTOR = 4.0


class NearSingularError(ArithmeticError):
    def __init__(self, lam, sigma, smin, smax):
        super().__init__(
            f"i*lambda is numerically an eigenvalue: lambda={lam!r}, sigma={sigma!r}, "
            f"s_min={smin:.3e}, s_max={smax:.3e}"
        )
        self.lam = lam
        self.sigma = sigma


class TruncationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ResolventSample:
    """Resolvent norm at one point ``i lambda``.

    ``attaining_mode`` is 1-based. ``tail_norm`` is the norm of a probe mode
    at ``4 sigma_N``; ``resonance_covered`` is false when some mode beyond the
    truncation has an undamped coupled frequency below ``lambda``.
    """

    lam: float
    per_mode_norms: np.ndarray = field(repr=False)
    global_norm: float
    attaining_mode: int
    truncation: int
    tail_norm: float = math.nan
    resonance_covered: bool = True
    error: str | None = None

    @property
    def truncation_suspect(self) -> bool:
        return self.tail_norm > self.global_norm or not self.resonance_covered


def _norms(lam: float, scaled: np.ndarray, sigmas) -> np.ndarray:
    mats = 1j * lam * np.eye(4) - scaled
    sv = np.linalg.svd(mats, compute_uv=False)
    smin, smax = sv[:, -1], sv[:, 0]
    bad = np.flatnonzero(~(smin > SINGULAR_TOL * smax))
    if len(bad):
        i = bad[0]
        raise NearSingularError(lam, float(np.atleast_1d(sigmas)[i]), smin[i], smax[i])
    return 1.0 / smin


def mode_resolvent_norm(lam: float, block: ModalBlock) -> float:
    """Energy-metric norm of ``(i lambda - B_n)^-1``."""
    return float(_norms(lam, block.scaled[None], [block.sigma])[0])


def mode_norms(lam: float, params: SystemParameters, sigmas) -> np.ndarray:
    return _norms(lam, scaled_blocks(params, sigmas), sigmas)


def global_resolvent_norm(
    lam: float, params: SystemParameters, spectrum: Spectrum, *, warn: bool = True
) -> ResolventSample:
    validate(params)
    norms = mode_norms(lam, params, spectrum.sigmas)
    i = int(np.argmax(norms))
    sigma_tail = TAIL_FACTOR * spectrum.sigmas[-1]
    tail = float(mode_norms(lam, params, [sigma_tail])[0])
    _, s_minus = qn_roots(params, spectrum.sigmas[-1])
    sample = ResolventSample(
        lam=float(lam),
        per_mode_norms=norms,
        global_norm=float(norms[i]),
        attaining_mode=i + 1,
        truncation=len(spectrum),
        tail_norm=tail,
        resonance_covered=bool(lam * lam <= s_minus),
    )
    if warn and tail > sample.global_norm:
        warnings.warn(
            f"lambda={lam:g}: tail probe at sigma={sigma_tail:g} has norm {tail:.6g} "
            f"above the truncated supremum {sample.global_norm:.6g}",
            TruncationWarning,
            stacklevel=2,
        )
    return sample


def _failed(lam, spectrum, exc):
    return ResolventSample(
        lam=float(lam),
        per_mode_norms=np.full(len(spectrum), np.nan),
        global_norm=math.nan,
        attaining_mode=0,
        truncation=len(spectrum),
        error=str(exc),
    )


def sweep(
    params: SystemParameters, spectrum: Spectrum, lambda_grid, workers: int = 1
) -> list[ResolventSample]:
    """Evaluate the resolvent norm on every grid point, in grid order.

    Failing points are kept as samples with ``error`` set and NaN norms.
    """
    grid = [float(x) for x in lambda_grid]
    for a, b in zip(grid, grid[1:]):
        if b < a:
            raise ValueError("lambda grid must be nondecreasing")
    if any(x <= 0 for x in grid):
        raise ValueError("lambda grid must be positive")
    validate(params)

    def one(lam):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                return global_resolvent_norm(lam, params, spectrum)
        except NearSingularError as exc:
            return _failed(lam, spectrum, exc)

    if workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(one, grid))
    else:
        samples = [one(lam) for lam in grid]
    suspect = [s.lam for s in samples if s.tail_norm > s.global_norm]
    if suspect:
        warnings.warn(
            f"tail probe exceeds the truncated supremum at {len(suspect)} grid points "
            f"(first at lambda={suspect[0]:g})",
            TruncationWarning,
            stacklevel=2,
        )
    return samples


def geometric_grid(lmin: float, lmax: float, points: int) -> np.ndarray:
    if not 0 < lmin <= lmax:
        raise ValueError("need 0 < lmin <= lmax")
    return np.geomspace(lmin, lmax, points)


@dataclass(frozen=True)
class TruncationCheck:
    """Comparison of sweeps at N and 2N modes.

    A point is compared when its attaining mode at N lies in the lower half of
    the truncation; ``passed`` requires at least one compared point and every
    compared point to agree within ``rtol``. ``sup_stable`` only asks the two
    sweep maxima to agree.
    """

    n_modes: int
    compared: int
    max_rel_diff: float
    rtol: float
    sweep_max: float
    sweep_max_doubled: float
    uncovered: int

    @property
    def passed(self) -> bool:
        return self.compared > 0 and self.max_rel_diff <= self.rtol

    @property
    def sup_rel_diff(self) -> float:
        return abs(self.sweep_max - self.sweep_max_doubled) / self.sweep_max_doubled

    @property
    def sup_stable(self) -> bool:
        return self.sup_rel_diff <= self.rtol


def truncation_check(
    params: SystemParameters,
    spectrum: Spectrum,
    lambda_grid,
    rtol: float = 0.01,
    workers: int = 1,
) -> tuple[TruncationCheck, list[ResolventSample], list[ResolventSample]]:
    n = len(spectrum)
    coarse = sweep(params, spectrum, lambda_grid, workers)
    fine = sweep(params, spectrum.resized(2 * n), lambda_grid, workers)
    diffs = [
        abs(a.global_norm - b.global_norm) / b.global_norm
        for a, b in zip(coarse, fine)
        if a.error is None and b.error is None and a.attaining_mode <= n // 2
    ]
    check = TruncationCheck(
        n_modes=n,
        compared=len(diffs),
        max_rel_diff=max(diffs, default=math.nan),
        rtol=rtol,
        sweep_max=max((s.global_norm for s in coarse if s.error is None), default=math.nan),
        sweep_max_doubled=max((s.global_norm for s in fine if s.error is None), default=math.nan),
        uncovered=sum(not s.resonance_covered for s in coarse),
    )
    return check, coarse, fine
