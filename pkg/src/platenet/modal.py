"""Per-mode 4x4 generator blocks.

Expanding in the Dirichlet eigenfunctions ``e_n`` decouples the generator into
blocks acting on the coefficients ``(u, v, w, z)`` of mode n, where ``w = u_t``
and ``z = v_t``:

    u' = w
    v' = z
    w' = -alpha sigma^2 u - gamma sigma z
    z' = -beta sigma v + gamma sigma w - delta sigma^theta z

The energy inner product weights the four coefficients by
``(alpha sigma^2, beta sigma, 1, 1)``. Most numerics run on the scaled block
``D B D^-1`` with ``D = diag(sqrt(alpha) sigma, sqrt(beta sigma), 1, 1)``, in
which the energy norm is the Euclidean norm and the block is skew-symmetric
apart from the damping entry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .parameters import SystemParameters, validate
from .spectrum import Spectrum

RESIDUAL_TOL = 1e-8


class EigenSolverError(RuntimeError):
    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


@dataclass(frozen=True)
class ModalBlock:
    sigma: float
    theta: float
    matrix: np.ndarray   # raw generator block in (u, v, w, z) coordinates
    scaled: np.ndarray   # D @ matrix @ inv(D), assembled entrywise
    weights: np.ndarray  # (alpha sigma^2, beta sigma, 1, 1)

    @property
    def scale(self) -> np.ndarray:
        """Diagonal of D; ``D @ U`` maps a modal state to energy coordinates."""
        return np.sqrt(self.weights)


def scaled_blocks(params: SystemParameters, sigmas) -> np.ndarray:
    """Stack of scaled blocks, shape ``(len(sigmas), 4, 4)``.

    Entries are written directly rather than by similarity transform so that
    the off-diagonal part is exactly antisymmetric in floating point.
    """
    sigmas = np.atleast_1d(np.asarray(sigmas, dtype=float))
    a = np.sqrt(params.alpha) * sigmas
    b = np.sqrt(params.beta * sigmas)
    c = params.gamma * sigmas
    out = np.zeros((len(sigmas), 4, 4))
    out[:, 0, 2] = a
    out[:, 2, 0] = -a
    out[:, 1, 3] = b
    out[:, 3, 1] = -b
    out[:, 2, 3] = -c
    out[:, 3, 2] = c
    out[:, 3, 3] = -params.delta * sigmas**params.theta
    return out


def energy_scales(params: SystemParameters, sigmas) -> np.ndarray:
    """Diagonals of D for each mode, shape ``(len(sigmas), 4)``."""
    sigmas = np.atleast_1d(np.asarray(sigmas, dtype=float))
    ones = np.ones_like(sigmas)
    return np.stack([np.sqrt(params.alpha) * sigmas, np.sqrt(params.beta * sigmas), ones, ones], axis=-1)


def build_mode_block(params: SystemParameters, sigma: float) -> ModalBlock:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive (got {sigma!r})")
    al, be, ga, de, th = params.alpha, params.beta, params.gamma, params.delta, params.theta
    matrix = np.array([
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-al * sigma**2, 0.0, 0.0, -ga * sigma],
        [0.0, -be * sigma, ga * sigma, -de * sigma**th],
    ])
    weights = np.array([al * sigma**2, be * sigma, 1.0, 1.0])
    for arr in (matrix, weights):
        arr.setflags(write=False)
    scaled = scaled_blocks(params, [sigma])[0]
    scaled.setflags(write=False)
    return ModalBlock(float(sigma), float(th), matrix, scaled, weights)


def mode_inner(a, b, block: ModalBlock) -> complex:
    """Energy inner product of two states of the same mode (linear in ``a``)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return complex(np.sum(block.weights * a * np.conj(b)))


def dissipation_rate(state, block: ModalBlock) -> float:
    """``Re <B U, U>`` in the energy metric.

    For a real matrix M, ``Re(y^H M y)`` only sees the symmetric part
    ``S = (M + M^T)/2``, so the form is summed entrywise over S. Entries that
    vanish exactly contribute exact zeros, which keeps the result free of
    cancellation error from the (large) skew part.
    """
    y = block.scale * np.asarray(state, dtype=complex)
    sym = 0.5 * (block.scaled + block.scaled.T)
    re, im = y.real, y.imag
    terms = []
    for i in range(4):
        terms.append(sym[i, i] * (re[i] * re[i] + im[i] * im[i]))
        for j in range(i + 1, 4):
            terms.append(2.0 * sym[i, j] * (re[i] * re[j] + im[i] * im[j]))
    return math.fsum(terms)


def _residuals(scaled: np.ndarray, eigs: np.ndarray) -> np.ndarray:
    eye = np.eye(4)
    shifted = eigs[..., None, None] * eye - scaled[:, None, :, :]
    dets = np.abs(np.linalg.det(shifted))
    norms = np.linalg.norm(scaled, ord=2, axis=(-2, -1))
    return dets / (1.0 + norms[:, None] ** 4)


def _sorted(eigs: np.ndarray) -> np.ndarray:
    order = np.lexsort((eigs.imag, eigs.real), axis=-1)
    return np.take_along_axis(eigs, order, axis=-1)


def batch_eigenvalues(params: SystemParameters, sigmas) -> np.ndarray:
    """Eigenvalues of every mode block, shape ``(N, 4)``, each row sorted."""
    scaled = scaled_blocks(params, sigmas)
    try:
        eigs = np.linalg.eigvals(scaled)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver failed: {exc}") from exc
    res = _residuals(scaled, eigs)
    bad = np.argwhere(~(res <= RESIDUAL_TOL))
    if len(bad):
        i = bad[0][0]
        raise EigenSolverError(
            f"eigenvalue residual {res[i].max():.3e} exceeds {RESIDUAL_TOL} "
            f"for sigma={np.atleast_1d(sigmas)[i]!r}",
            matrix=scaled[i],
        )
    return _sorted(eigs)


def mode_eigenvalues(block: ModalBlock) -> np.ndarray:
    """Roots of ``det(lambda I - B_n)``, sorted by real then imaginary part."""
    scaled = block.scaled[None]
    try:
        eigs = np.linalg.eigvals(scaled)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolver failed: {exc}", matrix=block.matrix) from exc
    res = _residuals(scaled, eigs)
    if not np.all(res <= RESIDUAL_TOL):
        raise EigenSolverError(
            f"eigenvalue residual {res.max():.3e} exceeds {RESIDUAL_TOL}", matrix=block.matrix
        )
    return _sorted(eigs)[0]


def spectral_abscissa(params: SystemParameters, spectrum: Spectrum) -> tuple[float, int]:
    """Largest real part over all modal eigenvalues and the 1-based mode attaining it.

    Ties resolve to the lowest mode number.
    """
    validate(params)
    eigs = batch_eigenvalues(params, spectrum.sigmas)
    per_mode = eigs.real.max(axis=1)
    i = int(np.argmax(per_mode))
    return float(per_mode[i]), i + 1
