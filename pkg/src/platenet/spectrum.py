"""Dirichlet Laplacian eigenvalues for simple geometries."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Spectrum:
    """Finite, sorted list of Laplacian eigenvalues ``sigma_1 <= sigma_2 <= ...``.

    ``source`` is one of ``"interval"``, ``"rectangle"`` or ``"explicit"``;
    ``dims`` holds the geometry lengths (empty for explicit lists). Repeated
    eigenvalues are kept as separate modes.
    """

    sigmas: np.ndarray
    source: str
    dims: tuple[float, ...] = field(default=())

    def __post_init__(self):
        sigmas = np.array(self.sigmas, dtype=float)
        sigmas.setflags(write=False)
        object.__setattr__(self, "sigmas", sigmas)

    @property
    def count(self) -> int:
        return len(self.sigmas)

    def __len__(self):
        return len(self.sigmas)

    def truncate(self, n: int) -> "Spectrum":
        return Spectrum(self.sigmas[:n], self.source, self.dims)

    def resized(self, n: int) -> "Spectrum":
        """Same geometry with ``n`` modes; explicit lists can only shrink."""
        if self.source == "interval":
            return interval_spectrum(self.dims[0], n)
        if self.source == "rectangle":
            return rectangle_spectrum(self.dims[0], self.dims[1], n)
        if n > len(self.sigmas):
            raise ValueError("cannot extend an explicit spectrum")
        return self.truncate(n)


def _check_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive (got {value!r})")


def _check_count(n):
    if int(n) != n or n < 1:
        raise ValueError(f"N must be a positive integer (got {n!r})")


def interval_spectrum(L: float, N: int) -> Spectrum:
    """Eigenvalues ``(n pi / L)**2``, n = 1..N, of -d2/dx2 on (0, L)."""
    _check_positive("L", L)
    _check_count(N)
    n = np.arange(1, N + 1, dtype=float)
    return Spectrum((n * math.pi / L) ** 2, "interval", (float(L),))


def _rectangle_values_below(Lx, Ly, bound):
    jmax = int(math.floor(Lx / math.pi * math.sqrt(bound)))
    if jmax < 1:
        return np.empty(0)
    j = np.arange(1, jmax + 1, dtype=float)
    rest = bound - (j * math.pi / Lx) ** 2
    kmax = np.floor(Ly / math.pi * np.sqrt(np.clip(rest, 0.0, None))).astype(int)
    out = []
    for jj, kk in zip(j, kmax):
        if kk >= 1:
            k = np.arange(1, kk + 1, dtype=float)
            out.append((jj * math.pi / Lx) ** 2 + (k * math.pi / Ly) ** 2)
    return np.concatenate(out) if out else np.empty(0)


def rectangle_spectrum(Lx: float, Ly: float, N: int) -> Spectrum:
    """The N smallest eigenvalues ``(j pi/Lx)^2 + (k pi/Ly)^2``, j, k >= 1."""
    _check_positive("Lx", Lx)
    _check_positive("Ly", Ly)
    _check_count(N)
    # Weyl's law for the starting guess, then grow until N values fit below it.
    bound = 4 * math.pi * N / (Lx * Ly) + (math.pi / Lx) ** 2 + (math.pi / Ly) ** 2
    while True:
        values = _rectangle_values_below(Lx, Ly, bound)
        if len(values) >= N:
            break
        bound *= 1.5
    values.sort()
    return Spectrum(values[:N], "rectangle", (float(Lx), float(Ly)))


def explicit_spectrum(values) -> Spectrum:
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise ValueError("explicit spectrum must be nonempty")
    for i, v in enumerate(values):
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"sigma[{i}] must be positive (got {v!r})")
    return Spectrum(np.sort(values), "explicit")
