"""Witness sequences showing that ``||lambda (i lambda - B)^-1||`` is unbounded.

For each mode the forcing is a single eigenfunction and the frequency is tied
to a root of

    q_n(s) = s^2 - [(alpha + gamma^2) sigma^2 + beta sigma] s + alpha beta sigma^3,

the frequencies at which the undamped 2x2 modal system is singular. Two
branches are used:

* ``low`` (theta < 1): forcing ``(0, 0, -e_n, 0)``, ``lambda_n = sqrt(s_plus)``,
  response amplitude ``mu_n`` of ``u``;
* ``high`` (theta = 1): forcing ``(0, -A^(1/2) e_n, 0, 0)`` with
  ``||A^(1/2) e_n|| = 1``, ``lambda_n = sqrt(s_minus)``, response amplitude
  ``nu_n`` of ``v`` measured against ``e_n``.

The response is always computed by a direct 4x4 solve; the closed forms are
an algebra cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fitting import GrowthFit, fit_growth
from .modal import scaled_blocks
from .parameters import SystemParameters, validate
from .spectrum import Spectrum

ROOT_TOL = 1e-9
CLOSED_FORM_TOL = 1e-8


class BranchError(ValueError):
    """The frequency does not sit on the requested root of q_n."""


class AlgebraError(RuntimeError):
    """Closed form and direct solve disagree."""


def qn_coefficients(params: SystemParameters, sigma):
    """``(b, c)`` in ``q_n(s) = s^2 - b s + c``."""
    sigma = np.asarray(sigma, dtype=float)
    b = (params.alpha + params.gamma**2) * sigma**2 + params.beta * sigma
    c = params.alpha * params.beta * sigma**3
    return b, c


def qn_residual(params: SystemParameters, sigma, s):
    """``|q_n(s)|`` relative to the magnitudes of its three terms."""
    b, c = qn_coefficients(params, sigma)
    s = np.asarray(s, dtype=float)
    return np.abs(s * s - b * s + c) / (s * s + np.abs(b * s) + np.abs(c))


def qn_roots(params: SystemParameters, sigma):
    """Roots ``(s_plus, s_minus)`` of q_n; works elementwise on arrays.

    ``s_minus`` uses the rationalized form ``2c / (b + root)`` to avoid the
    cancellation in ``(b - root) / 2``.
    """
    sigma = np.asarray(sigma, dtype=float)
    al, be, ga = params.alpha, params.beta, params.gamma
    b, c = qn_coefficients(params, sigma)
    # ((a+g^2) s)^2 + 2 b (g^2 - a) s + b^2 rewritten as a sum of squares
    inner = ((al + ga**2) * sigma - be) ** 2 + 4 * be * ga**2 * sigma
    if np.any(~(inner > 0)):
        raise BranchError(f"nonpositive discriminant for sigma={sigma!r}")
    root = sigma * np.sqrt(inner)
    s_plus = 0.5 * (b + root)
    s_minus = 2 * c / (b + root)
    if s_plus.ndim == 0:
        return float(s_plus), float(s_minus)
    return s_plus, s_minus


def _check_branch(params, sigma, lam, which):
    s_plus, s_minus = qn_roots(params, sigma)
    target = s_plus if which == "plus" else s_minus
    if not abs(lam * lam - target) <= ROOT_TOL * target:
        raise BranchError(f"not on witness branch: lambda^2={lam * lam!r}, s_{which}={target!r}")


def mu_closed_form(params: SystemParameters, sigma: float, lam: float, theta=None) -> complex:
    """Amplitude of ``u`` on the ``s_plus`` branch, valid for theta < 1."""
    theta = params.theta if theta is None else theta
    if not theta < 1:
        raise ValueError("mu closed form requires theta < 1")
    _check_branch(params, sigma, lam, "plus")
    ga2 = params.gamma**2
    p2 = lam**2 - params.beta * sigma
    re = p2 / (ga2 * lam**2 * sigma**2)
    im = p2**2 / (params.delta * ga2 * lam**3 * sigma ** (2 + theta))
    return complex(re, im)


def nu_closed_form(params: SystemParameters, sigma: float, lam: float) -> complex:
    """Amplitude of ``v`` on the ``s_minus`` branch for theta = 1."""
    _check_branch(params, sigma, lam, "minus")
    p1 = lam**2 - params.alpha * sigma**2
    re = ((params.gamma**2 + params.alpha) * sigma**2 - lam**2) / (params.delta * np.sqrt(sigma) * p1)
    im = np.sqrt(sigma) / lam
    return complex(re, im)


@dataclass(frozen=True)
class WitnessPoint:
    mode: int
    sigma: float
    s: float
    lam: float
    coefficient: complex
    closed_form: complex
    solution_norm: float
    forcing_norm: float
    amplified: float
    root_residual: float

    @property
    def unit_forcing(self) -> float:
        """``lambda_n ||U_n||`` without dividing by the forcing norm."""
        return self.lam * self.solution_norm


@dataclass(frozen=True)
class ProbeReport:
    theta: float
    branch: str
    points: tuple[WitnessPoint, ...]
    fit_range: tuple[float, float]
    coefficient_fit: GrowthFit
    amplified_fit: GrowthFit
    unit_forcing_fit: GrowthFit

    def summary(self) -> dict:
        return {
            "theta": self.theta,
            "branch": self.branch,
            "n_points": len(self.points),
            "fit_lambda_min": self.fit_range[0],
            "fit_lambda_max": self.fit_range[1],
            "coefficient_fit": self.coefficient_fit.as_dict(),
            "amplified_fit": self.amplified_fit.as_dict(),
            "unit_forcing_fit": self.unit_forcing_fit.as_dict(),
            "max_closed_form_error": max(
                abs(p.coefficient - p.closed_form) / abs(p.closed_form) for p in self.points
            ),
        }


def witness_solutions(params: SystemParameters, sigmas, theta: float):
    """Direct modal solves along the witness branch for ``theta``.

    Returns ``(s, lam, U, forcing_norm, solution_norm, cond)`` with ``U`` the
    raw ``(u, v, w, z)`` coefficients in the unit-L2 eigenfunction basis, shape
    ``(N, 4)``, both norms in the energy metric, and the 2-norm condition
    number of each scaled system.
    """
    sigmas = np.asarray(sigmas, dtype=float)
    p = params.replace(theta=theta)
    s_plus, s_minus = qn_roots(p, sigmas)
    s = s_plus if theta < 1 else s_minus
    lam = np.sqrt(s)
    n = len(sigmas)
    scale = np.stack([np.sqrt(p.alpha) * sigmas, np.sqrt(p.beta * sigmas), np.ones(n), np.ones(n)], axis=-1)
    forcing = np.zeros((n, 4))
    if theta < 1:
        forcing[:, 2] = -1.0
    else:
        forcing[:, 1] = -1.0
    rhs = (scale * forcing).astype(complex)
    mats = 1j * lam[:, None, None] * np.eye(4) - scaled_blocks(p, sigmas)
    y = np.linalg.solve(mats, rhs[..., None])[..., 0]
    cond = np.linalg.cond(mats)
    return s, lam, y / scale, np.linalg.norm(rhs, axis=1), np.linalg.norm(y, axis=1), cond


def _fit_window(lam, decades):
    lo_target = lam.max() / 10**decades
    below = np.flatnonzero(lam <= lo_target)
    if len(below) == 0:
        raise ValueError(
            f"witness frequencies span {np.log10(lam.max() / lam.min()):.2f} decades; need {decades}"
        )
    lo = lam[below].max()
    return lam >= lo


def witness_sequence(
    params: SystemParameters, spectrum: Spectrum, theta=None, fit_decades: float = 2.0
) -> ProbeReport:
    """Build the witness sequence over every mode of ``spectrum`` and fit growth exponents.

    Fits use the smallest trailing window of witness frequencies spanning at
    least ``fit_decades`` decades, which keeps the low modes (preasymptotic
    for the theta = 1 branch) out of the estimate when the spectrum is long.
    """
    theta = params.theta if theta is None else theta
    p = validate(params.replace(theta=theta))
    sigmas = spectrum.sigmas
    s, lam, u, fnorm, unorm, cond = witness_solutions(p, sigmas, theta)
    # the direct solve cannot be trusted beyond eps * cond (near-undamped systems)
    tols = np.maximum(CLOSED_FORM_TOL, 100 * np.finfo(float).eps * cond)

    points = []
    for i, sigma in enumerate(sigmas):
        if theta < 1:
            coeff = complex(u[i, 0])
            closed = mu_closed_form(p, sigma, lam[i], theta)
        else:
            coeff = complex(u[i, 1] * np.sqrt(sigma))
            closed = nu_closed_form(p, sigma, lam[i])
        err = abs(coeff - closed) / abs(closed)
        if not err <= tols[i]:
            raise AlgebraError(
                f"mode {i + 1}: closed form {closed!r} vs direct solve {coeff!r} (rel err {err:.3e})"
            )
        points.append(WitnessPoint(
            mode=i + 1,
            sigma=float(sigma),
            s=float(s[i]),
            lam=float(lam[i]),
            coefficient=coeff,
            closed_form=closed,
            solution_norm=float(unorm[i]),
            forcing_norm=float(fnorm[i]),
            amplified=float(lam[i] * unorm[i] / fnorm[i]),
            root_residual=float(qn_residual(p, sigma, s[i])),
        ))

    mask = _fit_window(lam, fit_decades)
    if mask.sum() < 6:
        raise ValueError(f"only {mask.sum()} witness points in the fit window; need 6")
    window = [pt for pt, keep in zip(points, mask) if keep]
    return ProbeReport(
        theta=float(theta),
        branch="low" if theta < 1 else "high",
        points=tuple(points),
        fit_range=(min(pt.lam for pt in window), max(pt.lam for pt in window)),
        coefficient_fit=fit_growth([(pt.lam, abs(pt.coefficient)) for pt in window]),
        amplified_fit=fit_growth([(pt.lam, pt.amplified) for pt in window]),
        unit_forcing_fit=fit_growth([(pt.lam, pt.unit_forcing) for pt in window]),
    )
