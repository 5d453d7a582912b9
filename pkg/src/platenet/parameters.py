"""Dimensionless coefficients of the coupled plate / electric-network system.

The abstract model is

    u_tt + alpha A^2 u + gamma A v_t = 0
    v_tt + beta A v - gamma A u_t + delta A^theta v_t = 0

with ``A = -Laplacian`` under Dirichlet conditions.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields


class ParameterError(ValueError):
    """Raised when a parameter set violates an admissibility constraint."""


@dataclass(frozen=True)
class SystemParameters:
    alpha: float = 1.0 / math.pi**2
    beta: float = 1.0
    gamma: float = 1.0
    delta: float = 1.0
    theta: float = 0.5

    def replace(self, **changes) -> "SystemParameters":
        return SystemParameters(**{**asdict(self), **changes})

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class PhysicalParameters:
    """Plate and network constants in any consistent unit system.

    D_P bending stiffness, M_P plate mass, l plate diameter, R_N net-resistance,
    L_N net-inductance, C_N net-capacitance per unit area, g_me electro-mechanical
    coupling coefficient.
    """

    D_P: float
    M_P: float
    l: float
    R_N: float
    L_N: float
    C_N: float
    g_me: float

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{f.name} must be positive (got {value!r})")

    def characteristic_pulsation(self) -> float:
        return math.pi / self.l * math.sqrt(self.D_P / self.M_P)


PHYSICAL_KEYS = tuple(f.name for f in fields(PhysicalParameters))
SYSTEM_KEYS = tuple(f.name for f in fields(SystemParameters))


def validate(params: SystemParameters) -> SystemParameters:
    """Return ``params`` unchanged if admissible, otherwise raise ParameterError.

    All violations are collected into a single message.
    """
    problems = []
    for name in SYSTEM_KEYS:
        value = getattr(params, name)
        if not math.isfinite(value):
            problems.append(f"{name} must be finite (got {value!r})")
    if not problems:
        for name in ("alpha", "beta", "delta"):
            value = getattr(params, name)
            if value <= 0:
                problems.append(f"{name} must be positive (got {value!r})")
        if params.gamma == 0:
            problems.append(f"gamma must be nonzero (got {params.gamma!r})")
        if not 0 <= params.theta <= 1:
            problems.append(f"theta out of [0,1] (got {params.theta!r})")
    if problems:
        raise ParameterError("; ".join(problems))
    return params


def derive_parameters(phys: PhysicalParameters, theta: float) -> SystemParameters:
    """Nondimensionalize physical constants with the characteristic pulsation.

    ``alpha`` reduces to ``1/pi**2`` for any input; it is still evaluated from
    the definition so the substitution can be checked.
    """
    omega = phys.characteristic_pulsation()
    alpha = phys.D_P / (phys.M_P * phys.l**2 * omega**2)
    delta = phys.R_N / (phys.L_N * omega)
    gamma = phys.g_me / (phys.l * omega) * math.sqrt(1.0 / (phys.M_P * phys.C_N))
    beta = 1.0 / (phys.L_N * phys.C_N * phys.l**2 * omega**2)
    return validate(SystemParameters(alpha, beta, gamma, delta, theta))
