"""Modal spectral analysis of a Kirchhoff-Love plate coupled to a membrane-like
electric network with fractional damping ``delta A^theta v_t``."""

from .analyticity import ProbeReport, WitnessPoint, mu_closed_form, nu_closed_form, qn_roots, witness_sequence
from .fitting import GrowthFit, fit_growth
from .modal import (
    ModalBlock,
    build_mode_block,
    dissipation_rate,
    mode_eigenvalues,
    mode_inner,
    spectral_abscissa,
)
from .parameters import PhysicalParameters, SystemParameters, derive_parameters, validate
from .resolvent import ResolventSample, global_resolvent_norm, mode_resolvent_norm, sweep
from .simulation import EnergyTrajectory, energy, initial_data, propagate_mode, simulate
from .spectrum import Spectrum, explicit_spectrum, interval_spectrum, rectangle_spectrum

__version__ = "0.1.0"
