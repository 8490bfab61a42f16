"""Averaged functions of arbitrary order for periodic piecewise-smooth
planar systems, simple-zero based crossing limit cycle prediction, and
verification against direct simulation of the perturbed system.
"""

from . import backend
from .averaging import (AveragedFunction, Cascade, averaged,
                        averaged_derivative, averaged_via_integrating_factor,
                        cascade_rhs, integrate_cascade)
from .cycles import (CoefficientVector, CycleCandidate, LogFamilyCount,
                     RankReport, find_zeros, fit_coefficients,
                     log_family_count, parameter_rank, scan_zeros)
from .examples import build_example, reference_f1
from .model import (PiecewiseStandardSystem, PlanarPiecewiseField,
                    PlanarSector, SectorPartition, polar_standard_form,
                    sector_of, validate_h1)
from .oracle import (DisplacementSample, VerifiedCycle, cross_check_modes,
                     displacement, remainder_slope, verify_cycle)
from .series import Jet, jet_const, jet_div, jet_elementary, jet_mul, jet_var

__version__ = "0.1.0"

BACKEND = backend.BACKEND_NAME

__all__ = [
    "AveragedFunction", "Cascade", "averaged", "averaged_derivative",
    "averaged_via_integrating_factor", "cascade_rhs", "integrate_cascade",
    "CoefficientVector", "CycleCandidate", "LogFamilyCount", "RankReport",
    "find_zeros", "fit_coefficients", "log_family_count", "parameter_rank",
    "scan_zeros", "build_example", "reference_f1",
    "PiecewiseStandardSystem", "PlanarPiecewiseField", "PlanarSector",
    "SectorPartition", "polar_standard_form", "sector_of", "validate_h1",
    "DisplacementSample", "VerifiedCycle", "cross_check_modes",
    "displacement", "remainder_slope", "verify_cycle", "Jet", "jet_const",
    "jet_div", "jet_elementary", "jet_mul", "jet_var", "BACKEND",
    "__version__",
]
