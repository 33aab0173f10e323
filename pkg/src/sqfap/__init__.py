"""Squarefree integers in arithmetic progressions: counts, variances and oracles."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .arith import MobiusTable, UnitGroup, c_constant, euler_phi, sieve_mobius, unit_group
from .errors import CapacityError, DomainError
from .progressions import (
    ProgressionProfile,
    ResidueBijection,
    VarianceReport,
    equivalence_check,
    error_term,
    profile,
    t_gamma,
    t_via_convolution,
    v_gamma,
    variance,
)

__all__ = [
    "BACKEND",
    "CapacityError",
    "DomainError",
    "MobiusTable",
    "ProgressionProfile",
    "ResidueBijection",
    "UnitGroup",
    "VarianceReport",
    "c_constant",
    "equivalence_check",
    "error_term",
    "euler_phi",
    "profile",
    "sieve_mobius",
    "t_gamma",
    "t_via_convolution",
    "unit_group",
    "v_gamma",
    "variance",
]
