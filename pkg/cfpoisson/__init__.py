"""
cfpoisson - a laboratory for (C,F)-schemes, cfspace and Poisson suspensions
"""

__version__ = "0.1.0"

from cfpoisson.types import GroupDescriptor, GroupElement, ConditionReport, Verdict
from cfpoisson.groups import FiniteSubset
from cfpoisson.schemes import build_scheme, check_base, check_folner, check_mixing
from cfpoisson.cfspace import act, correlation, cylinder, decay_curve, measure
from cfpoisson.suspension.poisson import entropy_bound_curve, poisson_entropy
from cfpoisson.suspension.sampler import count, sample, transport
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.shared.io import load_scheme, store_scheme

__all__ = [
    "GroupDescriptor",
    "GroupElement",
    "ConditionReport",
    "Verdict",
    "FiniteSubset",
    "build_scheme",
    "check_base",
    "check_folner",
    "check_mixing",
    "act",
    "correlation",
    "cylinder",
    "decay_curve",
    "measure",
    "entropy_bound_curve",
    "poisson_entropy",
    "count",
    "sample",
    "transport",
    "CFPoissonError",
    "load_scheme",
    "store_scheme",
]
