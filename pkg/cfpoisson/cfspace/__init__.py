"""Cylinders, measure and the partial action on cfspace"""

from cfpoisson.cfspace.action import act, correlation, decay_curve
from cfpoisson.cfspace.cylinders import (
    boolean,
    compact_open,
    cylinder,
    empty,
    full_level,
    measure,
    refine,
)
from cfpoisson.cfspace.freeness import freeness_witness, fundamental_domain

__all__ = [
    "act",
    "correlation",
    "decay_curve",
    "boolean",
    "compact_open",
    "cylinder",
    "empty",
    "full_level",
    "measure",
    "refine",
    "freeness_witness",
    "fundamental_domain",
]
