"""
Group arithmetic, finite subsets and word norms
"""

from cfpoisson.groups.arithmetic import (
    element_order,
    has_finite_order,
    inv,
    is_central,
    mul,
    order_of,
    power,
)
from cfpoisson.groups.folner import folner_defect, folner_witness
from cfpoisson.groups.norms import ball, min_norm_element, norm, shell
from cfpoisson.groups.subsets import FiniteSubset, set_inverse, set_product, union_all

__all__ = [
    "element_order",
    "has_finite_order",
    "inv",
    "is_central",
    "mul",
    "order_of",
    "power",
    "folner_defect",
    "folner_witness",
    "ball",
    "min_norm_element",
    "norm",
    "shell",
    "FiniteSubset",
    "set_inverse",
    "set_product",
    "union_all",
]
