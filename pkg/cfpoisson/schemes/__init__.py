"""(C,F)-scheme construction and condition checkers"""

from cfpoisson.schemes.builder import build_scheme
from cfpoisson.schemes.checks import (
    check_base,
    check_exhaustion,
    check_folner,
    check_mixing,
    check_square,
    check_triangle,
    triangle_report,
)

__all__ = [
    "build_scheme",
    "check_base",
    "check_exhaustion",
    "check_folner",
    "check_mixing",
    "check_square",
    "check_triangle",
    "triangle_report",
]
