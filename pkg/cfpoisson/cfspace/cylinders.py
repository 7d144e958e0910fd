"""
Cylinders, refinement, exact measure and boolean algebra of compact open sets
"""

from fractions import Fraction
from typing import Literal, Tuple

from cfpoisson.groups.subsets import FiniteSubset, set_product
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupElement
from cfpoisson.types.scheme import CFScheme
from cfpoisson.types.space import CompactOpen, Cylinder

BooleanOp = Literal["intersect", "union", "subtract"]


def _check_level(s: CFScheme, level: int) -> None:
    if not 0 <= level <= s.depth:
        raise CFPoissonError(
            "depth_exceeded", f"level {level} outside 0..{s.depth}", level=level
        )


def compact_open(s: CFScheme, level: int, names: FiniteSubset) -> CompactOpen:
    """
    The union of the cylinders [f]_level over the given names.

    Raises:
        CFPoissonError: depth_exceeded for a level beyond the scheme,
            not_in_scheme if some name lies outside F_level
    """
    _check_level(s, level)
    if names.group != s.group:
        raise CFPoissonError("kind_mismatch", "names must live in the scheme's group")
    stray = names - s.F[level]
    if stray:
        raise CFPoissonError(
            "not_in_scheme", f"{stray.first()!r} is not in F_{level}", level=level
        )
    return CompactOpen.trusted(s, level, names)


def cylinder(s: CFScheme, f: GroupElement, n: int) -> CompactOpen:
    """The cylinder [f]_n as a compact open set"""
    return compact_open(s, n, FiniteSubset.singleton(f))


def as_cylinder(c: Cylinder, s: CFScheme) -> CompactOpen:
    return cylinder(s, c.name, c.level)


def full_level(s: CFScheme, n: int) -> CompactOpen:
    """X_n: all level-n cylinders"""
    _check_level(s, n)
    return CompactOpen.trusted(s, n, s.F[n])


def empty(s: CFScheme, n: int = 0) -> CompactOpen:
    _check_level(s, n)
    return CompactOpen.trusted(s, n, FiniteSubset.empty(s.group))


def refine(A: CompactOpen, m: int) -> CompactOpen:
    """
    Rewrite A at level m >= A.level.

    Each [f]_n splits into the children [f c]_{n+1}, c in C_{n+1}.

    Raises:
        CFPoissonError: depth_exceeded if m exceeds the depth, domain_error
            if m is below A.level
    """
    s = A.scheme
    _check_level(s, m)
    if m < A.level:
        raise CFPoissonError("domain_error", f"cannot refine level {A.level} down to {m}")
    names = A.names
    for level in range(A.level + 1, m + 1):
        names = set_product(names, s.copies(level))
    return CompactOpen.trusted(s, m, names)


def measure(A: CompactOpen) -> Fraction:
    """μ(A) = #names / (#C_1 ⋯ #C_level), exactly"""
    return Fraction(A.names.cardinality, A.scheme.cylinder_denominator(A.level))


def common_level(A: CompactOpen, B: CompactOpen) -> Tuple[CompactOpen, CompactOpen]:
    """A and B refined to max(A.level, B.level)"""
    if A.scheme is not B.scheme and A.scheme != B.scheme:
        raise CFPoissonError("kind_mismatch", "compact open sets of different schemes")
    level = max(A.level, B.level)
    return refine(A, level), refine(B, level)


def boolean(op: BooleanOp, A: CompactOpen, B: CompactOpen) -> CompactOpen:
    """
    Set operation on compact open sets, at their common level.

    Raises:
        CFPoissonError: domain_error for an unknown operation
    """
    A, B = common_level(A, B)
    if op == "intersect":
        names = A.names & B.names
    elif op == "union":
        names = A.names | B.names
    elif op == "subtract":
        names = A.names - B.names
    else:
        raise CFPoissonError("domain_error", f"unknown boolean operation {op!r}")
    return CompactOpen.trusted(A.scheme, A.level, names)


def contains(A: CompactOpen, B: CompactOpen) -> bool:
    """Whether B ⊆ A"""
    A, B = common_level(A, B)
    return B.names.is_subset(A.names)
