"""
Følner defect of finite subsets
"""

from fractions import Fraction
from typing import Optional, Tuple

from cfpoisson.groups.subsets import FiniteSubset
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupElement


def folner_witness(F: FiniteSubset, K: FiniteSubset) -> Tuple[Fraction, Optional[GroupElement]]:
    """
    Følner defect of F with respect to K together with a maximizing element.

    The defect is max over g in K of #(gF △ F)/#F; since #gF = #F this is
    2(#F - #(gF ∩ F))/#F.

    Returns:
        (defect, g) where g attains the maximum (None when K is empty)

    Raises:
        CFPoissonError: empty_subset if F is empty
    """
    if not F:
        raise CFPoissonError("empty_subset", "Følner defect of the empty set is undefined")
    size = F.cardinality
    best = Fraction(0)
    witness: Optional[GroupElement] = None
    for g in K.elements():
        overlap = F.translate_left(g).intersection(F).cardinality
        defect = Fraction(2 * (size - overlap), size)
        if witness is None or defect > best:
            best, witness = defect, g
    return best, witness


def folner_defect(F: FiniteSubset, K: FiniteSubset) -> Fraction:
    """
    Exact Følner defect max_{g in K} #(gF △ F)/#F, a rational in [0, 2].

    Raises:
        CFPoissonError: empty_subset if F is empty
    """
    return folner_witness(F, K)[0]
