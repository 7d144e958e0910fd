"""
Search for powers g^l that move a finite set off itself
"""

import logging
from typing import Optional

import numpy as np

from cfpoisson.groups.arithmetic import mul_points, power, power_points
from cfpoisson.groups.subsets import FiniteSubset, join_points
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupElement

logger = logging.getLogger(__name__)

# Runs whose endpoints are used to prefilter exponents
SAMPLE_RUNS = 256

# Moved sample points examined per vectorized block
BLOCK_POINTS = 1 << 21


def _sample_points(subset: FiniteSubset) -> np.ndarray:
    """Both endpoints of up to SAMPLE_RUNS evenly spread runs"""
    count = min(subset.run_count, SAMPLE_RUNS)
    idx = np.unique(np.linspace(0, subset.run_count - 1, count).astype(np.int64))
    first = join_points(subset.group, subset.prefix[idx], subset.lo[idx])
    last = join_points(subset.group, subset.prefix[idx], subset.hi[idx])
    return np.vstack([first, last])


def displaces(
    h: GroupElement,
    subset: FiniteSubset,
    within: Optional[FiniteSubset] = None,
    avoid: Optional[FiniteSubset] = None,
) -> bool:
    """Whether h·subset lies inside `within` and misses `avoid` (absent bounds are ignored)"""
    moved = subset.translate_left(h)
    if within is not None and not moved.is_subset(within):
        return False
    return avoid is None or moved.isdisjoint(avoid)


def smallest_displacement(
    g: GroupElement,
    subset: FiniteSubset,
    l_max: int,
    within: Optional[FiniteSubset] = None,
    avoid: Optional[FiniteSubset] = None,
) -> Optional[int]:
    """
    Smallest l in [1, l_max] with g^l·subset ⊆ within and g^l·subset ∩ avoid = ∅.

    Exponents are screened in ascending blocks by moving a sample of run
    endpoints; survivors of the screen are verified exactly in ascending
    order, so the answer is exact.

    Args:
        g: Element whose powers are tried
        subset: Nonempty set to displace
        l_max: Largest exponent tried
        within: Set the image must lie in (None for no constraint)
        avoid: Set the image must miss (None for no constraint)

    Returns:
        The smallest valid exponent, or None if there is none up to l_max

    Raises:
        CFPoissonError: domain_error if l_max < 1, empty_subset if subset is empty
    """
    if l_max < 1:
        raise CFPoissonError("domain_error", f"l_max must be >= 1, got {l_max}")
    if not subset:
        raise CFPoissonError("empty_subset", "cannot displace the empty set")
    group = subset.group
    samples = _sample_points(subset)
    per_block = max(1024, BLOCK_POINTS // samples.shape[0])
    exact_checks = 0
    for start in range(1, l_max + 1, per_block):
        exponents = np.arange(start, min(l_max, start + per_block - 1) + 1, dtype=np.int64)
        powers = power_points(g, exponents)
        moved = mul_points(
            group,
            np.repeat(powers, samples.shape[0], axis=0),
            np.tile(samples, (exponents.shape[0], 1)),
        )
        ok = np.ones(moved.shape[0], dtype=bool)
        if within is not None:
            ok &= within.contains_points(moved)
        if avoid is not None:
            ok &= ~avoid.contains_points(moved)
        survivors = exponents[ok.reshape(exponents.shape[0], -1).all(axis=1)]
        for l in survivors:
            exact_checks += 1
            if displaces(power(g, int(l)), subset, within, avoid):
                logger.debug("g=%r displaces after l=%d (%d exact checks)", g, l, exact_checks)
                return int(l)
    logger.debug("no displacing power of %r up to %d", g, l_max)
    return None
