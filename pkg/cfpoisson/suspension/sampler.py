"""
Seeded Poisson configurations on cfspace

A sample at resolution M draws an independent Poisson(μ([f]_M)) count for
every level-M cylinder of a compact open region. Counts on coarser sets are
sums; finer counts come from splitting each cylinder's points uniformly
among its children. Every draw is keyed by (seed, purpose, level, name), so
results do not depend on evaluation order.
"""

import logging
from typing import Iterable, Tuple

import numpy as np

from cfpoisson.cfspace.cylinders import refine
from cfpoisson.groups.arithmetic import mul_points, pad_points, to_points
from cfpoisson.groups.subsets import FiniteSubset, set_product
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.shared.streams import name_keys, stream_key, uniforms
from cfpoisson.types.group import GroupElement
from cfpoisson.types.space import CompactOpen
from cfpoisson.types.suspension import PoissonLaw, PoissonSample

logger = logging.getLogger(__name__)


def _index_of(names: np.ndarray, points: np.ndarray) -> np.ndarray:
    """
    Row index in names of every row of points.

    Raises:
        CFPoissonError: coverage_error if some point is not among the names
    """
    width = max(names.shape[1], points.shape[1])
    combined = np.vstack([pad_points(names, width), pad_points(points, width)])
    if combined.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    _, inverse = np.unique(combined, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    position = np.full(int(inverse.max()) + 1, -1, dtype=np.int64)
    position[inverse[: names.shape[0]]] = np.arange(names.shape[0])
    found = position[inverse[names.shape[0] :]]
    if (found < 0).any():
        raise CFPoissonError("coverage_error", "points outside the sampled region")
    return found


def _resolve_region(region: CompactOpen, M: int) -> CompactOpen:
    s = region.scheme
    if not region.level <= M <= s.depth:
        raise CFPoissonError(
            "depth_exceeded",
            f"resolution {M} must lie in {region.level}..{s.depth}",
            level=M,
        )
    return refine(region, M)


def _draw(keys: np.ndarray, seed: int, M: int, cdf: np.ndarray) -> np.ndarray:
    u = uniforms(stream_key(seed, "sample", M), keys)
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def cylinder_law(region: CompactOpen, M: int) -> PoissonLaw:
    """Law of the count of a single level-M cylinder"""
    return PoissonLaw(t=1.0 / region.scheme.cylinder_denominator(M))


def sample(region: CompactOpen, M: int, seed: int) -> PoissonSample:
    """
    Draw independent Poisson counts for the level-M cylinders of a region.

    Args:
        region: Compact open region to sample
        M: Resolution level, region.level <= M <= depth
        seed: Non-negative seed

    Raises:
        CFPoissonError: depth_exceeded for an unreachable resolution,
            domain_error for a negative seed
    """
    if seed < 0:
        raise CFPoissonError("domain_error", f"seed must be >= 0, got {seed}")
    fine = _resolve_region(region, M)
    names = fine.names.points()
    keys = name_keys(fine.scheme.group, names)
    counts = _draw(keys, seed, M, cylinder_law(region, M).cdf_table())
    return PoissonSample(resolution=M, region=fine, seed=seed, names=names, counts=counts)


def sample_counts(
    region: CompactOpen, M: int, seeds: Iterable[int]
) -> Tuple[CompactOpen, np.ndarray, np.ndarray]:
    """
    Counts of many samples of one region at once.

    Returns:
        (refined region, names, counts) with counts[i, j] the count of the
        j-th name in sample(region, M, seeds[i])
    """
    fine = _resolve_region(region, M)
    names = fine.names.points()
    keys = name_keys(fine.scheme.group, names)
    cdf = cylinder_law(region, M).cdf_table()
    rows = [_draw(keys, seed, M, cdf) for seed in seeds]
    counts = np.vstack(rows) if rows else np.zeros((0, names.shape[0]), dtype=np.int64)
    return fine, names, counts


def _refine_once(x: PoissonSample) -> PoissonSample:
    """Split every occupied cylinder's points among its children, one level down"""
    s = x.region.scheme
    level = x.resolution + 1
    children = s.copies(level)
    child_points = children.points()
    region = CompactOpen.trusted(s, level, set_product(x.region.names, children))
    names = region.names.points()
    counts = np.zeros(names.shape[0], dtype=np.int64)

    occupied = np.flatnonzero(x.counts)
    if occupied.size:
        k = x.counts[occupied]
        parent = np.repeat(occupied, k)
        within = np.arange(parent.shape[0]) - np.repeat(np.cumsum(k) - k, k)
        keys = np.repeat(name_keys(s.group, x.names[occupied]), k)
        u = uniforms(stream_key(x.seed, "refine", level), keys, within)
        pick = np.minimum((u * child_points.shape[0]).astype(np.int64), child_points.shape[0] - 1)
        landed = mul_points(s.group, x.names[parent], child_points[pick])
        np.add.at(counts, _index_of(names, landed), 1)
    return PoissonSample(resolution=level, region=region, seed=x.seed, names=names, counts=counts)


def refine_sample(x: PoissonSample, m: int) -> PoissonSample:
    """
    The same configuration at a finer resolution m.

    Refinement proceeds one level at a time, so refining to m and then to m'
    agrees with refining straight to m'.

    Raises:
        CFPoissonError: depth_exceeded if m exceeds the depth, domain_error if
            m is below the current resolution
    """
    s = x.region.scheme
    if m > s.depth:
        raise CFPoissonError("depth_exceeded", f"resolution {m} exceeds depth {s.depth}", level=m)
    if m < x.resolution:
        raise CFPoissonError("domain_error", f"cannot coarsen resolution {x.resolution} to {m}")
    while x.resolution < m:
        x = _refine_once(x)
    return x


def _align(x: PoissonSample, K: CompactOpen) -> Tuple[PoissonSample, CompactOpen]:
    """Bring x and K to a common resolution"""
    if K.level > x.resolution:
        x = refine_sample(x, K.level)
    elif K.level < x.resolution:
        K = refine(K, x.resolution)
    if not K.names.is_subset(x.region.names):
        raise CFPoissonError(
            "coverage_error",
            f"{(K.names - x.region.names).first()!r} lies outside the sampled region",
        )
    return x, K


def count(x: PoissonSample, K: CompactOpen) -> int:
    """
    Number of points of x in K.

    K is refined to the sample's resolution, or the sample to K's level.

    Raises:
        CFPoissonError: coverage_error if K leaves the sampled region
    """
    x, K = _align(x, K)
    return int(x.counts[K.names.contains_points(x.names)].sum())


def restrict(x: PoissonSample, K: CompactOpen) -> PoissonSample:
    """The configuration x restricted to K ⊆ region"""
    x, K = _align(x, K)
    names = K.names.points()
    counts = x.counts[_index_of(x.names, names)]
    return PoissonSample(resolution=x.resolution, region=K, seed=x.seed, names=names, counts=counts)


def move_names(
    g: GroupElement, names: np.ndarray, F: FiniteSubset
) -> Tuple[np.ndarray, np.ndarray]:
    """g·f for each row f, and whether it stays in F"""
    g_point = to_points(F.group, [g])
    moved = mul_points(F.group, g_point, pad_points(names, max(names.shape[1], g_point.shape[1])))
    return moved, F.contains_points(moved)


def transport_level(x: PoissonSample, g: GroupElement, budget: int) -> int:
    """
    Smallest level at which T_g is defined on every occupied cylinder of x.

    Raises:
        CFPoissonError: undefined_at_budget if no level up to the budget works
    """
    s = x.region.scheme
    if budget > s.depth:
        raise CFPoissonError("depth_exceeded", f"budget {budget} exceeds depth {s.depth}")
    occupied = FiniteSubset.from_points(s.group, x.names[x.counts > 0])
    level = x.resolution
    while not occupied.translate_left(g).is_subset(s.F[level]):
        if level >= budget:
            raise CFPoissonError(
                "undefined_at_budget",
                f"T_{g!r} is not defined on the occupied cylinders within level {budget}",
                element=g,
                level=budget,
            )
        level += 1
        occupied = set_product(occupied, s.copies(level))
    return level


def transport(x: PoissonSample, g: GroupElement, budget: int) -> PoissonSample:
    """
    The pushed configuration T*_g x: mass at [f] moves to T_g[f].

    The sample is refined until T_g is defined on every occupied cylinder;
    unoccupied cylinders on which T_g is still undefined drop out of the
    region. For every K inside the new region,
    count(transport(x, g), K) = count(x, T_{g^-1}K).

    Raises:
        CFPoissonError: undefined_at_budget if an occupied cylinder stays
            unresolved at the budget level
    """
    s = x.region.scheme
    level = transport_level(x, g, budget)
    y = refine_sample(x, level)
    moved, inside = move_names(g, y.names, s.F[level])
    region = FiniteSubset.from_points(s.group, moved[inside])
    names = region.points()
    counts = np.zeros(names.shape[0], dtype=np.int64)
    counts[_index_of(names, moved[inside])] = y.counts[inside]
    logger.debug("transported %d points by %r at level %d", y.total, g, level)
    return PoissonSample(
        resolution=level,
        region=CompactOpen.trusted(s, level, region),
        seed=x.seed,
        names=names,
        counts=counts,
    )
