"""
Statistical checks of the Poisson suspension

Counts of disjoint compact open sets must be independent Poisson variables
with the sets' measures as means, and the covariance of N_A∘T*_g with N_B
must equal μ(T_gA ∩ B).
"""

import logging
import math
from collections import Counter
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import chisquare, poisson

from cfpoisson.cfspace.action import act, correlation
from cfpoisson.cfspace.cylinders import boolean, measure, refine
from cfpoisson.cfspace.freeness import orbit_partition
from cfpoisson.groups.arithmetic import element_order, inv
from cfpoisson.shared.errors import CFPoissonError, require
from cfpoisson.suspension.sampler import count, move_names, sample, sample_counts, transport
from cfpoisson.types.group import GroupElement
from cfpoisson.types.scheme import CFScheme
from cfpoisson.types.space import CompactOpen
from cfpoisson.types.suspension import (
    BlockStatistics,
    CoarseningStatistics,
    CovarianceEstimate,
    MarginalStatistics,
    PoissonLaw,
    StatisticsSettings,
)

logger = logging.getLogger(__name__)


def _require_trials(trials: int) -> None:
    require(trials >= 1, "invalid_precondition", f"trials must be >= 1, got {trials}")


def _seeds(seed: int, trials: int, repetition: int = 0) -> range:
    start = seed + repetition * trials
    return range(start, start + trials)


def pooled_bins(
    values: np.ndarray, mu: float, min_expected: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Observed and expected histograms of Poisson(mu) counts, with adjacent
    bins pooled until every expected count reaches min_expected.
    """
    trials = values.shape[0]
    law = PoissonLaw(t=mu)
    top = max(law.support_bound(1e-12), int(values.max(initial=0)) + 1)
    probs = poisson.pmf(np.arange(top), mu)
    probs[-1] = poisson.sf(top - 2, mu) if top >= 2 else 1.0
    observed = np.bincount(np.minimum(values, top - 1), minlength=top).astype(np.float64)
    expected = probs * trials

    pooled_obs: List[float] = []
    pooled_exp: List[float] = []
    acc_obs = acc_exp = 0.0
    for o, e in zip(observed, expected):
        acc_obs += o
        acc_exp += e
        if acc_exp >= min_expected:
            pooled_obs.append(acc_obs)
            pooled_exp.append(acc_exp)
            acc_obs = acc_exp = 0.0
    if pooled_exp:
        pooled_obs[-1] += acc_obs
        pooled_exp[-1] += acc_exp
    else:
        pooled_obs, pooled_exp = [acc_obs], [acc_exp]
    obs = np.array(pooled_obs)
    exp = np.array(pooled_exp)
    return obs, exp * (obs.sum() / exp.sum())


def poisson_fit(values: np.ndarray, mu: float, min_expected: float) -> Tuple[float, float]:
    """(chi-square statistic, p-value) of the counts against Poisson(mu)"""
    obs, exp = pooled_bins(values, mu, min_expected)
    if obs.shape[0] < 2:
        return 0.0, 1.0
    result = chisquare(obs, exp)
    return float(result.statistic), float(result.pvalue)


def marginal_check(
    K: CompactOpen,
    M: int,
    trials: int,
    seed: int,
    settings: Optional[StatisticsSettings] = None,
) -> MarginalStatistics:
    """
    Empirical mean and variance of count(sample, K) against μ(K).

    Raises:
        CFPoissonError: invalid_precondition for trials < 1
    """
    _require_trials(trials)
    settings = settings or StatisticsSettings()
    _, _, counts = sample_counts(K, M, _seeds(seed, trials))
    values = counts.sum(axis=1).astype(np.float64)
    mu = measure(K)
    t = float(mu)
    mean = float(values.mean())
    variance = float(values.var(ddof=1)) if trials > 1 else 0.0
    mean_stderr = math.sqrt(t / trials)
    variance_stderr = math.sqrt((t + 2 * t * t) / trials)
    passed = (
        abs(mean - t) <= settings.marginal_sigmas * mean_stderr
        and abs(variance - t) <= settings.marginal_sigmas * variance_stderr
    )
    return MarginalStatistics(
        measure=mu,
        mean=mean,
        variance=variance,
        mean_stderr=mean_stderr,
        variance_stderr=variance_stderr,
        passed=passed,
    )


def _check_partition(
    region: CompactOpen, blocks: Sequence[CompactOpen], M: int
) -> List[CompactOpen]:
    require(len(blocks) > 0, "invalid_precondition", "at least one block is needed")
    refined = []
    for i, block in enumerate(blocks):
        if block.level > M:
            raise CFPoissonError("domain_error", f"block {i} is finer than resolution {M}")
        if block.is_empty:
            raise CFPoissonError("invalid_precondition", f"block {i} is empty")
        refined.append(refine(block, M))
    fine_region = refine(region, M)
    for i, block in enumerate(refined):
        if not block.names.is_subset(fine_region.names):
            raise CFPoissonError("coverage_error", f"block {i} leaves the sampled region")
        for j in range(i):
            if not block.names.isdisjoint(refined[j].names):
                raise CFPoissonError("partition_error", f"blocks {j} and {i} overlap")
    return refined


def coarsen_check(
    region: CompactOpen,
    M: int,
    blocks: Sequence[CompactOpen],
    trials: int,
    seed: int,
    settings: Optional[StatisticsSettings] = None,
) -> CoarseningStatistics:
    """
    Block counts are independent Poisson(μ(block)).

    Each block's counts are tested with a chi-square goodness-of-fit test in
    several independent repetitions; a block passes on a majority. Blocks
    must be pairwise uncorrelated in the first repetition.

    Raises:
        CFPoissonError: partition_error for overlapping blocks,
            coverage_error for blocks outside the region
    """
    _require_trials(trials)
    settings = settings or StatisticsSettings()
    refined = _check_partition(region, blocks, M)
    p_values: List[List[float]] = [[] for _ in refined]
    statistics: List[float] = [0.0] * len(refined)
    first_values: Optional[np.ndarray] = None

    for rep in range(settings.repetitions):
        _, names, counts = sample_counts(region, M, _seeds(seed, trials, rep))
        masks = np.stack([b.names.contains_points(names) for b in refined], axis=1)
        block_values = counts @ masks.astype(np.int64)
        if first_values is None:
            first_values = block_values
        for i, block in enumerate(blocks):
            stat, p = poisson_fit(block_values[:, i], float(measure(block)), settings.min_expected)
            p_values[i].append(p)
            if rep == 0:
                statistics[i] = stat

    assert first_values is not None
    correlations = _correlations(first_values)
    threshold = settings.correlation_factor / math.sqrt(trials)
    off_diagonal = correlations[~np.eye(len(refined), dtype=bool)]
    independent = bool(np.all(np.abs(off_diagonal) < threshold))

    results = []
    for i, block in enumerate(blocks):
        column = first_values[:, i].astype(np.float64)
        accepted = sum(p >= settings.significance for p in p_values[i])
        results.append(
            BlockStatistics(
                block=i,
                measure=measure(block),
                mean=float(column.mean()),
                variance=float(column.var(ddof=1)) if trials > 1 else 0.0,
                chi_square=statistics[i],
                p_values=p_values[i],
                passed=2 * accepted > settings.repetitions,
            )
        )
    passed = independent and all(b.passed for b in results)
    logger.info("coarsening check: %d blocks, %d trials, passed=%s", len(blocks), trials, passed)
    return CoarseningStatistics(
        trials=trials,
        seed=seed,
        blocks=results,
        correlations=correlations.tolist(),
        correlation_threshold=threshold,
        independent=independent,
        passed=passed,
    )


def _correlations(values: np.ndarray) -> np.ndarray:
    """Correlation matrix; columns without variance correlate 0 with the others"""
    columns = values.shape[1]
    if values.shape[0] < 2:
        return np.eye(columns)
    with np.errstate(invalid="ignore", divide="ignore"):
        matrix = np.corrcoef(values.astype(np.float64), rowvar=False)
    matrix = np.atleast_2d(np.nan_to_num(matrix, nan=0.0))
    np.fill_diagonal(matrix, 1.0)
    return matrix


def exact_covariance(g: GroupElement, A: CompactOpen, B: CompactOpen, budget: int) -> Fraction:
    """Cov(N_A∘T*_g, N_B) = μ(T_gA ∩ B)"""
    return correlation(g, A, B, budget)


def mc_covariance(
    g: GroupElement,
    A: CompactOpen,
    B: CompactOpen,
    trials: int,
    seed: int,
    budget: int,
    with_exact: bool = True,
) -> CovarianceEstimate:
    """
    Monte-Carlo estimate of Cov(N_A∘T*_g, N_B).

    N_A(T*_g x) is the count of A in the configuration x restricted to
    T_gA and transported back by g^-1; all trials are drawn in one batch
    over the region T_gA ∪ B.

    Raises:
        CFPoissonError: invalid_precondition for trials < 1,
            undefined_at_budget if T_g is not defined on A within the budget
    """
    _require_trials(trials)
    s = A.scheme
    moved = act(g, A, budget)
    if not moved.residual.is_empty:
        raise CFPoissonError(
            "undefined_at_budget", f"T_{g!r} is not defined on A within level {budget}", element=g
        )
    region = boolean("union", moved.image, B)
    level = region.level
    image = refine(moved.image, level)
    A_level = refine(A, max(A.level, level))

    _, names, counts = sample_counts(region, level, _seeds(seed, trials))
    in_image = image.names.contains_points(names)
    back, inside = move_names(inv(g), names[in_image], s.F[level])
    require(bool(inside.all()), "coverage_error", "transported names left the shape")
    in_A = A_level.names.contains_points(back)
    x_A = counts[:, in_image][:, in_A].sum(axis=1).astype(np.float64)
    x_B = counts[:, _level_mask(B, level, names)].sum(axis=1).astype(np.float64)

    products = (x_A - float(measure(A))) * (x_B - float(measure(B)))
    estimate = float(products.mean())
    stderr = float(products.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    exact = measure(boolean("intersect", moved.image, B)) if with_exact else None
    logger.debug("covariance for %r: %.6g ± %.2g (exact %s)", g, estimate, stderr, exact)
    return CovarianceEstimate(estimate=estimate, stderr=stderr, trials=trials, exact=exact)


def _level_mask(B: CompactOpen, level: int, names: np.ndarray) -> np.ndarray:
    return refine(B, level).names.contains_points(names)


def transport_invariance_check(
    region: CompactOpen,
    M: int,
    g: GroupElement,
    K: CompactOpen,
    trials: int,
    seed: int,
    budget: int,
    settings: Optional[StatisticsSettings] = None,
) -> BlockStatistics:
    """
    T*_g preserves the Poisson law: count(transport(x, g), K) ~ Poisson(μ(K))
    for K inside T_g(region).

    Raises:
        CFPoissonError: undefined_at_budget if T_g is not defined on the
            region, coverage_error if K leaves its image
    """
    _require_trials(trials)
    settings = settings or StatisticsSettings()
    moved = act(g, region, budget)
    if not moved.residual.is_empty:
        raise CFPoissonError(
            "undefined_at_budget", f"T_{g!r} is not defined on the region within level {budget}"
        )
    resolution = max(M, moved.image.level)
    values = np.array(
        [
            count(transport(sample(region, resolution, i), g, resolution), K)
            for i in _seeds(seed, trials)
        ],
        dtype=np.int64,
    )
    mu = measure(K)
    stat, p = poisson_fit(values, float(mu), settings.min_expected)
    return BlockStatistics(
        block=0,
        measure=mu,
        mean=float(values.mean()),
        variance=float(values.var(ddof=1)) if trials > 1 else 0.0,
        chi_square=stat,
        p_values=[p],
        passed=p >= settings.significance,
    )


def fixed_point_probability(s: CFScheme, g: GroupElement, n: int) -> float:
    """
    P(T*_g x = x on X_n) for torsion g with gF_n = F_n.

    The configuration is fixed iff counts are constant along every
    <g>-orbit of level-n cylinders, so the probability is the product over
    orbits O of Σ_k p_k^|O|.

    Raises:
        CFPoissonError: wrong_dichotomy for infinite-order g,
            invalid_precondition if gF_n ≠ F_n
    """
    if element_order(g) is None:
        raise CFPoissonError("wrong_dichotomy", f"{g!r} has infinite order")
    sizes = Counter(len(orbit) for orbit in orbit_partition(g, s.shape(n)))
    t = 1.0 / s.cylinder_denominator(n)
    p = poisson.pmf(np.arange(PoissonLaw(t=t).support_bound() + 1), t)
    log_total = 0.0
    for size, multiplicity in sizes.items():
        log_total += multiplicity * math.log(float(np.sum(p**size)))
    return math.exp(log_total)
