"""
Poisson suspension records: laws, samples, entropy curves and statistics
"""

from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_serializer, field_validator, model_serializer
from scipy.stats import poisson

from cfpoisson.groups.arithmetic import from_points
from cfpoisson.types.group import GroupElement
from cfpoisson.types.space import CompactOpen


class PoissonLaw(BaseModel):
    """The Poisson distribution with parameter t"""

    t: float
    """Intensity t >= 0"""

    @field_validator("t")
    @classmethod
    def validate_t(cls, v: float) -> float:
        if not v >= 0:
            raise ValueError("domain_error: Poisson parameter must be non-negative")
        return v

    class Config:
        frozen = True

    def pmf(self, i: int) -> float:
        """p_i = e^{-t} t^i / i!"""
        return float(poisson.pmf(i, self.t))

    @property
    def mean(self) -> float:
        return self.t

    @property
    def variance(self) -> float:
        return self.t

    def support_bound(self, tail: float = 1e-16) -> int:
        """Smallest k with P(N > k) below tail"""
        return int(poisson.isf(tail, self.t)) + 1 if self.t > 0 else 0

    def cdf_table(self, tail: float = 1e-16) -> np.ndarray:
        """cdf values F(0), ..., F(k) up to the support bound"""
        return poisson.cdf(np.arange(self.support_bound(tail) + 1), self.t)


class PoissonSample(BaseModel):
    """
    A seeded realization of the Poisson point process at a fixed resolution.

    counts[i] is the number of points in the cylinder named by the i-th row
    of names (region names in canonical order).
    """

    resolution: int
    """Resolution level M"""

    region: CompactOpen
    """Sampled region, a compact open set at level M"""

    seed: int
    """Seed of the counter-based stream"""

    names: np.ndarray
    """Coordinate matrix of region.names in canonical order"""

    counts: np.ndarray
    """Point count per name"""

    @model_serializer
    def serialize(self) -> Dict[str, Any]:
        occupied = np.flatnonzero(self.counts)
        elements = from_points(self.region.names.group, self.names[occupied])
        return {
            "resolution": self.resolution,
            "seed": self.seed,
            "counts": [[g.to_json(), int(self.counts[i])] for g, i in zip(elements, occupied)],
        }

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def counts_map(self) -> Dict[GroupElement, int]:
        """Occupied names with their counts; absent names carry 0"""
        occupied = np.flatnonzero(self.counts)
        elements = from_points(self.region.names.group, self.names[occupied])
        return {g: int(self.counts[i]) for g, i in zip(elements, occupied)}


class EntropyPoint(BaseModel):
    """One level of the entropy bound curve"""

    level: int
    measure: Fraction
    """μ([1]_n) = 1/(#C_1 ⋯ #C_n)"""

    entropy: float
    """f(μ([1]_n)) in nats"""

    @field_serializer("measure")
    def serialize_measure(self, v: Fraction) -> str:
        return str(v)

    class Config:
        arbitrary_types_allowed = True


class EntropyCurve(BaseModel):
    """The bound sequence f(μ([1]_n)), n = 1..N"""

    points: List[EntropyPoint]
    decreasing: bool
    """True iff the entropy values are strictly decreasing (bound → 0 plausible)"""


class StatisticsSettings(BaseModel):
    """Thresholds of the statistical checks"""

    bracket_sigmas: float = Field(3.0, alias="bracketSigmas")
    """Monte-Carlo estimates must lie within this many standard errors"""

    marginal_sigmas: float = Field(4.0, alias="marginalSigmas")
    """Sampler mean/variance tolerance in standard errors"""

    significance: float = 0.01
    """Chi-square significance level"""

    correlation_factor: float = Field(4.0, alias="correlationFactor")
    """Cross-block |ρ| threshold is correlation_factor/sqrt(trials)"""

    repetitions: int = 3
    """Independent repetitions for the majority verdict"""

    min_expected: float = Field(5.0, alias="minExpected")
    """Chi-square bins are pooled until every expected count reaches this"""

    class Config:
        populate_by_name = True


class BlockStatistics(BaseModel):
    """Goodness of fit of one block's counts against Poisson(μ(block))"""

    block: int
    measure: Fraction
    mean: float
    variance: float
    chi_square: float
    p_values: List[float]
    """One p-value per repetition"""

    passed: bool
    """Majority of repetitions not rejected at the significance level"""

    @field_serializer("measure")
    def serialize_measure(self, v: Fraction) -> str:
        return str(v)

    class Config:
        arbitrary_types_allowed = True


class CoarseningStatistics(BaseModel):
    """Result of the coarsening/independence suite"""

    trials: int
    seed: int
    blocks: List[BlockStatistics]
    correlations: List[List[float]]
    """Empirical correlation matrix of the block counts"""

    correlation_threshold: float
    independent: bool
    """All off-diagonal |ρ| below the threshold"""

    passed: bool


class MarginalStatistics(BaseModel):
    """Empirical mean and variance of one cylinder count"""

    measure: Fraction
    mean: float
    variance: float
    mean_stderr: float
    variance_stderr: float
    passed: bool

    @field_serializer("measure")
    def serialize_measure(self, v: Fraction) -> str:
        return str(v)

    class Config:
        arbitrary_types_allowed = True


class CovarianceEstimate(BaseModel):
    """Monte-Carlo covariance of N_A∘T*_g and N_B"""

    estimate: float
    stderr: float
    trials: int
    exact: Optional[Fraction] = None
    """Exact covariance μ(T_gA ∩ B) when computed alongside"""

    @field_serializer("exact")
    def serialize_exact(self, v: Optional[Fraction]) -> Optional[str]:
        return None if v is None else str(v)

    def brackets(self, sigmas: float = 3.0) -> bool:
        """Whether the exact value lies within sigmas standard errors of the estimate"""
        if self.exact is None:
            return False
        return abs(self.estimate - float(self.exact)) <= sigmas * self.stderr + 1e-12

    class Config:
        arbitrary_types_allowed = True
