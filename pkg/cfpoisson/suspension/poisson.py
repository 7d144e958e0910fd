"""
Entropy of the Poisson law and the entropy bound along a scheme

For a generating partition built from level-n cylinders the entropy of the
suspension is bounded by f(μ([1]_n)), where f(t) is the Shannon entropy of
Poisson(t) in nats. The bound tends to 0 exactly when μ([1]_n) does.
"""

import logging
import math

import mpmath
import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from cfpoisson.cfspace.cylinders import cylinder, measure
from cfpoisson.shared.errors import CFPoissonError, require
from cfpoisson.types.scheme import CFScheme
from cfpoisson.types.suspension import EntropyCurve, EntropyPoint

logger = logging.getLogger(__name__)

# Certified bound on the neglected tail of the entropy sum
TAIL_TOLERANCE = 1e-15


def _check_t(t: float) -> None:
    if not t >= 0 or math.isinf(t):
        raise CFPoissonError("domain_error", f"Poisson parameter must be finite and >= 0, got {t}")


def _tail_bound(t: float, k: int, log_pk: float) -> float:
    """
    Bound on Σ_{i>k} -p_i ln p_i for k > t.

    With q = t/(k+1) the terms satisfy p_{k+j} <= p_k q^j, and x(-ln x) is
    increasing below 1/e.
    """
    q = t / (k + 1)
    p_k = math.exp(log_pk)
    if q >= 1 or p_k >= 1 / math.e:
        return math.inf
    a, b = -log_pk, -math.log(q) if q > 0 else 0.0
    return p_k * (a * q / (1 - q) + b * q / (1 - q) ** 2)


def poisson_entropy(t: float) -> float:
    """
    f(t) = -Σ p_i ln p_i for Poisson(t), in nats.

    The sum is truncated once the remaining tail is provably below
    TAIL_TOLERANCE.

    Raises:
        CFPoissonError: domain_error for negative or non-finite t
    """
    _check_t(t)
    if t == 0:
        return 0.0
    upper = int(t + 40 * math.sqrt(t) + 40)
    while True:
        k = np.arange(upper + 1)
        log_p = poisson.logpmf(k, t)
        if _tail_bound(t, upper, float(log_p[-1])) <= TAIL_TOLERANCE:
            break
        upper *= 2
    terms = -np.exp(log_p) * log_p
    return math.fsum(terms[np.isfinite(terms)])


def poisson_entropy_series(t: float) -> float:
    """
    The same entropy via f(t) = t(1 - ln t) + Σ_{k>=2} p_k ln k!.

    Serves as an independent cross-check of poisson_entropy.
    """
    _check_t(t)
    if t == 0:
        return 0.0
    upper = int(t + 40 * math.sqrt(t) + 60)
    k = np.arange(2, upper + 1)
    log_factorial = gammaln(k + 1)
    weights = np.exp(-t + k * math.log(t) - log_factorial)
    return t * (1 - math.log(t)) + math.fsum(weights * log_factorial)


def poisson_entropy_reference(t: float, digits: int = 50, terms: int = 0) -> float:
    """
    High-precision entropy with mpmath, rounded to a float.

    Args:
        t: Intensity
        digits: Working precision in decimal digits
        terms: Number of series terms (0 picks a bound from t)
    """
    _check_t(t)
    if t == 0:
        return 0.0
    terms = terms or int(t + 60 * math.sqrt(t) + 120)
    with mpmath.workdps(digits):
        mt = mpmath.mpf(t)
        total = mpmath.mpf(0)
        log_t = mpmath.log(mt)
        for i in range(terms):
            log_p = -mt + i * log_t - mpmath.loggamma(i + 1)
            total -= mpmath.exp(log_p) * log_p
        return float(total)


def entropy_bound_curve(s: CFScheme) -> EntropyCurve:
    """
    f(μ([1]_n)) for n = 1..depth.

    Raises:
        CFPoissonError: nothing_to_check for a depth-0 scheme
    """
    require(s.depth >= 1, "nothing_to_check", "a depth-0 scheme has no entropy bound")
    identity = s.group.identity_element
    points = []
    for n in range(1, s.depth + 1):
        mu = measure(cylinder(s, identity, n))
        points.append(EntropyPoint(level=n, measure=mu, entropy=poisson_entropy(float(mu))))
        logger.debug("level %d: μ=%s f=%.6g", n, mu, points[-1].entropy)
    values = [p.entropy for p in points]
    decreasing = all(a > b for a, b in zip(values, values[1:]))
    return EntropyCurve(points=points, decreasing=decreasing)
