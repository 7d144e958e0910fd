"""
Constructive builder for (C,F)-schemes

Level by level: copy sets C_{n+1} are chosen greedily from candidates in
norm-then-lexicographic order, subject to the disjointness constraints of
the mixing conditions; then F_{n+1} is the smallest member of the group's
shape family satisfying every remaining requirement.
"""

import logging
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import numpy as np

from cfpoisson.groups.arithmetic import has_finite_order, inv, mul, mul_points, power
from cfpoisson.groups.displacement import smallest_displacement
from cfpoisson.groups.folner import folner_defect
from cfpoisson.groups.norms import ball, min_norm_element, shell
from cfpoisson.groups.shapes import heisenberg_box, lattice_box, subgroup_span
from cfpoisson.groups.subsets import (
    FiniteSubset,
    halve,
    product_fiber,
    set_inverse,
    set_product,
    union_all,
)
from cfpoisson.schemes.checks import default_test_set
from cfpoisson.shared.errors import CFPoissonError, require
from cfpoisson.types.group import GroupDescriptor, GroupElement
from cfpoisson.types.scheme import BuildParameters, CFScheme

logger = logging.getLogger(__name__)

# Largest weighted norm searched for direct-sum copy candidates
DIRECT_SUM_CANDIDATE_RADIUS = 64

# Largest shape-family step tried before giving up
SHAPE_STEP_LIMIT = 1 << 24

Shape = Callable[[int], FiniteSubset]


class _CopySearch:
    """
    Greedy choice of C_{n+1} against the mixing disjointness constraints.

    Copy elements are central (every element of an abelian group, and the
    center z^k of the Heisenberg group), so with E2 = F^-1 F F^-1 F the
    constraints on a new candidate c against accepted A with quotients Q are

        c ∉ (Q ∪ {1}) A E2,
        c² ∉ a b E2            (a ≠ b in A),
        c² ∉ a² (E2 ∖ {1})     (a in A; c a^-1 = a c^-1 gives the same set).
    """

    def __init__(self, group: GroupDescriptor, F: FiniteSubset):
        self.group = group
        identity = group.identity_element
        E = set_product(set_inverse(F), F)
        if group.kind == "discrete-heisenberg":
            self.E2 = product_fiber(E, E, (0, 0))
        else:
            self.E2 = set_product(E, E)
        self.E2_punctured = self.E2 - FiniteSubset.singleton(identity)
        self.accepted: List[GroupElement] = []
        self.quotients: List[GroupElement] = []

    def _subset(self, elements: List[GroupElement]) -> FiniteSubset:
        return FiniteSubset.from_elements(self.group, elements)

    def forbidden(self) -> Tuple[FiniteSubset, FiniteSubset]:
        """(candidates ruled out directly, set their squares must avoid)"""
        identity = self.group.identity_element
        shifts = [mul(q, a) for q in self.quotients + [identity] for a in self.accepted]
        direct = set_product(self.E2, self._subset(shifts))
        pairs = [
            mul(a, b)
            for i, a in enumerate(self.accepted)
            for b in self.accepted[:i]
        ]
        squares = [mul(a, a) for a in self.accepted]
        squared = set_product(self.E2, self._subset(pairs)) | set_product(
            self.E2_punctured, self._subset(squares)
        )
        return direct, squared

    def accept(self, c: GroupElement) -> None:
        for a in self.accepted:
            self.quotients.append(mul(c, inv(a)))
            self.quotients.append(mul(a, inv(c)))
        self.accepted.append(c)

    def next_candidate(self, level: int) -> GroupElement:
        direct, squared = self.forbidden()
        if self.group.kind == "direct-sum-finite-cyclic":
            return self._next_direct_sum(direct, squared, level)
        blocked = direct | halve(squared)
        if self.group.kind == "integer-lattice":
            window = ball(self.group, _lattice_extent(blocked) + 1)
            return min_norm_element(window - blocked)
        return _closest_central(self.group, blocked)

    def _next_direct_sum(
        self, direct: FiniteSubset, squared: FiniteSubset, level: int
    ) -> GroupElement:
        for r in range(DIRECT_SUM_CANDIDATE_RADIUS + 1):
            points = shell(self.group, r).points()
            if points.shape[0] == 0:
                continue
            keys = tuple(points[:, j] for j in reversed(range(points.shape[1])))
            points = points[np.lexsort(keys)] if keys else points
            ok = ~direct.contains_points(points)
            ok &= ~squared.contains_points(mul_points(self.group, points, points))
            if ok.any():
                row = points[int(np.flatnonzero(ok)[0])]
                return self.group.element(tuple(int(v) for v in row))
        raise CFPoissonError(
            "search_exhausted",
            f"no copy candidate of norm <= {DIRECT_SUM_CANDIDATE_RADIUS}",
            level=level,
            condition="copies",
        )


def _lattice_extent(subset: FiniteSubset) -> int:
    """Largest l1 norm over a lattice subset (0 when empty)"""
    if not subset:
        return 0
    prefix_norm = np.abs(subset.prefix).sum(axis=1) if subset.width else 0
    fiber = np.maximum(np.abs(subset.lo), np.abs(subset.hi))
    return int(np.max(prefix_norm + fiber))


def _max_abs(values: np.ndarray) -> int:
    return int(np.abs(values).max()) if values.size else 0


def _closest_central(group: GroupDescriptor, blocked: FiniteSubset) -> GroupElement:
    """The central element z^k outside blocked with least |k|, negative k first"""
    lo, hi = blocked.restrict_prefix((0, 0))
    extent = max(_max_abs(lo), _max_abs(hi)) + 1
    window = FiniteSubset.from_runs(group, [[0, 0]], [-extent], [extent])
    free = window - blocked
    fiber = np.clip(0, free.lo, free.hi)
    best = np.abs(fiber).min()
    k = int(fiber[np.abs(fiber) == best].min())
    return group.central(k)


def _shape_family(
    group: GroupDescriptor, required: FiniteSubset, torsion: List[GroupElement]
) -> Shape:
    """Monotone family t -> shape, whose first member already contains the required set"""
    if group.kind == "integer-lattice":
        radius = max(_max_abs(required.prefix), _max_abs(required.lo), _max_abs(required.hi))
        return lambda t: lattice_box(group, radius + t)
    if group.kind == "direct-sum-finite-cyclic":
        span = max([required.width + 1] + [len(w.coords) for w in torsion])
        return lambda t: subgroup_span(group, span + t)
    radius = _max_abs(required.prefix)
    height = max(_max_abs(required.lo), _max_abs(required.hi))

    def box(t: int) -> FiniteSubset:
        r = radius + t
        return heisenberg_box(group, r, max(height + t * r, r * r))

    return box


class _ShapeRequirements:
    """Everything F_{n+1} must satisfy, as a predicate over candidate shapes"""

    def __init__(
        self,
        required: FiniteSubset,
        step_product: FiniteSubset,
        test_set: FiniteSubset,
        epsilon: Fraction,
        torsion: List[GroupElement],
    ):
        self.required = required
        self.step_product = step_product
        self.test_set = test_set
        self.epsilon = epsilon
        self.torsion = torsion

    def failure(self, shape: FiniteSubset) -> Optional[str]:
        """Name of the first unmet requirement, or None"""
        if not self.required.is_subset(shape):
            return "containment"
        if shape.cardinality <= self.step_product.cardinality:
            return "proper_inclusion"
        if folner_defect(shape, self.test_set) >= self.epsilon:
            return "folner"
        for w in self.torsion:
            if shape.translate_left(w) != shape:
                return "torsion_invariance"
        return None


def _smallest_shape(family: Shape, requirements: _ShapeRequirements, level: int) -> FiniteSubset:
    """Gallop then bisect over the family for the first shape meeting the requirements"""

    def attempt(t: int) -> Tuple[Optional[str], Optional[FiniteSubset]]:
        try:
            shape = family(t)
        except CFPoissonError as e:
            if e.reason != "size_limit_exceeded":
                raise
            return "size_limit", None
        return requirements.failure(shape), shape

    failure, shape = attempt(0)
    if failure is None:
        assert shape is not None
        return shape
    lo, hi = 0, 1
    while True:
        failure_hi, shape_hi = attempt(hi)
        logger.debug("level %d shape step %d: %s", level, hi, failure_hi or "ok")
        if failure_hi is None:
            break
        if failure_hi == "size_limit" or hi >= SHAPE_STEP_LIMIT:
            raise CFPoissonError(
                "search_exhausted",
                f"no shape for level {level} (last unmet: {failure})",
                level=level,
                condition=failure,
            )
        failure = failure_hi
        lo, hi = hi, hi * 2
    best = shape_hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        failure_mid, shape_mid = attempt(mid)
        if failure_mid is None:
            hi, best = mid, shape_mid
        else:
            lo = mid
    assert best is not None
    return best


def _validate(group: GroupDescriptor, depth: int, params: BuildParameters) -> List[int]:
    require(depth >= 1, "invalid_precondition", f"depth must be >= 1, got {depth}")
    targets = [params.copy_target(n) for n in range(1, depth + 1)]
    for n, k in enumerate(targets, start=1):
        require(k >= 2, "invalid_precondition", f"#C_{n} = {k} must be at least 2", level=n)
    if params.mixing:
        for n in range(1, depth):
            require(
                targets[n] > targets[n - 1],
                "invalid_precondition",
                f"mixing needs increasing copy counts, got {targets}",
                level=n + 1,
            )
    for w in params.torsion_witnesses + params.triangle_witnesses + (params.folner_test_set or []):
        require(w.group == group, "invalid_precondition", f"{w!r} is not in {group.label}")
    for w in params.torsion_witnesses:
        require(has_finite_order(w), "invalid_precondition", f"{w!r} has infinite order")
    for w in params.triangle_witnesses:
        require(not has_finite_order(w), "invalid_precondition", f"{w!r} has finite order")
    return targets


def build_scheme(
    group: GroupDescriptor, depth: int, params: Optional[BuildParameters] = None
) -> CFScheme:
    """
    Build a scheme of the given depth satisfying the base, Følner and mixing conditions.

    Args:
        group: Ambient group
        depth: Number of levels N >= 1
        params: Builder knobs (defaults: #C_n = n+1, ε_n = 1/(n+2))

    Returns:
        A scheme whose shapes also contain the exhaustion ball, are invariant
        under the torsion witnesses and admit a displacing power of each
        triangle witness at every level

    Raises:
        CFPoissonError: invalid_precondition for unusable parameters,
            search_exhausted naming the level and condition that failed
    """
    params = params or BuildParameters()
    targets = _validate(group, depth, params)
    test_set = (
        FiniteSubset.from_elements(group, params.folner_test_set)
        if params.folner_test_set
        else default_test_set(group)
    )
    exhaustion = ball(group, params.exhaustion_radius)
    torsion = list(params.torsion_witnesses)

    shapes = [FiniteSubset.singleton(group.identity_element)]
    copies: List[FiniteSubset] = []
    for n in range(depth):
        F = shapes[n]
        search = _CopySearch(group, F)
        while len(search.accepted) < targets[n]:
            c = search.next_candidate(n + 1)
            logger.debug("level %d accepts copy %r", n + 1, c)
            search.accept(c)
        C = FiniteSubset.from_elements(group, search.accepted)

        F_inv = set_inverse(F)
        step_product = set_product(set_product(set_product(F_inv, F), F), C)
        mixing_product = set_product(set_product(set_product(F, F_inv), F), C)
        block = set_product(F, C)
        pieces = [step_product, mixing_product, exhaustion]
        for g in params.triangle_witnesses:
            l = smallest_displacement(g, block, params.l_search_bound, avoid=block)
            if l is None:
                raise CFPoissonError(
                    "search_exhausted",
                    f"no power of {g!r} up to {params.l_search_bound} displaces F_{n}C_{n + 1}",
                    level=n + 1,
                    condition="triangle",
                )
            pieces.append(block.translate_left(power(g, l)))
        required = union_all(group, pieces)

        requirements = _ShapeRequirements(
            required, step_product, test_set, params.epsilon(n + 1), torsion
        )
        F_next = _smallest_shape(_shape_family(group, required, torsion), requirements, n + 1)
        copies.append(C)
        shapes.append(F_next)
        logger.info(
            "%s level %d: #C=%d #F=%d (%d runs)",
            group.label,
            n + 1,
            C.cardinality,
            F_next.cardinality,
            F_next.run_count,
        )
    return CFScheme(group=group, F=shapes, C=copies)
