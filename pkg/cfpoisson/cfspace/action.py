"""
The partial action of G on cfspace and the correlations it induces

T_g maps [f]_n to [gf]_n whenever gf ∈ F_n. When gf falls outside F_n the
cylinder is refined with C_{n+1} and the children are tried at level n+1,
up to a level budget.
"""

import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from cfpoisson.cfspace.cylinders import boolean, compact_open, empty, measure, refine
from cfpoisson.groups.arithmetic import inv, mul_points, to_points
from cfpoisson.groups.norms import norm_points, shell
from cfpoisson.groups.subsets import (
    FiniteSubset,
    join_points,
    set_inverse,
    set_product,
    union_all,
)
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupElement
from cfpoisson.types.reports import ConditionReport, Verdict
from cfpoisson.types.scheme import CFScheme
from cfpoisson.types.space import ActionResult, CompactOpen, DecayCurve, DecayPoint

logger = logging.getLogger(__name__)

# Moved points evaluated per vectorized block of the decay scan
DECAY_BLOCK = 1 << 21

# Largest difference set whose norms are expanded to bound the support radius
SUPPORT_EXPAND_LIMIT = 1_000_000


def _check_budget(s: CFScheme, budget: int) -> None:
    if budget > s.depth:
        raise CFPoissonError(
            "depth_exceeded", f"budget {budget} exceeds depth {s.depth}", level=budget
        )
    if budget < 0:
        raise CFPoissonError("domain_error", f"budget must be >= 0, got {budget}")


def act(g: GroupElement, A: CompactOpen, budget: int) -> ActionResult:
    """
    Apply T_g to A, promoting unresolved cylinders level by level.

    Args:
        g: Group element
        A: Compact open set
        budget: Deepest level cylinders may be refined to

    Returns:
        ActionResult whose image is normalized to the highest level at which
        something was resolved, and whose residual holds the cylinders still
        undefined at the budget level

    Raises:
        CFPoissonError: depth_exceeded if the budget exceeds the scheme depth
    """
    s = A.scheme
    _check_budget(s, budget)
    if g.group != s.group:
        raise CFPoissonError("kind_mismatch", f"{g!r} is not an element of {s.group.label}")
    g_inv = inv(g)
    level = A.level
    pending = A.names
    pieces: List[Tuple[int, FiniteSubset]] = []
    while True:
        resolved = pending.translate_left(g) & s.F[level]
        if resolved:
            pieces.append((level, resolved))
            pending = pending - resolved.translate_left(g_inv)
        if not pending or level >= budget:
            break
        level += 1
        pending = set_product(pending, s.copies(level))

    levels_used = [lvl for lvl, _ in pieces]
    top = max(levels_used, default=A.level)
    image = union_all(
        s.group,
        [refine(CompactOpen.trusted(s, lvl, names), top).names for lvl, names in pieces],
    )
    result = ActionResult(
        image=CompactOpen.trusted(s, top, image),
        residual=CompactOpen.trusted(s, level, pending),
        levels_used=levels_used,
    )
    if pending:
        logger.debug("T_%r leaves %d cylinders unresolved at level %d", g, len(pending), level)
    return result


def correlation(g: GroupElement, A: CompactOpen, B: CompactOpen, budget: int) -> Fraction:
    """
    μ(T_g A ∩ B), exactly.

    Raises:
        CFPoissonError: undefined_at_budget if part of A is still unresolved
            at the budget level
    """
    result = act(g, A, budget)
    if not result.residual.is_empty:
        raise CFPoissonError(
            "undefined_at_budget",
            f"T_{g!r} is not defined on all of A within level {budget}",
            element=g,
            level=budget,
        )
    return measure(boolean("intersect", result.image, B))


def partial_domain(s: CFScheme, g: GroupElement, n: int) -> CompactOpen:
    """Names f ∈ F_n with gf ∈ F_n: where T_g is defined at level n"""
    names = s.shape(n) & s.shape(n).translate_left(inv(g))
    return compact_open(s, n, names)


def partial_range(s: CFScheme, g: GroupElement, n: int) -> CompactOpen:
    """F_n ∩ gF_n: the image of partial_domain under T_g"""
    names = s.shape(n) & s.shape(n).translate_left(g)
    return compact_open(s, n, names)


def check_generating_translates(s: CFScheme, n: int, limit: int = 64) -> ConditionReport:
    """
    Every level-n cylinder is a translate of [1]_n: T_f[1]_n = [f]_n.

    The action is evaluated on up to `limit` names spread evenly over F_n.
    """
    identity = s.group.identity_element
    if identity not in s.shape(n):
        verdicts = [
            Verdict(
                check="generating_translates",
                level=n,
                passed=False,
                reason="identity_missing",
                witness=[identity],
            )
        ]
        return ConditionReport(
            condition="generating_translates", parameters={"level": n}, verdicts=verdicts
        )
    base = compact_open(s, n, FiniteSubset.singleton(identity))
    F = s.shape(n)
    count = min(F.cardinality, limit)
    picks = np.unique(np.linspace(0, F.cardinality - 1, count).astype(np.int64))
    names = _nth_elements(F, picks)
    verdicts = []
    for f in names:
        result = act(f, base, n)
        ok = result.residual.is_empty and result.image.names == FiniteSubset.singleton(f)
        verdicts.append(
            Verdict(
                check="generating_translates",
                level=n,
                passed=ok,
                reason=None if ok else "not_in_scheme",
                witness=[] if ok else [f],
            )
        )
    return ConditionReport(
        condition="generating_translates",
        parameters={"level": n, "sampled": len(names)},
        verdicts=verdicts,
    )


def _nth_elements(subset: FiniteSubset, ranks: np.ndarray) -> List[GroupElement]:
    """Elements at the given ranks of the canonical run order, without expanding"""
    lengths = subset.hi - subset.lo + 1
    starts = np.cumsum(lengths) - lengths
    runs = np.searchsorted(starts, ranks, side="right") - 1
    fiber = subset.lo[runs] + (ranks - starts[runs])
    points = join_points(subset.group, subset.prefix[runs], fiber)
    return [subset.group.element(tuple(int(v) for v in row)) for row in points]


# -- decay of correlations --------------------------------------------------------


def _shell_correlations(
    shell_points: np.ndarray,
    A_points: np.ndarray,
    F_top: FiniteSubset,
    B_top: FiniteSubset,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per shell element: whether T_g is defined on all of A at the top level,
    and #{a : ga ∈ B}.
    """
    group = F_top.group
    n_a = A_points.shape[0]
    resolvable = np.ones(shell_points.shape[0], dtype=bool)
    hits = np.zeros(shell_points.shape[0], dtype=np.int64)
    if n_a == 0:
        return resolvable, hits
    per_block = max(1, DECAY_BLOCK // n_a)
    for start in range(0, shell_points.shape[0], per_block):
        block = shell_points[start : start + per_block]
        moved = mul_points(
            group, np.repeat(block, n_a, axis=0), np.tile(A_points, (block.shape[0], 1))
        )
        inside = F_top.contains_points(moved).reshape(block.shape[0], n_a)
        in_b = B_top.contains_points(moved).reshape(block.shape[0], n_a)
        resolvable[start : start + block.shape[0]] = inside.all(axis=1)
        hits[start : start + block.shape[0]] = in_b.sum(axis=1)
    return resolvable, hits


def support_radius(A: CompactOpen, B: CompactOpen) -> Optional[int]:
    """
    r0 with μ(T_gA ∩ B) = 0 for every g of norm >= r0 on which T_g is defined
    at the common level.

    Returns:
        1 + the largest norm in B·A^-1 at the common level, or None when the
        norms cannot be computed
    """
    A_top, B_top = (refine(X, max(A.level, B.level)) for X in (A, B))
    if A_top.is_empty or B_top.is_empty:
        return 0
    diff = set_product(B_top.names, set_inverse(A_top.names))
    group = diff.group
    if group.kind == "integer-lattice":
        extent = np.abs(diff.prefix).sum(axis=1) + np.maximum(np.abs(diff.lo), np.abs(diff.hi))
        return int(extent.max()) + 1
    if diff.cardinality > SUPPORT_EXPAND_LIMIT:
        return None
    try:
        return int(norm_points(group, diff.points()).max()) + 1
    except CFPoissonError as e:
        if e.reason != "norm_out_of_range":
            raise
        return None


def resolvable_radius(A: CompactOpen, budget: int, limit: int = 1 << 16) -> int:
    """
    Largest R <= limit such that T_g is defined on all of A within the
    budget for every g of norm at most R; -1 if not even the identity is.
    """
    s = A.scheme
    _check_budget(s, budget)
    A_top = refine(A, max(A.level, budget))
    A_points = A_top.names.points()
    F_top = s.shape(A_top.level)
    for r in range(limit + 1):
        try:
            sphere = shell(s.group, r)
        except CFPoissonError as e:
            if e.reason != "norm_out_of_range":
                raise
            return r - 1
        ok, _ = _shell_correlations(sphere.points(), A_points, F_top, F_top)
        if not ok.all():
            return r - 1
    return limit


def decay_curve(
    A: CompactOpen, B: CompactOpen, radii: Sequence[int], budget: int
) -> DecayCurve:
    """
    Worst correlation max_{|g| = r} μ(T_gA ∩ B) for each radius.

    All correlations are computed at the budget level, where T_g is
    evaluated on the refined names of A in one vectorized pass per shell.

    Raises:
        CFPoissonError: undefined_at_budget naming the first shell element on
            which T_g is not defined within the budget
    """
    s = A.scheme
    _check_budget(s, budget)
    top = max(A.level, B.level, budget)
    A_top, B_top = refine(A, top), refine(B, top)
    A_points = A_top.names.points()
    F_top = s.shape(top)
    denominator = s.cylinder_denominator(top)

    points: List[DecayPoint] = []
    for r in radii:
        sphere = shell(s.group, r).points()
        resolvable, hits = _shell_correlations(sphere, A_points, F_top, B_top.names)
        if not resolvable.all():
            bad = s.group.element(tuple(int(v) for v in sphere[np.argmin(resolvable)]))
            raise CFPoissonError(
                "undefined_at_budget",
                f"T_{bad!r} is not defined on A within level {budget}",
                element=bad,
                level=budget,
                radius=r,
            )
        if sphere.shape[0] == 0:
            points.append(DecayPoint(radius=r, value=Fraction(0)))
            continue
        worst = int(np.argmax(hits))
        points.append(
            DecayPoint(
                radius=r,
                value=Fraction(int(hits[worst]), denominator),
                worst=s.group.element(tuple(int(v) for v in sphere[worst])),
            )
        )
        logger.debug("radius %d: max correlation %s", r, points[-1].value)

    r0 = support_radius(A_top, B_top)
    return _summarize(points, r0)


def _summarize(points: List[DecayPoint], r0: Optional[int]) -> DecayCurve:
    ordered = sorted(points, key=lambda p: p.radius)
    envelope_by_radius = {}
    running = Fraction(0)
    for p in reversed(ordered):
        running = max(running, p.value)
        envelope_by_radius[p.radius] = running

    vanishing_from: Optional[int] = None
    for p in reversed(ordered):
        if p.value != 0:
            break
        vanishing_from = p.radius

    threshold = r0 if r0 is not None else vanishing_from
    tail = [p.value for p in ordered if threshold is not None and 2 * p.radius >= threshold]
    nonincreasing = all(a >= b for a, b in zip(tail, tail[1:]))
    return DecayCurve(
        points=points,
        support_radius=r0,
        vanishing_from=vanishing_from,
        envelope=[envelope_by_radius[p.radius] for p in points],
        nonincreasing_from_half=nonincreasing,
    )


def to_compact_open(s: CFScheme, level: int, elements: Sequence[GroupElement]) -> CompactOpen:
    """Compact open set from a list of level-`level` names"""
    if not elements:
        return empty(s, level)
    return compact_open(s, level, FiniteSubset.from_points(s.group, to_points(s.group, elements)))
