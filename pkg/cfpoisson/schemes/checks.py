"""
Checkers for the finitary conditions imposed on a (C,F)-scheme

Each verify_* helper raises CFPoissonError with a condition reason when the
condition fails; the check_* drivers turn those into Verdicts, so a failing
condition never escapes as an exception.
"""

import logging
from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

from cfpoisson.groups.arithmetic import has_finite_order, inv, is_central, mul
from cfpoisson.groups.displacement import smallest_displacement
from cfpoisson.groups.folner import folner_witness
from cfpoisson.groups.norms import ball
from cfpoisson.groups.subsets import FiniteSubset, set_inverse, set_product, union_all
from cfpoisson.shared.errors import CONDITION_REASONS, CFPoissonError, require
from cfpoisson.types.group import GroupDescriptor, GroupElement
from cfpoisson.types.reports import ConditionReport, Verdict
from cfpoisson.types.scheme import CFScheme

logger = logging.getLogger(__name__)

Epsilons = Union[Fraction, Sequence[Fraction], None]


def _fail(reason: str, message: str, witness: Sequence[GroupElement] = (), **measurements: Any):
    raise CFPoissonError(
        reason,
        message,
        witness=list(witness),
        measurements={k: str(v) for k, v in measurements.items()},
    )


def _verdict(check: str, level: Optional[int], verify: Callable[..., Any], *args: Any) -> Verdict:
    """Run one verify_* helper and record its outcome"""
    try:
        measurements = verify(*args) or {}
    except CFPoissonError as e:
        if e.reason not in CONDITION_REASONS:
            raise
        return Verdict(
            check=check,
            level=level,
            passed=False,
            reason=e.reason,
            witness=e.detail.get("witness", []),
            measurements=e.detail.get("measurements", {}),
        )
    return Verdict(
        check=check,
        level=level,
        passed=True,
        measurements={k: str(v) for k, v in measurements.items()},
    )


def _same_group(s: CFScheme, g: GroupElement) -> None:
    if g.group != s.group:
        raise CFPoissonError("kind_mismatch", f"{g!r} is not an element of {s.group.label}")


def default_test_set(group: GroupDescriptor) -> FiniteSubset:
    """Generators, their inverses and the identity: the norm ball of radius 1"""
    return ball(group, 1)


def growth_sequence(s: CFScheme) -> List[Fraction]:
    """Exact ratios r_n = #F_n / (#C_1 ⋯ #C_n), n = 0..depth"""
    return [Fraction(s.F[n].cardinality, s.cylinder_denominator(n)) for n in range(s.depth + 1)]


# -- single-level conditions ---------------------------------------------------------


def verify_base_shape(F0: FiniteSubset) -> None:
    """F_0 = {1}"""
    identity = F0.group.identity_element
    if F0 != FiniteSubset.singleton(identity):
        extra = F0 - FiniteSubset.singleton(identity)
        witness = [extra.first()] if extra else [identity]
        _fail("base_shape_not_identity", "F_0 must be {1}", witness, size=F0.cardinality)


def verify_identity(F: FiniteSubset) -> None:
    identity = F.group.identity_element
    if identity not in F:
        _fail("identity_missing", "the identity is not in the shape", [identity])


def verify_copy_count(C: FiniteSubset) -> dict:
    if C.cardinality < 2:
        _fail(
            "copy_set_too_small",
            "copy sets need at least two elements",
            C.elements(),
            size=C.cardinality,
        )
    return {"size": C.cardinality}


def verify_triple_product(F: FiniteSubset, C: FiniteSubset, F_next: FiniteSubset) -> dict:
    """F^-1 F F C ⊊ F_next"""
    required = set_product(set_product(set_product(set_inverse(F), F), F), C)
    spill = required - F_next
    if spill:
        _fail(
            "triple_product_not_contained",
            "F^-1 F F C is not inside the next shape",
            [spill.first()],
            required=required.cardinality,
            missing=spill.cardinality,
        )
    if required.cardinality == F_next.cardinality:
        _fail(
            "triple_product_not_proper",
            "the next shape adds nothing to F^-1 F F C",
            [F_next.first()],
            required=required.cardinality,
            shape=F_next.cardinality,
        )
    return {"required": required.cardinality, "shape": F_next.cardinality}


def verify_disjoint_translates(F: FiniteSubset, C: FiniteSubset) -> dict:
    """F c ∩ F c' = ∅ for distinct c, c' in C"""
    copies = C.elements()
    translates = [F.translate_right(c) for c in copies]
    total = sum(t.cardinality for t in translates)
    if union_all(F.group, translates).cardinality == total:
        return {"translates": len(translates)}
    for i in range(len(translates)):
        for j in range(i):
            common = translates[i] & translates[j]
            if common:
                _fail(
                    "translates_not_disjoint",
                    f"F{copies[j]!r} meets F{copies[i]!r}",
                    [copies[j], copies[i], common.first()],
                    overlap=common.cardinality,
                )
    return {"translates": len(translates)}


def verify_growth(ratios: List[Fraction]) -> dict:
    for n in range(1, len(ratios)):
        if ratios[n] <= ratios[n - 1]:
            _fail(
                "growth_not_increasing",
                f"r_{n} = {ratios[n]} does not exceed r_{n - 1} = {ratios[n - 1]}",
                level=n,
                ratios=",".join(str(r) for r in ratios),
            )
    return {"ratios": ",".join(str(r) for r in ratios)}


def verify_folner(F: FiniteSubset, K: FiniteSubset, epsilon: Fraction) -> dict:
    defect, worst = folner_witness(F, K)
    if defect >= epsilon:
        _fail(
            "folner_defect_too_large",
            f"defect {defect} >= {epsilon}",
            [worst] if worst is not None else [],
            defect=defect,
            epsilon=epsilon,
        )
    return {"defect": defect, "epsilon": epsilon}


def verify_invariant(F: FiniteSubset, g: GroupElement) -> dict:
    """gF = F"""
    escaped = F.translate_left(g) - F
    if escaped:
        _fail(
            "shape_not_invariant",
            f"{g!r}F leaves F",
            [escaped.first()],
            escaped=escaped.cardinality,
        )
    return {"size": F.cardinality}


def verify_mixing_product(F: FiniteSubset, C: FiniteSubset, F_next: FiniteSubset) -> dict:
    """F F^-1 F C ⊆ F_next"""
    required = set_product(set_product(set_product(F, set_inverse(F)), F), C)
    spill = required - F_next
    if spill:
        _fail(
            "mixing_product_not_contained",
            "F F^-1 F C is not inside the next shape",
            [spill.first()],
            required=required.cardinality,
            missing=spill.cardinality,
        )
    return {"required": required.cardinality}


def mixing_sets(F: FiniteSubset, C: FiniteSubset) -> List[Tuple[str, FiniteSubset]]:
    """
    The sets F F^-1 and F c1 c2^-1 F^-1 (c1 ≠ c2) in check order.

    Unordered pairs are visited in order; for each pair {c_j, c_i} with j < i
    the set for (c_i, c_j) comes first. A swapped pair producing the very same
    set (c1 c2^-1 = c2 c1^-1) is listed once.
    """
    F_inv = set_inverse(F)
    core = set_product(F, F_inv)
    sets: List[Tuple[str, FiniteSubset]] = [("F F^-1", core)]

    def two_sided(d: GroupElement) -> FiniteSubset:
        if is_central(d):
            return core.translate_left(d)
        return set_product(F.translate_right(d), F_inv)

    copies = C.elements()
    for i in range(len(copies)):
        for j in range(i):
            forward = two_sided(mul(copies[i], inv(copies[j])))
            sets.append((f"F {copies[i]!r} {copies[j]!r}^-1 F^-1", forward))
            backward = two_sided(mul(copies[j], inv(copies[i])))
            if backward != forward:
                sets.append((f"F {copies[j]!r} {copies[i]!r}^-1 F^-1", backward))
    return sets


def verify_mixing_disjoint(F: FiniteSubset, C: FiniteSubset) -> dict:
    """The sets listed by mixing_sets are pairwise disjoint"""
    sets = mixing_sets(F, C)
    total = sum(s.cardinality for _, s in sets)
    if union_all(F.group, [s for _, s in sets]).cardinality != total:
        for i in range(len(sets)):
            for j in range(i):
                common = sets[i][1] & sets[j][1]
                if common:
                    _fail(
                        "mixing_sets_not_disjoint",
                        f"{sets[j][0]} meets {sets[i][0]}",
                        [common.first()],
                        first=sets[j][0],
                        second=sets[i][0],
                        overlap=common.cardinality,
                    )
    return {"sets": len(sets)}


def verify_copy_counts_increasing(counts: List[int]) -> dict:
    for n in range(1, len(counts)):
        if counts[n] <= counts[n - 1]:
            _fail(
                "copy_counts_not_increasing",
                f"#C_{n + 1} = {counts[n]} does not exceed #C_{n} = {counts[n - 1]}",
                level=n + 1,
                counts=",".join(str(c) for c in counts),
            )
    return {"counts": ",".join(str(c) for c in counts)}


# -- drivers ----------------------------------------------------------------------------


def check_base(s: CFScheme) -> ConditionReport:
    """
    Verify the base conditions level by level.

    For n = 0..depth-1: 1 ∈ F_n, #C_{n+1} >= 2, F_n^-1 F_n F_n C_{n+1} ⊊ F_{n+1}
    and pairwise disjoint translates F_n c. Also F_0 = {1}, 1 ∈ F_depth and
    strict growth of r_n = #F_n / (#C_1 ⋯ #C_n).

    Raises:
        CFPoissonError: nothing_to_check if the scheme has depth 0
    """
    require(s.depth >= 1, "nothing_to_check", "a depth-0 scheme has no conditions")
    verdicts = [_verdict("base_shape", 0, verify_base_shape, s.F[0])]
    for n in range(s.depth):
        F, C, F_next = s.F[n], s.C[n], s.F[n + 1]
        verdicts.append(_verdict("identity", n, verify_identity, F))
        verdicts.append(_verdict("copy_count", n, verify_copy_count, C))
        verdicts.append(_verdict("triple_product", n, verify_triple_product, F, C, F_next))
        verdicts.append(_verdict("disjoint_translates", n, verify_disjoint_translates, F, C))
    verdicts.append(_verdict("identity", s.depth, verify_identity, s.F[s.depth]))
    ratios = growth_sequence(s)
    verdicts.append(_verdict("growth", None, verify_growth, ratios))
    logger.info("base conditions checked on %s up to depth %d", s.group.label, s.depth)
    return ConditionReport(
        condition="base",
        parameters={"depth": s.depth, "growth": [str(r) for r in ratios]},
        verdicts=verdicts,
    )


def _epsilon_at(epsilon: Epsilons, n: int) -> Fraction:
    if epsilon is None:
        return Fraction(1, n + 2)
    if isinstance(epsilon, (Fraction, int)):
        return Fraction(epsilon)
    if n - 1 >= len(epsilon):
        raise CFPoissonError("invalid_precondition", f"no Følner tolerance for level {n}")
    return Fraction(epsilon[n - 1])


def check_folner(
    s: CFScheme,
    K: Optional[FiniteSubset] = None,
    epsilon: Epsilons = None,
    start_level: int = 1,
) -> ConditionReport:
    """
    Certify (K, ε)-invariance of F_n for n = start_level..depth.

    F_0 = {1} is excluded by default since it is never invariant.

    Args:
        s: Scheme to check
        K: Test set (default: generators, inverses and identity)
        epsilon: One tolerance, per-level tolerances indexed by n-1, or None
            for the certification schedule 1/(n+2)
        start_level: First level checked

    Raises:
        CFPoissonError: domain_error if a tolerance is not positive
    """
    K = default_test_set(s.group) if K is None else K
    verdicts = []
    tolerances = []
    for n in range(start_level, s.depth + 1):
        eps = _epsilon_at(epsilon, n)
        require(eps > 0, "domain_error", f"Følner tolerance must be positive, got {eps}")
        tolerances.append(str(eps))
        verdicts.append(_verdict("folner", n, verify_folner, s.F[n], K, eps))
    return ConditionReport(
        condition="folner",
        parameters={
            "test_set": [g.to_json() for g in K.elements()],
            "epsilons": tolerances,
            "start_level": start_level,
        },
        verdicts=verdicts,
    )


def check_triangle(s: CFScheme, g: GroupElement, n: int, l_max: int) -> Optional[int]:
    """
    Smallest l in [1, l_max] with g^l F_nC_{n+1} ⊆ F_{n+1} ∖ F_nC_{n+1}.

    Args:
        s: Scheme
        g: Infinite-order element
        n: Level, 0 <= n < depth
        l_max: Largest exponent tried

    Returns:
        The exponent, or None when no l <= l_max works

    Raises:
        CFPoissonError: wrong_dichotomy for finite-order g, depth_exceeded for
            n outside 0..depth-1, domain_error for l_max < 1
    """
    _same_group(s, g)
    if has_finite_order(g):
        raise CFPoissonError("wrong_dichotomy", f"{g!r} has finite order; use check_square")
    if not 0 <= n < s.depth:
        raise CFPoissonError("depth_exceeded", f"level {n} outside 0..{s.depth - 1}", level=n)
    block = set_product(s.F[n], s.C[n])
    return smallest_displacement(g, block, l_max, within=s.F[n + 1], avoid=block)


def triangle_report(
    s: CFScheme, g: GroupElement, l_max: int, levels: Optional[Sequence[int]] = None
) -> ConditionReport:
    """check_triangle at several levels, collected into a report that passes at some level"""
    levels = range(s.depth) if levels is None else levels
    verdicts = []
    for n in levels:
        l = check_triangle(s, g, n, l_max)
        if l is None:
            verdicts.append(
                Verdict(
                    check="triangle",
                    level=n,
                    passed=False,
                    reason="displacement_not_found",
                    witness=[g],
                    measurements={"l_max": str(l_max)},
                )
            )
        else:
            verdicts.append(
                Verdict(check="triangle", level=n, passed=True, measurements={"l": str(l)})
            )
    return ConditionReport(
        condition="triangle",
        parameters={"element": g.to_json(), "l_max": l_max},
        quantifier="some",
        verdicts=verdicts,
    )


def check_square(s: CFScheme, g: GroupElement, start_level: int = 1) -> ConditionReport:
    """
    Levels n with gF_n = F_n; passes if there is at least one.

    Raises:
        CFPoissonError: wrong_dichotomy for infinite-order g
    """
    _same_group(s, g)
    if not has_finite_order(g):
        raise CFPoissonError("wrong_dichotomy", f"{g!r} has infinite order; use check_triangle")
    verdicts = [
        _verdict("square", n, verify_invariant, s.F[n], g) for n in range(start_level, s.depth + 1)
    ]
    return ConditionReport(
        condition="square",
        parameters={"element": g.to_json(), "start_level": start_level},
        quantifier="some",
        verdicts=verdicts,
    )


def check_mixing(s: CFScheme) -> ConditionReport:
    """
    Verify the mixing conditions.

    Per level: (i) F_n F_n^-1 F_n C_{n+1} ⊆ F_{n+1} and (ii) pairwise
    disjointness of F_n c1 c2^-1 F_n^-1 (c1 ≠ c2) and F_n F_n^-1; globally
    (iii) strictly increasing #C_n.

    Raises:
        CFPoissonError: nothing_to_check if the scheme has depth 0
    """
    require(s.depth >= 1, "nothing_to_check", "a depth-0 scheme has no conditions")
    verdicts = []
    for n in range(s.depth):
        F, C, F_next = s.F[n], s.C[n], s.F[n + 1]
        verdicts.append(_verdict("mixing_product", n, verify_mixing_product, F, C, F_next))
        verdicts.append(_verdict("mixing_disjoint", n, verify_mixing_disjoint, F, C))
    verdicts.append(
        _verdict("copy_counts_increasing", None, verify_copy_counts_increasing, s.copy_counts)
    )
    logger.info("mixing conditions checked on %s up to depth %d", s.group.label, s.depth)
    return ConditionReport(
        condition="mixing",
        parameters={"depth": s.depth, "copy_counts": s.copy_counts},
        verdicts=verdicts,
    )


def check_exhaustion(s: CFScheme, radius: int) -> ConditionReport:
    """Whether the union of the shapes covers the norm ball of the given radius"""
    covered = union_all(s.group, s.F)
    missing = ball(s.group, radius) - covered
    if missing:
        verdict = Verdict(
            check="exhaustion",
            passed=False,
            reason="exhaustion_incomplete",
            witness=[missing.first()],
            measurements={"missing": str(missing.cardinality)},
        )
    else:
        verdict = Verdict(check="exhaustion", passed=True)
    return ConditionReport(
        condition="exhaustion", parameters={"radius": radius}, verdicts=[verdict]
    )
