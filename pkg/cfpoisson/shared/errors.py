"""
Error reasons and the package exception
"""

from typing import Any, Dict, Optional


# Machine-readable reasons carried by CFPoissonError
ERROR_REASONS = [
    "kind_mismatch",
    "invalid_element",
    "invalid_group",
    "domain_error",
    "empty_subset",
    "nothing_to_check",
    "wrong_dichotomy",
    "depth_exceeded",
    "undefined_at_budget",
    "not_in_scheme",
    "coverage_error",
    "partition_error",
    "search_exhausted",
    "witness_not_found",
    "invalid_precondition",
    "invalid_scheme",
    "scheme_parse_error",
    "invalid_config",
    "norm_out_of_range",
    "size_limit_exceeded",
    # condition failures reported inside ConditionReport verdicts
    "base_shape_not_identity",
    "identity_missing",
    "copy_set_too_small",
    "refinement_leaves_shape",
    "triple_product_not_contained",
    "triple_product_not_proper",
    "translates_not_disjoint",
    "growth_not_increasing",
    "folner_defect_too_large",
    "shape_not_invariant",
    "mixing_product_not_contained",
    "mixing_sets_not_disjoint",
    "copy_counts_not_increasing",
    "exhaustion_incomplete",
    "displacement_not_found",
]

# Reasons that mean "the checked condition is false" rather than "the check could not run"
CONDITION_REASONS = ERROR_REASONS[ERROR_REASONS.index("base_shape_not_identity") :]


class CFPoissonError(ValueError):
    """
    Error raised by the laboratory.

    The message starts with the reason code so callers can match on it; the
    optional detail dict carries the level, condition or offending element.
    """

    def __init__(self, reason: str, message: str = "", **detail: Any):
        if reason not in ERROR_REASONS:
            raise ValueError(f"unknown error reason: {reason}")
        self.reason = reason
        self.detail: Dict[str, Any] = detail
        text = reason if not message else f"{reason}: {message}"
        super().__init__(text)


def require(condition: bool, reason: str, message: str = "", **detail: Any) -> None:
    """
    Raise CFPoissonError(reason) unless condition holds.

    Args:
        condition: Condition that must hold
        reason: Reason code from ERROR_REASONS
        message: Human-readable explanation
        **detail: Extra context stored on the error

    Raises:
        CFPoissonError: If condition is false
    """
    if not condition:
        raise CFPoissonError(reason, message, **detail)


def reason_of(error: BaseException) -> Optional[str]:
    """Return the reason code of a laboratory error, or None for foreign errors"""
    if isinstance(error, CFPoissonError):
        return error.reason
    return None
