"""
Type definitions for the cfpoisson laboratory

Only the group and report records are re-exported here; the scheme, space
and suspension records live in their own modules, which depend on the
groups package.
"""

from cfpoisson.types.group import (
    ElementJson,
    GroupDescriptor,
    GroupElement,
    GroupKind,
)
from cfpoisson.types.reports import (
    ConditionReport,
    Verdict,
)

__all__ = [
    "ElementJson",
    "GroupDescriptor",
    "GroupElement",
    "GroupKind",
    "ConditionReport",
    "Verdict",
]
