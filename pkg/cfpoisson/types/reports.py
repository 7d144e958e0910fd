"""
Report types returned by the condition checkers
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_serializer

from cfpoisson.types.group import GroupElement


class Verdict(BaseModel):
    """Outcome of one finitary check, usually at one level"""

    check: str
    """Name of the checked condition, e.g. "triple_product_proper" """

    level: Optional[int] = None
    """Level n the check refers to (None for sequence-wide checks)"""

    passed: bool
    """Whether the condition holds"""

    reason: Optional[str] = None
    """Machine-readable failure reason (if not passed)"""

    witness: List[GroupElement] = Field(default_factory=list)
    """Offending element(s) when the check fails"""

    measurements: Dict[str, str] = Field(default_factory=dict)
    """Exact quantities observed by the check, as strings"""

    @field_serializer("witness")
    def serialize_witness(self, v: List[GroupElement]) -> List[Any]:
        return [g.to_json() for g in v]


class ConditionReport(BaseModel):
    """Per-level verdicts for one condition, with the parameters used"""

    condition: str
    """Condition family, e.g. "base", "folner", "mixing", "square" """

    parameters: Dict[str, Any] = Field(default_factory=dict)
    """Bounds, tolerances and test sets the checker was run with"""

    quantifier: Literal["every", "some"] = "every"
    """Whether every level or some level must pass"""

    verdicts: List[Verdict] = Field(default_factory=list)
    """All verdicts in check order"""

    @property
    def passed(self) -> bool:
        level_verdicts = [v for v in self.verdicts if v.level is not None]
        global_verdicts = [v for v in self.verdicts if v.level is None]
        if not all(v.passed for v in global_verdicts):
            return False
        if self.quantifier == "some":
            return any(v.passed for v in level_verdicts)
        return all(v.passed for v in level_verdicts)

    def level_map(self) -> Dict[int, bool]:
        """Level -> whether every verdict at that level passed"""
        result: Dict[int, bool] = {}
        for v in self.verdicts:
            if v.level is not None:
                result[v.level] = result.get(v.level, True) and v.passed
        return dict(sorted(result.items()))

    def level_passed(self, level: int) -> Optional[bool]:
        return self.level_map().get(level)

    def failures(self) -> List[Verdict]:
        return [v for v in self.verdicts if not v.passed]

    def find(self, check: str, level: Optional[int] = None) -> Optional[Verdict]:
        for v in self.verdicts:
            if v.check == check and v.level == level:
                return v
        return None

    def summary(self) -> Dict[str, Any]:
        return {"condition": self.condition, "passed": self.passed, "levels": self.level_map()}
