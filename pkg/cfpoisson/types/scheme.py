"""
(C,F)-scheme and builder parameter definitions
"""

from fractions import Fraction
from math import prod
from typing import Any, List, Optional, Tuple

from pydantic import BaseModel, Field, field_serializer, field_validator, model_validator

from cfpoisson.groups.subsets import FiniteSubset, set_product
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupDescriptor, GroupElement


def as_fraction(value: Any) -> Fraction:
    """Parse an exact rational from a Fraction, int, "p/q" string or decimal string"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**12)
    raise ValueError(f"cannot interpret {value!r} as a rational")


class CFScheme(BaseModel):
    """
    A truncated (C,F)-scheme: shapes F_0..F_N and copy sets C_1..C_N.

    F is indexed 0..N and C is stored 0-based (C[0] holds C_1); use
    shape(n) and copies(n) for the 1-based reading.
    """

    group: GroupDescriptor
    """Ambient group"""

    F: List[FiniteSubset]
    """Shapes F_0, ..., F_N"""

    C: List[FiniteSubset]
    """Copy sets C_1, ..., C_N"""

    @model_validator(mode="after")
    def validate_structure(self) -> "CFScheme":
        if len(self.F) != len(self.C) + 1:
            raise ValueError("a scheme of depth N needs N+1 shapes and N copy sets")
        for s in list(self.F) + list(self.C):
            if s.group != self.group:
                raise ValueError("kind_mismatch: scheme subsets must live in the scheme's group")
        return self

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @property
    def depth(self) -> int:
        return len(self.C)

    def shape(self, n: int) -> FiniteSubset:
        """F_n, 0 <= n <= depth"""
        if not 0 <= n <= self.depth:
            raise CFPoissonError("depth_exceeded", f"level {n} outside 0..{self.depth}", level=n)
        return self.F[n]

    def copies(self, n: int) -> FiniteSubset:
        """C_n, 1 <= n <= depth"""
        if not 1 <= n <= self.depth:
            raise CFPoissonError("depth_exceeded", f"copy set {n} outside 1..{self.depth}", level=n)
        return self.C[n - 1]

    @property
    def copy_counts(self) -> List[int]:
        return [c.cardinality for c in self.C]

    def cylinder_denominator(self, n: int) -> int:
        """#C_1 ⋯ #C_n, the reciprocal of the measure of a level-n cylinder"""
        if not 0 <= n <= self.depth:
            raise CFPoissonError("depth_exceeded", f"level {n} outside 0..{self.depth}", level=n)
        return prod(c.cardinality for c in self.C[:n])

    def truncate(self, depth: int) -> "CFScheme":
        """The scheme restricted to levels 0..depth"""
        if not 0 <= depth <= self.depth:
            raise CFPoissonError("depth_exceeded", f"cannot truncate to depth {depth}")
        return CFScheme(group=self.group, F=self.F[: depth + 1], C=self.C[:depth])

    def invariant_violations(self) -> List[Tuple[str, int, Optional[GroupElement]]]:
        """
        Structural invariants that cfspace relies on.

        Returns:
            List of (reason, level, witness) for every violated invariant:
            F_0 = {1}, 1 ∈ F_n, #C_{n+1} >= 2 and F_n C_{n+1} ⊆ F_{n+1}
        """
        identity = self.group.identity_element
        violations: List[Tuple[str, int, Optional[GroupElement]]] = []
        if self.F[0] != FiniteSubset.singleton(identity):
            witness = (self.F[0] - FiniteSubset.singleton(identity))
            violations.append(("base_shape_not_identity", 0, witness.first() if witness else None))
        for n, F in enumerate(self.F):
            if identity not in F:
                violations.append(("identity_missing", n, identity))
        for n in range(self.depth):
            C = self.C[n]
            if C.cardinality < 2:
                violations.append(("copy_set_too_small", n, C.first() if C else None))
            spill = set_product(self.F[n], C) - self.F[n + 1]
            if spill:
                violations.append(("refinement_leaves_shape", n, spill.first()))
        return violations

    def validate_invariants(self) -> "CFScheme":
        """
        Raise unless the structural invariants hold.

        Raises:
            CFPoissonError: invalid_scheme naming the first violated invariant
        """
        violations = self.invariant_violations()
        if violations:
            reason, level, witness = violations[0]
            raise CFPoissonError(
                "invalid_scheme", f"{reason} at level {level}", level=level, witness=witness
            )
        return self


class BuildParameters(BaseModel):
    """Knobs of the scheme builder"""

    copy_counts: Optional[List[int]] = Field(None, alias="copyCounts")
    """Target #C_n per level (default n+1)"""

    folner_epsilons: Optional[List[Fraction]] = Field(None, alias="folnerEpsilons")
    """Følner tolerance for F_n, n = 1..depth (default 1/(n+2))"""

    folner_test_set: Optional[List[GroupElement]] = Field(None, alias="folnerTestSet")
    """Elements K the Følner condition is certified against (default generators, inverses, 1)"""

    l_search_bound: int = Field(1 << 20, alias="lSearchBound")
    """Largest power tried when certifying the displacement condition"""

    torsion_witnesses: List[GroupElement] = Field(default_factory=list, alias="torsionWitnesses")
    """Finite-order elements g that must satisfy gF_n = F_n"""

    triangle_witnesses: List[GroupElement] = Field(default_factory=list, alias="triangleWitnesses")
    """Infinite-order elements that must admit a displacing power at every level"""

    exhaustion_radius: int = Field(1, alias="exhaustionRadius")
    """Every F_n with n >= 1 contains the norm ball of this radius"""

    mixing: bool = True
    """Require strictly increasing #C_n"""

    @field_validator("folner_epsilons", mode="before")
    @classmethod
    def parse_epsilons(cls, v: Any) -> Any:
        if v is None:
            return v
        epsilons = [as_fraction(e) for e in v]
        if any(e <= 0 for e in epsilons):
            raise ValueError("Følner tolerances must be positive")
        return epsilons

    @field_validator("l_search_bound")
    @classmethod
    def validate_bound(cls, v: int) -> int:
        if v < 1:
            raise ValueError("l_search_bound must be at least 1")
        return v

    @field_validator("exhaustion_radius")
    @classmethod
    def validate_radius(cls, v: int) -> int:
        if v < 0:
            raise ValueError("exhaustion_radius must be non-negative")
        return v

    @field_serializer("folner_epsilons")
    def serialize_epsilons(self, v: Optional[List[Fraction]]) -> Optional[List[str]]:
        return None if v is None else [str(e) for e in v]

    @field_serializer("folner_test_set", "torsion_witnesses", "triangle_witnesses")
    def serialize_elements(self, v: Optional[List[GroupElement]]) -> Optional[List[Any]]:
        return None if v is None else [g.to_json() for g in v]

    def copy_target(self, n: int) -> int:
        if self.copy_counts is None:
            return n + 1
        if n - 1 >= len(self.copy_counts):
            raise CFPoissonError("invalid_precondition", f"no copy-count target for level {n}")
        return self.copy_counts[n - 1]

    def epsilon(self, n: int) -> Fraction:
        if self.folner_epsilons is None or n - 1 >= len(self.folner_epsilons):
            return Fraction(1, n + 2)
        return self.folner_epsilons[n - 1]

    class Config:
        populate_by_name = True
        arbitrary_types_allowed = True
