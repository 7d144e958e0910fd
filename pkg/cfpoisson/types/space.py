"""
Cylinders, compact open sets and records produced by the cfspace module
"""

from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, field_serializer, model_serializer, model_validator

from cfpoisson.groups.subsets import FiniteSubset
from cfpoisson.types.group import GroupElement
from cfpoisson.types.scheme import CFScheme

# Exact measures are plain fractions.Fraction values
MeasureValue = Fraction


class Cylinder(BaseModel):
    """The cylinder [f]_n: points whose level-n coordinate is f"""

    level: int
    """Level n"""

    name: GroupElement
    """Name f ∈ F_n"""

    class Config:
        frozen = True


class CompactOpen(BaseModel):
    """
    A finite union of level-m cylinders, given by its set of names.

    Cylinders at one level are pairwise disjoint, so (level, names) is a
    canonical description once the level is fixed.
    """

    scheme: CFScheme
    """Ambient scheme (not serialized)"""

    level: int
    """Common level m of the cylinders"""

    names: FiniteSubset
    """Names f ∈ F_m of the cylinders [f]_m"""

    @model_validator(mode="after")
    def validate_names(self) -> "CompactOpen":
        if not 0 <= self.level <= self.scheme.depth:
            raise ValueError(f"depth_exceeded: level {self.level} outside 0..{self.scheme.depth}")
        if not self.names.is_subset(self.scheme.F[self.level]):
            stray = (self.names - self.scheme.F[self.level]).first()
            raise ValueError(f"not_in_scheme: {stray!r} is not in F_{self.level}")
        return self

    @model_serializer
    def serialize(self) -> Dict[str, Any]:
        return {"level": self.level, "names": [g.to_json() for g in self.names.elements()]}

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @classmethod
    def trusted(cls, scheme: CFScheme, level: int, names: FiniteSubset) -> "CompactOpen":
        """Build without re-validating names already known to lie in F_level"""
        return cls.model_construct(scheme=scheme, level=level, names=names)

    @property
    def is_empty(self) -> bool:
        return not self.names

    def __repr__(self) -> str:
        return f"CompactOpen(level={self.level}, names={self.names!r})"


class ActionResult(BaseModel):
    """Image and unresolved remainder of T_g applied to a compact open set"""

    image: CompactOpen
    """Mapped cylinders, normalized to the highest level used"""

    residual: CompactOpen
    """Cylinders still undefined at the budget level"""

    levels_used: List[int] = Field(default_factory=list)
    """Levels at which some cylinder was resolved"""

    class Config:
        arbitrary_types_allowed = True


class DecayPoint(BaseModel):
    """Worst-case correlation over one norm shell"""

    radius: int
    value: Fraction
    worst: Optional[GroupElement] = None
    """An element of the shell attaining the maximum"""

    @field_serializer("value")
    def serialize_value(self, v: Fraction) -> str:
        return str(v)

    @field_serializer("worst")
    def serialize_worst(self, v: Optional[GroupElement]) -> Any:
        return None if v is None else v.to_json()

    class Config:
        arbitrary_types_allowed = True


class DecayCurve(BaseModel):
    """Per-radius maximal correlations μ(T_gA ∩ B) over shells"""

    points: List[DecayPoint]
    """One point per requested radius, in the given order"""

    support_radius: Optional[int] = None
    """r0: every resolvable g with norm >= r0 has zero correlation (None if not computable)"""

    vanishing_from: Optional[int] = None
    """Smallest sampled radius after which every sampled value is 0"""

    envelope: List[Fraction] = Field(default_factory=list)
    """Tail envelope: max of the values at radii >= r, nonincreasing by construction"""

    nonincreasing_from_half: bool = False
    """Whether the raw maxima are nonincreasing on sampled radii >= r0/2"""

    @field_serializer("envelope")
    def serialize_envelope(self, v: List[Fraction]) -> List[str]:
        return [str(x) for x in v]

    class Config:
        arbitrary_types_allowed = True


class FreenessWitness(BaseModel):
    """Evidence that g acts without fixed points on some X_n"""

    element: GroupElement
    """The tested element g"""

    case: Literal["infinite-order", "torsion"]
    """Which branch of the freeness argument applies"""

    level: int
    """Level n of the witness"""

    shift: Optional[int] = None
    """Infinite order: l with g^l F_nC_{n+1} ⊆ F_{n+1} \\ F_nC_{n+1}"""

    correlation: Optional[Fraction] = None
    """Infinite order: μ(T_{g^l}X_n ∩ X_n), exactly 0 for a valid witness"""

    invariant_levels: List[int] = Field(default_factory=list)
    """Torsion: levels with gF_n = F_n"""

    orbits: List[List[GroupElement]] = Field(default_factory=list)
    """Torsion: partition of the level-n names into <g>-orbits"""

    @field_serializer("correlation")
    def serialize_correlation(self, v: Optional[Fraction]) -> Optional[str]:
        return None if v is None else str(v)

    @field_serializer("element")
    def serialize_element(self, v: GroupElement) -> Any:
        return v.to_json()

    @field_serializer("orbits")
    def serialize_orbits(self, v: List[List[GroupElement]]) -> List[List[Any]]:
        return [[g.to_json() for g in orbit] for orbit in v]

    class Config:
        arbitrary_types_allowed = True


class FundamentalDomain(BaseModel):
    """A set Y of orbit representatives whose g-translates partition X_n"""

    element: GroupElement
    order: int
    domain: CompactOpen
    translates: List[CompactOpen]

    class Config:
        arbitrary_types_allowed = True
