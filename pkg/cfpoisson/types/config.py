"""
Experiment configuration shared by the command-line tools
"""

import re
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupDescriptor, GroupElement
from cfpoisson.types.scheme import BuildParameters
from cfpoisson.types.suspension import StatisticsSettings

_ELEMENT_LISTS = ("folnerTestSet", "torsionWitnesses", "triangleWitnesses")


def parse_group_name(name: str) -> GroupDescriptor:
    """
    Group from a short name: "Z", "Z^d", "H3" or "sum(Z/2)" / "sum(Z/2,Z/3)".

    Raises:
        CFPoissonError: invalid_group for an unknown name
    """
    text = name.replace(" ", "")
    if text == "Z":
        return GroupDescriptor(kind="integer-lattice", dimension=1)
    lattice = re.fullmatch(r"Z\^(\d+)", text)
    if lattice:
        return GroupDescriptor(kind="integer-lattice", dimension=int(lattice.group(1)))
    if text in ("H3", "H3(Z)", "heisenberg"):
        return GroupDescriptor(kind="discrete-heisenberg")
    direct = re.fullmatch(r"sum\((Z/\d+(?:,Z/\d+)*)\)", text)
    if direct:
        orders = tuple(int(part[2:]) for part in direct.group(1).split(","))
        return GroupDescriptor(kind="direct-sum-finite-cyclic", orders=orders)
    raise CFPoissonError("invalid_group", f"unknown group name {name!r}")


class ExperimentConfig(BaseModel):
    """Parameters of one experiment run; command-line flags override file values"""

    group: Optional[GroupDescriptor] = None
    """Ambient group, as a descriptor or a short name like "Z^2" """

    scheme: Optional[str] = None
    """Scheme file to load instead of building one"""

    depth: int = 3
    """Depth of the scheme to build"""

    build: Dict[str, Any] = Field(default_factory=dict)
    """Builder parameters (camelCase keys of BuildParameters)"""

    elements: List[Any] = Field(default_factory=list)
    """Element encodings the per-element checks are run for"""

    radii: List[int] = Field(default_factory=lambda: list(range(11)))
    """Norm radii of the decay and covariance scans"""

    level: int = 1
    """Level of the compact open sets A = B = X_0"""

    budget: Optional[int] = None
    """Refinement budget of the partial action (default: scheme depth)"""

    resolution: Optional[int] = None
    """Sampling resolution M (default: scheme depth)"""

    trials: int = 2000
    seed: int = 0

    l_max: int = Field(1 << 20, alias="lMax")
    """Largest power tried in displacement searches"""

    workers: int = 1
    """Worker processes for independent units"""

    out: str = "."
    """Output directory for report.json and the CSV"""

    statistics: StatisticsSettings = Field(default_factory=StatisticsSettings)

    log_level: str = Field("INFO", alias="logLevel")

    @field_validator("group", mode="before")
    @classmethod
    def parse_group(cls, v: Any) -> Any:
        if isinstance(v, str):
            try:
                return parse_group_name(v)
            except CFPoissonError as e:
                raise ValueError(str(e)) from e
        return v

    @field_validator("depth", "level", "workers")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be non-negative")
        return v

    @field_validator("trials")
    @classmethod
    def validate_trials(cls, v: int) -> int:
        if v < 1:
            raise ValueError("trials must be at least 1")
        return v

    @field_validator("seed")
    @classmethod
    def validate_seed(cls, v: int) -> int:
        if v < 0:
            raise ValueError("seed must be non-negative")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        if v.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {v!r}")
        return v.upper()

    @field_validator("radii")
    @classmethod
    def validate_radii(cls, v: List[int]) -> List[int]:
        if any(r < 0 for r in v):
            raise ValueError("radii must be non-negative")
        return v

    class Config:
        populate_by_name = True

    def build_parameters(self, group: GroupDescriptor) -> BuildParameters:
        """
        Builder parameters with element encodings parsed in the given group.

        Raises:
            CFPoissonError: invalid_config for malformed parameters
        """
        raw = dict(self.build)
        try:
            for key in _ELEMENT_LISTS:
                if raw.get(key) is not None:
                    raw[key] = group.parse_many(raw[key])
            return BuildParameters.model_validate(raw)
        except (CFPoissonError, ValueError) as e:
            raise CFPoissonError("invalid_config", f"build: {e}") from e

    def parsed_elements(self, group: GroupDescriptor) -> List[GroupElement]:
        try:
            return group.parse_many(self.elements)
        except CFPoissonError as e:
            raise CFPoissonError("invalid_config", f"elements: {e}") from e
