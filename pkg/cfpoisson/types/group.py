"""
Group descriptors and canonical group elements
"""

from typing import Any, Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_serializer, model_validator

from cfpoisson.shared.errors import CFPoissonError


GroupKind = Literal["integer-lattice", "direct-sum-finite-cyclic", "discrete-heisenberg"]

ElementJson = Union[int, List[int], List[List[int]]]


class GroupDescriptor(BaseModel):
    """A concrete countable amenable group supported by the laboratory"""

    kind: GroupKind
    """Group family"""

    dimension: Optional[int] = None
    """Rank d of the integer lattice Z^d"""

    orders: Optional[Tuple[int, ...]] = None
    """Cyclic orders of the direct sum, repeated periodically along the index"""

    @model_validator(mode="before")
    @classmethod
    def flatten_params(cls, data: Any) -> Any:
        """Accept the {"kind": ..., "params": {...}} wire form"""
        if isinstance(data, dict) and "params" in data:
            data = {"kind": data.get("kind"), **(data.get("params") or {})}
        return data

    @field_validator("dimension")
    @classmethod
    def validate_dimension(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("dimension must be at least 1")
        return v

    @field_validator("orders")
    @classmethod
    def validate_orders(cls, v: Optional[Tuple[int, ...]]) -> Optional[Tuple[int, ...]]:
        if v is not None:
            if len(v) == 0:
                raise ValueError("orders must not be empty")
            if any(o < 2 for o in v):
                raise ValueError("cyclic orders must be at least 2")
        return v

    @model_validator(mode="after")
    def validate_kind_params(self) -> "GroupDescriptor":
        if self.kind == "integer-lattice" and self.dimension is None:
            raise ValueError("integer-lattice requires a dimension")
        if self.kind == "direct-sum-finite-cyclic" and self.orders is None:
            raise ValueError("direct-sum-finite-cyclic requires orders")
        if self.kind != "integer-lattice" and self.dimension is not None:
            raise ValueError("dimension is only meaningful for integer-lattice")
        if self.kind != "direct-sum-finite-cyclic" and self.orders is not None:
            raise ValueError("orders are only meaningful for direct-sum-finite-cyclic")
        return self

    @model_serializer
    def serialize(self) -> Dict[str, Any]:
        params: Dict[str, Any] = {}
        if self.dimension is not None:
            params["dimension"] = self.dimension
        if self.orders is not None:
            params["orders"] = list(self.orders)
        return {"kind": self.kind, "params": params}

    class Config:
        frozen = True

    # -- structure ---------------------------------------------------------

    def order(self, index: int) -> int:
        """Order of the cyclic factor at 1-based index"""
        if self.orders is None:
            raise CFPoissonError("kind_mismatch", f"{self.kind} has no cyclic factors")
        if index < 1:
            raise CFPoissonError("invalid_element", f"direct-sum index must be >= 1, got {index}")
        return self.orders[(index - 1) % len(self.orders)]

    @property
    def is_torsion_free(self) -> bool:
        return self.kind != "direct-sum-finite-cyclic"

    @property
    def is_abelian(self) -> bool:
        return self.kind != "discrete-heisenberg"

    @property
    def label(self) -> str:
        """Short human-readable name used in logs and reports"""
        if self.kind == "integer-lattice":
            return "Z" if self.dimension == 1 else f"Z^{self.dimension}"
        if self.kind == "direct-sum-finite-cyclic":
            assert self.orders is not None
            return "sum(" + ",".join(f"Z/{o}" for o in self.orders) + ")"
        return "H3(Z)"

    @property
    def identity_element(self) -> "GroupElement":
        if self.kind == "integer-lattice":
            assert self.dimension is not None
            return GroupElement(group=self, coords=(0,) * self.dimension)
        if self.kind == "discrete-heisenberg":
            return GroupElement(group=self, coords=(0, 0, 0))
        return GroupElement(group=self, coords=())

    @property
    def generators(self) -> List["GroupElement"]:
        """
        Stored generating set used for word norms.

        Integer lattice: unit vectors e_1..e_d. Direct sum: the first ten
        basis vectors e_i (the weighted norm gives e_i weight i, so the set
        is listed only for reference). Heisenberg: x = (1,0,0), y = (0,1,0).
        """
        if self.kind == "integer-lattice":
            assert self.dimension is not None
            return [
                self.element(tuple(1 if j == i else 0 for j in range(self.dimension)))
                for i in range(self.dimension)
            ]
        if self.kind == "discrete-heisenberg":
            return [self.element((1, 0, 0)), self.element((0, 1, 0))]
        return [self.basis(i) for i in range(1, 11)]

    # -- element construction ----------------------------------------------

    def element(self, coords: Union[int, Sequence[int]]) -> "GroupElement":
        """
        Build a canonical element from raw coordinates.

        Args:
            coords: Integer (for Z), coordinate vector, Heisenberg triple, or
                direct-sum residue vector indexed from 1

        Returns:
            Canonical GroupElement

        Raises:
            CFPoissonError: If the coordinates do not fit the group kind
        """
        if isinstance(coords, bool):
            raise CFPoissonError("invalid_element", "booleans are not group elements")
        if isinstance(coords, int):
            coords = (coords,)
        try:
            values = tuple(int(c) for c in coords)
        except (TypeError, ValueError) as e:
            raise CFPoissonError("invalid_element", f"non-integer coordinates {coords!r}") from e

        if self.kind == "integer-lattice":
            if len(values) != self.dimension:
                raise CFPoissonError(
                    "invalid_element",
                    f"expected {self.dimension} coordinates, got {len(values)}",
                )
            return GroupElement(group=self, coords=values)
        if self.kind == "discrete-heisenberg":
            if len(values) != 3:
                raise CFPoissonError("invalid_element", f"expected a triple, got {len(values)}")
            return GroupElement(group=self, coords=values)

        reduced = [v % self.order(i + 1) for i, v in enumerate(values)]
        while reduced and reduced[-1] == 0:
            reduced.pop()
        return GroupElement(group=self, coords=tuple(reduced))

    def basis(self, index: int) -> "GroupElement":
        """The direct-sum basis vector e_index (1-based)"""
        if self.kind != "direct-sum-finite-cyclic":
            raise CFPoissonError("kind_mismatch", f"{self.kind} has no direct-sum basis")
        self.order(index)
        return self.element(tuple(1 if j == index else 0 for j in range(1, index + 1)))

    def central(self, k: int) -> "GroupElement":
        """The Heisenberg central element z^k = (0, 0, k)"""
        if self.kind != "discrete-heisenberg":
            raise CFPoissonError("kind_mismatch", f"{self.kind} has no designated center")
        return self.element((0, 0, k))

    def parse(self, raw: ElementJson) -> "GroupElement":
        """
        Parse the JSON encoding of an element.

        Integer arrays for the lattice (a bare integer is accepted for Z),
        [[index, residue], ...] pair lists for the direct sum, and triples
        for Heisenberg.

        Raises:
            CFPoissonError: If the encoding does not match the group kind
        """
        if self.kind == "direct-sum-finite-cyclic":
            if not isinstance(raw, list):
                raise CFPoissonError("invalid_element", f"expected index/residue pairs: {raw!r}")
            width = 0
            pairs: Dict[int, int] = {}
            for pair in raw:
                if not isinstance(pair, list) or len(pair) != 2:
                    raise CFPoissonError("invalid_element", f"malformed pair {pair!r}")
                index, residue = int(pair[0]), int(pair[1])
                if index < 1:
                    raise CFPoissonError("invalid_element", f"index must be >= 1: {pair!r}")
                if index in pairs:
                    raise CFPoissonError("invalid_element", f"repeated index {index}")
                pairs[index] = residue
                width = max(width, index)
            return self.element(tuple(pairs.get(i, 0) for i in range(1, width + 1)))
        if isinstance(raw, list) and any(isinstance(v, list) for v in raw):
            raise CFPoissonError("invalid_element", f"nested lists are not {self.kind} elements")
        return self.element(raw)  # type: ignore[arg-type]

    def parse_many(self, raws: Iterable[ElementJson]) -> List["GroupElement"]:
        return [self.parse(raw) for raw in raws]


class GroupElement(BaseModel):
    """An element of a supported group in canonical form"""

    group: GroupDescriptor
    """Ambient group"""

    coords: Tuple[int, ...] = Field(default_factory=tuple)
    """Canonical coordinates (direct sum: residues by index, trailing zeros removed)"""

    @model_validator(mode="after")
    def validate_canonical(self) -> "GroupElement":
        kind = self.group.kind
        if kind == "integer-lattice" and len(self.coords) != self.group.dimension:
            raise ValueError("lattice element has the wrong dimension")
        if kind == "discrete-heisenberg" and len(self.coords) != 3:
            raise ValueError("Heisenberg elements are integer triples")
        if kind == "direct-sum-finite-cyclic":
            if self.coords and self.coords[-1] == 0:
                raise ValueError("direct-sum element has trailing zero entries")
            for i, v in enumerate(self.coords):
                if not 0 <= v < self.group.order(i + 1):
                    raise ValueError("direct-sum residue not reduced")
        return self

    class Config:
        frozen = True

    @property
    def kind(self) -> GroupKind:
        return self.group.kind

    @property
    def is_identity(self) -> bool:
        return all(v == 0 for v in self.coords)

    def to_json(self) -> ElementJson:
        """Wire encoding: integer array, index/residue pair list, or triple"""
        if self.group.kind == "direct-sum-finite-cyclic":
            return [[i + 1, v] for i, v in enumerate(self.coords) if v != 0]
        return list(self.coords)

    def padded(self, width: int) -> Tuple[int, ...]:
        """Direct-sum residue vector padded with zeros to the given width"""
        return self.coords + (0,) * (width - len(self.coords))

    def __lt__(self, other: "GroupElement") -> bool:
        width = max(len(self.coords), len(other.coords))
        return self.padded(width) < other.padded(width)

    def __repr__(self) -> str:
        if self.group.kind == "integer-lattice" and self.group.dimension == 1:
            return f"<{self.coords[0]}>"
        if self.group.kind == "direct-sum-finite-cyclic":
            terms = [f"{v}e{i + 1}" for i, v in enumerate(self.coords) if v]
            return "<" + ("+".join(terms) or "0") + ">"
        return "<" + ",".join(str(v) for v in self.coords) + ">"

    __str__ = __repr__
