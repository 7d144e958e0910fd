"""
Exact group law for single elements and vectorized coordinate matrices
"""

from math import gcd
from typing import List, Optional, Sequence

import numpy as np

from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupDescriptor, GroupElement


def _same_group(g: GroupElement, h: GroupElement) -> GroupDescriptor:
    if g.group != h.group:
        raise CFPoissonError(
            "kind_mismatch",
            f"cannot combine elements of {g.group.label} and {h.group.label}",
        )
    return g.group


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    """
    Multiply two elements of the same group.

    Heisenberg uses (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab').

    Raises:
        CFPoissonError: kind_mismatch if the elements live in different groups
    """
    group = _same_group(g, h)
    if group.kind == "integer-lattice":
        return GroupElement(group=group, coords=tuple(x + y for x, y in zip(g.coords, h.coords)))
    if group.kind == "discrete-heisenberg":
        a, b, c = g.coords
        a2, b2, c2 = h.coords
        return GroupElement(group=group, coords=(a + a2, b + b2, c + c2 + a * b2))
    width = max(len(g.coords), len(h.coords))
    return group.element(tuple(x + y for x, y in zip(g.padded(width), h.padded(width))))


def inv(g: GroupElement) -> GroupElement:
    """Inverse element; Heisenberg (a,b,c)^-1 = (-a, -b, -c+ab)"""
    group = g.group
    if group.kind == "integer-lattice":
        return GroupElement(group=group, coords=tuple(-x for x in g.coords))
    if group.kind == "discrete-heisenberg":
        a, b, c = g.coords
        return GroupElement(group=group, coords=(-a, -b, -c + a * b))
    return group.element(tuple(-x for x in g.coords))


def power(g: GroupElement, k: int) -> GroupElement:
    """g^k for any integer k, using closed forms"""
    group = g.group
    if group.kind == "discrete-heisenberg":
        a, b, c = g.coords
        return GroupElement(group=group, coords=(k * a, k * b, k * c + a * b * (k * (k - 1) // 2)))
    if group.kind == "integer-lattice":
        return GroupElement(group=group, coords=tuple(k * x for x in g.coords))
    return group.element(tuple(k * x for x in g.coords))


def commutator(g: GroupElement, h: GroupElement) -> GroupElement:
    return mul(mul(g, h), mul(inv(g), inv(h)))


def is_central(g: GroupElement) -> bool:
    """Whether g commutes with every element (Heisenberg center is {(0, 0, c)})"""
    if g.group.is_abelian:
        return True
    return g.coords[0] == 0 and g.coords[1] == 0


def order_of(g: GroupElement, bound: int) -> Optional[int]:
    """
    Least k <= bound with g^k = identity, found by iterated multiplication.

    Args:
        g: Element to classify
        bound: Largest power tried

    Returns:
        The order, or None when it exceeds the bound

    Raises:
        CFPoissonError: domain_error if bound < 1
    """
    if bound < 1:
        raise CFPoissonError("domain_error", f"order bound must be >= 1, got {bound}")
    current = g
    for k in range(1, bound + 1):
        if current.is_identity:
            return k
        current = mul(current, g)
    return None


def element_order(g: GroupElement) -> Optional[int]:
    """
    Exact order from per-kind knowledge.

    Lattice and Heisenberg are torsion-free, so only the identity has finite
    order there. Direct-sum orders are the lcm of the component orders.
    """
    if g.is_identity:
        return 1
    if g.group.is_torsion_free:
        return None
    result = 1
    for i, v in enumerate(g.coords):
        if v:
            o = g.group.order(i + 1)
            component = o // gcd(o, v)
            result = result * component // gcd(result, component)
    return result


def has_finite_order(g: GroupElement) -> bool:
    return element_order(g) is not None


# -- coordinate matrices ------------------------------------------------------
#
# A coordinate matrix holds one element per row. Direct-sum rows are residue
# vectors padded with zeros to a common width.


def coordinate_width(group: GroupDescriptor, elements: Sequence[GroupElement] = ()) -> int:
    if group.kind == "integer-lattice":
        assert group.dimension is not None
        return group.dimension
    if group.kind == "discrete-heisenberg":
        return 3
    return max((len(e.coords) for e in elements), default=0)


def column_orders(group: GroupDescriptor, width: int, start: int = 1) -> np.ndarray:
    """Direct-sum orders of the columns start..start+width-1"""
    return np.array([group.order(i) for i in range(start, start + width)], dtype=np.int64)


def to_points(group: GroupDescriptor, elements: Sequence[GroupElement]) -> np.ndarray:
    """Coordinate matrix of a sequence of elements"""
    width = coordinate_width(group, elements)
    points = np.zeros((len(elements), width), dtype=np.int64)
    for row, e in enumerate(elements):
        if e.group != group:
            raise CFPoissonError("kind_mismatch", f"{e!r} is not an element of {group.label}")
        points[row, : len(e.coords)] = e.coords
    return points


def from_points(group: GroupDescriptor, points: np.ndarray) -> List[GroupElement]:
    """Canonical elements of the rows of a coordinate matrix"""
    if group.kind == "direct-sum-finite-cyclic":
        return [group.element(tuple(int(v) for v in row)) for row in points]
    return [GroupElement(group=group, coords=tuple(int(v) for v in row)) for row in points]


def pad_points(points: np.ndarray, width: int) -> np.ndarray:
    if points.shape[1] >= width:
        return points
    pad = np.zeros((points.shape[0], width - points.shape[1]), dtype=np.int64)
    return np.hstack([points, pad])


# Largest coordinate magnitude the int64 matrices may hold
COORDINATE_LIMIT = 1 << 62


def _max_abs(values: np.ndarray) -> int:
    return max(abs(int(values.max())), abs(int(values.min()))) if values.size else 0


def _require_coordinates(bound: int) -> None:
    if bound >= COORDINATE_LIMIT:
        raise CFPoissonError(
            "size_limit_exceeded",
            f"coordinates up to {bound} do not fit 64-bit arithmetic",
            bound=bound,
        )


def mul_points(group: GroupDescriptor, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise products p[i]·q[i] (rows broadcast)"""
    if group.kind == "integer-lattice":
        _require_coordinates(_max_abs(p) + _max_abs(q))
        return p + q
    if group.kind == "discrete-heisenberg":
        _require_coordinates(
            _max_abs(p) + _max_abs(q) + _max_abs(p[..., 0]) * _max_abs(q[..., 1])
        )
        out = p + q
        out[..., 2] += p[..., 0] * q[..., 1]
        return out
    width = max(p.shape[-1], q.shape[-1])
    p, q = pad_points(p, width), pad_points(q, width)
    return np.mod(p + q, column_orders(group, width))


def inv_points(group: GroupDescriptor, p: np.ndarray) -> np.ndarray:
    if group.kind == "integer-lattice":
        return -p
    if group.kind == "discrete-heisenberg":
        out = -p
        out[..., 2] += p[..., 0] * p[..., 1]
        return out
    return np.mod(-p, column_orders(group, p.shape[-1]))


def power_points(g: GroupElement, exponents: np.ndarray) -> np.ndarray:
    """Coordinate matrix of g^k for every k in exponents"""
    group = g.group
    k = np.asarray(exponents, dtype=np.int64)[:, None]
    base = np.array(g.coords, dtype=np.int64)[None, :]
    k_max = _max_abs(k)
    if group.kind == "integer-lattice":
        _require_coordinates(k_max * _max_abs(base))
        return k * base
    if group.kind == "discrete-heisenberg":
        a, b, _ = g.coords
        _require_coordinates(k_max * _max_abs(base) + abs(a * b) * k_max * (k_max + 1) // 2)
        out = k * base
        out[:, 2] += a * b * (k[:, 0] * (k[:, 0] - 1) // 2)
        return out
    if base.shape[1] == 0:
        return np.zeros((k.shape[0], 0), dtype=np.int64)
    return np.mod(k * base, column_orders(group, base.shape[1]))
