"""
Scheme files, JSON reports and CSV tables

A scheme file is {"group": ..., "F": [...], "C": [...]} where each entry
is either a list of element encodings or, for large sets, a run table
{"runs": [[prefix..., lo, hi], ...]}.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

from pydantic import ValidationError

from cfpoisson.groups.subsets import FiniteSubset
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.group import GroupDescriptor
from cfpoisson.types.scheme import CFScheme

logger = logging.getLogger(__name__)

# Sets larger than this are written as run tables
ELEMENT_LIST_LIMIT = 10_000

PathLike = Union[str, Path]


def _parse_error(field: str, message: str) -> CFPoissonError:
    return CFPoissonError("scheme_parse_error", f"{field}: {message}", field=field)


def _encode_subset(subset: FiniteSubset) -> Any:
    if subset.cardinality <= ELEMENT_LIST_LIMIT:
        return [g.to_json() for g in subset.elements()]
    rows = [
        [int(v) for v in prefix] + [int(lo), int(hi)]
        for prefix, lo, hi in zip(subset.prefix, subset.lo, subset.hi)
    ]
    return {"runs": rows}


def _decode_subset(group: GroupDescriptor, raw: Any, field: str) -> FiniteSubset:
    if isinstance(raw, dict):
        rows = raw.get("runs")
        if not isinstance(rows, list) or not all(isinstance(r, list) and len(r) >= 2 for r in rows):
            raise _parse_error(field, "run tables need rows [prefix..., lo, hi]")
        try:
            return FiniteSubset.from_runs(
                group, [r[:-2] for r in rows], [r[-2] for r in rows], [r[-1] for r in rows]
            )
        except (CFPoissonError, ValueError, TypeError) as e:
            raise _parse_error(field, str(e)) from e
    if not isinstance(raw, list):
        raise _parse_error(field, "expected a list of elements")
    elements = []
    for i, item in enumerate(raw):
        try:
            elements.append(group.parse(item))
        except (CFPoissonError, ValueError, TypeError) as e:
            raise _parse_error(f"{field}[{i}]", str(e)) from e
    subset = FiniteSubset.from_elements(group, elements)
    duplicates = len(elements) - subset.cardinality
    if duplicates:
        logger.warning("%s lists %d duplicate element(s); collapsed", field, duplicates)
    return subset


def scheme_to_json(s: CFScheme) -> Dict[str, Any]:
    return {
        "group": s.group.model_dump(),
        "F": [_encode_subset(F) for F in s.F],
        "C": [_encode_subset(C) for C in s.C],
    }


def scheme_from_json(data: Any) -> CFScheme:
    """
    Decode and validate a scheme.

    Raises:
        CFPoissonError: scheme_parse_error naming the offending field,
            invalid_scheme if a structural invariant fails
    """
    if not isinstance(data, dict):
        raise _parse_error("$", "expected an object")
    for key in ("group", "F", "C"):
        if key not in data:
            raise _parse_error(key, "missing")
    try:
        group = GroupDescriptor.model_validate(data["group"])
    except ValidationError as e:
        raise _parse_error("group", e.errors()[0]["msg"]) from e
    for key in ("F", "C"):
        if not isinstance(data[key], list):
            raise _parse_error(key, "expected a list")
    F = [_decode_subset(group, raw, f"F[{i}]") for i, raw in enumerate(data["F"])]
    C = [_decode_subset(group, raw, f"C[{i}]") for i, raw in enumerate(data["C"])]
    try:
        s = CFScheme(group=group, F=F, C=C)
    except ValidationError as e:
        raise _parse_error("F", e.errors()[0]["msg"]) from e
    return s.validate_invariants()


def load_scheme(path: PathLike) -> CFScheme:
    """Read a scheme file; see scheme_from_json for the errors raised"""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise CFPoissonError(
            "scheme_parse_error",
            f"line {e.lineno} column {e.colno}: {e.msg}",
            field="$",
            line=e.lineno,
            column=e.colno,
        ) from e
    s = scheme_from_json(data)
    logger.info("loaded %s scheme of depth %d from %s", s.group.label, s.depth, path)
    return s


def store_scheme(s: CFScheme, path: PathLike) -> None:
    write_json(path, scheme_to_json(s))


def write_json(path: PathLike, payload: Any) -> None:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline"""
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def read_csv(path: PathLike) -> List[Dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))
