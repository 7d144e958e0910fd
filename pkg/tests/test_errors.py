"""
Tests for error reasons and the parallel helper
"""

import pytest

from cfpoisson.shared.errors import (
    CONDITION_REASONS,
    ERROR_REASONS,
    CFPoissonError,
    reason_of,
    require,
)
from cfpoisson.shared.parallel import ordered_map


def test_error_message_starts_with_reason():
    """Test the message format and detail"""
    error = CFPoissonError("depth_exceeded", "level 5 outside 0..3", level=5)
    assert str(error) == "depth_exceeded: level 5 outside 0..3"
    assert error.reason == "depth_exceeded"
    assert error.detail == {"level": 5}
    assert str(CFPoissonError("empty_subset")) == "empty_subset"


def test_unknown_reason():
    """Test that reasons must be registered"""
    with pytest.raises(ValueError, match="unknown error reason"):
        CFPoissonError("made_up")


def test_require():
    """Test the require helper"""
    require(True, "domain_error")
    with pytest.raises(CFPoissonError, match="domain_error: negative") as info:
        require(False, "domain_error", "negative", value=-1)
    assert info.value.detail["value"] == -1


def test_reason_of():
    """Test reason extraction from arbitrary exceptions"""
    assert reason_of(CFPoissonError("witness_not_found")) == "witness_not_found"
    assert reason_of(KeyError("x")) is None


def test_condition_reasons():
    """Test that condition failures are a tail of the registered reasons"""
    assert "mixing_sets_not_disjoint" in CONDITION_REASONS
    assert "depth_exceeded" not in CONDITION_REASONS
    assert set(CONDITION_REASONS) <= set(ERROR_REASONS)


def _square(x):
    return x * x


def test_ordered_map_keeps_order():
    """Test that results come back in input order for any worker count"""
    items = list(range(7))
    assert ordered_map(_square, items) == [x * x for x in items]
    assert ordered_map(_square, items, workers=2) == [x * x for x in items]
    assert ordered_map(_square, []) == []
