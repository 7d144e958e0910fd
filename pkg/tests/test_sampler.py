"""
Tests for seeded Poisson configurations
"""

import numpy as np
import pytest

from cfpoisson.cfspace.action import act
from cfpoisson.cfspace.cylinders import cylinder, full_level
from cfpoisson.groups.arithmetic import inv
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.shared.streams import name_keys, stream_key, uniforms
from cfpoisson.suspension.sampler import (
    count,
    cylinder_law,
    refine_sample,
    restrict,
    sample,
    sample_counts,
    transport,
)


def occupied_sample(region, M, start=0):
    for seed in range(start, start + 100):
        x = sample(region, M, seed)
        if x.total > 0:
            return x
    raise AssertionError("no occupied sample in 100 seeds")


def test_uniform_streams(Z):
    """Test that uniforms depend only on their keys"""
    names = np.array([[0], [3], [7]])
    keys = name_keys(Z, names)
    u = uniforms(stream_key(0, "sample", 1), keys)
    assert u.shape == (3,)
    assert ((u >= 0) & (u < 1)).all()
    assert uniforms(stream_key(0, "sample", 1), keys[::-1])[0] == u[-1]
    assert uniforms(stream_key(1, "sample", 1), keys)[0] != u[0]


def test_direct_sum_keys_ignore_padding(torsion_group):
    """Test that padded and unpadded rows share a key"""
    short = name_keys(torsion_group, np.array([[1]]))
    padded = name_keys(torsion_group, np.array([[1, 0, 0]]))
    assert short[0] == padded[0]


def test_sample_is_deterministic(small_scheme):
    """Test that the same seed gives the same configuration"""
    region = full_level(small_scheme, 1)
    a, b = sample(region, 2, 7), sample(region, 2, 7)
    assert np.array_equal(a.counts, b.counts)
    assert a.resolution == 2
    assert a.names.shape[0] == 20


def test_sample_is_order_independent(small_scheme, Z):
    """Test that a sub-region sees the same counts as the full region"""
    full = sample(full_level(small_scheme, 1), 2, 5)
    part = sample(cylinder(small_scheme, Z.element(3), 1), 2, 5)
    assert part.counts_map() == {
        g: c for g, c in full.counts_map().items() if g.coords in ((3,), (33,))
    }


def test_counts_are_additive(small_scheme, Z):
    """Test that coarse counts are sums of fine counts"""
    x = sample(full_level(small_scheme, 1), 2, 11)
    assert count(x, full_level(small_scheme, 1)) == x.total
    zero = cylinder(small_scheme, Z.element(0), 1)
    three = cylinder(small_scheme, Z.element(3), 1)
    both = count(x, full_level(small_scheme, 0))
    assert both == count(x, zero) + count(x, three)
    assert restrict(x, zero).total == count(x, zero)


def test_refine_sample_preserves_counts(small_scheme, Z):
    """Test that refinement only moves points into children"""
    x = sample(full_level(small_scheme, 1), 1, 3)
    y = refine_sample(x, 2)
    assert y.resolution == 2
    assert y.total == x.total
    for f in (-1, 0, 4, 8):
        K = cylinder(small_scheme, Z.element(f), 1)
        assert count(y, K) == count(x, K)
    assert np.array_equal(refine_sample(y, 2).counts, y.counts)
    with pytest.raises(CFPoissonError, match="domain_error"):
        refine_sample(y, 1)


def test_count_outside_region(small_scheme, Z):
    """Test that counting outside the sampled region is an error"""
    x = sample(cylinder(small_scheme, Z.element(0), 1), 1, 0)
    with pytest.raises(CFPoissonError, match="coverage_error"):
        count(x, cylinder(small_scheme, Z.element(3), 1))


def test_sample_errors(small_scheme):
    """Test seed and resolution validation"""
    region = full_level(small_scheme, 1)
    with pytest.raises(CFPoissonError, match="domain_error"):
        sample(region, 1, -1)
    with pytest.raises(CFPoissonError, match="depth_exceeded"):
        sample(region, 3, 0)
    with pytest.raises(CFPoissonError, match="depth_exceeded"):
        sample(region, 0, 0)


def test_cylinder_law(small_scheme):
    """Test the per-cylinder intensity"""
    assert cylinder_law(full_level(small_scheme, 0), 2).t == 0.25


def test_sample_counts_batch(small_scheme):
    """Test that batched draws match single samples"""
    region = full_level(small_scheme, 1)
    _, names, counts = sample_counts(region, 2, [4, 9])
    assert counts.shape == (2, names.shape[0])
    assert np.array_equal(counts[1], sample(region, 2, 9).counts)


def test_transport_pulls_back_counts(small_scheme, Z):
    """Test count(T*_g x, K) = count(x, T_{g^-1} K)"""
    g = Z.element(1)
    x = occupied_sample(full_level(small_scheme, 1), 1)
    y = transport(x, g, 2)
    assert y.total == x.total
    for f in y.region.names.elements()[:12]:
        K = cylinder(small_scheme, f, y.resolution)
        pre = act(inv(g), K, 2)
        assert pre.residual.is_empty
        assert count(y, K) == count(x, pre.image)


def test_transport_beyond_budget(small_scheme, Z):
    """Test that occupied cylinders must stay inside the scheme"""
    x = occupied_sample(full_level(small_scheme, 1), 1)
    with pytest.raises(CFPoissonError, match="undefined_at_budget"):
        transport(x, Z.element(200), 2)


def test_sample_serialization(small_scheme):
    """Test that only occupied cylinders are serialized"""
    x = occupied_sample(full_level(small_scheme, 1), 2)
    data = x.model_dump()
    assert data["resolution"] == 2
    assert sum(c for _, c in data["counts"]) == x.total
    assert all(c > 0 for _, c in data["counts"])
