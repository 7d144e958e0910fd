"""
Tests for type definitions
"""

from fractions import Fraction

import pytest
from pydantic import ValidationError

from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.types.config import ExperimentConfig, parse_group_name
from cfpoisson.types.group import GroupDescriptor, GroupElement
from cfpoisson.types.reports import ConditionReport, Verdict
from cfpoisson.types.scheme import BuildParameters
from cfpoisson.types.suspension import CovarianceEstimate, PoissonLaw


def test_group_descriptor_wire_form():
    """Test the {"kind", "params"} encoding of groups"""
    group = GroupDescriptor.model_validate(
        {"kind": "direct-sum-finite-cyclic", "params": {"orders": [2, 3]}}
    )
    assert group.orders == (2, 3)
    assert group.order(3) == 2
    assert group.model_dump() == {
        "kind": "direct-sum-finite-cyclic",
        "params": {"orders": [2, 3]},
    }
    assert group.label


def test_group_descriptor_invalid():
    """Test that kinds and parameters must match"""
    with pytest.raises(ValidationError, match="requires a dimension"):
        GroupDescriptor(kind="integer-lattice")
    with pytest.raises(ValidationError, match="cyclic orders must be at least 2"):
        GroupDescriptor(kind="direct-sum-finite-cyclic", orders=(1,))
    with pytest.raises(ValidationError, match="only meaningful"):
        GroupDescriptor(kind="discrete-heisenberg", dimension=3)


def test_group_element_canonical():
    """Test that elements must be in canonical form"""
    ds = GroupDescriptor(kind="direct-sum-finite-cyclic", orders=(2,))
    with pytest.raises(ValidationError, match="trailing zero"):
        GroupElement(group=ds, coords=(1, 0))
    with pytest.raises(ValidationError, match="not reduced"):
        GroupElement(group=ds, coords=(3,))
    assert ds.element((1, 0)).to_json() == [[1, 1]]


def test_group_element_parse_errors():
    """Test malformed element encodings"""
    z2 = GroupDescriptor(kind="integer-lattice", dimension=2)
    with pytest.raises(CFPoissonError, match="invalid_element"):
        z2.parse([1])
    with pytest.raises(CFPoissonError, match="invalid_element"):
        z2.parse(True)
    ds = GroupDescriptor(kind="direct-sum-finite-cyclic", orders=(2,))
    with pytest.raises(CFPoissonError, match="repeated index"):
        ds.parse([[1, 1], [1, 0]])


def test_build_parameters_defaults():
    """Test default copy counts and tolerances"""
    params = BuildParameters()
    assert params.copy_target(3) == 4
    assert params.epsilon(2) == Fraction(1, 4)
    custom = BuildParameters(copyCounts=[2, 5], folnerEpsilons=["1/10", 0.5])
    assert custom.copy_target(2) == 5
    assert custom.epsilon(1) == Fraction(1, 10)
    assert custom.epsilon(2) == Fraction(1, 2)
    with pytest.raises(CFPoissonError, match="invalid_precondition"):
        custom.copy_target(3)


def test_build_parameters_invalid():
    """Test that tolerances must be positive"""
    with pytest.raises(ValidationError, match="positive"):
        BuildParameters(folnerEpsilons=[0])


def test_condition_report_quantifiers():
    """Test how verdicts combine into a report outcome"""
    verdicts = [
        Verdict(check="square", level=1, passed=False, reason="shape_not_invariant"),
        Verdict(check="square", level=2, passed=True),
    ]
    assert not ConditionReport(condition="square", verdicts=verdicts).passed
    some = ConditionReport(condition="square", quantifier="some", verdicts=verdicts)
    assert some.passed
    assert some.level_map() == {1: False, 2: True}
    assert some.failures()[0].reason == "shape_not_invariant"
    globally_failed = ConditionReport(
        condition="mixing",
        quantifier="some",
        verdicts=verdicts + [Verdict(check="copy_counts_increasing", passed=False)],
    )
    assert not globally_failed.passed


def test_poisson_law():
    """Test the Poisson law parameters"""
    law = PoissonLaw(t=0.5)
    assert law.mean == law.variance == 0.5
    assert law.pmf(0) == pytest.approx(0.6065306597, rel=1e-9)
    assert law.cdf_table()[-1] == pytest.approx(1.0)
    with pytest.raises(ValidationError, match="domain_error"):
        PoissonLaw(t=-1.0)


def test_covariance_brackets():
    """Test the bracketing test of a covariance estimate"""
    estimate = CovarianceEstimate(estimate=0.48, stderr=0.01, trials=100, exact=Fraction(1, 2))
    assert estimate.brackets(3.0)
    assert not estimate.brackets(1.0)
    assert not CovarianceEstimate(estimate=0.5, stderr=0.1, trials=10).brackets()


def test_experiment_config():
    """Test configuration parsing and aliases"""
    config = ExperimentConfig.model_validate(
        {"group": "Z^2", "lMax": 64, "logLevel": "debug", "elements": [[1, 0]]}
    )
    assert config.group == GroupDescriptor(kind="integer-lattice", dimension=2)
    assert config.l_max == 64
    assert config.log_level == "DEBUG"
    assert config.parsed_elements(config.group)[0].coords == (1, 0)
    assert config.trials == 2000


@pytest.mark.parametrize(
    "field, value",
    [("trials", 0), ("seed", -1), ("radii", [-1]), ("logLevel", "loud"), ("group", "Q")],
)
def test_experiment_config_invalid(field, value):
    """Test that invalid configuration values are rejected"""
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate({field: value})


def test_config_build_parameters():
    """Test that builder element lists are parsed in the config group"""
    config = ExperimentConfig(group="sum(Z/2)", build={"torsionWitnesses": [[[1, 1]]]})
    params = config.build_parameters(config.group)
    assert params.torsion_witnesses[0] == config.group.basis(1)
    bad = ExperimentConfig(group="Z", build={"copyCounts": "many"})
    with pytest.raises(CFPoissonError, match="invalid_config"):
        bad.build_parameters(bad.group)


def test_parse_group_name():
    """Test the short group names"""
    assert parse_group_name("Z").dimension == 1
    assert parse_group_name("H3").kind == "discrete-heisenberg"
    assert parse_group_name("sum(Z/2, Z/3)").orders == (2, 3)
    with pytest.raises(CFPoissonError, match="invalid_group"):
        parse_group_name("SL2")
