"""
Command-line driver: cfpoisson <command> [options]

Every command writes report.json and <command>.csv to the output
directory. Exit status is 0 when all verdicts pass, 1 when some verdict
fails and 2 for usage, configuration or scheme-file errors.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from cfpoisson import __version__
from cfpoisson.cfspace.action import decay_curve
from cfpoisson.cfspace.cylinders import cylinder, full_level, refine
from cfpoisson.cfspace.freeness import freeness_witness, fundamental_domain
from cfpoisson.groups.arithmetic import has_finite_order
from cfpoisson.groups.norms import norm, shell
from cfpoisson.groups.subsets import FiniteSubset
from cfpoisson.schemes.builder import build_scheme
from cfpoisson.schemes.checks import (
    check_base,
    check_exhaustion,
    check_folner,
    check_mixing,
    check_square,
    growth_sequence,
    triangle_report,
)
from cfpoisson.shared.errors import CFPoissonError
from cfpoisson.shared.io import load_scheme, store_scheme, write_csv, write_json
from cfpoisson.shared.parallel import ordered_map
from cfpoisson.suspension.poisson import entropy_bound_curve
from cfpoisson.suspension.sampler import sample
from cfpoisson.suspension.statistics import (
    coarsen_check,
    fixed_point_probability,
    marginal_check,
    mc_covariance,
)
from cfpoisson.types.config import ExperimentConfig
from cfpoisson.types.group import GroupElement
from cfpoisson.types.reports import ConditionReport
from cfpoisson.types.scheme import CFScheme
from cfpoisson.types.space import CompactOpen

logger = logging.getLogger("cfpoisson")

COMMANDS = ("build", "check", "mixing", "entropy", "sample", "covariance", "freeness")

# Configuration problems that map to exit status 2
_SETUP_REASONS = ("scheme_parse_error", "invalid_scheme", "invalid_config", "invalid_group")

Outcome = Tuple[Dict[str, Any], List[str], List[List[Any]], bool]


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfpoisson", description="(C,F)-schemes, cfspace and their Poisson suspensions"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file with ExperimentConfig fields")
    parser.add_argument("--group", help='group name, e.g. "Z", "Z^2", "H3", "sum(Z/2)"')
    parser.add_argument("--scheme", help="scheme file to load instead of building")
    parser.add_argument("--depth", type=int)
    parser.add_argument("--level", type=int)
    parser.add_argument("--budget", type=int)
    parser.add_argument("--resolution", type=int)
    parser.add_argument("--radii", type=int, nargs="+")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--l-max", dest="l_max", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument(
        "--element",
        dest="elements",
        action="append",
        help="element encoding as JSON, repeatable",
    )
    parser.add_argument("--out")
    parser.add_argument("--log-level", dest="log_level")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    File values first, then every flag that was given.

    Raises:
        ValidationError: for malformed values
        CFPoissonError: invalid_config for unreadable files or element JSON
    """
    data: Dict[str, Any] = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise CFPoissonError("invalid_config", f"{args.config}: {e}") from e
        if not isinstance(data, dict):
            raise CFPoissonError("invalid_config", "configuration must be a JSON object")
    for key in (
        "group", "scheme", "depth", "level", "budget", "resolution", "radii",
        "trials", "seed", "l_max", "workers", "out", "log_level",
    ):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.elements:
        try:
            data["elements"] = [json.loads(raw) for raw in args.elements]
        except json.JSONDecodeError as e:
            raise CFPoissonError("invalid_config", f"--element: {e}") from e
    return ExperimentConfig.model_validate(data)


def obtain_scheme(config: ExperimentConfig) -> CFScheme:
    if config.scheme:
        return load_scheme(config.scheme)
    if config.group is None:
        raise CFPoissonError("invalid_config", "either group or scheme is required")
    return build_scheme(config.group, config.depth, config.build_parameters(config.group))


def _reports_payload(reports: Sequence[ConditionReport]) -> List[Dict[str, Any]]:
    return [{**r.model_dump(mode="json"), "passed": r.passed} for r in reports]


def _exact(value: Any) -> List[Any]:
    """Numerator and denominator columns of an exact rational (blank when absent)"""
    if value is None or value == "":
        return ["", ""]
    q = Fraction(value)
    return [q.numerator, q.denominator]


def _norm_column(g: GroupElement) -> Any:
    try:
        return norm(g)
    except CFPoissonError:
        return ""


def _verdict_rows(reports: Sequence[ConditionReport]) -> List[List[Any]]:
    return [
        [r.condition, v.check, "" if v.level is None else v.level, v.passed, v.reason or ""]
        for r in reports
        for v in r.verdicts
    ]


def _standard_reports(s: CFScheme, config: ExperimentConfig) -> List[ConditionReport]:
    params = config.build_parameters(s.group)
    K = (
        FiniteSubset.from_elements(s.group, params.folner_test_set)
        if params.folner_test_set
        else None
    )
    epsilons = [params.epsilon(n) for n in range(1, s.depth + 1)]
    reports = [check_base(s), check_folner(s, K, epsilons)]
    if params.mixing:
        reports.append(check_mixing(s))
    reports.append(check_exhaustion(s, params.exhaustion_radius))
    return reports


def _element_reports(
    s: CFScheme, elements: Sequence[GroupElement], l_max: int
) -> List[ConditionReport]:
    reports = []
    for g in elements:
        if has_finite_order(g):
            reports.append(check_square(s, g))
        else:
            reports.append(triangle_report(s, g, l_max))
    return reports


def run_build(s: CFScheme, config: ExperimentConfig) -> Outcome:
    out = Path(config.out)
    store_scheme(s, out / "scheme.json")
    reports = _standard_reports(s, config)
    ratios = growth_sequence(s)
    rows = [
        [n, s.F[n].cardinality, s.C[n - 1].cardinality if n else "", *_exact(ratios[n])]
        for n in range(s.depth + 1)
    ]
    payload = {"reports": _reports_payload(reports), "copy_counts": s.copy_counts}
    header = ["level", "shape_size", "copy_count", "growth_num", "growth_den"]
    return payload, header, rows, all(r.passed for r in reports)


def run_check(s: CFScheme, config: ExperimentConfig) -> Outcome:
    reports = _standard_reports(s, config)
    reports += _element_reports(s, config.parsed_elements(s.group), config.l_max)
    header = ["condition", "check", "level", "passed", "reason"]
    return (
        {"reports": _reports_payload(reports)},
        header,
        _verdict_rows(reports),
        all(r.passed for r in reports),
    )


def _base_set(s: CFScheme, config: ExperimentConfig) -> CompactOpen:
    return refine(full_level(s, 0), min(config.level, s.depth))


def run_mixing(s: CFScheme, config: ExperimentConfig) -> Outcome:
    budget = s.depth if config.budget is None else config.budget
    A = _base_set(s, config)
    curve = decay_curve(A, A, config.radii, budget)
    rows = [[p.radius, *_exact(p.value)] for p in curve.points]
    passed = curve.vanishing_from is not None
    return (
        {"curve": curve.model_dump(mode="json")},
        ["radius", "numerator", "denominator"],
        rows,
        passed,
    )


def run_entropy(s: CFScheme, config: ExperimentConfig) -> Outcome:
    curve = entropy_bound_curve(s)
    rows = [[p.level, *_exact(p.measure), repr(p.entropy)] for p in curve.points]
    return (
        {"curve": curve.model_dump(mode="json")},
        ["n", "mu_num", "mu_den", "f_nats"],
        rows,
        curve.decreasing,
    )


def run_sample(s: CFScheme, config: ExperimentConfig) -> Outcome:
    resolution = s.depth if config.resolution is None else config.resolution
    level = min(config.level, resolution)
    region = full_level(s, 0)
    blocks = [cylinder(s, f, level) for f in refine(region, level).names.elements()]
    coarse = coarsen_check(
        region, resolution, blocks, config.trials, config.seed, config.statistics
    )
    marginal = marginal_check(
        cylinder(s, s.group.identity_element, level),
        resolution,
        config.trials,
        config.seed,
        config.statistics,
    )
    drawn = sample(region, resolution, config.seed)
    rows = [
        [b.block, *_exact(b.measure), b.mean, b.variance, b.chi_square, min(b.p_values), b.passed]
        for b in coarse.blocks
    ]
    payload = {
        "sample": drawn.model_dump(),
        "coarsening": coarse.model_dump(mode="json"),
        "marginal": marginal.model_dump(mode="json"),
    }
    header = [
        "block",
        "measure_num",
        "measure_den",
        "mean",
        "variance",
        "chi_square",
        "min_p_value",
        "passed",
    ]
    return payload, header, rows, coarse.passed and marginal.passed


def _covariance_unit(job: Tuple[CFScheme, GroupElement, int, int, int, int]) -> Dict[str, Any]:
    s, g, level, trials, seed, budget = job
    A = refine(full_level(s, 0), level)
    try:
        estimate = mc_covariance(g, A, A, trials, seed, budget)
    except CFPoissonError as e:
        return {"element": g.to_json(), "error": e.reason}
    return {"element": g.to_json(), **estimate.model_dump(mode="json")}


def run_covariance(s: CFScheme, config: ExperimentConfig) -> Outcome:
    budget = s.depth if config.budget is None else config.budget
    level = min(config.level, s.depth)
    elements = config.parsed_elements(s.group) or [
        shell(s.group, r).first() for r in config.radii if shell(s.group, r)
    ]
    jobs = [(s, g, level, config.trials, config.seed, budget) for g in elements]
    results = ordered_map(_covariance_unit, jobs, config.workers)
    rows = []
    passed = True
    for g, result in zip(elements, results):
        if "error" in result:
            passed = False
            rows.append([_norm_column(g), "", "", "", ""])
            continue
        exact = Fraction(result["exact"])
        ok = abs(result["estimate"] - float(exact)) <= (
            config.statistics.bracket_sigmas * result["stderr"] + 1e-12
        )
        result["brackets"] = ok
        passed &= ok
        rows.append([_norm_column(g), *_exact(exact), result["estimate"], result["stderr"]])
    header = ["g_norm", "exact_num", "exact_den", "mc_estimate", "stderr"]
    return {"estimates": results}, header, rows, passed


def _freeness_unit(job: Tuple[CFScheme, GroupElement, int]) -> Dict[str, Any]:
    s, g, l_max = job
    try:
        witness = freeness_witness(s, g, l_max)
    except CFPoissonError as e:
        return {"element": g.to_json(), "error": e.reason}
    result: Dict[str, Any] = witness.model_dump(mode="json")
    if witness.case == "torsion":
        domain = fundamental_domain(s, g, witness.level)
        result["fundamental_domain"] = domain.domain.model_dump()
        result["fixed_point_probability"] = fixed_point_probability(s, g, witness.level)
    return result


def run_freeness(s: CFScheme, config: ExperimentConfig) -> Outcome:
    elements = config.parsed_elements(s.group) or s.group.generators[:2]
    results = ordered_map(_freeness_unit, [(s, g, config.l_max) for g in elements], config.workers)
    rows = []
    for g, result in zip(elements, results):
        rows.append(
            [
                repr(g),
                result.get("case", ""),
                result.get("level", ""),
                result.get("shift") or "",
                *_exact(result.get("correlation")),
                " ".join(str(n) for n in result.get("invariant_levels", [])),
                result.get("error", ""),
            ]
        )
    passed = all("error" not in r for r in results)
    header = [
        "element",
        "case",
        "level",
        "shift",
        "correlation_num",
        "correlation_den",
        "invariant_levels",
        "error",
    ]
    return {"witnesses": results}, header, rows, passed


RUNNERS = {
    "build": run_build,
    "check": run_check,
    "mixing": run_mixing,
    "entropy": run_entropy,
    "sample": run_sample,
    "covariance": run_covariance,
    "freeness": run_freeness,
}


def _error_outcome(e: CFPoissonError) -> Outcome:
    return {"error": e.reason, "message": str(e)}, ["error"], [[e.reason]], False


def _write_outputs(
    command: str,
    config: ExperimentConfig,
    s: Optional[CFScheme],
    payload: Dict[str, Any],
    header: List[str],
    rows: List[List[Any]],
    passed: bool,
) -> None:
    """Write report.json and <command>.csv; the scheme is None when it could not be built"""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    group = s.group if s is not None else config.group
    report = {
        "command": command,
        "version": __version__,
        "config": config.model_dump(
            mode="json", by_alias=True, exclude={"workers", "log_level", "out"}
        ),
        "group": None if group is None else group.model_dump(),
        "depth": None if s is None else s.depth,
        "passed": passed,
        **payload,
    }
    write_json(out / "report.json", report)
    write_csv(out / f"{command}.csv", header, rows)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = load_config(args)
    except (ValidationError, CFPoissonError) as e:
        print(f"cfpoisson: invalid configuration: {e}", file=sys.stderr)
        return 2

    logging.basicConfig(
        level=config.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        s = obtain_scheme(config)
    except CFPoissonError as e:
        logger.error("%s", e)
        if e.reason != "search_exhausted":
            return 2
        _write_outputs(args.command, config, None, *_error_outcome(e))
        return 1
    except OSError as e:
        logger.error("cannot read scheme: %s", e)
        return 2

    try:
        payload, header, rows, passed = RUNNERS[args.command](s, config)
    except CFPoissonError as e:
        if e.reason in _SETUP_REASONS:
            logger.error("%s", e)
            return 2
        logger.error("%s failed: %s", args.command, e)
        payload, header, rows, passed = _error_outcome(e)

    _write_outputs(args.command, config, s, payload, header, rows, passed)
    logger.info("%s: %s", args.command, "passed" if passed else "failed")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
