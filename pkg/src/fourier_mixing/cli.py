"""Subcommand implementations. Each takes a validated RunConfig, writes its
report and returns the process exit code."""

import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from .config import DEFAULT_LIMITS, DEFAULT_REPLICAS, ConfigError, Limits, RunConfig
from .fourier import Distribution, fourier_transforms, parse_distribution
from .jsr import (
    MatrixSet,
    NormCertificate,
    fourier_jsr,
    matrix_to_pairs,
    transform_set,
    verify_certificate,
)
from .montecarlo import (
    EstimationPlan,
    TourInstance,
    annealing_length_estimate,
    annealing_plan,
    estimate_uniform_mean,
    exact_gibbs_average,
    plan_for_walk,
)
from .reports import CurveWriter, format_table, read_report, write_report
from .symrep import Partition, character_table
from .walks.bounds import (
    attach_exhaustive_check,
    average_tv_sandwich,
    bad_state_fraction_bound,
    class_function_bound,
    cycle_bound_curve,
)
from .walks.exact import exact_walk_distribution, simulate_walk
from .walks.spaces import HomogeneousSpace, TabloidSpace, make_space
from .walks.switched import switched_class_bound


def degree(config: RunConfig) -> int:
    if config.space == "tabloids":
        assert config.shape is not None
        n = Partition.parse(config.shape).n
        if config.n is not None and config.n != n:
            raise ConfigError(f"Shape {config.shape} is not a partition of {config.n}")
        return n
    if config.n is None:
        raise ConfigError(f"Space '{config.space}' needs a degree n")
    return config.n


def space_of(config: RunConfig) -> HomogeneousSpace:
    return make_space(config.space, degree(config), config.shape)


def distributions(config: RunConfig, n: int) -> List[Distribution]:
    specs = list(config.dists)
    if config.class_cycle is not None:
        specs.append(f"uniform_class:{config.class_cycle}")
    if not specs:
        raise ConfigError("No distribution given, use --dist or --class-cycle")
    return [parse_distribution(spec, n) for spec in specs]


def single_distribution(config: RunConfig, n: int) -> Distribution:
    qs = distributions(config, n)
    if len(qs) != 1:
        raise ConfigError(
            f"'{config.subcommand}' takes one distribution, got {len(qs)}"
        )
    return qs[0]


def emit(data: Dict[str, Any], config: RunConfig, summary: Optional[str] = None):
    """JSON to the output file with an optional summary on stdout, or the JSON
    itself on stdout when there is no output file"""
    text = write_report(data, config.output)
    if config.output is None:
        sys.stdout.write(text)
    elif summary:
        sys.stdout.write(summary + "\n")


def cmd_bounds(config: RunConfig, limits: Limits = DEFAULT_LIMITS) -> int:
    space = space_of(config)
    word = config.word_letters()
    if word is not None:
        qs = distributions(config, space.n)
        bound = switched_class_bound(qs, word, space)
        emit({"space": space.describe(), "word": word, "tv_sq_bound": bound}, config)
        return 0

    q = single_distribution(config, space.n)
    sweep = config.sweep_range()
    if sweep is not None:
        _write_curve(config, q, space, sweep, limits)
        return 0

    steps = config.walk_length
    report = average_tv_sandwich(q, space, steps, limits)
    if config.exhaustive_check:
        attach_exhaustive_check(report, q, space, limits)
    data: Dict[str, Any] = {"report": report.to_json()}
    if q.is_class_invariant():
        data["per_state_tv_sq"] = class_function_bound(q, space, steps)
    if config.alpha is not None:
        data["bad_state_count_bound"] = bad_state_fraction_bound(
            q, space, steps, config.alpha, limits
        )
    summary = format_table(
        ["shape", "multiplicity", "dim", "term"],
        [(row.shape, row.multiplicity, row.dim, row.term) for row in report.rows],
    )
    emit(data, config, summary)
    return 0


def _write_curve(
    config: RunConfig,
    q: Distribution,
    space: HomogeneousSpace,
    sweep: range,
    limits: Limits,
) -> None:
    shape = space.shape if isinstance(space, TabloidSpace) else None
    k = config.class_cycle
    if k is not None and k >= 2 and not config.dists and shape and len(shape) == 2:
        a, b = shape.parts
        points = cycle_bound_curve(space.n, a, b, k, sweep)
    elif q.is_class_invariant():
        points = [(s, class_function_bound(q, space, s)) for s in sweep]
    else:
        points = [
            (s, average_tv_sandwich(q, space, s, limits).upper_avg) for s in sweep
        ]

    target = config.output if config.output is not None else sys.stdout
    with CurveWriter(target) as writer:
        writer.write_curve(points)


def _certificate_paths(output: str, shape: str):
    base = Path(output)
    stem = base.with_suffix("")
    return (
        stem.with_name(f"{stem.name}_{shape}_certificate.json"),
        stem.with_name(f"{stem.name}_{shape}_matrices.json"),
    )


def cmd_jsr(config: RunConfig, limits: Limits = DEFAULT_LIMITS) -> int:
    space = space_of(config)
    qs = distributions(config, space.n)
    result = fourier_jsr(qs, space, config.tolerance, config.depth, limits=limits)
    if result.budget_exhausted:
        logging.warning("A search budget was exhausted; the interval may be loose")

    if config.output is not None:
        for shape, estimate in result.per_irrep.items():
            if estimate.certificate is None:
                continue
            cert_path, matrices_path = _certificate_paths(config.output, shape)
            matrices = transform_set(qs, Partition.parse(shape), limits)
            write_report(estimate.certificate.to_json(), cert_path)
            write_report(matrices.to_json(), matrices_path)

    rows = [
        (
            shape,
            f"{e.lower:.6g}",
            f"{e.upper:.6g}",
            "-" if e.certificate is None else e.certificate.degree,
        )
        for shape, e in result.per_irrep.items()
    ]
    summary = format_table(["shape", "lower", "upper", "degree"], rows)
    summary += f"\noverall [{result.lower:.6g}, {result.upper:.6g}]: "
    summary += result.verdict.value
    emit(result.to_json(), config, summary)
    return 0


def cmd_verify_cert(config: RunConfig, limits: Limits = DEFAULT_LIMITS) -> int:
    if config.certificate is None or config.matrices is None:
        raise ConfigError("verify-cert needs a certificate file and --matrices")
    certificate = NormCertificate.from_json(read_report(config.certificate))
    matrices = MatrixSet.from_json(read_report(config.matrices))
    check = verify_certificate(certificate, matrices, limits)
    summary = "passed" if check.passed else "FAILED: " + "; ".join(check.reasons)
    emit(asdict(check), config, summary)
    return 0 if check.passed else 1


def cmd_simulate(config: RunConfig, limits: Limits = DEFAULT_LIMITS) -> int:
    space = space_of(config)
    q = single_distribution(config, space.n)
    replicas = config.replicas or DEFAULT_REPLICAS
    steps = config.walk_length
    sampled = simulate_walk(
        q, space, config.start, steps, config.seed, replicas, limits
    )
    data: Dict[str, Any] = {
        "space": space.describe(),
        "N": steps,
        "M": replicas,
        "seed": config.seed,
        "start": config.start,
        "counts": {str(x): c for x, c in sampled.counts.items()},
    }
    if space.size <= limits.exhaustive_space:
        exact = exact_walk_distribution(q, space, config.start, steps, limits)
        data["tv_to_exact"] = sampled.tv_to(exact)
    emit(data, config, f"TV to exact: {data.get('tv_to_exact', 'n/a')}")
    return 0


def _estimate_annealing(config: RunConfig, limits: Limits) -> Dict[str, Any]:
    assert config.matrix is not None
    instance = TourInstance.from_csv(config.matrix)
    if config.n is not None and config.n != instance.n:
        raise ConfigError(f"{config.matrix} has {instance.n} cities, not {config.n}")
    q = single_distribution(config, instance.n)
    plan = annealing_plan(
        instance,
        config.beta,
        q,
        config.epsilon,
        config.eta,
        config.steps,
        config.tv_bound,
        limits,
    )
    samples = config.replicas or plan.samples
    estimate = annealing_length_estimate(
        instance,
        config.beta,
        q,
        plan.steps,
        samples,
        config.seed,
        config.epsilon,
        plan.tv_bound,
        config.start,
        limits,
    )
    data = estimate.to_json()
    data["eta"] = config.eta
    if instance.space.size <= limits.exhaustive_space:
        data["exact"] = exact_gibbs_average(instance, config.beta, limits)
    return data


def _estimate_point_frequency(config: RunConfig, limits: Limits) -> Dict[str, Any]:
    """Uniform probability of the start point, which is 1 / |X|"""
    space = space_of(config)
    q = single_distribution(config, space.n)
    plan = plan_for_walk(
        q,
        space,
        config.epsilon,
        config.eta,
        config.steps,
        config.tv_bound,
        limits,
    )
    if config.replicas is not None:
        plan = EstimationPlan(
            plan.epsilon, plan.eta, plan.tv_bound, plan.steps, config.replicas
        )
    start = space.point(config.start)

    def indicator(point) -> float:
        return 1.0 if tuple(point) == start else 0.0

    result = estimate_uniform_mean(
        indicator, 1.0, q, space, plan, config.seed, config.start, limits
    )
    data = result.to_json()
    data["eta"] = config.eta
    data["exact"] = 1.0 / space.size
    return data


def cmd_estimate(config: RunConfig, limits: Limits = DEFAULT_LIMITS) -> int:
    if config.matrix is not None:
        data = _estimate_annealing(config, limits)
    else:
        data = _estimate_point_frequency(config, limits)
    summary = (
        f"estimate {data['estimate']:.6g} +/- {data['radius']:.3g} "
        f"(confidence {data['confidence']:.3g}, N={data['N']}, M={data['M']})"
    )
    emit(data, config, summary)
    return 0


def cmd_fourier(config: RunConfig, limits: Limits = DEFAULT_LIMITS) -> int:
    space = space_of(config)
    q = single_distribution(config, space.n)
    multiplicities = space.multiplicities()
    transforms = fourier_transforms(q, list(multiplicities), limits)
    dumped = {}
    for lam, transform in transforms.items():
        entry: Dict[str, Any] = {
            "dim": transform.dim,
            "multiplicity": multiplicities[lam],
            "operator_norm": transform.operator_norm(),
        }
        if transform.scalar is not None:
            scalar = complex(transform.scalar)
            entry["scalar"] = [scalar.real, scalar.imag]
        else:
            assert transform.entries is not None
            entry["matrix"] = matrix_to_pairs(transform.entries)
            entry["eigenvalue_magnitudes"] = [
                float(x) for x in transform.eigenvalue_magnitudes()
            ]
        dumped[str(lam)] = entry
    emit({"space": space.describe(), "transforms": dumped}, config)
    return 0


def cmd_chars(config: RunConfig, limits: Limits = DEFAULT_LIMITS) -> int:
    if config.n is None:
        raise ConfigError("chars needs a degree n")
    table = character_table(config.n)
    data = {
        "n": table.n,
        "shapes": [str(lam) for lam in table.shapes],
        "classes": [str(c) for c in table.classes],
        "values": [[table[(lam, c)] for c in table.classes] for lam in table.shapes],
    }
    summary = format_table(
        ["shape"] + data["classes"],
        [[shape] + row for shape, row in zip(data["shapes"], data["values"])],
    )
    emit(data, config, summary)
    return 0


COMMANDS: Dict[str, Callable[[RunConfig, Limits], int]] = {
    "bounds": cmd_bounds,
    "jsr": cmd_jsr,
    "verify-cert": cmd_verify_cert,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "fourier": cmd_fourier,
    "chars": cmd_chars,
}


def run(config: RunConfig, limits: Limits = DEFAULT_LIMITS) -> int:
    logging.debug(f"Running {config.subcommand} with {config.to_dict()}")
    return COMMANDS[config.subcommand](config, limits)
