"""Command-line entry point: ``riscover {sweep,optimize,validate,oracle,selftest-special}``.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
failure (NaN results or a degenerate zero-variance channel).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, replace

from . import presets
from .channel import link_budget, linear_to_db
from .config import SCHEMES, ConfigError, ExperimentConfig, validate_config
from .coverage import DofVariant, coverage_pair, mean_from_budget, variance_from_budget
from .experiments import SweepSpec, SweepValidationError, emit_csv, run_sweep
from .geometry import nearest_slot
from .montecarlo import empirical_channel_moments, empirical_coverage
from .optimizer import (alignment_from_budget, coverage_objective, exhaustive_search_budget,
                        initial_phases, local_search_budget, objective_value, quantize,
                        random_phases)

log = logging.getLogger("riscover")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


def _load(args) -> ExperimentConfig:
    ec = validate_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        changes["oracle_trials"] = args.trials
    if getattr(args, "slot", None) is not None:
        changes["slot"] = args.slot
    if getattr(args, "variance", None):
        changes["variance_model"] = args.variance
    if getattr(args, "bits", None) is not None:
        changes["optimizer"] = replace(ec.optimizer, bits=args.bits)
    return replace(ec, **changes)


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _schemes(text: str) -> tuple[str, ...]:
    items = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in items if s not in SCHEMES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown scheme(s) {bad}; choose from {list(SCHEMES)}")
    return items


def cmd_validate(args) -> int:
    ec = _load(args)
    out = {
        "scenario": asdict(ec.scenario),
        "channel": asdict(ec.channel),
        "coverage": {"power_w": ec.query.power_w, "noise_w": ec.query.noise_w,
                     "noise_dbm": linear_to_db(ec.query.noise_w) + 30.0,
                     "snr_threshold": ec.query.snr_threshold,
                     "dof": ec.query.dof_variant.value},
        "optimizer": asdict(ec.optimizer),
        "oracle": {"trials": ec.oracle_trials, "seed": ec.seed},
        "analysis": {"slot": ec.slot, "variance_model": ec.variance_model},
        "sweep": asdict(ec.sweep),
    }
    print(json.dumps(out, indent=2, default=str))
    return EXIT_OK


def cmd_sweep(args) -> int:
    ec = _load(args)
    overrides = dict(kind=args.kind, start=args.start, stop=args.stop, step=args.step,
                     schemes=args.scheme, dof=args.dof)
    if args.preset:
        spec = presets.preset(args.preset, ec)
        spec = replace(spec, **{k: v for k, v in overrides.items() if v is not None})
    else:
        spec = SweepSpec.from_config(ec, **overrides)
    records = run_sweep(spec, workers=args.workers)
    emit_csv(records, args.out, timing=args.timing)
    log.info("wrote %d records to %s", len(records), args.out)
    if any(r.has_nan() for r in records):
        log.error("NaN in sweep output")
        return EXIT_NUMERIC
    if any(r.degenerate for r in records):
        log.error("degenerate (zero-variance) channel at %d point(s)",
                  sum(r.degenerate for r in records))
        return EXIT_NUMERIC
    return EXIT_OK


def _optimize_one(ec, args, budget, warm=None):
    b = ec.optimizer.bits
    objective = coverage_objective(budget, ec.query, ec.variance_model) \
        if ec.optimizer.objective == "coverage" else None
    if args.method == "local_search":
        init = warm if warm is not None else initial_phases(budget, b, ec.optimizer.init, ec.seed)
        return local_search_budget(budget, b, init, objective, converge=ec.optimizer.converge,
                                   order=ec.optimizer.order, seed=ec.seed)
    if args.method == "exhaustive":
        return exhaustive_search_budget(budget, b, objective)
    if args.method == "random":
        return random_phases(b, budget.num_elements, ec.seed)
    return quantize(alignment_from_budget(budget), b)


def _slots(args, ec) -> list[int]:
    if args.slots:
        lo, _, hi = args.slots.partition(":")
        return list(range(int(lo), int(hi or int(lo) + 1)))
    return [ec.slot if ec.slot is not None else nearest_slot(ec.scenario)]


def cmd_optimize(args) -> int:
    ec = _load(args)
    warm = None
    for slot in _slots(args, ec):
        if not 0 <= slot < ec.scenario.num_slots:
            raise ConfigError([f"slot: {slot} outside [0, {ec.scenario.num_slots})"])
        budget = link_budget(ec.scenario, ec.channel, slot)
        phases = _optimize_one(ec, args, budget, warm if args.warm_start else None)
        warm = phases
        mu = mean_from_budget(budget, phases.values)
        var = variance_from_budget(budget, ec.variance_model)
        row = {
            "slot": slot,
            "method": args.method,
            "bits": phases.bits,
            "phase_indices": phases.indices.tolist(),
            "objective_mean_power": objective_value(budget, phases),
            "pcov_nu1": coverage_pair(abs(mu) ** 2, var, ec.query, DofVariant.PAPER_NU1)[0],
            "pcov_nu2": coverage_pair(abs(mu) ** 2, var, ec.query, DofVariant.COMPLEX_NU2)[0],
        }
        print(json.dumps(row))
    return EXIT_OK


def cmd_oracle(args) -> int:
    ec = _load(args)
    cfg, params, q = ec.scenario, ec.channel, ec.query
    slot = ec.slot if ec.slot is not None else nearest_slot(cfg)
    budget = link_budget(cfg, params, slot)
    phases = local_search_budget(budget, ec.optimizer.bits)
    mu = mean_from_budget(budget, phases.values)
    trials = ec.oracle_trials or 100_000
    est = empirical_coverage(cfg, params, slot, phases, q, trials, ec.seed, workers=args.workers)
    row = {"slot": slot, "trials": trials, "seed": ec.seed,
           "pcov_mc": est.value, "mc_stderr": est.stderr}
    for model in ("cascaded", "exact"):
        var = variance_from_budget(budget, model)
        for dof in DofVariant:
            p = coverage_pair(abs(mu) ** 2, var, q, dof)[0]
            row[f"pcov_{dof.value}_{model}"] = p
            row[f"z_{dof.value}_{model}"] = (p - est.value) / est.stderr if est.stderr else None
    if args.moments:
        mom = empirical_channel_moments(cfg, params, slot, phases, max(trials, 10_000), ec.seed,
                                        workers=args.workers)
        row.update(mean_mc=[mom.mean.real, mom.mean.imag], mean_stderr=mom.mean_stderr,
                   mean_closed=[mu.real, mu.imag], variance_mc=mom.variance,
                   variance_stderr=mom.variance_stderr,
                   variance_cascaded=variance_from_budget(budget, "cascaded"),
                   variance_exact=variance_from_budget(budget, "exact"))
    print(json.dumps(row, indent=2))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import TOLERANCES, run_corpus

    errors = run_corpus(points=args.points)
    ok = True
    for name, err in errors.items():
        passed = err <= TOLERANCES[name]
        ok &= passed
        print(f"{name:36s} max_err={err:.3e}  tol={TOLERANCES[name]:.0e}  "
              f"{'PASS' if passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riscover", epilog=__doc__.split("\n\n")[1],
        description="RIS-assisted rail coverage: closed forms, phase search and Monte Carlo.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="{validate,sweep,optimize,oracle}")

    def common(p, oracle=True):
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--seed", type=_seed, help="master seed (u64)")
        p.add_argument("--slot", type=int, help="evaluation slot (default: nearest the BS foot)")
        p.add_argument("--bits", type=int, help="phase quantization bits")
        p.add_argument("--variance", choices=("cascaded", "exact"),
                       help="variance model of the closed forms")
        if oracle:
            p.add_argument("--trials", type=int, help="Monte Carlo trials (0 disables)")
            p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("validate", help="check a configuration and print it resolved")
    common(p, oracle=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    common(p)
    p.add_argument("--preset", choices=presets.PRESETS)
    p.add_argument("--kind", choices=("power", "threshold", "bs_ris_distance", "elements", "bits"))
    p.add_argument("--from", dest="start", type=float)
    p.add_argument("--to", dest="stop", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--scheme", type=_schemes, help="comma-separated schemes")
    p.add_argument("--dof", choices=("nu1", "nu2", "both"), default="both")
    p.add_argument("--timing", action="store_true", help="fill the wall_ms column")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="optimize RIS phases at one or more slots")
    common(p, oracle=False)
    p.add_argument("--method", choices=("local_search", "exhaustive", "random", "alignment"),
                   default="local_search")
    p.add_argument("--slots", help="slot range A:B (half-open)")
    p.add_argument("--warm-start", action="store_true",
                   help="start each slot from the previous slot's solution")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("oracle", help="closed forms against Monte Carlo at one point")
    common(p)
    p.add_argument("--moments", action="store_true", help="also compare channel moments")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("selftest-special")  # hidden: no help entry, not in metavar
    p.add_argument("--points", type=int, default=10_000)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, SweepValidationError) as exc:
        for err in exc.errors:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
