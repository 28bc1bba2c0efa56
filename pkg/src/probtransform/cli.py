"""Command-line front end: ``probtransform <subcommand> [scenario.json] [flags]``.

Data goes to standard output (JSON, or CSV for ``freq-sim``); diagnostics go
to standard error. Exit status is 0 on success, 1 when an invariant or a
numerical precondition fails, 2 for unreadable input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .errors import ProbTransformError, ScenarioError
from .frequency import convergence_study, rows_to_csv
from .interference import classify_transformation, lambda_report, superposition_rule
from .measurement import outcome_probabilities, povm_from_channel, probability
from .operators import DEFAULT_TOL
from .scenario import (
    Scenario,
    complex_from_json,
    load_scenario,
    povm_to_json,
    read_json,
    validate_dict,
    vector_from_json,
)
from .sequential import quantum_bayes_check, reversed_joint, sequential_joint
from .states import PureState

MAX_DIM = 64
DEFAULT_TRIALS = 10_000


def _plain(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.floating, float)):
        # repr of a double is its shortest exact round-trip form
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _emit(payload: Any) -> None:
    print(json.dumps(_plain(payload), indent=2, allow_nan=False))


def _load(args) -> Scenario:
    sc = load_scenario(args.scenario, tol=args.tol)
    if sc.dim > MAX_DIM:
        raise ScenarioError(f"dimension {sc.dim} exceeds the CLI limit of {MAX_DIM}")
    return sc


def cmd_validate(args) -> int:
    data = read_json(args.scenario)
    checks = validate_dict(data, tol=args.tol)
    ok = all(c.passed for c in checks)
    _emit({"ok": ok, "tol": args.tol, "checks": [c.as_dict() for c in checks]})
    for c in checks:
        if not c.passed:
            gap = "n/a" if not np.isfinite(c.gap) else f"{c.gap:.6g}"
            print(f"InvariantViolation: {c.component}: {c.check} gap {gap}", file=sys.stderr)
    return 0 if ok else 1


def cmd_probs(args) -> int:
    sc = _load(args)
    rho = sc.require_state()
    an = sc.analysis
    if "povm" in an:
        name, m = an["povm"], sc.povm(an["povm"])
    elif "channel" in an:
        name, m = an["channel"], povm_from_channel(sc.channel(an["channel"]))
    elif len(sc.povms) == 1:
        name, m = next(iter(sc.povms.items()))
    else:
        raise ScenarioError("analysis must name a 'povm' or 'channel'")
    out = {
        "povm": name,
        "probabilities": dict(zip(m.outcomes, outcome_probabilities(rho, m))),
    }
    if "subsets" in an:
        out["subsets"] = [{"subset": list(s), "probability": probability(rho, m, s)} for s in an["subsets"]]
    _emit(out)
    return 0


def cmd_sequential(args) -> int:
    sc = _load(args)
    rho = sc.require_state()
    first, second = sc.pair()
    res = sequential_joint(rho, first, second)
    bayes = quantum_bayes_check(rho, first, second)
    _emit(
        {
            "first": res.first,
            "second": res.second,
            "joint": res.joint,
            "marginal_second": res.marginal_second,
            "reversed_joint": reversed_joint(rho, first, second),
            "bayes_lhs": bayes.lhs,
            "bayes_gap": bayes.max_gap,
            "composed_povm": povm_to_json(res.composed_povm),
        }
    )
    return 0


def cmd_lambda(args) -> int:
    sc = _load(args)
    first, second = sc.pair()
    _emit(lambda_report(sc.require_state(), first, second, tol=args.tol).as_dict())
    return 0


def cmd_superpose(args) -> int:
    sc = _load(args)
    an = sc.analysis
    for key in ("phi1", "phi2", "alpha", "beta", "povm", "subset"):
        if key not in an:
            raise ScenarioError(f"superpose analysis needs {key!r}")
    phi1 = PureState(vector_from_json(an["phi1"]), tol=args.tol)
    phi2 = PureState(vector_from_json(an["phi2"]), tol=args.tol)
    d = superposition_rule(
        phi1,
        phi2,
        complex_from_json(an["alpha"]),
        complex_from_json(an["beta"]),
        sc.povm(an["povm"]),
        an["subset"],
        tol=args.tol,
    )
    _emit(
        {
            "total": d.total,
            "term1": d.term1,
            "term2": d.term2,
            "cross": d.cross,
            "cos_theta": d.cos_theta,
            "residual": d.residual,
        }
    )
    return 0


def _parse_schedule(text: str) -> list[int]:
    out = []
    for tok in text.split(","):
        v = float(tok)
        if v != int(v) or v < 1:
            raise argparse.ArgumentTypeError(f"schedule entries must be positive integers, got {tok!r}")
        out.append(int(v))
    return out


def cmd_freq_sim(args) -> int:
    sc = _load(args)
    model = sc.context_model(seed=args.seed)
    schedule = args.schedule or [args.trials]
    seeds = [args.seed + k for k in range(args.seeds)]
    study = convergence_study(model, schedule, seeds, tol=args.tol, workers=args.workers)
    sys.stdout.write(rows_to_csv(study.rows))
    limit = ", ".join("undefined" if c is None else f"{c.kind.value}" for c in study.limit_classification)
    print(
        f"limit lambda estimate {study.limit_lambda} ({limit}); exact {study.exact_lambda}",
        file=sys.stderr,
    )
    if model.kind.value == "quantum_driven":
        print("note: joint counts n_ij are synthesized bookkeeping, not observations", file=sys.stderr)
    return 0


def cmd_classify(args) -> int:
    out = []
    for v in args.values:
        c = classify_transformation(v, args.tol)
        out.append({"lambda": v, "classification": c.kind.value, "phase": c.phase, "sign": c.sign})
    _emit(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="structural tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=0, help="master RNG seed (default 0)")
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS, help="ensemble size when no schedule is given")

    parser = argparse.ArgumentParser(prog="probtransform", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_cmd(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("scenario", help="scenario JSON file")
        p.set_defaults(func=fn)
        return p

    scenario_cmd("validate", cmd_validate, "check every invariant of a scenario file")
    scenario_cmd("probs", cmd_probs, "outcome probabilities of a POVM on the state")
    scenario_cmd("sequential", cmd_sequential, "first-then-second joint statistics and the Bayes check")
    scenario_cmd("lambda", cmd_lambda, "interference coefficients per second outcome")
    scenario_cmd("superpose", cmd_superpose, "decompose a probability on a superposed state")
    fs = scenario_cmd("freq-sim", cmd_freq_sim, "frequency simulation of the scenario's model (CSV)")
    fs.add_argument("--schedule", type=_parse_schedule, default=None, help="comma-separated sizes, e.g. 1e3,1e4,1e5")
    fs.add_argument("--seeds", type=int, default=1, help="number of seeds, starting at --seed")
    fs.add_argument("--workers", type=int, default=1)

    cl = sub.add_parser("classify", parents=[common], help="classify interference coefficients")
    cl.add_argument("values", type=float, nargs="+")
    cl.set_defaults(func=cmd_classify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"ScenarioError: {exc}", file=sys.stderr)
        return 2
    except ProbTransformError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
