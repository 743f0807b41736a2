"""Command line front end.

Subcommands:
  validate   check a scenario file (and optionally a thread) against the
             exact level relations and static constraints
  state      evaluate the solenoid state on one word, optionally
             cross-checked against the quadrature oracle
  transform  apply one of the moment transforms to a thread level's measure
             and emit the resulting moment table as CSV
  suite      run a named verification suite and render a report
  report     run every check and render a report (json by default)

Exit codes: 0 success, 1 a verification failed or a constraint is violated,
2 the inputs could not be parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from .oracle import laplace_quadrature
from .scenario import (
    NonNonnegativeTheta,
    Scenario,
    SingularE,
    scenario_from_json,
    validate_scenario,
)
from .solenoid_limit import (
    IncompatibleThread,
    InvalidThread,
    SolenoidMeasureThread,
    build_thread,
    level_constants,
    psi_eval,
    thread_from_json,
    validate_thread,
)
from .subinvariance import (
    BlockParams,
    kappa_from_nu,
    mu_from_nu,
    nu_from_kappa,
    nu_from_mu,
)
from .suites import (
    SUITES,
    SuiteConfig,
    overall_pass,
    render_csv,
    render_json,
    render_text,
    run_checks,
    run_suite,
)
from .toeplitz_algebra import AlgebraElement, parse_word, state_eval
from .torus_measure import write_moment_csv

ORACLE_TOL = 1e-6

TRANSFORMS = ("nu-from-mu", "mu-from-nu", "nu-from-kappa", "kappa-from-nu")


class InputError(Exception):
    """Raised when a scenario, thread, or word cannot be parsed."""


class ConstraintViolation(Exception):
    """Raised when an input parses but violates a structural constraint."""


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _load_scenario(path: str) -> Scenario:
    try:
        return scenario_from_json(_load_json(path))
    except (NonNonnegativeTheta, SingularE) as exc:
        raise ConstraintViolation(f"scenario {path}: {exc}") from exc
    except InputError:
        raise
    except Exception as exc:
        raise InputError(f"bad scenario in {path}: {exc}") from exc


def _load_thread(scenario: Scenario, path: Optional[str]) -> SolenoidMeasureThread:
    if path is None:
        return build_thread(scenario, kind="uniform")
    try:
        return thread_from_json(_load_json(path), scenario)
    except (IncompatibleThread, InvalidThread) as exc:
        raise ConstraintViolation(f"thread {path}: {exc}") from exc
    except InputError:
        raise
    except Exception as exc:
        raise InputError(f"bad thread in {path}: {exc}") from exc


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_levels(spec: Optional[str], depth: int) -> List[int]:
    if spec is None:
        return list(range(1, depth + 1))
    out = []
    for piece in spec.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            m = int(piece)
        except ValueError as exc:
            raise InputError(f"bad level {piece!r}") from exc
        if not 1 <= m <= depth:
            raise InputError(f"level {m} outside 1..{depth}")
        out.append(m)
    if not out:
        raise InputError("empty level list")
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toruskms",
        description="verify equilibrium states over rotation-twisted occupation algebras",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, thread_default=True):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument(
            "--thread",
            default=None,
            help="thread JSON file (default: uniform measures at every level)",
        )
        p.add_argument("--seed", type=int, default=0, help="report seed (default 0)")
        p.add_argument("--out", default=None, help="write output here instead of stdout")

    p_val = sub.add_parser("validate", help="check scenario (and thread) constraints")
    common(p_val)
    p_val.add_argument(
        "--moment-box", type=int, default=5, help="box radius for thread compatibility"
    )

    p_state = sub.add_parser("state", help="evaluate the state on one word")
    common(p_state)
    p_state.add_argument(
        "--word",
        required=True,
        help='word text, e.g. "V[1] U[2] V*[1] @ 1" (lists for k or d > 1)',
    )
    p_state.add_argument(
        "--oracle",
        action="store_true",
        help="cross-check the closed form against the quadrature oracle",
    )
    p_state.add_argument(
        "--tol",
        type=float,
        default=ORACLE_TOL,
        help="oracle agreement tolerance (default 1e-6)",
    )

    p_tr = sub.add_parser("transform", help="emit a transformed moment table as CSV")
    common(p_tr)
    p_tr.add_argument("--transform", required=True, choices=TRANSFORMS)
    p_tr.add_argument("--level", type=int, default=1, help="tower level (default 1)")
    p_tr.add_argument(
        "--moment-box", type=int, default=5, help="radius of the emitted moment table"
    )

    p_suite = sub.add_parser("suite", help="run one verification suite")
    common(p_suite)
    p_suite.add_argument("--suite", required=True, choices=sorted(SUITES))
    _report_options(p_suite)

    p_rep = sub.add_parser("report", help="run every check")
    common(p_rep)
    p_rep.add_argument(
        "--levels", default=None, help="comma separated level filter for the rows"
    )
    _report_options(p_rep, default_format="json")

    return parser


def _report_options(p, default_format="text"):
    p.add_argument("--samples", type=int, default=100, help="word samples per check")
    p.add_argument(
        "--s-samples", type=int, default=50, help="continuous defect samples per level"
    )
    p.add_argument("--moment-box", type=int, default=5, help="moment box radius")
    p.add_argument(
        "--tol", type=float, default=ORACLE_TOL, help="oracle comparison tolerance"
    )
    p.add_argument(
        "--format", choices=("text", "json", "csv"), default=default_format
    )
    if not any(a.dest == "levels" for a in p._actions):
        p.add_argument(
            "--levels", default=None, help="comma separated level filter for the rows"
        )


def _cmd_validate(args) -> int:
    scenario = _load_scenario(args.scenario)
    problems = validate_scenario(scenario)
    thread = None
    if args.thread is not None:
        try:
            thread = _load_thread(scenario, args.thread)
        except InputError:
            raise
        if thread is not None:
            problems.extend(validate_thread(thread, moment_radius=args.moment_box))
    if problems:
        _emit("\n".join(problems) + "\nINVALID\n", args.out)
        return 1
    checked = "scenario satisfies" if args.thread is None else "scenario and thread satisfy"
    _emit(f"OK: {checked} all constraints\n", args.out)
    return 0


def _cmd_state(args) -> int:
    scenario = _load_scenario(args.scenario)
    thread = _load_thread(scenario, args.thread)
    try:
        word = parse_word(args.word, scenario.dims.k, scenario.dims.d)
    except Exception as exc:
        raise InputError(f"bad word {args.word!r}: {exc}") from exc
    if not 1 <= word.level <= scenario.depth:
        raise InputError(f"word level {word.level} outside 1..{scenario.depth}")
    value = psi_eval(thread, word)
    lines = [f"psi({word}) = {value.real:.17g} {value.imag:+.17g}i"]
    code = 0
    if args.oracle:
        m = word.level
        params = BlockParams.at_level(scenario, m)
        c_m = level_constants(scenario).c[m - 1]
        if word.p != word.q:
            oracle = 0j
        else:
            p = np.asarray(word.p, dtype=float)
            weight = float(np.exp(-scenario.beta * p @ params.r))
            oracle = weight * c_m * laplace_quadrature(
                thread.measure(m), params, np.asarray(word.n)
            )
        gap = abs(value - oracle)
        lines.append(f"oracle      = {oracle.real:.17g} {oracle.imag:+.17g}i")
        lines.append(f"|difference| = {gap:.3e} (tolerance {args.tol:.3e})")
        if gap > args.tol:
            lines.append("ORACLE MISMATCH")
            code = 1
    _emit("\n".join(lines) + "\n", args.out)
    return code


def _cmd_transform(args) -> int:
    scenario = _load_scenario(args.scenario)
    thread = _load_thread(scenario, args.thread)
    if not 1 <= args.level <= scenario.depth:
        raise InputError(f"level {args.level} outside 1..{scenario.depth}")
    params = BlockParams.at_level(scenario, args.level)
    base = thread.measure(args.level)
    if args.transform == "nu-from-mu":
        out = nu_from_mu(base, params, check=False)
    elif args.transform == "mu-from-nu":
        out = mu_from_nu(base, params, check=False)
    elif args.transform == "nu-from-kappa":
        out = nu_from_kappa(base, params)
    else:
        out = kappa_from_nu(base, params)
    _emit(write_moment_csv(out, args.moment_box), args.out)
    return 0


def _suite_config(args) -> SuiteConfig:
    return SuiteConfig(
        samples=args.samples,
        s_samples=args.s_samples,
        moment_box=args.moment_box,
        seed=args.seed,
        oracle_tol=args.tol,
    )


def _config_echo(args, suite_name: str) -> dict:
    return {
        "suite": suite_name,
        "scenario": args.scenario,
        "thread": args.thread,
        "seed": args.seed,
        "samples": args.samples,
        "s_samples": args.s_samples,
        "moment_box": args.moment_box,
        "oracle_tol": args.tol,
    }


def _render(rows, args, suite_name: str) -> str:
    if args.format == "json":
        return render_json(rows, _config_echo(args, suite_name))
    if args.format == "csv":
        return render_csv(rows)
    return render_text(rows)


def _filter_levels(rows, levels: Optional[List[int]]):
    if levels is None:
        return rows
    keep = set(levels)
    return [row for row in rows if row.level == 0 or row.level in keep]


def _cmd_suite(args) -> int:
    scenario = _load_scenario(args.scenario)
    thread = _load_thread(scenario, args.thread)
    cfg = _suite_config(args)
    rows = run_suite(args.suite, scenario, thread, cfg)
    rows = _filter_levels(rows, _parse_levels(args.levels, scenario.depth) if args.levels else None)
    _emit(_render(rows, args, args.suite), args.out)
    return 0 if overall_pass(rows) else 1


def _cmd_report(args) -> int:
    scenario = _load_scenario(args.scenario)
    thread = _load_thread(scenario, args.thread)
    cfg = _suite_config(args)
    rows = run_checks(SUITES["all"], scenario, thread, cfg)
    rows = _filter_levels(rows, _parse_levels(args.levels, scenario.depth) if args.levels else None)
    _emit(_render(rows, args, "all"), args.out)
    return 0 if overall_pass(rows) else 1


_COMMANDS = {
    "validate": _cmd_validate,
    "state": _cmd_state,
    "transform": _cmd_transform,
    "suite": _cmd_suite,
    "report": _cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConstraintViolation as exc:
        sys.stderr.write(f"constraint violated: {exc}\n")
        return 1
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
