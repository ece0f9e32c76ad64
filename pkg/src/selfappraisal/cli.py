"""Command-line front end.

Exit codes: 0 ok, 1 scenario verdict failed, 2 invalid input,
3 assumptions unmet, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import scenarios as scen
from .certificate import bound_at, certificate_from_run, check_envelope
from .core_types import DEFAULT_TOL, new_interaction_matrix, simplex_state
from .dynamics import equilibrium_fixed, rhs
from .errors import (
    AssumptionViolated,
    InsufficientHorizon,
    InvalidParameter,
    NoConvergence,
    ConvergedToVertex,
    SelfAppraisalError,
    SimplexBlowup,
)
from .integrator import POSITIVITY_THRESHOLD, IntegratorConfig, integrate
from .switching import SwitchingSchedule, check_assumptions

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INPUT = 2
EXIT_ASSUMPTIONS = 3
EXIT_NUMERICAL = 4


class InputError(Exception):
    pass


def load_schedule(path, tol=DEFAULT_TOL):
    """Read ``{"n": int, "matrices": [...], "dwell": real | [reals]}``.

    Each matrix is either nested rows or a flat row-major list of ``n*n``
    reals. The schedule cycles through the matrices in order. Optional keys:
    ``"periodic"`` (default true) and ``"x0"``.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be an object")
    for key in ("n", "matrices", "dwell"):
        if key not in doc:
            raise InputError(f"{path}: missing required field {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or n < 2:
        raise InputError(f"{path}: n must be an integer >= 2")
    pool = []
    for i, raw in enumerate(doc["matrices"]):
        a = np.asarray(raw, dtype=float)
        if a.ndim == 1 and a.size == n * n:
            a = a.reshape(n, n)
        if a.shape != (n, n):
            raise InputError(f"{path}: matrix {i} is not {n}x{n}")
        try:
            pool.append(new_interaction_matrix(a, tol))
        except SelfAppraisalError as exc:
            raise InputError(f"{path}: matrix {i}: {exc}") from exc
    if not pool:
        raise InputError(f"{path}: no matrices given")
    dwell = doc["dwell"]
    try:
        schedule = SwitchingSchedule.cycle(pool, dwell, periodic=doc.get("periodic", True))
    except (SelfAppraisalError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    return schedule, doc.get("x0")


def parse_x0(text, n):
    if text is None:
        return None
    try:
        vals = [float(v) for v in str(text).split(",")] if isinstance(text, str) else list(text)
    except ValueError as exc:
        raise InputError(f"bad --x0: {exc}") from exc
    if len(vals) != n:
        raise InputError(f"--x0 has {len(vals)} entries, expected {n}")
    try:
        return simplex_state(vals)
    except SelfAppraisalError as exc:
        raise InputError(f"--x0: {exc}") from exc


def _fmt(v):
    return repr(float(v))


def trajectory_csv(traj, fh, cert=None):
    writer = csv.writer(fh, lineterminator="\n")
    header = ["t"] + [f"x_{i + 1}" for i in range(traj.n)] + ["h", "l", "V"]
    if cert is not None:
        header.append("bound")
    writer.writerow(header)
    V0 = traj.V[0]
    t0 = traj.schedule.t0
    for t, x, h, l, V in zip(traj.times, traj.states, traj.h, traj.l, traj.V):
        row = [_fmt(t)] + [_fmt(v) for v in x] + [_fmt(h), _fmt(l), _fmt(V)]
        if cert is not None:
            row.append(_fmt(bound_at(cert, V0, t - t0)))
        writer.writerow(row)


def read_trajectory_csv(fh):
    reader = csv.reader(fh)
    header = next(reader)
    rows = [[float(v) for v in row] for row in reader]
    return header, np.array(rows)


def _dump(obj, fh):
    json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
    fh.write("\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _finite(v):
    return v if v is None or math.isfinite(v) else str(v)


class _Output:
    """``--out`` file or stdout."""

    def __init__(self, path):
        self.path = path

    def __enter__(self):
        self.fh = open(self.path, "w", newline="") if self.path else sys.stdout
        return self.fh

    def __exit__(self, *exc):
        if self.path:
            self.fh.close()


def _summary_path(path):
    return None if path is None else path + ".summary.json"


def _config(args, horizon=None):
    return IntegratorConfig(
        horizon=horizon if horizon is not None else args.horizon,
        max_step=args.max_step,
        sample_stride=args.stride,
    )


def _try_certificate(schedule, x0, B, traj):
    """Certificate and envelope report when the assumptions hold, else ``None``s."""
    report = check_assumptions(schedule, B)
    if not report.all_hold or schedule.n < 3 or x0.nonzero_count() < 2:
        return report, None, None
    try:
        cert = certificate_from_run(schedule, x0, report.window, traj)
    except (InsufficientHorizon, InvalidParameter, AssumptionViolated):
        return report, None, None
    return report, cert, check_envelope(cert, traj)


def cmd_simulate(args):
    schedule, x0_doc = load_schedule(args.input)
    x0 = parse_x0(args.x0, schedule.n) or parse_x0(x0_doc, schedule.n)
    if x0 is None:
        x0 = simplex_state(np.full(schedule.n, 1.0 / schedule.n))
    report = check_assumptions(schedule, args.B)
    if args.require_assumptions and not report.all_hold:
        print("assumptions unmet", file=sys.stderr)
        _dump(report.as_dict(), sys.stderr)
        return EXIT_ASSUMPTIONS
    traj = integrate(schedule, x0, _config(args))
    report, cert, env = _try_certificate(schedule, x0, args.B, traj)
    summary = {
        "final_time": traj.times[-1],
        "final_state": traj.states[-1],
        "monitors": traj.monitors.as_dict(),
        "assumptions": report.as_dict(),
        "certificate": cert.as_dict() if cert else None,
        "envelope": env.as_dict() if env else None,
    }
    if env is not None:
        summary["envelope"]["empirical_rate"] = _finite(env.empirical_rate)
    if args.format == "json":
        with _Output(args.out) as fh:
            _dump(summary, fh)
        return EXIT_OK
    with _Output(args.out) as fh:
        trajectory_csv(traj, fh, cert)
    if args.out:
        with open(_summary_path(args.out), "w") as fh:
            _dump(summary, fh)
    else:
        _dump(summary, sys.stderr)
    return EXIT_OK


def cmd_certify(args):
    schedule, x0_doc = load_schedule(args.input)
    x0 = parse_x0(args.x0, schedule.n) or parse_x0(x0_doc, schedule.n)
    if x0 is None:
        raise InputError("certify needs an initial state (--x0 or \"x0\" in the input)")
    report = check_assumptions(schedule, args.B)
    if not report.all_hold:
        print("assumptions unmet; no certificate", file=sys.stderr)
        _dump(report.as_dict(), sys.stderr)
        return EXIT_ASSUMPTIONS
    m = x0.nonzero_count(POSITIVITY_THRESHOLD)
    if schedule.n < 3 or m < 2:
        raise InputError("certificate needs n >= 3 and at least two nonzero entries in x0")
    # run long enough to reach t_{(n-m)B}
    horizon = max(args.horizon, schedule.switch_time(max(1, (schedule.n - m) * report.window)))
    traj = integrate(schedule, x0, _config(args, horizon))
    cert = certificate_from_run(schedule, x0, report.window, traj)
    with _Output(args.out) as fh:
        _dump(cert.as_dict(), fh)
    return EXIT_OK


def cmd_check_assumptions(args):
    schedule, _ = load_schedule(args.input)
    report = check_assumptions(schedule, args.B)
    a1 = "holds" if report.doubly_stochastic else f"fails at matrix {report.offending_index}"
    a2 = f"holds with B={report.window}" if report.union_connected else "fails"
    print(f"assumption 1 (doubly stochastic, gamma={report.gamma}): {a1}", file=sys.stderr)
    print(f"assumption 2 (union connectivity): {a2}", file=sys.stderr)
    print(
        f"assumption 3 (dwell bounds): [{report.dwell.lower!r}, {report.dwell.upper!r}]",
        file=sys.stderr,
    )
    with _Output(args.out) as fh:
        _dump(report.as_dict(), fh)
    return EXIT_OK if report.all_hold else EXIT_ASSUMPTIONS


def cmd_scenario(args):
    factory = scen.SCENARIOS[args.name]
    kwargs = {"horizon": args.horizon}
    x0 = None
    if args.x0 is not None:
        x0 = [float(v) for v in args.x0.split(",")]
    if args.name == "doubly-stochastic":
        kwargs.update(seed=args.seed, n=args.n)
        if x0 is not None:
            raise InputError("--x0 is not supported for generated scenarios")
    else:
        if args.seed is not None and x0 is None:
            x0 = np.random.default_rng(args.seed).dirichlet(np.ones(4)).tolist()
        kwargs["x0"] = x0
    try:
        s = factory(**kwargs)
    except SelfAppraisalError as exc:
        raise InputError(str(exc)) from exc
    result = scen.run_scenario(s, _config(args))
    if args.out:
        with open(args.out, "w", newline="") as fh:
            trajectory_csv(result.trajectory, fh, result.certificate)
    summary = result.summary()
    if result.envelope is not None:
        summary["envelope"]["empirical_rate"] = _finite(result.envelope.empirical_rate)
    _dump(summary, sys.stdout)
    return EXIT_OK if result.verdict.satisfied else EXIT_VERDICT


def cmd_equilibrium(args):
    schedule, _ = load_schedule(args.input)
    if not 0 <= args.index < len(schedule.pool):
        raise InputError(f"--index {args.index} outside pool of {len(schedule.pool)}")
    C = schedule.pool[args.index]
    x0 = parse_x0(args.x0, C.n)
    x = equilibrium_fixed(C, None if x0 is None else x0.x)
    out = {"matrix_index": args.index, "equilibrium": x, "residual": float(np.abs(rhs(C, x)).max())}
    with _Output(args.out) as fh:
        _dump(out, fh)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="selfappraisal",
        description="Simulate and certify self-appraisal dynamics on switching networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, horizon=200.0):
        p.add_argument("--horizon", type=float, default=horizon, help="end time (default %(default)s)")
        p.add_argument("--max-step", type=float, default=1e-3, help="largest RK4 step (default %(default)s)")
        p.add_argument("--stride", type=int, default=None, help="record every k-th step (default: ~10 samples per dwell)")
        p.add_argument("--x0", default=None, help="initial state as comma-separated reals")
        p.add_argument("--B", type=int, default=None, help="connectivity window (default: smallest feasible)")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("simulate", help="integrate a schedule and write the trajectory CSV")
    p.add_argument("input")
    common(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--require-assumptions", action="store_true", help="exit 3 unless assumptions 1-3 hold")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("certify", help="emit the exponential rate certificate as JSON")
    p.add_argument("input")
    common(p, horizon=0.0)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("check-assumptions", help="report assumptions 1-3 for a schedule")
    p.add_argument("input")
    p.add_argument("--B", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_check_assumptions)

    p = sub.add_parser("scenario", help="run a named scenario")
    p.add_argument("name", choices=sorted(scen.SCENARIOS))
    common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n", type=int, default=4, help="size for generated scenarios")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("equilibrium", help="interior equilibrium of one fixed matrix")
    p.add_argument("input")
    p.add_argument("--index", type=int, default=0, help="pool matrix to use")
    p.add_argument("--x0", default=None, help="Newton starting point")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_equilibrium)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "scenario" and args.name == "doubly-stochastic" and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SimplexBlowup, NoConvergence, ConvergedToVertex) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except AssumptionViolated as exc:
        print(f"assumptions unmet: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTIONS
    except SelfAppraisalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
