"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 an identity failed, 4 only
degenerate (inconclusive) scenarios failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Sequence

import jsonschema
import numpy as np

from . import circle, interval_bvp, lagrangian, pants, theorems
from .errors import DegenerateError, DiracError, DomainError, PreconditionError
from .potentials import MeasurePotential

EXIT_OK, EXIT_INPUT, EXIT_FAIL, EXIT_DEGENERATE = 0, 2, 3, 4

_NUM = {"type": "number"}
_NUMS = {"type": "array", "items": _NUM}
_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}}}

POTENTIAL_SCHEMA = {
    "type": "object",
    "required": ["length"],
    "properties": {
        "length": {"type": "number", "exclusiveMinimum": 0},
        "ac": {"type": "object", "required": ["kind"]},
        "jumps": {
            "type": "array",
            "items": {"type": "object", "required": ["pos", "mag"], "properties": {"pos": _NUM, "mag": _NUM}},
        },
    },
}

SYSTEM_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "required": ["lengths", "transmission"],
            "properties": {"lengths": _NUMS, "potentials": {"type": "array"}, "transmission": _MATRIX},
        },
        {"type": "object", "required": ["potential", "partition"], "properties": {"potential": POTENTIAL_SCHEMA, "partition": _NUMS}},
    ]
}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["alpha", "beta", "patch_radius", "lengths", "h0"],
    "properties": {
        "id": {"type": "string"},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "beta": {"type": "number", "exclusiveMinimum": 0},
        "patch_radius": {"type": "number", "exclusiveMinimum": 0},
        "lengths": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 4, "maxItems": 4},
        "h0": {"type": "array", "items": _NUMS, "minItems": 4, "maxItems": 4},
        "omega_outer": {
            "type": "object",
            "properties": {"kind": {"enum": ["poly", "samples"]}, "plus": _NUMS, "a": _NUMS, "b": _NUMS, "t": _NUMS},
        },
    },
}

SCENARIO_FILE_SCHEMA = {
    "oneOf": [
        SCENARIO_SCHEMA,
        {"type": "array", "items": SCENARIO_SCHEMA},
        {
            "type": "object",
            "properties": {
                "scenarios": {"type": "array", "items": SCENARIO_SCHEMA},
                "sweep": {
                    "type": "object",
                    "properties": {
                        "count": {"type": "integer", "minimum": 0},
                        "seed": {"type": "integer", "minimum": 0},
                        "theta_range": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                    },
                },
            },
            "anyOf": [{"required": ["scenarios"]}, {"required": ["sweep"]}],
        },
    ]
}

TRIPLE_SCHEMA = {"type": "object", "required": ["L0", "L1", "L2"], "properties": {k: _MATRIX for k in ("L0", "L1", "L2")}}


class InputError(Exception):
    """Malformed or missing input; maps to exit code 2."""


def _load_json(path: str, schema: dict):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise InputError(f"{path} does not match the expected schema: {exc.message}") from exc
    return doc


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % float(x)
    return str(x)


def _write_rows(args, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_scenarios(path: str) -> list[pants.PantsScenario]:
    doc = _load_json(path, SCENARIO_FILE_SCHEMA)
    if isinstance(doc, list):
        items = doc
    elif "alpha" in doc:
        items = [doc]
    else:
        items = list(doc.get("scenarios", []))
    out = []
    for i, d in enumerate(items):
        d = dict(d)
        d.setdefault("id", f"scenario-{i:04d}")
        out.append(pants.PantsScenario.from_dict(d))
    if isinstance(doc, dict) and "sweep" in doc:
        sw = doc["sweep"]
        out.extend(_random_scenarios(int(sw.get("count", 100)), int(sw.get("seed", 0)), tuple(sw.get("theta_range", (0.2, 2.9)))))
    return out


def _random_scenarios(count: int, seed: int, theta_range=(0.2, 2.9)) -> list[pants.PantsScenario]:
    rng = np.random.default_rng(seed)
    return [pants.random_scenario(rng, f"seed{seed}-{i:04d}", theta_range) for i in range(count)]


def _verify_one(job):
    sc, tol = job
    try:
        return theorems.verify_all(sc, tol=tol)
    except DiracError as exc:
        rep = theorems.VerificationReport(sc.id)
        rep.add("evaluation_error", float("nan"), 0.0, tol)
        rep.reason = str(exc)
        return rep


def _run_verification(args, scenarios: list[pants.PantsScenario]) -> int:
    jobs = [(sc, args.tol) for sc in scenarios]
    if args.jobs and args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            reports = list(ex.map(_verify_one, jobs, chunksize=max(1, len(jobs) // (4 * args.jobs))))
    else:
        reports = [_verify_one(j) for j in jobs]
    reports.sort(key=lambda rep: rep.scenario_id)
    rows = []
    for rep in reports:
        for r in rep.rows:
            rows.append((rep.scenario_id, r.identity, r.lhs, r.rhs, r.residual, r.status))
    _write_rows(args, ("scenario_id", "identity", "lhs", "rhs", "residual", "status"), rows)
    n_fail = sum(rep.failed for rep in reports)
    n_inc = sum(rep.inconclusive and not rep.failed for rep in reports)
    for rep in reports:
        if rep.reason:
            print(f"{rep.scenario_id}: inconclusive ({rep.reason})" if rep.inconclusive else
                  f"{rep.scenario_id}: {rep.reason}", file=sys.stderr)
    print(f"{len(reports)} scenarios: {len(reports) - n_fail - n_inc} passed, {n_fail} failed, "
          f"{n_inc} inconclusive", file=sys.stderr)
    if n_fail:
        return EXIT_FAIL
    if n_inc:
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_spectrum(args) -> int:
    lo, hi = args.window
    if args.kind == "circle":
        if not args.potential:
            raise InputError("--kind circle needs --potential")
        P = MeasurePotential.from_dict(_load_json(args.potential, POTENTIAL_SCHEMA))
        spec = circle.spectrum(circle.CircleOperator(P, args.scale), (lo, hi))
        _write_rows(args, ("n", "lambda"), [(n, lam) for lam, n in spec])
        return EXIT_OK
    if not args.system:
        raise InputError("--kind bvp needs --system")
    sysm = interval_bvp.IntervalSystem.from_dict(_load_json(args.system, SYSTEM_SCHEMA))
    spec = interval_bvp.bvp_spectrum(sysm, (lo, hi))
    vals = [lam for lam, k in spec for _ in range(k)]
    _write_rows(args, ("n", "lambda"), list(enumerate(vals)))
    return EXIT_OK


def cmd_eta(args) -> int:
    if args.potential:
        P = MeasurePotential.from_dict(_load_json(args.potential, POTENTIAL_SCHEMA))
        res = circle.eta_xi(circle.CircleOperator(P, args.scale))
    elif args.system:
        res = interval_bvp.bvp_eta_xi(interval_bvp.IntervalSystem.from_dict(_load_json(args.system, SYSTEM_SCHEMA)))
    else:
        raise InputError("eta needs --potential or --system")
    rho = "" if res.rho is None else res.rho
    _write_rows(args, ("rho", "eta0", "xi", "kernel_dim"), [(rho, res.eta0, res.xi, res.kernel_dim)])
    return EXIT_OK


def cmd_flow(args) -> int:
    if args.omegas:
        w0, w1 = args.omegas
    elif args.start and args.end:
        P0 = MeasurePotential.from_dict(_load_json(args.start, POTENTIAL_SCHEMA))
        P1 = MeasurePotential.from_dict(_load_json(args.end, POTENTIAL_SCHEMA))
        w0, w1 = P0.omega, P1.omega
    else:
        raise InputError("flow needs --from/--to potentials or --omegas W0 W1")
    sf = circle.spectral_flow_omega(w0, w1)
    steps = max(int(np.ceil(abs(w1 - w0) * 8)), 1) + 1
    oracle = circle.crossing_count_flow(np.linspace(w0, w1, steps + 1))
    status = "pass" if sf == oracle else "fail"
    _write_rows(args, ("omega0", "omega1", "sf_floor", "sf_crossing", "status"), [(w0, w1, sf, oracle, status)])
    return EXIT_OK if sf == oracle else EXIT_FAIL


def cmd_kashiwara(args) -> int:
    if args.scenario:
        scs = _load_scenarios(args.scenario)
        if len(scs) != 1:
            raise InputError("kashiwara --scenario expects exactly one scenario")
        sc = scs[0]
        Tp, Tm = pants.transmission_matrices(sc)
        Ls = [pants.cauchy_data_lagrangian(sc).J().graph, Tp, Tm]
    elif args.triple:
        doc = _load_json(args.triple, TRIPLE_SCHEMA)
        Ls = [interval_bvp.matrix_from_json(doc[k]) for k in ("L0", "L1", "L2")]
    else:
        raise InputError("kashiwara needs --triple or --scenario")
    if len({M.shape for M in Ls}) != 1:
        raise InputError("the three unitaries must have the same dimension")
    L0, L1, L2 = (lagrangian.HermitianLagrangian(M) for M in Ls)
    rows = [
        ("tau(L1,L0)", lagrangian.tau(L1, L0)),
        ("tau(L2,L1)", lagrangian.tau(L2, L1)),
        ("tau(L0,L2)", lagrangian.tau(L0, L2)),
        ("omega", lagrangian.kashiwara_index(L0, L1, L2)),
    ]
    _write_rows(args, ("quantity", "value"), rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    return _run_verification(args, _load_scenarios(args.scenarios))


def cmd_sweep(args) -> int:
    return _run_verification(args, _random_scenarios(args.count, args.seed, tuple(args.theta_range)))


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--out", default=d(None), help="write CSV output to this path instead of stdout")
    p.add_argument("--tol", type=float, default=d(1e-9), help="identity tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=d(0), help="seed for random sweeps")
    p.add_argument("--jobs", type=int, default=d(1), help="worker processes for verification sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirac1d", description="Spectral invariants of 1D Dirac operators")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues in a window")
    _add_globals(p, suppress=True)
    p.add_argument("--kind", choices=("circle", "bvp"), default="circle")
    p.add_argument("--potential", help="potential JSON (circle)")
    p.add_argument("--system", help="interval system JSON (bvp)")
    p.add_argument("--window", nargs=2, type=float, required=True, metavar=("LO", "HI"))
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("eta", help="eta and xi invariants")
    _add_globals(p, suppress=True)
    p.add_argument("--potential")
    p.add_argument("--system")
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("flow", help="spectral flow between two potentials")
    _add_globals(p, suppress=True)
    p.add_argument("--from", dest="start")
    p.add_argument("--to", dest="end")
    p.add_argument("--omegas", nargs=2, type=float, metavar=("W0", "W1"))
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("verify", help="verify the index identities on scenario files")
    _add_globals(p, suppress=True)
    p.add_argument("scenarios", help="scenario JSON file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("kashiwara", help="tau values and the Kashiwara index of three lagrangians")
    _add_globals(p, suppress=True)
    p.add_argument("--triple", help="JSON with unitaries L0, L1, L2")
    p.add_argument("--scenario", help="use (J Lambda_0, Gamma_+, Gamma_-) of this scenario")
    p.set_defaults(func=cmd_kashiwara)

    p = sub.add_parser("sweep", help="verify the identities on random scenarios")
    _add_globals(p, suppress=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--theta-range", nargs=2, type=float, default=(0.2, 2.9))
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, PreconditionError, KeyError, TypeError, ValueError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except DiracError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
