"""Batch front end: instance files in, machine-readable reports out.

Every command echoes its configuration and emits a JSON report whose
payload is byte-identical across reruns for fixed (instance, config,
seed); wall-clock timings live in a separate key excluded from that
guarantee. Error classes map to stable exit codes.
"""

import argparse
import json
import sys
import time

from . import linalg as la
from .bruteforce import BruteForceBudget, brute_cvp, brute_enum, brute_svp
from .errors import (BudgetExceeded, CapExceeded, DegenerateCovariance,
                     EmptySlice, IterationBudgetExceeded, LatcoverError,
                     LineSearchFailure, MissingAnalyticData, NonCentered,
                     NotPositiveDefinite, OracleIncapable, RankDeficient,
                     RestartBudgetExceeded, SchemaError)
from .ip import FlatnessConfig, IPInstance, ip_feasible, rudelson_flatness_bound
from .lattice import LatticeBasis
from .mellip import CoverBudget, MEllipsoidConfig, build_cover, m_ellipsoid
from .sampling import RngState
from .serialize import (dump_canonical, load_instance, mat_to_json,
                        points_to_json, rational_to_str, vec_to_json)
from .solvers import EnumRequest, EnumSession, closest_vectors, lattice_enum, shortest_vectors
from .voronoi import EnumCap, InnerProduct, cvp_ellip, ellipsoid_enum, svp_ellip

EXIT_CODES = {
    SchemaError: 2,
    CapExceeded: 3,
    BudgetExceeded: 4,
    IterationBudgetExceeded: 5,
    RestartBudgetExceeded: 6,
    DegenerateCovariance: 7,
    LineSearchFailure: 8,
    MissingAnalyticData: 9,
    OracleIncapable: 10,
    RankDeficient: 11,
    NotPositiveDefinite: 12,
    NonCentered: 13,
    EmptySlice: 14,
}
EXIT_OTHER = 20


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.monotonic()
    try:
        payload = args.handler(args)
    except LatcoverError as exc:
        code = EXIT_CODES.get(type(exc), EXIT_OTHER)
        _emit({"command": args.command, "error": str(exc),
               "error_class": type(exc).__name__, "exit_code": code}, args)
        return code
    report = {
        "command": args.command,
        "config": _config_echo(args),
        "result": payload,
        "timings": {"total_seconds": round(time.monotonic() - started, 6)},
    }
    _emit(report, args)
    return 0


def _emit(report, args):
    import os
    text = dump_canonical(report)
    out = getattr(args, "out", None)
    if out and not os.path.isdir(out):
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        # --out names a fixture directory for `oracle`; report goes to stdout
        sys.stdout.write(text)


def _config_echo(args):
    skip = {"handler", "command", "out"}
    echo = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        echo[key] = value if isinstance(value, (int, float, str, bool)) else str(value)
    return echo


def _common_flags(sub, target=False, epsilon=True):
    sub.add_argument("--instance", required=True, help="instance JSON path")
    if epsilon:
        sub.add_argument("--epsilon", default="1/100", help="accuracy slack (rational)")
    sub.add_argument("--cap", type=int, default=10**6, help="enumeration point cap")
    sub.add_argument("--seed", type=int, default=None, help="rng seed for randomized paths")
    sub.add_argument("--out", default=None, help="write the report here instead of stdout")
    del target


def _build_parser():
    parser = argparse.ArgumentParser(prog="latcover",
                                     description="lattice solvers in general norms")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("svp", help="shortest vectors under the body gauge")
    _common_flags(sp)
    sp.set_defaults(handler=_cmd_svp)

    sp = subs.add_parser("cvp", help="closest vectors under the body gauge")
    _common_flags(sp)
    sp.set_defaults(handler=_cmd_cvp)

    sp = subs.add_parser("enum", help="lattice points within gauge distance d")
    _common_flags(sp)
    sp.add_argument("--distance", required=True, help="gauge distance d (rational)")
    sp.set_defaults(handler=_cmd_enum)

    sp = subs.add_parser("enum-ellipsoid", help="lattice points in E(A) + t")
    _common_flags(sp, epsilon=False)
    sp.set_defaults(handler=_cmd_enum_ellipsoid)

    sp = subs.add_parser("svp-l2", help="exact euclidean/ellipsoidal SVP")
    _common_flags(sp, epsilon=False)
    sp.set_defaults(handler=_cmd_svp_l2)

    sp = subs.add_parser("cvp-l2", help="exact euclidean/ellipsoidal CVP")
    _common_flags(sp, epsilon=False)
    sp.set_defaults(handler=_cmd_cvp_l2)

    sp = subs.add_parser("mell", help="M-ellipsoid certify loop")
    _common_flags(sp, epsilon=False)
    sp.add_argument("--certify", action="store_true", help="run the full certify loop")
    sp.add_argument("--H", type=float, default=None, help="primal covering budget H")
    sp.add_argument("--burn-in", type=int, default=None, dest="burn_in")
    sp.add_argument("--samples", type=int, default=None,
                    help="moment-estimation sample count override")
    sp.set_defaults(handler=_cmd_mell)

    sp = subs.add_parser("cover", help="build a covering of the body by an ellipsoid")
    _common_flags(sp, epsilon=False)
    sp.add_argument("--H", type=float, required=True, help="covering budget H")
    sp.set_defaults(handler=_cmd_cover)

    sp = subs.add_parser("ip", help="integer feasibility of the body over the lattice")
    _common_flags(sp, epsilon=False)
    sp.add_argument("--fbound", choices=["safe", "rudelson"], default="safe")
    sp.add_argument("--parallel", action="store_true",
                    help="accepted for compatibility; execution is sequential")
    sp.set_defaults(handler=_cmd_ip)

    sp = subs.add_parser("oracle", help="regenerate brute-force golden fixtures")
    sp.add_argument("--out", required=True, help="directory for fixture files")
    sp.set_defaults(handler=_cmd_oracle)

    return parser


def _load(args, need_body=True, need_target=False):
    lattice, body, target = load_instance(args.instance)
    if need_body and body is None:
        raise SchemaError("this command needs a body", "body")
    if need_target and target is None:
        raise SchemaError("this command needs a target", "target")
    return lattice, body, target


def _rng(args):
    return RngState(args.seed) if args.seed is not None else None


def _eps(args):
    from .serialize import rational_from_str
    return rational_from_str(args.epsilon, "epsilon")


def _solve_report_json(report):
    return {
        "points": points_to_json(report.result_set),
        "coefficients": [list(c) for c in report.result_coeffs],
        "count": len(report.result_set),
        "final_distance": rational_to_str(report.final_distance),
        "seed_distance": rational_to_str(report.seed_distance),
        "filter_threshold": rational_to_str(report.filter_threshold)
        if report.filter_threshold is not None else None,
        "enumeration_calls": report.enumeration_calls,
        "points_scanned": report.points_scanned,
    }


def _cmd_svp(args):
    lattice, body, _ = _load(args)
    report = shortest_vectors(body, lattice, _eps(args), rng=_rng(args),
                              cap=EnumCap(args.cap))
    return _solve_report_json(report)


def _cmd_cvp(args):
    lattice, body, target = _load(args, need_target=True)
    report = closest_vectors(body, lattice, target, _eps(args), rng=_rng(args),
                             cap=EnumCap(args.cap))
    return _solve_report_json(report)


def _cmd_enum(args):
    from .mellip import covering_for_body
    from .serialize import rational_from_str
    lattice, body, target = _load(args)
    center = target if target is not None else la.zeros(lattice.dimension)
    d = rational_from_str(args.distance, "distance")
    cover = covering_for_body(body, rng=_rng(args))
    req = EnumRequest(body, lattice, center, d, _eps(args))
    pts = lattice_enum(req, cover, cap=EnumCap(args.cap))
    return {"points": points_to_json(pts), "count": len(pts),
            "covering_size": cover.size}


def _cmd_enum_ellipsoid(args):
    lattice, body, target = _load(args)
    from .bodies import EllipsoidBody
    if not isinstance(body, EllipsoidBody):
        raise SchemaError("enum-ellipsoid needs an ellipsoid body", "body")
    center = target if target is not None else la.zeros(lattice.dimension)
    pts = ellipsoid_enum(lattice, body.ellipsoid.shape, center, EnumCap(args.cap))
    return {"points": points_to_json(pts), "count": len(pts)}


def _ellip_inner(body, lattice):
    from .bodies import EllipsoidBody
    if body is None:
        return None
    if not isinstance(body, EllipsoidBody):
        raise SchemaError("l2 commands take an ellipsoid body (or none)", "body")
    return InnerProduct(body.ellipsoid.shape)


def _cmd_svp_l2(args):
    lattice, body, _ = _load(args, need_body=False)
    ip = _ellip_inner(body, lattice)
    pts, min_sq = svp_ellip(lattice, ip, EnumCap(args.cap))
    return {"points": points_to_json(pts), "count": len(pts),
            "min_norm_sq": rational_to_str(min_sq)}


def _cmd_cvp_l2(args):
    lattice, body, target = _load(args, need_body=False, need_target=True)
    ip = _ellip_inner(body, lattice)
    pts, dist_sq = cvp_ellip(lattice, ip, target, EnumCap(args.cap))
    return {"points": points_to_json(pts), "count": len(pts),
            "distance_sq": rational_to_str(dist_sq)}


def _cmd_mell(args):
    _, body, _ = _load(args)
    if args.seed is None:
        raise SchemaError("mell is randomized: an explicit --seed is required", "seed")
    config = MEllipsoidConfig(moment_count=args.samples, burn_in=args.burn_in)
    if args.H is not None:
        config.h_primal = args.H
    result = m_ellipsoid(body, RngState(args.seed), config)
    return {
        "ellipsoid_shape": mat_to_json(result.ellipsoid.shape),
        "center": vec_to_json(result.center),
        "translates": points_to_json(result.covering.translates),
        "translate_count": result.covering.size,
        "dual_translate_count": result.dual_covering.size,
        "attempts": result.attempts,
        "budgets": result.budgets,
        "slack": rational_to_str(result.covering.slack),
    }


def _cmd_cover(args):
    _, body, _ = _load(args)
    hint = getattr(body, "m_ellipsoid_hint", None)
    if hint is None:
        raise SchemaError("cover needs a body with an analytic M-ellipsoid", "body")
    result = build_cover(body, hint, CoverBudget(args.H, body.dimension))
    if result.exceeded:
        return {"status": "exceeds_budget", "tiles_seen": result.tiles_seen,
                "hard_cap": result.budget.hard_cap}
    return {"status": "covering",
            "translates": points_to_json(result.covering.translates),
            "count": result.covering.size,
            "hard_cap": result.budget.hard_cap,
            "slack": rational_to_str(result.covering.slack)}


def _cmd_ip(args):
    lattice, body, _ = _load(args)
    config = FlatnessConfig()
    if args.fbound == "rudelson":
        config = FlatnessConfig(f_bound=rudelson_flatness_bound)
    result = ip_feasible(IPInstance(body, lattice), config)
    payload = {"status": result.status, "nodes": result.nodes,
               "max_depth": result.max_depth}
    if result.point is not None:
        payload["point"] = vec_to_json(result.point)
    return payload


def _cmd_oracle(args):
    """Regenerate the golden fixtures consumed by the unit tests."""
    import os
    from .bodies import EllipsoidBody, LpBall
    from .ellipsoid import Ellipsoid

    os.makedirs(args.out, exist_ok=True)
    z2 = LatticeBasis(la.identity(2))
    z3 = LatticeBasis(la.identity(3))
    skew = LatticeBasis(la.mat([[2, 1], [0, 3]]))
    hexa = EllipsoidBody(Ellipsoid(la.mat([[1, la.frac(1, 2)], [la.frac(1, 2), 1]])))
    budget = BruteForceBudget()
    fixtures = {
        "enum_z2_b2_d1": lambda: points_to_json(
            brute_enum(z2, LpBall(2, 2), la.zeros(2), la.ONE, budget)),
        "enum_z2_binf_d15": lambda: points_to_json(
            brute_enum(z2, LpBall(2, "inf"), la.zeros(2), la.frac(3, 2), budget)),
        "enum_z3_b1_d2": lambda: points_to_json(
            brute_enum(z3, LpBall(3, 1), la.zeros(3), la.frac(2), budget)),
        "svp_skew_b1": lambda: _svp_fixture(skew, LpBall(2, 1)),
        "svp_z2_hexgram": lambda: _svp_fixture(z2, hexa),
        "cvp_z2_b2_deephole": lambda: _cvp_fixture(
            z2, LpBall(2, 2), la.vec([la.frac(1, 2), la.frac(1, 2)])),
        "cvp_skew_binf": lambda: _cvp_fixture(
            skew, LpBall(2, "inf"), la.vec([la.frac(1, 3), la.frac(2, 5)])),
    }
    written = []
    for name, thunk in sorted(fixtures.items()):
        path = os.path.join(args.out, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dump_canonical({"fixture": name, "data": thunk()}))
        written.append(name)
    return {"fixtures": written, "directory": args.out}


def _svp_fixture(lattice, body):
    value, vecs = brute_svp(lattice, body)
    return {"value": rational_to_str(value), "points": points_to_json(vecs)}


def _cvp_fixture(lattice, body, target):
    value, vecs = brute_cvp(lattice, body, target)
    return {"value": rational_to_str(value), "points": points_to_json(vecs),
            "target": vec_to_json(target)}


if __name__ == "__main__":
    sys.exit(main())
