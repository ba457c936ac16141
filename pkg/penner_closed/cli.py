"""
Command-line interface for penner-closed.
"""

import argparse
import json
import math
import sys
from typing import List, Optional

import numpy as np

from .combinatorics import build_canonical, quad_around
from .config import Config
from .curves import (
    ZeroLocusPoint,
    alpha_holonomy,
    alpha_holonomy_check,
    alpha_length,
    build_zero_locus_point,
    fiber_equivalent,
    free_edges,
    length_from_x,
)
from .errors import PennerError
from .logger import setup_logging
from .report import CheckRecord, RunReport
from .sl2core import gen_u, translation_length
from .suites import SCOPES, VerificationSuite, point_discrepancy, rational
from .teich import (
    CoordinatePoint,
    boundary_holonomy,
    boundary_parameter,
    compare_points,
    decorate,
    euler_formula,
    euler_via_windings,
    is_on_chart,
    load_point,
    ptolemy_flip,
    recover_coordinates,
    sample_point,
)

COMMANDS = ["gen", "sample", "verify", "flip", "euler", "zero-locus", "length",
            "fiber-check", "roundtrip", "boundary", "pipeline"]

# checks that need irrational arithmetic (roots, logarithms)
FLOAT_ONLY = {"sample", "zero-locus", "length", "fiber-check", "roundtrip"}

# verify scopes that keep rational checks under --exact
EXACT_SCOPES = {"identities", "ptolemy"}

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERRUPTED = 130


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="penner-closed",
        description="Lambda-length coordinates for closed surfaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Commands:
  gen          Write the canonical one-vertex triangulation
  sample       Sample a chart point (negative triangle --neg-triangle)
  verify       Run verification suites (--scope)
  flip         Signed Ptolemy flip of --edge, checked against the representation
  euler        Euler number by face windings vs. 1 + N_- - 2g
  zero-locus   Point with vanishing lambda-length on the flip of --edge
  length       Geodesic length of the loop crossing half-edge --edge
  fiber-check  Whether two zero-locus points lie in the same fiber
  roundtrip    Coordinates -> representation -> coordinates
  boundary     Boundary holonomy vs. the signed sum of p/q
  pipeline     Sample, flip along --edge ..., compare both routes, flip back

Examples:
  penner-closed gen --genus 2 --out tau.json
  penner-closed verify --scope all --genus 2 --samples 100 --seed 7
  penner-closed flip --edge 5 --seed 3
  penner-closed zero-locus --edge 5 --x 0.5 --save p.json
  penner-closed fiber-check p.json q.json
        """
    )

    parser.add_argument("command", choices=COMMANDS, help="Command to execute")
    parser.add_argument("files", nargs="*", help="Input files (fiber-check)")
    parser.add_argument("--config", "-c", default=None,
                        help="Path to configuration file (default: built-in defaults)")
    parser.add_argument("--genus", "-g", type=int, default=None, help="Surface genus")
    parser.add_argument("--seed", "-s", type=int, default=None, help="Root random seed")
    parser.add_argument("--samples", "-n", type=int, default=None, help="Sampled points per check")
    parser.add_argument("--tolerance", type=float, default=1e-9, help="Relative tolerance (default: 1e-9)")
    parser.add_argument("--exact", action="store_true", help="Use the exact rational backend")
    parser.add_argument("--out", "-o", default=None, help="Write output to this file instead of stdout")
    parser.add_argument("--scope", choices=list(SCOPES) + ["all"], default="all", help="verify scope")
    parser.add_argument("--neg-triangle", "-t", type=int, default=0, help="Negative triangle of sampled points")
    parser.add_argument("--edge", "-e", type=int, action="append", default=None,
                        help="Edge (or half-edge for length); repeat for pipeline flips")
    parser.add_argument("--x", type=float, default=0.5, help="Zero-locus parameter in (0, 1)")
    parser.add_argument("--scale", type=float, default=1.0, help="Scale the free zero-locus values")
    parser.add_argument("--input", "-i", default=None, help="Coordinate point JSON instead of sampling")
    parser.add_argument("--save", default=None, help="Also write the computed point to this file")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=None,
                        help="Override logging.level from the config")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = Config.load(args.config) if args.config else Config.default()
        errors = config.validate()

        if errors:
            print("Configuration errors:", file=sys.stderr)
            for error in errors:
                print(f"  - {error}", file=sys.stderr)
            return EXIT_USAGE

    except FileNotFoundError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as e:
        print(f"Failed to load configuration: {e}", file=sys.stderr)
        return EXIT_USAGE

    usage = check_usage(args, config)
    if usage:
        print(f"{parser.prog}: error: {usage}", file=sys.stderr)
        return EXIT_USAGE

    logger = setup_logging(config, args.log_level)

    try:
        return COMMAND_TABLE[args.command](args, config, logger)
    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return EXIT_INTERRUPTED
    except (PennerError, OSError, ValueError) as e:
        logger.error(f"Command failed: {e}", exc_info=True)
        return EXIT_FAILED


def check_usage(args, config: Config) -> Optional[str]:
    """Flag combinations argparse cannot express; returns a message or None."""
    genus = args.genus if args.genus is not None else config.verify.genus
    if genus < 2:
        return "--genus must be at least 2"
    if args.samples is not None and args.samples < 1:
        return "--samples must be at least 1"
    if args.tolerance <= 0:
        return "--tolerance must be positive"
    if args.exact and args.command in FLOAT_ONLY:
        return f"{args.command} needs irrational arithmetic and has no --exact mode"
    if args.exact and args.command == "verify" and args.scope not in EXACT_SCOPES:
        return f"verify --exact needs --scope in {sorted(EXACT_SCOPES)}"
    if args.command in ("flip", "zero-locus", "length") and not args.edge:
        return f"{args.command} requires --edge"
    if args.command == "fiber-check" and len(args.files) != 2:
        return "fiber-check takes exactly two files"
    if args.command == "zero-locus" and not 0 < args.x < 1:
        return "--x must lie in (0, 1)"
    if args.scale <= 0:
        return "--scale must be positive"
    if not 0 <= args.neg_triangle < 4 * genus - 2:
        return f"--neg-triangle must lie in [0, {4 * genus - 2})"
    n_half = 3 * (4 * genus - 2)
    if args.edge and any(not 0 <= e < n_half for e in args.edge):
        return f"--edge must lie in [0, {n_half})"
    return None


# -- helpers -------------------------------------------------------------------

def _genus(args, config) -> int:
    return args.genus if args.genus is not None else config.verify.genus


def _seed(args, config) -> int:
    return args.seed if args.seed is not None else config.verify.seed


def _point(args, config, rng: np.random.Generator) -> CoordinatePoint:
    """--input file, or a fresh sample on the canonical triangulation."""
    if args.input:
        return load_point(args.input)
    return sample_point(build_canonical(_genus(args, config)), args.neg_triangle, rng, config)


def _rational_point(args, config, rng: np.random.Generator) -> CoordinatePoint:
    """Random exact point with --neg-triangle as its only negative triangle."""
    tau = build_canonical(_genus(args, config))
    eps = {s: (-1 if s == args.neg_triangle else 1) for s in range(len(tau.triangles))}
    return CoordinatePoint(tau, {e: rational(rng) for e in tau.edges()}, eps)


def _emit_json(args, data) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, 'w') as f:
            f.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _finish(args, config, logger, report: RunReport) -> int:
    """Write the report and turn it into an exit code."""
    if args.out:
        report.save(args.out)
    else:
        report.write_stream(sys.stdout)

    failures = report.failures
    logger.info(f"{len(report.records)} checks, {len(failures)} failed")
    for record in failures:
        logger.warning(f"  failed: {record.name} {record.input} {record.error}")
    return EXIT_OK if report.passed else EXIT_FAILED


def _record(name: str, input, expected, fn) -> CheckRecord:
    """Run one check; library errors become a failed record."""
    try:
        computed, residual, passed = fn()
    except PennerError as e:
        return CheckRecord.failure(name, input, expected, e)
    return CheckRecord({"name": name, "input": input, "expected": expected,
                        "computed": computed, "residual": residual, "pass": passed})


# -- commands ------------------------------------------------------------------

def execute_gen(args, config, logger) -> int:
    tau = build_canonical(_genus(args, config))
    logger.info(f"Canonical triangulation: {tau}")
    _emit_json(args, tau.to_dict())
    return EXIT_OK


def execute_sample(args, config, logger) -> int:
    rng = np.random.default_rng(_seed(args, config))
    point = sample_point(build_canonical(_genus(args, config)), args.neg_triangle, rng, config)
    logger.info(f"Sampled chart point at triangle {args.neg_triangle} (on chart: {is_on_chart(point)})")
    _emit_json(args, point.to_dict())
    return EXIT_OK


def execute_verify(args, config, logger) -> int:
    suite = VerificationSuite(config, _genus(args, config), _seed(args, config), args.samples, args.tolerance,
                              exact=args.exact)
    command = ["verify", "--scope", args.scope] + (["--exact"] if args.exact else [])
    report = RunReport(command, suite.seed)
    report.extend(suite.run([args.scope]))
    return _finish(args, config, logger, report)


def execute_flip(args, config, logger) -> int:
    seed = _seed(args, config)
    rng = np.random.default_rng(seed)
    report = RunReport(["flip", "--edge", str(args.edge[0])], seed)
    edge = args.edge[0]

    if args.exact:
        point = _rational_point(args, config, rng)

        def twice():
            once = ptolemy_flip(point, edge)
            back = ptolemy_flip(once.point, edge).point
            computed = {"f_new": once.point.f[once.edge], "gamma": once.gamma, "delta": once.delta}
            return computed, 0, compare_points(point, back)
        report.add(_record("double_flip", {"edge": edge}, "identity", twice))
        return _finish(args, config, logger, report)

    point = _point(args, config, rng)

    def versus():
        moved = ptolemy_flip(point, edge)
        if args.save:
            with open(args.save, 'w') as f:
                json.dump(moved.point.to_dict(), f, indent=2)
        back = recover_coordinates(decorate(point), moved.point.tau, moved.loop_words)
        gap = point_discrepancy(moved.point, back)
        computed = {"f_new": moved.point.f[moved.edge], "gamma": moved.gamma, "delta": moved.delta}
        return computed, gap, gap <= args.tolerance
    report.add(_record("ptolemy_vs_recovery", {"edge": edge}, "agree", versus))
    return _finish(args, config, logger, report)


def execute_euler(args, config, logger) -> int:
    seed = _seed(args, config)
    rng = np.random.default_rng(seed)
    report = RunReport(["euler"], seed)
    if args.exact and args.input is None:
        point = _rational_point(args, config, rng)
    else:
        point = _point(args, config, rng)
    expected = euler_formula(point.tau.genus, point.n_minus)

    def euler():
        got = euler_via_windings(point, config)
        return got, 0, got == expected
    report.add(_record("euler", {"n_minus": point.n_minus}, expected, euler))
    return _finish(args, config, logger, report)


def execute_zero_locus(args, config, logger) -> int:
    seed = _seed(args, config)
    rng = np.random.default_rng(seed)
    tau = build_canonical(_genus(args, config))
    edge = args.edge[0]
    report = RunReport(["zero-locus", "--edge", str(edge), "--x", str(args.x)], seed)

    def construct():
        top = quad_around(tau, edge).top
        rest = {k: args.scale * float(np.exp(rng.uniform(-0.5, 0.5))) for k in free_edges(tau, edge, top)}
        zp = build_zero_locus_point(tau, edge, top, args.x, rest)
        if args.save:
            zp.save(args.save)
        recovered, _ = alpha_holonomy_check(zp, args.tolerance)
        m = alpha_holonomy(zp)
        length = alpha_length(zp)
        gap = abs(length - length_from_x(args.x)) / length
        computed = {"x": recovered, "length": length, "trace": float(m.trace()),
                    "case": zp.case, "triangle": top}
        return computed, gap, gap <= args.tolerance
    report.add(_record("zero_locus", {"edge": edge, "x": args.x}, {"length": length_from_x(args.x)}, construct))
    return _finish(args, config, logger, report)


def execute_length(args, config, logger) -> int:
    seed = _seed(args, config)
    rng = np.random.default_rng(seed)
    report = RunReport(["length", "--edge", str(args.edge[0])], seed)
    point = _point(args, config, rng)
    rep = decorate(point)

    for h in args.edge:
        def length(h=h):
            m = rep.edge_holonomy(h)
            ell = translation_length(m)
            gap = abs(abs(float(m.trace())) - 2 * math.cosh(ell / 2)) / abs(float(m.trace()))
            return {"length": ell, "trace": float(m.trace())}, gap, gap <= args.tolerance
        report.add(_record("length", {"half_edge": h}, "|tr| = 2 cosh(l/2)", length))
    return _finish(args, config, logger, report)


def execute_fiber_check(args, config, logger) -> int:
    report = RunReport(["fiber-check"] + list(args.files), None)
    p, q = (ZeroLocusPoint.load(path) for path in args.files)

    def fiber():
        result = fiber_equivalent(p, q, args.tolerance)
        return {"equivalent": result.equivalent, "ratio": result.ratio}, result.trace_gap, result.equivalent
    report.add(_record("fiber_check", {"files": list(args.files)}, "proportional", fiber))
    return _finish(args, config, logger, report)


def execute_roundtrip(args, config, logger) -> int:
    if args.input is None:
        suite = VerificationSuite(config, _genus(args, config), _seed(args, config), args.samples, args.tolerance)
        report = RunReport(["roundtrip"], suite.seed)
        report.extend(suite.run(["roundtrip"]))
        return _finish(args, config, logger, report)

    report = RunReport(["roundtrip", "--input", args.input], None)
    point = load_point(args.input)

    def roundtrip():
        back = recover_coordinates(decorate(point))
        gap = point_discrepancy(point, back)
        return {"negatives": back.negative_triangles}, gap, gap <= args.tolerance
    report.add(_record("roundtrip", {"input": args.input}, {"negatives": point.negative_triangles}, roundtrip))
    return _finish(args, config, logger, report)


def execute_boundary(args, config, logger) -> int:
    seed = _seed(args, config)
    rng = np.random.default_rng(seed)
    report = RunReport(["boundary"], seed)
    if args.exact and args.input is None:
        point = _rational_point(args, config, rng)
    else:
        point = _point(args, config, rng)

    def boundary():
        hol = boundary_holonomy(point)
        expected = gen_u(boundary_parameter(point))
        if point.is_exact():
            return hol.to_json(), 0, hol == expected
        gap = max(abs(float(x) - float(y)) for x, y in zip(hol.entries(), expected.entries()))
        return {"holonomy": hol.to_json(), "identity": hol.scalar_sign(args.tolerance) is not None}, \
            gap, gap <= args.tolerance * max(1.0, expected.norm())
    report.add(_record("boundary", {"n_minus": point.n_minus}, "u(sum eps p/q)", boundary))
    return _finish(args, config, logger, report)


def execute_pipeline(args, config, logger) -> int:
    suite = VerificationSuite(config, _genus(args, config), _seed(args, config), args.samples, args.tolerance)
    flips = list(args.edge or [])
    report = RunReport(["pipeline"] + [f"--edge={e}" for e in flips], suite.seed)
    report.extend(suite.pipeline(flips, args.neg_triangle, args.exact))
    return _finish(args, config, logger, report)


COMMAND_TABLE = {
    "gen": execute_gen,
    "sample": execute_sample,
    "verify": execute_verify,
    "flip": execute_flip,
    "euler": execute_euler,
    "zero-locus": execute_zero_locus,
    "length": execute_length,
    "fiber-check": execute_fiber_check,
    "roundtrip": execute_roundtrip,
    "boundary": execute_boundary,
    "pipeline": execute_pipeline,
}


if __name__ == "__main__":
    sys.exit(main())
