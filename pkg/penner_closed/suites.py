"""
Verification suites - builds checks and runs them on a worker pool.

All random inputs are drawn up front from one seeded generator, so the
records come out in the same order with the same values whatever order
the workers finish in.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .combinatorics import build_canonical, quad_around
from .config import Config
from .curves import (
    GENERIC,
    alpha_holonomy,
    alpha_holonomy_check,
    alpha_length,
    build_zero_locus_point,
    coincidence_case,
    fiber_equivalent,
    free_edges,
    from_l_coordinates,
    l_coordinates,
    length_from_x,
    theorem2_part_i,
)
from .errors import ConventionMismatch, FlipDegenerate, PennerError
from .lifting import (
    REGIMES,
    V,
    GeneratorWord,
    half_turn_substitution,
    hexagon_word,
    lemma3_expected,
    regime_instance,
    solve_hex,
    verify_lemma1,
    verify_lemma2,
    verify_lemma3,
    winding,
)
from .logger import banner, get_logger
from .report import CheckRecord
from .sl2core import (
    Horocycle,
    factor_uvu,
    gen_u,
    gen_v,
    gen_w,
    lambda_distance,
    lambda_geometric_oracle,
    star_triangle,
    tetrahedron_sides,
)
from .teich import (
    CoordinatePoint,
    boundary_holonomy,
    compare_points,
    decorate,
    euler_formula,
    euler_via_windings,
    is_on_chart,
    psi,
    psi_scale,
    ptolemy_flip,
    random_point,
    recover_coordinates,
    rescale_decoration,
    sample_point,
)


logger = get_logger("suites")

SCOPES = ("lemmas", "identities", "euler", "roundtrip", "ptolemy", "theorem2")
LEMMA1_VALUES = (Fraction(1, 8), Fraction(1, 2), Fraction(1), Fraction(2), Fraction(8))
THEOREM2_VALUES = (0.1, 0.25, 0.5, 0.75, 0.9)
FIBER_RATIOS = (0.5, 3.0)

# (computed, residual, passed)
Outcome = Tuple[Any, Any, bool]


class Check:
    """One deferred check."""

    def __init__(self, name: str, input: Any, expected: Any, run: Callable[[], Outcome]):
        self.name = name
        self.input = input
        self.expected = expected
        self.run = run

    def __repr__(self):
        return f"Check(name={self.name})"


class SuiteStats:
    """Statistics for a suite run."""

    def __init__(self):
        self.checks = 0
        self.passed = 0
        self.failed = 0
        self.duration_seconds = 0.0

    def __repr__(self):
        return f"SuiteStats(checks={self.checks}, passed={self.passed}, failed={self.failed})"


def rational(rng: np.random.Generator, high: int = 9) -> Fraction:
    return Fraction(int(rng.integers(1, high)), int(rng.integers(1, 5)))


def relative_gap(x, y) -> float:
    x, y = float(x), float(y)
    return abs(x - y) / max(1.0, abs(x), abs(y))


def point_discrepancy(p: CoordinatePoint, q: CoordinatePoint) -> float:
    """Largest relative f gap; infinite when the signs disagree."""
    if not compare_points(p, q, tolerance=math.inf):
        return math.inf
    return max(relative_gap(p.f[e], q.f[e]) for e in p.f)


def compose_loop_words(outer: Dict[int, Tuple[int, ...]],
                       inner: Dict[int, Tuple[int, ...]]) -> Dict[int, Tuple[int, ...]]:
    """Substitute ``inner`` words into ``outer`` (flip sequences)."""
    return {h: tuple(x for y in word for x in inner[y]) for h, word in outer.items()}


class VerificationSuite:
    """Builds the checks of each scope and runs them in parallel."""

    def __init__(self, config: Config, genus: Optional[int] = None, seed: Optional[int] = None,
                 samples: Optional[int] = None, tolerance: float = 1e-9, exact: bool = False):
        """
        Initialize suite.

        Args:
            config: Configuration object
            genus: surface genus (defaults to verify.genus)
            seed: root seed (defaults to verify.seed)
            samples: sampled points per randomized check (defaults to verify.samples)
            tolerance: relative tolerance for float comparisons
            exact: keep only the checks done in rational arithmetic
        """
        self.config = config
        self.genus = genus if genus is not None else config.verify.genus
        self.seed = seed if seed is not None else config.verify.seed
        self.samples = samples if samples is not None else config.verify.samples
        self.tolerance = tolerance
        self.exact = exact
        self.tau = build_canonical(self.genus)

    def rng(self, scope: str) -> np.random.Generator:
        """Independent stream per scope, so scopes do not shift each other's draws."""
        return np.random.default_rng([self.seed, SCOPES.index(scope) if scope in SCOPES else len(SCOPES)])

    # -- running -------------------------------------------------------------

    def run(self, scopes: Sequence[str]) -> List[CheckRecord]:
        """
        Run the given scopes.

        Args:
            scopes: scope names, or ``["all"]``

        Returns:
            Records in check order
        """
        if "all" in scopes:
            scopes = SCOPES
        checks: List[Check] = []
        for scope in scopes:
            checks.extend(getattr(self, f"{scope}_checks")())
        return self.execute(checks, title=f"Verifying {', '.join(scopes)} (genus {self.genus}, seed {self.seed})")

    def execute(self, checks: List[Check], title: str = "Running checks") -> List[CheckRecord]:
        start_time = time.time()
        stats = SuiteStats()
        stats.checks = len(checks)
        max_workers = self.config.verify.workers

        banner(logger, title)

        records: List[Optional[CheckRecord]] = [None] * len(checks)
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            future_to_index = {executor.submit(check.run): i for i, check in enumerate(checks)}

            for future in as_completed(future_to_index):
                i = future_to_index[future]
                check = checks[i]
                try:
                    computed, residual, passed = future.result()
                    records[i] = CheckRecord({
                        "name": check.name,
                        "input": check.input,
                        "expected": check.expected,
                        "computed": computed,
                        "residual": residual,
                        "pass": passed,
                    })
                except Exception as e:
                    logger.debug(f"{check.name} {check.input} raised {e!r}")
                    records[i] = CheckRecord.failure(check.name, check.input, check.expected, e)

                if records[i].passed:
                    stats.passed += 1
                else:
                    stats.failed += 1
                    logger.error(f"✗ {check.name} {check.input}: {records[i].error or records[i].computed}")

        stats.duration_seconds = time.time() - start_time

        banner(logger, "Verification complete", [
            f"Checks: {stats.checks}",
            f"Passed: {stats.passed}",
            f"Failed: {stats.failed}",
            f"Duration: {stats.duration_seconds:.1f}s",
        ])

        return records

    # -- lemmas --------------------------------------------------------------

    def lemmas_checks(self) -> List[Check]:
        rng = self.rng("lemmas")
        config = self.config
        checks = []

        def lift(fn, expected):
            def run():
                lc = fn()
                return lc.n, lc.residual, lc.n == expected
            return run

        for x in LEMMA1_VALUES:
            checks.append(Check("lemma1", {"x": x}, 1, lift(lambda x=x: verify_lemma1(x, config), 1)))

        for _ in range(20):
            triple = (rational(rng), rational(rng), rational(rng))
            checks.append(Check("lemma2", {"x": triple}, 0,
                                lift(lambda t=triple: verify_lemma2(t, config), 0)))

        for regime in REGIMES:
            for _ in range(5):
                triple = regime_instance(regime, rng)
                for eps in (1, -1):
                    expected = lemma3_expected(eps)
                    checks.append(Check("lemma3", {"x": triple, "eps": eps, "regime": regime}, expected,
                                        lift(lambda t=triple, e=eps: verify_lemma3(t, e, config), expected)))

        for x in LEMMA1_VALUES:
            def half_turn(x=x):
                replacement, _ = half_turn_substitution(x)
                return winding(GeneratorWord.of((V, x)) + replacement.inverse(), config)
            checks.append(Check("half_turn", {"x": x}, -1, lift(half_turn, -1)))

        return checks

    # -- exact identities ----------------------------------------------------

    def identities_checks(self) -> List[Check]:
        rng = self.rng("identities")
        checks = []

        for _ in range(100):
            triple = (rational(rng), rational(rng), rational(rng))

            def involution(t=triple):
                back = star_triangle(*star_triangle(*t))
                return back, 0, back == t
            checks.append(Check("star_triangle_involution", {"x": triple}, triple, involution))

        for _ in range(100):
            values = tuple(rational(rng) for _ in range(6))

            def tetrahedron(v=values):
                lhs, rhs = tetrahedron_sides(v)
                return lhs, 0, lhs == rhs
            checks.append(Check("tetrahedron", {"x": values}, "lhs == rhs", tetrahedron))

        for _ in range(100):
            triple = (rational(rng), rational(rng), rational(rng))
            eps = int(rng.choice([1, -1]))

            def hexagon(t=triple, e=eps):
                end = hexagon_word(t, solve_hex(t, e)).endpoint()
                return end.entries(), 0, end.is_scalar(e)
            checks.append(Check("solve_hex", {"x": triple, "eps": eps}, eps, hexagon))

        for _ in range(20):
            a = rational(rng)

            def w_split(a=a):
                split = gen_u(-1 / a) * gen_v(a) * gen_u(-1 / a)
                return split.entries(), 0, split == gen_w(a)
            checks.append(Check("w_decomposition", {"a": a}, "u(-1/a)v(a)u(-1/a)", w_split))

        for _ in range(20):
            xyz = (rational(rng), rational(rng), rational(rng))

            def factor(xyz=xyz):
                g = gen_u(xyz[0]) * gen_v(xyz[1]) * gen_u(xyz[2])
                got = factor_uvu(g)
                return got, 0, tuple(got) == xyz
            checks.append(Check("factor_uvu", {"xyz": xyz}, xyz, factor))

        for _ in range(0 if self.exact else 100):
            v1 = rng.normal(size=2)
            v2 = rng.normal(size=2)

            def oracle(v1=v1, v2=v2):
                h1, h2 = Horocycle(float(v1[0]), float(v1[1])), Horocycle(float(v2[0]), float(v2[1]))
                model = lambda_distance(h1, h2)
                geometric = lambda_geometric_oracle(h1.descriptor(), h2.descriptor())
                gap = relative_gap(model, geometric)
                return geometric, gap, gap <= self.tolerance * 10
            checks.append(Check("lambda_oracle", {"v1": v1.tolist(), "v2": v2.tolist()},
                                "determinant", oracle))

        return checks

    # -- Euler number --------------------------------------------------------

    def euler_checks(self, per_case: int = 5) -> List[Check]:
        rng = self.rng("euler")
        tau = self.tau
        n_tri = len(tau.triangles)
        low, high = self.config.sampler.low, self.config.sampler.high
        checks = []

        for n_minus in range(n_tri + 1):
            expected = euler_formula(self.genus, n_minus)
            for _ in range(per_case):
                negatives = sorted(int(t) for t in rng.choice(n_tri, size=n_minus, replace=False))
                point = random_point(tau, rng, negatives, low, high)

                def euler(p=point, expected=expected):
                    got = euler_via_windings(p, self.config)
                    return got, 0, got == expected
                checks.append(Check("euler", {"genus": self.genus, "n_minus": n_minus,
                                              "negatives": negatives}, expected, euler))
        return checks

    # -- chart points and round trip ----------------------------------------

    def sampled_points(self, scope: str, count: int) -> List[Tuple[int, Any]]:
        """(negative triangle, point or sampler error) for ``count`` draws."""
        rng = self.rng(scope)
        n_tri = len(self.tau.triangles)
        out = []
        for i in range(count):
            t = i % n_tri
            try:
                out.append((t, sample_point(self.tau, t, rng, self.config)))
            except PennerError as e:
                out.append((t, e))
        return out

    @staticmethod
    def _failed(name: str, t: int, error: Exception) -> Check:
        def run():
            raise error
        return Check(name, {"triangle": t}, None, run)

    def roundtrip_checks(self) -> List[Check]:
        checks = []
        psi_tol = self.config.numerics.psi_tolerance
        expected_euler = 2 - 2 * self.genus

        for t, point in self.sampled_points("roundtrip", self.samples):
            if isinstance(point, Exception):
                checks.append(self._failed("chart", t, point))
                continue

            def chart(p=point, t=t):
                residual = abs(float(psi(p.tau, t, p.f))) / psi_scale(p.tau, p.f)
                hol = boundary_holonomy(p)
                sign = hol.scalar_sign(self.tolerance)
                euler = euler_via_windings(p, self.config)
                ok = residual <= psi_tol and sign is not None and euler == expected_euler
                return {"euler": euler, "boundary_sign": sign}, residual, ok
            checks.append(Check("chart", {"triangle": t}, {"euler": expected_euler}, chart))

            def roundtrip(p=point, t=t):
                back = recover_coordinates(decorate(p))
                gap = point_discrepancy(p, back)
                ok = gap <= self.tolerance and back.negative_triangles == [t] and is_on_chart(back, psi_tol * 10)
                return {"negatives": back.negative_triangles}, gap, ok
            checks.append(Check("roundtrip", {"triangle": t}, {"negatives": [t]}, roundtrip))

        return checks

    # -- Ptolemy -------------------------------------------------------------

    def ptolemy_checks(self) -> List[Check]:
        rng = self.rng("ptolemy")
        tau = self.tau
        edges = tau.edges()
        checks = []

        sampled = [] if self.exact else self.sampled_points("ptolemy", self.samples)
        for t, point in sampled:
            if isinstance(point, Exception):
                checks.append(self._failed("ptolemy_vs_recovery", t, point))
                continue
            e = int(rng.choice(edges))

            def versus(p=point, e=e):
                moved = ptolemy_flip(p, e)
                back = recover_coordinates(decorate(p), moved.point.tau, moved.loop_words)
                gap = point_discrepancy(moved.point, back)
                return {"f_new": moved.point.f[moved.edge]}, gap, gap <= self.tolerance
            checks.append(Check("ptolemy_vs_recovery", {"triangle": t, "edge": e}, "agree", versus))

        for _ in range(self.samples):
            f = {e: rational(rng) for e in edges}
            eps = {s: int(rng.choice([1, -1])) for s in range(len(tau.triangles))}
            point = CoordinatePoint(tau, f, eps)
            e = int(rng.choice(edges))

            def double(p=point, e=e):
                try:
                    once = ptolemy_flip(p, e)
                except FlipDegenerate:
                    return "degenerate", 0, True
                twice = ptolemy_flip(once.point, e)
                same = compare_points(p, twice.point)
                return twice.point.f[e], 0, same
            checks.append(Check("double_flip", {"edge": e}, "identity", double))

        zero_rng = self.rng("theorem2")
        for edge, t in ([] if self.exact else self.zero_locus_sites()[:1]):
            rest = {k: float(np.exp(zero_rng.uniform(-0.5, 0.5))) for k in free_edges(tau, edge, t)}
            zp = build_zero_locus_point(tau, edge, t, 0.5, rest)

            def degenerate(zp=zp):
                try:
                    ptolemy_flip(zp.point, zp.edge)
                except FlipDegenerate as exc:
                    m = alpha_holonomy(zp)
                    residual = abs(float(m.c)) / max(1.0, m.norm())
                    return {"signed_sum": float(exc.signed_sum)}, residual, residual <= self.tolerance
                return "no error", None, False
            checks.append(Check("flip_degenerate", {"edge": edge, "triangle": t}, "FlipDegenerate", degenerate))

        return checks

    # -- Theorem 2 -----------------------------------------------------------

    def zero_locus_sites(self) -> List[Tuple[int, int]]:
        """(edge, top triangle) pairs with a supported quadrilateral, generic ones first."""
        sites = []
        for e in self.tau.edges():
            if not self.tau.is_flippable(e):
                continue
            quad = quad_around(self.tau, e)
            try:
                case = coincidence_case(quad)
            except ConventionMismatch:
                continue
            sites.append((case != GENERIC, e, quad.top))
        return [(e, t) for _, e, t in sorted(sites)]

    def theorem2_checks(self) -> List[Check]:
        rng = self.rng("theorem2")
        tau = self.tau
        checks = []
        sites = self.zero_locus_sites()
        by_case: Dict[str, Tuple[int, int]] = {}
        for edge, t in sites:
            by_case.setdefault(coincidence_case(quad_around(tau, edge, top=t)), (edge, t))
        chosen = list(by_case.values())

        for edge, t in chosen:
            case = coincidence_case(quad_around(tau, edge, top=t))
            for x in THEOREM2_VALUES:
                rest = {k: float(np.exp(rng.uniform(-0.5, 0.5))) for k in free_edges(tau, edge, t)}
                label = {"edge": edge, "triangle": t, "x": x, "case": case}

                def holonomy(edge=edge, t=t, x=x, rest=rest):
                    zp = build_zero_locus_point(tau, edge, t, x, rest)
                    recovered, _ = alpha_holonomy_check(zp, self.tolerance)
                    length = alpha_length(zp)
                    gap = relative_gap(length, length_from_x(x))
                    others = [zp.point.f[e] for e in tau.edges()]
                    ok = (gap <= self.tolerance and theorem2_part_i(zp)
                          and all(v > 0 for v in others))
                    return {"x": recovered, "length": length}, gap, ok
                checks.append(Check("theorem2_holonomy", label, {"length": length_from_x(x)}, holonomy))

                def inverse(edge=edge, t=t, x=x, rest=rest):
                    zp = build_zero_locus_point(tau, edge, t, x, rest)
                    back = from_l_coordinates(tau, edge, t, l_coordinates(zp))
                    gap = point_discrepancy(zp.point, back.point)
                    return float(back.x), gap, gap <= self.tolerance
                checks.append(Check("theorem2_l_coordinates", label, x, inverse))

                for ratio in FIBER_RATIOS:
                    def fiber(edge=edge, t=t, x=x, rest=rest, ratio=ratio):
                        zp = build_zero_locus_point(tau, edge, t, x, rest)
                        zq = build_zero_locus_point(tau, edge, t, x, rescale_decoration(rest, ratio))
                        result = fiber_equivalent(zp, zq, self.tolerance)
                        ok = result.equivalent and relative_gap(result.ratio, ratio) <= self.tolerance
                        return result.ratio, result.trace_gap, ok
                    checks.append(Check("theorem2_fiber", {**label, "ratio": ratio}, ratio, fiber))

        return checks

    # -- pipeline ------------------------------------------------------------

    def pipeline_checks(self, flips: Sequence[int], triangle: int = 0, exact: bool = False) -> List[Check]:
        """
        Sample, flip along ``flips``, compare both routes; then flip back.

        With ``exact`` the start point is a random rational (off-chart) point
        and only the flip-back identity is checked.
        """
        rng = self.rng("pipeline")
        tau = self.tau
        checks = []

        if exact:
            f = {e: rational(rng) for e in tau.edges()}
            eps = {s: (-1 if s == triangle else 1) for s in range(len(tau.triangles))}
            start: Any = CoordinatePoint(tau, f, eps)
        else:
            try:
                start = sample_point(tau, triangle, rng, self.config)
            except PennerError as e:
                return [self._failed("pipeline", triangle, e)]

        def forward(p: CoordinatePoint):
            words = {h: (h,) for h in range(tau.n_half_edges)}
            for e in flips:
                moved = ptolemy_flip(p, e)
                words = compose_loop_words(moved.loop_words, words)
                p = moved.point
            return p, words

        if not exact:
            def dual_route(p=start):
                end, words = forward(p)
                back = recover_coordinates(decorate(p), end.tau, words)
                gap = point_discrepancy(end, back)
                return {"flips": list(flips)}, gap, gap <= self.tolerance
            checks.append(Check("pipeline_dual_route", {"triangle": triangle, "flips": list(flips)},
                                "agree", dual_route))

        def flip_back(p=start):
            end, _ = forward(p)
            for e in reversed(flips):
                end = ptolemy_flip(end, e).point
            if exact:
                return "exact", 0, compare_points(p, end)
            gap = point_discrepancy(p, end)
            return "float", gap, gap <= self.tolerance
        checks.append(Check("pipeline_flip_back", {"triangle": triangle, "flips": list(flips), "exact": exact},
                            "identity", flip_back))
        return checks

    def pipeline(self, flips: Sequence[int], triangle: int = 0, exact: bool = False) -> List[CheckRecord]:
        return self.execute(self.pipeline_checks(flips, triangle, exact),
                            title=f"Pipeline over flips {list(flips)} (genus {self.genus}, seed {self.seed})")
