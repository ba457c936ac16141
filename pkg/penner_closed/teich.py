"""
Decorated representations built from lambda-lengths and triangle signs.

A coordinate point (tau, f, eps) assigns a positive lambda-length to every
edge and a sign to every triangle.  Transports on the truncated complex
are w(f(e)) on long edges and u(t * a / (b c)) on short edges, where a is
the side opposite the short edge and t the sign of its triangle.
Holonomies are composed left to right along paths based at P(0), and the
decoration is the horocycle (1, 0) at infinity.
"""

import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .combinatorics import (
    LONG,
    EdgeWord,
    Step,
    Triangulation,
    edge_loop_word,
    flip,
    match_triangles,
    quad_around,
)
from .config import Config
from .errors import (
    DomainError,
    EdgeDegenerate,
    FlipDegenerate,
    NotALoop,
    SamplerFailed,
    TriangulationError,
)
from .lifting import U, V, GeneratorWord, lemma1_word, winding
from .logger import get_logger
from .sl2core import (
    BASE_HOROCYCLE,
    Horocycle,
    Mat2,
    ProjMat,
    apply,
    gen_u,
    gen_w,
    is_exact,
    lambda_distance,
    product,
    promote,
)

logger = get_logger("teich")


@dataclass(frozen=True)
class CoordinatePoint:
    """
    Edge lambda-lengths ``f`` (keyed by edge id) and triangle signs ``eps``.

    Chart membership (one negative triangle with vanishing psi there) is
    checked by ``is_on_chart`` and not forced here.
    """
    tau: Triangulation
    f: Dict[int, object]
    eps: Dict[int, int]

    def __post_init__(self):
        edges = self.tau.edges()
        if sorted(self.f) != edges:
            raise DomainError(f"f must give a value for every edge {edges}")
        if sorted(self.eps) != list(range(len(self.tau.triangles))):
            raise DomainError("eps must give a sign for every triangle")
        for e, v in self.f.items():
            if v <= 0:
                raise DomainError(f"lambda-length of edge {e} must be positive, got {v}")
        for t, s in self.eps.items():
            if s not in (1, -1):
                raise DomainError(f"sign of triangle {t} must be +1 or -1, got {s}")

    def value(self, h: int):
        """lambda-length of the edge carrying half-edge h."""
        return self.f[self.tau.edge_of(h)]

    @property
    def negative_triangles(self) -> List[int]:
        return [t for t in sorted(self.eps) if self.eps[t] < 0]

    @property
    def n_minus(self) -> int:
        return len(self.negative_triangles)

    def is_exact(self) -> bool:
        return all(is_exact(v) for v in self.f.values())

    def to_dict(self) -> Dict:
        return {
            "triangulation": self.tau.to_dict(),
            "f": {str(e): float(v) for e, v in sorted(self.f.items())},
            "eps": {str(t): int(s) for t, s in sorted(self.eps.items())},
        }

    @staticmethod
    def from_dict(data: Mapping, base_dir: str = ".") -> 'CoordinatePoint':
        """
        Parse the JSON coordinate format.

        ``triangulation`` is either an inline triangulation object or a path
        to a triangulation JSON file (relative to ``base_dir``).
        """
        try:
            tri = data["triangulation"]
            f = {int(e): float(v) for e, v in data["f"].items()}
            eps = {int(t): int(s) for t, s in data["eps"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise DomainError(f"malformed coordinate point: {e}") from e

        if isinstance(tri, str):
            tau = Triangulation.load(os.path.join(base_dir, tri))
        elif isinstance(tri, Mapping):
            tau = Triangulation.from_dict(tri)
        else:
            raise TriangulationError("well-formed JSON triangulation", "expected object or path")
        return CoordinatePoint(tau, f, eps)


def dump_point(point: CoordinatePoint, path: str) -> None:
    with open(path, 'w') as fh:
        json.dump(point.to_dict(), fh, indent=2)


def load_point(path: str) -> CoordinatePoint:
    with open(path, 'r') as fh:
        data = json.load(fh)
    return CoordinatePoint.from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


# -- psi ---------------------------------------------------------------------

def triangle_term(tau: Triangulation, t: int, f: Mapping[int, object]):
    """p_t / q_t = (a^2 + b^2 + c^2) / (a b c), sides with multiplicity."""
    a, b, c = (promote(f[e]) for e in tau.triangle_edges(t))
    return (a * a + b * b + c * c) / (a * b * c)


def psi(tau: Triangulation, t: int, f: Mapping[int, object]):
    """psi_{tau,t}(f) = -p_t/q_t + sum over the other triangles of p_s/q_s."""
    terms = [triangle_term(tau, s, f) for s in range(len(tau.triangles))]
    return sum(terms) - 2 * terms[t]


def psi_scale(tau: Triangulation, f: Mapping[int, object]) -> float:
    """Sum of |p_s/q_s|, the norm against which psi is compared to zero."""
    return float(sum(triangle_term(tau, s, f) for s in range(len(tau.triangles))))


def psi_total(tau: Triangulation, f: Mapping[int, object]):
    """Product of psi_{tau,t} over all triangles; its zero set is the union of the charts."""
    result = promote(1)
    for t in range(len(tau.triangles)):
        result = result * psi(tau, t, f)
    return result


def chart_triangle(tau: Triangulation, f: Mapping[int, object],
                   tolerance: float = 1e-10) -> Optional[int]:
    """The triangle t with psi_{tau,t}(f) = 0, or None. At most one exists."""
    scale = psi_scale(tau, f)
    for t in range(len(tau.triangles)):
        value = psi(tau, t, f)
        if (is_exact(value) and value == 0) or abs(float(value)) <= tolerance * scale:
            return t
    return None


def is_on_chart(point: CoordinatePoint, tolerance: float = 1e-10) -> bool:
    """One negative triangle, and psi vanishes there."""
    negatives = point.negative_triangles
    if len(negatives) != 1:
        return False
    return chart_triangle(point.tau, point.f, tolerance) == negatives[0]


def boundary_parameter(point: CoordinatePoint):
    """sum over triangles of eps_t * p_t / q_t."""
    tau = point.tau
    return sum(point.eps[t] * triangle_term(tau, t, point.f) for t in range(len(tau.triangles)))


# -- transports --------------------------------------------------------------

@dataclass(frozen=True)
class TransportAssignment:
    """
    Matrices on the truncated complex.

    ``long`` is keyed by edge id (the same matrix is used in both
    directions, w(e) being an involution in PSL(2,R)); ``short`` holds the
    parameter of u on short edge k, traversed P(k) -> P(rot(k)).
    """
    tau: Triangulation
    long: Dict[int, Mat2]
    short: Dict[int, object]

    def short_matrix(self, k: int, forward: bool = True) -> Mat2:
        x = self.short[k]
        return gen_u(x if forward else -x)

    def step_matrix(self, step: Step) -> Mat2:
        if step.kind == LONG:
            return self.long[step.index]
        return self.short_matrix(step.index, step.forward)

    def compose(self, word: EdgeWord) -> Mat2:
        """Holonomy along a path, left to right."""
        exact = all(is_exact(m.a) for m in self.long.values())
        return product([self.step_matrix(s) for s in word.steps], exact=exact)

    def projective(self, word: EdgeWord, tolerance: float = 1e-9) -> ProjMat:
        return ProjMat(self.compose(word), tolerance)

    def face_relator(self, t: int, clockwise: bool = False) -> Mat2:
        """
        Product of transports around the hexagon of triangle t.

        Read counterclockwise from long h0 the relator is eps_t * identity;
        read clockwise (w(h0) u(.) w(h2) u(.) w(h1) u(.)) it is -eps_t.
        """
        h0, h1, h2 = self.tau.triangles[t]
        w = {h: self.long[self.tau.edge_of(h)] for h in (h0, h1, h2)}
        if clockwise:
            seq = [w[h0], self.short_matrix(h0), w[h2], self.short_matrix(h2),
                   w[h1], self.short_matrix(h1)]
        else:
            seq = [w[h0], self.short_matrix(h1, False), w[h1], self.short_matrix(h2, False),
                   w[h2], self.short_matrix(h0, False)]
        return product(seq, exact=is_exact(seq[0].b))


def short_parameter(point: CoordinatePoint, k: int):
    """t * a / (b c) for short edge k: a opposite, b and c the adjacent sides."""
    tau = point.tau
    a = promote(point.value(tau.next(k)))
    b = promote(point.value(tau.prev(k)))
    c = promote(point.value(k))
    return point.eps[tau.triangle_of(k)] * a / (b * c)


def assign_transports(point: CoordinatePoint) -> TransportAssignment:
    tau = point.tau
    long = {e: gen_w(point.f[e]) for e in tau.edges()}
    short = {k: short_parameter(point, k) for k in range(tau.n_half_edges)}
    return TransportAssignment(tau, long, short)


def boundary_holonomy(point: CoordinatePoint) -> Mat2:
    """Short transports around the removed disk; equal to u(boundary_parameter)."""
    transports = assign_transports(point)
    cycle = point.tau.boundary_cycle(0)
    return product([transports.short_matrix(k) for k in cycle], exact=point.is_exact())


# -- decorated representation ------------------------------------------------

@dataclass(frozen=True)
class DecoratedRep:
    """Holonomy of a coordinate point, based at P(base), decorated by ``horocycle``."""
    transports: TransportAssignment
    base: int = 0
    horocycle: Horocycle = field(default=BASE_HOROCYCLE)

    @property
    def tau(self) -> Triangulation:
        return self.transports.tau

    def holonomy(self, word: EdgeWord) -> Mat2:
        if not word.is_loop(self.tau, self.base):
            raise NotALoop(f"path does not close up at P({self.base})")
        return self.transports.compose(word)

    def edge_holonomy(self, h: int) -> Mat2:
        """Holonomy of the loop crossing half-edge h; its lower-left entry is f(h)."""
        return self.transports.compose(edge_loop_word(self.tau, h, self.base))

    def word_holonomy(self, half_edges: Iterable[int]) -> Mat2:
        """Product of edge loop holonomies, left to right."""
        exact = all(is_exact(m.a) for m in self.transports.long.values())
        return product([self.edge_holonomy(h) for h in half_edges], exact=exact)

    def boundary_holonomy(self) -> Mat2:
        """Short transports once around the removed disk, starting at P(base)."""
        exact = all(is_exact(m.a) for m in self.transports.long.values())
        cycle = self.tau.boundary_cycle(self.base)
        return product([self.transports.short_matrix(k) for k in cycle], exact=exact)


def decorate(point: CoordinatePoint, base: int = 0) -> DecoratedRep:
    return DecoratedRep(assign_transports(point), base)


def lambda_forward(rep: DecoratedRep, word: EdgeWord):
    """lambda(g h0, h0) for the holonomy g of a loop word."""
    g = rep.holonomy(word)
    return lambda_distance(apply(g, rep.horocycle), rep.horocycle)


def _positive_c(m: Mat2) -> Mat2:
    return -m if m.c < 0 else m


def recover_coordinates(rep: DecoratedRep, tau: Optional[Triangulation] = None,
                        loop_words: Optional[Mapping[int, Sequence[int]]] = None,
                        tolerance: float = 1e-12, chart_tolerance: float = 1e-8) -> CoordinatePoint:
    """
    Coordinates of a decorated representation over a triangulation.

    Each half-edge h of ``tau`` is a loop given in ``loop_words`` as a
    product of edge loops of the representation's own triangulation
    (identity when omitted).  f is the |lower-left| entry of the edge
    holonomy; the sign of a triangle is the sign of the trace of the
    product of its three side holonomies, each normalized to c > 0.

    Signs are only meaningful on the chart, where the boundary holonomy
    is +-1; elsewhere the cyclic products pick it up.

    Raises:
        DomainError: the boundary holonomy is not +-1 (point off the chart)
        EdgeDegenerate: a side holonomy has (numerically) vanishing c
    """
    tau = tau or rep.tau
    if rep.boundary_holonomy().scalar_sign(chart_tolerance) is None:
        raise DomainError("boundary holonomy is not +-1: signs are only recoverable on the chart")
    if loop_words is None:
        loop_words = {h: (h,) for h in range(tau.n_half_edges)}

    holonomy: Dict[int, Mat2] = {}
    for h in range(tau.n_half_edges):
        m = rep.word_holonomy(loop_words[h])
        c = m.c
        degenerate = (c == 0) if is_exact(c) else abs(c) <= tolerance * max(1.0, m.norm())
        if degenerate:
            raise EdgeDegenerate(h, c)
        holonomy[h] = _positive_c(m)

    f = {e: abs(holonomy[e].c) for e in tau.edges()}
    eps = {}
    for t, (h0, h1, h2) in enumerate(tau.triangles):
        cyc = holonomy[h0] * holonomy[h1] * holonomy[h2]
        eps[t] = 1 if cyc.trace() > 0 else -1
    return CoordinatePoint(tau, f, eps)


# -- Ptolemy flips -----------------------------------------------------------

@dataclass(frozen=True)
class PtolemyResult:
    """Coordinates of the same decorated point in the flipped chart."""
    point: CoordinatePoint
    edge: int
    signed_sum: object
    gamma: int
    delta: int
    loop_words: Dict[int, Tuple[int, ...]]


def ptolemy_flip(point: CoordinatePoint, e: int, tolerance: float = 1e-12) -> PtolemyResult:
    """
    Signed Ptolemy relation alpha b d + beta a c = gamma e f'.

    Top triangle (h, a, b) has sign alpha, bottom (g, c, d) sign beta.  The
    new triangle holding a and d gets gamma = sign of the sum, the one
    holding b and c gets delta = alpha beta / gamma.

    Raises:
        FlipNotDefined: both sides of e lie in one triangle
        FlipDegenerate: the signed sum vanishes
    """
    tau = point.tau
    quad = quad_around(tau, e)
    result = flip(tau, quad.diagonal)

    alpha, beta = point.eps[quad.top], point.eps[quad.bottom]
    a, b, c, d = (promote(point.f[x]) for x in quad.side_edges)
    old = promote(point.f[quad.diagonal])

    s = alpha * b * d + beta * a * c
    scale = float(max(b * d, a * c))
    if (is_exact(s) and s == 0) or (not is_exact(s) and abs(s) <= tolerance * scale):
        raise FlipDegenerate(quad.diagonal, s)

    gamma = 1 if s > 0 else -1
    delta = alpha * beta * gamma

    f = dict(point.f)
    f[quad.diagonal] = abs(s) / old
    eps = dict(point.eps)
    eps[result.bottom] = gamma
    eps[result.top] = delta

    logger.debug(f"Ptolemy flip at edge {quad.diagonal}: sum={s}, gamma={gamma}, delta={delta}")
    return PtolemyResult(CoordinatePoint(result.triangulation, f, eps), quad.diagonal,
                         s, gamma, delta, result.loop_words)


def covering_charts(point: CoordinatePoint, tolerance: float = 1e-12) -> List[int]:
    """Edges whose flip keeps the point inside the flipped chart (nonzero lambda)."""
    charts = []
    for e in point.tau.edges():
        if not point.tau.is_flippable(e):
            continue
        try:
            ptolemy_flip(point, e, tolerance)
        except FlipDegenerate:
            continue
        charts.append(e)
    return charts


def compare_points(p: CoordinatePoint, q: CoordinatePoint, tolerance: float = 1e-9) -> bool:
    """Same f (relative tolerance, exact for rationals) and same eps, triangles matched by edges."""
    if p.tau.pairing != q.tau.pairing or sorted(p.f) != sorted(q.f):
        return False
    for e in p.f:
        x, y = p.f[e], q.f[e]
        if is_exact(x) and is_exact(y):
            if x != y:
                return False
        elif abs(float(x) - float(y)) > tolerance * max(1.0, abs(float(x))):
            return False
    try:
        mapping = match_triangles(p.tau, q.tau)
    except DomainError:
        return False
    return all(p.eps[t] == q.eps[mapping[t]] for t in p.eps)


def rescale_decoration(f: Mapping[int, object], c) -> Dict[int, object]:
    """f -> c f; the representation changes by conjugation with a diagonal matrix."""
    if c <= 0:
        raise DomainError(f"rescale factor must be positive, got {c}")
    c = promote(c)
    return {e: c * promote(v) for e, v in f.items()}


def rescale_point(point: CoordinatePoint, c) -> CoordinatePoint:
    return CoordinatePoint(point.tau, rescale_decoration(point.f, c), dict(point.eps))


# -- Euler number ------------------------------------------------------------

def euler_formula(genus: int, n_minus: int) -> int:
    """e = 6g - 3 - N_- - 2 N_+ = 1 + N_- - 2g."""
    if not 0 <= n_minus <= 4 * genus - 2:
        raise DomainError(f"N_- must lie in [0, {4 * genus - 2}], got {n_minus}")
    return 1 + n_minus - 2 * genus


def rectangle_word(x) -> GeneratorWord:
    """Face of the subdivided complex around an edge of lambda-length x."""
    return lemma1_word(x)


def hexagon_face_word(transports: TransportAssignment, t: int) -> GeneratorWord:
    """
    Hexagon relator rewritten in u/v letters.

    Each w(x) splits as u(-1/x) v(x) u(-1/x); the secondary edges carry
    v(x) and neighbouring u letters merge with the short transport.  The
    result is v(x1) u(-xbar3) v(x2) u(-xbar1) v(x3) u(-xbar2).
    """
    tau = transports.tau
    sides = tau.triangles[t]
    xs = [promote(transports.long[tau.edge_of(h)].c) for h in sides]
    pairs = []
    for i in range(3):
        nxt = (i + 1) % 3
        pairs.append((V, xs[i]))
        pairs.append((U, -1 / xs[i] - transports.short[sides[nxt]] - 1 / xs[nxt]))
    return GeneratorWord.of(*pairs)


def euler_via_windings(point: CoordinatePoint, config: Optional[Config] = None) -> int:
    """Sum of the lift classes of all rectangular and hexagonal face relators."""
    transports = assign_transports(point)
    tau = point.tau
    total = 0
    for e in tau.edges():
        total += winding(rectangle_word(point.f[e]), config).n
    for t in range(len(tau.triangles)):
        total += winding(hexagon_face_word(transports, t), config).n
    logger.debug(f"Euler number {total} for N_-={point.n_minus}")
    return total


# -- sampling ----------------------------------------------------------------

def draw_values(tau: Triangulation, rng: np.random.Generator, low: float, high: float) -> Dict[int, float]:
    """Log-uniform lambda-lengths in [low, high]."""
    logs = rng.uniform(math.log(low), math.log(high), size=len(tau.edges()))
    return {e: float(math.exp(v)) for e, v in zip(tau.edges(), logs)}


def random_point(tau: Triangulation, rng: np.random.Generator, negatives: Iterable[int] = (),
                 low: float = 0.5, high: float = 2.0) -> CoordinatePoint:
    """Off-chart coordinates with the given negative triangles."""
    negatives = set(negatives)
    eps = {t: (-1 if t in negatives else 1) for t in range(len(tau.triangles))}
    return CoordinatePoint(tau, draw_values(tau, rng, low, high), eps)


def _psi_polynomial(tau: Triangulation, t: int, f: Mapping[int, float], e: int) -> np.ndarray:
    """Coefficients (highest first) of x^2 psi_{tau,t} as a polynomial in x = f(e)."""
    coeffs = np.zeros(4)
    for s in range(len(tau.triangles)):
        sign = -1.0 if s == t else 1.0
        sides = tau.triangle_edges(s)
        m = sides.count(e)
        others = [f[x] for x in sides if x != e]
        p = sum(v * v for v in others)
        q = float(np.prod(others)) if others else 1.0
        # (m x^2 + p) / (x^m q), times x^2
        if m == 0:
            coeffs[1] += sign * p / q
        elif m == 1:
            coeffs[0] += sign / q
            coeffs[2] += sign * p / q
        elif m == 2:
            coeffs[1] += sign * 2 / q
            coeffs[3] += sign * p / q
        else:
            coeffs[2] += sign * 3
    return coeffs


def _positive_root(coeffs: np.ndarray) -> Optional[float]:
    poly = np.trim_zeros(coeffs, 'f')
    if len(poly) < 2:
        return None
    roots = np.roots(poly)
    candidates = sorted(float(r.real) for r in roots
                        if abs(r.imag) <= 1e-9 * max(1.0, abs(r)) and r.real > 0)
    if not candidates:
        return None
    deriv = np.polyder(poly)
    x = candidates[0]
    for _ in range(5):
        slope = np.polyval(deriv, x)
        if slope == 0:
            break
        x -= np.polyval(poly, x) / slope
    return x if x > 0 else None


def sample_point(tau: Triangulation, t: int, rng: np.random.Generator,
                 config: Optional[Config] = None) -> CoordinatePoint:
    """
    Random point of the chart component with negative triangle t.

    All edges are drawn log-uniformly, then one edge of t is re-solved so
    that psi_{tau,t} vanishes; each edge of t is tried before redrawing.

    Raises:
        SamplerFailed: retry budget exhausted
        DomainError: t is not a triangle of tau
    """
    config = config or Config.default()
    if not 0 <= t < len(tau.triangles):
        raise DomainError(f"triangle {t} out of range")

    sampler = config.sampler
    eps = {s: (-1 if s == t else 1) for s in range(len(tau.triangles))}
    candidates = list(dict.fromkeys(tau.triangle_edges(t)))
    last = {}

    for attempt in range(1, sampler.retry_budget + 1):
        f = draw_values(tau, rng, sampler.low, sampler.high)
        for e in candidates:
            coeffs = _psi_polynomial(tau, t, f, e)
            root = _positive_root(coeffs)
            last = {"edge": e, "coefficients": coeffs.tolist()}
            if root is None:
                continue
            f[e] = root
            value = psi(tau, t, f)
            if abs(value) <= config.numerics.psi_tolerance * psi_scale(tau, f):
                logger.debug(f"Sampled chart point at triangle {t} after {attempt} draws (edge {e})")
                return CoordinatePoint(tau, f, eps)
        logger.debug(f"Sampler draw {attempt} for triangle {t} had no positive root")

    raise SamplerFailed(sampler.retry_budget, {"triangle": t, **last})
