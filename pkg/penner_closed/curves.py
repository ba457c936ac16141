"""
Points where the lambda-length of a simple closed curve vanishes.

The curve alpha is the diagonal class of a flippable edge: its loop reads
as d * a in the edge loops of the quadrilateral around the edge (the
flipped edge).  Picking the top triangle t as the negative one and a
number 0 < x < 1, the sides are set to a = x d, b = x c and the diagonal
is solved from psi_{tau,t} = 0, which makes the alpha holonomy upper
triangular with eigenvalues -x, -1/x.
"""

import json
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from .combinatorics import Quadrilateral, Triangulation, quad_around
from .errors import ConventionMismatch, DomainError
from .logger import get_logger
from .sl2core import Mat2, is_exact, promote, translation_length
from .teich import CoordinatePoint, DecoratedRep, decorate, triangle_term

logger = get_logger("curves")

GENERIC = "generic"
B_EQ_D = "b=d"
A_EQ_C = "a=c"


def coincidence_case(quad: Quadrilateral) -> str:
    """
    Which side identification the quadrilateral has.

    Raises:
        ConventionMismatch: more than one pair of sides coincide, or a
            coincidence other than a=c / b=d
    """
    a, b, c, d = quad.side_edges
    if a == d or b == c or a == b or c == d or (quad.a_eq_c and quad.b_eq_d):
        raise ConventionMismatch(f"quadrilateral around edge {quad.diagonal} has sides "
                                 f"{quad.side_edges}; only a single a=c or b=d coincidence is supported")
    if quad.b_eq_d:
        return B_EQ_D
    if quad.a_eq_c:
        return A_EQ_C
    return GENERIC


def free_edges(tau: Triangulation, edge: int, t: int) -> List[int]:
    """Edges whose values are chosen freely: everything off the negative triangle t."""
    quad = quad_around(tau, edge, top=t)
    taken = {quad.diagonal, quad.edge_a, quad.edge_b}
    return [e for e in tau.edges() if e not in taken]


def length_from_x(x) -> float:
    """l = -2 ln x for 0 < x < 1."""
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    return -2 * math.log(x)


def x_from_length(length: float) -> float:
    if length <= 0:
        raise DomainError(f"length must be positive, got {length}")
    return math.exp(-length / 2)


@dataclass(frozen=True)
class ZeroLocusPoint:
    tau: Triangulation
    edge: int
    t: int
    x: object
    rest: Dict[int, object]
    point: CoordinatePoint
    case: str

    @property
    def quad(self) -> Quadrilateral:
        return quad_around(self.tau, self.edge, top=self.t)

    @property
    def length(self) -> float:
        return length_from_x(float(self.x))

    def alpha_word(self) -> Tuple[int, int]:
        """Half-edges whose loops multiply to the alpha class."""
        q = self.quad
        return q.d, q.a

    def to_dict(self) -> Dict:
        return {
            "triangulation": self.tau.to_dict(),
            "edge": self.edge,
            "triangle": self.t,
            "x": float(self.x),
            "rest": {str(e): float(v) for e, v in sorted(self.rest.items())},
        }

    @staticmethod
    def from_dict(data: Mapping) -> 'ZeroLocusPoint':
        """Rebuild from the JSON written by ``to_dict``."""
        try:
            tau = Triangulation.from_dict(data["triangulation"])
            rest = {int(e): float(v) for e, v in data["rest"].items()}
            return build_zero_locus_point(tau, int(data["edge"]), int(data["triangle"]),
                                          float(data["x"]), rest)
        except (KeyError, TypeError, AttributeError) as e:
            raise DomainError(f"malformed zero-locus point: {e}") from e

    @staticmethod
    def load(path: str) -> 'ZeroLocusPoint':
        with open(path, 'r') as f:
            return ZeroLocusPoint.from_dict(json.load(f))

    def save(self, path: str):
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2)


@dataclass(frozen=True)
class LCoordinates:
    length: float
    rest: Dict[int, object]


def build_zero_locus_point(tau: Triangulation, edge: int, t: int, x,
                           rest: Mapping[int, object]) -> ZeroLocusPoint:
    """
    Chart point at triangle t with vanishing lambda-length on the alpha class.

    Args:
        tau: triangulation
        edge: edge whose flip carries alpha
        t: one of the two triangles around ``edge``; it becomes the negative one
        x: the eigenvalue parameter, 0 < x < 1
        rest: positive values on ``free_edges(tau, edge, t)``

    Returns:
        ZeroLocusPoint

    Raises:
        DomainError: x out of range, t not adjacent, wrong or non-positive rest
        FlipNotDefined: edge is not flippable
        ConventionMismatch: unsupported side coincidences
    """
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x}")
    quad = quad_around(tau, edge, top=t)
    case = coincidence_case(quad)

    free = free_edges(tau, quad.diagonal, t)
    if sorted(rest) != sorted(free):
        raise DomainError(f"rest must give values for exactly the edges {free}")
    if any(v <= 0 for v in rest.values()):
        raise DomainError("rest values must be positive")

    x = promote(x)
    f: Dict[int, object] = {e: promote(v) for e, v in rest.items()}
    if case == B_EQ_D:
        c = f[quad.edge_c]
        f[quad.edge_a] = x * x * c
        f[quad.edge_b] = c * x
    elif case == A_EQ_C:
        d = f[quad.edge_d]
        f[quad.edge_a] = x * d
        f[quad.edge_b] = x * x * d
    else:
        f[quad.edge_a] = x * f[quad.edge_d]
        f[quad.edge_b] = x * f[quad.edge_c]

    c, d = f[quad.edge_c], f[quad.edge_d]
    outside = [s for s in range(len(tau.triangles)) if s not in quad.triangles]
    k = sum(triangle_term(tau, s, f) for s in outside)
    f[quad.diagonal] = c * d * k / (1 / (x * x) - 1)

    eps = {s: (-1 if s == t else 1) for s in range(len(tau.triangles))}
    point = CoordinatePoint(tau, f, eps)
    logger.debug(f"Zero-locus point on edge {quad.diagonal} ({case}), x={x}")
    return ZeroLocusPoint(tau, quad.diagonal, t, x, dict(rest), point, case)


def alpha_holonomy(p: ZeroLocusPoint, rep: Optional[DecoratedRep] = None) -> Mat2:
    rep = rep or decorate(p.point)
    return rep.word_holonomy(p.alpha_word())


def alpha_holonomy_check(p: ZeroLocusPoint, tolerance: float = 1e-9) -> Tuple[float, bool]:
    """
    Check the alpha holonomy is upper triangular with diagonal +-x^{+-1}.

    Returns:
        (recovered x, True)

    Raises:
        ConventionMismatch: lower-left entry not zero, or diagonal not x, 1/x
    """
    m = alpha_holonomy(p)
    scale = max(1.0, m.norm())
    if is_exact(m.c):
        lower_ok = m.c == 0
    else:
        lower_ok = abs(m.c) <= tolerance * scale
    if not lower_ok:
        raise ConventionMismatch("alpha holonomy is not upper triangular", m.to_json())

    diagonal = sorted((abs(float(m.a)), abs(float(m.d))))
    x = float(p.x)
    if abs(diagonal[0] - x) > tolerance * scale or abs(diagonal[1] - 1 / x) > tolerance * scale / x:
        raise ConventionMismatch(f"alpha holonomy diagonal {diagonal} does not match x={x}", m.to_json())
    return diagonal[0], True


def alpha_length(p: ZeroLocusPoint) -> float:
    return translation_length(alpha_holonomy(p))


def edge_length(rep: DecoratedRep, h: int) -> float:
    """Translation length of the loop crossing half-edge h."""
    return translation_length(rep.edge_holonomy(h))


def l_coordinates(p: ZeroLocusPoint) -> LCoordinates:
    return LCoordinates(length_from_x(float(p.x)), dict(p.rest))


def from_l_coordinates(tau: Triangulation, edge: int, t: int, lc: LCoordinates) -> ZeroLocusPoint:
    """Inverse of ``l_coordinates``."""
    if lc.length <= 0:
        raise DomainError(f"length must be positive, got {lc.length}")
    return build_zero_locus_point(tau, edge, t, x_from_length(lc.length), lc.rest)


def theorem2_part_i(p: ZeroLocusPoint) -> bool:
    """The only negative triangle lies in the quadrilateral and the sign product there is -1."""
    quad = p.quad
    eps = p.point.eps
    negatives = p.point.negative_triangles
    return (all(t in quad.triangles for t in negatives)
            and eps[quad.top] * eps[quad.bottom] == -1)


@dataclass(frozen=True)
class FiberCheck:
    """
    Outcome of fiber_equivalent(p, q).

    ``ratio`` is c with q.rest = c * p.rest (None unless proportional);
    ``trace_gap`` is the largest relative gap between edge-loop traces.
    """
    equivalent: bool
    ratio: Optional[float]
    trace_gap: Optional[float]


def _traces(p: ZeroLocusPoint) -> List[float]:
    rep = decorate(p.point)
    return [abs(float(rep.edge_holonomy(h).trace())) for h in range(p.tau.n_half_edges)]


def fiber_equivalent(p: ZeroLocusPoint, q: ZeroLocusPoint, tolerance: float = 1e-9) -> FiberCheck:
    """
    Whether two zero-locus points with the same length lie in the same fiber.

    They do iff their free values are proportional; the common ratio
    q.rest / p.rest is returned, together with the largest gap between edge-loop traces.

    Raises:
        DomainError: different triangulation, edge or triangle, or lengths differ
    """
    if (p.tau, p.edge, p.t) != (q.tau, q.edge, q.t):
        raise DomainError("fiber check needs the same triangulation, edge and triangle")
    if abs(p.length - q.length) > tolerance * max(1.0, p.length):
        raise DomainError(f"lengths differ: {p.length} vs {q.length}")

    keys = sorted(p.rest)
    ratio = float(q.rest[keys[0]]) / float(p.rest[keys[0]])
    proportional = all(
        abs(float(q.rest[k]) - ratio * float(p.rest[k])) <= tolerance * max(1.0, abs(float(q.rest[k])))
        for k in keys
    )

    gap = max(abs(x - y) / max(1.0, abs(x)) for x, y in zip(_traces(p), _traces(q)))
    if proportional and gap > tolerance:
        raise ConventionMismatch(f"proportional coordinates but trace gap {gap:.3e}")
    return FiberCheck(proportional, ratio if proportional else None, gap)
