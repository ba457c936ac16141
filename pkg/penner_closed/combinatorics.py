"""
One-vertex triangulations of closed oriented surfaces.

A triangulation is stored as a rotation system on half-edges: every
triangle is a counterclockwise triple of half-edges and ``pairing`` glues
each half-edge to the opposite side of the same geometric edge.  A
half-edge is a side of its triangle oriented counterclockwise around that
triangle.

After removing a small disk around the vertex every half-edge ``h`` leaves
one point ``P(h)`` on the boundary circle.  The long edge of ``h`` runs
``P(h) -> P(pairing(h))``; the short edge ``k`` runs ``P(k) -> P(rot(k))``
with ``rot(k) = pairing(prev(k))``, which walks the boundary circle
counterclockwise around the vertex.
"""

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import DomainError, FlipNotDefined, TriangulationError
from .logger import get_logger


logger = get_logger("combinatorics")

LONG = "long"
SHORT = "short"


class Triangulation:
    """Immutable one-vertex triangulation of a closed genus-g surface."""

    def __init__(self, genus: int, triangles: Sequence[Sequence[int]],
                 pairing: Sequence[int], validate: bool = True):
        self.genus = int(genus)
        self.triangles: Tuple[Tuple[int, int, int], ...] = tuple(
            tuple(int(h) for h in t) for t in triangles
        )
        self.pairing: Tuple[int, ...] = tuple(int(h) for h in pairing)

        n = len(self.pairing)
        self._triangle_of = [-1] * n
        self._position = [-1] * n
        for i, tri in enumerate(self.triangles):
            for j, h in enumerate(tri):
                if 0 <= h < n:
                    self._triangle_of[h] = i
                    self._position[h] = j

        if validate:
            self.validate()

    # -- local structure ---------------------------------------------------

    @property
    def n_half_edges(self) -> int:
        return len(self.pairing)

    def opposite(self, h: int) -> int:
        return self.pairing[h]

    def triangle_of(self, h: int) -> int:
        return self._triangle_of[h]

    def next(self, h: int) -> int:
        """Next side of the same triangle, counterclockwise."""
        tri = self.triangles[self._triangle_of[h]]
        return tri[(self._position[h] + 1) % 3]

    def prev(self, h: int) -> int:
        tri = self.triangles[self._triangle_of[h]]
        return tri[(self._position[h] + 2) % 3]

    def rot(self, h: int) -> int:
        """Next boundary point around the vertex (corner rotation)."""
        return self.pairing[self.prev(h)]

    def edge_of(self, h: int) -> int:
        """Edge id: the smaller of the two half-edges."""
        return min(h, self.pairing[h])

    def edges(self) -> List[int]:
        return sorted({self.edge_of(h) for h in range(self.n_half_edges)})

    def half_edges(self, e: int) -> Tuple[int, int]:
        return e, self.pairing[e]

    def triangle_edges(self, t: int) -> Tuple[int, int, int]:
        """Edge ids of the sides of triangle ``t`` (with multiplicity)."""
        return tuple(self.edge_of(h) for h in self.triangles[t])

    def rotated(self, t: int, first: int) -> Tuple[int, int, int]:
        """Triangle ``t`` as a counterclockwise triple starting at ``first``."""
        tri = self.triangles[t]
        k = tri.index(first)
        return tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]

    def is_flippable(self, e: int) -> bool:
        h, g = self.half_edges(e)
        return self.triangle_of(h) != self.triangle_of(g)

    # -- vertex / boundary ---------------------------------------------------

    def boundary_cycle(self, start: int = 0) -> List[int]:
        """Half-edges in the order their boundary points are met, starting at ``start``."""
        cycle = [start]
        h = self.rot(start)
        while h != start:
            cycle.append(h)
            h = self.rot(h)
        return cycle

    def vertex_cycles(self) -> List[List[int]]:
        seen = set()
        cycles = []
        for h in range(self.n_half_edges):
            if h in seen:
                continue
            cycle = self.boundary_cycle(h)
            seen.update(cycle)
            cycles.append(cycle)
        return cycles

    def vertex_count(self) -> int:
        return len(self.vertex_cycles())

    # -- validation ----------------------------------------------------------

    def validate(self) -> None:
        """
        Check every triangulation invariant.

        Raises:
            TriangulationError: naming the first violated invariant
        """
        g = self.genus
        if g < 2:
            raise TriangulationError("genus >= 2", f"genus={g}")

        n_tri = 4 * g - 2
        if len(self.triangles) != n_tri:
            raise TriangulationError("4g-2 triangles", f"got {len(self.triangles)}, expected {n_tri}")

        n = self.n_half_edges
        if n != 3 * n_tri:
            raise TriangulationError("3(4g-2) half-edges", f"pairing has {n} entries")

        if any(len(t) != 3 for t in self.triangles):
            raise TriangulationError("triangles are triples")

        flat = [h for t in self.triangles for h in t]
        if sorted(flat) != list(range(n)):
            raise TriangulationError("every half-edge lies in exactly one triangle")

        for h, o in enumerate(self.pairing):
            if not 0 <= o < n or o == h or self.pairing[o] != h:
                raise TriangulationError("pairing is a fixed-point-free involution", f"half-edge {h}")

        n_edges = len(self.edges())
        if n_edges != 6 * g - 3:
            raise TriangulationError("6g-3 edges", f"got {n_edges}")

        vertices = self.vertex_count()
        if vertices != 1:
            raise TriangulationError("single vertex", f"corner rotation has {vertices} orbits")

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> Dict:
        return {
            "genus": self.genus,
            "triangles": [list(t) for t in self.triangles],
            "pairing": list(self.pairing),
        }

    @staticmethod
    def from_dict(data: Dict, validate: bool = True) -> 'Triangulation':
        try:
            genus = data["genus"]
            triangles = data["triangles"]
            pairing = data["pairing"]
        except (KeyError, TypeError) as e:
            raise TriangulationError("well-formed JSON triangulation", f"missing field {e}") from e
        return Triangulation(genus, triangles, pairing, validate=validate)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @staticmethod
    def load(path: str) -> 'Triangulation':
        with open(path, 'r') as f:
            return Triangulation.from_dict(json.load(f))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Triangulation):
            return NotImplemented
        return (self.genus, self.triangles, self.pairing) == (other.genus, other.triangles, other.pairing)

    def __hash__(self) -> int:
        return hash((self.genus, self.triangles, self.pairing))

    def __repr__(self):
        return (f"Triangulation(genus={self.genus}, triangles={len(self.triangles)}, "
                f"edges={len(self.edges())})")


def build_canonical(genus: int) -> Triangulation:
    """
    Fan triangulation of the 4g-gon with sides glued by a1 b1 a1^-1 b1^-1 ...

    Polygon vertices 0..4g-1, side s_k runs k -> k+1.  Triangle j spans
    polygon vertices (0, j+1, j+2) with half-edges 3j (0 -> j+1),
    3j+1 (the side s_{j+1}) and 3j+2 (j+2 -> 0).  Sides s_{4i} and s_{4i+2}
    are glued, as are s_{4i+1} and s_{4i+3}.
    """
    if genus < 2:
        raise DomainError(f"genus must be at least 2, got {genus}")

    n_tri = 4 * genus - 2
    n = 3 * n_tri
    triangles = [(3 * j, 3 * j + 1, 3 * j + 2) for j in range(n_tri)]

    def side(k: int) -> int:
        if k == 0:
            return 0
        if k == 4 * genus - 1:
            return 3 * (n_tri - 1) + 2
        return 3 * (k - 1) + 1

    pairing = [-1] * n
    for j in range(n_tri - 1):
        pairing[3 * j + 2] = 3 * (j + 1)
        pairing[3 * (j + 1)] = 3 * j + 2
    for i in range(genus):
        for a, b in ((4 * i, 4 * i + 2), (4 * i + 1, 4 * i + 3)):
            pairing[side(a)] = side(b)
            pairing[side(b)] = side(a)

    return Triangulation(genus, triangles, pairing)


@dataclass(frozen=True)
class FlipResult:
    """
    Outcome of a diagonal flip.

    ``edge_map`` sends every edge id of the old triangulation to its edge id
    in the new one (the flipped edge keeps its id).  ``loop_words`` expresses
    every half-edge of the new triangulation as a product of old half-edge
    loops, read left to right.
    """
    triangulation: Triangulation
    edge: int
    edge_map: Dict[int, int]
    loop_words: Dict[int, Tuple[int, ...]]
    top: int
    bottom: int


def flip(tau: Triangulation, e: int) -> FlipResult:
    """
    Replace edge ``e`` by the other diagonal of its quadrilateral.

    With triangles (h, h1, h2) and (g, k1, k2) around e = {h, g}, the new
    triangles are (k1, h, h2) and (g, k2, h1), kept in the slots of the old
    ones.  Half-edge h now runs along the path k2 h1 and g along h2 k1.

    Raises:
        FlipNotDefined: both sides of e lie in one triangle
    """
    h, g = tau.half_edges(tau.edge_of(e))
    t1, t2 = tau.triangle_of(h), tau.triangle_of(g)
    if t1 == t2:
        raise FlipNotDefined(f"edge {tau.edge_of(e)} has both sides in triangle {t1}")

    _, h1, h2 = tau.rotated(t1, h)
    _, k1, k2 = tau.rotated(t2, g)

    triangles = list(tau.triangles)
    triangles[t1] = (k1, h, h2)
    triangles[t2] = (g, k2, h1)

    flipped = Triangulation(tau.genus, triangles, tau.pairing)

    loop_words = {x: (x,) for x in range(tau.n_half_edges)}
    loop_words[h] = (k2, h1)
    loop_words[g] = (h2, k1)

    logger.debug(f"Flipped edge {tau.edge_of(e)} between triangles {t1} and {t2}")

    return FlipResult(
        triangulation=flipped,
        edge=tau.edge_of(e),
        edge_map={x: x for x in tau.edges()},
        loop_words=loop_words,
        top=t1,
        bottom=t2,
    )


def match_triangles(source: Triangulation, target: Triangulation) -> Dict[int, int]:
    """
    Triangle correspondence between two triangulations with the same edge ids.

    Triangles are matched by their cyclic sequence of edge ids.

    Raises:
        DomainError: some triangle has no counterpart
    """
    def key(tau: Triangulation, t: int) -> Tuple[int, ...]:
        ids = tau.triangle_edges(t)
        return min(ids[k:] + ids[:k] for k in range(3))

    index = {}
    for t in range(len(target.triangles)):
        index.setdefault(key(target, t), []).append(t)

    mapping = {}
    for t in range(len(source.triangles)):
        candidates = index.get(key(source, t))
        if not candidates:
            raise DomainError(f"triangle {t} has no counterpart")
        mapping[t] = candidates.pop(0)
    return mapping


# -- truncated complex -------------------------------------------------------

@dataclass(frozen=True)
class HexSide:
    """One side of a hexagon, traversed counterclockwise around the hexagon."""
    kind: str
    half_edge: int
    forward: bool


@dataclass(frozen=True)
class TruncatedComplex:
    """Surface minus a disk at the vertex: hexagons plus the boundary cycle."""
    source: Triangulation
    hexagons: Tuple[Tuple[HexSide, ...], ...]
    boundary: Tuple[int, ...]

    def long_side_counts(self) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for hexagon in self.hexagons:
            for side in hexagon:
                if side.kind == LONG:
                    e = self.source.edge_of(side.half_edge)
                    counts[e] = counts.get(e, 0) + 1
        return counts

    def short_edges(self) -> List[int]:
        return [side.half_edge for hexagon in self.hexagons for side in hexagon if side.kind == SHORT]

    def walk_boundary(self, start: int) -> int:
        """Number of short edges walked from ``start`` until returning to it."""
        steps = 1
        k = self.source.rot(start)
        while k != start:
            k = self.source.rot(k)
            steps += 1
        return steps


def truncate(tau: Triangulation) -> TruncatedComplex:
    """
    Cut a small disk around the vertex.

    Hexagon of triangle (h0, h1, h2), counterclockwise: long h0, short h1
    (against its orientation), long h1, short h2, long h2, short h0.
    """
    hexagons = []
    for tri in tau.triangles:
        sides = []
        for i in range(3):
            sides.append(HexSide(LONG, tri[i], True))
            sides.append(HexSide(SHORT, tri[(i + 1) % 3], False))
        hexagons.append(tuple(sides))
    return TruncatedComplex(tau, tuple(hexagons), tuple(tau.boundary_cycle(0)))


# -- loop words --------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    """
    One step of a path in the truncated complex.

    Long steps are stored on the edge id ``e``; ``forward`` means crossing
    from P(e) to P(pairing(e)).  Short steps are stored on the short edge k;
    ``forward`` means P(k) -> P(rot(k)).
    """
    kind: str
    index: int
    forward: bool

    def inverse(self) -> 'Step':
        return Step(self.kind, self.index, not self.forward)

    def endpoints(self, tau: Triangulation) -> Tuple[int, int]:
        if self.kind == LONG:
            a, b = self.index, tau.opposite(self.index)
        else:
            a, b = self.index, tau.rot(self.index)
        return (a, b) if self.forward else (b, a)


@dataclass(frozen=True)
class EdgeWord:
    """Path in the truncated complex given by its steps."""
    steps: Tuple[Step, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.steps)

    def concat(self, other: 'EdgeWord') -> 'EdgeWord':
        return EdgeWord(self.steps + other.steps)

    def inverse(self) -> 'EdgeWord':
        return EdgeWord(tuple(s.inverse() for s in reversed(self.steps)))

    def reduce(self) -> 'EdgeWord':
        """Free cancellation of adjacent inverse steps."""
        stack: List[Step] = []
        for s in self.steps:
            if stack and stack[-1] == s.inverse():
                stack.pop()
            else:
                stack.append(s)
        return EdgeWord(tuple(stack))

    def long_steps(self) -> List[Step]:
        return [s for s in self.steps if s.kind == LONG]

    def is_loop(self, tau: Triangulation, base: int) -> bool:
        here = base
        for s in self.steps:
            a, b = s.endpoints(tau)
            if a != here:
                return False
            here = b
        return here == base


def long_step(tau: Triangulation, h: int) -> Step:
    """Crossing of half-edge h from P(h) to P(pairing(h))."""
    e = tau.edge_of(h)
    return Step(LONG, e, h == e)


def boundary_path(tau: Triangulation, start: int, stop: int) -> EdgeWord:
    """Forward (counterclockwise around the vertex) short-edge path P(start) -> P(stop)."""
    n = tau.n_half_edges
    if not (0 <= start < n and 0 <= stop < n):
        raise DomainError(f"half-edges must lie in [0, {n}), got {start} and {stop}")
    steps = []
    k = start
    while k != stop:
        steps.append(Step(SHORT, k, True))
        k = tau.rot(k)
    return EdgeWord(tuple(steps))


def edge_loop_word(tau: Triangulation, h: int, base: int = 0) -> EdgeWord:
    """
    Loop at P(base) representing half-edge ``h`` as an element of pi_1.

    Boundary path to P(h), one crossing of h, boundary path back to P(base).
    Passing the opposite half-edge gives the inverse class.
    """
    return (boundary_path(tau, base, h)
            .concat(EdgeWord((long_step(tau, h),)))
            .concat(boundary_path(tau, tau.opposite(h), base)))


def word_for_loop(tau: Triangulation, half_edges: Iterable[int], base: int = 0) -> EdgeWord:
    """Concatenated edge loop words, e.g. for a loop word returned by ``flip``."""
    word = EdgeWord()
    for h in half_edges:
        word = word.concat(edge_loop_word(tau, h, base))
    return word


# -- quadrilaterals ----------------------------------------------------------

@dataclass(frozen=True)
class Quadrilateral:
    """
    The two triangles around a diagonal.

    ``half_edge`` is the side of the diagonal in the top triangle.  With
    top = (h, a, b) and bottom = (g, c, d) counterclockwise, a is opposite
    c and b is opposite d.
    """
    diagonal: int
    half_edge: int
    top: int
    bottom: int
    a: int
    b: int
    c: int
    d: int
    edge_a: int
    edge_b: int
    edge_c: int
    edge_d: int

    @property
    def a_eq_c(self) -> bool:
        return self.edge_a == self.edge_c

    @property
    def b_eq_d(self) -> bool:
        return self.edge_b == self.edge_d

    @property
    def coincident(self) -> bool:
        return self.a_eq_c or self.b_eq_d

    @property
    def side_edges(self) -> Tuple[int, int, int, int]:
        return self.edge_a, self.edge_b, self.edge_c, self.edge_d

    @property
    def triangles(self) -> Tuple[int, int]:
        return self.top, self.bottom

    def distinct_sides(self) -> int:
        return len(set(self.side_edges))


def quad_around(tau: Triangulation, e: int, top: Optional[int] = None) -> Quadrilateral:
    """
    Quadrilateral having edge ``e`` as its diagonal.

    Args:
        tau: triangulation
        e: edge id (or either half-edge)
        top: triangle to place on top; defaults to the triangle of the
            edge id's half-edge

    Raises:
        FlipNotDefined: both sides of e lie in one triangle
        DomainError: ``top`` is not adjacent to e
    """
    e = tau.edge_of(e)
    if not tau.is_flippable(e):
        raise FlipNotDefined(f"edge {e} has both sides in one triangle")

    h, g = tau.half_edges(e)
    if top is not None and top != tau.triangle_of(h):
        if top != tau.triangle_of(g):
            raise DomainError(f"triangle {top} is not adjacent to edge {e}")
        h, g = g, h

    _, a, b = tau.rotated(tau.triangle_of(h), h)
    _, c, d = tau.rotated(tau.triangle_of(g), g)

    return Quadrilateral(
        diagonal=e,
        half_edge=h,
        top=tau.triangle_of(h),
        bottom=tau.triangle_of(g),
        a=a, b=b, c=c, d=d,
        edge_a=tau.edge_of(a), edge_b=tau.edge_of(b),
        edge_c=tau.edge_of(c), edge_d=tau.edge_of(d),
    )
