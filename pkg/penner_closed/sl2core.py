"""
2x2 unimodular matrices over floats or exact rationals.

Entries are plain Python scalars: ``float`` for the default backend and
``fractions.Fraction`` for the exact backend used as an oracle for rational
identities.  Irrational operations (arccosh, log) only accept floats.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Optional, Sequence, Tuple

from .errors import DomainError, NotFactorizable, NotHyperbolic

FLOAT = "float"
EXACT = "exact-rational"

DEFAULT_DET_TOLERANCE = 1e-12
DEFAULT_FACTOR_TOLERANCE = 1e-12
DEFAULT_PROJECTIVE_TOLERANCE = 1e-9
DEFAULT_HYPERBOLIC_TOLERANCE = 1e-9


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def promote(x):
    """Ints become Fractions so that division stays exact."""
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return x


def backend_of(*values) -> str:
    return EXACT if all(is_exact(v) for v in values) else FLOAT


def _close(x, y, tolerance: float) -> bool:
    if is_exact(x) and is_exact(y):
        return x == y
    return abs(x - y) <= tolerance * max(1.0, abs(x), abs(y))


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix [[a, b], [c, d]], expected to have determinant 1."""
    a: Real
    b: Real
    c: Real
    d: Real

    @property
    def backend(self) -> str:
        return backend_of(self.a, self.b, self.c, self.d)

    @staticmethod
    def identity(exact: bool = True) -> 'Mat2':
        one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
        return Mat2(one, zero, zero, one)

    def __mul__(self, other: 'Mat2') -> 'Mat2':
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> 'Mat2':
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> 'Mat2':
        """Inverse of a unimodular matrix."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def entries(self) -> Tuple:
        return self.a, self.b, self.c, self.d

    def norm(self) -> float:
        return max(abs(float(x)) for x in self.entries())

    def to_float(self) -> 'Mat2':
        return Mat2(float(self.a), float(self.b), float(self.c), float(self.d))

    def to_json(self):
        return [[float(self.a), float(self.b)], [float(self.c), float(self.d)]]

    def is_unimodular(self, tolerance: float = DEFAULT_DET_TOLERANCE) -> bool:
        return _close(self.det(), 1, tolerance)

    def check(self, tolerance: float = DEFAULT_DET_TOLERANCE) -> 'Mat2':
        assert self.is_unimodular(tolerance), f"det={self.det()} for {self}"
        return self

    def equals(self, other: 'Mat2', tolerance: float = DEFAULT_PROJECTIVE_TOLERANCE) -> bool:
        return all(_close(x, y, tolerance) for x, y in zip(self.entries(), other.entries()))

    def is_scalar(self, sign: int, tolerance: float = DEFAULT_PROJECTIVE_TOLERANCE) -> bool:
        """True if the matrix is sign * identity."""
        return self.equals(Mat2(sign, 0, 0, sign), tolerance)

    def scalar_sign(self, tolerance: float = DEFAULT_PROJECTIVE_TOLERANCE) -> Optional[int]:
        """+1 or -1 if the matrix is +-identity, else None."""
        for sign in (1, -1):
            if self.is_scalar(sign, tolerance):
                return sign
        return None


def product(matrices: Sequence[Mat2], exact: bool = True) -> Mat2:
    """Left-to-right product; the empty product is the identity."""
    result = Mat2.identity(exact)
    for m in matrices:
        result = result * m
    return result


class ProjMat:
    """Element of PSL(2,R): a Mat2 up to global sign."""

    def __init__(self, representative: Mat2, tolerance: float = DEFAULT_PROJECTIVE_TOLERANCE):
        self.representative = representative
        self.tolerance = tolerance

    def __mul__(self, other: 'ProjMat') -> 'ProjMat':
        return ProjMat(self.representative * other.representative, self.tolerance)

    def inverse(self) -> 'ProjMat':
        return ProjMat(self.representative.inverse(), self.tolerance)

    def abs_trace(self):
        return abs(self.representative.trace())

    def positive_lower_left(self) -> Mat2:
        """The representative with c > 0 (or the stored one if c == 0)."""
        m = self.representative
        return -m if m.c < 0 else m

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjMat):
            return NotImplemented
        m, n = self.representative, other.representative
        return m.equals(n, self.tolerance) or m.equals(-n, self.tolerance)

    def is_identity(self) -> bool:
        return self.representative.scalar_sign(self.tolerance) is not None

    def __hash__(self):
        raise TypeError("ProjMat equality is tolerance-based and not hashable")

    def __repr__(self):
        return f"ProjMat({self.representative})"


# -- generators --------------------------------------------------------------

def gen_u(x) -> Mat2:
    """Upper unipotent u(x) = [[1, x], [0, 1]]."""
    x = promote(x)
    return Mat2(promote(1) if is_exact(x) else 1.0, x, x * 0, promote(1) if is_exact(x) else 1.0)


def gen_v(x) -> Mat2:
    """Lower unipotent v(x) = [[1, 0], [x, 1]]."""
    x = promote(x)
    return Mat2(promote(1) if is_exact(x) else 1.0, x * 0, x, promote(1) if is_exact(x) else 1.0)


def gen_w(e) -> Mat2:
    """w(e) = [[0, -1/e], [e, 0]], the long-edge transport; w(e)^2 = -1."""
    e = promote(e)
    if e <= 0:
        raise DomainError(f"w(e) needs e > 0, got {e}")
    return Mat2(e * 0, -1 / e, e, e * 0)


def diagonal(s) -> Mat2:
    s = promote(s)
    return Mat2(s, s * 0, s * 0, 1 / s)


def factor_uvu(g: Mat2, tolerance: float = DEFAULT_FACTOR_TOLERANCE) -> Tuple:
    """
    Unique factorization g = u(x) v(y) u(z) for c(g) != 0.

    Raises:
        NotFactorizable: c(g) vanishes (exact) or |c(g)| <= tolerance (float)
    """
    c = g.c
    if (is_exact(c) and c == 0) or (not is_exact(c) and abs(c) <= tolerance):
        raise NotFactorizable(f"lower-left entry {c} too small to factor {g}")
    return (g.a - 1) / c, c, (g.d - 1) / c


def star_triangle(x, y, z) -> Tuple:
    """
    The map R with v(x) u(y) v(z) = u(z') v(y') u(x').

    Returns (x', y', z') = (xy/S, S, yz/S) with S = x + xyz + z.
    """
    x, y, z = promote(x), promote(y), promote(z)
    if x <= 0 or y <= 0 or z <= 0:
        raise DomainError(f"star_triangle needs positive arguments, got {(x, y, z)}")
    s = x + x * y * z + z
    return x * y / s, s, y * z / s


def apply_r(values: Sequence, i: int, j: int, k: int) -> Tuple:
    """R acting on positions i, j, k (1-based) of a tuple."""
    out = list(values)
    out[i - 1], out[j - 1], out[k - 1] = star_triangle(values[i - 1], values[j - 1], values[k - 1])
    return tuple(out)


TETRAHEDRON_ORDER = ((1, 2, 3), (1, 4, 5), (2, 4, 6), (3, 5, 6))


def tetrahedron_sides(values: Sequence) -> Tuple[Tuple, Tuple]:
    """
    Both sides of R123 R145 R246 R356 = R356 R246 R145 R123 on a 6-tuple.

    Maps compose right to left: the left side applies R356 first.
    """
    lhs = tuple(values)
    for idx in reversed(TETRAHEDRON_ORDER):
        lhs = apply_r(lhs, *idx)
    rhs = tuple(values)
    for idx in TETRAHEDRON_ORDER:
        rhs = apply_r(rhs, *idx)
    return lhs, rhs


# -- horocycles --------------------------------------------------------------

@dataclass(frozen=True)
class HorocycleDescriptor:
    """
    Upper half-plane description: base point (None for infinity) and size.

    For a finite base the size is the Euclidean diameter of the horocycle;
    for the base at infinity it is the height of the horizontal line.
    """
    base: Optional[float]
    size: float

    @property
    def at_infinity(self) -> bool:
        return self.base is None


class Horocycle:
    """Nonzero real 2-vector up to sign; base point is its class in RP^1."""

    def __init__(self, x, y):
        if x == 0 and y == 0:
            raise DomainError("horocycle vector must be nonzero")
        self.x = x
        self.y = y

    @property
    def vector(self) -> Tuple:
        return self.x, self.y

    def __eq__(self, other) -> bool:
        if not isinstance(other, Horocycle):
            return NotImplemented
        same = _close(self.x, other.x, DEFAULT_PROJECTIVE_TOLERANCE) and _close(self.y, other.y, DEFAULT_PROJECTIVE_TOLERANCE)
        flipped = _close(self.x, -other.x, DEFAULT_PROJECTIVE_TOLERANCE) and _close(self.y, -other.y, DEFAULT_PROJECTIVE_TOLERANCE)
        return same or flipped

    def __hash__(self):
        raise TypeError("Horocycle equality is tolerance-based and not hashable")

    def __repr__(self):
        return f"Horocycle({self.x}, {self.y})"

    def descriptor(self) -> HorocycleDescriptor:
        """(x, y) with y != 0 is based at x/y with diameter 1/y^2; y = 0 is at infinity, height x^2."""
        x, y = float(self.x), float(self.y)
        if y == 0:
            return HorocycleDescriptor(None, x * x)
        return HorocycleDescriptor(x / y, 1.0 / (y * y))

    @staticmethod
    def from_descriptor(desc: HorocycleDescriptor) -> 'Horocycle':
        if desc.size <= 0:
            raise DomainError(f"horocycle size must be positive, got {desc.size}")
        if desc.at_infinity:
            return Horocycle(math.sqrt(desc.size), 0.0)
        y = 1.0 / math.sqrt(desc.size)
        return Horocycle(desc.base * y, y)


BASE_HOROCYCLE = Horocycle(Fraction(1), Fraction(0))


def lambda_distance(h1: Horocycle, h2: Horocycle):
    """|det [v(h1) v(h2)]|; zero iff the base points coincide."""
    return abs(h1.x * h2.y - h2.x * h1.y)


def apply(g, h: Horocycle) -> Horocycle:
    """Matrix-vector action of any sign representative."""
    m = g.representative if isinstance(g, ProjMat) else g
    return Horocycle(m.a * h.x + m.b * h.y, m.c * h.x + m.d * h.y)


def _oracle_from_infinity(height: float, base: float, diameter: float) -> float:
    """
    Horocyclic segment for (line at ``height``, circle at ``base``).

    The horocycle tangent to both is based at q = base + sqrt(height*diameter)
    with diameter ``height``; z -> -1/(z - q) straightens it into the line at
    height 1/height, where arc length is |dx| * height.
    """
    q = base + math.sqrt(height * diameter)
    # tangency with the horizontal line: top of the tangent circle
    t_line = complex(q, height)
    # tangency with the circle at base: on the segment joining the centers
    c1 = complex(base, diameter / 2)
    c2 = complex(q, height / 2)
    t_circle = c1 + (c2 - c1) * (diameter / 2) / abs(c2 - c1)

    w1 = -1 / (t_line - q)
    w2 = -1 / (t_circle - q)
    level = (w1.imag + w2.imag) / 2
    return abs(w1.real - w2.real) / level


def lambda_geometric_oracle(d1: HorocycleDescriptor, d2: HorocycleDescriptor) -> float:
    """
    lambda-distance by explicit upper half-plane geometry.

    Test oracle only.

    Raises:
        DomainError: equal base points (the lambda = 0 case is not computed here)
    """
    if d1.at_infinity and d2.at_infinity:
        raise DomainError("both horocycles are based at infinity")
    if d2.at_infinity:
        d1, d2 = d2, d1
    if d1.at_infinity:
        return _oracle_from_infinity(d1.size, d2.base, d2.size)
    if d1.base == d2.base:
        raise DomainError("horocycles share their base point")

    # z -> -1/(z - p1) sends d1 to the line at height 1/D1; the other
    # horocycle keeps being a horocycle with diameter scaled by |T'(p2)|
    shift = d2.base - d1.base
    return _oracle_from_infinity(1.0 / d1.size, -1.0 / shift, d2.size / (shift * shift))


def translation_length(g, tolerance: float = DEFAULT_HYPERBOLIC_TOLERANCE) -> float:
    """
    l = 2 arccosh(|tr|/2) for hyperbolic g.

    Raises:
        NotHyperbolic: |trace| <= 2 (within tolerance)
    """
    m = g.representative if isinstance(g, ProjMat) else g
    tr = abs(float(m.trace()))
    if tr <= 2 + tolerance:
        raise NotHyperbolic(f"|trace| = {tr} is not hyperbolic")
    return 2 * math.acosh(tr / 2)
