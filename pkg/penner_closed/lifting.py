"""
Homotopy classes of loops in PSL(2,R) built from u/v segments.

A loop is a GeneratorWord whose atoms U(x), V(x) stand for the paths
s -> u(xs), s -> v(xs) on [0, 1], traversed one after another (each atom
starts where the previous product left off).  Its class in
pi_1(PSL(2,R)) = Z is read off by tracking the projective direction of
g(s) * v0 and counting half-turns.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .errors import DomainError, NotALoop, StepTooCoarse
from .logger import get_logger
from .sl2core import Mat2, gen_u, gen_v, is_exact, product, promote

logger = get_logger("lifting")

U = "U"
V = "V"

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class Atom:
    kind: str
    x: object

    def __post_init__(self):
        if self.kind not in (U, V):
            raise DomainError(f"atom kind must be U or V, got {self.kind!r}")

    def matrix(self) -> Mat2:
        return gen_u(self.x) if self.kind == U else gen_v(self.x)

    def inverse(self) -> 'Atom':
        return Atom(self.kind, -self.x)

    def __str__(self):
        return f"{self.kind}({self.x})"


@dataclass(frozen=True)
class GeneratorWord:
    """Finite sequence of U/V atoms; zero atoms are identity paths and are dropped."""
    atoms: Tuple[Atom, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(a for a in self.atoms if a.x != 0))

    @staticmethod
    def of(*pairs) -> 'GeneratorWord':
        """GeneratorWord.of(("V", -2), ("U", 1), ...)"""
        return GeneratorWord(tuple(Atom(k, x) for k, x in pairs))

    def __len__(self) -> int:
        return len(self.atoms)

    def __add__(self, other: 'GeneratorWord') -> 'GeneratorWord':
        return self.concat(other)

    def concat(self, other: 'GeneratorWord') -> 'GeneratorWord':
        return GeneratorWord(self.atoms + other.atoms)

    def inverse(self) -> 'GeneratorWord':
        """Reverse path: atoms reversed and negated."""
        return GeneratorWord(tuple(a.inverse() for a in reversed(self.atoms)))

    def rotate(self, k: int) -> 'GeneratorWord':
        """Cyclic permutation starting at atom k."""
        if not self.atoms:
            return self
        k %= len(self.atoms)
        return GeneratorWord(self.atoms[k:] + self.atoms[:k])

    def is_exact(self) -> bool:
        return all(is_exact(a.x) for a in self.atoms)

    def endpoint(self) -> Mat2:
        return product([a.matrix() for a in self.atoms], exact=self.is_exact())

    def __str__(self):
        return " ".join(str(a) for a in self.atoms) or "1"


@dataclass(frozen=True)
class LiftClass:
    """The class Phi(n), with the fractional distance of the tracked angle from n*pi."""
    n: int
    residual: float
    depth: int = 0


# -- angle tracking ----------------------------------------------------------
#
# Along one atom the vector u(xs) * v0 runs on a horizontal line (v(xs) * v0
# on a vertical one), so its direction turns monotonically and by less than
# pi in total; a prefix of determinant 1 keeps both properties.  Every step
# is therefore read in the atom's known sense of rotation.

def _rotation_sense(atom: Atom) -> int:
    """+1 counterclockwise, -1 clockwise; u(x) with x > 0 turns clockwise."""
    sign = 1 if atom.x > 0 else -1
    return -sign if atom.kind == U else sign


def _oriented_step(w0: np.ndarray, w1: np.ndarray, sense: int) -> float:
    """Angle from w0 to w1, taken in the given sense of rotation."""
    cross = w0[0] * w1[1] - w0[1] * w1[0]
    dot = w0[0] * w1[0] + w0[1] * w1[1]
    step = math.atan2(cross, dot)
    # only a turn close to pi can come out with the wrong sign
    if sense * step < -HALF_PI:
        step += sense * 2 * math.pi
    return step


def _atom_vectors(prefix: np.ndarray, atom: Atom, s: np.ndarray, v0: np.ndarray) -> np.ndarray:
    """prefix @ atom(x*s) @ v0 for every s; shape (2, len(s))."""
    x = float(atom.x)
    if atom.kind == U:
        w = np.vstack([v0[0] + x * s * v0[1], np.full_like(s, v0[1])])
    else:
        w = np.vstack([np.full_like(s, v0[0]), x * s * v0[0] + v0[1]])
    return prefix @ w


class _Tracker:
    """Bisects one atom's parameter interval until every step turns less than max_step."""

    def __init__(self, max_step: float, max_depth: int):
        self.max_step = max_step
        self.max_depth = max_depth
        self.deepest = 0

    def segment(self, prefix, atom, v0, s0, s1, w0, w1, depth) -> float:
        sense = _rotation_sense(atom)
        whole = _oriented_step(w0, w1, sense)
        if abs(whole) < self.max_step:
            return whole

        if depth >= self.max_depth:
            raise StepTooCoarse(abs(whole) / math.pi,
                                f"{atom} did not resolve below {self.max_step:.3f} rad "
                                f"after {depth} bisections")

        self.deepest = max(self.deepest, depth + 1)
        mid = 0.5 * (s0 + s1)
        wm = _atom_vectors(prefix, atom, np.array([mid]), v0)[:, 0]
        return (self.segment(prefix, atom, v0, s0, mid, w0, wm, depth + 1)
                + self.segment(prefix, atom, v0, mid, s1, wm, w1, depth + 1))


def _turning(word: GeneratorWord, start_angle: float, config: Config) -> Tuple[float, int]:
    """Total angle swept by g(s) * v0 along the word, and the bisection depth used."""
    lifting = config.lifting
    tracker = _Tracker(lifting.max_step_angle, lifting.max_depth)
    v0 = np.array([math.cos(start_angle), math.sin(start_angle)])
    s = np.linspace(0.0, 1.0, lifting.initial_steps + 1)

    prefix = np.eye(2)
    total = 0.0
    for atom in word.atoms:
        vecs = _atom_vectors(prefix, atom, s, v0)
        for i in range(len(s) - 1):
            total += tracker.segment(prefix, atom, v0, s[i], s[i + 1],
                                     vecs[:, i], vecs[:, i + 1], 0)
        m = atom.matrix()
        prefix = prefix @ np.array([[float(m.a), float(m.b)], [float(m.c), float(m.d)]])
    return total, tracker.deepest


def _check_loop(word: GeneratorWord, config: Config) -> None:
    end = word.endpoint()
    if word.is_exact():
        if end.scalar_sign() is None:
            raise NotALoop(f"endpoint {end} is not +-identity")
        return

    peak = 1.0
    running = Mat2.identity(exact=False)
    for atom in word.atoms:
        running = running * atom.matrix()
        peak = max(peak, running.norm())
    tolerance = config.numerics.loop_tolerance * peak * peak
    if end.scalar_sign(tolerance) is None:
        raise NotALoop(f"endpoint {end.to_json()} is not +-identity (tolerance {tolerance:.2e})")


def winding(word: GeneratorWord, config: Optional[Config] = None) -> LiftClass:
    """
    Class Phi(n) of a loop given as a GeneratorWord.

    n = -(theta(1) - theta(0)) / pi with theta the unwrapped angle of the
    line through g(s) * v0, so that the loop of v(-x)u(2/x)v(-x)u(2/x)
    counts +1.  Computed for every configured start direction; all must agree.

    Args:
        word: loop word (endpoint +-identity)
        config: tolerances and subdivision settings; defaults if omitted

    Returns:
        LiftClass

    Raises:
        NotALoop: endpoint is not +-identity
        StepTooCoarse: residual above the gate, or start directions disagree
    """
    config = config or Config.default()
    _check_loop(word, config)

    if not word.atoms:
        return LiftClass(0, 0.0)

    gate = config.lifting.residual_gate
    classes = []
    worst = 0.0
    deepest = 0
    for angle in config.lifting.start_angles:
        total, depth = _turning(word, angle, config)
        turns = total / math.pi
        n = round(turns)
        residual = abs(turns - n)
        if residual >= gate:
            raise StepTooCoarse(residual)
        classes.append(-int(n))
        worst = max(worst, residual)
        deepest = max(deepest, depth)

    if len(set(classes)) != 1:
        raise StepTooCoarse(worst, f"start directions disagree: {classes}")

    logger.debug(f"winding {classes[0]} for {len(word)} atoms (residual {worst:.2e}, depth {deepest})")
    return LiftClass(classes[0], worst, deepest)


# -- lemma words -------------------------------------------------------------

def lemma1_word(x) -> GeneratorWord:
    """v(-x)u(2/x)v(-x)u(2/x) = -1, a loop in PSL(2,R) of class 1."""
    x = promote(x)
    if x == 0:
        raise DomainError("lemma1_word needs x != 0")
    return GeneratorWord.of((V, -x), (U, 2 / x), (V, -x), (U, 2 / x))


def half_turn_substitution(x) -> Tuple[GeneratorWord, int]:
    """
    u(2/x) v(-x) u(2/x) = -v(x).

    Returns the replacement word for V(x) and the sign relating the endpoints.
    """
    x = promote(x)
    if x == 0:
        raise DomainError("half_turn_substitution needs x != 0")
    return GeneratorWord.of((U, 2 / x), (V, -x), (U, 2 / x)), -1


def solve_tetr(x: Sequence) -> Tuple:
    """
    Positive (x1', x2', x3') with v(x1)u(x2)v(x3) = u(x1')v(x2')u(x3').

    This is the star-triangle map read in reverse order:
    (yz/S, S, xy/S) with S = x1 + x1 x2 x3 + x3.
    """
    x1, x2, x3 = (promote(v) for v in x)
    if x1 <= 0 or x2 <= 0 or x3 <= 0:
        raise DomainError(f"solve_tetr needs positive arguments, got {tuple(x)}")
    s = x1 + x1 * x2 * x3 + x3
    return x2 * x3 / s, s, x1 * x2 / s


def lemma2_word(x: Sequence) -> GeneratorWord:
    """v(x1)u(x2)v(x3)u(-x3')v(-x2')u(-x1'), a contractible loop."""
    x1, x2, x3 = (promote(v) for v in x)
    p1, p2, p3 = solve_tetr((x1, x2, x3))
    return GeneratorWord.of((V, x1), (U, x2), (V, x3), (U, -p3), (V, -p2), (U, -p1))


def hexagon_word(x: Sequence, xbar: Sequence) -> GeneratorWord:
    """v(x1)u(-xbar3)v(x2)u(-xbar1)v(x3)u(-xbar2)."""
    x1, x2, x3 = x
    b1, b2, b3 = xbar
    return GeneratorWord.of((V, x1), (U, -b3), (V, x2), (U, -b1), (V, x3), (U, -b2))


def solve_hex(x: Sequence, epsilon: int,
              tolerance: float = 1e-9) -> Tuple:
    """
    The triple xbar with v(x1)u(-xbar3)v(x2)u(-xbar1)v(x3)u(-xbar2) = epsilon.

    Closed form xbar_i = (x_j + x_k + epsilon x_i) / (x_j x_k), checked by
    multiplying out before it is returned.

    Raises:
        DomainError: non-positive x or epsilon not +-1
        AssertionError: the product check failed
    """
    if epsilon not in (1, -1):
        raise DomainError(f"epsilon must be +1 or -1, got {epsilon}")
    x1, x2, x3 = (promote(v) for v in x)
    if x1 <= 0 or x2 <= 0 or x3 <= 0:
        raise DomainError(f"solve_hex needs positive arguments, got {tuple(x)}")

    xbar = (
        (x2 + x3 + epsilon * x1) / (x2 * x3),
        (x3 + x1 + epsilon * x2) / (x3 * x1),
        (x1 + x2 + epsilon * x3) / (x1 * x2),
    )

    end = hexagon_word((x1, x2, x3), xbar).endpoint()
    scale = max(1.0, float(max(x1, x2, x3)), float(max(abs(b) for b in xbar))) ** 6
    assert end.is_scalar(epsilon, tolerance * scale), \
        f"hexagon product {end} != {epsilon} for x={x}"
    return xbar


def lemma3_expected(epsilon: int) -> int:
    return -(3 + epsilon) // 2


def verify_lemma1(x, config: Optional[Config] = None) -> LiftClass:
    return winding(lemma1_word(x), config)


def verify_lemma2(x: Sequence, config: Optional[Config] = None) -> LiftClass:
    return winding(lemma2_word(x), config)


def verify_lemma3(x: Sequence, epsilon: int, config: Optional[Config] = None) -> LiftClass:
    """Class of the hexagon loop; -2 for epsilon = +1 and -1 for epsilon = -1."""
    return winding(hexagon_word(x, solve_hex(x, epsilon)), config)


# -- lemma 3 regimes ---------------------------------------------------------

STRICT = "strict"
VIOLATED = "violated"
DEGENERATE = "degenerate"
EQUILATERAL = "equilateral"
REGIMES = (STRICT, VIOLATED, DEGENERATE, EQUILATERAL)


def lemma3_regime(x: Sequence) -> str:
    """Which case of the triangle inequality the triple falls in."""
    x1, x2, x3 = x
    if x1 == x2 == x3:
        return EQUILATERAL
    big = max(x)
    rest = sum(x) - big
    if big == rest:
        return DEGENERATE
    return VIOLATED if big > rest else STRICT


def regime_instance(regime: str, rng: np.random.Generator) -> Tuple:
    """Random positive rational triple in the given regime."""
    def draw() -> object:
        return promote(int(rng.integers(1, 9))) / int(rng.integers(1, 5))

    if regime == EQUILATERAL:
        a = draw()
        triple: List = [a, a, a]
    elif regime == DEGENERATE:
        b, c = draw(), draw()
        triple = [b + c, b, c]
    elif regime == VIOLATED:
        b, c = draw(), draw()
        triple = [b + c + draw(), b, c]
    elif regime == STRICT:
        while True:
            triple = [draw(), draw(), draw()]
            if lemma3_regime(triple) == STRICT:
                break
    else:
        raise DomainError(f"unknown regime {regime!r}")

    shift = int(rng.integers(0, 3))
    return tuple(triple[shift:] + triple[:shift])
