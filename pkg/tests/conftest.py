"""Shared fixtures."""

from fractions import Fraction

import numpy as np
import pytest

from penner_closed.combinatorics import build_canonical, quad_around
from penner_closed.config import Config
from penner_closed.curves import build_zero_locus_point, free_edges
from penner_closed.teich import CoordinatePoint


@pytest.fixture
def tau():
    """Canonical genus-2 triangulation."""
    return build_canonical(2)


@pytest.fixture
def tau3():
    return build_canonical(3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def config():
    return Config.default()


@pytest.fixture
def fast_config():
    """Small worker pool and sample count for suite tests."""
    return Config({"verify": {"samples": 2, "workers": 2}})


@pytest.fixture
def rational_point():
    """Factory for off-chart points with rational lambda-lengths."""
    def make(tau, rng, negatives=()):
        f = {e: Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 5))) for e in tau.edges()}
        eps = {t: (-1 if t in negatives else 1) for t in range(len(tau.triangles))}
        return CoordinatePoint(tau, f, eps)
    return make


@pytest.fixture
def exact_chart_point():
    """Factory for exact chart points: vanishing lambda-length on the diagonal of ``edge``."""
    def make(tau, rng, edge=5, x=Fraction(1, 2)):
        top = quad_around(tau, edge).top
        rest = {k: Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 5)))
                for k in free_edges(tau, edge, top)}
        return build_zero_locus_point(tau, edge, top, x, rest).point
    return make
