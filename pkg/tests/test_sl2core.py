import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from penner_closed.errors import DomainError, NotFactorizable, NotHyperbolic
from penner_closed.sl2core import (
    BASE_HOROCYCLE,
    EXACT,
    FLOAT,
    Horocycle,
    HorocycleDescriptor,
    Mat2,
    ProjMat,
    apply,
    diagonal,
    factor_uvu,
    gen_u,
    gen_v,
    gen_w,
    lambda_distance,
    lambda_geometric_oracle,
    product,
    star_triangle,
    tetrahedron_sides,
    translation_length,
)

positive_rationals = st.fractions(min_value=Fraction(1, 20), max_value=20)
positive_floats = st.floats(min_value=0.05, max_value=20.0)


class TestMat2:

    def test_backend(self):
        assert gen_u(1).backend == EXACT
        assert gen_u(1.5).backend == FLOAT

    def test_inverse(self):
        g = Mat2(Fraction(2), Fraction(3), Fraction(1), Fraction(2))
        assert g * g.inverse() == Mat2.identity()

    def test_empty_product(self):
        assert product([]) == Mat2.identity()

    def test_w_squares_to_minus_one(self):
        w = gen_w(Fraction(3, 2))
        assert (w * w).scalar_sign() == -1

    def test_w_requires_positive(self):
        with pytest.raises(DomainError):
            gen_w(0)

    def test_w_split(self):
        a = Fraction(5, 3)
        assert product([gen_u(-1 / a), gen_v(a), gen_u(-1 / a)]) == gen_w(a)

    def test_diagonal_conjugation(self):
        s = Fraction(3)
        d = diagonal(s)
        assert d * gen_u(1) * d.inverse() == gen_u(9)

    def test_unimodular_tolerance(self):
        assert Mat2(1.0, 1e-13, 0.0, 1.0).is_unimodular()
        assert not Mat2(1.0, 0.0, 0.0, 1.1).is_unimodular()

    def test_projective_equality(self):
        g = ProjMat(gen_w(2.0))
        assert g == ProjMat(-gen_w(2.0))
        assert (g * g).is_identity()
        assert g.positive_lower_left().c > 0

    def test_projective_not_hashable(self):
        with pytest.raises(TypeError):
            hash(ProjMat(gen_u(1)))


class TestFactorization:

    @pytest.mark.parametrize("g, expected", [
        (Mat2(Fraction(2), Fraction(3), Fraction(1), Fraction(2)), (1, 1, 1)),
        (gen_v(5), (0, 5, 0)),
        (gen_w(2), (Fraction(-1, 2), 2, Fraction(-1, 2))),
    ])
    def test_examples(self, g, expected):
        assert factor_uvu(g) == expected

    def test_upper_triangular(self):
        with pytest.raises(NotFactorizable):
            factor_uvu(gen_u(3))

    def test_float_threshold(self):
        with pytest.raises(NotFactorizable):
            factor_uvu(Mat2(1.0, 2.0, 1e-14, 1.0))

    @given(positive_rationals, positive_rationals, positive_rationals)
    def test_multiplies_back(self, x, y, z):
        g = product([gen_u(x), gen_v(y), gen_u(z)])
        assert factor_uvu(g) == (x, y, z)


class TestStarTriangle:

    def test_examples(self):
        assert star_triangle(1, 1, 1) == (Fraction(1, 3), 3, Fraction(1, 3))
        assert star_triangle(1, 2, 3) == (Fraction(1, 5), 10, Fraction(3, 5))

    def test_involution_example(self):
        assert star_triangle(*star_triangle(2, 5, 7)) == (2, 5, 7)

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            star_triangle(1, 0, 1)

    @given(positive_rationals, positive_rationals, positive_rationals)
    def test_matrix_identity(self, x, y, z):
        xp, yp, zp = star_triangle(x, y, z)
        lhs = product([gen_v(x), gen_u(y), gen_v(z)])
        rhs = product([gen_u(zp), gen_v(yp), gen_u(xp)])
        assert lhs == rhs
        assert min(xp, yp, zp) > 0

    @given(positive_rationals, positive_rationals, positive_rationals)
    def test_involution(self, x, y, z):
        assert star_triangle(*star_triangle(x, y, z)) == (x, y, z)

    def test_tetrahedron_ones(self):
        lhs, rhs = tetrahedron_sides([1] * 6)
        assert lhs == rhs == (Fraction(1, 5), Fraction(5, 9), Fraction(9, 25), 9, Fraction(5, 9), Fraction(1, 5))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(positive_rationals, min_size=6, max_size=6))
    def test_tetrahedron_exact(self, values):
        lhs, rhs = tetrahedron_sides(values)
        assert lhs == rhs

    @given(st.lists(positive_floats, min_size=6, max_size=6))
    def test_tetrahedron_float(self, values):
        lhs, rhs = tetrahedron_sides(values)
        for x, y in zip(lhs, rhs):
            assert x == pytest.approx(y, rel=1e-10)


class TestHorocycles:

    def test_sign_equivalence(self):
        assert Horocycle(2, 3) == Horocycle(-2, -3)
        assert Horocycle(2, 3) != Horocycle(2, -3)

    def test_zero_vector(self):
        with pytest.raises(DomainError):
            Horocycle(0, 0)

    def test_lambda_distance(self):
        assert lambda_distance(BASE_HOROCYCLE, Horocycle(Fraction(0), Fraction(1))) == 1
        assert lambda_distance(Horocycle(1, 2), Horocycle(2, 4)) == 0

    def test_equivariance(self):
        g = product([gen_u(Fraction(1, 2)), gen_v(3), gen_u(-2)])
        h1, h2 = Horocycle(Fraction(1), Fraction(2)), Horocycle(Fraction(-3), Fraction(1))
        assert lambda_distance(apply(g, h1), apply(g, h2)) == lambda_distance(h1, h2)

    def test_descriptor(self):
        desc = Horocycle(2.0, 4.0).descriptor()
        assert desc.base == pytest.approx(0.5)
        assert desc.size == pytest.approx(1 / 16)
        assert BASE_HOROCYCLE.descriptor().at_infinity

    def test_descriptor_inverse(self):
        h = Horocycle.from_descriptor(HorocycleDescriptor(-1.5, 0.25))
        assert h.descriptor().base == pytest.approx(-1.5)
        assert h.descriptor().size == pytest.approx(0.25)

    def test_oracle_unit(self):
        d1 = HorocycleDescriptor(None, 1.0)
        d2 = HorocycleDescriptor(0.0, 1.0)
        assert lambda_geometric_oracle(d1, d2) == pytest.approx(1.0)

    @given(st.floats(min_value=-5, max_value=5), st.floats(min_value=0.2, max_value=5),
           st.floats(min_value=-5, max_value=5), st.floats(min_value=0.2, max_value=5))
    def test_oracle_matches_determinant(self, x1, y1, x2, y2):
        h1, h2 = Horocycle(x1, y1), Horocycle(x2, y2)
        expected = lambda_distance(h1, h2)
        assume(expected >= 0.05)
        got = lambda_geometric_oracle(h1.descriptor(), h2.descriptor())
        assert got == pytest.approx(expected, rel=1e-7)

    def test_oracle_same_base(self):
        with pytest.raises(DomainError):
            lambda_geometric_oracle(HorocycleDescriptor(1.0, 1.0), HorocycleDescriptor(1.0, 2.0))


class TestTranslationLength:

    def test_length(self):
        g = Mat2(2.0, 0.0, 0.0, 0.5)
        assert translation_length(g) == pytest.approx(2 * math.log(2))

    def test_projective_input(self):
        assert translation_length(ProjMat(-diagonal(3.0))) == pytest.approx(2 * math.log(3))

    @pytest.mark.parametrize("g", [gen_u(5.0), gen_w(2.0), Mat2.identity(exact=False)])
    def test_not_hyperbolic(self, g):
        with pytest.raises(NotHyperbolic):
            translation_length(g)
