from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from penner_closed.config import Config
from penner_closed.errors import DomainError, NotALoop, StepTooCoarse
from penner_closed.lifting import (
    DEGENERATE,
    EQUILATERAL,
    REGIMES,
    STRICT,
    U,
    V,
    VIOLATED,
    GeneratorWord,
    half_turn_substitution,
    hexagon_word,
    lemma1_word,
    lemma2_word,
    lemma3_expected,
    lemma3_regime,
    regime_instance,
    solve_hex,
    solve_tetr,
    verify_lemma1,
    verify_lemma2,
    verify_lemma3,
    winding,
)
from penner_closed.sl2core import Mat2, gen_u, gen_v, product

positive = st.fractions(min_value=Fraction(1, 4), max_value=8)


class TestGeneratorWord:

    def test_zero_atoms_dropped(self):
        word = GeneratorWord.of((U, 0), (V, 2), (U, 0))
        assert len(word) == 1

    def test_bad_kind(self):
        with pytest.raises(DomainError):
            GeneratorWord.of(("W", 1))

    def test_inverse_endpoint(self):
        word = GeneratorWord.of((V, 2), (U, Fraction(1, 3)), (V, -1))
        assert word.endpoint() * word.inverse().endpoint() == Mat2.identity()

    def test_rotate(self):
        word = lemma1_word(2)
        assert str(word.rotate(1)) == "U(1) V(-2) U(1) V(-2)"

    def test_endpoint_exact(self):
        word = GeneratorWord.of((V, 1), (U, 1))
        assert word.is_exact()
        assert word.endpoint() == product([gen_v(1), gen_u(1)])


class TestWinding:

    def test_empty(self):
        assert winding(GeneratorWord()).n == 0

    def test_lemma1_example(self):
        word = GeneratorWord.of((V, -2), (U, 1), (V, -2), (U, 1))
        assert word.endpoint().scalar_sign() == -1
        result = winding(word)
        assert result.n == 1
        assert result.residual < 0.01

    @pytest.mark.parametrize("x", [Fraction(1, 8), Fraction(1, 2), 1, 2, 8])
    def test_lemma1(self, x):
        assert verify_lemma1(x).n == 1

    def test_lemma1_float(self):
        assert verify_lemma1(0.37).n == 1

    def test_word_and_inverse(self):
        word = GeneratorWord.of((V, 3), (U, -1), (V, Fraction(1, 2)))
        assert winding(word + word.inverse()).n == 0

    def test_cyclic_permutation(self):
        word = lemma1_word(3)
        assert [winding(word.rotate(k)).n for k in range(4)] == [1, 1, 1, 1]

    def test_additive(self):
        word = lemma1_word(2)
        assert winding(word + lemma1_word(Fraction(1, 2))).n == 2
        assert winding(word + word.inverse() + word).n == 1

    def test_half_turn(self):
        replacement, sign = half_turn_substitution(2)
        assert sign == -1
        assert replacement.endpoint() == -gen_v(2)
        loop = GeneratorWord.of((V, 2)) + replacement.inverse()
        assert winding(loop).n == -1

    def test_not_a_loop(self):
        with pytest.raises(NotALoop):
            winding(GeneratorWord.of((U, 1)))

    def test_not_a_loop_float(self):
        with pytest.raises(NotALoop):
            winding(GeneratorWord.of((V, 0.5), (U, 0.25)))

    def test_too_coarse(self):
        config = Config({"lifting": {"initial_steps": 1, "max_depth": 0, "max_step_angle": 0.01}})
        assert config.validate() == []
        with pytest.raises(StepTooCoarse):
            winding(lemma1_word(2), config)

    @pytest.mark.parametrize("word, expected", [
        (lemma2_word((2, 5, 7)), 0),
        (lemma2_word((Fraction(1, 4), Fraction(353, 68), Fraction(353, 68))), 0),
        (lemma1_word(3), 1),
        (hexagon_word((5, 1, 1), solve_hex((5, 1, 1), -1)), -1),
        (hexagon_word((2, 3, 4), solve_hex((2, 3, 4), 1)), -2),
    ])
    def test_independent_of_start_direction(self, word, expected):
        grid = [float(a) for a in np.linspace(0.0, np.pi, 48, endpoint=False)]
        for steps in (1, 4, 16):
            config = Config({"lifting": {"initial_steps": steps, "start_angles": grid}})
            assert winding(word, config).n == expected

    def test_large_parameter_single_step(self):
        # v(1000) alone turns the line by nearly pi
        word = GeneratorWord.of((V, 1000), (V, -1000))
        config = Config({"lifting": {"initial_steps": 1, "start_angles": [0.01, 1.5, 3.1]}})
        assert winding(word, config).n == 0

    def test_independent_of_subdivision(self):
        coarse = Config({"lifting": {"initial_steps": 2}})
        fine = Config({"lifting": {"initial_steps": 64, "start_angles": [0.1, 0.9, 1.7, 2.9]}})
        word = hexagon_word((1, 1, 1), solve_hex((1, 1, 1), 1))
        assert winding(word, coarse).n == winding(word, fine).n == -2


class TestLemma2:

    def test_solve_tetr_ones(self):
        x1, x2, x3 = solve_tetr((1, 1, 1))
        assert (x1, x2, x3) == (Fraction(1, 3), 3, Fraction(1, 3))
        assert product([gen_v(1), gen_u(1), gen_v(1)]) == product([gen_u(x1), gen_v(x2), gen_u(x3)])

    @pytest.mark.parametrize("x", [(1, 1, 1), (2, 5, 7)])
    def test_examples(self, x):
        assert lemma2_word(x).endpoint() == Mat2.identity()
        assert verify_lemma2(x).n == 0

    @settings(max_examples=20, deadline=None)
    @given(positive, positive, positive)
    def test_random(self, x1, x2, x3):
        assert verify_lemma2((x1, x2, x3)).n == 0

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            solve_tetr((1, -1, 1))


class TestLemma3:

    @pytest.mark.parametrize("x, eps, expected", [
        ((1, 1, 1), -1, (1, 1, 1)),
        ((2, 1, 1), -1, (0, 1, 1)),
        ((1, 1, 1), 1, (3, 3, 3)),
        ((5, 1, 1), -1, (-3, 1, 1)),
    ])
    def test_solve_hex_examples(self, x, eps, expected):
        xbar = solve_hex(x, eps)
        assert xbar == expected
        assert hexagon_word(x, xbar).endpoint().scalar_sign() == eps

    def test_solve_hex_bad_epsilon(self):
        with pytest.raises(DomainError):
            solve_hex((1, 1, 1), 0)

    @settings(max_examples=100, deadline=None)
    @given(positive, positive, positive, st.sampled_from([1, -1]))
    def test_solve_hex_exact(self, x1, x2, x3, eps):
        xbar = solve_hex((x1, x2, x3), eps)
        assert hexagon_word((x1, x2, x3), xbar).endpoint() == Mat2(eps, 0, 0, eps)

    def test_expected_table(self):
        assert lemma3_expected(1) == -2
        assert lemma3_expected(-1) == -1

    @pytest.mark.parametrize("x, eps, expected", [
        ((1, 1, 1), 1, -2),
        ((5, 1, 1), -1, -1),
        ((2, 1, 1), -1, -1),
        ((1, 1, 1), -1, -1),
        ((2, 3, 4), 1, -2),
    ])
    def test_examples(self, x, eps, expected):
        assert verify_lemma3(x, eps).n == expected

    @pytest.mark.parametrize("regime", REGIMES)
    @pytest.mark.parametrize("eps", [1, -1])
    def test_regimes(self, regime, eps):
        rng = np.random.default_rng([11, REGIMES.index(regime)])
        for _ in range(5):
            x = regime_instance(regime, rng)
            assert lemma3_regime(x) == regime
            assert verify_lemma3(x, eps).n == lemma3_expected(eps)

    def test_regime_classification(self):
        assert lemma3_regime((1, 1, 1)) == EQUILATERAL
        assert lemma3_regime((1, 2, 1)) == DEGENERATE
        assert lemma3_regime((1, 1, 5)) == VIOLATED
        assert lemma3_regime((2, 3, 4)) == STRICT

    def test_unknown_regime(self, rng):
        with pytest.raises(DomainError):
            regime_instance("obtuse", rng)
