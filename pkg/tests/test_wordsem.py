import itertools

import pytest
from hypothesis import given, settings, strategies as st

from omegact.syntax import Join, LassoWord, Omega, Prod, Star, Var, parse_formula
from omegact.wordsem import (
    derivative_cuts,
    is_omega_regex,
    up_word_in_omega_regex,
    word_in_regex,
)

a, b, q, p = Var("a"), Var("b"), Var("q"), Var("p")


def words_upto(alphabet, n):
    for k in range(n + 1):
        yield from itertools.product(alphabet, repeat=k)


class TestFiniteWords:
    def test_single_letter(self):
        assert word_in_regex(("a",), a)
        assert not word_in_regex(("b",), a)
        assert not word_in_regex((), a)

    def test_star(self):
        for k in range(4):
            assert word_in_regex(("a",) * k, Star(a))
        assert not word_in_regex(("a", "b"), Star(a))

    def test_prod_join_enumerated(self):
        e = Prod(a, Join(b, a))
        expected = {("a", "b"), ("a", "a")}
        for w in words_upto(("a", "b"), 3):
            assert word_in_regex(w, e) == (w in expected)

    @given(st.lists(st.sampled_from(["a", "b"]), max_size=6))
    @settings(max_examples=100, derandomize=True)
    def test_star_prod_law(self, letters):
        # w in (ab)* iff w is even-length alternating starting with a
        w = tuple(letters)
        e = Star(Prod(a, b))
        expected = len(w) % 2 == 0 and all(c == ("a" if i % 2 == 0 else "b") for i, c in enumerate(w))
        assert word_in_regex(w, e) == expected


class TestFragment:
    def test_accepts_fragment(self):
        assert is_omega_regex(parse_formula("(a . b)* . (a | b)^w"))

    def test_rejects_residuals_meet_omega_vars(self):
        assert not is_omega_regex(parse_formula("p/q"))
        assert not is_omega_regex(parse_formula("a & b"))
        assert not is_omega_regex(parse_formula("$x"))


class TestOmegaWords:
    def test_simple_loop(self):
        assert up_word_in_omega_regex(LassoWord((), ("a", "b")), Omega(Prod(a, b)))

    def test_not_member(self):
        assert not up_word_in_omega_regex(LassoWord((), ("a",)), Omega(b))
        assert not up_word_in_omega_regex(LassoWord((), ("a",)), Omega(Prod(a, b)))
        assert not up_word_in_omega_regex(LassoWord(("b",), ("a", "b")), Omega(Prod(a, b)))

    def test_rotation(self):
        assert up_word_in_omega_regex(LassoWord(("a",), ("b", "a")), Omega(Prod(a, b)))

    def test_prefix_product(self):
        e = Prod(q, Omega(p))
        assert up_word_in_omega_regex(LassoWord(("q",), ("p",)), e)
        assert not up_word_in_omega_regex(LassoWord((), ("p",)), e)
        assert not up_word_in_omega_regex(LassoWord(("q", "q"), ("p",)), e)

    def test_join(self):
        e = Join(Omega(a), Omega(b))
        assert up_word_in_omega_regex(LassoWord((), ("a",)), e)
        assert up_word_in_omega_regex(LassoWord((), ("b",)), e)
        assert not up_word_in_omega_regex(LassoWord((), ("a", "b")), e)

    def test_omega_power_of_epsilon_only_language_is_empty(self):
        e = Omega(Star(Prod(a, b)))
        # (ab)** still denotes (ab)-blocks; empty-language omega:
        empty_omega = Omega(Star(a))
        assert up_word_in_omega_regex(LassoWord((), ("a",)), empty_omega)
        # a*^w contains a^w (nonempty repeats); but b^w is not in it
        assert not up_word_in_omega_regex(LassoWord((), ("b",)), empty_omega)
        assert up_word_in_omega_regex(LassoWord((), ("a", "b")), e)

    def test_star_head_unbounded_cut(self):
        # cut point scan must survive heads that can absorb many periods
        e = Prod(Star(Prod(a, a)), Omega(b))
        assert up_word_in_omega_regex(LassoWord(("a", "a", "a", "a"), ("b",)), e)
        assert not up_word_in_omega_regex(LassoWord(("a", "a", "a"), ("b",)), e)

    def test_equal_languages_different_shape(self):
        # a^w and (aa)^w denote the same word set
        w = LassoWord((), ("a",))
        assert up_word_in_omega_regex(w, Omega(Prod(a, a)))
        assert up_word_in_omega_regex(LassoWord(("a",), ("a", "a")), Omega(Prod(a, a)))

    def test_derivative_cuts(self):
        # on a^w every even cut shares a configuration with cut 0
        cuts = derivative_cuts(Star(Prod(a, a)), LassoWord((), ("a",)))
        assert cuts == [0]
        # distinct prefix positions are distinct configurations
        cuts = derivative_cuts(Star(Prod(a, a)), LassoWord(("a", "a", "a", "a"), ("b",)))
        assert [c for c in cuts if c <= 4] == [0, 2, 4]

    def test_sort_guards(self):
        with pytest.raises(ValueError):
            up_word_in_omega_regex(LassoWord((), ("a",)), Star(a))
        with pytest.raises(ValueError):
            up_word_in_omega_regex(LassoWord((), ("a",)), parse_formula("(p/q)^w"))
