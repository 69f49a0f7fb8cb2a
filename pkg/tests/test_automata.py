import itertools
import random

import pytest

from omegact.automata import (
    BuchiAutomaton,
    Nfa,
    buchi_complement,
    buchi_complement_ramsey,
    buchi_emptiness,
    buchi_inclusion,
    buchi_intersection,
    dump_automaton,
    nfa_inclusion,
    omega_regex_to_buchi,
    prune_buchi,
    rank_complement_bound,
    regex_to_nfa,
    unify_alphabets,
    up_word_in_buchi,
)
from omegact.syntax import Join, LassoWord, Omega, Prod, Star, Var, parse_formula
from omegact.wordsem import up_word_in_omega_regex, word_in_regex

a, b, q, p = Var("a"), Var("b"), Var("q"), Var("p")


def words_upto(alphabet, n):
    for k in range(n + 1):
        yield from itertools.product(alphabet, repeat=k)


def random_buchi(rng, n_states=3, alphabet=("a", "b")):
    states = frozenset(range(n_states))
    transitions = set()
    for s in range(n_states):
        for c in alphabet:
            for t in range(n_states):
                if rng.random() < 0.4:
                    transitions.add((s, c, t))
    return BuchiAutomaton(
        states,
        frozenset(alphabet),
        frozenset(transitions),
        frozenset({0}),
        frozenset(rng.sample(range(n_states), rng.randint(0, n_states))),
    )


def random_lasso(rng, alphabet=("a", "b"), max_len=3):
    u = tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))
    v = tuple(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))
    return LassoWord(u, v)


class TestNfa:
    def test_var(self):
        n = regex_to_nfa(a)
        assert len(n.states) == 2
        assert n.accepts(("a",))
        assert not n.accepts(()) and not n.accepts(("a", "a")) and not n.accepts(("b",))

    def test_star(self):
        n = regex_to_nfa(Star(a))
        for k in range(4):
            assert n.accepts(("a",) * k)
        assert not n.accepts(("a", "b"))

    def test_prod_join_enumerated(self):
        e = Prod(a, Join(b, a))
        n = regex_to_nfa(e)
        expected = {("a", "b"), ("a", "a")}
        for w in words_upto(("a", "b"), 3):
            assert n.accepts(w) == (w in expected)

    @pytest.mark.parametrize(
        "expr",
        [
            "a",
            "a*",
            "a . b",
            "(a | b)*",
            "a* . b",
            "(a . b)* | a",
            "a* . (b . a)*",
            "(a | b) . (a | b) . a*",
        ],
    )
    def test_against_derivative_matcher(self, expr):
        e = parse_formula(expr)
        n = regex_to_nfa(e)
        for w in words_upto(("a", "b"), 5):
            assert n.accepts(w) == word_in_regex(w, e), (expr, w)

    def test_nfa_inclusion(self):
        assert nfa_inclusion(regex_to_nfa(parse_formula("a . b")), regex_to_nfa(parse_formula("a* . b*"))) is None
        cx = nfa_inclusion(regex_to_nfa(parse_formula("a*")), regex_to_nfa(parse_formula("a . a*")))
        assert cx == ()  # the empty word
        cx = nfa_inclusion(regex_to_nfa(parse_formula("a | b")), regex_to_nfa(parse_formula("a")))
        assert cx == ("b",)


class TestBuchiConstruction:
    def test_omega_single_letter(self):
        B = omega_regex_to_buchi(Omega(a))
        assert up_word_in_buchi(LassoWord((), ("a",)), B)
        assert not up_word_in_buchi(LassoWord((), ("a", "b")), B.with_alphabet({"a", "b"}))

    def test_omega_prod(self):
        B = omega_regex_to_buchi(Omega(Prod(a, b)))
        assert up_word_in_buchi(LassoWord((), ("a", "b")), B)
        assert not up_word_in_buchi(LassoWord((), ("a",)), B)
        assert not up_word_in_buchi(LassoWord(("b",), ("a", "b")), B)

    def test_prefix_prod(self):
        B = omega_regex_to_buchi(Prod(q, Omega(p)))
        assert up_word_in_buchi(LassoWord(("q",), ("p",)), B)
        assert not up_word_in_buchi(LassoWord((), ("p",)), B)

    def test_rotation_membership(self):
        B = omega_regex_to_buchi(Omega(Prod(a, b)))
        assert up_word_in_buchi(LassoWord(("a",), ("b", "a")), B)

    def test_empty_omega_power_flagged(self):
        B = omega_regex_to_buchi(Omega(Star(a)))
        assert B.notes == ()
        ab = Omega(Star(Prod(a, Star(b))))
        assert omega_regex_to_buchi(ab).notes == ()
        # a language with no nonempty word: impossible to write without
        # eps/empty constants except via star-of-nothing; emulate directly
        n = Nfa(frozenset({0}), frozenset({"a"}), frozenset(), frozenset({0}), frozenset({0}))
        from omegact.automata import _buchi_omega_power

        B = _buchi_omega_power(n, ())
        assert B.notes
        assert buchi_emptiness(B) is None

    @pytest.mark.parametrize(
        "expr",
        ["a^w", "(a . b)^w", "a . b^w", "(a | b)^w", "(a* . b)^w", "a^w | (b . a^w)", "(a . (a | b))^w"],
    )
    def test_against_derivative_oracle(self, expr):
        e = parse_formula(expr)
        B = omega_regex_to_buchi(e).with_alphabet({"a", "b"})
        rng = random.Random(7)
        for _ in range(30):
            w = random_lasso(rng)
            assert up_word_in_buchi(w, B) == up_word_in_omega_regex(w, e), (expr, str(w))


class TestEmptiness:
    def test_witness(self):
        w = buchi_emptiness(omega_regex_to_buchi(Omega(a)))
        assert w == LassoWord((), ("a",))

    def test_no_accepting(self):
        B = BuchiAutomaton(
            frozenset({0}), frozenset({"a"}), frozenset({(0, "a", 0)}), frozenset({0}), frozenset()
        )
        assert buchi_emptiness(B) is None

    def test_intersection_witness_revalidates(self):
        A = omega_regex_to_buchi(Omega(Prod(a, b)))
        C = buchi_complement(omega_regex_to_buchi(Omega(b)).with_alphabet({"a", "b"}))
        A, C = unify_alphabets(A, C)
        w = buchi_emptiness(buchi_intersection(A, C))
        assert w is not None
        assert up_word_in_buchi(w, A)
        assert up_word_in_buchi(w, omega_regex_to_buchi(Omega(Prod(a, b))).with_alphabet({"a", "b"}))
        assert not up_word_in_buchi(w, omega_regex_to_buchi(Omega(b)).with_alphabet({"a", "b"}))


class TestComplement:
    def test_unary_full(self):
        B = omega_regex_to_buchi(Omega(a))
        C = buchi_complement(B)
        assert buchi_emptiness(C) is None

    def test_b_omega_in_complement(self):
        B = omega_regex_to_buchi(Omega(a)).with_alphabet({"a", "b"})
        C = buchi_complement(B)
        assert up_word_in_buchi(LassoWord((), ("b",)), C)
        assert not up_word_in_buchi(LassoWord((), ("a",)), C)

    def test_xor_membership_random(self):
        rng = random.Random(11)
        for i in range(12):
            B = random_buchi(rng)
            C = buchi_complement(B)
            for _ in range(20):
                w = random_lasso(rng)
                assert up_word_in_buchi(w, B) != up_word_in_buchi(w, C), (i, str(w))

    def test_state_bound_reported(self):
        B = omega_regex_to_buchi(parse_formula("(a . b)^w"))
        C = buchi_complement(B)
        assert len(C.states) <= rank_complement_bound(len(prune_buchi(B).states))

    def test_ramsey_agrees_with_rank(self):
        rng = random.Random(23)
        for i in range(8):
            B = random_buchi(rng)
            C1 = buchi_complement(B)
            C2 = buchi_complement_ramsey(B)
            for _ in range(15):
                w = random_lasso(rng)
                assert up_word_in_buchi(w, C1) == up_word_in_buchi(w, C2), (i, str(w))


class TestInclusion:
    def test_subalphabet(self):
        A = omega_regex_to_buchi(parse_formula("(a . b)^w"))
        B = omega_regex_to_buchi(parse_formula("(a | b)^w"))
        assert buchi_inclusion(A, B) is None

    def test_same_language_different_shape(self):
        A = omega_regex_to_buchi(parse_formula("a^w"))
        B = omega_regex_to_buchi(parse_formula("(a . a)^w"))
        assert buchi_inclusion(A, B) is None
        assert buchi_inclusion(B, A) is None
        for w in (LassoWord((), ("a",)), LassoWord(("a",), ("a", "a"))):
            assert up_word_in_buchi(w, A) and up_word_in_buchi(w, B)

    def test_counterexample(self):
        A = omega_regex_to_buchi(parse_formula("(a | b)^w"))
        B = omega_regex_to_buchi(parse_formula("a . (a | b)^w"))
        w = buchi_inclusion(A, B)
        assert w is not None
        assert w.letter(0) == "b"
        A2, B2 = unify_alphabets(A, B)
        assert up_word_in_buchi(w, A2)
        assert not up_word_in_buchi(w, B2)

    def test_construction_laws(self):
        # unfolding: L(F^w) = L(F . F^w); absorption: L(F* . F^w) = L(F^w)
        rng = random.Random(5)
        exprs = ["a", "a . b", "a | b", "b . (a | b)", "a . a"]
        for src in exprs:
            F = parse_formula(src)
            lhs = omega_regex_to_buchi(Omega(F))
            rhs = omega_regex_to_buchi(Prod(F, Omega(F)))
            assert buchi_inclusion(lhs, rhs) is None and buchi_inclusion(rhs, lhs) is None
            star = omega_regex_to_buchi(Prod(Star(F), Omega(F)))
            assert buchi_inclusion(star, lhs) is None and buchi_inclusion(lhs, star) is None
        _ = rng  # corpus is fixed; rng reserved for future widening


def test_dump_format():
    n = regex_to_nfa(a)
    text = dump_automaton(n)
    lines = text.strip().split("\n")
    assert lines[0] == "nfa 2 a"
    assert "0 a 1" in lines
    assert lines[-2] == "init: 0"
    assert lines[-1] == "acc: 1"
    B = omega_regex_to_buchi(Omega(a))
    assert dump_automaton(B).startswith("buchi ")
