"""Single-automaton constructions: totals, normalization, paths, reachability."""
import random
from fractions import Fraction
from itertools import product

import pytest

from markovspan.automata import (Alphabet, InvalidAutomatonError,
                                 MarkovAutomaton, WeightedAutomaton)
from markovspan.matrix import Matrix
from markovspan.models import dining, dining_initial_state, fork, phil

from conftest import make_alphabet, random_markov, random_weighted

F = Fraction

PHIL_TOTAL = [["1/2", "1/2", 0, 0],
              [0, "1/2", "1/2", 0],
              [0, 0, "1/2", "1/2"],
              ["1/2", 0, 0, "1/2"]]
FORK_TOTAL = [["1/3", "1/3", "1/3"],
              ["1/2", "1/2", 0],
              ["1/2", 0, "1/2"]]


class TestTotalMatrix:
    def test_phil(self):
        assert phil().total_matrix() == Matrix.from_rows(PHIL_TOTAL)

    def test_fork(self):
        assert fork().total_matrix() == Matrix.from_rows(FORK_TOTAL)

    def test_single_label_automaton(self):
        a = Alphabet("A", ["eps"])
        m = Matrix.from_rows([["1/2", "1/2"], [1, 0]])
        w = WeightedAutomaton(a, a, ["p", "q"], {("eps", "eps"): m})
        assert w.total_matrix() == m


class TestValidate:
    def test_phil_ok(self):
        assert phil().validate().ok

    def test_negative_entry(self):
        p = phil()
        fam = dict(p.family)
        fam["t", "eps"] = Matrix(4, 4, {(0, 1): F(-1, 2)})
        bad = WeightedAutomaton(p.left, p.right, p.states, fam)
        report = bad.validate()
        assert not report.ok
        assert any("negative entry" in v for v in report.violations)

    def test_zero_eps_row(self):
        p = phil()
        fam = dict(p.family)
        fam["eps", "eps"] = Matrix(4, 4, {(i, i): F(1, 2) for i in range(1, 4)})
        bad = WeightedAutomaton(p.left, p.right, p.states, fam)
        report = bad.validate()
        assert any("zero eps-row-sum at state 1" in v for v in report.violations)


class TestIsMarkov:
    def test_phil_and_fork(self):
        assert phil().is_markov()
        assert fork().is_markov()

    def test_doubled_weights(self):
        p = phil()
        doubled = WeightedAutomaton(p.left, p.right, p.states,
                                    {lab: m.scaled(2) for lab, m in p.family.items()})
        assert not doubled.is_markov()


class TestNormalize:
    def test_markov_fixed_point(self):
        assert phil().normalize().equals(phil())

    def test_single_row(self):
        a = Alphabet("A", ["eps"])
        w = WeightedAutomaton(a, a, ["q"], {("eps", "eps"): Matrix.from_rows([[2]])})
        assert w.normalize().matrix("eps", "eps")[0, 0] == 1

    def test_row_scaled_fork(self):
        f = fork()
        scaled = WeightedAutomaton(f.left, f.right, f.states,
                                   {lab: m.scale_rows([F(5), F(1), F(1)])
                                    for lab, m in f.family.items()})
        assert scaled.normalize().equals(f)

    def test_idempotent(self, rng):
        for _ in range(50):
            a = make_alphabet("A", rng.randint(1, 3))
            b = make_alphabet("B", rng.randint(1, 3), "b")
            w = random_weighted(rng, a, b)
            once = w.normalize()
            assert once.normalize().equals(once)

    def test_per_state_scaling_invariance(self, rng):
        for _ in range(50):
            a = make_alphabet("A", rng.randint(1, 3))
            b = make_alphabet("B", rng.randint(1, 3), "b")
            w = random_weighted(rng, a, b)
            factors = [F(rng.randint(1, 9), rng.randint(1, 9))
                       for _ in w.states]
            scaled = WeightedAutomaton(a, b, w.states,
                                       {lab: m.scale_rows(factors)
                                        for lab, m in w.family.items()})
            assert scaled.normalize().equals(w.normalize())

    def test_zero_row_rejected(self):
        a = Alphabet("A", ["eps"])
        w = WeightedAutomaton(a, a, ["p", "q"],
                              {("eps", "eps"): Matrix(2, 2, {(0, 0): 1})})
        with pytest.raises(InvalidAutomatonError):
            w.normalize()


class TestPathProbability:
    def test_take_both_forks(self):
        assert phil().path_probability(["t", "eps"], ["eps", "t"], "1", "3") == F(1, 4)

    def test_empty_words(self):
        assert phil().path_probability([], [], "2", "2") == 1
        assert phil().path_probability([], [], "2", "3") == 0

    def test_zero_label_matrix(self):
        for q1 in phil().states:
            assert phil().path_probability(["r"], ["t"], "1", q1) == 0

    def test_unequal_lengths(self):
        with pytest.raises(InvalidAutomatonError):
            phil().path_probability(["t"], [], "1", "1")

    def test_word_sum_is_one_for_markov(self, rng):
        # total over all word pairs and targets is 1 from every state
        for _ in range(5):
            a = make_alphabet("A", 2)
            b = make_alphabet("B", 2, "b")
            m = random_markov(rng, a, b, 2)
            for k in range(4):
                for q in m.states:
                    s = sum(m.path_probability(u, v, q, q1)
                            for u in product(a.symbols, repeat=k)
                            for v in product(b.symbols, repeat=k)
                            for q1 in m.states)
                    assert s == 1

    def test_word_sum_matches_matrix_power(self, rng):
        for _ in range(5):
            a = make_alphabet("A", rng.randint(1, 3))
            b = make_alphabet("B", rng.randint(1, 3), "b")
            w = random_weighted(rng, a, b, 2)
            for k in range(4):
                power = w.total_matrix().pow(k)
                for i, q in enumerate(w.states):
                    for j, q1 in enumerate(w.states):
                        s = sum(w.path_probability(u, v, q, q1)
                                for u in product(a.symbols, repeat=k)
                                for v in product(b.symbols, repeat=k))
                        assert s == power[i, j]


class TestMaterializedPower:
    def test_total_is_matrix_power(self, rng):
        for _ in range(5):
            a = make_alphabet("A", 2)
            b = make_alphabet("B", 2, "b")
            w = random_weighted(rng, a, b, 2)
            for k in (0, 1, 2):
                assert w.power(k).total_matrix() == w.total_matrix().pow(k)

    def test_power_of_markov_is_markov(self, rng):
        m = random_markov(rng, make_alphabet("A", 2), make_alphabet("B", 2, "b"), 3)
        assert isinstance(m.power(2), MarkovAutomaton)

    def test_epsilon_word(self):
        p2 = phil().power(2)
        assert p2.left.epsilon == ("eps", "eps")


class TestBehaviour:
    def test_single_step(self):
        b = phil().behaviour((1, 0, 0, 0), ["t"], ["eps"])
        assert b.vectors == ((1, 0, 0, 0), (0, F(1, 2), 0, 0))

    def test_empty(self):
        b = phil().behaviour((1, 0, 0, 0), [], [])
        assert b.vectors == ((1, 0, 0, 0),)

    def test_zero_matrix_kills_mass(self):
        b = phil().behaviour((1, 0, 0, 0), ["r"], ["t"])
        assert b.final() == (0, 0, 0, 0)

    def test_negative_start_rejected(self):
        with pytest.raises(InvalidAutomatonError):
            phil().behaviour((-1, 0, 0, 0), [], [])

    def test_non_distribution_allowed(self):
        b = phil().behaviour((2, 3, 0, 0), ["eps"], ["eps"])
        assert b.final() == (1, F(3, 2), 0, 0)


class TestReach:
    def test_df2_reachable_states(self):
        sub, _ = dining(2).reach(dining_initial_state(2))
        expected = {("1", "1", "1", "1"), ("1", "3", "3", "2"), ("3", "2", "1", "3"),
                    ("1", "1", "4", "2"), ("4", "2", "1", "1"), ("1", "3", "2", "1"),
                    ("2", "1", "1", "3"), ("2", "3", "2", "3")}
        assert set(sub.states) == expected
        assert sub.states[0] == ("1", "1", "1", "1")

    def test_deadlock_reaches_only_itself(self):
        sub, _ = dining(2).reach(("2", "3", "2", "3"))
        assert sub.states == (("2", "3", "2", "3"),)

    def test_strongly_connected_is_identity(self):
        assert phil().reach("1")[0].equals(phil())

    def test_mapping_points_at_original_indices(self):
        d = dining(2)
        sub, mapping = d.reach(dining_initial_state(2))
        assert [d.states[i] for i in mapping] == list(sub.states)

    def test_restriction_stays_markov(self, rng):
        for _ in range(20):
            a = Alphabet("A", ["eps"])
            m = random_markov(rng, a, a)
            sub, _ = m.reach(m.states[rng.randrange(len(m.states))])
            assert sub.is_markov()


def test_canonical_json_round_trip():
    import json
    payload = json.loads(phil().to_json())
    assert payload["states"] == ["1", "2", "3", "4"]
    assert payload["transitions"] == sorted(payload["transitions"])
    assert ["t", "eps", "1", "2", "1/2"] in payload["transitions"]
