import random
from fractions import Fraction

import pytest

from markovspan.automata import Alphabet, WeightedAutomaton
from markovspan.matrix import Matrix


def make_alphabet(name, size, prefix="a"):
    return Alphabet(name, ["eps"] + ["%s%d" % (prefix, i) for i in range(size - 1)])


def random_fraction(rng):
    return Fraction(rng.randint(1, 6), rng.randint(1, 6))


def random_matrix(rng, n, m, density=0.5):
    entries = {(i, j): random_fraction(rng)
               for i in range(n) for j in range(m) if rng.random() < density}
    return Matrix(n, m, entries)


def random_weighted(rng, left, right, n_states=None):
    """Random valid weighted automaton: nonnegative weights, positive eps rows."""
    n = n_states or rng.randint(1, 3)
    family = {}
    for a in left.symbols:
        for b in right.symbols:
            m = random_matrix(rng, n, n, density=0.35)
            if not m.is_zero():
                family[a, b] = m
    eps = dict(family.get((left.epsilon, right.epsilon), Matrix.zero(n, n)).entries)
    for i in range(n):
        if not any(r == i for (r, _) in eps):
            eps[i, rng.randrange(n)] = random_fraction(rng)
    family[left.epsilon, right.epsilon] = Matrix(n, n, eps)
    return WeightedAutomaton(left, right, ["s%d" % i for i in range(n)], family)


def random_markov(rng, left, right, n_states=None):
    return random_weighted(rng, left, right, n_states).normalize()


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
