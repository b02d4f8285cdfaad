"""Built-in automata: the philosopher, the fork, and the dining ring.

The dining ring wires n philosopher/fork pairs in series, closes the loop
through a feedback wire expressed with the unit/counit constants, and
yields a closed system whose unique reachable deadlock is the all-taken
configuration.
"""
from __future__ import annotations

from functools import reduce

from .algebra import parallel, series_weighted, standard_constant
from .automata import Alphabet, InvalidAutomatonError, MarkovAutomaton
from .matrix import Matrix, scalar_str

#: the take/release signal alphabet shared by philosophers and forks
FORK_ALPHABET = Alphabet("A", ("eps", "t", "r"))

HALF = "1/2"
THIRD = "1/3"


def phil(mode="exact"):
    """The four-state philosopher: idle, take left, take right, release both.

    States 1..4 cycle take-left (t on the left), take-right (t on the
    right), release-left (r on the left), release-right (r on the right),
    each with probability 1/2, alongside a 1/2 idle self-loop.
    """
    a = FORK_ALPHABET
    fam = {
        ("eps", "eps"): Matrix(4, 4, {(i, i): HALF for i in range(4)}),
        ("t", "eps"): Matrix(4, 4, {(0, 1): HALF}),
        ("eps", "t"): Matrix(4, 4, {(1, 2): HALF}),
        ("r", "eps"): Matrix(4, 4, {(2, 3): HALF}),
        ("eps", "r"): Matrix(4, 4, {(3, 0): HALF}),
    }
    m = MarkovAutomaton(a, a, ["1", "2", "3", "4"], fam)
    return m.to_float() if mode == "float" else m


def fork(mode="exact"):
    """The three-state fork: free, taken to the left, taken to the right."""
    a = FORK_ALPHABET
    fam = {
        ("eps", "eps"): Matrix(3, 3, {(0, 0): THIRD, (1, 1): HALF, (2, 2): HALF}),
        ("t", "eps"): Matrix(3, 3, {(0, 1): THIRD}),
        ("eps", "t"): Matrix(3, 3, {(0, 2): THIRD}),
        ("r", "eps"): Matrix(3, 3, {(1, 0): HALF}),
        ("eps", "r"): Matrix(3, 3, {(2, 0): HALF}),
    }
    m = MarkovAutomaton(a, a, ["1", "2", "3"], fam)
    return m.to_float() if mode == "float" else m


def _as_components(value, default, n, what):
    if value is None:
        return [default] * n
    if isinstance(value, MarkovAutomaton):
        return [value] * n
    comps = list(value)
    if len(comps) != n:
        raise ValueError("expected %d %s components, got %d" % (n, what, len(comps)))
    return comps


def dining(n, mode="exact", phils=None, forks=None):
    """Closed system of n philosophers and n forks around a table.

    Built as unit . ((P1 . F1 . ... . Pn . Fn) x id) . counit: the chain
    alternates philosophers and forks, the identity wire feeds the right
    interface back to the left, and the unit/counit constants close both
    ends.  Composition stays weighted throughout with one final
    normalization, which gives the same Markov automaton as composing
    stepwise.  Custom philosopher/fork automata (a single automaton or one
    per seat) may replace the defaults as long as interfaces match.
    """
    if n < 1:
        raise ValueError("need at least one philosopher")
    phils = _as_components(phils, phil(mode), n, "philosopher")
    forks = _as_components(forks, fork(mode), n, "fork")
    a = FORK_ALPHABET
    for comp, what in [(p, "philosopher") for p in phils] + [(f, "fork") for f in forks]:
        if comp.left != a or comp.right != a:
            raise InvalidAutomatonError("custom %s has wrong interfaces" % what)
        if comp.mode != mode:
            raise InvalidAutomatonError("custom %s is not in %s mode" % (what, mode))
    parts = [x for pair in zip(phils, forks) for x in pair]
    chain = reduce(series_weighted, parts).normalize()
    middle = parallel(chain, standard_constant("identity", a, mode=mode))
    closed = series_weighted(series_weighted(
        standard_constant("unit", a, mode=mode), middle),
        standard_constant("counit", a, mode=mode))
    return closed.normalize()


def dining_initial_state(n):
    """The all-idle starting state (every philosopher and fork in state 1)."""
    return ("1",) * (2 * n)


def dining_source(n):
    """Model-language source text equivalent to dining(n)."""
    chain = " . ".join(["Phil . Fork"] * n)
    lines = [
        "# %d dining philosophers around a table" % n,
        "alphabet A = { eps, t, r };",
        "",
        _automaton_source("Phil", phil()),
        "",
        _automaton_source("Fork", fork()),
        "",
        "system DF%d = unit(A) . ((%s) x id(A)) . counit(A);" % (n, chain),
        "",
    ]
    return "\n".join(lines)


def _automaton_source(name, auto):
    lines = ["automaton %s [%s, %s] {" % (name, auto.left.name, auto.right.name),
             "  states: %s;" % " ".join(auto.states)]
    for a, b, q, q1, v in auto.transition_list():
        lines.append("  %s -(%s|%s)-> %s : %s;" % (q, a, b, q1, scalar_str(v)))
    lines.append("}")
    return "\n".join(lines)
