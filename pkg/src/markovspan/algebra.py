"""Composition operations and relation constants for two-interface automata.

Parallel composition pairs interfaces and takes Kronecker products of the
label matrices; series composition synchronizes on a shared middle
interface and sums over it.  Relation constants are the one-state Markov
automata (identity, copy, merge, swap, unit, counit) generated by
relations between alphabets.
"""
from __future__ import annotations

from fractions import Fraction

from .automata import (EPS, TRIVIAL, Alphabet, InvalidAutomatonError,
                       MarkovAutomaton, WeightedAutomaton, label_str,
                       merge_labels)
from .matrix import Matrix


class CompositionTypeError(ValueError):
    """Raised when series composition is attempted across mismatched interfaces."""


class InvalidRelationError(ValueError):
    """Raised for relations violating the null-pair or subset conditions."""


class Relation:
    """A relation between two alphabets that must relate the null symbols."""

    def __init__(self, left, right, pairs):
        pairs = frozenset(pairs)
        if (left.epsilon, right.epsilon) not in pairs:
            raise InvalidRelationError("relation must contain the null pair (%s, %s)"
                                       % (label_str(left.epsilon), label_str(right.epsilon)))
        for a, b in pairs:
            if a not in left or b not in right:
                raise InvalidRelationError("pair (%s, %s) outside the alphabets"
                                           % (label_str(a), label_str(b)))
        self.left = left
        self.right = right
        self.pairs = pairs

    def __len__(self):
        return len(self.pairs)

    def converse(self):
        return Relation(self.right, self.left, {(b, a) for a, b in self.pairs})

    def __repr__(self):
        return "Relation(%s -> %s, %d pairs)" % (self.left.name, self.right.name, len(self))


def relation_automaton(rel, mode="exact"):
    """One-state Markov automaton with weight 1/|rel| at each related pair."""
    w = Fraction(1, len(rel)) if mode == "exact" else 1.0 / len(rel)
    family = {(a, b): Matrix(1, 1, {(0, 0): w}, mode) for a, b in rel.pairs}
    return MarkovAutomaton(rel.left, rel.right, [()], family)


def identity_relation(a):
    return Relation(a, a, {(s, s) for s in a.symbols})


def copy_relation(a):
    return Relation(a, a.product(a), {(s, merge_labels(s, s)) for s in a.symbols})


def merge_relation(a):
    return copy_relation(a).converse()


def swap_relation(a, b):
    return Relation(a.product(b), b.product(a),
                    {(merge_labels(x, y), merge_labels(y, x))
                     for x in a.symbols for y in b.symbols})


def unit_relation(a):
    return Relation(TRIVIAL, a.product(a),
                    {(TRIVIAL.epsilon, merge_labels(s, s)) for s in a.symbols})


def counit_relation(a):
    return unit_relation(a).converse()


_CONSTANTS = {
    "identity": identity_relation,
    "copy": copy_relation,
    "merge": merge_relation,
    "unit": unit_relation,
    "counit": counit_relation,
}


def standard_constant(kind, a, b=None, mode="exact"):
    """Build a named relation constant as a one-state Markov automaton.

    Kinds: identity, copy, merge, swap (needs both alphabets), unit, counit.
    """
    if kind == "swap":
        if b is None:
            raise ValueError("swap needs two alphabets")
        return relation_automaton(swap_relation(a, b), mode)
    try:
        make = _CONSTANTS[kind]
    except KeyError:
        raise ValueError("unknown constant kind %r" % kind) from None
    return relation_automaton(make(a), mode)


def _composite_states(q, r):
    return [merge_labels(x, y) for x in q.states for y in r.states]


def parallel(q, r):
    """Parallel composite: paired interfaces, Kronecker-product matrices.

    State and symbol tuples flatten left to right, so the composite of
    Markov automata is again Markov and built with the same class.
    """
    left = q.left.product(r.left)
    right = q.right.product(r.right)
    family = {}
    for (a, b), qm in q.family.items():
        for (c, d), rm in r.family.items():
            family[merge_labels(a, c), merge_labels(b, d)] = qm.kron(rm)
    cls = MarkovAutomaton if isinstance(q, MarkovAutomaton) and isinstance(r, MarkovAutomaton) \
        else WeightedAutomaton
    return cls(left, right, _composite_states(q, r), family)


def series_weighted(q, r):
    """Weighted series composite: sum over the shared middle interface.

    The matrix at (a, c) is the sum over middle symbols b of
    kron(q's (a,b) matrix, r's (b,c) matrix).  Requires q's right and r's
    left alphabet to coincide (same symbols, same null symbol).
    """
    if q.right != r.left:
        raise CompositionTypeError(
            "series interface mismatch: %s %r vs %s %r"
            % (q.right.name, list(q.right.symbols), r.left.name, list(r.left.symbols)))
    n = len(q.states) * len(r.states)
    family = {}
    for (a, b), qm in q.family.items():
        for (b2, c), rm in r.family.items():
            if b2 != b:
                continue
            term = qm.kron(rm)
            prev = family.get((a, c))
            family[a, c] = term if prev is None else prev + term
    return WeightedAutomaton(q.left, r.right, _composite_states(q, r), family)


def series_markov(q, r):
    """Markov series composite: weighted series followed by normalization."""
    if not isinstance(q, MarkovAutomaton) or not isinstance(r, MarkovAutomaton):
        raise InvalidAutomatonError("series_markov needs Markov automata")
    return series_weighted(q, r).normalize()


def automata_equal(q, r, state_map=None, left_map=None, right_map=None,
                   exact=True, tol=1e-12):
    """Compare two automata entrywise under optional reindexing bijections.

    Each map is a dict from q's labels to r's labels (identity if None)
    and must be a bijection onto r's labels/states.
    """
    def resolve(mapping, src, dst, what):
        if mapping is None:
            mapping = {x: x for x in src}
        if set(mapping) != set(src) or set(mapping.values()) != set(dst) \
                or len(set(mapping.values())) != len(mapping):
            raise ValueError("%s mapping is not a bijection" % what)
        return mapping

    if len(q.states) != len(r.states):
        return False
    if (len(q.left) != len(r.left)) or (len(q.right) != len(r.right)):
        return False
    smap = resolve(state_map, q.states, r.states, "state")
    lmap = resolve(left_map, q.left.symbols, r.left.symbols, "left-label")
    rmap = resolve(right_map, q.right.symbols, r.right.symbols, "right-label")
    if lmap[q.left.epsilon] != r.left.epsilon or rmap[q.right.epsilon] != r.right.epsilon:
        return False
    perm = [r.state_index(smap[s]) for s in q.states]
    for a in q.left.symbols:
        for b in q.right.symbols:
            qm = q.matrix(a, b)
            rm = r.matrix(lmap[a], rmap[b])
            for i in range(len(q.states)):
                for j in range(len(q.states)):
                    x, y = qm[i, j], rm[perm[i], perm[j]]
                    if exact:
                        if x != y:
                            return False
                    elif abs(x - y) > tol:
                        return False
    return True
