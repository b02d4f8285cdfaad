"""Two-interface weighted and Markov automata.

A weighted automaton has a left and a right interface alphabet, each with a
designated null symbol, and a family of nonnegative square matrices indexed
by pairs of interface symbols.  Summing the family gives the total matrix;
when its rows sum to 1 the automaton is Markov and the entries are
transition probabilities.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .matrix import (EXACT, FLOAT, FLOAT_TOL, Matrix, ModeMismatchError,
                     coerce, row_vector_product, scalar_str)

#: the null-signal symbol name used by every alphabet
EPS = "eps"


class InvalidAutomatonError(ValueError):
    """Raised when an operation's precondition on an automaton fails."""


def label_parts(label):
    """Flatten a state label or composite symbol into a tuple of atoms."""
    return label if isinstance(label, tuple) else (label,)


def merge_labels(a, b):
    """Concatenate two flattened labels; a singleton result collapses to its atom.

    One-state constants carry the empty label (), so they vanish from
    composite state tuples and series with them preserves labels exactly.
    """
    merged = label_parts(a) + label_parts(b)
    return merged[0] if len(merged) == 1 else merged


def label_str(label):
    if isinstance(label, tuple):
        return "(%s)" % ",".join(label_str(p) for p in label)
    return str(label)


class Alphabet:
    """Finite interface alphabet with a designated null symbol.

    Equality ignores the name: two alphabets are interchangeable exactly
    when they list the same symbols with the same null symbol.
    """

    __slots__ = ("name", "symbols", "epsilon")

    def __init__(self, name, symbols, epsilon=EPS):
        symbols = tuple(symbols)
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet %s has duplicate symbols" % name)
        if epsilon not in symbols:
            raise ValueError("alphabet %s lacks its null symbol %r" % (name, epsilon))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "epsilon", epsilon)

    def __setattr__(self, name, value):
        raise AttributeError("Alphabet is immutable")

    def __contains__(self, symbol):
        return symbol in self.symbols

    def __len__(self):
        return len(self.symbols)

    def __eq__(self, other):
        if not isinstance(other, Alphabet):
            return NotImplemented
        return self.symbols == other.symbols and self.epsilon == other.epsilon

    def __hash__(self):
        return hash((self.symbols, self.epsilon))

    def __repr__(self):
        return "Alphabet(%r, %r)" % (self.name, list(self.symbols))

    @property
    def epsilon_index(self):
        return self.symbols.index(self.epsilon)

    def product(self, other):
        """Product alphabet with flattened tuple symbols and paired null symbol."""
        symbols = tuple(merge_labels(a, b) for a in self.symbols for b in other.symbols)
        return Alphabet("(%sx%s)" % (self.name, other.name), symbols,
                        merge_labels(self.epsilon, other.epsilon))

    def power(self, k):
        """Word alphabet of length-k symbol tuples; null symbol is the all-eps word."""
        if k < 0:
            raise ValueError("negative power")
        words = [()]
        for _ in range(k):
            words = [w + (s,) for w in words for s in self.symbols]
        return Alphabet("%s^%d" % (self.name, k), tuple(words), (self.epsilon,) * k)


TRIVIAL = Alphabet("I", (EPS,))


class ValidationReport:
    """Outcome of structural validation; falsy when violations exist."""

    def __init__(self, violations):
        self.violations = list(violations)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return "ValidationReport(ok)" if self.ok else \
            "ValidationReport(%s)" % "; ".join(self.violations)


class WeightedAutomaton:
    """State set plus a (left symbol, right symbol)-indexed family of matrices.

    Absent label pairs denote the zero matrix.  Instances are immutable;
    all operations return new automata.
    """

    def __init__(self, left, right, states, family):
        states = tuple(states)
        if len(set(states)) != len(states):
            raise InvalidAutomatonError("duplicate state labels")
        n = len(states)
        mode = None
        fam = {}
        for (a, b), m in family.items():
            if a not in left or b not in right:
                raise InvalidAutomatonError("label pair (%s, %s) outside interfaces"
                                            % (label_str(a), label_str(b)))
            if (m.rows, m.cols) != (n, n):
                raise InvalidAutomatonError("matrix at (%s, %s) is %dx%d, expected %dx%d"
                                            % (label_str(a), label_str(b), m.rows, m.cols, n, n))
            if mode is None:
                mode = m.mode
            elif m.mode != mode:
                raise ModeMismatchError("mixed scalar modes in one automaton")
            if not m.is_zero():
                fam[a, b] = m
        self.left = left
        self.right = right
        self.states = states
        self.family = fam
        self.mode = mode if mode is not None else EXACT
        self._index = {q: i for i, q in enumerate(states)}
        self._total = None

    def __repr__(self):
        return "%s(%d states, %s -> %s)" % (
            type(self).__name__, len(self.states), self.left.name, self.right.name)

    def matrix(self, a, b):
        """The matrix at label pair (a, b); the zero matrix if absent."""
        if a not in self.left or b not in self.right:
            raise InvalidAutomatonError("label pair (%s, %s) outside interfaces"
                                        % (label_str(a), label_str(b)))
        m = self.family.get((a, b))
        if m is None:
            n = len(self.states)
            return Matrix.zero(n, n, self.mode)
        return m

    def state_index(self, q):
        """Resolve a state label (or an index) to its index."""
        if q in self._index:
            return self._index[q]
        if isinstance(q, int) and 0 <= q < len(self.states):
            return q
        raise InvalidAutomatonError("unknown state %s" % label_str(q))

    def total_matrix(self):
        """Entrywise sum of all label-pair matrices."""
        if self._total is None:
            n = len(self.states)
            total = Matrix.zero(n, n, self.mode)
            for m in self.family.values():
                total = total + m
            self._total = total
        return self._total

    # -- validation -----------------------------------------------------

    def validate(self):
        """Structural validity report: nonnegative weights, positive eps-row sums."""
        violations = []
        for (a, b), m in sorted(self.family.items(), key=lambda kv: (label_str(kv[0][0]), label_str(kv[0][1]))):
            for (i, j), v in sorted(m.entries.items()):
                if v < 0:
                    violations.append("negative entry %s at (%s, %s) state %s -> %s"
                                      % (scalar_str(v), label_str(a), label_str(b),
                                         label_str(self.states[i]), label_str(self.states[j])))
        eps_sums = self.matrix(self.left.epsilon, self.right.epsilon).row_sums()
        for i, s in enumerate(eps_sums):
            if s <= 0:
                violations.append("zero eps-row-sum at state %s" % label_str(self.states[i]))
        return ValidationReport(violations)

    def is_markov(self):
        """True iff every total-matrix row sum is 1 (exact, or within 1e-12 in float mode)."""
        report = self.validate()
        if not report:
            raise InvalidAutomatonError("invalid automaton: %s" % "; ".join(report.violations))
        if self.mode == EXACT:
            return all(s == 1 for s in self.total_matrix().row_sums())
        return all(abs(s - 1.0) <= FLOAT_TOL for s in self.total_matrix().row_sums())

    def normalize(self):
        """Divide each state's weights by its total row sum, yielding a Markov automaton."""
        report = self.validate()
        if not report:
            raise InvalidAutomatonError("cannot normalize: %s" % "; ".join(report.violations))
        sums = self.total_matrix().row_sums()
        factors = [coerce(1, self.mode) / s for s in sums]
        family = {lab: m.scale_rows(factors) for lab, m in self.family.items()}
        return MarkovAutomaton(self.left, self.right, self.states, family)

    # -- single-automaton constructions ---------------------------------

    def path_probability(self, u, v, q, q1):
        """Weight of passing q -> q1 in len(u) steps with signal words u and v.

        The k-step word construction is evaluated lazily as the product
        chain of the per-step label matrices; k = 0 is the identity.
        """
        u, v = tuple(u), tuple(v)
        if len(u) != len(v):
            raise InvalidAutomatonError("words have different lengths %d and %d" % (len(u), len(v)))
        i, j = self.state_index(q), self.state_index(q1)
        chain = Matrix.identity(len(self.states), self.mode)
        for a, b in zip(u, v):
            chain = chain @ self.matrix(a, b)
            if chain.is_zero():
                break
        return chain[i, j]

    def behaviour(self, x0, u, v):
        """Run the vector recurrence x_i = x_{i-1} @ matrix(a_i, b_i) from x0."""
        u, v = tuple(u), tuple(v)
        if len(u) != len(v):
            raise InvalidAutomatonError("words have different lengths %d and %d" % (len(u), len(v)))
        x0 = tuple(coerce(c, self.mode) for c in x0)
        if len(x0) != len(self.states):
            raise InvalidAutomatonError("initial vector length %d, expected %d"
                                        % (len(x0), len(self.states)))
        if any(c < 0 for c in x0):
            raise InvalidAutomatonError("initial vector has a negative entry")
        vectors = [x0]
        for a, b in zip(u, v):
            vectors.append(row_vector_product(vectors[-1], self.matrix(a, b)))
        return Behaviour(u, v, tuple(vectors))

    def power(self, k):
        """Materialized k-step word automaton with interfaces A^k, B^k.

        Label sets grow as |A|^k; intended for small alphabets and k only.
        """
        left = self.left.power(k)
        right = self.right.power(k)
        family = {}
        for u in left.symbols:
            for v in right.symbols:
                chain = Matrix.identity(len(self.states), self.mode)
                for a, b in zip(u, v):
                    chain = chain @ self.matrix(a, b)
                    if chain.is_zero():
                        break
                if not chain.is_zero():
                    family[u, v] = chain
        return type(self)(left, right, self.states, family)

    def reach(self, q0):
        """Restriction to the states reachable from q0 through positive weights.

        Returns (sub-automaton, mapping) where mapping[i] is the original
        index of new state i.  Visits q0 first, then breadth-first with
        neighbours in state-index order.
        """
        start = self.state_index(q0)
        total = self.total_matrix()
        succ = {}
        for (i, j), v in total.entries.items():
            if v > 0:
                succ.setdefault(i, []).append(j)
        order = [start]
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for i in frontier:
                for j in sorted(succ.get(i, ())):
                    if j not in seen:
                        seen.add(j)
                        order.append(j)
                        nxt.append(j)
            frontier = nxt
        family = {lab: m.submatrix(order, order) for lab, m in self.family.items()}
        sub = type(self)(self.left, self.right,
                         [self.states[i] for i in order], family)
        return sub, order

    # -- equality and serialization -------------------------------------

    def equals(self, other):
        """Exact structural equality: interfaces, state list, and family."""
        return (isinstance(other, WeightedAutomaton)
                and self.left == other.left and self.right == other.right
                and self.states == other.states
                and self.family == other.family)

    def transition_list(self):
        """Sorted [(a, b, q, q1, weight)] over all nonzero transitions."""
        rows = []
        for (a, b), m in self.family.items():
            for (i, j), v in m.entries.items():
                rows.append((label_str(a), label_str(b),
                             label_str(self.states[i]), label_str(self.states[j]), v))
        rows.sort(key=lambda t: t[:4])
        return rows

    def to_json_dict(self):
        return {
            "left": [label_str(s) for s in self.left.symbols],
            "right": [label_str(s) for s in self.right.symbols],
            "states": [label_str(q) for q in self.states],
            "transitions": [[a, b, q, q1, scalar_str(v)]
                            for a, b, q, q1, v in self.transition_list()],
        }

    def to_json(self):
        """Canonical JSON form with lexicographically sorted transitions."""
        return json.dumps(self.to_json_dict(), indent=2)

    def to_float(self):
        if self.mode == FLOAT:
            return self
        family = {lab: m.to_float() for lab, m in self.family.items()}
        return type(self)(self.left, self.right, self.states, family)


class MarkovAutomaton(WeightedAutomaton):
    """Weighted automaton whose total matrix is row-stochastic."""

    def __init__(self, left, right, states, family):
        super().__init__(left, right, states, family)
        if not self.is_markov():
            raise InvalidAutomatonError("total-matrix row sums are not all 1")


class Behaviour:
    """A pair of signal words and the vector trajectory they induce."""

    def __init__(self, left_word, right_word, vectors):
        if len(vectors) != len(left_word) + 1:
            raise ValueError("need %d vectors, got %d" % (len(left_word) + 1, len(vectors)))
        self.left_word = tuple(left_word)
        self.right_word = tuple(right_word)
        self.vectors = tuple(vectors)

    def __len__(self):
        return len(self.left_word)

    def final(self):
        return self.vectors[-1]

    def __repr__(self):
        return "Behaviour(k=%d, final=%s)" % (len(self), self.final(),)
