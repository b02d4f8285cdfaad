"""Deadlock analysis of closed Markov automata.

A closed automaton has singleton interfaces, so it is just a Markov chain.
Deadlocks are absorbing states; the total matrix reordered with deadlocks
last takes the block form [[S, T], [0, I]], and exact k-step and limiting
absorption probabilities fall out of powers of that matrix and the linear
solve (I - S) X = T.  A seeded Monte Carlo sampler cross-checks the exact
numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .automata import MarkovAutomaton, label_str
from .matrix import Matrix, SingularMatrixError
from .rng import stream


class ClosedSystemRequiredError(ValueError):
    """Raised when deadlock analysis is applied to an open automaton."""


class NoAbsorbingStateError(ValueError):
    """Raised when an absorbing decomposition is requested but no deadlock exists."""


class DivergenceError(ValueError):
    """Raised when (I - S) is singular, i.e. some transient state never absorbs."""


def _require_closed(m):
    if len(m.left) != 1 or len(m.right) != 1:
        raise ClosedSystemRequiredError(
            "deadlock analysis needs singleton interfaces, got %d and %d symbols"
            % (len(m.left), len(m.right)))


def find_deadlocks(m):
    """States whose only positive transition is their own self-loop."""
    _require_closed(m)
    total = m.total_matrix()
    out = {}
    for (i, j), v in total.entries.items():
        if v > 0:
            out.setdefault(i, set()).add(j)
    return [q for i, q in enumerate(m.states) if out.get(i) == {i}]


@dataclass(frozen=True)
class AbsorbingDecomposition:
    """Total matrix reordered to [[S, T], [0, I]] with deadlocks last."""

    transient_states: tuple
    deadlock_states: tuple
    s_block: Matrix
    t_block: Matrix
    permutation: tuple  # permutation[new] = original index

    @property
    def reordered(self):
        """The full reordered total matrix (reconstruction identity)."""
        nt, nd = len(self.transient_states), len(self.deadlock_states)
        n = nt + nd
        entries = dict()
        for (i, j), v in self.s_block.entries.items():
            entries[i, j] = v
        for (i, j), v in self.t_block.entries.items():
            entries[i, nt + j] = v
        one = 1 if self.s_block.mode == "exact" else 1.0
        for d in range(nd):
            entries[nt + d, nt + d] = one
        return Matrix(n, n, entries, self.s_block.mode)


def absorbing_decomposition(m):
    """Split the total matrix into transient and absorption blocks."""
    _require_closed(m)
    deadlocks = find_deadlocks(m)
    if not deadlocks:
        raise NoAbsorbingStateError("automaton has no deadlock state")
    dset = set(deadlocks)
    transient = [q for q in m.states if q not in dset]
    t_idx = [m.state_index(q) for q in transient]
    d_idx = [m.state_index(q) for q in deadlocks]
    total = m.total_matrix()
    return AbsorbingDecomposition(
        transient_states=tuple(transient),
        deadlock_states=tuple(deadlocks),
        s_block=total.submatrix(t_idx, t_idx),
        t_block=total.submatrix(t_idx, d_idx),
        permutation=tuple(t_idx + d_idx),
    )


def deadlock_probability(m, q0, k):
    """Probability of occupying a deadlock state after k steps from q0.

    Deadlock states are absorbing, so this equals the probability of
    hitting deadlock within k steps.  Computed on the reachable part.
    """
    _require_closed(m)
    sub, _ = m.reach(q0)
    deadlocks = find_deadlocks(sub)
    power = sub.total_matrix().pow(k)
    zero = Fraction(0) if sub.mode == "exact" else 0.0
    return sum((power[0, sub.state_index(d)] for d in deadlocks), zero)


def deadlock_series(m, q0, k_max):
    """The list [P(0), P(1), ..., P(k_max)] of k-step deadlock probabilities."""
    _require_closed(m)
    sub, _ = m.reach(q0)
    d_idx = [sub.state_index(d) for d in find_deadlocks(sub)]
    total = sub.total_matrix()
    power = Matrix.identity(len(sub.states), sub.mode)
    zero = Fraction(0) if sub.mode == "exact" else 0.0
    series = []
    for _ in range(k_max + 1):
        series.append(sum((power[0, j] for j in d_idx), zero))
        power = power @ total
    return series


def limit_absorption(m, q0):
    """Limiting absorption probabilities from q0, one per reachable deadlock.

    Solves (I - S) X = T exactly on the reachable part and returns an
    ordered mapping from deadlock state to its absorption probability.
    """
    _require_closed(m)
    sub, _ = m.reach(q0)
    dec = absorbing_decomposition(sub)
    if not dec.transient_states:
        # q0 is itself a deadlock: indicator at q0
        return {d: (1 if sub.mode == "exact" else 1.0) if d == sub.states[0] else
                (0 if sub.mode == "exact" else 0.0) for d in dec.deadlock_states}
    eye = Matrix.identity(len(dec.transient_states), dec.s_block.mode)
    try:
        x = (eye - dec.s_block).solve(dec.t_block)
    except SingularMatrixError as exc:
        raise DivergenceError("(I - S) is singular: some transient state never absorbs") from exc
    row = dec.transient_states.index(sub.states[0])
    return {d: x[row, j] for j, d in enumerate(dec.deadlock_states)}


@dataclass(frozen=True)
class ConvergenceReport:
    """Mechanical check of the three convergence-to-deadlock hypotheses."""

    unique_deadlock: bool
    deadlock_states: tuple
    return_paths: bool
    return_failure: Optional[object]
    self_loops: bool
    self_loop_failure: Optional[object]
    k0_found: Optional[int]

    @property
    def all_conditions(self):
        return self.unique_deadlock and self.return_paths and self.self_loops

    def to_json_dict(self):
        return {
            "all_conditions": self.all_conditions,
            "unique_deadlock": self.unique_deadlock,
            "deadlocks": [label_str(d) for d in self.deadlock_states],
            "return_paths": self.return_paths,
            "return_failure": None if self.return_failure is None else label_str(self.return_failure),
            "self_loops": self.self_loops,
            "self_loop_failure": None if self.self_loop_failure is None else label_str(self.self_loop_failure),
            "k0": self.k0_found,
        }


def verify_convergence(m, q0, k0_cap=None):
    """Check, on the reachable part: a unique deadlock, a positive return
    path to q0 from every non-deadlock state, and a positive self-loop at
    every state.  When all hold, also search for the smallest k with the
    absorption block of the k-th power strictly positive (capped).
    """
    _require_closed(m)
    sub, _ = m.reach(q0)
    n = len(sub.states)
    deadlocks = find_deadlocks(sub)
    dset = set(deadlocks)
    unique = len(deadlocks) == 1
    total = sub.total_matrix()

    # reverse search from q0 over positive edges
    pred = {}
    for (i, j), v in total.entries.items():
        if v > 0:
            pred.setdefault(j, []).append(i)
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for j in frontier:
            for i in pred.get(j, ()):
                if i not in seen:
                    seen.add(i)
                    nxt.append(i)
        frontier = nxt
    return_failure = next((q for i, q in enumerate(sub.states)
                           if q not in dset and i not in seen), None)

    self_loop_failure = next((q for i, q in enumerate(sub.states)
                              if total[i, i] <= 0), None)

    k0 = None
    if unique and return_failure is None and self_loop_failure is None:
        t_idx = [i for i, q in enumerate(sub.states) if q not in dset]
        d_idx = [i for i, q in enumerate(sub.states) if q in dset]
        cap = k0_cap if k0_cap is not None else n * n
        power = total
        for k in range(1, cap + 1):
            block = power.submatrix(t_idx, d_idx)
            if block.nnz() == len(t_idx) * len(d_idx) and \
                    all(v > 0 for v in block.entries.values()):
                k0 = k
                break
            power = power @ total
    return ConvergenceReport(
        unique_deadlock=unique,
        deadlock_states=tuple(deadlocks),
        return_paths=return_failure is None,
        return_failure=return_failure,
        self_loops=self_loop_failure is None,
        self_loop_failure=self_loop_failure,
        k0_found=k0,
    )


@dataclass(frozen=True)
class SimulationEstimate:
    """Monte Carlo estimate of the k-step deadlock probability."""

    trajectories: int
    hits: int
    estimate: float
    std_error: float
    seed: int

    def to_json_dict(self):
        return {
            "trajectories": self.trajectories,
            "hits": self.hits,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "seed": self.seed,
        }


def simulate(m, q0, k, n, seed):
    """Sample n independent k-step trajectories from q0; count deadlock hits.

    Trajectory i draws from its own substream of the seed, so the result
    is bitwise identical however trajectories are batched or scheduled.
    """
    _require_closed(m)
    if n < 1:
        raise ValueError("need at least one trajectory")
    sub, _ = m.reach(q0)
    dset = {sub.state_index(d) for d in find_deadlocks(sub)}
    total = sub.total_matrix().to_float()
    rows = []
    for i in range(len(sub.states)):
        cum = 0.0
        row = []
        for j, v in total.row(i):
            cum += v
            row.append((cum, j))
        rows.append(row)
    hits = 0
    for i in range(n):
        rng = stream(seed, i)
        state = 0
        for _ in range(k):
            u = rng.next_float()
            row = rows[state]
            state = row[-1][1]
            for cum, j in row:
                if u < cum:
                    state = j
                    break
        if state in dset:
            hits += 1
    estimate = hits / n
    return SimulationEstimate(
        trajectories=n,
        hits=hits,
        estimate=estimate,
        std_error=math.sqrt(estimate * (1.0 - estimate) / n),
        seed=seed,
    )
