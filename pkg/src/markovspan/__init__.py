"""Compositional two-interface Markov automata.

Weighted and Markov automata with labeled left/right interfaces, the
parallel/series composition algebra with relation constants, exact
absorbing-chain deadlock analysis, a text model format, and built-in
dining-philosopher models.
"""

from .matrix import (EXACT, FLOAT, Matrix, DimensionError, ModeMismatchError,
                     SingularMatrixError)
from .automata import (EPS, TRIVIAL, Alphabet, Behaviour, InvalidAutomatonError,
                       MarkovAutomaton, WeightedAutomaton)
from .algebra import (CompositionTypeError, InvalidRelationError, Relation,
                      automata_equal, parallel, relation_automaton,
                      series_markov, series_weighted, standard_constant)
from .analysis import (AbsorbingDecomposition, ClosedSystemRequiredError,
                       ConvergenceReport, DivergenceError, NoAbsorbingStateError,
                       SimulationEstimate, absorbing_decomposition,
                       deadlock_probability, deadlock_series, find_deadlocks,
                       limit_absorption, simulate, verify_convergence)
from .dsl import (Diagnostic, ElaborationError, ModelDocument, ModelSyntaxError,
                  elaborate, parse_model, print_model)
from .models import (FORK_ALPHABET, dining, dining_initial_state,
                     dining_source, fork, phil)

__version__ = "0.1.0"
