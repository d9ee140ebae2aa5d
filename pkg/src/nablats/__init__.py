"""Nabla fractional calculus on time scales.

Time scales, a small function language with symbolic derivatives, the nabla
fractional derivative, witness searches for the Rolle and mean-value
theorems, chain rules, and finite-series identities.
"""

from .errors import (DomainError, EvaluationError, InconclusiveSearch, NablaError,
                     NotDifferentiable, NoWitness, ParseError, PreconditionError)
from .fracdiff import FracOrder, NablaResult, nabla, parse_order
from .funcspec import RealFunction, parse_function
from .timescale import (ContinuousInterval, FiniteSet, PieceUnion, TimeScale, UniformGrid,
                        parse_timescale)

__version__ = "0.1.0"
