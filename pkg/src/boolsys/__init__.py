"""Model checking of Boolean process models.

Boolean systems are coloured Petri nets with high/low tokens and
propositional guards.  The checker decides safeness and liveness with
respect to all high bindings by unfolding the skeleton T-system,
colouring the resulting prefix and reducing reachability questions to
propositional satisfiability.
"""

from boolsys.petri import Marking, PetriNet, fire, is_strongly_connected, is_tnet, postset, preset
from boolsys.logic import And, Const, Not, Or, Var, Xor, eval_formula, models, parse_formula, sat, to_cnf
from boolsys.boolnet import BindingElement, BooleanNet, BooleanSystem, ColouredMarking, LogicalType
from boolsys.checker import VerificationReport, verify

__all__ = [
    "And", "BindingElement", "BooleanNet", "BooleanSystem", "ColouredMarking", "Const",
    "LogicalType", "Marking", "Not", "Or", "PetriNet", "Var", "VerificationReport", "Xor",
    "eval_formula", "fire", "is_strongly_connected", "is_tnet", "models", "parse_formula",
    "postset", "preset", "sat", "to_cnf", "verify",
]

__version__ = "0.1.0"
