"""P-log: probabilistic reasoning with answer set programs."""

from .bayes import BayesNet, check_cbn_theorem, cbn_violations, load_net, net_to_plog, plog_text
from .coherency import coherency_verdict, find_leveling, is_causally_ordered, is_unitary
from .errors import (
    ConditionViolation, Inconsistent, PlogError, PlogSyntaxError, ProbabilityUndefined,
    SortError,
)
from .grounding import ground
from .parser import parse_formula, parse_literal, parse_program
from .semantics import measures, possible_worlds, prob
from .tableau import build_tableau
from .updates import Update, apply_update, conditional_prob, do_update, obs_update

__all__ = [
    "BayesNet", "check_cbn_theorem", "cbn_violations", "load_net", "net_to_plog", "plog_text",
    "coherency_verdict", "find_leveling", "is_causally_ordered", "is_unitary",
    "ConditionViolation", "Inconsistent", "PlogError", "PlogSyntaxError", "ProbabilityUndefined",
    "SortError", "ground", "parse_formula", "parse_literal", "parse_program", "measures",
    "possible_worlds", "prob", "build_tableau", "Update", "apply_update", "conditional_prob",
    "do_update", "obs_update",
]
