"""Perturbation benchmarks for multi-step rule reasoning."""

from .inference import EntailmentStatus, Question, answer, entails, forward_chain, is_consistent
from .logic import And, Atom, Fact, FalseConst, Implies, Not, Or, Rule, Theory, TrueConst
from .rewrite import Law

__version__ = "0.1.0"

__all__ = [
    "And", "Atom", "EntailmentStatus", "Fact", "FalseConst", "Implies", "Law", "Not", "Or",
    "Question", "Rule", "Theory", "TrueConst", "answer", "entails", "forward_chain", "is_consistent",
]
