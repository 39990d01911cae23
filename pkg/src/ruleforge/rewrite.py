"""Equivalence-law rewriting of rule bodies.

Every law rewrites the outermost eligible site (pre-order, left first) and
every step is checked with a truth table before it is returned.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Optional, Union

from .logic import (
    And,
    Fact,
    Formula,
    Implies,
    Not,
    Or,
    Rule,
    equivalent,
    is_literal,
    replace_at,
    subterms,
)


class RewriteError(Exception):
    pass


class NotApplicableError(RewriteError):
    pass


class StackingError(RewriteError):
    pass


class Law(enum.Enum):
    CONTRAPOSITION = "contrapositive"
    DOUBLE_NEGATION = "double-negation"
    IMPLICATION = "implication"
    DE_MORGAN = "de-morgan"
    IDENTITY = "identity"
    COMMUTATIVITY = "commutativity"

    @classmethod
    def from_name(cls, name: str) -> Law:
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown law {name!r}; expected one of "
                             f"{', '.join(l.value for l in cls)}") from None


@dataclass(frozen=True)
class RewriteStep:
    law: Law
    site: tuple
    before: Formula
    after: Formula

    def __str__(self) -> str:
        where = "/".join(map(str, self.site)) or "root"
        return f"{self.law.value} @ {where}: {self.before}  ⇒  {self.after}"


RewriteTrace = list  # of RewriteStep


def _first(f: Formula, pred) -> Optional[tuple[tuple, Formula]]:
    for path, node in subterms(f):
        if pred(node):
            return path, node
    return None


def _de_morgan_site(node: Formula) -> bool:
    if isinstance(node, Not) and isinstance(node.operand, (And, Or)):
        return True
    return isinstance(node, Or) and isinstance(node.left, Not)


def _site(law: Law, f: Formula) -> Optional[tuple[tuple, Formula]]:
    if law in (Law.CONTRAPOSITION, Law.IMPLICATION):
        return _first(f, lambda n: isinstance(n, Implies))
    if law is Law.IDENTITY:
        hit = _first(f, lambda n: isinstance(n, Implies))
        return None if hit is None else (hit[0] + (0,), hit[1].antecedent)
    if law is Law.DOUBLE_NEGATION:
        if isinstance(f, Implies):
            return (0,), f.antecedent
        return _first(f, is_literal)
    if law is Law.DE_MORGAN:
        return _first(f, _de_morgan_site)
    if law is Law.COMMUTATIVITY:
        return _first(f, lambda n: isinstance(n, (And, Or)))
    raise ValueError(law)


def _rewrite_node(law: Law, node: Formula) -> Formula:
    if law is Law.CONTRAPOSITION:
        return Implies(Not(node.consequent), Not(node.antecedent))
    if law is Law.IMPLICATION:
        return Or(Not(node.antecedent), node.consequent)
    if law is Law.IDENTITY:
        return Or(node, node)
    if law is Law.DOUBLE_NEGATION:
        return Not(Not(node))
    if law is Law.COMMUTATIVITY:
        return type(node)(node.right, node.left)
    if law is Law.DE_MORGAN:
        if isinstance(node, Or):
            return Not(And(node.left.operand, Not(node.right)))
        inner = node.operand
        dual = Or if isinstance(inner, And) else And
        return dual(Not(inner.left), Not(inner.right))
    raise ValueError(law)


def _body(x: Union[Rule, Formula]) -> Formula:
    return x.body if isinstance(x, Rule) else x


def applicable(law: Law, rule: Union[Rule, Formula]) -> bool:
    return _site(law, _body(rule)) is not None


def rewrite_formula(f: Formula, law: Law) -> tuple[Formula, RewriteStep]:
    hit = _site(law, f)
    if hit is None:
        raise NotApplicableError(f"{law.value} does not apply to {f}")
    path, node = hit
    after = replace_at(f, path, _rewrite_node(law, node))
    if not equivalent(f, after):
        raise RewriteError(f"{law.value} broke equivalence: {f} vs {after}")
    return after, RewriteStep(law, path, f, after)


def apply_law(rule: Rule, law: Law) -> tuple[Rule, RewriteStep]:
    body, step = rewrite_formula(rule.body, law)
    return Rule(rule.id, body), step


def apply_sequence(rule: Rule, laws) -> tuple[Rule, RewriteTrace]:
    trace = []
    for law in laws:
        rule, step = apply_law(rule, law)
        trace.append(step)
    return rule, trace


def replay(trace: RewriteTrace) -> Formula:
    """Re-run a trace from its first ``before`` and return the final form."""
    if not trace:
        raise ValueError("empty trace")
    current = trace[0].before
    for step in trace:
        if current != step.before:
            raise RewriteError(f"trace is incoherent at {step}")
        current, _ = rewrite_formula(current, step.law)
    return current


def stack_laws(rule: Rule, k: int, rng: Union[int, str, random.Random]) -> tuple[Rule, RewriteTrace]:
    """Compose ``k`` laws, each drawn uniformly from those applicable to the
    current form. Deterministic in ``(rule, k, rng seed)``."""
    if not 2 <= k <= 5:
        raise ValueError(f"stack size must be in 2..5, got {k}")
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    current, trace = rule, []
    for _ in range(k):
        options = [law for law in Law if applicable(law, current)]
        if not options:
            raise StackingError(f"no law applies to {current.body}")
        current, step = apply_law(current, rng.choice(options))
        trace.append(step)
    if not equivalent(rule.body, current.body):
        raise StackingError(f"stack lost equivalence for rule {rule.id}")
    return current, trace


def commute_fact(fact: Fact) -> Fact:
    body = fact.body
    if not isinstance(body, Or):
        raise NotApplicableError(f"commutativity needs a disjunctive fact: {body}")
    return Fact(Or(body.right, body.left))

