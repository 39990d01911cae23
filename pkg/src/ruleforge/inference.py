"""Ground-truth entailment for single-entity theories.

Two independent routes are provided. ``entails`` enumerates every assignment
over the vocabulary and is the source of all gold labels. ``forward_chain``
case-splits on disjunctive facts and chains rules to a fixpoint; it yields
human-readable derivations and serves as a cross-check.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

from .logic import (
    MAX_ATOMS,
    And,
    Atom,
    AtomBudgetError,
    Formula,
    Implies,
    Or,
    Theory,
    UnknownAtomError,
    fact_literals,
    ground,
    is_literal,
    truth_table,
)


class UnsupportedRuleForm(ValueError):
    pass


class EntailmentStatus(enum.Enum):
    ENTAILED = "entailed"
    NOT_ENTAILED = "not-entailed"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class Question:
    subject: str
    attribute: str
    gold: Optional[bool] = None

    @property
    def label(self) -> str:
        return to_label(self.gold)


def to_label(value: bool) -> str:
    return "T" if value else "F"


def _check_budget(theory: Theory) -> None:
    if len(theory.vocabulary) > MAX_ATOMS:
        raise AtomBudgetError(
            f"{len(theory.vocabulary)} attributes exceeds the budget of {MAX_ATOMS}")


@lru_cache(maxsize=4096)
def model_mask(theory: Theory) -> int:
    """Bitset of the assignments satisfying every fact and grounded rule."""
    _check_budget(theory)
    atoms = theory.vocabulary
    mask = (1 << (1 << len(atoms))) - 1
    for fact in theory.facts:
        mask &= truth_table(fact.body, atoms)
    for rule in theory.rules:
        mask &= truth_table(ground(rule, theory.entity), atoms)
    return mask


def is_consistent(theory: Theory) -> bool:
    return model_mask(theory) != 0


def entails(theory: Theory, attribute: str) -> EntailmentStatus:
    if attribute not in theory.vocabulary:
        raise UnknownAtomError(f"attribute {attribute!r} not in vocabulary")
    models = model_mask(theory)
    if not models:
        return EntailmentStatus.INCONSISTENT
    atom_true = truth_table(Atom(attribute), theory.vocabulary)
    if models & ~atom_true == 0:
        return EntailmentStatus.ENTAILED
    return EntailmentStatus.NOT_ENTAILED


ANSWER_POLICIES = ("conservative", "priority", "paraconsistent")


def answer(theory: Theory, question: Question, policy: str = "conservative") -> bool:
    """Closed-world answer: true only when the attribute is entailed.

    Under the conservative policy an inconsistent theory answers false to
    every question. The other named policies are reserved.
    """
    if policy not in ANSWER_POLICIES:
        raise ValueError(f"unknown answer policy {policy!r}")
    if policy != "conservative":
        raise NotImplementedError(f"answer policy {policy!r} is not implemented")
    return entails(theory, question.attribute) is EntailmentStatus.ENTAILED


def answer_all(theory: Theory, questions: Iterable[Question]) -> tuple[bool, ...]:
    return tuple(answer(theory, q) for q in questions)


def essential_rules(theory: Theory, questions) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Split rule ids into (essential, redundant) by single-rule deletion."""
    questions = list(questions)
    reference = answer_all(theory, questions)
    essential, redundant = [], []
    for rule in theory.rules:
        if answer_all(theory.without_rule(rule.id), questions) == reference:
            redundant.append(rule.id)
        else:
            essential.append(rule.id)
    return tuple(essential), tuple(redundant)


# -- case-split forward chaining ------------------------------------------

Literal = tuple[str, bool]


def _literal(f: Formula) -> Literal:
    if isinstance(f, Atom):
        return (f.name, True)
    return (f.operand.name, False)


def _literal_group(f: Formula, op) -> Optional[tuple[Literal, ...]]:
    if is_literal(f):
        return (_literal(f),)
    if isinstance(f, op):
        left = _literal_group(f.left, op)
        right = _literal_group(f.right, op)
        if left is not None and right is not None:
            return left + right
    return None


@dataclass(frozen=True)
class _ChainRule:
    id: str
    any_of: bool  # antecedent is a disjunction
    antecedent: tuple[Literal, ...]
    consequent: tuple[Literal, ...]

    def fires(self, known: set) -> bool:
        test = any if self.any_of else all
        return test(lit in known for lit in self.antecedent)


def _compile_rule(rule) -> _ChainRule:
    body = rule.body
    if not isinstance(body, Implies):
        raise UnsupportedRuleForm(f"rule {rule.id} is not an implication: {body}")
    ante = _literal_group(body.antecedent, And)
    any_of = False
    if ante is None:
        ante = _literal_group(body.antecedent, Or)
        any_of = True
    cons = _literal_group(body.consequent, And)
    if ante is None or cons is None:
        raise UnsupportedRuleForm(f"rule {rule.id} has an unsupported shape: {body}")
    return _ChainRule(rule.id, any_of, ante, cons)


@dataclass(frozen=True)
class Step:
    rule_id: str
    literal: Literal

    def __str__(self) -> str:
        name, positive = self.literal
        return f"{self.rule_id}: {'' if positive else 'not '}{name}"


@dataclass
class Branch:
    """One case of the split: the literals assumed and what chaining derived."""

    assumptions: tuple[Literal, ...]
    steps: list[Step] = field(default_factory=list)
    known: set = field(default_factory=set)
    closed: bool = False

    def positives(self) -> frozenset:
        return frozenset(name for name, pos in self.known if pos)


@dataclass
class ChainResult:
    entailed: frozenset
    branches: list[Branch]
    inconsistent: bool

    @property
    def trace(self) -> list[list[Step]]:
        return [b.steps for b in self.branches]


def _saturate(branch: Branch, rules: list[_ChainRule]) -> None:
    for lit in branch.assumptions:
        branch.known.add(lit)
    changed = True
    while changed and not branch.closed:
        changed = False
        for rule in rules:
            if not rule.fires(branch.known):
                continue
            for lit in rule.consequent:
                if lit in branch.known:
                    continue
                branch.known.add(lit)
                branch.steps.append(Step(rule.id, lit))
                changed = True
                if (lit[0], not lit[1]) in branch.known:
                    branch.closed = True
                    break
            if branch.closed:
                break
    if not branch.closed:
        branch.closed = any((n, not p) in branch.known for n, p in branch.known)


def _pending_decision(branch: Branch, rules: list[_ChainRule]) -> Optional[str]:
    # A negative antecedent literal about an undecided atom would be true in
    # the minimal model without being derived; split on such atoms.
    for rule in rules:
        if rule.fires(branch.known):
            continue
        for name, positive in rule.antecedent:
            if not positive and (name, True) not in branch.known \
                    and (name, False) not in branch.known:
                return name
    return None


def _explore(assumptions: tuple, rules: list[_ChainRule]) -> list[Branch]:
    branch = Branch(assumptions)
    _saturate(branch, rules)
    if branch.closed:
        return [branch]
    name = _pending_decision(branch, rules)
    if name is None:
        return [branch]
    return (_explore(assumptions + ((name, True),), rules)
            + _explore(assumptions + ((name, False),), rules))


def forward_chain(theory: Theory) -> ChainResult:
    """Case-split forward chaining to fixpoint.

    Rules must be implications whose antecedent is a literal, a conjunction
    or a disjunction of literals and whose consequent is a literal or a
    conjunction of literals. Branches follow fact disjunct order; an atom
    tested negatively by some rule and left undecided is split further.
    """
    rules = [_compile_rule(r) for r in theory.rules]
    cases = [[_literal(lit) for lit in fact_literals(f.body)] for f in theory.facts]
    branches: list[Branch] = []
    for choice in itertools.product(*cases):
        branches.extend(_explore(tuple(choice), rules))
    open_branches = [b for b in branches if not b.closed]
    if not open_branches:
        return ChainResult(frozenset(), branches, True)
    entailed = frozenset.intersection(*(b.positives() for b in open_branches))
    return ChainResult(entailed, branches, False)
