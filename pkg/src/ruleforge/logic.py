"""Propositional formulas over the attributes of a single entity.

Rules are stored schematically (no entity, one implicit universal variable)
and grounded on demand. Semantics are classical; equivalence is decided by
truth tables packed into Python integers, one bit per assignment.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Optional, Union

MAX_ATOMS = 16
MAX_DEPTH = 12


class LogicError(Exception):
    pass


class UnknownAtomError(LogicError, KeyError):
    """An atom is missing from the assignment or vocabulary it is checked against."""

    def __str__(self) -> str:
        return Exception.__str__(self)


class AtomBudgetError(LogicError):
    pass


@dataclass(frozen=True)
class Atom:
    name: str
    entity: Optional[str] = None

    def __str__(self) -> str:
        label = self.name.capitalize()
        return f"{label}({self.entity})" if self.entity else label


@dataclass(frozen=True)
class Not:
    operand: Formula

    def __str__(self) -> str:
        return f"¬{_wrap(self.operand)}"


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return f"{_wrap(self.left)}∧{_wrap(self.right)}"


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula

    def __str__(self) -> str:
        return f"{_wrap(self.left)}∨{_wrap(self.right)}"


@dataclass(frozen=True)
class Implies:
    antecedent: Formula
    consequent: Formula

    def __str__(self) -> str:
        return f"{_wrap(self.antecedent)}→{_wrap(self.consequent)}"


@dataclass(frozen=True)
class TrueConst:
    def __str__(self) -> str:
        return "⊤"


@dataclass(frozen=True)
class FalseConst:
    def __str__(self) -> str:
        return "⊥"


Formula = Union[Atom, Not, And, Or, Implies, TrueConst, FalseConst]
BINARY = (And, Or, Implies)


def _wrap(f: Formula) -> str:
    return f"({f})" if isinstance(f, BINARY) else str(f)


def children(f: Formula) -> tuple:
    if isinstance(f, Not):
        return (f.operand,)
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    if isinstance(f, Implies):
        return (f.antecedent, f.consequent)
    return ()


def rebuild(f: Formula, kids: tuple) -> Formula:
    """Return a node of the same connective as ``f`` with new children."""
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    return f


def subterms(f: Formula, path: tuple = ()) -> Iterator[tuple[tuple, Formula]]:
    """Pre-order walk yielding ``(path, node)``; outermost first, left first."""
    yield path, f
    for i, kid in enumerate(children(f)):
        yield from subterms(kid, path + (i,))


def replace_at(f: Formula, path: tuple, new: Formula) -> Formula:
    if not path:
        return new
    kids = list(children(f))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return rebuild(f, tuple(kids))


def depth(f: Formula) -> int:
    kids = children(f)
    return 1 + max((depth(k) for k in kids), default=0)


def is_literal(f: Formula) -> bool:
    """Atom or a single negated atom."""
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.operand, Atom))


def connectives(f: Formula) -> list[str]:
    return [type(node).__name__ for _, node in subterms(f) if not isinstance(node, Atom)]


def atoms_of(f: Formula) -> tuple[str, ...]:
    """Attribute names in first-occurrence order."""
    seen: dict[str, None] = {}
    for _, node in subterms(f):
        if isinstance(node, Atom):
            seen.setdefault(node.name)
    return tuple(seen)


def ground(f: Union[Formula, "Rule"], entity: str) -> Formula:
    if isinstance(f, Rule):
        f = f.body
    if isinstance(f, Atom):
        return Atom(f.name, entity)
    kids = children(f)
    if not kids:
        return f
    return rebuild(f, tuple(ground(k, entity) for k in kids))


def evaluate(f: Formula, assignment: Mapping[str, bool]) -> bool:
    if isinstance(f, Atom):
        try:
            return bool(assignment[f.name])
        except KeyError:
            raise UnknownAtomError(f"atom {f.name!r} not in assignment") from None
    if isinstance(f, Not):
        return not evaluate(f.operand, assignment)
    if isinstance(f, And):
        return evaluate(f.left, assignment) and evaluate(f.right, assignment)
    if isinstance(f, Or):
        return evaluate(f.left, assignment) or evaluate(f.right, assignment)
    if isinstance(f, Implies):
        return (not evaluate(f.antecedent, assignment)) or evaluate(f.consequent, assignment)
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    raise TypeError(f"not a formula: {f!r}")


# Truth tables as bitsets: bit j is the value under the assignment in which
# atom i is true iff bit i of j is set.


@lru_cache(maxsize=None)
def _atom_masks(n: int) -> tuple[int, ...]:
    rows = 1 << n
    masks = []
    for i in range(n):
        block = ((1 << (1 << i)) - 1) << (1 << i)
        period = 1 << (i + 1)
        m = 0
        for start in range(0, rows, period):
            m |= block << start
        masks.append(m)
    return tuple(masks)


def truth_table(f: Formula, atoms: tuple[str, ...]) -> int:
    if len(atoms) > MAX_ATOMS:
        raise AtomBudgetError(f"{len(atoms)} atoms exceeds the budget of {MAX_ATOMS}")
    masks = dict(zip(atoms, _atom_masks(len(atoms))))
    full = (1 << (1 << len(atoms))) - 1
    return _table(f, masks, full)


def _table(f: Formula, masks: dict, full: int) -> int:
    if isinstance(f, Atom):
        try:
            return masks[f.name]
        except KeyError:
            raise UnknownAtomError(f"atom {f.name!r} not in vocabulary") from None
    if isinstance(f, Not):
        return full ^ _table(f.operand, masks, full)
    if isinstance(f, And):
        return _table(f.left, masks, full) & _table(f.right, masks, full)
    if isinstance(f, Or):
        return _table(f.left, masks, full) | _table(f.right, masks, full)
    if isinstance(f, Implies):
        return (full ^ _table(f.antecedent, masks, full)) | _table(f.consequent, masks, full)
    if isinstance(f, TrueConst):
        return full
    if isinstance(f, FalseConst):
        return 0
    raise TypeError(f"not a formula: {f!r}")


def assignment_at(atoms: tuple[str, ...], row: int) -> dict[str, bool]:
    return {a: bool(row >> i & 1) for i, a in enumerate(atoms)}


def equivalent(f1: Formula, f2: Formula) -> bool:
    atoms = tuple(dict.fromkeys(atoms_of(f1) + atoms_of(f2)))
    if len(atoms) > MAX_ATOMS:
        raise AtomBudgetError(f"{len(atoms)} atoms exceeds the budget of {MAX_ATOMS}")
    return truth_table(f1, atoms) == truth_table(f2, atoms)


@dataclass(frozen=True)
class Rule:
    id: str
    body: Formula

    def __post_init__(self):
        if depth(self.body) > MAX_DEPTH:
            raise LogicError(f"rule {self.id} exceeds depth {MAX_DEPTH}")
        for _, node in subterms(self.body):
            if isinstance(node, Atom) and node.entity is not None:
                raise LogicError(f"rule {self.id} mentions entity {node.entity!r}")

    @property
    def quantified(self) -> bool:
        return True

    def __str__(self) -> str:
        return f"∀x({self.body})"


@dataclass(frozen=True)
class Fact:
    """A ground disjunction of one or two literals."""

    body: Formula

    def __post_init__(self):
        lits = fact_literals(self.body)
        if lits is None:
            raise LogicError(f"fact must be a disjunction of 1-2 literals: {self.body}")
        for lit in lits:
            atom = lit.operand if isinstance(lit, Not) else lit
            if atom.entity is None:
                raise LogicError(f"fact atom {atom.name!r} is not grounded")

    def __str__(self) -> str:
        return str(self.body)


def fact_literals(body: Formula) -> Optional[tuple]:
    if is_literal(body):
        return (body,)
    if isinstance(body, Or) and is_literal(body.left) and is_literal(body.right):
        return (body.left, body.right)
    return None


@dataclass(frozen=True)
class Theory:
    entity: str
    vocabulary: tuple[str, ...]
    facts: tuple[Fact, ...] = ()
    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        vocab = set(self.vocabulary)
        if len(vocab) != len(self.vocabulary):
            raise LogicError("vocabulary attributes must be distinct")
        for f in (*(x.body for x in self.facts), *(r.body for r in self.rules)):
            for name in atoms_of(f):
                if name not in vocab:
                    raise UnknownAtomError(f"atom {name!r} not in vocabulary")
        for fact in self.facts:
            for _, node in subterms(fact.body):
                if isinstance(node, Atom) and node.entity != self.entity:
                    raise LogicError(f"fact grounded to {node.entity!r}, expected {self.entity!r}")

    def without_rule(self, rule_id: str) -> Theory:
        return Theory(self.entity, self.vocabulary, self.facts,
                      tuple(r for r in self.rules if r.id != rule_id))

    def with_rules(self, rules) -> Theory:
        return Theory(self.entity, self.vocabulary, self.facts, tuple(rules))

    def with_facts(self, facts) -> Theory:
        return Theory(self.entity, self.vocabulary, tuple(facts), self.rules)

    def rule(self, rule_id: str) -> Rule:
        for r in self.rules:
            if r.id == rule_id:
                return r
        raise KeyError(rule_id)
