"""Templated English for facts, rules and questions, with an exact parser.

Sentence shapes::

    If someone is <slot> then they are <slot>.
    It is not the case that someone is <slot>.      (negated and/or)
    Someone is <slot>.                              (anything else)
    <Entity> is <literal>[ or <literal>].
    <Entity> is <attribute>. True/False?

A slot is either a flat list of literals joined by " or " / " and " (as the
base data and single-law rewrites produce), or a prefix phrase in which every
nested connective is spelled out: "not X", "both X and Y", "either X or Y".
The prefix form has fixed arity, so it parses without brackets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .inference import Question
from .logic import And, Atom, Fact, Formula, Implies, Not, Or, Rule, fact_literals

KEYWORDS = frozenset({
    "not", "or", "and", "both", "either", "if", "then", "they", "are", "is",
    "someone", "it", "the", "case", "that",
})
QUESTION_SUFFIX = "True/False?"
_WORD = re.compile(r"[a-z][a-z-]*")
_ENTITY = re.compile(r"[A-Z][a-zA-Z-]*")


class RenderError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


def valid_attribute(name: str) -> bool:
    return bool(_WORD.fullmatch(name)) and name not in KEYWORDS


# -- rendering -------------------------------------------------------------


def _literal_depth(f: Formula) -> Optional[int]:
    """Negation count if ``f`` is ``not``* applied to an atom."""
    n = 0
    while isinstance(f, Not):
        f, n = f.operand, n + 1
    return n if isinstance(f, Atom) else None


def _flat(f: Formula, op) -> Optional[list]:
    if _literal_depth(f) is not None:
        return [f]
    if isinstance(f, op) and _literal_depth(f.right) is not None:
        left = _flat(f.left, op)
        if left is not None:
            return left + [f.right]
    return None


def _literal_text(f: Formula) -> str:
    words = []
    while isinstance(f, Not):
        words.append("not")
        f = f.operand
    words.append(f.name)
    return " ".join(words)


def _prefix(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "not " + _prefix(f.operand)
    if isinstance(f, And):
        return f"both {_prefix(f.left)} and {_prefix(f.right)}"
    if isinstance(f, Or):
        return f"either {_prefix(f.left)} or {_prefix(f.right)}"
    raise RenderError(f"cannot render {f} inside a sentence")


def _slot(f: Formula) -> str:
    if isinstance(f, (And, Or)):
        items = _flat(f, type(f))
        if items is not None:
            joiner = " and " if isinstance(f, And) else " or "
            return joiner.join(_literal_text(x) for x in items)
    return _prefix(f)


def render_formula(body: Formula) -> str:
    if isinstance(body, Implies):
        return f"If someone is {_slot(body.antecedent)} then they are {_slot(body.consequent)}."
    if isinstance(body, Not) and isinstance(body.operand, (And, Or)):
        return f"It is not the case that someone is {_slot(body.operand)}."
    return f"Someone is {_slot(body)}."


def render_rule(rule: Rule) -> str:
    return render_formula(rule.body)


def render_fact(fact: Fact) -> str:
    lits = fact_literals(fact.body)
    atom = lits[0].operand if isinstance(lits[0], Not) else lits[0]
    return f"{atom.entity} is {' or '.join(_literal_text(x) for x in lits)}."


def render_question(q: Question) -> str:
    return f"{q.subject} is {q.attribute}. {QUESTION_SUFFIX}"


# -- parsing ---------------------------------------------------------------


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.items = [(m.group(), m.start()) for m in re.finditer(r"[^ .]+|\.", text)]
        self.i = 0

    def position(self) -> int:
        return self.items[self.i][1] if self.i < len(self.items) else len(self.text)

    def peek(self) -> Optional[str]:
        return self.items[self.i][0] if self.i < len(self.items) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of text")
        self.i += 1
        return tok

    def expect(self, *words: str) -> None:
        for word in words:
            if self.peek() != word:
                self.fail(f"expected {word!r}")
            self.i += 1

    def end(self) -> None:
        if self.peek() is not None:
            self.fail("trailing text")

    def fail(self, message: str):
        raise ParseError(message, self.text, self.position())


def _check_spacing(text: str) -> None:
    # The token grammar ignores spacing; the text contract does not.
    if "  " in text or text != text.strip() or " ." in text:
        pos = text.find("  ") if "  " in text else (text.find(" .") if " ." in text else 0)
        raise ParseError("irregular spacing", text, max(pos, 0))


def _attribute(toks: _Tokens) -> Atom:
    tok = toks.peek()
    if tok is None or not valid_attribute(tok):
        toks.fail("expected an attribute")
    toks.next()
    return Atom(tok)


def _parse_prefix(toks: _Tokens) -> Formula:
    tok = toks.peek()
    if tok == "not":
        toks.next()
        return Not(_parse_prefix(toks))
    if tok == "both":
        toks.next()
        left = _parse_prefix(toks)
        toks.expect("and")
        return And(left, _parse_prefix(toks))
    if tok == "either":
        toks.next()
        left = _parse_prefix(toks)
        toks.expect("or")
        return Or(left, _parse_prefix(toks))
    return _attribute(toks)


def _parse_literal(toks: _Tokens) -> Formula:
    negations = 0
    while toks.peek() == "not":
        toks.next()
        negations += 1
    f: Formula = _attribute(toks)
    for _ in range(negations):
        f = Not(f)
    return f


def _parse_slot(toks: _Tokens) -> Formula:
    first = _parse_prefix(toks)
    op_word = toks.peek()
    if op_word not in ("and", "or") or _literal_depth(first) is None:
        return first
    op = And if op_word == "and" else Or
    result = first
    while toks.peek() == op_word:
        toks.next()
        result = op(result, _parse_literal(toks))
    if toks.peek() in ("and", "or"):
        toks.fail("mixed 'and'/'or' in a flat list")
    return result


def parse_formula(text: str) -> Formula:
    _check_spacing(text)
    toks = _Tokens(text)
    head = toks.peek()
    if head == "If":
        toks.expect("If", "someone", "is")
        ante = _parse_slot(toks)
        toks.expect("then", "they", "are")
        cons = _parse_slot(toks)
        body: Formula = Implies(ante, cons)
    elif head == "It":
        toks.expect("It", "is", "not", "the", "case", "that", "someone", "is")
        inner = _parse_slot(toks)
        if not isinstance(inner, (And, Or)):
            toks.fail("negated sentence needs an 'and'/'or' body")
        body = Not(inner)
    elif head == "Someone":
        toks.expect("Someone", "is")
        body = _parse_slot(toks)
        if isinstance(body, Not) and isinstance(body.operand, (And, Or)):
            toks.fail("negated compounds use the 'It is not the case' form")
    else:
        toks.fail("expected 'If', 'It' or 'Someone'")
    toks.expect(".")
    toks.end()
    return body


def parse_rule(text: str, rule_id: str = "r?") -> Rule:
    return Rule(rule_id, parse_formula(text))


def _ground_literal(f: Formula, entity: str) -> Formula:
    return Not(_ground_literal(f.operand, entity)) if isinstance(f, Not) else Atom(f.name, entity)


def parse_fact(text: str) -> Fact:
    _check_spacing(text)
    toks = _Tokens(text)
    entity = toks.peek()
    if entity is None or not _ENTITY.fullmatch(entity) or entity in ("If", "It", "Someone"):
        toks.fail("expected an entity name")
    toks.next()
    toks.expect("is")
    first = _parse_literal(toks)
    body = _ground_literal(first, entity)
    if toks.peek() == "or":
        toks.next()
        body = Or(body, _ground_literal(_parse_literal(toks), entity))
    toks.expect(".")
    toks.end()
    if fact_literals(body) is None:
        raise ParseError("facts allow at most one negation per literal", text, 0)
    return Fact(body)


def parse_question(text: str) -> Question:
    _check_spacing(text)
    if not text.endswith(" " + QUESTION_SUFFIX):
        raise ParseError(f"question must end with {QUESTION_SUFFIX!r}", text, len(text))
    toks = _Tokens(text[: -len(QUESTION_SUFFIX) - 1])
    entity = toks.peek()
    if entity is None or not _ENTITY.fullmatch(entity):
        toks.fail("expected an entity name")
    toks.next()
    toks.expect("is")
    attr = _attribute(toks)
    toks.expect(".")
    toks.end()
    return Question(entity, attr.name)


def classify(text: str) -> str:
    """Which sentence kind a line of instance text is: fact, rule or question."""
    if text.endswith(QUESTION_SUFFIX):
        return "question"
    first = text.split(" ", 1)[0]
    return "rule" if first in ("If", "It", "Someone") else "fact"


# -- prompts ---------------------------------------------------------------


@dataclass(frozen=True)
class RenderedInstance:
    facts_text: tuple[str, ...]
    rules_text: tuple[str, ...]
    question_text: str

    @property
    def prompt(self) -> str:
        return serialize_prompt(self)


def serialize_prompt(instance) -> str:
    """Facts, then rules, then the question, joined by single spaces."""
    return " ".join([*instance.facts_text, *instance.rules_text, instance.question_text])


def render_instance(theory, question: Question) -> RenderedInstance:
    return RenderedInstance(
        tuple(render_fact(f) for f in theory.facts),
        tuple(render_rule(r) for r in theory.rules),
        render_question(question),
    )
