import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_assignments, brute_equivalent, formulas, naive_eval, random_formula
from ruleforge.logic import (
    And,
    Atom,
    AtomBudgetError,
    Fact,
    FalseConst,
    Implies,
    LogicError,
    Not,
    Or,
    Rule,
    Theory,
    TrueConst,
    UnknownAtomError,
    atoms_of,
    connectives,
    depth,
    equivalent,
    evaluate,
    ground,
    truth_table,
)

G, B, C = Atom("green"), Atom("blue"), Atom("cold")
FULL = {"green": True, "blue": False, "cold": True, "rough": False, "young": False, "nice": False}


def test_ground_worked_example_rule():
    assert ground(Rule("r1", Implies(G, C)), "Anne") == Implies(Atom("green", "Anne"), Atom("cold", "Anne"))


def test_ground_keeps_constants():
    assert ground(Implies(TrueConst(), C), "Anne") == Implies(TrueConst(), Atom("cold", "Anne"))


def test_ground_contrapositive_form():
    body = Implies(Not(C), Not(G))
    expected = Implies(Not(Atom("cold", "Anne")), Not(Atom("green", "Anne")))
    assert ground(body, "Anne") == expected


def test_evaluate_examples():
    assert evaluate(Or(G, B), {**FULL, "green": True, "blue": False}) is True
    assert evaluate(FalseConst(), FULL) is False
    assert evaluate(Not(And(G, Not(C))), {**FULL, "green": True, "cold": True}) is True


def test_evaluate_unknown_atom():
    with pytest.raises(UnknownAtomError):
        evaluate(Atom("purple"), FULL)


def test_equivalent_examples():
    assert equivalent(Implies(G, C), Implies(Not(C), Not(G)))
    f = Or(And(G, B), Not(C))
    assert equivalent(f, f)
    assert not equivalent(Implies(G, C), Implies(B, C))
    # the distinguishing row: green true, cold false, blue false
    row = {"green": True, "cold": False, "blue": False}
    assert evaluate(Implies(G, C), row) != evaluate(Implies(B, C), row)


def test_equivalent_atom_budget():
    big = Atom("x0")
    for i in range(1, 17):
        big = Or(big, Atom(f"x{i}"))
    with pytest.raises(AtomBudgetError):
        equivalent(big, big)
    sixteen = Atom("x0")
    for i in range(1, 16):
        sixteen = Or(sixteen, Atom(f"x{i}"))
    assert equivalent(sixteen, sixteen)


def test_atoms_of_examples():
    assert atoms_of(Or(G, B)) == ("green", "blue")
    assert atoms_of(TrueConst()) == ()
    assert atoms_of(Not(And(G, Not(C)))) == ("green", "cold")


def test_evaluate_matches_naive_interpreter_on_10000_formulas():
    rng = random.Random(7)
    names = ("a", "b", "c", "d", "e", "f")
    for _ in range(10_000):
        f = random_formula(rng, names, depth=rng.randint(1, 6))
        env = {n: rng.random() < 0.5 for n in names}
        assert evaluate(f, env) == naive_eval(f, env)


def test_truth_table_bit_layout():
    names = ("a", "b", "c")
    f = Or(And(Atom("a"), Not(Atom("b"))), Atom("c"))
    table = truth_table(f, names)
    for row, env in enumerate(_rows(names)):
        assert bool(table >> row & 1) == naive_eval(f, env)


def _rows(names):
    for row in range(1 << len(names)):
        yield {n: bool(row >> i & 1) for i, n in enumerate(names)}


@settings(max_examples=300)
@given(formulas(), formulas())
def test_equivalent_agrees_with_brute_force(f1, f2):
    names = tuple(dict.fromkeys(atoms_of(f1) + atoms_of(f2)))
    assert equivalent(f1, f2) == brute_equivalent(f1, f2, names)


@settings(max_examples=200)
@given(formulas(max_leaves=5), formulas(max_leaves=5), formulas(max_leaves=5))
def test_equivalence_is_an_equivalence_relation(f, g, h):
    assert equivalent(f, f)
    assert equivalent(f, g) == equivalent(g, f)
    if equivalent(f, g) and equivalent(g, h):
        assert equivalent(f, h)


@settings(max_examples=200)
@given(formulas(), formulas())
def test_material_implication(p, q):
    assert equivalent(Implies(p, q), Or(Not(p), q))


@settings(max_examples=200)
@given(formulas(), st.sampled_from(["Anne", "Bob"]))
def test_ground_preserves_structure(f, entity):
    g = ground(f, entity)
    assert Counter(connectives(g)) == Counter(connectives(f))
    assert atoms_of(g) == atoms_of(f)
    assert depth(g) == depth(f)
    for env in all_assignments(atoms_of(f)):
        assert evaluate(g, env) == evaluate(f, env)


def test_rule_must_be_schematic():
    with pytest.raises(LogicError):
        Rule("r1", Implies(Atom("green", "Anne"), C))


def test_rule_depth_limit():
    f = G
    for _ in range(12):
        f = Not(f)
    with pytest.raises(LogicError):
        Rule("r1", f)


def test_fact_shape_checks():
    Fact(Or(Atom("green", "Anne"), Not(Atom("blue", "Anne"))))
    with pytest.raises(LogicError):
        Fact(Not(Not(Atom("green", "Anne"))))
    with pytest.raises(LogicError):
        Fact(Or(G, B))  # not grounded
    with pytest.raises(LogicError):
        Fact(And(Atom("green", "Anne"), Atom("blue", "Anne")))


def test_theory_vocabulary_checks():
    with pytest.raises(UnknownAtomError):
        Theory("Anne", ("green",), (), (Rule("r1", Implies(G, C)),))
    with pytest.raises(LogicError):
        Theory("Anne", ("green", "green"))
    with pytest.raises(LogicError):
        Theory("Anne", ("green",), (Fact(Atom("green", "Bob")),))
