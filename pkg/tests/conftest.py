import itertools
import random

import pytest
from hypothesis import strategies as st

from ruleforge.genset import GroupSpec, sample_base_group
from ruleforge.logic import And, Atom, Fact, FalseConst, Implies, Not, Or, Rule, Theory, TrueConst

WORKED_VOCAB = ("green", "blue", "cold", "rough", "young", "nice")
SIX = ("a", "b", "c", "d", "e", "f")


# -- independent oracles ----------------------------------------------------
# Written against the class names only, so they share no code with the
# truth-table engine they check.

def naive_eval(f, env):
    kind = type(f).__name__
    if kind == "Atom":
        return env[f.name]
    if kind == "Not":
        return not naive_eval(f.operand, env)
    if kind == "And":
        return all([naive_eval(f.left, env), naive_eval(f.right, env)])
    if kind == "Or":
        return any([naive_eval(f.left, env), naive_eval(f.right, env)])
    if kind == "Implies":
        return naive_eval(f.consequent, env) if naive_eval(f.antecedent, env) else True
    if kind == "TrueConst":
        return True
    if kind == "FalseConst":
        return False
    raise TypeError(kind)


def all_assignments(names):
    for values in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, values))


def brute_models(theory):
    formulas = [f.body for f in theory.facts] + [r.body for r in theory.rules]
    return [env for env in all_assignments(theory.vocabulary)
            if all(naive_eval(f, env) for f in formulas)]


def brute_status(theory, attribute):
    models = brute_models(theory)
    if not models:
        return "inconsistent"
    return "entailed" if all(m[attribute] for m in models) else "not-entailed"


def brute_equivalent(f1, f2, names):
    return all(naive_eval(f1, env) == naive_eval(f2, env) for env in all_assignments(names))


# -- random structures ------------------------------------------------------

def random_formula(rng, names, depth=4, constants=True):
    if depth <= 1 or rng.random() < 0.25:
        if constants and rng.random() < 0.05:
            return rng.choice([TrueConst(), FalseConst()])
        return Atom(rng.choice(names))
    kind = rng.choice(["not", "and", "or", "implies"])
    if kind == "not":
        return Not(random_formula(rng, names, depth - 1, constants))
    a = random_formula(rng, names, depth - 1, constants)
    b = random_formula(rng, names, depth - 1, constants)
    return {"and": And, "or": Or, "implies": Implies}[kind](a, b)


def random_literal(rng, names):
    atom = Atom(rng.choice(names))
    return Not(atom) if rng.random() < 0.4 else atom


def random_implication_theory(rng, names=SIX, entity="Anne"):
    """Implication-form theory: literal / and / or antecedents, literal or
    conjunctive consequents, facts of 1-2 literals of either polarity."""
    facts = []
    for _ in range(rng.randint(0, 3)):
        lits = [random_literal(rng, names) for _ in range(rng.randint(1, 2))]
        grounded = [Not(Atom(l.operand.name, entity)) if isinstance(l, Not) else Atom(l.name, entity)
                    for l in lits]
        facts.append(Fact(grounded[0] if len(grounded) == 1 else Or(*grounded)))
    rules = []
    for i in range(rng.randint(1, 8)):
        shape = rng.choice(["lit", "lit", "and", "or"])
        if shape == "lit":
            ante = random_literal(rng, names)
        else:
            ante = (And if shape == "and" else Or)(random_literal(rng, names), random_literal(rng, names))
        cons = random_literal(rng, names)
        if rng.random() < 0.15:
            cons = And(cons, random_literal(rng, names))
        rules.append(Rule(f"q{i}", Implies(ante, cons)))
    return Theory(entity, tuple(names), tuple(facts), tuple(rules))


@st.composite
def formulas(draw, names=("p", "q", "r", "s"), max_leaves=10):
    leaves = st.sampled_from(names).map(Atom)
    tree = st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(Not),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Implies(*t)),
        ),
        max_leaves=max_leaves,
    )
    return draw(tree)


@pytest.fixture
def worked_group():
    return sample_base_group(GroupSpec(0, "Anne", WORKED_VOCAB))


@pytest.fixture
def base_theory(worked_group):
    return worked_group.theory


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory):
    from ruleforge.genset import generate_dataset
    out = tmp_path_factory.mktemp("dataset")
    generate_dataset(12, 9, 2024, out)
    return out


@pytest.fixture(scope="session")
def dataset(dataset_dir):
    from ruleforge.genset import load_dataset
    return load_dataset(dataset_dir)
