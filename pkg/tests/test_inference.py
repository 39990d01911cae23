import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SIX, brute_models, brute_status, random_implication_theory
from ruleforge import inference
from ruleforge.inference import (
    EntailmentStatus,
    Question,
    UnsupportedRuleForm,
    answer,
    entails,
    essential_rules,
    forward_chain,
    is_consistent,
)
from ruleforge.logic import Atom, AtomBudgetError, Fact, Implies, Not, Or, Rule, Theory
from ruleforge.rewrite import Law, applicable, apply_law

CHAIN = ("cold", "rough", "young", "nice")


def variant3(theory):
    contra = Fact(Or(Not(Atom("cold", "Anne")), Not(Atom("nice", "Anne"))))
    return theory.with_facts(theory.facts + (contra,))


def qs(theory, attrs=CHAIN):
    return [Question(theory.entity, a) for a in attrs]


def test_consistency_examples(base_theory):
    assert is_consistent(base_theory)
    assert not is_consistent(variant3(base_theory))
    assert is_consistent(Theory("Anne", ()))


def test_entails_dilemma(base_theory):
    assert entails(base_theory, "cold") is EntailmentStatus.ENTAILED


def test_entails_without_cold_to_rough(base_theory):
    theory = base_theory.without_rule("r3")
    assert entails(theory, "rough") is EntailmentStatus.NOT_ENTAILED
    # witness: a model with cold true and rough false
    assert any(m["cold"] and not m["rough"] for m in brute_models(theory))


def test_entails_inconsistent_everywhere(base_theory):
    v3 = variant3(base_theory)
    for attr in base_theory.vocabulary:
        assert entails(v3, attr) is EntailmentStatus.INCONSISTENT


def test_atom_budget():
    vocab = tuple(f"x{i}" for i in range(17))
    with pytest.raises(AtomBudgetError):
        is_consistent(Theory("Anne", vocab))


def test_answer_rows(base_theory):
    assert answer(base_theory, Question("Anne", "nice")) is True
    merged = base_theory.with_rules([
        Rule("rA", Implies(Or(Atom("green"), Atom("blue")), Atom("cold"))),
        base_theory.rule("r3"), base_theory.rule("r4"),
    ])
    assert answer(merged, Question("Anne", "nice")) is False
    assert answer(variant3(base_theory), Question("Anne", "cold")) is False


def test_answer_policies_reserved(base_theory):
    with pytest.raises(NotImplementedError):
        answer(base_theory, Question("Anne", "cold"), policy="priority")
    with pytest.raises(ValueError):
        answer(base_theory, Question("Anne", "cold"), policy="vote")


def test_forward_chain_base(base_theory):
    result = forward_chain(base_theory)
    assert result.entailed == frozenset(CHAIN)
    assert not result.inconsistent
    assert len(result.branches) == 2
    for branch, head in zip(result.branches, ("r1", "r2")):
        assert [s.rule_id for s in branch.steps] == [head, "r3", "r4", "r6"]


def test_forward_chain_single_step():
    theory = Theory("Anne", ("green", "cold"), (Fact(Atom("green", "Anne")),),
                    (Rule("r1", Implies(Atom("green"), Atom("cold"))),))
    result = forward_chain(theory)
    assert result.entailed == {"green", "cold"}
    assert [str(s) for s in result.trace[0]] == ["r1: cold"]


def test_forward_chain_variant3(base_theory):
    result = forward_chain(variant3(base_theory))
    assert result.inconsistent
    assert all(b.closed for b in result.branches)
    assert len(result.branches) == 4


def test_forward_chain_trace_steps_are_supported(base_theory):
    for branch in forward_chain(base_theory).branches:
        known = set(branch.assumptions)
        for step in branch.steps:
            body = base_theory.rule(step.rule_id).body
            assert (body.antecedent.name, True) in known
            known.add(step.literal)


def test_forward_chain_rejects_rewritten_rules(base_theory):
    rule, _ = apply_law(base_theory.rule("r1"), Law.IMPLICATION)
    with pytest.raises(UnsupportedRuleForm):
        forward_chain(base_theory.with_rules([rule]))
    rule, _ = apply_law(base_theory.rule("r1"), Law.DOUBLE_NEGATION)
    with pytest.raises(UnsupportedRuleForm):
        forward_chain(base_theory.with_rules([rule]))


def test_forward_chain_accepts_contrapositives(base_theory):
    rules = [apply_law(r, Law.CONTRAPOSITION)[0] for r in base_theory.rules]
    result = forward_chain(base_theory.with_rules(rules))
    # contrapositives of the chain need the negative-literal split to recover it
    assert result.entailed == frozenset(CHAIN)


def test_essential_rules(base_theory):
    essential, redundant = essential_rules(base_theory, qs(base_theory))
    assert redundant == ("r5",)
    assert "r3" in essential
    without = base_theory.without_rule("r3")
    assert [answer(without, q) for q in qs(base_theory)] == [True, False, False, False]


def test_essential_single_rule():
    theory = Theory("Anne", ("green", "cold"), (Fact(Atom("green", "Anne")),),
                    (Rule("r1", Implies(Atom("green"), Atom("cold"))),))
    assert essential_rules(theory, [Question("Anne", "cold")]) == (("r1",), ())


def test_entails_matches_brute_force_enumeration():
    rng = random.Random(11)
    for _ in range(2000):
        theory = random_implication_theory(rng)
        for attr in SIX:
            assert entails(theory, attr).value == brute_status(theory, attr)


def test_forward_chain_cross_check_10000_theories():
    rng = random.Random(5)
    for _ in range(10_000):
        theory = random_implication_theory(rng)
        chained = forward_chain(theory)
        assert chained.inconsistent == (not is_consistent(theory)), theory
        enumerated = {a for a in SIX if entails(theory, a) is EntailmentStatus.ENTAILED}
        assert set(chained.entailed) == enumerated, theory


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_monotonicity(seed_a, seed_b):
    theory = random_implication_theory(random.Random(seed_a))
    extra = random_implication_theory(random.Random(seed_b)).rules[0]
    bigger = theory.with_rules(theory.rules + (Rule("extra", extra.body),))
    if is_consistent(theory) and is_consistent(bigger):
        before = {a for a in SIX if entails(theory, a) is EntailmentStatus.ENTAILED}
        after = {a for a in SIX if entails(bigger, a) is EntailmentStatus.ENTAILED}
        assert before <= after


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_inconsistency_dominance(seed):
    theory = random_implication_theory(random.Random(seed))
    if not is_consistent(theory):
        assert not any(answer(theory, Question("Anne", a)) for a in SIX[:4])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.lists(st.sampled_from(list(Law)), min_size=1, max_size=4))
def test_equivalence_invariance(seed, laws):
    theory = random_implication_theory(random.Random(seed))
    rules = []
    for rule in theory.rules:
        for law in laws:
            if applicable(law, rule):
                rule, _ = apply_law(rule, law)
        rules.append(rule)
    rewritten = theory.with_rules(rules)
    for attr in SIX:
        assert entails(rewritten, attr) == entails(theory, attr)


def test_surviving_branch_decides():
    # "green or blue", blue contradicts itself: only the green case survives
    theory = Theory(
        "Anne", ("green", "blue", "cold"),
        (Fact(Or(Atom("green", "Anne"), Atom("blue", "Anne"))),),
        (Rule("r1", Implies(Atom("blue"), Not(Atom("blue")))),
         Rule("r2", Implies(Atom("green"), Atom("cold")))),
    )
    assert entails(theory, "cold") is EntailmentStatus.ENTAILED
    result = forward_chain(theory)
    assert not result.inconsistent and "cold" in result.entailed
    assert [b.closed for b in result.branches] == [False, True]


def test_model_mask_cached(base_theory):
    inference.model_mask.cache_clear()
    is_consistent(base_theory)
    is_consistent(base_theory)
    assert inference.model_mask.cache_info().hits >= 1
